"""Development entrypoint for the cohocalc command line."""

from cohocalc.cli import main

if __name__ == "__main__":
    raise SystemExit(main())
