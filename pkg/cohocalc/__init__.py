"""cohocalc: exact arithmetic in graded-commutative cohomology rings.

The package provides the rewriting kernel, the ring builders for curves,
Jacobians and projective bundles, determinant line bundles, the ``.coh`` text
format and the reproduction scenarios for the nilpotent-cone degrees.
"""

__all__ = ["__version__"]

__version__ = "0.1.0"
