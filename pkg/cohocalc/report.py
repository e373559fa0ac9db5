"""Reproduction reports: ordered check steps, verdicts, JSON and text rendering."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from .artifacts import dump_json, format_rational, sha256_json

VERDICTS = ("pass", "fail", "assumption")


@dataclass(frozen=True)
class Step:
    label: str
    computed: str
    expected: str
    citation: str
    verdict: str

    def __post_init__(self) -> None:
        if self.verdict not in VERDICTS:
            raise ValueError(f"Unknown step verdict: {self.verdict}")

    def to_dict(self) -> dict[str, str]:
        return {
            "label": self.label,
            "computed": self.computed,
            "expected": self.expected,
            "citation": self.citation,
            "verdict": self.verdict,
        }


@dataclass
class Report:
    scenario: str
    steps: list[Step] = field(default_factory=list)

    def check(self, label: str, computed: Any, expected: Any, citation: str) -> bool:
        """Exact comparison; rationals, ints, ring elements and tuples of them compare by value."""
        passed = _values_equal(computed, expected)
        self.steps.append(Step(label, format_value(computed), format_value(expected), citation, "pass" if passed else "fail"))
        return passed

    def record(self, label: str, computed: Any, citation: str) -> None:
        """A computed intermediate that is its own expectation, e.g. a derived constant."""
        text = format_value(computed)
        self.steps.append(Step(label, text, text, citation, "pass"))

    def fail(self, label: str, computed: Any, expected: Any, citation: str) -> None:
        self.steps.append(Step(label, format_value(computed), format_value(expected), citation, "fail"))

    def assume(self, label: str, statement: str, citation: str) -> None:
        self.steps.append(Step(label, statement, statement, citation, "assumption"))

    def extend(self, other: "Report") -> None:
        self.steps.extend(other.steps)

    @property
    def passed(self) -> bool:
        return all(step.verdict != "fail" for step in self.steps)

    @property
    def verdict(self) -> str:
        return "pass" if self.passed else "fail"

    def to_dict(self) -> dict[str, Any]:
        return {
            "scenario": self.scenario,
            "steps": [step.to_dict() for step in self.steps],
            "verdict": self.verdict,
        }

    def digest(self) -> str:
        return sha256_json(self.to_dict())


def format_value(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, Fraction)):
        return format_rational(value)
    if isinstance(value, (tuple, list)):
        return "(" + ", ".join(format_value(item) for item in value) + ")"
    if isinstance(value, (set, frozenset)):
        return "{" + ", ".join(sorted(format_value(item) for item in value)) + "}"
    return str(value)


def _values_equal(computed: Any, expected: Any) -> bool:
    if isinstance(expected, str) and not isinstance(computed, str):
        return format_value(computed) == expected
    try:
        return bool(computed == expected)
    except TypeError:
        return format_value(computed) == format_value(expected)


def reports_to_json(reports: list[Report]) -> str:
    if len(reports) == 1:
        return dump_json(reports[0].to_dict())
    return dump_json([report.to_dict() for report in reports])


def render_text(report: Report) -> str:
    """Plain-text table, one row per step, with the verdict and digest as footer."""
    headers = ("verdict", "label", "computed", "expected", "citation")
    rows = [(step.verdict, step.label, step.computed, step.expected, step.citation) for step in report.steps]
    widths = [len(header) for header in headers]
    for row in rows:
        widths = [min(max(width, len(cell)), 60) for width, cell in zip(widths, row)]
    lines = [f"scenario: {report.scenario}"]
    lines.append("  ".join(header.ljust(width) for header, width in zip(headers, widths)).rstrip())
    lines.append("  ".join("-" * width for width in widths))
    for row in rows:
        lines.append("  ".join(_clip(cell, width).ljust(width) for cell, width in zip(row, widths)).rstrip())
    counts = {verdict: sum(1 for step in report.steps if step.verdict == verdict) for verdict in VERDICTS}
    lines.append(
        f"verdict: {report.verdict} ({counts['pass']} pass, {counts['fail']} fail, {counts['assumption']} assumption)"
    )
    lines.append(f"digest: {report.digest()}")
    return "\n".join(lines) + "\n"


def _clip(text: str, width: int) -> str:
    return text if len(text) <= width else text[: width - 3] + "..."
