"""Error hierarchy shared by the kernel, the geometry builders, the DSL and the CLI."""

from __future__ import annotations

from typing import Any


class CohocalcError(ValueError):
    """Base error. ``code`` is a stable identifier used in reports and messages."""

    code = "CohocalcError"

    def __init__(self, message: str, **details: Any):
        super().__init__(message)
        self.details = details


# ring_core


class DuplicateGenerator(CohocalcError):
    code = "DuplicateGenerator"


class InvalidGenerator(CohocalcError):
    code = "InvalidGenerator"


class UnknownGenerator(CohocalcError):
    code = "UnknownGenerator"


class NonHomogeneousRule(CohocalcError):
    code = "NonHomogeneousRule"


class NonDecreasingRule(CohocalcError):
    code = "NonDecreasingRule"


class NotConfluent(CohocalcError):
    code = "NotConfluent"

    def __init__(self, message: str, witness: Any = None, normal_forms: list[Any] | None = None):
        super().__init__(message, witness=witness, normal_forms=normal_forms or [])
        self.witness = witness
        self.normal_forms = normal_forms or []


class IntegralsCoverage(CohocalcError):
    code = "IntegralsCoverage"


class MixedRings(CohocalcError):
    code = "MixedRings"


class NonPositiveDegreeTerm(CohocalcError):
    code = "NonPositiveDegreeTerm"


class UnknownTopMonomial(CohocalcError):
    code = "UnknownTopMonomial"


class NameCollision(CohocalcError):
    code = "NameCollision"


# spaces


class NegativeGenus(CohocalcError):
    code = "NegativeGenus"


class BadChernDegrees(CohocalcError):
    code = "BadChernDegrees"


class NotABundleRing(CohocalcError):
    code = "NotABundleRing"


# grr_lambda


class ModelMismatch(CohocalcError):
    code = "ModelMismatch"


class OracleMismatch(CohocalcError):
    code = "OracleMismatch"


class UntaggedRing(CohocalcError):
    code = "UntaggedRing"


# mukai_k


class MixedPolarization(CohocalcError):
    code = "MixedPolarization"


class NotOrthogonal(CohocalcError):
    code = "NotOrthogonal"


# dsl


class DslError(CohocalcError):
    code = "DslError"

    def __init__(self, message: str, line: int | None = None, col: int | None = None, **details: Any):
        location = f"line {line}, col {col}: " if line is not None else ""
        super().__init__(f"{location}{message}", line=line, col=col, **details)
        self.line = line
        self.col = col


class DslSyntaxError(DslError):
    code = "SyntaxError"

    def __init__(self, message: str, line: int | None = None, col: int | None = None, expected: list[str] | None = None):
        super().__init__(message, line=line, col=col, expected=sorted(expected or []))
        self.expected = sorted(expected or [])


class UnknownIdentifier(DslError):
    code = "UnknownIdentifier"


class DegreeMismatch(DslError):
    code = "DegreeMismatch"


class DslEvalError(DslError):
    code = "EvalError"


# cli


class UnknownScenario(CohocalcError):
    code = "UnknownScenario"


class ConfigError(CohocalcError):
    code = "ConfigError"
