"""Exact arithmetic in finitely presented graded-commutative rings.

A ring is given by even-degree generators, degree-homogeneous rewrite rules and
a top degree (twice the complex dimension). Every monomial of degree at most
the top degree is reduced once, at construction time, under every applicable
rule; the reductions must agree (confluence) and the agreed normal forms are
stored. Multiplication and normalization afterwards are table lookups, so
rings and elements are immutable values.

Coefficients are :class:`fractions.Fraction` throughout; nothing here ever
touches floating point.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from fractions import Fraction
from types import MappingProxyType
from typing import TYPE_CHECKING, Any, Callable, Iterable, Iterator, Mapping, Union

from .artifacts import format_rational
from .errors import (
    CohocalcError,
    DuplicateGenerator,
    IntegralsCoverage,
    InvalidGenerator,
    MixedRings,
    NameCollision,
    NonDecreasingRule,
    NonHomogeneousRule,
    NonPositiveDegreeTerm,
    NotConfluent,
    UnknownGenerator,
    UnknownTopMonomial,
)

if TYPE_CHECKING:
    from .report import Report

logger = logging.getLogger(__name__)

Rational = Fraction
Scalar = Union[int, Fraction]

IDENTIFIER = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")


@dataclass(frozen=True)
class Generator:
    name: str
    degree: int
    cdeg: int = 0

    def __post_init__(self) -> None:
        if not IDENTIFIER.match(self.name):
            raise InvalidGenerator(f"Generator name is not an identifier: {self.name!r}")
        if not isinstance(self.degree, int) or self.degree <= 0 or self.degree % 2:
            raise InvalidGenerator(f"Generator {self.name} must have positive even degree, got {self.degree}")
        if self.cdeg not in (0, 1, 2):
            raise InvalidGenerator(f"Generator {self.name} has fiber-degree tag {self.cdeg}; expected 0, 1 or 2")


@dataclass(frozen=True)
class Monomial:
    """Exponent vector keyed by generator name; zero exponents are never stored."""

    exponents: tuple[tuple[str, int], ...] = ()

    @classmethod
    def of(cls, mapping: Mapping[str, int] | None = None, **exponents: int) -> "Monomial":
        merged = dict(mapping or {})
        for name, power in exponents.items():
            merged[name] = merged.get(name, 0) + power
        if any(power < 0 for power in merged.values()):
            raise ValueError(f"Negative exponent in monomial: {merged}")
        return cls(tuple(sorted((name, power) for name, power in merged.items() if power)))

    def as_dict(self) -> dict[str, int]:
        return dict(self.exponents)

    def get(self, name: str) -> int:
        for key, power in self.exponents:
            if key == name:
                return power
        return 0

    def names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.exponents)

    def is_one(self) -> bool:
        return not self.exponents

    def __mul__(self, other: "Monomial") -> "Monomial":
        if not other.exponents:
            return self
        if not self.exponents:
            return other
        merged = dict(self.exponents)
        for name, power in other.exponents:
            merged[name] = merged.get(name, 0) + power
        return Monomial(tuple(sorted(merged.items())))

    def divides(self, other: "Monomial") -> bool:
        return all(other.get(name) >= power for name, power in self.exponents)

    def quotient(self, divisor: "Monomial") -> "Monomial":
        remaining = dict(self.exponents)
        for name, power in divisor.exponents:
            left = remaining.get(name, 0) - power
            if left < 0:
                raise ValueError(f"{divisor} does not divide {self}")
            remaining[name] = left
        return Monomial(tuple(sorted((name, power) for name, power in remaining.items() if power)))

    def without(self, name: str) -> "Monomial":
        return Monomial(tuple(item for item in self.exponents if item[0] != name))


ONE = Monomial()

Terms = tuple[tuple[Monomial, Fraction], ...]


@dataclass(frozen=True)
class RewriteRule:
    lhs: Monomial
    rhs: Terms = ()

    @classmethod
    def of(cls, lhs: Monomial | Mapping[str, int], rhs: Any = None) -> "RewriteRule":
        if not isinstance(lhs, Monomial):
            lhs = Monomial.of(lhs)
        return cls(lhs, _coerce_terms(rhs))


def rule(lhs: Monomial | Mapping[str, int], rhs: Any = None) -> RewriteRule:
    return RewriteRule.of(lhs, rhs)


@dataclass(frozen=True)
class RingPresentation:
    generators: tuple[Generator, ...]
    rules: tuple[RewriteRule, ...]
    top_degree: int
    integrals: Terms
    name: str = field(default="", compare=False)
    _normal_forms: Mapping[Monomial, Terms] = field(default_factory=dict, compare=False, repr=False)
    _index: Mapping[str, int] = field(default_factory=dict, compare=False, repr=False)
    _order_keys: Mapping[Monomial, tuple[int, tuple[int, ...]]] = field(default_factory=dict, compare=False, repr=False)
    _normal_by_degree: Mapping[int, tuple[Monomial, ...]] = field(default_factory=dict, compare=False, repr=False)
    _integral_values: Mapping[Monomial, Fraction] = field(default_factory=dict, compare=False, repr=False)
    # memo of reduced monomial products; None marks a product above the top degree
    _products: dict[tuple[Monomial, Monomial], Terms | None] = field(default_factory=dict, compare=False, repr=False)

    # lookups

    def generator(self, name: str) -> Generator:
        position = self._index.get(name)
        if position is None:
            raise UnknownGenerator(f"{name!r} is not a generator of ring {self.name or '<anonymous>'}")
        return self.generators[position]

    def has_generator(self, name: str) -> bool:
        return name in self._index

    def generator_names(self) -> tuple[str, ...]:
        return tuple(gen.name for gen in self.generators)

    def degree_of(self, monomial: Monomial) -> int:
        key = self._order_keys.get(monomial)
        if key is not None:
            return key[0]
        return sum(self.generator(name).degree * power for name, power in monomial.exponents)

    def cdeg_of(self, monomial: Monomial) -> int:
        return sum(self.generator(name).cdeg * power for name, power in monomial.exponents)

    def order_key(self, monomial: Monomial) -> tuple[int, tuple[int, ...]]:
        """Graded-lexicographic key with precedence given by generator order."""
        key = self._order_keys.get(monomial)
        if key is not None:
            return key
        return _order_key(monomial, self.generators)

    def normal_monomials(self, degree: int | None = None) -> list[Monomial]:
        if degree is not None:
            return list(self._normal_by_degree.get(degree, ()))
        return [monomial for value in sorted(self._normal_by_degree) for monomial in self._normal_by_degree[value]]

    # element constructors

    def element(self, terms: Any = None) -> "Element":
        return Element(self, _normalize_terms(self, _coerce_terms(terms)))

    def zero(self) -> "Element":
        return Element(self, ())

    def one(self) -> "Element":
        return self.scalar(1)

    def scalar(self, value: Scalar) -> "Element":
        return self.element({ONE: Fraction(value)})

    def gen(self, name: str) -> "Element":
        self.generator(name)
        return self.element({Monomial.of({name: 1}): Fraction(1)})

    def monomial(self, **exponents: int) -> "Element":
        return self.element({Monomial.of(exponents): Fraction(1)})

    def format_monomial(self, monomial: Monomial) -> str:
        return _format_monomial(monomial, self.generators)


@dataclass(frozen=True, eq=False)
class Element:
    """A normalized ring element; build it through ``RingPresentation.element``."""

    ring: RingPresentation
    terms: Terms

    def as_dict(self) -> dict[Monomial, Fraction]:
        return dict(self.terms)

    def coefficient(self, monomial: Monomial | Mapping[str, int]) -> Fraction:
        if not isinstance(monomial, Monomial):
            monomial = Monomial.of(monomial)
        return dict(self.terms).get(monomial, Fraction(0))

    def is_zero(self) -> bool:
        return not self.terms

    def degrees(self) -> set[int]:
        return {self.ring.degree_of(monomial) for monomial, _ in self.terms}

    def is_homogeneous(self, degree: int | None = None) -> bool:
        degrees = self.degrees()
        if not degrees:
            return True
        if len(degrees) != 1:
            return False
        return degree is None or degrees == {degree}

    def _coerce(self, other: Any) -> "Element":
        if isinstance(other, Element):
            _require_same_ring(self, other)
            return other
        if isinstance(other, (int, Fraction)):
            return self.ring.scalar(other)
        raise TypeError(f"Cannot combine an element with {type(other).__name__}")

    def __add__(self, other: Any) -> "Element":
        other = self._coerce(other)
        return linear_combine([(1, self), (1, other)])

    __radd__ = __add__

    def __sub__(self, other: Any) -> "Element":
        other = self._coerce(other)
        return linear_combine([(1, self), (-1, other)])

    def __rsub__(self, other: Any) -> "Element":
        return self._coerce(other) - self

    def __neg__(self) -> "Element":
        return Element(self.ring, tuple((monomial, -coefficient) for monomial, coefficient in self.terms))

    def __mul__(self, other: Any) -> "Element":
        if isinstance(other, (int, Fraction)):
            return linear_combine([(Fraction(other), self)])
        return mul(self, self._coerce(other))

    __rmul__ = __mul__

    def __truediv__(self, other: Scalar) -> "Element":
        return linear_combine([(1 / Fraction(other), self)])

    def __pow__(self, exponent: int) -> "Element":
        return power(self, exponent)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            return self == self.ring.scalar(other)
        if not isinstance(other, Element):
            return NotImplemented
        return (self.ring is other.ring or self.ring == other.ring) and self.terms == other.terms

    def __hash__(self) -> int:
        return hash(self.terms)

    def __str__(self) -> str:
        return format_element(self)

    def __repr__(self) -> str:
        return f"Element({format_element(self)!r})"


# construction and validation


@dataclass
class _Analysis:
    findings: list[dict[str, Any]]
    normal_forms: dict[Monomial, Terms] | None
    order_keys: dict[Monomial, tuple[int, tuple[int, ...]]]


def make_ring(
    generators: Iterable[Generator],
    rules: Iterable[RewriteRule],
    top_degree: int,
    integrals: Any,
    name: str = "",
    check: bool = True,
) -> RingPresentation:
    """Validate a presentation and precompute every normal form up to the top degree.

    With ``check=False`` confluence and integrals coverage are reported by
    :func:`verify_presentation` instead of raised; structural errors still raise.
    """
    generators = tuple(generators)
    rules = tuple(rules)
    integrals_terms = _coerce_terms(integrals, keep_zero=True)
    analysis = _analyze(generators, rules, top_degree, integrals_terms)
    structural = [item for item in analysis.findings if item["code"] not in {"NotConfluent", "IntegralsCoverage"}]
    if structural:
        raise _finding_error(structural[0])
    if check and analysis.findings:
        raise _finding_error(analysis.findings[0])
    assert analysis.normal_forms is not None
    keys = analysis.order_keys
    by_degree: dict[int, list[Monomial]] = {}
    for monomial, form in analysis.normal_forms.items():
        if form == ((monomial, Fraction(1)),):
            by_degree.setdefault(keys[monomial][0], []).append(monomial)
    logger.debug(
        "ring %s: %d generators, %d rules, %d monomials up to degree %d",
        name or "<anonymous>",
        len(generators),
        len(rules),
        len(analysis.normal_forms),
        top_degree,
    )
    return RingPresentation(
        generators=generators,
        rules=rules,
        top_degree=top_degree,
        integrals=tuple(sorted(integrals_terms, key=lambda item: _order_key(item[0], generators))),
        name=name,
        _normal_forms=MappingProxyType(analysis.normal_forms),
        _index=MappingProxyType({gen.name: position for position, gen in enumerate(generators)}),
        _order_keys=MappingProxyType(keys),
        _normal_by_degree=MappingProxyType(
            {value: tuple(sorted(monomials, key=keys.__getitem__)) for value, monomials in by_degree.items()}
        ),
        _integral_values=MappingProxyType(dict(integrals_terms)),
    )


def verify_presentation(ring: RingPresentation) -> "Report":
    """Re-run every presentation check and return the findings as report steps."""
    from .report import Report

    analysis = _analyze(ring.generators, ring.rules, ring.top_degree, ring.integrals)
    report = Report(scenario=f"verify:{ring.name or 'ring'}")
    checks = [
        ("termination", {"NonDecreasingRule"}),
        ("homogeneity", {"NonHomogeneousRule"}),
        ("confluence", {"NotConfluent"}),
        ("integrals coverage", {"IntegralsCoverage"}),
    ]
    monomial_count = len(analysis.normal_forms or {})
    for label, codes in checks:
        failures = [item for item in analysis.findings if item["code"] in codes]
        if failures:
            computed = "; ".join(f"{item['code']}: {item['message']}" for item in failures)
            report.fail(f"{ring.name or 'ring'} {label}", computed, "no findings", "presentation check")
        else:
            report.record(
                f"{ring.name or 'ring'} {label}",
                f"no findings over {monomial_count} monomials of degree <= {ring.top_degree}",
                "presentation check",
            )
    return report


def _analyze(
    generators: tuple[Generator, ...],
    rules: tuple[RewriteRule, ...],
    top_degree: int,
    integrals: Terms,
) -> _Analysis:
    findings: list[dict[str, Any]] = []
    seen: set[str] = set()
    for gen in generators:
        if gen.name in seen:
            findings.append({"code": "DuplicateGenerator", "message": f"generator {gen.name} declared twice", "witness": gen.name})
        seen.add(gen.name)
    if not isinstance(top_degree, int) or top_degree < 0 or top_degree % 2:
        findings.append({"code": "InvalidTopDegree", "message": f"top degree must be a non-negative even integer, got {top_degree}", "witness": top_degree})
    if findings:
        return _Analysis(findings, None, {})

    degrees = {gen.name: gen.degree for gen in generators}

    def degree(monomial: Monomial) -> int:
        return sum(degrees[name] * power for name, power in monomial.exponents)

    def label(monomial: Monomial) -> str:
        return _format_monomial(monomial, generators)

    for candidate in [r.lhs for r in rules] + [m for r in rules for m, _ in r.rhs] + [m for m, _ in integrals]:
        unknown = [name for name in candidate.names() if name not in degrees]
        if unknown:
            findings.append({"code": "UnknownGenerator", "message": f"unknown generator {unknown[0]}", "witness": unknown[0]})
            return _Analysis(findings, None, {})

    for item in rules:
        if item.lhs.is_one():
            findings.append({"code": "NonDecreasingRule", "message": "rule with constant left-hand side", "witness": "1"})
            continue
        lhs_degree = degree(item.lhs)
        lhs_key = _order_key(item.lhs, generators)
        for monomial, _ in item.rhs:
            if degree(monomial) != lhs_degree:
                findings.append(
                    {
                        "code": "NonHomogeneousRule",
                        "message": f"{label(item.lhs)} (degree {lhs_degree}) -> {label(monomial)} (degree {degree(monomial)})",
                        "witness": label(item.lhs),
                    }
                )
            elif _order_key(monomial, generators) >= lhs_key:
                findings.append(
                    {
                        "code": "NonDecreasingRule",
                        "message": f"{label(item.lhs)} -> {label(monomial)} does not decrease in the monomial order",
                        "witness": label(item.lhs),
                    }
                )
    if findings:
        return _Analysis(findings, None, {})

    keys = {monomial: _order_key(monomial, generators) for monomial in _monomials_up_to(generators, top_degree)}
    normal_forms: dict[Monomial, Terms] = {}
    for monomial in sorted(keys, key=keys.__getitem__):
        forms: list[Terms] = []
        for item in rules:
            if not item.lhs.divides(monomial):
                continue
            cofactor = monomial.quotient(item.lhs)
            accumulated: dict[Monomial, Fraction] = {}
            for rhs_monomial, coefficient in item.rhs:
                for reduced, reduced_coefficient in normal_forms[cofactor * rhs_monomial]:
                    accumulated[reduced] = accumulated.get(reduced, Fraction(0)) + coefficient * reduced_coefficient
            forms.append(_canonical_terms(accumulated, keys.__getitem__))
        if not forms:
            normal_forms[monomial] = ((monomial, Fraction(1)),)
            continue
        distinct = list(dict.fromkeys(forms))
        if len(distinct) > 1:
            rendered = [_format_terms(form, generators) for form in distinct]
            findings.append(
                {
                    "code": "NotConfluent",
                    "message": f"{label(monomial)} has normal forms {', '.join(rendered)}",
                    "witness": label(monomial),
                    "normal_forms": rendered,
                }
            )
        normal_forms[monomial] = forms[0]

    top_normal = {
        monomial
        for monomial, form in normal_forms.items()
        if form == ((monomial, Fraction(1)),) and degree(monomial) == top_degree
    }
    table = dict(integrals)
    for monomial in sorted(table, key=lambda m: _order_key(m, generators)):
        if monomial not in top_normal:
            findings.append(
                {
                    "code": "IntegralsCoverage",
                    "message": f"integral given for {label(monomial)}, which is not a normal-form monomial of degree {top_degree}",
                    "witness": label(monomial),
                }
            )
    for monomial in sorted(top_normal - set(table), key=lambda m: _order_key(m, generators)):
        findings.append(
            {
                "code": "IntegralsCoverage",
                "message": f"no integral given for top-degree monomial {label(monomial)}",
                "witness": label(monomial),
            }
        )
    return _Analysis(findings, normal_forms, keys)


def _finding_error(finding: dict[str, Any]) -> CohocalcError:
    code = finding["code"]
    message = finding["message"]
    if code == "NotConfluent":
        return NotConfluent(message, witness=finding["witness"], normal_forms=finding.get("normal_forms"))
    error_types = {
        "DuplicateGenerator": DuplicateGenerator,
        "UnknownGenerator": UnknownGenerator,
        "NonHomogeneousRule": NonHomogeneousRule,
        "NonDecreasingRule": NonDecreasingRule,
        "IntegralsCoverage": IntegralsCoverage,
    }
    error_type = error_types.get(code, CohocalcError)
    return error_type(message, witness=finding.get("witness"))


def _monomials_up_to(generators: tuple[Generator, ...], top_degree: int) -> Iterator[Monomial]:
    def walk(position: int, budget: int, chosen: tuple[tuple[str, int], ...]) -> Iterator[Monomial]:
        if position == len(generators):
            yield Monomial(tuple(sorted(chosen)))
            return
        gen = generators[position]
        for power in range(budget // gen.degree + 1):
            extra = ((gen.name, power),) if power else ()
            yield from walk(position + 1, budget - power * gen.degree, chosen + extra)

    yield from walk(0, top_degree, ())


def _order_key(monomial: Monomial, generators: tuple[Generator, ...]) -> tuple[int, tuple[int, ...]]:
    exponents = monomial.as_dict()
    degree = sum(gen.degree * exponents.get(gen.name, 0) for gen in generators)
    return degree, tuple(exponents.get(gen.name, 0) for gen in generators)


# term plumbing


def _coerce_terms(value: Any, keep_zero: bool = False) -> Terms:
    if value is None:
        return ()
    if isinstance(value, Element):
        return value.terms
    if isinstance(value, (int, Fraction)):
        return ((ONE, Fraction(value)),) if value or keep_zero else ()
    if isinstance(value, Mapping):
        items = value.items()
    else:
        items = value
    merged: dict[Monomial, Fraction] = {}
    for monomial, coefficient in items:
        if not isinstance(monomial, Monomial):
            monomial = Monomial.of(monomial)
        merged[monomial] = merged.get(monomial, Fraction(0)) + Fraction(coefficient)
    return tuple((monomial, coefficient) for monomial, coefficient in merged.items() if coefficient or keep_zero)


def _canonical_terms(terms: Mapping[Monomial, Fraction], key: Callable[[Monomial], Any]) -> Terms:
    kept = [(monomial, coefficient) for monomial, coefficient in terms.items() if coefficient]
    kept.sort(key=lambda item: key(item[0]), reverse=True)
    return tuple(kept)


def _normalize_terms(ring: RingPresentation, terms: Terms) -> Terms:
    forms = ring._normal_forms
    accumulated: dict[Monomial, Fraction] = {}
    for monomial, coefficient in terms:
        reduced_terms = forms.get(monomial)
        if reduced_terms is None:
            # every monomial up to the top degree is tabulated
            for name in monomial.names():
                ring.generator(name)
            continue
        for reduced, reduced_coefficient in reduced_terms:
            accumulated[reduced] = accumulated.get(reduced, 0) + coefficient * reduced_coefficient
    return _canonical_terms(accumulated, ring.order_key)


def _require_same_ring(a: Element, b: Element) -> None:
    if a.ring is not b.ring and a.ring != b.ring:
        raise MixedRings(f"Elements belong to different rings: {a.ring.name or '<anonymous>'} and {b.ring.name or '<anonymous>'}")


def _format_monomial(monomial: Monomial, generators: tuple[Generator, ...]) -> str:
    if monomial.is_one():
        return "1"
    parts = []
    for gen in generators:
        power = monomial.get(gen.name)
        if power == 1:
            parts.append(gen.name)
        elif power > 1:
            parts.append(f"{gen.name}^{power}")
    return "*".join(parts)


def _format_terms(terms: Terms, generators: tuple[Generator, ...]) -> str:
    if not terms:
        return "0"
    pieces: list[str] = []
    for position, (monomial, coefficient) in enumerate(terms):
        sign = "-" if coefficient < 0 else "+"
        magnitude = abs(coefficient)
        if monomial.is_one():
            body = format_rational(magnitude)
        elif magnitude == 1:
            body = _format_monomial(monomial, generators)
        else:
            body = f"{format_rational(magnitude)}*{_format_monomial(monomial, generators)}"
        if position == 0:
            pieces.append(f"-{body}" if sign == "-" else body)
        else:
            pieces.append(f" {sign} {body}")
    return "".join(pieces)


def format_element(element: Element) -> str:
    """Canonical string: terms in descending monomial order, e.g. ``-2*theta*rho``."""
    return _format_terms(element.terms, element.ring.generators)


# operations


def normalize(element: Element) -> Element:
    return Element(element.ring, _normalize_terms(element.ring, element.terms))


def linear_combine(pairs: Iterable[tuple[Scalar, Element]]) -> Element:
    pairs = list(pairs)
    if not pairs:
        raise ValueError("linear_combine needs at least one element to fix the ring")
    ring = pairs[0][1].ring
    accumulated: dict[Monomial, Fraction] = {}
    for scalar, element in pairs:
        if element.ring is not ring and element.ring != ring:
            raise MixedRings("linear_combine received elements of different rings")
        if scalar == 1:
            for monomial, coefficient in element.terms:
                accumulated[monomial] = accumulated.get(monomial, 0) + coefficient
            continue
        scalar = Fraction(scalar)
        for monomial, coefficient in element.terms:
            accumulated[monomial] = accumulated.get(monomial, 0) + scalar * coefficient
    return Element(ring, _canonical_terms(accumulated, ring.order_key))


def mul(a: Element, b: Element) -> Element:
    _require_same_ring(a, b)
    ring = a.ring
    forms = ring._normal_forms
    products = ring._products
    accumulated: dict[Monomial, Fraction] = {}
    for left, left_coefficient in a.terms:
        for right, right_coefficient in b.terms:
            pair = (left, right)
            if pair in products:
                reduced_terms = products[pair]
            else:
                reduced_terms = products[pair] = forms.get(left * right)
            if reduced_terms is None:
                continue
            coefficient = left_coefficient * right_coefficient
            for reduced, reduced_coefficient in reduced_terms:
                accumulated[reduced] = accumulated.get(reduced, 0) + coefficient * reduced_coefficient
    return Element(ring, _canonical_terms(accumulated, ring.order_key))


def power(a: Element, n: int) -> Element:
    if n < 0:
        raise ValueError("Ring elements can only be raised to non-negative powers")
    result = a.ring.one()
    base = a
    while n:
        if n & 1:
            result = mul(result, base)
        n >>= 1
        if n:
            base = mul(base, base)
    return result


def exp_truncated(a: Element) -> Element:
    """Sum of a^n/n! up to the top degree; ``a`` must have no degree-0 part."""
    for monomial, _ in a.terms:
        if a.ring.degree_of(monomial) <= 0:
            raise NonPositiveDegreeTerm(f"exp_truncated needs positive-degree terms, got {format_element(a)}")
    result = a.ring.one()
    term = a.ring.one()
    n = 0
    while True:
        n += 1
        term = mul(term, a) / n
        if term.is_zero():
            return result
        result = result + term


def inverse_unipotent(a: Element) -> Element:
    """Inverse of 1 + n with n of positive degree, as the finite series of (-n)^k."""
    nilpotent = a - 1
    for monomial, _ in nilpotent.terms:
        if a.ring.degree_of(monomial) <= 0:
            raise NonPositiveDegreeTerm(f"{format_element(a)} is not of the form 1 + (positive degree)")
    result = a.ring.one()
    term = a.ring.one()
    while True:
        term = mul(term, -nilpotent)
        if term.is_zero():
            return result
        result = result + term


def degree_component(a: Element, d: int) -> Element:
    return Element(a.ring, tuple(item for item in a.terms if a.ring.degree_of(item[0]) == d))


def integrate(a: Element) -> Fraction:
    ring = a.ring
    table = ring._integral_values
    total = Fraction(0)
    for monomial, coefficient in normalize(a).terms:
        if ring.degree_of(monomial) != ring.top_degree:
            continue
        if monomial not in table:
            raise UnknownTopMonomial(f"No integral recorded for {ring.format_monomial(monomial)} in ring {ring.name or '<anonymous>'}")
        total += coefficient * table[monomial]
    return total


def coeff_of(a: Element, g: Generator | str, k: int) -> Element:
    """Coefficient of g^k in ``a``, as an element of the same ring not involving g."""
    name = g.name if isinstance(g, Generator) else g
    a.ring.generator(name)
    picked = {monomial.without(name): coefficient for monomial, coefficient in a.terms if monomial.get(name) == k}
    return Element(a.ring, _canonical_terms(picked, a.ring.order_key))


def coeff_of_monomial(a: Element, m: Monomial) -> Element:
    """Cofactor of ``m``: terms whose exponents on the generators of ``m`` match it exactly, divided by ``m``."""
    for name in m.names():
        a.ring.generator(name)
    picked = {
        monomial.quotient(m): coefficient
        for monomial, coefficient in a.terms
        if all(monomial.get(name) == power for name, power in m.exponents)
    }
    return Element(a.ring, _canonical_terms(picked, a.ring.order_key))


def substitute_zero(a: Element, name: str) -> Element:
    a.ring.generator(name)
    return Element(a.ring, tuple(item for item in a.terms if item[0].get(name) == 0))


def transfer(a: Element, ring: RingPresentation) -> Element:
    """Re-express ``a`` in ``ring``, which must contain every generator ``a`` uses."""
    for monomial, _ in a.terms:
        for name in monomial.names():
            if not ring.has_generator(name):
                raise UnknownGenerator(f"Cannot move {format_element(a)} into ring {ring.name or '<anonymous>'}: no generator {name}")
    return ring.element(a.terms)


def vanishing_rules(ring: RingPresentation) -> list[RewriteRule]:
    """Relations m -> 0 for the minimal irreducible monomials above the top degree.

    Inside a single ring these monomials vanish by truncation; once the ring is a
    factor of a product or the base of a bundle they must vanish by a relation.
    """
    lhs_set = [item.lhs for item in ring.rules]
    found: dict[Monomial, None] = {}
    for base in ring.normal_monomials():
        for gen in ring.generators:
            candidate = base * Monomial.of({gen.name: 1})
            if ring.degree_of(candidate) <= ring.top_degree:
                continue
            if any(lhs.divides(candidate) for lhs in lhs_set):
                continue
            minimal = all(
                ring.degree_of(candidate.quotient(Monomial.of({name: 1}))) <= ring.top_degree
                for name in candidate.names()
            )
            if minimal:
                found[candidate] = None
    return [RewriteRule(monomial, ()) for monomial in sorted(found, key=ring.order_key)]


def tensor_product(a: RingPresentation, b: RingPresentation, name: str = "") -> RingPresentation:
    clash = sorted(set(a.generator_names()) & set(b.generator_names()))
    if clash:
        raise NameCollision(f"Tensor factors share generator names: {', '.join(clash)}")
    integrals = {
        left * right: left_value * right_value
        for left, left_value in a.integrals
        for right, right_value in b.integrals
    }
    return make_ring(
        a.generators + b.generators,
        a.rules + tuple(vanishing_rules(a)) + b.rules + tuple(vanishing_rules(b)),
        a.top_degree + b.top_degree,
        integrals,
        name=name or f"{a.name or 'A'}*{b.name or 'B'}",
    )
