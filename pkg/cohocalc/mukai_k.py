"""Numerical K-theory on the K3 surface and on curves.

Mukai vectors are restricted to c1 = m*H, with H^2 = ``H2``; every pairing the
nilpotent-cone computation needs depends on c1 only through c1.H.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial

from .errors import MixedPolarization


@dataclass(frozen=True)
class MukaiVector:
    r: int
    m: int
    s: int
    H2: int = 2

    def __post_init__(self) -> None:
        if self.H2 < 2 or self.H2 % 2:
            raise ValueError(f"H^2 must be an even integer >= 2, got {self.H2}")

    def __add__(self, other: "MukaiVector") -> "MukaiVector":
        _require_same_polarization(self, other)
        return MukaiVector(self.r + other.r, self.m + other.m, self.s + other.s, self.H2)

    def __neg__(self) -> "MukaiVector":
        return MukaiVector(-self.r, -self.m, -self.s, self.H2)

    def scale(self, t: int) -> "MukaiVector":
        return MukaiVector(t * self.r, t * self.m, t * self.s, self.H2)

    def __str__(self) -> str:
        return f"({self.r}, {self.m}H, {self.s})"


@dataclass(frozen=True)
class CurveKClass:
    """(rank, degree) in K(C)_num."""

    r: int
    d: int

    def __add__(self, other: "CurveKClass") -> "CurveKClass":
        return curve_add(self, other)

    def __neg__(self) -> "CurveKClass":
        return CurveKClass(-self.r, -self.d)

    def scale(self, t: int) -> "CurveKClass":
        return curve_scale(self, t)

    def __str__(self) -> str:
        return f"({self.r}, {self.d})"


def _require_same_polarization(a: MukaiVector, b: MukaiVector) -> None:
    if a.H2 != b.H2:
        raise MixedPolarization(f"Mukai vectors use different polarizations: H^2 = {a.H2} and H^2 = {b.H2}")


def mukai_pairing(a: MukaiVector, b: MukaiVector) -> int:
    _require_same_polarization(a, b)
    return a.m * b.m * a.H2 - a.r * b.s - b.r * a.s


def bb_pairing(a: MukaiVector, b: MukaiVector) -> int:
    """Beauville-Bogomolov form under the determinant identification: Mukai pairing plus 2rr'."""
    return mukai_pairing(a, b) + 2 * a.r * b.r


def mukai_dual(x: MukaiVector) -> MukaiVector:
    return MukaiVector(x.r, -x.m, x.s, x.H2)


def chi_k3(x: MukaiVector, y: MukaiVector) -> int:
    """chi(x.y) = -<x^dual, y>."""
    return -mukai_pairing(mukai_dual(x), y)


def in_v_perp(x: MukaiVector, v: MukaiVector) -> bool:
    return chi_k3(x, v) == 0


def moduli_dimension(v: MukaiVector) -> int:
    return mukai_pairing(v, v) + 2


def genus_of_multiple(H2: int, n: int) -> int:
    """Genus of a smooth curve in |nH|, by adjunction on a K3."""
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    return n * n * H2 // 2 + 1


def curve_add(a: CurveKClass, b: CurveKClass) -> CurveKClass:
    return CurveKClass(a.r + b.r, a.d + b.d)


def curve_scale(a: CurveKClass, t: int) -> CurveKClass:
    return CurveKClass(t * a.r, t * a.d)


def curve_mul(a: CurveKClass, b: CurveKClass) -> CurveKClass:
    return CurveKClass(a.r * b.r, a.r * b.d + b.r * a.d)


def curve_chi(a: CurveKClass, g: int) -> int:
    return a.d + a.r * (1 - g)


def omega_inverse(g: int) -> CurveKClass:
    return CurveKClass(1, -(2 * g - 2))


def restrict_to_curve(x: MukaiVector, n: int) -> CurveKClass:
    """Li^*: (r, mH, s) -> (r, c1.D) for D in |nH|."""
    if n < 1:
        raise ValueError(f"D must lie in |nH| with n >= 1, got n = {n}")
    return CurveKClass(x.r, n * x.m * x.H2)


def nilpotent_strata(g: int) -> list[tuple[int, int]]:
    """(deg L, deg D) for the extension strata of the nilpotent cone."""
    if g < 2:
        raise ValueError(f"nilpotent_strata needs g >= 2, got {g}")
    return [(k, 2 * g - 2 * k - 1) for k in range(1, g)]


def fujiki_constant(n: int) -> Fraction:
    """c with int(a^(2n)) = c (a,a)^n on a hyperkaehler 2n-fold of K3^[n] type."""
    return Fraction(factorial(2 * n), factorial(n) * 2**n)


def fujiki_top_power(a: MukaiVector, n: int) -> Fraction:
    q = bb_pairing(a, a)
    return fujiki_constant(n) * q**n


def top_power_vanishes(a: MukaiVector, n: int = 5) -> bool:
    return fujiki_top_power(a, n) == 0


def fujiki_mixed_degree(a: MukaiVector, b: MukaiVector, n: int) -> Fraction:
    """int(a^n b^n) for (a,a) = 0, by polarizing the Fujiki relation.

    The t^n coefficient of int((a + t b)^(2n)) is C(2n, n) int(a^n b^n) on the
    left and c (2(a,b))^n on the right, so the value is n! (a,b)^n.
    """
    if bb_pairing(a, a) != 0:
        raise ValueError(f"fujiki_mixed_degree needs an isotropic first class, (a,a) = {bb_pairing(a, a)}")
    return fujiki_constant(n) * (2 * bb_pairing(a, b)) ** n / comb(2 * n, n)
