"""Bernoulli numbers, top theta powers of rank-2 moduli spaces and the resulting component degrees."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial

from .ring_core import integrate
from .spaces import abelian_ring, fixed_det_ring, product_ring


@dataclass(frozen=True)
class ThetaNumbers:
    g: int
    dim_M: int
    theta_top_SM: Fraction
    theta_top_M: Fraction


@lru_cache(maxsize=None)
def bernoulli(n: int) -> Fraction:
    """B_n from sum_{k=0}^{n} C(n+1, k) B_k = 0, so B_1 = -1/2."""
    if n < 0:
        raise ValueError("n must be >= 0")
    if n == 0:
        return Fraction(1)
    total = sum((comb(n + 1, k) * bernoulli(k) for k in range(n)), Fraction(0))
    return -total / (n + 1)


def _leading_term(g: int, dim: int) -> Fraction:
    power = 2 ** (2 * g - 2)
    return (
        factorial(dim)
        * (power - 2)
        * (-1) ** g
        * power
        * bernoulli(2 * g - 2)
        / factorial(2 * g - 2)
    )


def theta_top_rank2(g: int) -> Fraction:
    """Integral of Theta^(4g-3) over the moduli of stable rank-2 bundles of odd degree."""
    if g < 2:
        raise ValueError(f"theta_top_rank2 needs g >= 2, got {g}")
    return _leading_term(g, 4 * g - 3)


def theta_top_fixed_det(g: int) -> Fraction:
    """Same leading Verlinde term with fixed determinant, dimension 3g - 3."""
    if g < 2:
        raise ValueError(f"theta_top_fixed_det needs g >= 2, got {g}")
    return _leading_term(g, 3 * g - 3)


def theta_numbers(g: int) -> ThetaNumbers:
    return ThetaNumbers(
        g=g,
        dim_M=4 * g - 3,
        theta_top_SM=theta_top_fixed_det(g),
        theta_top_M=theta_top_rank2(g),
    )


def moduli_dim(g: int, n: int) -> int:
    return n * n * (g - 1) + 1


def deg_n0_via_cover(g: int, n: int, theta_top_SM: Fraction | int) -> Fraction:
    """Top theta power of M_C(n, d) through the etale cover SM x Pic^0 -> M of degree n^(2g).

    The theta class pulls back to theta_SM + n^2 theta_0.
    """
    if g < 1 or n < 1:
        raise ValueError(f"deg_n0_via_cover needs g >= 1 and n >= 1, got g={g}, n={n}")
    dim = moduli_dim(g, n)
    cover = product_ring(fixed_det_ring(dim - g, theta_top_SM), abelian_ring(g, name="theta0"), name="cover")
    pulled_back = cover["theta_sm"] + n * n * cover["theta0"]
    return integrate(pulled_back**dim) / n ** (2 * g)


def general_degrees(g: int, n: int, theta_top: Fraction | int) -> tuple[Fraction, Fraction]:
    """(deg F, deg N0) for the determinant class u1, evaluated on the fiber dimension n^2(g-1)+1."""
    if g < 2 or n < 1:
        raise ValueError(f"general_degrees needs g >= 2 and n >= 1, got g={g}, n={n}")
    dim = moduli_dim(g, n)
    deg_fiber = Fraction((n * (2 * g - 2)) ** dim * factorial(dim))
    deg_n0 = (2 * g - 2) ** dim * Fraction(theta_top)
    return deg_fiber, deg_n0
