"""Builders for the cohomology rings of the spaces in the nilpotent-cone computation.

Generator precedence matters: the monomial order is graded-lexicographic in the
order generators are listed, so bundle classes come first and, on Pic x C,
gamma comes before theta before rho. That keeps every relation a decreasing
rewrite rule.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import factorial
from types import MappingProxyType
from typing import Iterable, Mapping

from .errors import BadChernDegrees, CohocalcError, NameCollision, NegativeGenus, NotABundleRing
from .ring_core import (
    ONE,
    Element,
    Generator,
    Monomial,
    RewriteRule,
    RingPresentation,
    coeff_of,
    degree_component,
    inverse_unipotent,
    make_ring,
    normalize,
    rule,
    tensor_product,
    transfer,
    vanishing_rules,
)

logger = logging.getLogger(__name__)

SPACE_KINDS = ("point", "curve", "abelian", "jac_x_curve", "product", "proj_bundle", "moduli")


@dataclass(frozen=True)
class SpaceRing:
    presentation: RingPresentation
    named_classes: Mapping[str, Element]
    kind: str
    genus: int | None = None
    fiber: str | None = None
    rank: int | None = None
    base: "SpaceRing | None" = field(default=None, repr=False)
    chern: tuple[Element, ...] = field(default=(), repr=False)

    def __post_init__(self) -> None:
        if self.kind not in SPACE_KINDS:
            raise ValueError(f"Unknown space kind: {self.kind}")

    @property
    def ring(self) -> RingPresentation:
        return self.presentation

    def __getitem__(self, name: str) -> Element:
        try:
            return self.named_classes[name]
        except KeyError as exc:
            raise KeyError(f"{self.presentation.name} has no named class {name!r}") from exc


def _space(presentation: RingPresentation, kind: str, classes: Mapping[str, Element], **extra: object) -> SpaceRing:
    return SpaceRing(presentation=presentation, named_classes=MappingProxyType(dict(classes)), kind=kind, **extra)


def point_ring() -> SpaceRing:
    return _space(make_ring([], [], 0, {ONE: 1}, name="point"), "point", {})


@lru_cache(maxsize=None)
def abelian_ring(g: int, name: str = "theta") -> SpaceRing:
    """H*(Jacobian) restricted to the theta class: Q[theta]/(theta^(g+1)), with the integral of theta^g equal to g!."""
    if g < 0:
        raise NegativeGenus(f"abelian_ring needs g >= 0, got {g}")
    presentation = make_ring(
        [Generator(name, 2)],
        [rule({name: g + 1})],
        2 * g,
        {Monomial.of({name: g}): factorial(g)},
        name=f"abelian({g})",
    )
    return _space(presentation, "abelian", {name: presentation.gen(name)}, genus=g)


def fixed_det_ring(dim: int, theta_top: Fraction | int, name: str = "theta_sm") -> SpaceRing:
    """Theta subring of a moduli space of dimension ``dim``; only the top theta power is recorded."""
    if dim < 0:
        raise ValueError(f"fixed_det_ring needs dim >= 0, got {dim}")
    presentation = make_ring(
        [Generator(name, 2)],
        [rule({name: dim + 1})],
        2 * dim,
        {Monomial.of({name: dim}): Fraction(theta_top)},
        name=f"theta_ring({dim})",
    )
    return _space(presentation, "moduli", {name: presentation.gen(name)})


def sm_alpha_ring(theta_top: Fraction | int = 4) -> SpaceRing:
    """SM_C(2,1) in genus 2 through its ample generator alpha.

    c1(T) = 2 alpha and c2(T) = 3 alpha^2; the theta divisor is alpha.
    """
    presentation = make_ring(
        [Generator("alpha", 2)],
        [rule({"alpha": 4})],
        6,
        {Monomial.of(alpha=3): Fraction(theta_top)},
        name="sm_alpha",
    )
    alpha = presentation.gen("alpha")
    classes = {"alpha": alpha, "c1": 2 * alpha, "c2": 3 * alpha**2, "theta_sm": alpha}
    return _space(presentation, "moduli", classes)


@lru_cache(maxsize=None)
def curve_even_ring(g: int) -> SpaceRing:
    if g < 0:
        raise NegativeGenus(f"curve_even_ring needs g >= 0, got {g}")
    presentation = make_ring(
        [Generator("rho", 2, cdeg=2)],
        [rule({"rho": 2})],
        2,
        {Monomial.of(rho=1): 1},
        name=f"curve({g})",
    )
    return _space(presentation, "curve", {"rho": presentation.gen("rho")}, genus=g)


@lru_cache(maxsize=None)
def jac_x_curve_ring(g: int, k: int, with_mu: bool = False, theta: str = "theta") -> SpaceRing:
    """Pic^k(C) x C, through the Kunneth pieces of c1 of a Poincare line bundle.

    gamma is the (1,1) part (fiber degree 1), rho the point class of C, mu the
    (2,0) part. The mu model (mu^2 = mu*gamma = 0, together with the implied
    mu*theta*rho = 0 and mu*theta^g = 0) is faithful only for the degree <= 2
    parts of pushforwards along C; top monomials containing mu integrate to 0.
    """
    if g < 1:
        raise NegativeGenus(f"jac_x_curve_ring needs g >= 1, got {g}")
    generators = [Generator("gamma", 2, cdeg=1)]
    if with_mu:
        generators.append(Generator("mu", 2))
    generators += [Generator(theta, 2), Generator("rho", 2, cdeg=2)]
    rules = [
        rule({"rho": 2}),
        rule({"gamma": 1, "rho": 1}),
        rule({"gamma": 2}, {Monomial.of({theta: 1, "rho": 1}): -2}),
        rule({theta: g + 1}),
        rule({"gamma": 1, theta: g}),
    ]
    integrals: dict[Monomial, Fraction] = {Monomial.of({theta: g, "rho": 1}): Fraction(factorial(g))}
    if with_mu:
        rules += [
            rule({"mu": 2}),
            rule({"mu": 1, "gamma": 1}),
            rule({"mu": 1, theta: 1, "rho": 1}),
            rule({"mu": 1, theta: g}),
        ]
        if g == 1:
            integrals[Monomial.of(mu=1, rho=1)] = Fraction(0)
    presentation = make_ring(
        generators,
        rules,
        2 * g + 2,
        integrals,
        name=f"jac_x_curve({g},{k}{',mu' if with_mu else ''})",
    )
    gamma = presentation.gen("gamma")
    rho = presentation.gen("rho")
    classes = {"gamma": gamma, "theta": presentation.gen(theta), "rho": rho, "pi": gamma + k * rho}
    if with_mu:
        classes["mu"] = presentation.gen("mu")
    return _space(presentation, "jac_x_curve", classes, genus=g)


def product_ring(a: SpaceRing, b: SpaceRing, name: str = "") -> SpaceRing:
    clash = sorted(set(a.named_classes) & set(b.named_classes))
    if clash:
        raise NameCollision(f"Named classes appear in both factors: {', '.join(clash)}")
    presentation = tensor_product(a.presentation, b.presentation, name=name)
    classes = {key: transfer(value, presentation) for key, value in a.named_classes.items()}
    classes.update({key: transfer(value, presentation) for key, value in b.named_classes.items()})
    return _space(presentation, "product", classes)


def proj_bundle_ring(base: SpaceRing, chern: Iterable[Element], rank: int, fiber_name: str = "zeta") -> SpaceRing:
    """P(E) over ``base`` for a rank ``rank`` bundle with Chern classes c1, c2, ...

    zeta^rank + c1 zeta^(rank-1) + ... = 0, and the integral of b*zeta^(rank-1)
    equals the integral of b over the base.
    """
    chern = tuple(chern)
    if rank < 1:
        raise BadChernDegrees(f"Bundle rank must be positive, got {rank}")
    if len(chern) > rank:
        raise BadChernDegrees(f"{len(chern)} Chern classes given for a rank {rank} bundle")
    for index, cls in enumerate(chern, start=1):
        if cls.ring != base.presentation:
            raise BadChernDegrees(f"c{index} does not live in the base ring {base.presentation.name}")
        if not cls.is_homogeneous(2 * index):
            raise BadChernDegrees(f"c{index} must be homogeneous of degree {2 * index}, got {cls}")
    relation: dict[Monomial, Fraction] = {}
    for index, cls in enumerate(chern, start=1):
        shift = Monomial.of({fiber_name: rank - index})
        for monomial, coefficient in cls.terms:
            relation[monomial * shift] = relation.get(monomial * shift, Fraction(0)) - coefficient
    base_ring = base.presentation
    rules: tuple[RewriteRule, ...] = (
        base_ring.rules + tuple(vanishing_rules(base_ring)) + (rule({fiber_name: rank}, relation),)
    )
    fiber_top = Monomial.of({fiber_name: rank - 1})
    integrals = {monomial * fiber_top: value for monomial, value in base_ring.integrals}
    presentation = make_ring(
        (Generator(fiber_name, 2),) + base_ring.generators,
        rules,
        base_ring.top_degree + 2 * (rank - 1),
        integrals,
        name=f"P({base_ring.name}, rank {rank})",
    )
    classes = {key: transfer(value, presentation) for key, value in base.named_classes.items()}
    classes[fiber_name] = presentation.gen(fiber_name)
    logger.debug("projective bundle %s built with relation %s", presentation.name, classes[fiber_name] ** rank)
    return _space(
        presentation,
        "proj_bundle",
        classes,
        genus=base.genus,
        fiber=fiber_name,
        rank=rank,
        base=base,
        chern=chern,
    )


def bundle_pushforward(total: SpaceRing, x: Element) -> Element:
    """tau_*: the coefficient of zeta^(rank-1), as a class on the base."""
    if total.kind != "proj_bundle" or total.base is None or total.fiber is None or total.rank is None:
        raise NotABundleRing(f"{total.presentation.name} is not a projective bundle ring")
    coefficient = coeff_of(normalize(x), total.fiber, total.rank - 1)
    return transfer(coefficient, total.base.presentation)


def segre_classes(total: SpaceRing) -> list[Element]:
    """s_k = tau_*(zeta^(rank-1+k)) for k = 0 .. dim(base)."""
    if total.base is None or total.fiber is None or total.rank is None:
        raise NotABundleRing(f"{total.presentation.name} is not a projective bundle ring")
    zeta = total.named_classes[total.fiber]
    steps = total.base.presentation.top_degree // 2
    return [bundle_pushforward(total, zeta ** (total.rank - 1 + k)) for k in range(steps + 1)]


def segre_chern_defects(total: SpaceRing) -> list[Element]:
    """sum_{i+j=k} s_i c_j for k >= 1; every entry is zero for a consistent bundle ring."""
    segre = segre_classes(total)
    base_ring = segre[0].ring
    chern = [base_ring.one()] + list(total.chern)
    defects = []
    for k in range(1, len(segre)):
        total_k = base_ring.zero()
        for j in range(0, min(k, len(chern) - 1) + 1):
            total_k = total_k + segre[k - j] * chern[j]
        defects.append(total_k)
    return defects


@dataclass(frozen=True)
class ExtensionBundle:
    g: int
    c1_W: Element
    higher: tuple[Element, ...]
    rank_V: int
    rank_W: int


def curve_chern_of_extension_bundle(g: int) -> ExtensionBundle:
    """Chern classes of W = V + O on the curve factor.

    V' is the cokernel of omega^-2 -> O x H^1(omega^-1), so c(V') = 1/c(omega^-2)
    and h^1(omega^-1) = h^0(omega^2) = 3g - 3.
    """
    if g < 2:
        raise CohocalcError(f"The extension bundle needs g >= 2, got {g}")
    curve = curve_even_ring(g)
    rho = curve["rho"]
    c_omega_minus_two = curve.presentation.one() - 2 * (2 * g - 2) * rho
    c_trivial = curve.presentation.one()
    c_v = c_trivial * inverse_unipotent(c_omega_minus_two)
    c_w = c_v * c_trivial
    h1 = 3 * g - 3
    rank_v = h1 - 1
    higher = tuple(degree_component(c_w, 2 * i) for i in range(2, rank_v + 2))
    return ExtensionBundle(g=g, c1_W=degree_component(c_w, 2), higher=higher, rank_V=rank_v, rank_W=rank_v + 1)


@lru_cache(maxsize=None)
def wbar_ring(g: int = 2) -> SpaceRing:
    """The projective bundle P(W) over Pic^1(C) x C; in genus 2 this is zeta^3 + 4 rho zeta^2 = 0."""
    base = jac_x_curve_ring(g, 1)
    bundle = curve_chern_of_extension_bundle(g)
    c1 = transfer(bundle.c1_W, base.presentation)
    higher = [transfer(cls, base.presentation) for cls in bundle.higher[: bundle.rank_W - 1]]
    return proj_bundle_ring(base, [c1] + higher, bundle.rank_W, "zeta")


def builtin_spaces() -> dict[str, SpaceRing]:
    """Every ring the reproduction scenarios compute in, for presentation checks."""
    return {
        "point": point_ring(),
        "curve(2)": curve_even_ring(2),
        "abelian(2)": abelian_ring(2),
        "abelian(5)": abelian_ring(5),
        "jac_x_curve(2,1)": jac_x_curve_ring(2, 1),
        "jac_x_curve(2,1,mu)": jac_x_curve_ring(2, 1, with_mu=True),
        "jac_x_curve(2,3,mu)": jac_x_curve_ring(2, 3, with_mu=True),
        "wbar": wbar_ring(),
        "sm_alpha": sm_alpha_ring(),
        "sm_alpha x abelian(2)": product_ring(sm_alpha_ring(), abelian_ring(2, name="theta0"), name="sm_alpha*pic0"),
    }
