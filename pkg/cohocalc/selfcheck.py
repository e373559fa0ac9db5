"""Property suites over every built-in ring: presentation checks, ring axioms, tensor factorization and Segre identities."""

from __future__ import annotations

import logging
import random
from fractions import Fraction

from .errors import NotConfluent
from .report import Report
from .ring_core import (
    Element,
    Generator,
    Monomial,
    RingPresentation,
    exp_truncated,
    integrate,
    make_ring,
    normalize,
    rule,
    transfer,
    verify_presentation,
)
from .scenarios import repro_lambda_check
from .spaces import (
    SpaceRing,
    abelian_ring,
    builtin_spaces,
    curve_even_ring,
    product_ring,
    proj_bundle_ring,
    segre_chern_defects,
    sm_alpha_ring,
    wbar_ring,
)

logger = logging.getLogger(__name__)

AXIOMS = ("commutativity", "associativity", "distributivity", "normal form idempotence", "homogeneity", "integral linearity")

# one exp(x)exp(-x) sample per this many triples
EXP_SAMPLE_EVERY = 20


def random_element(ring: RingPresentation, rng: random.Random, degree: int | None = None, positive: bool = False) -> Element:
    """Up to three normal monomials with coefficients in -9..9."""
    monomials = ring.normal_monomials(degree)
    if positive:
        monomials = [monomial for monomial in monomials if not monomial.is_one()]
    if not monomials:
        return ring.zero()
    terms: dict[Monomial, Fraction] = {}
    for _ in range(rng.randint(1, 3)):
        terms[rng.choice(monomials)] = Fraction(rng.randint(-9, 9))
    return ring.element(terms)


def axiom_failures(ring: RingPresentation, trials: int, rng: random.Random) -> dict[str, int]:
    failures = dict.fromkeys(AXIOMS, 0)
    degrees = list(range(0, ring.top_degree + 1, 2))
    for _ in range(trials):
        a, b, c = (random_element(ring, rng) for _ in range(3))
        ab = a * b
        if ab != b * a:
            failures["commutativity"] += 1
        if ab * c != a * (b * c):
            failures["associativity"] += 1
        if a * (b + c) != ab + a * c:
            failures["distributivity"] += 1
        if normalize(normalize(a)) != normalize(a):
            failures["normal form idempotence"] += 1
        da, db = rng.choice(degrees), rng.choice(degrees)
        ha, hb = random_element(ring, rng, da), random_element(ring, rng, db)
        if not (ha * hb).is_homogeneous(da + db):
            failures["homogeneity"] += 1
        p, q = Fraction(rng.randint(-9, 9)), Fraction(rng.randint(-9, 9))
        if integrate(p * a + q * b) != p * integrate(a) + q * integrate(b):
            failures["integral linearity"] += 1
    return failures


def exp_failures(ring: RingPresentation, samples: int, rng: random.Random) -> int:
    failures = 0
    for _ in range(samples):
        x = random_element(ring, rng, positive=True)
        if exp_truncated(x) * exp_truncated(-x) != ring.one():
            failures += 1
    return failures


def tensor_failures(pairs: list[tuple[str, SpaceRing, SpaceRing]], trials: int, rng: random.Random) -> dict[str, int]:
    failures: dict[str, int] = {}
    for label, left, right in pairs:
        product = product_ring(left, right)
        count = 0
        for _ in range(trials):
            a = random_element(left.presentation, rng)
            b = random_element(right.presentation, rng)
            joined = transfer(a, product.presentation) * transfer(b, product.presentation)
            if integrate(joined) != integrate(a) * integrate(b):
                count += 1
        failures[label] = count
    return failures


def random_bundle_failures(count: int, rng: random.Random) -> int:
    """Segre-Chern identity on random split bundles over a principally polarized abelian surface."""
    base = abelian_ring(2)
    theta = base["theta"]
    failures = 0
    for _ in range(count):
        rank = rng.randint(2, 3)
        chern = [rng.randint(-5, 5) * theta, rng.randint(-5, 5) * theta**2][: rank]
        total = proj_bundle_ring(base, chern, rank, "zeta")
        if any(not defect.is_zero() for defect in segre_chern_defects(total)):
            failures += 1
    return failures


def injected_bad_ring() -> RingPresentation:
    """x^2 -> 0 and x*y -> y^2 disagree on x^2*y."""
    return make_ring(
        [Generator("x", 2), Generator("y", 2)],
        [rule({"x": 2}), rule({"x": 1, "y": 1}, {Monomial.of(y=2): 1})],
        6,
        {Monomial.of(y=3): 1},
        name="injected",
        check=False,
    )


def run_selfcheck(trials: int = 1000, seed: int = 20260710) -> Report:
    report = Report("selfcheck")
    rng = random.Random(seed)
    spaces = builtin_spaces()
    for space in spaces.values():
        report.extend(verify_presentation(space.presentation))

    samples = max(1, trials // EXP_SAMPLE_EVERY)
    for label, space in spaces.items():
        failures = axiom_failures(space.presentation, trials, rng)
        logger.debug("ring axioms on %s: %d trials, %d exp samples", label, trials, samples)
        for axiom, count in failures.items():
            report.check(f"{label} {axiom} over {trials} trials", count, 0, "ring axioms")
        report.check(f"{label} exp(x)exp(-x) = 1 over {samples} trials", exp_failures(space.presentation, samples, rng), 0, "ring axioms")

    pairs = [
        ("abelian(2) x curve(2)", abelian_ring(2), curve_even_ring(2)),
        ("sm_alpha x abelian(2)", sm_alpha_ring(), abelian_ring(2, name="theta0")),
    ]
    for label, count in tensor_failures(pairs, trials, rng).items():
        report.check(f"{label} integral factorization", count, 0, "tensor product of rings")

    grid = repro_lambda_check()
    report.extend(grid)

    defects = segre_chern_defects(wbar_ring())
    report.check("Segre-Chern identity on the W bundle", all(defect.is_zero() for defect in defects), True, "Segre classes")
    bundles = max(1, min(20, trials // 50))
    report.check(f"Segre-Chern identity on {bundles} random bundles", random_bundle_failures(bundles, rng), 0, "Segre classes")

    bad = injected_bad_ring()
    broken = verify_presentation(bad)
    confluence = [step for step in broken.steps if step.label.endswith("confluence")]
    report.check("injected bad rule is reported", [step.verdict for step in confluence], ["fail"], "presentation check")
    try:
        make_ring(bad.generators, bad.rules, bad.top_degree, bad.integrals)
        witness = "none"
    except NotConfluent as exc:
        witness = str(exc.witness)
    report.check("NotConfluent witness for the injected rule", witness, "x^2*y", "presentation check")
    return report
