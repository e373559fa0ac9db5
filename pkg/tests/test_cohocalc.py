from __future__ import annotations

import contextlib
import io
import json
import os
import random
import tempfile
import time
import unittest
from fractions import Fraction
from pathlib import Path
from unittest import mock

from cohocalc.artifacts import format_rational, sha256_json

try:
    import sympy  # noqa: F401

    HAS_SYMPY = True
except ImportError:
    HAS_SYMPY = False

ROOT = Path(__file__).resolve().parents[1]
SAMPLES = ROOT / "sample_programs"


def load_golden() -> dict:
    return json.loads((Path(__file__).parent / "golden" / "reference_values.json").read_text(encoding="utf-8"))


class ArtifactTests(unittest.TestCase):
    def test_sha256_json_is_stable(self) -> None:
        left = {"verdict": "pass", "steps": [{"label": "deg F", "computed": "122880"}]}
        right = {"steps": [{"computed": "122880", "label": "deg F"}], "verdict": "pass"}
        self.assertEqual(sha256_json(left), sha256_json(right))

    def test_rationals_print_in_lowest_terms(self) -> None:
        self.assertEqual(format_rational(Fraction(10, 480)), "1/48")
        self.assertEqual(format_rational(Fraction(-6, 3)), "-2")
        self.assertEqual(format_rational(0), "0")


class RingCoreTests(unittest.TestCase):
    def _truncated_line(self):
        from cohocalc.ring_core import Generator, Monomial, make_ring, rule

        return make_ring([Generator("x", 2)], [rule({"x": 3})], 4, {Monomial.of(x=2): 1}, name="line")

    def test_normal_forms_and_canonical_strings(self) -> None:
        from cohocalc.spaces import jac_x_curve_ring, wbar_ring

        pic = jac_x_curve_ring(2, 1)
        self.assertEqual(str(pic["gamma"] ** 2), "-2*theta*rho")
        self.assertTrue((pic["gamma"] * pic["rho"]).is_zero())
        wbar = wbar_ring()
        self.assertEqual(str(wbar["zeta"] ** 3), "-4*zeta^2*rho")
        self.assertEqual(str(wbar["pi"]), "gamma + rho")

    def test_exp_and_unipotent_inverse(self) -> None:
        from cohocalc.ring_core import exp_truncated, inverse_unipotent

        ring = self._truncated_line()
        x = ring.gen("x")
        self.assertEqual(str(exp_truncated(x)), "1/2*x^2 + x + 1")
        self.assertEqual(str(inverse_unipotent(1 + x)), "x^2 - x + 1")
        self.assertEqual(exp_truncated(x) * exp_truncated(-x), 1)
        self.assertEqual((1 + x) * inverse_unipotent(1 + x), ring.one())

    def test_integration_and_truncation(self) -> None:
        from cohocalc.ring_core import integrate
        from cohocalc.spaces import abelian_ring

        ring = self._truncated_line()
        x = ring.gen("x")
        self.assertTrue((x**3).is_zero())
        self.assertEqual(integrate(3 * x**2 + x + 7), 3)
        pic3 = abelian_ring(5)
        self.assertEqual(str((4 * pic3["theta"]) ** 5), "1024*theta^5")
        self.assertEqual(integrate((4 * pic3["theta"]) ** 5), 122880)

    def test_presentation_errors(self) -> None:
        from cohocalc.errors import (
            DuplicateGenerator,
            IntegralsCoverage,
            InvalidGenerator,
            NonDecreasingRule,
            NonHomogeneousRule,
            NotConfluent,
        )
        from cohocalc.ring_core import Generator, Monomial, make_ring, rule

        x, y = Generator("x", 2), Generator("y", 2)
        with self.assertRaises(InvalidGenerator):
            Generator("x", 3)
        with self.assertRaises(InvalidGenerator):
            Generator("2x", 2)
        with self.assertRaises(DuplicateGenerator):
            make_ring([x, x], [], 2, {Monomial.of(x=1): 1})
        with self.assertRaises(NonDecreasingRule):
            make_ring([x, y], [rule({"y": 2}, {Monomial.of(x=2): 1})], 4, {})
        with self.assertRaises(NonHomogeneousRule):
            make_ring([x, Generator("z", 4)], [rule({"x": 2}, {Monomial.of(x=1): 1})], 4, {})
        with self.assertRaises(IntegralsCoverage):
            make_ring([x], [rule({"x": 3})], 4, {Monomial.of(x=1): 1})
        with self.assertRaises(NotConfluent) as caught:
            make_ring([x, y], [rule({"x": 2}), rule({"x": 1, "y": 1}, {Monomial.of(y=2): 1})], 6, {Monomial.of(y=3): 1})
        self.assertEqual(caught.exception.witness, "x^2*y")
        self.assertEqual(len(caught.exception.normal_forms), 2)

    def test_verify_presentation_reports_instead_of_raising(self) -> None:
        from cohocalc.ring_core import verify_presentation
        from cohocalc.selfcheck import injected_bad_ring
        from cohocalc.spaces import builtin_spaces

        for space in builtin_spaces().values():
            self.assertTrue(verify_presentation(space.presentation).passed, space.presentation.name)
        report = verify_presentation(injected_bad_ring())
        self.assertFalse(report.passed)
        failed = [step for step in report.steps if step.verdict == "fail"]
        self.assertEqual(len(failed), 1)
        self.assertIn("x^2*y", failed[0].computed)

    def test_mixed_rings_and_transfer(self) -> None:
        from cohocalc.errors import MixedRings, UnknownGenerator
        from cohocalc.ring_core import transfer
        from cohocalc.spaces import abelian_ring, curve_even_ring, jac_x_curve_ring

        theta = abelian_ring(2)["theta"]
        rho = curve_even_ring(2)["rho"]
        with self.assertRaises(MixedRings):
            theta + rho
        with self.assertRaises(UnknownGenerator):
            transfer(rho, abelian_ring(2).presentation)
        pic = jac_x_curve_ring(2, 1)
        self.assertEqual(transfer(rho, pic.presentation), pic["rho"])

    def test_pow_and_exp_preconditions(self) -> None:
        from cohocalc.errors import NonPositiveDegreeTerm
        from cohocalc.ring_core import exp_truncated, power

        x = self._truncated_line().gen("x")
        with self.assertRaises(ValueError):
            power(x, -1)
        with self.assertRaises(NonPositiveDegreeTerm):
            exp_truncated(1 + x)
        self.assertEqual(power(x, 0), 1)

    def test_tensor_product_integrals_factor(self) -> None:
        from cohocalc.errors import NameCollision
        from cohocalc.ring_core import integrate
        from cohocalc.spaces import abelian_ring, curve_even_ring, product_ring

        product = product_ring(abelian_ring(2), curve_even_ring(2))
        self.assertEqual(integrate(product["theta"] ** 2 * product["rho"]), 2)
        self.assertTrue((product["theta"] ** 3).is_zero())
        with self.assertRaises(NameCollision):
            product_ring(abelian_ring(2), abelian_ring(3))

    def test_degree_components_and_substitution(self) -> None:
        from cohocalc.ring_core import coeff_of, degree_component, substitute_zero
        from cohocalc.spaces import jac_x_curve_ring, wbar_ring

        pic = jac_x_curve_ring(2, 1, with_mu=True)
        mixed = 1 + pic["mu"] + pic["theta"] * pic["rho"]
        self.assertEqual(str(degree_component(mixed, 2)), "mu")
        self.assertEqual(str(substitute_zero(mixed, "mu")), "theta*rho + 1")
        wbar = wbar_ring()
        self.assertEqual(str(coeff_of(wbar["zeta"] ** 3, "zeta", 2)), "-4*rho")

    def test_cofactor_of_a_monomial(self) -> None:
        from cohocalc.errors import UnknownGenerator
        from cohocalc.grr_lambda import assemble_n1
        from cohocalc.ring_core import Monomial, coeff_of_monomial
        from cohocalc.spaces import wbar_ring

        wbar = wbar_ring()
        quintic = assemble_n1(1).value ** 5
        self.assertEqual(str(coeff_of_monomial(quintic, Monomial.of(zeta=2))), "-800*theta^2*rho")
        self.assertEqual(str(coeff_of_monomial(quintic, Monomial.of(zeta=2, theta=2, rho=1))), "-800")
        mixed = wbar["zeta"] * wbar["rho"] + wbar["zeta"] ** 2 * wbar["rho"]
        self.assertEqual(str(coeff_of_monomial(mixed, Monomial.of(zeta=1))), "rho")
        with self.assertRaises(UnknownGenerator):
            coeff_of_monomial(mixed, Monomial.of(alpha=1))

    def test_normal_monomials_by_degree(self) -> None:
        from cohocalc.ring_core import Monomial

        ring = self._truncated_line()
        self.assertEqual(ring.normal_monomials(), [Monomial(), Monomial.of(x=1), Monomial.of(x=2)])
        self.assertEqual(ring.normal_monomials(4), [Monomial.of(x=2)])
        self.assertEqual(ring.normal_monomials(6), [])
        self.assertEqual(ring.format_monomial(Monomial.of(x=2)), "x^2")
        self.assertEqual(ring.degree_of(Monomial.of(x=5)), 10)


class SpacesTests(unittest.TestCase):
    def test_extension_bundle_and_segre_identity(self) -> None:
        from cohocalc.spaces import curve_chern_of_extension_bundle, curve_even_ring, segre_chern_defects, wbar_ring

        bundle = curve_chern_of_extension_bundle(2)
        self.assertEqual(bundle.c1_W, 4 * curve_even_ring(2)["rho"])
        self.assertEqual((bundle.rank_V, bundle.rank_W), (2, 3))
        self.assertTrue(all(cls.is_zero() for cls in bundle.higher))
        self.assertTrue(all(defect.is_zero() for defect in segre_chern_defects(wbar_ring())))

    def test_bundle_pushforward(self) -> None:
        from cohocalc.errors import NotABundleRing
        from cohocalc.spaces import abelian_ring, bundle_pushforward, segre_classes, wbar_ring

        wbar = wbar_ring()
        base = wbar.base
        self.assertEqual(bundle_pushforward(wbar, wbar["zeta"] ** 2), base.presentation.one())
        self.assertEqual(bundle_pushforward(wbar, wbar["zeta"] ** 3), -4 * base["rho"])
        self.assertEqual(str(segre_classes(wbar)[1]), "-4*rho")
        with self.assertRaises(NotABundleRing):
            bundle_pushforward(abelian_ring(2), abelian_ring(2)["theta"])

    def test_builder_errors(self) -> None:
        from cohocalc.errors import BadChernDegrees, NegativeGenus
        from cohocalc.spaces import abelian_ring, jac_x_curve_ring, proj_bundle_ring

        with self.assertRaises(NegativeGenus):
            abelian_ring(-1)
        with self.assertRaises(NegativeGenus):
            jac_x_curve_ring(0, 1)
        base = abelian_ring(2)
        with self.assertRaises(BadChernDegrees):
            proj_bundle_ring(base, [base["theta"] ** 2], 2)
        with self.assertRaises(BadChernDegrees):
            proj_bundle_ring(base, [base["theta"]] * 3, 2)

    def test_sm_alpha_named_classes(self) -> None:
        from cohocalc.ring_core import integrate
        from cohocalc.spaces import sm_alpha_ring

        space = sm_alpha_ring()
        self.assertEqual(integrate(space["alpha"] ** 3), 4)
        self.assertEqual(str(2 * space["c2"] - space["c1"] ** 2), "2*alpha^2")

    def test_abelian_rings_across_genera(self) -> None:
        from math import factorial

        from cohocalc.ring_core import integrate
        from cohocalc.spaces import abelian_ring

        for g in range(7):
            theta = abelian_ring(g)["theta"]
            self.assertEqual(integrate(theta**g), factorial(g), g)
            self.assertTrue((theta ** (g + 1)).is_zero(), g)

    def test_poincare_classes_on_jac_x_curve(self) -> None:
        from cohocalc.ring_core import normalize
        from cohocalc.spaces import jac_x_curve_ring

        for k in (1, 3):
            pic = jac_x_curve_ring(2, k, with_mu=True)
            self.assertTrue((pic["pi"] * pic["rho"]).is_zero(), k)
            self.assertEqual(pic["pi"] ** 2, -2 * pic["theta"] * pic["rho"], k)
            for name, cls in pic.named_classes.items():
                self.assertEqual(normalize(cls), cls, name)

    def test_rank_one_bundle_is_the_base(self) -> None:
        from cohocalc.ring_core import integrate
        from cohocalc.spaces import abelian_ring, bundle_pushforward, proj_bundle_ring, segre_chern_defects

        base = abelian_ring(2)
        total = proj_bundle_ring(base, [3 * base["theta"]], 1)
        self.assertEqual(total.presentation.top_degree, base.presentation.top_degree)
        self.assertEqual(str(total["zeta"]), "-3*theta")
        self.assertEqual(integrate(total["zeta"] * total["theta"]), -6)
        self.assertEqual(bundle_pushforward(total, total.presentation.one()), base.presentation.one())
        self.assertTrue(all(defect.is_zero() for defect in segre_chern_defects(total)))


class GrrLambdaTests(unittest.TestCase):
    def test_closed_formula_and_grr_agree(self) -> None:
        from cohocalc.grr_lambda import grr_euler_characteristic, lambda_closed, lambda_grr
        from cohocalc.mukai_k import CurveKClass

        x = CurveKClass(2, -3)
        self.assertEqual(str(lambda_closed(2, 1, x).value), "-3*mu - 2*theta")
        self.assertEqual(lambda_grr(2, 1, x).value, lambda_closed(2, 1, x).value)
        self.assertEqual(grr_euler_characteristic(2, 1, x), -3)
        self.assertEqual(grr_euler_characteristic(3, 2, CurveKClass(1, 5)), 5)

    def test_todd_class_and_poincare_character(self) -> None:
        from cohocalc.grr_lambda import ch_poincare, pushforward_curve, todd_curve

        self.assertEqual(str(todd_curve(3)), "-2*rho + 1")
        self.assertEqual(str(ch_poincare(2, 1)), "mu*rho - theta*rho + gamma + mu + rho + 1")
        self.assertEqual(str(pushforward_curve(ch_poincare(2, 1))), "mu - theta + 1")

    def test_box_delta_twist(self) -> None:
        from cohocalc.grr_lambda import lambda_box_delta
        from cohocalc.mukai_k import CurveKClass
        from cohocalc.spaces import jac_x_curve_ring

        pic = jac_x_curve_ring(2, 1)
        untwisted = lambda_box_delta(2, pic["theta"], 1, pic["pi"], CurveKClass(0, 5))
        self.assertEqual(untwisted.value, pic["theta"] + 5 * pic["rho"])
        self.assertEqual(untwisted.source, "box_delta")
        pic3 = jac_x_curve_ring(3, 1)
        twisted = lambda_box_delta(3, -pic3["theta"], 1, pic3["pi"], CurveKClass(1, 0))
        self.assertEqual(twisted.value, -pic3["theta"] + pic3["pi"] - 4 * pic3["rho"])

    def test_grid_size(self) -> None:
        from cohocalc.grr_lambda import lambda_grid

        self.assertEqual(len(list(lambda_grid())), load_golden()["lambda_grid_cases"])

    def test_theta_multiple(self) -> None:
        from cohocalc.errors import NotOrthogonal
        from cohocalc.grr_lambda import theta_multiple
        from cohocalc.mukai_k import CurveKClass

        self.assertEqual(theta_multiple(CurveKClass(-4, -4), CurveKClass(1, 3), 5), 4)
        self.assertEqual(theta_multiple(CurveKClass(-4, -2), CurveKClass(2, 1), 2), 2)
        with self.assertRaises(NotOrthogonal):
            theta_multiple(CurveKClass(1, 0), CurveKClass(1, 3), 5)

    def test_assembled_class_on_wbar(self) -> None:
        from cohocalc.grr_lambda import assemble_n1
        from cohocalc.ring_core import integrate

        golden = load_golden()
        assembled = assemble_n1(1).value
        self.assertEqual(str(assembled), golden["wbar"]["assembled_class"])
        self.assertEqual(str(assembled**5), golden["wbar"]["fifth_power"])
        self.assertEqual(integrate(assembled**5), golden["degrees"]["n1_pairing_constant"])
        self.assertEqual(integrate(assemble_n1(-2).value ** 5), golden["degrees"]["n1"])

    def test_lambda_result_requires_degree_two(self) -> None:
        from cohocalc.errors import ModelMismatch
        from cohocalc.grr_lambda import LambdaResult
        from cohocalc.spaces import jac_x_curve_ring

        with self.assertRaises(ModelMismatch):
            LambdaResult(value=jac_x_curve_ring(2, 1).presentation.one(), source="closed", g=2, k=1, x=None)


class MukaiTests(unittest.TestCase):
    def test_pairings(self) -> None:
        from cohocalc.mukai_k import MukaiVector, bb_pairing, chi_k3, moduli_dimension, mukai_pairing
        from cohocalc.scenarios import U0, U1, V

        self.assertEqual(mukai_pairing(U0, U1), 4)
        self.assertEqual(bb_pairing(U0, U1), 4)
        self.assertEqual(bb_pairing(U0, U0), 0)
        self.assertEqual(chi_k3(U1, V), 0)
        self.assertEqual(moduli_dimension(V), 10)
        self.assertEqual(mukai_pairing(MukaiVector(1, 1, 1), MukaiVector(1, 1, 1)), 0)

    def test_polarization_checks(self) -> None:
        from cohocalc.errors import MixedPolarization
        from cohocalc.mukai_k import MukaiVector, mukai_pairing

        with self.assertRaises(ValueError):
            MukaiVector(1, 0, 0, H2=3)
        with self.assertRaises(MixedPolarization):
            mukai_pairing(MukaiVector(0, 0, 1, 2), MukaiVector(0, 0, 1, 4))

    def test_curve_restriction_and_fujiki(self) -> None:
        from cohocalc.mukai_k import (
            CurveKClass,
            fujiki_constant,
            fujiki_mixed_degree,
            genus_of_multiple,
            nilpotent_strata,
            restrict_to_curve,
            top_power_vanishes,
        )
        from cohocalc.scenarios import U0, U1

        self.assertEqual(restrict_to_curve(U1, 2), CurveKClass(-4, -4))
        self.assertEqual(restrict_to_curve(U1, 1), CurveKClass(-4, -2))
        self.assertEqual(genus_of_multiple(2, 2), 5)
        self.assertEqual(fujiki_constant(5), 945)
        self.assertEqual(fujiki_mixed_degree(U0, U1, 5), 122880)
        self.assertTrue(top_power_vanishes(U0))
        self.assertEqual(nilpotent_strata(2), [(1, 1)])
        self.assertEqual(nilpotent_strata(3), [(1, 3), (2, 1)])
        with self.assertRaises(ValueError):
            fujiki_mixed_degree(U1, U0, 5)

    def test_pairings_are_symmetric_and_bilinear(self) -> None:
        from cohocalc.mukai_k import MukaiVector, bb_pairing, mukai_pairing

        rng = random.Random(11)

        def vector() -> MukaiVector:
            return MukaiVector(rng.randint(-6, 6), rng.randint(-6, 6), rng.randint(-6, 6))

        for _ in range(200):
            x, y, z = vector(), vector(), vector()
            s, t = rng.randint(-5, 5), rng.randint(-5, 5)
            for pairing in (mukai_pairing, bb_pairing):
                self.assertEqual(pairing(x, y), pairing(y, x))
                self.assertEqual(pairing(x.scale(s) + z.scale(t), y), s * pairing(x, y) + t * pairing(z, y))

    def test_curve_chi_is_additive(self) -> None:
        from cohocalc.mukai_k import CurveKClass, curve_chi

        rng = random.Random(5)
        for _ in range(200):
            a = CurveKClass(rng.randint(-9, 9), rng.randint(-9, 9))
            b = CurveKClass(rng.randint(-9, 9), rng.randint(-9, 9))
            g = rng.randint(0, 6)
            self.assertEqual(curve_chi(a + b, g), curve_chi(a, g) + curve_chi(b, g))


class VerlindeTests(unittest.TestCase):
    def test_golden_theta_numbers(self) -> None:
        from cohocalc.verlinde import bernoulli, theta_numbers, theta_top_fixed_det, theta_top_rank2

        golden = load_golden()["verlinde"]
        for g, value in golden["theta_top_rank2"].items():
            self.assertEqual(theta_top_rank2(int(g)), value)
        for g, value in golden["theta_top_fixed_det"].items():
            self.assertEqual(theta_top_fixed_det(int(g)), value)
        for n, value in golden["bernoulli"].items():
            self.assertEqual(format_rational(bernoulli(int(n))), value)
        self.assertEqual(theta_numbers(2).dim_M, 5)

    def test_cover_agrees_with_closed_term(self) -> None:
        from cohocalc.verlinde import deg_n0_via_cover, general_degrees, moduli_dim, theta_top_fixed_det, theta_top_rank2

        for g in range(2, 5):
            self.assertEqual(deg_n0_via_cover(g, 2, theta_top_fixed_det(g)), theta_top_rank2(g))
        self.assertEqual(deg_n0_via_cover(3, 1, 1), 6)
        self.assertEqual(general_degrees(2, 2, 80), (122880, 2560))
        self.assertEqual(moduli_dim(2, 2), 5)

    def test_bernoulli_recurrence_and_odd_vanishing(self) -> None:
        from math import comb

        from cohocalc.verlinde import bernoulli

        for n in range(1, 21):
            self.assertEqual(sum(comb(n + 1, k) * bernoulli(k) for k in range(n + 1)), 0, n)
        for k in range(1, 10):
            self.assertEqual(bernoulli(2 * k + 1), 0, 2 * k + 1)
        self.assertEqual(bernoulli(1), Fraction(-1, 2))

    def test_domain_errors(self) -> None:
        from cohocalc.verlinde import bernoulli, theta_top_rank2

        with self.assertRaises(ValueError):
            bernoulli(-1)
        with self.assertRaises(ValueError):
            theta_top_rank2(1)


class DslTests(unittest.TestCase):
    def test_parse_wbar_program(self) -> None:
        from cohocalc.dsl import parse

        program = parse((SAMPLES / "wbar.coh").read_text(encoding="utf-8"))
        counts = (len(program.gens), len(program.rels), len(program.integrals), len(program.evals))
        self.assertEqual(counts, (4, 6, 1, 1))

    def test_eval_sample_programs(self) -> None:
        from cohocalc.dsl import eval_program, parse

        def computed(name: str) -> list[str]:
            report = eval_program(parse((SAMPLES / name).read_text(encoding="utf-8")))
            self.assertTrue(report.passed)
            return [step.computed for step in report.steps]

        self.assertEqual(computed("wbar.coh"), ["-1600"])
        self.assertEqual(computed("pic3.coh"), ["1024*theta^5", "122880", "122880"])
        self.assertEqual(
            computed("jac_x_curve.coh"),
            ["-2*theta*rho", "2", "-2", "-3*mu - 2*theta", "-3*mu - 2*theta", "2"],
        )

    def test_eval_steps_cite_lines(self) -> None:
        from cohocalc.dsl import eval_program, parse

        report = eval_program(parse("space abelian(2);\n\neval integrate(theta^2);\n"))
        self.assertEqual(len(report.steps), 1)
        self.assertEqual(report.steps[0].label, "eval integrate(theta^2);")
        self.assertEqual(report.steps[0].computed, "2")
        self.assertEqual(report.steps[0].citation, "line 3")

    def test_empty_program(self) -> None:
        from cohocalc.dsl import eval_program, format_program, parse

        program = parse("# nothing here\n")
        self.assertEqual(program.statements, ())
        self.assertEqual(format_program(program), "")
        self.assertEqual(eval_program(program).steps, [])

    def test_round_trip_through_the_printer(self) -> None:
        from cohocalc.dsl import format_program, parse

        for path in sorted(SAMPLES.glob("*.coh")):
            program = parse(path.read_text(encoding="utf-8"))
            self.assertEqual(parse(format_program(program)), program, path.name)
        text = "space point();\nlet q = -(1/2 - 3)*(2 + 1)^2 - (4 - 1);\neval normal(q*q);\neval normal(mukai(1, 2, 3; 4));\n"
        program = parse(text)
        self.assertEqual(parse(format_program(program)), program)

    def test_syntax_errors_carry_positions(self) -> None:
        from cohocalc.errors import DslSyntaxError
        from cohocalc.dsl import parse

        with self.assertRaises(DslSyntaxError) as caught:
            parse("gen x: 2;\ngen y 2;\n")
        self.assertEqual(caught.exception.line, 2)
        self.assertEqual(caught.exception.code, "SyntaxError")
        self.assertTrue(caught.exception.expected)

    def test_resolution_errors(self) -> None:
        from cohocalc.errors import DegreeMismatch, DslError, UnknownIdentifier
        from cohocalc.dsl import parse

        with self.assertRaises(DegreeMismatch):
            parse("gen x: 3;")
        with self.assertRaises(DegreeMismatch):
            parse("gen x: 2;\ngen y: 4;\nrel y = x;\n")
        with self.assertRaises(UnknownIdentifier) as caught:
            parse("space abelian(2);\neval integrate(foo^2);\n")
        self.assertEqual(caught.exception.line, 2)
        with self.assertRaises(UnknownIdentifier):
            parse("space nowhere(2);")
        with self.assertRaises(UnknownIdentifier):
            parse("space abelian(2);\neval normal(frobnicate(theta));\n")
        with self.assertRaises(DslError):
            parse("space abelian(2);\ntop 4;\n")

    def test_kernel_errors_become_eval_errors(self) -> None:
        from cohocalc.errors import DslEvalError
        from cohocalc.dsl import eval_program, parse

        broken = "gen x: 2;\ngen y: 2;\nrel x^2 = 0;\nrel x*y = y^2;\ntop 6;\nintegral y^3 = 1;\neval integrate(y^3);\n"
        with self.assertRaises(DslEvalError) as caught:
            eval_program(parse(broken))
        self.assertIn("NotConfluent", str(caught.exception))
        self.assertEqual(caught.exception.line, 1)
        with self.assertRaises(DslEvalError):
            eval_program(parse("space abelian(2);\neval integrate(mukai(0, 0, 1));\n"))

    def test_parse_element_in_custom_ring(self) -> None:
        from cohocalc.dsl import eval_program, parse

        text = (
            "gen x: 2;\ntop 4;\nintegral x^2 = 3;\nlet y = 1/2*x;\n"
            "eval coeff[x^2]((1 + y)^2);\neval coeff[x]((1 + y)^2);\neval integrate((1 + y)^2);\n"
        )
        report = eval_program(parse(text))
        self.assertEqual([step.computed for step in report.steps], ["1/4", "1", "3/4"])

    def test_coeff_returns_the_cofactor_element(self) -> None:
        from cohocalc.dsl import eval_program, parse

        text = "space wbar();\nlet q = (-4*theta + 2*pi - 7*rho - zeta)^5;\neval coeff[zeta^2](q);\neval coeff[zeta^2*theta^2*rho](q);\n"
        report = eval_program(parse(text))
        self.assertEqual([step.computed for step in report.steps], ["-800*theta^2*rho", "-800"])

    def test_coeff_names_must_be_generators(self) -> None:
        from cohocalc.errors import UnknownIdentifier
        from cohocalc.dsl import parse

        with self.assertRaises(UnknownIdentifier) as caught:
            parse("space abelian(2);\neval coeff[phi](theta^2);\n")
        self.assertEqual(caught.exception.line, 2)
        with self.assertRaises(UnknownIdentifier):
            parse("space jac_x_curve(2, 1);\neval coeff[pi](gamma);\n")
        with self.assertRaises(UnknownIdentifier):
            parse("gen x: 2;\ntop 2;\nintegral x = 1;\nlet y = x;\neval coeff[y](y);\n")


class ReportTests(unittest.TestCase):
    def test_schema_verdicts_and_digest(self) -> None:
        from cohocalc.report import Report, render_text, reports_to_json

        report = Report("demo")
        self.assertTrue(report.check("half", Fraction(1, 2), Fraction(2, 4), "arithmetic"))
        report.assume("input", "e = 0", "known vanishing")
        self.assertEqual(report.verdict, "pass")
        payload = json.loads(reports_to_json([report]))
        self.assertEqual(set(payload), {"scenario", "steps", "verdict"})
        self.assertEqual(set(payload["steps"][0]), {"label", "computed", "expected", "citation", "verdict"})
        self.assertEqual(payload["steps"][0]["computed"], "1/2")
        self.assertEqual(payload["steps"][1]["verdict"], "assumption")
        self.assertTrue(render_text(report).rstrip().endswith(report.digest()))
        self.assertFalse(report.check("wrong", 1, 2, "arithmetic"))
        self.assertEqual(report.verdict, "fail")


class ScenarioTests(unittest.TestCase):
    def test_registry_is_listable_and_describable(self) -> None:
        from cohocalc.errors import UnknownScenario
        from cohocalc.scenarios import describe_scenario, get_scenario, list_scenarios

        ids = [item["id"] for item in list_scenarios()]
        self.assertEqual(ids, load_golden()["scenarios"])
        self.assertIn("Fiber degree", describe_scenario("fiber"))
        with self.assertRaises(UnknownScenario):
            get_scenario("thm3")

    def test_every_scenario_passes(self) -> None:
        from cohocalc.scenarios import RUNNERS

        for name, runner in RUNNERS.items():
            report = runner()
            failed = [step.label for step in report.steps if step.verdict == "fail"]
            self.assertEqual(failed, [], name)
            self.assertTrue(all(step.citation for step in report.steps), name)

    def test_degree_chain_matches_golden(self) -> None:
        from cohocalc.scenarios import fiber_degree, n0_degree, n0_pairing_constant, n1_degree, n1_pairing_constant, positive_multiplicities

        golden = load_golden()
        degrees = golden["degrees"]
        self.assertEqual(fiber_degree(), degrees["fiber"])
        self.assertEqual(n0_degree(), degrees["n0"])
        self.assertEqual(n1_degree(), degrees["n1"])
        self.assertEqual(n0_pairing_constant(), degrees["n0_pairing_constant"])
        self.assertEqual(n1_pairing_constant() / n0_pairing_constant(), degrees["pairing_ratio"])
        solutions = positive_multiplicities(fiber_degree(), n0_degree(), n1_degree())
        self.assertEqual([list(item) for item in solutions], golden["multiplicities"]["positive_solutions"])

    def test_isotropy_coefficients(self) -> None:
        from cohocalc.scenarios import repro_thm2

        golden = load_golden()["isotropy"]
        computed = {step.label: step.computed for step in repro_thm2().steps}
        self.assertEqual(computed["[N0] coefficient of [F]"], golden["n0_coefficient"])
        self.assertEqual(computed["[N1] coefficient of [F]"], golden["n1_coefficient"])
        self.assertEqual(computed["beta1 / beta0"], str(golden["beta_scale"]))
        verdicts = [step.verdict for step in repro_thm2().steps]
        self.assertIn("assumption", verdicts)

    def test_isotropy_follows_its_inputs(self) -> None:
        from cohocalc.scenarios import isotropy_gram, pair_classes, repro_thm2

        x, y = (Fraction(1), Fraction(1)), (Fraction(7), Fraction(-3))
        self.assertEqual(pair_classes(x, y, isotropy_gram(0, 0, 0)), 0)
        self.assertEqual(pair_classes(x, y, isotropy_gram(0, 0, 2)), 6)
        self.assertEqual(pair_classes(x, y, isotropy_gram(1, 0, 0)), 7)
        computed = {step.label: step.computed for step in repro_thm2().steps}
        self.assertEqual(computed["[F] as a multiple of u0^5"], "1")
        self.assertEqual(computed["[F]^2 from the integral of u0^10"], "0")
        self.assertEqual(computed["beta^2 = -e(N0)"], "0")
        broken = repro_thm2(euler_n0=Fraction(2))
        self.assertEqual(broken.verdict, "fail")
        failed = [step.label for step in broken.steps if step.verdict == "fail"]
        self.assertEqual(failed, ["[N0]^2", "[N1]^2", "[N0] . [N1]"])
        self.assertEqual(repro_thm2(fiber_beta=Fraction(1)).verdict, "fail")

    def test_independence_integrals_live_on_the_factors(self) -> None:
        from cohocalc.scenarios import repro_independence

        report = repro_independence()
        computed = {step.label: step.computed for step in report.steps}
        self.assertEqual(computed["integral of alpha^3"], "4")
        self.assertEqual(computed["integral of theta0^2"], "2")
        self.assertEqual(computed["integral of alpha^3 theta0^2 on the product"], "8")
        self.assertEqual(computed["obstruction integral"], str(load_golden()["independence"]))
        self.assertEqual(report.verdict, "pass")

    def test_pairing_constant_flags_the_mismatched_display(self) -> None:
        from cohocalc.scenarios import repro_n1

        steps = {step.label: step for step in repro_n1().steps}
        self.assertEqual(steps["pairing constant matches isotropy proof, -5^2*2^6"].computed, "true")
        self.assertEqual(steps["pairing constant matches component display, -5^2*2^9"].computed, "false")

    def test_parallel_run_is_byte_identical(self) -> None:
        from cohocalc.report import reports_to_json
        from cohocalc.scenarios import run_scenarios

        names = ["fiber", "n0", "multiplicities", "independence", "verlinde"]
        self.assertEqual(reports_to_json(run_scenarios(names, workers=3)), reports_to_json(run_scenarios(names, workers=1)))

    def test_single_scenario_and_unknown_name(self) -> None:
        from cohocalc.errors import UnknownScenario
        from cohocalc.scenarios import expand_scenarios, repro_n0, run_scenario

        self.assertEqual(run_scenario("n0").to_dict(), repro_n0().to_dict())
        self.assertEqual(len(expand_scenarios("all")), 9)
        with self.assertRaises(UnknownScenario):
            run_scenario("thm3")

    def test_selfcheck_small_run(self) -> None:
        from cohocalc.selfcheck import run_selfcheck

        report = run_selfcheck(trials=20, seed=7)
        failed = [step.label for step in report.steps if step.verdict == "fail"]
        self.assertEqual(failed, [])
        labels = {step.label for step in report.steps}
        self.assertIn("injected bad rule is reported", labels)
        self.assertIn("grid cases", labels)
        self.assertIn("wbar exp(x)exp(-x) = 1 over 1 trials", labels)

    def test_default_selfcheck_runs_within_five_seconds(self) -> None:
        from cohocalc.selfcheck import run_selfcheck

        start = time.perf_counter()
        report = run_selfcheck()
        elapsed = time.perf_counter() - start
        self.assertEqual(report.verdict, "pass")
        labels = {step.label for step in report.steps}
        self.assertIn("wbar associativity over 1000 trials", labels)
        self.assertIn("wbar exp(x)exp(-x) = 1 over 50 trials", labels)
        self.assertLess(elapsed, 5.0)


class CliTests(unittest.TestCase):
    def _run(self, argv: list[str]) -> tuple[int, str, str]:
        from cohocalc.cli import main

        out, err = io.StringIO(), io.StringIO()
        with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
            code = main(argv)
        return code, out.getvalue(), err.getvalue()

    def test_repro_json_and_exit_codes(self) -> None:
        code, out, _ = self._run(["repro", "fiber", "--json"])
        self.assertEqual(code, 0)
        payload = json.loads(out)
        self.assertEqual(payload["scenario"], "fiber")
        self.assertEqual(payload["verdict"], "pass")
        code, _, err = self._run(["repro", "thm3"])
        self.assertEqual(code, 2)
        self.assertIn("cohocalc error:", err)

    def test_eval_file_and_missing_file(self) -> None:
        code, out, _ = self._run(["eval", str(SAMPLES / "wbar.coh")])
        self.assertEqual(code, 0)
        self.assertIn("-1600", out)
        self.assertIn("digest:", out)
        with tempfile.TemporaryDirectory() as temp:
            code, _, err = self._run(["eval", str(Path(temp) / "missing.coh")])
            self.assertEqual(code, 2)
            bad = Path(temp) / "bad.coh"
            bad.write_text("gen x: 3;\n", encoding="utf-8")
            code, _, err = self._run(["eval", str(bad)])
            self.assertEqual(code, 2)
            self.assertIn("line 1", err)

    def test_scenarios_subcommands(self) -> None:
        code, out, _ = self._run(["scenarios", "list"])
        self.assertEqual(code, 0)
        self.assertIn("lambda-check", out)
        code, out, _ = self._run(["scenarios", "describe", "independence"])
        self.assertEqual(code, 0)
        self.assertIn("3*2^7", out)

    def test_settings_from_environment(self) -> None:
        from cohocalc.config import Settings, load_settings
        from cohocalc.errors import ConfigError

        with mock.patch.dict(os.environ, {"COHOCALC_WORKERS": "3", "COHOCALC_SEED": "11"}):
            settings = load_settings()
        self.assertEqual((settings.workers, settings.seed), (3, 11))
        with mock.patch.dict(os.environ, {"COHOCALC_PROPERTY_TRIALS": "many"}):
            with self.assertRaises(ConfigError):
                load_settings()
        with self.assertRaises(ConfigError):
            Settings().with_overrides(workers=0)
        self.assertEqual(Settings().with_overrides(seed=None).seed, Settings().seed)


@unittest.skipUnless(HAS_SYMPY, "sympy is required for the independent cross-checks")
class SympyCrossChecks(unittest.TestCase):
    def test_even_bernoulli_numbers(self) -> None:
        import sympy

        from cohocalc.verlinde import bernoulli

        for n in range(2, 21, 2):
            expected = sympy.Rational(sympy.bernoulli(n))
            self.assertEqual(bernoulli(n), Fraction(int(expected.p), int(expected.q)))

    def test_groebner_normal_form_of_the_quintic(self) -> None:
        import sympy

        zeta, gamma, theta, rho = sympy.symbols("zeta gamma theta rho")
        relations = [rho**2, gamma * rho, gamma**2 + 2 * theta * rho, theta**3, gamma * theta**2, zeta**3 + 4 * zeta**2 * rho]
        basis = sympy.groebner(relations, zeta, gamma, theta, rho, order="grlex")
        quintic = sympy.expand((-4 * theta + 2 * (gamma + rho) - 7 * rho - zeta) ** 5)
        _, remainder = basis.reduce(quintic)
        self.assertEqual(sympy.expand(remainder + 800 * zeta**2 * theta**2 * rho), 0)


if __name__ == "__main__":
    unittest.main()
