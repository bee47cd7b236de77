import json
import math
import os
import unittest

import mpmath
from scipy import special

from xxzff.errors import DomainError, RegimeError
from xxzff.dressed import DressedState
from xxzff.models import DiscreteZ, ExcitationY, ModelParams, RestrictedSumConfig
from xxzff.restricted import (
    B_leading_check,
    R_density,
    barnes_G,
    discrete_ff_leading,
    log_barnes_G,
    log_R_density,
    restricted_sum,
    restricted_sum_lhs,
    restricted_sum_rhs,
)


def load_cases():
    path = os.path.join(os.path.dirname(__file__), "data", "restricted-sum-cases.json")
    with open(path, encoding="utf-8") as handle:
        return json.load(handle)


def sum_config(nu, ell, cut, L=50.0, x=50.0):
    return RestrictedSumConfig(
        {"nu": nu, "ell": ell, "L": L, "x": x, "p_cut": cut, "h_cut": cut}
    )


class TestBarnesG(unittest.TestCase):
    def test_integers(self):
        values = ((1, 1.0), (2, 1.0), (3, 1.0), (4, 2.0), (5, 12.0), (6, 288.0))
        for z, expected in values:
            self.assertAlmostEqual(barnes_G(z) / expected, 1.0, 12, msg=f"G({z})")

    def test_against_mpmath(self):
        for z in (0.5, 0.73, 1.5, 2.25, 4.0, 7.5, 12.1, 19.5, 20.0, 26.3):
            expected = float(mpmath.barnesg(z))
            self.assertAlmostEqual(barnes_G(z) / expected, 1.0, 10, msg=f"G({z})")

    def test_negative_arguments(self):
        for z in (-0.5, -1.3, -2.7):
            log_value, sign, order = log_barnes_G(z)
            expected = float(mpmath.barnesg(z))
            self.assertEqual(order, 0)
            self.assertEqual(sign, math.copysign(1.0, expected))
            self.assertAlmostEqual(log_value, math.log(abs(expected)), 9, msg=f"G({z})")

    def test_zeros(self):
        self.assertEqual(barnes_G(0), 0.0)
        for z, order in ((0, 1), (-1, 2), (-3, 4)):
            log_value, sign, zero_order = log_barnes_G(z)
            self.assertEqual(log_value, -math.inf)
            self.assertEqual(sign, 0.0)
            self.assertEqual(zero_order, order)

    def test_recursion(self):
        for z in (0.3, 2.7, 9.9):
            self.assertAlmostEqual(
                barnes_G(z + 1.0) / (special.gamma(z) * barnes_G(z)), 1.0, 11
            )

    def test_not_finite(self):
        with self.assertRaises(DomainError):
            log_barnes_G(math.inf)


class TestDensity(unittest.TestCase):
    def test_empty(self):
        self.assertEqual(R_density(DiscreteZ({}), 0.37), 1.0)

    def test_single_particle(self):
        Z = DiscreteZ({"particles": [0]})
        self.assertAlmostEqual(R_density(Z, 0.3), special.gamma(1.3) ** 2, 13)

    def test_single_hole(self):
        Z = DiscreteZ({"holes": [0]})
        expected = (math.sin(0.3 * math.pi) / math.pi) ** 2 * special.gamma(0.7) ** 2
        self.assertAlmostEqual(R_density(Z, 0.3), expected, 13)

    def test_particle_hole_pair(self):
        Z = DiscreteZ({"particles": [0], "holes": [0]})
        for nu in (0.25, -0.6):
            self.assertAlmostEqual(R_density(Z, nu), nu * nu, 12)

    def test_vandermonde(self):
        Z = DiscreteZ({"particles": [1, 1 + 2]})
        nu = 0.4
        expected = (
            2.0**2
            * (special.gamma(2.0 + nu) / special.gamma(2.0)) ** 2
            * (special.gamma(4.0 + nu) / special.gamma(4.0)) ** 2
        )
        self.assertAlmostEqual(R_density(Z, nu) / expected, 1.0, 12)

    def test_vanishes_at_integer_nu(self):
        Z = DiscreteZ({"particles": [0], "holes": [2]})
        self.assertEqual(log_R_density(Z, 0.0), -math.inf)
        self.assertLess(R_density(Z, 1.0), 1e-30)

    def test_labels(self):
        for Z in (
            DiscreteZ({"particles": [1, 1]}),
            DiscreteZ({"holes": [-1]}),
        ):
            with self.assertRaises(DomainError):
                R_density(Z, 0.3)


class TestRestrictedSum(unittest.TestCase):
    def test_trivial(self):
        result = restricted_sum(sum_config(0.0, 0, 10))
        self.assertAlmostEqual(result.lhs, 1.0, 13)
        self.assertAlmostEqual(result.rhs, 1.0, 13)
        self.assertLess(result.relative_error, 1e-12)

    def test_determinant_matches_enumeration(self):
        for case in load_cases():
            cfg = sum_config(case["nu"], case["ell"], 6)
            determinant = restricted_sum_lhs(cfg)
            enumerated = restricted_sum_lhs(cfg, method="enumerate")
            self.assertLess(
                abs(determinant - enumerated), 1e-10 * abs(enumerated), msg=case["name"]
            )

    def test_uneven_box(self):
        cfg = sum_config(0.3, 1, 0)._replace(p_cut=5, h_cut=3)
        self.assertAlmostEqual(
            restricted_sum_lhs(cfg), restricted_sum_lhs(cfg, method="enumerate"), 10
        )

    def test_identity(self):
        for case in load_cases():
            coarse = restricted_sum(sum_config(case["nu"], case["ell"], 30))
            fine = restricted_sum(sum_config(case["nu"], case["ell"], 60))
            self.assertLess(fine.relative_error, 1e-3, msg=case["name"])
            self.assertLess(
                fine.relative_error, coarse.relative_error, msg=case["name"]
            )

    def test_identity_larger_system(self):
        result = restricted_sum(sum_config(0.3, 0, 60, L=100.0, x=100.0))
        self.assertLess(result.relative_error, 1e-3)

    def test_rhs(self):
        cfg = sum_config(0.5, 0, 10, L=20.0, x=10.0)
        base = (2.0 * math.pi / 20.0) / (1.0 - complex(math.cos(0.5), math.sin(0.5)))
        self.assertAlmostEqual(restricted_sum_rhs(cfg), base**0.25, 13)

    def test_rhs_divergent(self):
        with self.assertRaises(RegimeError):
            restricted_sum_rhs(sum_config(0.3, 0, 10, L=10.0, x=20.0 * math.pi))

    def test_enumeration_limit(self):
        with self.assertRaises(DomainError):
            restricted_sum_lhs(sum_config(0.3, 0, 9), method="enumerate")
        with self.assertRaises(DomainError):
            restricted_sum_lhs(sum_config(0.3, 0, 4), method="bisect")

    def test_tail_warning(self):
        with self.assertLogs("xxzff.restricted", "WARNING"):
            restricted_sum(sum_config(0.3, 0, 2))


class TestLeadingCheck(unittest.TestCase):
    def test_vanishing_exponent(self):
        result = B_leading_check(40.0, 0.1, 0.0, 200.0)
        self.assertAlmostEqual(result.ratio, 1.0, 12)
        self.assertAlmostEqual(result.phase_error, 0.0, 12)

    def test_power_law(self):
        results = [B_leading_check(40.0, 0.1, 0.5, L) for L in (200.0, 400.0, 800.0)]
        deviations = [abs(result.ratio - 1.0) for result in results]
        self.assertLess(deviations[-1], 2e-2)
        self.assertTrue(deviations[0] > deviations[1] > deviations[2])
        phases = [result.phase_error for result in results]
        self.assertTrue(phases[0] > phases[1] > phases[2])

    def test_finite_size_phase(self):
        # the closed form misses the phase pi theta^2 m / L of the finite size
        for L in (200.0, 800.0):
            result = B_leading_check(40.0, 0.1, 0.5, L)
            self.assertAlmostEqual(result.phase_error, 0.25 * math.pi * 40.0 / L, 2)
            self.assertLess(result.finite_size_phase_error, 1e-2)

    def test_small_distance_warns(self):
        with self.assertLogs("xxzff.restricted", "WARNING"):
            B_leading_check(5.0, 0.1, 0.5, 200.0)

    def test_zero_distance(self):
        with self.assertRaises(DomainError):
            B_leading_check(0.0, 0.1, 0.5)


class TestDiscreteLeading(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        params = ModelParams({"J": 1.0, "zeta": math.pi / 2.0, "h": 2.0})
        cls.state = DressedState.build(params, 64)
        cls.hole = ExcitationY({"holes": [0.2], "umklapp": [1, 0]})

    def test_single_hole(self):
        # theta_+ = -1 for free fermions, so the form factor is 2 pi / L
        empty = DiscreteZ({})
        value = discrete_ff_leading(self.hole, 0, 1, empty, 100.0, self.state)
        self.assertAlmostEqual(value / (2.0 * math.pi / 100.0), 1.0, 8)

    def test_vanishing_exponent(self):
        empty = DiscreteZ({})
        value = discrete_ff_leading(self.hole, 0, -1, empty, 100.0, self.state)
        self.assertAlmostEqual(value, 1.0, 8)

    def test_zero_of_G(self):
        value = discrete_ff_leading(self.hole, 2, 1, DiscreteZ({}), 100.0, self.state)
        self.assertEqual(value, 0.0)

    def test_domain(self):
        with self.assertRaises(DomainError):
            discrete_ff_leading(self.hole, 0, 0, DiscreteZ({}), 100.0, self.state)
        with self.assertRaises(DomainError):
            discrete_ff_leading(self.hole, 0, 1, DiscreteZ({}), -1.0, self.state)
