import math
import os
import unittest

import numpy as np

from xxzff.chain import FOURIER_POINTS
from xxzff.config import load_config
from xxzff.dressed import DressedState
from xxzff.errors import DomainError
from xxzff.ffseries import momentum_rep
from xxzff.models import FermiData, ModelParams, MomentumK, NConfig
from xxzff.response import (
    J_delta,
    brute_force_T,
    edge_trim,
    fourier_T_closed,
    parse_grid,
    response_grid,
    response_Sn,
    response_threshold,
    response_total,
    zhat,
)

UNIT_FERMI = FermiData({"q": 1.0, "p_F": 1.0, "v_F": 1.0})


class TestClosedForm(unittest.TestCase):
    def test_J_delta(self):
        self.assertAlmostEqual(J_delta(1.0), 2.0 * math.pi, 14)
        self.assertAlmostEqual(J_delta(0.5), 2.0 * math.sqrt(math.pi), 14)

    def test_linear_exponents(self):
        result = fourier_T_closed(1.0, 1.0, 0.3, 1.5, UNIT_FERMI)
        self.assertTrue(result.finite)
        self.assertAlmostEqual(result.value, 2.0 * math.pi**2, 12)
        self.assertEqual(result.delta_terms, ())

    def test_below_threshold(self):
        result = fourier_T_closed(0.5, 0.5, 0.3, 0.2, UNIT_FERMI)
        self.assertEqual(result.value, 0.0)

    def test_edge_slope(self):
        k = 0.3
        values = [
            fourier_T_closed(0.5, 0.25, k, k + eps, UNIT_FERMI).value
            for eps in (1e-6, 1e-4)
        ]
        slope = math.log(values[1] / values[0]) / math.log(100.0)
        self.assertAlmostEqual(slope, -0.75, 3)

    def test_free_fermion_edges(self):
        # the rays omega = v_F k and omega = -v_F k with quarter exponents
        eps = np.logspace(-6, -3, 7)
        for k in (0.3, -0.3):
            values = [
                fourier_T_closed(0.25, 0.25, k, abs(k) + e, UNIT_FERMI).value
                for e in eps
            ]
            slope = np.polyfit(np.log(eps), np.log(values), 1)[0]
            self.assertLess(abs(slope + 0.75), 0.05, msg=k)

    def test_on_edge(self):
        result = fourier_T_closed(0.5, 0.25, 0.3, 0.3, UNIT_FERMI)
        self.assertFalse(result.finite)
        self.assertEqual(result.value, math.inf)

    def test_periodic_in_k(self):
        first = fourier_T_closed(0.4, 0.7, 0.2, 2.5, UNIT_FERMI).value
        second = fourier_T_closed(0.4, 0.7, 0.2 + 2.0 * math.pi, 2.5, UNIT_FERMI).value
        self.assertAlmostEqual(second / first, 1.0, 10)

    def test_one_vanishing_exponent(self):
        result = fourier_T_closed(0.0, 0.5, 0.3, 1.5, UNIT_FERMI)
        self.assertEqual(result.value, 0.0)
        self.assertEqual([term[0] for term in result.delta_terms], [-2, -1, 0])
        self.assertTrue(all(term[1] == 1 for term in result.delta_terms))
        _, _, weight = result.delta_terms[-1]
        expected = 2.0 * math.pi**2 / math.sqrt(0.6 * math.pi)
        self.assertAlmostEqual(weight / expected, 1.0, 12)

    def test_both_exponents_vanish(self):
        result = fourier_T_closed(0.0, 0.0, 0.3, 1.5, UNIT_FERMI, n_window=1)
        self.assertEqual(len(result.delta_terms), 3)
        self.assertTrue(all(term[1] == 0 for term in result.delta_terms))

    def test_negative_exponent(self):
        with self.assertRaises(DomainError):
            fourier_T_closed(-0.1, 0.5, 0.3, 1.5, UNIT_FERMI)


class TestBruteForce(unittest.TestCase):
    def assertMatches(self, delta_plus, delta_minus, points):
        for k, omega in points:
            closed = fourier_T_closed(delta_plus, delta_minus, k, omega, UNIT_FERMI)
            brute = brute_force_T(delta_plus, delta_minus, k, omega, UNIT_FERMI)
            self.assertLess(
                abs(brute / closed.value - 1.0),
                1e-2,
                msg=f"{delta_plus}, {delta_minus} at {k}, {omega}",
            )

    def test_matches_closed_form(self):
        self.assertMatches(0.5, 0.5, FOURIER_POINTS)

    def test_quarter_exponents(self):
        self.assertMatches(0.25, 0.25, ((0.3, 1.5), (0.5, 1.4)))

    def test_unit_exponents(self):
        self.assertMatches(1.0, 1.0, ((-0.4, 2.0), (-0.1, 3.5)))

    def test_mixed_exponents(self):
        self.assertMatches(0.25, 1.0, ((0.2, 2.5),))

    def test_needs_two_regulators(self):
        with self.assertRaises(DomainError):
            brute_force_T(0.5, 0.5, 0.3, 1.5, UNIT_FERMI, etas=(0.1,))


class TestGrid(unittest.TestCase):
    def test_parse(self):
        ks, omegas = parse_grid("0:1:3,0.5:2:4")
        np.testing.assert_allclose(ks, [0.0, 0.5, 1.0])
        np.testing.assert_allclose(omegas, [0.5, 1.0, 1.5, 2.0])

    def test_invalid(self):
        for spec in ("0:1:3", "0:1,0:1:2", "a:1:2,0:1:2", "0:1:2,0:1:x"):
            with self.assertRaises(DomainError, msg=spec):
                parse_grid(spec)


class TestFreeFermionResponse(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        config = load_config(
            os.path.join(os.path.dirname(__file__), "data", "free-fermion-config.json")
        )
        cls.options = config["response"]
        state = DressedState.build(ModelParams(config["model"]), 64)
        cls.rep = momentum_rep(cls.options, state)
        cls.fermi = state.fermi

    def test_edge_trim_default(self):
        trim = edge_trim(self.options, self.fermi)
        self.assertAlmostEqual(trim, 1e-2 * self.fermi.p_F, 15)
        self.assertEqual(edge_trim({"edge_trim": 0.05}, self.fermi), 0.05)

    def test_zhat(self):
        K = MomentumK({"holes": [0.3], "umklapp": [1, 0]})
        k, omega, s = 0.4, 1.0, 1
        z_plus, z_minus = zhat(K, s, k, omega, self.rep)
        energy = -self.rep.e_hole(0.3)
        momentum = -0.3 + self.fermi.p_F
        self.assertAlmostEqual((z_plus + z_minus) / 2.0, omega - energy, 12)
        self.assertAlmostEqual(
            (z_plus - z_minus) / (2.0 * self.fermi.v_F),
            k - momentum + 2.0 * math.pi * s,
            12,
        )

    def test_threshold(self):
        # the hole band edge 4 cos(p_F - k) - 2 with the particle at +p_F
        threshold = response_threshold(1.0, self.options, self.rep)
        edge = 4.0 * math.cos(self.fermi.p_F - 1.0) - 2.0
        self.assertAlmostEqual(threshold, edge, 5)

    def test_support_starts_at_threshold(self):
        for k in (0.8, 1.0):
            threshold = response_threshold(k, self.options, self.rep)
            below = response_total(k, threshold - 0.02, self.options, self.rep)
            self.assertEqual(len(below.channels), 5)
            self.assertAlmostEqual(below.value, 0.0, 12, msg=k)
            above = response_total(k, threshold + 0.02, self.options, self.rep)
            self.assertGreater(above.value, 0.0, msg=k)

    def test_vacuum_channel_is_distributional(self):
        vacuum = NConfig({"n_holes": 0, "umklapp": [0, 0]})
        value = response_Sn(vacuum, 0.4, 1.0, self.options, self.rep)
        self.assertTrue(value.distributional)
        self.assertEqual(value.value, 0.0)

    def test_single_hole_channel_is_distributional(self):
        channel = NConfig({"n_holes": 1, "umklapp": [1, 0]})
        value = response_Sn(channel, 1.0, 2.0, self.options, self.rep)
        self.assertTrue(value.distributional)
        self.assertGreater(value.value, 0.0)
        self.assertEqual(value.edge_hits, 0)
        outside = response_Sn(channel, 1.0, 1.5, self.options, self.rep)
        self.assertAlmostEqual(outside.value, 0.0, 12)

    def test_periodic_in_k(self):
        first = response_total(1.0, 2.0, self.options, self.rep)
        second = response_total(1.0 + 2.0 * math.pi, 2.0, self.options, self.rep)
        self.assertGreater(first.value, 0.0)
        self.assertLess(abs(first.value - second.value), 1e-7 * first.value)

    def test_grid_is_k_major(self):
        ks, omegas = [0.9, 1.0], [1.5, 2.0, 2.5]
        grid = response_grid(ks, omegas, self.options, self.rep)
        self.assertEqual(len(grid), 6)
        self.assertLess(1.5, response_threshold(0.9, self.options, self.rep))
        self.assertAlmostEqual(grid[0].value, 0.0, 12)
        direct = response_total(1.0, 2.0, self.options, self.rep)
        self.assertAlmostEqual(grid[4].value, direct.value, 12)
        self.assertGreater(grid[4].value, 0.0)
