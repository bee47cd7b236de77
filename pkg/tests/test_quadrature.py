import math
import unittest

import numpy as np

from xxzff.errors import DomainError
from xxzff.quadrature import (
    chebyshev_fit,
    composite_rule,
    extrapolate_to_zero,
    fermi_grid,
    gauss_legendre,
    half_line_rule,
)


class TestRules(unittest.TestCase):
    def test_gauss_legendre_polynomial(self):
        x, w = gauss_legendre(3, 0.0, 2.0)
        self.assertAlmostEqual(float(np.sum(w * x**5)), 64.0 / 6.0, 12)

    def test_gauss_legendre_needs_nodes(self):
        with self.assertRaises(DomainError):
            gauss_legendre(0, 0.0, 1.0)

    def test_fermi_grid(self):
        grid = fermi_grid(0.8, 32)
        self.assertEqual(grid.n_nodes, 32)
        self.assertAlmostEqual(float(np.sum(grid.weights)), 1.6, 13)
        self.assertTrue(np.all(np.abs(grid.nodes) < 0.8))
        for q, n in ((0.0, 64), (1.0, 16)):
            with self.assertRaises(DomainError, msg=f"q = {q}, n = {n}"):
                fermi_grid(q, n)

    def test_half_line_rule(self):
        rho, w = half_line_rule(16, 1.0)
        self.assertAlmostEqual(float(np.sum(w / (1.0 + rho) ** 2)), 1.0, 12)
        rho, w = half_line_rule(24, 2.0)
        self.assertAlmostEqual(float(np.sum(w * np.exp(-rho))), 1.0, 8)

    def test_composite_rule(self):
        x, w = composite_rule(16, 0.0, 20.0, 10)
        self.assertEqual(x.shape, (160,))
        self.assertTrue(np.all(np.diff(x) > 0.0))
        value = complex(np.sum(w * np.exp(3.0j * x)))
        self.assertAlmostEqual(value, (np.exp(60.0j) - 1.0) / 3.0j, 10)
        with self.assertRaises(DomainError):
            composite_rule(8, 0.0, 1.0, 0)

    def test_half_line_rule_refined(self):
        rho, w = half_line_rule(16, 1.0, refine=3)
        self.assertEqual(rho.shape, (16 * 4 * 3,))
        self.assertAlmostEqual(float(np.sum(w / (1.0 + rho) ** 2)), 1.0, 12)

    def test_chebyshev_fit(self):
        series = chebyshev_fit(np.cos, 1.5, 40)
        x = np.linspace(-1.5, 1.5, 11)
        np.testing.assert_allclose(series(x), np.cos(x), atol=1e-13)

    def test_chebyshev_fit_warns_when_unresolved(self):
        with self.assertLogs("xxzff.quadrature", "WARNING"):
            chebyshev_fit(lambda x: np.abs(x), 1.0, 16)


class TestExtrapolation(unittest.TestCase):
    def test_polynomial_is_exact(self):
        steps = [0.4, 0.2, 0.1]
        values = [1.0 + 2.0 * h - 3.0 * h * h for h in steps]
        self.assertAlmostEqual(extrapolate_to_zero(steps, values), 1.0, 13)

    def test_complex_values(self):
        steps = [0.3, 0.15]
        values = [(2.0 + 1.0j) + (0.5 - 2.0j) * h for h in steps]
        value = extrapolate_to_zero(steps, values)
        self.assertAlmostEqual(value, 2.0 + 1.0j, 13)

    def test_exponential(self):
        steps = [1e-2 * 2.0**-k for k in range(4)]
        value = extrapolate_to_zero(steps, [math.exp(h) for h in steps])
        self.assertAlmostEqual(value.real, 1.0, 10)

    def test_mismatch(self):
        with self.assertRaises(DomainError):
            extrapolate_to_zero([0.1, 0.2], [1.0])
