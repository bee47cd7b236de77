import math
import unittest

import numpy as np

from xxzff.errors import DomainError, PoleError
from xxzff.kernels import (
    bare_theta,
    bare_theta_r,
    hat_eta,
    kernel_K,
    kernel_K_deriv,
    kernel_Kr,
    theta,
    theta_r,
)


class TestKernel(unittest.TestCase):
    def test_value_at_origin(self):
        eta = 0.7
        self.assertAlmostEqual(
            complex(kernel_K(0.0, eta)).real, 1.0 / (math.pi * math.tan(eta)), 14
        )

    def test_even(self):
        lam = np.array([0.3, 1.1 + 0.2j, -2.5 + 0.4j])
        np.testing.assert_allclose(kernel_K(lam, 1.2), kernel_K(-lam, 1.2), rtol=1e-14)

    def test_free_fermion_vanishes(self):
        lam = np.linspace(-3.0, 3.0, 7)
        np.testing.assert_array_equal(kernel_K(lam, math.pi / 2.0), 0.0)

    def test_derivative(self):
        lam = np.array([-1.3, 0.2, 0.9 + 0.3j])
        step = 1e-6
        numeric = (kernel_K(lam + step, 0.7) - kernel_K(lam - step, 0.7)) / (2 * step)
        np.testing.assert_allclose(kernel_K_deriv(lam, 0.7), numeric, rtol=1e-7)

    def test_bound_state_sum(self):
        zeta, lam = 0.9, np.array([0.1, 0.8])
        expected = kernel_K(lam, 1.5 * zeta) + kernel_K(lam, 0.5 * zeta)
        np.testing.assert_allclose(kernel_Kr(lam, 2, zeta), expected, rtol=1e-14)

    def test_domain(self):
        for eta in (0.0, math.pi, -0.3, 4.0):
            with self.assertRaises(DomainError, msg=f"eta = {eta}"):
                kernel_K(0.1, eta)
        with self.assertRaises(DomainError):
            kernel_Kr(0.1, 1, 0.5)

    def test_hat_eta(self):
        self.assertAlmostEqual(hat_eta(4.0), 4.0 - math.pi, 15)
        self.assertAlmostEqual(hat_eta(-0.5), math.pi - 0.5, 15)


class TestTheta(unittest.TestCase):
    def test_zero_at_origin(self):
        self.assertEqual(complex(theta(0.0, 0.7)), 0j)

    def test_real_axis_derivative(self):
        x = np.array([-2.0, -0.4, 0.3, 1.7])
        step = 1e-5
        numeric = (theta(x + step, 0.7) - theta(x - step, 0.7)) / (2 * step)
        np.testing.assert_allclose(
            numeric, 2.0 * math.pi * kernel_K(x, 0.7), rtol=1e-8
        )

    def test_odd_on_real_axis(self):
        x = np.array([0.2, 1.0, 3.0])
        np.testing.assert_allclose(theta(-x, 1.1), -theta(x, 1.1), atol=1e-13)

    def test_closed_form_matches_quadrature(self):
        tests = [
            {"lam": 0.8, "eta": 0.7},
            {"lam": -1.3 + 0.4j, "eta": 0.7},
            {"lam": 0.5 + 2.0j, "eta": 0.7},
            {"lam": 1.2 - 0.9j, "eta": 2.1},
            {"lam": -0.6 + 1.57j, "eta": 1.3},
        ]
        for test in tests:
            closed = complex(theta(test["lam"], test["eta"]))
            reference = bare_theta(test["lam"], test["eta"])
            self.assertLess(abs(closed - reference), 1e-7, msg=str(test))

    def test_pole_ray(self):
        with self.assertRaises(PoleError):
            theta(1.0 + 0.7j, 0.7)
        with self.assertRaises(PoleError):
            bare_theta(-2.0 - 0.7j, 0.7)

    def test_bound_state_sum(self):
        lam, zeta = 0.4 + 0.1j, 0.8
        expected = theta(lam, 1.5 * zeta) + theta(lam, 0.5 * zeta)
        self.assertAlmostEqual(complex(theta_r(lam, 2, zeta)), complex(expected), 13)

    def test_bound_state_sum_by_quadrature(self):
        lam, zeta = 0.4 + 0.1j, 0.8
        closed = complex(theta_r(lam, 3, zeta))
        self.assertLess(abs(bare_theta_r(lam, 3, zeta) - closed), 1e-7)
        with self.assertRaises(DomainError):
            bare_theta_r(lam, 0, zeta)

    def test_free_fermion_vanishes(self):
        self.assertEqual(complex(theta(0.3 + 0.2j, math.pi / 2.0)), 0j)
        self.assertEqual(bare_theta(0.3 + 0.2j, math.pi / 2.0), 0j)
