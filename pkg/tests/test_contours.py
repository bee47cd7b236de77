import math
import unittest

import numpy as np

from xxzff.contours import (
    Arc,
    Ray,
    Segment,
    build_contours,
    detachment_sides,
    hole_contour,
    particle_contour,
    string_contour,
    velocity_regime,
)
from xxzff.errors import DomainError, RegimeError
from xxzff.models import FermiData, StringSpec

FERMI = FermiData({"q": 1.0, "p_F": 1.0, "v_F": 2.0})


def integrate(rule, func):
    points, weights = rule[0], rule[1]
    return complex(np.sum(weights * func(points)))


class TestPieces(unittest.TestCase):
    def test_segment(self):
        piece = Segment(-1.0 + 0.5j, 2.0)
        self.assertAlmostEqual(
            integrate(piece.rule(4), np.ones_like), piece.end - piece.start, 14
        )

    def test_arc(self):
        for warp in ("linear", "quadratic"):
            piece = Arc(1.0, 0.2, math.pi, math.pi / 2.0, warp)
            self.assertAlmostEqual(piece.start, 0.8, 14)
            self.assertAlmostEqual(piece.end, 1.0 + 0.2j, 14)
            value = integrate(piece.rule(24), lambda z: z)
            expected = (piece.end**2 - piece.start**2) / 2.0
            self.assertAlmostEqual(value, expected, 12, msg=warp)

    def test_unknown_warp(self):
        with self.assertRaises(DomainError):
            Arc(0.0, 1.0, 0.0, 1.0, "cubic")

    def test_ray_orientation(self):
        def func(z):
            return 1.0 / (1.0 + z) ** 2

        outward = Ray(0.0, 1.0)
        inward = Ray(0.0, 1.0, inward=True)
        self.assertAlmostEqual(integrate(outward.rule(8), func), 1.0, 12)
        self.assertAlmostEqual(integrate(inward.rule(8), func), -1.0, 12)
        self.assertEqual(inward.end, 0j)


class TestSides(unittest.TestCase):
    def test_static(self):
        self.assertEqual(detachment_sides(math.inf, 2.0), (1, 1))
        self.assertEqual(detachment_sides(-math.inf, 2.0), (-1, -1))

    def test_subluminal(self):
        self.assertEqual(detachment_sides(0.5, 2.0), (-1, 1))
        self.assertEqual(detachment_sides(0.5, 2.0, time_sign=-1), (1, -1))

    def test_light_cone(self):
        for v in (2.0, -2.0, math.nan):
            with self.assertRaises(RegimeError):
                detachment_sides(v, 2.0)

    def test_regime(self):
        self.assertEqual(velocity_regime(3.0, 2.0), "superluminal")
        self.assertEqual(velocity_regime(0.0, 2.0), "subluminal_positive")
        self.assertEqual(velocity_regime(-1.0, 2.0), "subluminal_negative")


class TestContours(unittest.TestCase):
    def assertChained(self, contour):
        pieces = contour.segments
        for before, after in zip(pieces[:-1], pieces[1:]):
            if math.isinf(abs(before.end)):
                continue
            self.assertAlmostEqual(before.end, after.start, 14)

    def test_static_holes_detach_below(self):
        contour = hole_contour(0.1, FERMI, (1, 1))
        self.assertChained(contour)
        self.assertAlmostEqual(contour.segments[0].start, -1.0 - 0.1j, 14)
        self.assertAlmostEqual(contour.segments[-1].end, 1.0 - 0.1j, 14)
        self.assertAlmostEqual(integrate(contour.rule(16), np.ones_like), 2.0, 12)

    def test_oscillating_integrand_gets_panels(self):
        contour = hole_contour(0.1, FERMI, (1, 1))
        plain = contour.rule(16)
        refined = contour.rule(16, frequency=80.0)
        self.assertGreater(refined[0].size, plain[0].size)

        def wave(z):
            return np.exp(40.0j * z)

        # the hole contour ends at -q - i delta and q - i delta
        start, end = -1.0 - 0.1j, 1.0 - 0.1j
        expected = (wave(end) - wave(start)) / 40.0j
        self.assertAlmostEqual(integrate(refined, wave), expected, 9)

    def test_particles(self):
        contour = particle_contour(0.1, FERMI, (-1, 1))
        self.assertChained(contour)
        self.assertAlmostEqual(contour.segments[0].start, 1.0 - 0.1j, 14)
        self.assertAlmostEqual(contour.segments[-1].end, -1.0 + 0.1j, 14)
        points, _, labels = contour.rule(8)
        on_line = points[labels == "line"]
        np.testing.assert_allclose(on_line.imag, math.pi / 2.0, atol=1e-14)

    def test_string(self):
        spec = StringSpec(
            {"r": 2, "exists": True, "status": "allowed", "delta_r": 1, "s_r": -1}
        )
        contour = string_contour(spec)
        points, weights, _ = contour.rule(8)
        np.testing.assert_allclose(points.imag, math.pi / 2.0, atol=1e-14)
        self.assertTrue(np.all(weights.real < 0.0))
        with self.assertRaises(DomainError):
            string_contour(StringSpec({"r": 3}))

    def test_build(self):
        allowed = StringSpec(
            {"r": 2, "exists": True, "status": "allowed", "delta_r": 0, "s_r": 1}
        )
        contours = build_contours(
            0.1, 0.5, FERMI, [allowed, StringSpec({"r": 3})]
        )
        self.assertEqual(sorted(map(str, contours)), ["2", "hole", "particle"])
        self.assertTrue(
            all(c.velocity_regime == "subluminal_positive" for c in contours.values())
        )

    def test_detachment_radius(self):
        for delta in (0.0, 0.25, 0.3):
            with self.assertRaises(DomainError):
                build_contours(delta, math.inf, FERMI)
