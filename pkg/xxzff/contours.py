"""
xxzff.contours
~~~~~~~~~~~~~~

This module contains the integration contours of the form factor series.

Hole rapidities run along ``[-q, q]``. Particle rapidities run from ``q`` to
``+inf``, back along ``R + i pi/2`` from ``+inf`` to ``-inf`` and from
``-inf`` to ``-q``, so that their momentum increases along the contour.
Close to the Fermi points both contours leave the real axis along quarter
circles of radius ``delta``, on the side where their oscillatory factor
decays. Bound states run along ``s_r R + i delta_r pi/2``.

"""

import cmath
import math
from typing import Iterable, List, Tuple

import numpy as np

from .errors import DomainError, RegimeError
from .models import FermiData, StringSpec
from .quadrature import composite_rule, half_line_rule

#: Panels of the rule along half-infinite rays.
RAY_PANELS = 4

#: Phase per Gauss node allowed within one panel.
PANEL_PHASE = 0.5

_WARPS = ("linear", "quadratic")


class Segment:
    """A straight segment from ``start`` to ``end``."""

    label: str

    def __init__(self, start: complex, end: complex, label: str = "") -> None:
        self.start = complex(start)
        self.end = complex(end)
        self.label = label

    def point(self, u) -> np.ndarray:
        return self.start + (self.end - self.start) * np.asarray(u)

    @property
    def length(self) -> float:
        return abs(self.end - self.start)

    def rule(self, n: int, panels: int = 1) -> Tuple[np.ndarray, np.ndarray]:
        u, w = composite_rule(n, 0.0, 1.0, panels)
        return self.point(u), w * (self.end - self.start)


class Ray:
    """The half-line ``origin + direction * rho`` for ``rho >= 0``.

    ``inward`` rays are traversed from infinity toward the origin.
    """

    label: str

    def __init__(
        self,
        origin: complex,
        direction: complex,
        inward: bool = False,
        scale: float = 1.0,
        label: str = "",
    ) -> None:
        self.origin = complex(origin)
        self.direction = complex(direction) / abs(direction)
        self.inward = inward
        self.scale = scale
        self.label = label

    @property
    def start(self) -> complex:
        return complex("inf") if self.inward else self.origin

    @property
    def end(self) -> complex:
        return self.origin if self.inward else complex("inf")

    def point(self, rho) -> np.ndarray:
        return self.origin + self.direction * np.asarray(rho)

    @property
    def length(self) -> float:
        """Length of the stretch carrying most of the oscillation."""
        return 2.0 * self.scale

    def rule(self, n: int, panels: int = 1) -> Tuple[np.ndarray, np.ndarray]:
        rho, w = half_line_rule(n, self.scale, RAY_PANELS, panels)
        sign = -1.0 if self.inward else 1.0
        return self.point(rho), sign * w * self.direction


class Arc:
    """A circular arc around ``center`` from angle ``begin`` to ``finish``.

    With the ``"quadratic"`` warp the angle is a quadratic function of the
    parameter. Both warps trace the same curve.
    """

    label: str

    def __init__(
        self,
        center: complex,
        radius: float,
        begin: float,
        finish: float,
        warp: str = "linear",
        label: str = "",
    ) -> None:
        if warp not in _WARPS:
            raise DomainError(f"Unknown arc warp {warp}")
        self.center = complex(center)
        self.radius = radius
        self.begin = begin
        self.finish = finish
        self.warp = warp
        self.label = label

    def _angle(self, u: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        span = self.finish - self.begin
        if self.warp == "quadratic":
            return self.begin + span * u**2, 2.0 * span * u
        return self.begin + span * u, np.full_like(u, span)

    def point(self, u) -> np.ndarray:
        angle, _ = self._angle(np.asarray(u, dtype=float))
        return self.center + self.radius * np.exp(1j * angle)

    @property
    def start(self) -> complex:
        return self.center + self.radius * cmath.exp(1j * self.begin)

    @property
    def end(self) -> complex:
        return self.center + self.radius * cmath.exp(1j * self.finish)

    @property
    def length(self) -> float:
        return self.radius * abs(self.finish - self.begin)

    def rule(self, n: int, panels: int = 1) -> Tuple[np.ndarray, np.ndarray]:
        u, w = composite_rule(n, 0.0, 1.0, panels)
        angle, speed = self._angle(u)
        points = self.center + self.radius * np.exp(1j * angle)
        return points, w * speed * 1j * (points - self.center)


class Contour:
    """An ordered chain of segments, rays and arcs.

    .. attribute:: kind

      ``"hole"``, ``"particle"`` or ``"string"``.

      :type: str

    .. attribute:: delta

      :type: float

    .. attribute:: velocity_regime

      ``"superluminal"``, ``"subluminal_positive"`` or
      ``"subluminal_negative"``; ``None`` for strings.

      :type: str | None

    .. attribute:: segments

      :type: list
    """

    def __init__(
        self,
        kind: str,
        delta: float,
        velocity_regime,
        segments: List,
        r: int = 1,
    ) -> None:
        self.kind = kind
        self.delta = delta
        self.velocity_regime = velocity_regime
        self.segments = segments
        self.r = r

    def rule(
        self, n: int, frequency: float = 0.0
    ) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Composite rule with ``n`` Gauss nodes per panel.

        :param frequency: Bound on the rate of change of the phase of the
          integrand along the contour. Every piece is cut into panels over
          which the phase turns by at most :py:data:`PANEL_PHASE` times ``n``.
        :return: ``(points, weights, labels)`` where the weights include the
          orientation and ``labels`` names the piece of every point.
        """
        points, weights, labels = [], [], []
        for piece in self.segments:
            panels = max(1, math.ceil(frequency * piece.length / (PANEL_PHASE * n)))
            x, w = piece.rule(n, panels)
            points.append(x)
            weights.append(w)
            labels.append(np.full(x.shape, piece.label, dtype=object))
        return np.concatenate(points), np.concatenate(weights), np.concatenate(labels)


def velocity_regime(v: float, v_F: float) -> str:
    if abs(v) > v_F:
        return "superluminal"
    return "subluminal_positive" if v >= 0 else "subluminal_negative"


def _sign(x: float) -> int:
    return 1 if x > 0 else -1


def detachment_sides(v: float, v_F: float, time_sign: int = 1) -> Tuple[int, int]:
    """Return the sides ``(at q, at -q)`` toward which particle arcs detach.

    The particle factor ``exp(i m p_1 - i t eps_1)`` grows like
    ``exp(-p_1'(q) y (m -+ v_F t))`` at ``+-q + i y``; hole arcs take the
    opposite sides. A static correlator uses ``v = +-inf``.

    :raises: :py:exc:`RegimeError` on the light cone ``v = +-v_F``.
    """
    if math.isnan(v) or abs(abs(v) - v_F) <= 1e-12 * v_F:
        raise RegimeError(f"The series is undefined on the light cone v = {v}")
    return _sign(time_sign * (v - v_F)), _sign(time_sign * (v + v_F))


def hole_contour(
    delta: float, fermi: FermiData, sides: Tuple[int, int], warp: str = "linear"
) -> Contour:
    q = fermi.q
    right, left = -sides[0], -sides[1]
    pieces = [
        Arc(-q, delta, left * math.pi / 2.0, 0.0, warp, label="arc-"),
        Segment(-q + delta, q - delta, label="bulk"),
        Arc(q, delta, math.pi, math.pi - right * math.pi / 2.0, warp, label="arc+"),
    ]
    return Contour("hole", delta, None, pieces)


def particle_contour(
    delta: float, fermi: FermiData, sides: Tuple[int, int], warp: str = "linear"
) -> Contour:
    q = fermi.q
    right, left = sides
    shift = 0.5j * math.pi
    pieces = [
        Arc(q, delta, right * math.pi / 2.0, 0.0, warp, label="arc+"),
        Ray(q + delta, 1.0, label="right"),
        Ray(shift, 1.0, inward=True, label="line"),
        Ray(shift, -1.0, label="line"),
        Ray(-q - delta, -1.0, inward=True, label="left"),
        Arc(-q, delta, math.pi, math.pi - left * math.pi / 2.0, warp, label="arc-"),
    ]
    return Contour("particle", delta, None, pieces)


def string_contour(spec: StringSpec) -> Contour:
    """The line ``s_r R + i delta_r pi/2`` of an allowed bound state."""
    if not spec.exists or spec.s_r not in (1, -1):
        raise DomainError(f"The {spec.r}-string has no oriented contour")
    center = 0.5j * math.pi * spec.delta_r
    pieces = [
        Ray(center, -spec.s_r, inward=True, label="string"),
        Ray(center, spec.s_r, label="string"),
    ]
    return Contour("string", 0.0, None, pieces, r=spec.r)


def build_contours(
    delta: float,
    v: float,
    fermi: FermiData,
    strings: Iterable[StringSpec] = (),
    time_sign: int = 1,
    warp: str = "linear",
) -> dict:
    """Build the hole, particle and bound-state contours.

    :param delta: Detachment radius, in ``(0, q/4)``.
    :param v: The ratio ``m / t``; ``+-inf`` for a static correlator.
    :param fermi: Fermi data of the ground state.
    :param strings: Classified bound states; only the existing ones are used.
    :param time_sign: Sign of ``t``, ``1`` when ``t = 0``.
    :return: Mapping from ``"hole"``, ``"particle"`` and ``r >= 2`` to
      :py:class:`Contour`.
    :raises: :py:exc:`RegimeError` when ``v = +-v_F``.
    """
    if not 0.0 < delta < fermi.q / 4.0:
        raise DomainError(f"delta = {delta} is not in (0, q/4) with q = {fermi.q}")
    sides = detachment_sides(v, fermi.v_F, time_sign)
    regime = velocity_regime(v, fermi.v_F)
    contours = {
        "hole": hole_contour(delta, fermi, sides, warp),
        "particle": particle_contour(delta, fermi, sides, warp),
    }
    for spec in strings:
        if spec.exists:
            contours[spec.r] = string_contour(spec)
    for contour in contours.values():
        contour.velocity_regime = regime
    return contours
