"""
xxzff.quadrature
~~~~~~~~~~~~~~~~

This module contains the Gauss-Legendre rules used by the Nystrom solvers
and by the contour integrals, and the Chebyshev representation of solved
functions on the Fermi zone.

"""

import logging
from functools import lru_cache
from typing import Callable, Sequence, Tuple

import numpy as np
from numpy.polynomial import Chebyshev
from numpy.polynomial.legendre import leggauss

from .errors import DomainError
from .models import QuadGrid

logger = logging.getLogger(__name__)

#: Relative size of the trailing Chebyshev coefficients accepted as resolved.
RESOLUTION_TOL = 1e-10

_MIN_NODES = 32


@lru_cache(maxsize=64)
def _reference_rule(n: int) -> Tuple[np.ndarray, np.ndarray]:
    nodes, weights = leggauss(n)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def gauss_legendre(n: int, lower: float, upper: float) -> Tuple[np.ndarray, np.ndarray]:
    """Return the ``n``-point Gauss-Legendre rule on ``[lower, upper]``."""
    if n < 1:
        raise DomainError(f"A quadrature rule needs at least one node, got {n}")
    nodes, weights = _reference_rule(n)
    half = 0.5 * (upper - lower)
    return lower + half * (nodes + 1.0), half * weights


def composite_rule(
    n: int, lower: float, upper: float, panels: int = 1
) -> Tuple[np.ndarray, np.ndarray]:
    """Return ``n`` Gauss-Legendre nodes on each of ``panels`` equal panels."""
    if panels < 1:
        raise DomainError(f"A composite rule needs at least one panel, got {panels}")
    if panels == 1:
        return gauss_legendre(n, lower, upper)
    breaks = np.linspace(lower, upper, panels + 1)
    parts = [gauss_legendre(n, a, b) for a, b in zip(breaks[:-1], breaks[1:])]
    return (
        np.concatenate([nodes for nodes, _ in parts]),
        np.concatenate([weights for _, weights in parts]),
    )


def fermi_grid(q: float, n: int) -> QuadGrid:
    """Build the Nystrom grid on ``[-q, q]``.

    :param q: Half-width of the Fermi zone, positive.
    :param n: Number of nodes, at least 32.
    :rtype: :py:class:`QuadGrid`
    """
    if q <= 0:
        raise DomainError(f"The Fermi zone needs q > 0, got {q}")
    if n < _MIN_NODES:
        raise DomainError(f"The Nystrom grid needs at least {_MIN_NODES} nodes")
    nodes, weights = gauss_legendre(n, -q, q)
    return QuadGrid({"n_nodes": n, "nodes": nodes, "weights": weights, "q": q})


def half_line_rule(
    n: int, scale: float, panels: int = 4, refine: int = 1
) -> Tuple[np.ndarray, np.ndarray]:
    """Rule for ``[0, inf)`` through the map ``rho = scale u / (1 - u)``.

    The unit interval is split into ``panels`` panels refined toward ``u = 1``,
    each of them cut again into ``refine`` equal pieces.
    Integrands must decay at least like ``rho^-2``.
    """
    breaks = [0.0] + [1.0 - 0.5**k for k in range(1, panels)] + [1.0]
    nodes, weights = [], []
    for lower, upper in zip(breaks[:-1], breaks[1:]):
        u, w = composite_rule(n, lower, upper, refine)
        nodes.append(scale * u / (1.0 - u))
        weights.append(w * scale / (1.0 - u) ** 2)
    return np.concatenate(nodes), np.concatenate(weights)


def chebyshev_fit(
    func: Callable[[np.ndarray], np.ndarray], q: float, degree: int
) -> Chebyshev:
    """Interpolate ``func`` on ``[-q, q]`` at Chebyshev points.

    A warning is logged when the trailing coefficients are not below
    :py:data:`RESOLUTION_TOL` relative to the largest one.
    """
    series = Chebyshev.interpolate(func, degree, domain=[-q, q])
    coefficients = np.abs(series.coef)
    scale = coefficients.max() if coefficients.size else 0.0
    tail = coefficients[-4:].max() if coefficients.size >= 4 else 0.0
    if scale > 0 and tail > RESOLUTION_TOL * scale:
        logger.warning(
            "Chebyshev tail %.3g exceeds %.1g of the leading coefficient",
            tail / scale,
            RESOLUTION_TOL,
        )
    return series


def extrapolate_to_zero(steps: Sequence[float], values: Sequence[complex]) -> complex:
    """Neville extrapolation of ``values[i] = f(steps[i])`` to ``f(0)``."""
    table = [complex(v) for v in values]
    n = len(steps)
    if n != len(table) or n == 0:
        raise DomainError("Extrapolation needs one value per step")
    for level in range(1, n):
        for i in range(n - level):
            hi, lo = steps[i], steps[i + level]
            table[i] = (-lo * table[i] + hi * table[i + 1]) / (hi - lo)
    return table[0]
