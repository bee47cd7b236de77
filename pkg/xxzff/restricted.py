"""
xxzff.restricted
~~~~~~~~~~~~~~~~

This module contains the discrete densities of the massless modes, the
Barnes G function and the restricted summation identity.

The restricted sum over particle and hole labels is computed exactly over
the cutoff box by Cauchy-Binet: the squared Cauchy-Vandermonde determinant
in the density turns the sum over all label sets into a single
determinant. Explicit enumeration of the label sets is kept for small
cutoffs.

"""

import cmath
import itertools
import logging
import math
from typing import Tuple

import numpy as np
from scipy import special

from .errors import DomainError, RegimeError
from .dressed import DressedState
from .excitations import critical_exponents
from .models import (
    DiscreteZ,
    ExcitationY,
    LeadingCheck,
    RestrictedSumConfig,
    RestrictedSumValue,
)

logger = logging.getLogger(__name__)

#: Relative size of the tail correction above which a cutoff is too small.
TAIL_TOL = 1e-3

#: Largest cutoff accepted by the explicit enumeration.
ENUMERATION_MAX_CUT = 8

# zeta'(-1)
_ZETA_PRIME = -0.16542114370045092
_ASYMPTOTIC_FROM = 20.0

# B_4, B_6, ..., B_14
_BERNOULLI = (
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
)


def _log_G_shifted(w: float) -> float:
    """Asymptotic ``log G(1 + w)`` for large ``w``."""
    value = (0.5 * w * w - 1.0 / 12.0) * math.log(w) - 0.75 * w * w
    value += 0.5 * w * math.log(2.0 * math.pi) + _ZETA_PRIME
    for k, bernoulli in enumerate(_BERNOULLI, start=1):
        value += bernoulli / (4.0 * k * (k + 1) * w ** (2 * k))
    return value


def log_barnes_G(z: float) -> Tuple[float, float, int]:
    """Return ``(log|G(z)|, sign, zero_order)`` for real ``z``.

    At the non-positive integers ``G`` has a zero of order ``1 - z``; the
    result is then ``(-inf, 0.0, 1 - z)``.

    :raises: :py:exc:`DomainError` when ``z`` is not finite.
    """
    z = float(z)
    if not math.isfinite(z):
        raise DomainError(f"Barnes G needs a finite argument, got {z}")
    if z <= 0 and z == math.floor(z):
        return -math.inf, 0.0, int(1 - z)
    steps = max(0, math.ceil(_ASYMPTOTIC_FROM + 1.0 - z))
    value = _log_G_shifted(z + steps - 1.0)
    sign = 1.0
    for k in range(steps):
        value -= special.gammaln(z + k)
        sign *= special.gammasgn(z + k)
    return float(value), float(sign), 0


def barnes_G(z: float) -> float:
    """Barnes G function of a real argument, from ``G(z+1) = Gamma(z) G(z)``
    seeded by its asymptotic expansion."""
    log_value, sign, order = log_barnes_G(z)
    if order:
        return 0.0
    return sign * math.exp(log_value)


def _log_G_ratio(nu: float, ell: int) -> Tuple[float, float, int]:
    """``log|G^2(1 + nu - ell) / G^2(1 + nu)|`` with the net zero order."""
    top, _, top_order = log_barnes_G(1.0 + nu - ell)
    bottom, _, bottom_order = log_barnes_G(1.0 + nu)
    if bottom_order:
        raise DomainError(f"G(1 + nu) vanishes for nu = {nu}")
    if top_order:
        return -math.inf, 0.0, 2 * top_order
    return 2.0 * (top - bottom), 1.0, 0


def _check_labels(values: Tuple[int, ...], kind: str) -> None:
    if any(v < 0 for v in values) or len(set(values)) != len(values):
        raise DomainError(f"{kind} labels must be distinct non-negative integers")


def log_R_density(Z: DiscreteZ, nu: float) -> float:
    """Logarithm of :py:func:`R_density`; ``-inf`` when it vanishes."""
    _check_labels(Z.particles, "Particle")
    _check_labels(Z.holes, "Hole")
    p = np.asarray(Z.particles, dtype=float)
    h = np.asarray(Z.holes, dtype=float)
    if h.size:
        amplitude = abs(math.sin(math.pi * nu)) / math.pi
        if amplitude == 0.0:
            return -math.inf
        value = 2.0 * h.size * math.log(amplitude)
    else:
        value = 0.0
    for labels in (p, h):
        if labels.size > 1:
            gaps = labels[:, None] - labels[None, :]
            upper = gaps[np.triu_indices(labels.size, 1)]
            value += 2.0 * np.sum(np.log(np.abs(upper)))
    if p.size and h.size:
        value -= 2.0 * np.sum(np.log(h[:, None] + p[None, :] + 1.0))
    value += 2.0 * np.sum(special.gammaln(1.0 + p + nu) - special.gammaln(1.0 + p))
    value += 2.0 * np.sum(special.gammaln(1.0 + h - nu) - special.gammaln(1.0 + h))
    return float(value)


def R_density(Z: DiscreteZ, nu: float) -> float:
    """Return the discrete density ``R(Z|nu)``.

    ``(sin(pi nu)/pi)^(2 n_h)`` times the squared Vandermonde determinants of
    the labels over ``prod (h_a + p_b + 1)^2``, times
    ``prod Gamma^2(1 + p + nu)/Gamma^2(1 + p)`` and
    ``prod Gamma^2(1 + h - nu)/Gamma^2(1 + h)``. Accumulated in log space.
    """
    return math.exp(log_R_density(Z, nu))


def _weights(labels: np.ndarray, nu: float, z: complex, hole: bool) -> np.ndarray:
    if hole:
        amplitude = (math.sin(math.pi * nu) / math.pi) ** 2
        return amplitude * special.poch(1.0 + labels, -nu) ** 2 * z ** (labels + 1)
    return special.poch(1.0 + labels, nu) ** 2 * z**labels


def _box_sum(nu: float, ell: int, z: complex, p_cut: int, h_cut: int) -> complex:
    """Sum of ``z^J(Z) R(Z|nu)`` over all label sets in the box with
    ``n_p - n_h = ell``."""
    particles = np.arange(p_cut + 1, dtype=float)
    holes = np.arange(h_cut + 1, dtype=float)
    w_p = _weights(particles, nu, z, hole=False)
    w_h = _weights(holes, nu, z, hole=True)
    if ell >= 0:
        free, free_w, bound, bound_w = holes, w_h, particles, w_p
    else:
        free, free_w, bound, bound_w = particles, w_p, holes, w_h
    extra = abs(ell)
    cauchy = 1.0 / (free[:, None] + bound[None, :] + 1.0)
    powers = np.array([bound**j for j in range(extra)]).reshape(extra, bound.size)
    rows = np.vstack([cauchy, powers]).astype(complex)
    gram = (rows * bound_w[None, :]) @ rows.T
    n_free = free.size
    scale = np.concatenate([free_w, np.ones(extra, dtype=complex)])
    diagonal = np.concatenate([np.ones(n_free), np.zeros(extra)])
    return complex(np.linalg.det(np.diag(diagonal) + scale[:, None] * gram))


def _enumerated_sum(
    nu: float, ell: int, z: complex, p_cut: int, h_cut: int
) -> complex:
    if max(p_cut, h_cut) > ENUMERATION_MAX_CUT:
        raise DomainError(
            f"Explicit enumeration is limited to cutoffs <= {ENUMERATION_MAX_CUT}"
        )
    total = 0j
    for n_h in range(h_cut + 2):
        n_p = n_h + ell
        if n_p < 0 or n_p > p_cut + 1:
            continue
        for holes in itertools.combinations(range(h_cut + 1), n_h):
            for particles in itertools.combinations(range(p_cut + 1), n_p):
                Z = DiscreteZ({"particles": particles, "holes": holes})
                log_value = log_R_density(Z, nu)
                if log_value == -math.inf:
                    continue
                total += z**Z.total * math.exp(log_value)
    return total


def _normalization(cfg: RestrictedSumConfig) -> complex:
    log_ratio, _, order = _log_G_ratio(cfg.nu, cfg.ell)
    if order:
        return 0j
    # J is counted from the configuration with the fewest quanta
    offset = cfg.ell * (cfg.ell - 1) // 2
    log_scale = cfg.nu**2 * math.log(2.0 * math.pi / cfg.L)
    return cmath.exp(log_ratio + log_scale - 1j * cfg.phase * offset)


def restricted_sum_lhs(
    cfg: RestrictedSumConfig, method: str = "determinant"
) -> complex:
    """Return the truncated left-hand side of the summation identity.

    The sum runs over all label sets with ``p_a <= p_cut``, ``h_a <= h_cut``
    and ``n_p - n_h = ell``, with ``J(Z)`` counted from the label set of
    lowest ``J``.

    :param method: ``"determinant"`` or ``"enumerate"``.
    """
    z = cmath.exp(1j * cfg.phase)
    nu = cfg.nu - cfg.ell
    if method == "determinant":
        raw = _box_sum(nu, cfg.ell, z, cfg.p_cut, cfg.h_cut)
    elif method == "enumerate":
        raw = _enumerated_sum(nu, cfg.ell, z, cfg.p_cut, cfg.h_cut)
    else:
        raise DomainError(f"Unknown summation method {method}")
    return _normalization(cfg) * raw


def restricted_sum_rhs(cfg: RestrictedSumConfig) -> complex:
    """Return ``((2 pi / L) / (1 - exp(i x / L)))^(nu^2)``, principal branch.

    :raises: :py:exc:`RegimeError` when ``x / L`` is a multiple of ``2 pi``.
    """
    turns = cfg.phase / (2.0 * math.pi)
    if abs(turns - round(turns)) < 1e-14:
        raise RegimeError(f"The restricted sum diverges at x/L = {cfg.phase}")
    base = (2.0 * math.pi / cfg.L) / (1.0 - cmath.exp(1j * cfg.phase))
    return cmath.exp(cfg.nu**2 * cmath.log(base))


def restricted_sum(cfg: RestrictedSumConfig) -> RestrictedSumValue:
    """Compare both sides of the identity.

    The raw sum is corrected for its oscillatory tail with
    ``(S_{N+1} - z S_N) / (1 - z)``, ``S_N`` being the sum with both cutoffs
    raised by ``N``; a warning is logged when the correction exceeds
    :py:data:`TAIL_TOL`.
    """
    rhs = restricted_sum_rhs(cfg)
    lhs = restricted_sum_lhs(cfg)
    wider = restricted_sum_lhs(
        cfg._replace(p_cut=cfg.p_cut + 1, h_cut=cfg.h_cut + 1)
    )
    z = cmath.exp(1j * cfg.phase)
    accelerated = (wider - z * lhs) / (1.0 - z)
    tail = abs(accelerated - lhs) / max(abs(accelerated), 1e-300)
    if tail > TAIL_TOL:
        logger.warning(
            "Cutoff %d leaves a tail of %.2g relative to the restricted sum",
            max(cfg.p_cut, cfg.h_cut),
            tail,
        )
    return RestrictedSumValue(
        {
            "lhs": lhs,
            "accelerated": accelerated,
            "rhs": rhs,
            "relative_error": abs(accelerated - rhs) / abs(rhs),
            "cut": max(cfg.p_cut, cfg.h_cut),
        }
    )


def _real_exponent(value: complex) -> float:
    if abs(value.imag) > 1e-10 * max(1.0, abs(value)):
        raise DomainError(
            f"The discrete form factor needs a real exponent, got {value}"
        )
    return value.real


def discrete_ff_leading(
    Y: ExcitationY,
    ell: int,
    upsilon: int,
    Z: DiscreteZ,
    L: float,
    dressed: DressedState,
) -> float:
    """Leading discrete form factor of the massless modes at ``upsilon q``.

    ``G^2(1 - ups theta - ell)/G^2(1 - ups theta) R(Z|-ups theta - ell)
    (2 pi / L)^(theta^2)`` with ``theta = theta_ups(Y)``.
    """
    if upsilon not in (1, -1):
        raise DomainError(f"upsilon must be +1 or -1, got {upsilon}")
    if L <= 0:
        raise DomainError(f"L must be positive, got {L}")
    theta = _real_exponent(critical_exponents(Y, dressed).theta(upsilon))
    nu = -upsilon * theta
    log_ratio, _, order = _log_G_ratio(nu, ell)
    if order:
        return 0.0
    log_value = log_ratio + log_R_density(Z, nu - ell)
    return math.exp(log_value + theta**2 * math.log(2.0 * math.pi / L))


def B_leading_check(
    m_ups: float, delta: float, theta_ups: float, L: float = 800.0
) -> LeadingCheck:
    """Rebuild ``(-i m_ups)^(-theta^2)`` from the restricted sum.

    The label sets are cut at ``delta L``, the modes within ``delta`` of the
    Fermi point, and summed at the phase ``2 pi m_ups / L``. At finite ``L``
    the phase differs from the closed form by ``pi theta^2 m_ups / L``, the
    phase of ``1 - exp(2 pi i m_ups / L)``; ``finite_size_phase_error`` is
    measured against that finite-size value instead.
    """
    if m_ups == 0:
        raise DomainError("m_ups must be non-zero")
    if delta * abs(m_ups) < 1.0:
        logger.warning(
            "delta |m| = %.3g < 1: the massive channels are not suppressed",
            delta * abs(m_ups),
        )
    cut = max(1, int(round(delta * L)))
    cfg = RestrictedSumConfig(
        {
            "nu": theta_ups,
            "ell": 0,
            "L": L,
            "x": 2.0 * math.pi * m_ups,
            "p_cut": cut,
            "h_cut": cut,
        }
    )
    result = restricted_sum(cfg)
    numeric = result.accelerated
    closed_form = cmath.exp(-(theta_ups**2) * cmath.log(-1j * m_ups))
    return LeadingCheck(
        {
            "numeric": numeric,
            "closed_form": closed_form,
            "ratio": abs(numeric / closed_form),
            "phase_error": abs(cmath.phase(numeric / closed_form)),
            "finite_size": result.rhs,
            "finite_size_phase_error": abs(cmath.phase(numeric / result.rhs)),
        }
    )
