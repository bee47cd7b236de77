"""
xxzff.kernels
~~~~~~~~~~~~~

This module contains the kernel :math:`K(\\lambda|\\eta)`, its bound-state
sums :math:`K_r` and the bare phases :math:`\\theta` and :math:`\\theta_r`.

Two evaluators of the bare phase are provided. :py:func:`theta` is a
vectorized closed form built from principal logarithms of ``sinh`` with the
pole crossings of the vertical leg added explicitly. :py:func:`bare_theta`
integrates the kernel along the two-segment path by adaptive quadrature and
serves as the reference.

"""

import cmath
import logging
import math
import warnings
from typing import Union

import numpy as np
from scipy import integrate

from .errors import ConvergenceError, DomainError, PoleError

logger = logging.getLogger(__name__)

ArrayLike = Union[complex, float, np.ndarray]

#: Offset used to pass the poles of the kernel on their left.
AVOID_OFFSET = 1e-8

#: Poles closer than this to the quadrature path trigger extrapolation.
NEAR_POLE = 1e-3

_POLE_TOL = 1e-12
_FLAT_TOL = 1e-14
_QUAD_EPSABS = 1e-12
_QUAD_EPSREL = 1e-10
_QUAD_LIMIT = 200
_QUAD_FAIL = 1e-7
_LN2 = math.log(2.0)


def hat_eta(eta: float) -> float:
    """Return ``eta`` reduced into ``[0, pi)``."""
    return eta - math.pi * math.floor(eta / math.pi)


def _reduce(eta: float) -> float:
    reduced = hat_eta(eta)
    if reduced < _FLAT_TOL or math.pi - reduced < _FLAT_TOL:
        raise PoleError(
            f"The kernel degenerates for eta = {eta} (eta is a multiple of pi)"
        )
    return reduced


def _is_flat(eta: float) -> bool:
    return abs(math.sin(2.0 * eta)) < _FLAT_TOL


def _check_eta(eta: float) -> None:
    if not 0.0 < eta < math.pi:
        raise DomainError(f"eta must lie in (0, pi), got {eta}")


def _denominator(lam: np.ndarray, eta: float) -> np.ndarray:
    # sinh(l + i eta) sinh(l - i eta) = sinh(l)^2 + sin(eta)^2
    den = np.sinh(lam) ** 2 + math.sin(eta) ** 2
    if np.any(np.abs(den) < _POLE_TOL):
        raise PoleError(f"Kernel pole hit for eta = {eta}")
    return den


def _kernel(lam: ArrayLike, eta: float) -> np.ndarray:
    eta = _reduce(eta)
    lam = np.asarray(lam, dtype=complex)
    if _is_flat(eta):
        return np.zeros_like(lam)
    return math.sin(2.0 * eta) / (2.0 * math.pi * _denominator(lam, eta))


def _kernel_deriv(lam: ArrayLike, eta: float) -> np.ndarray:
    eta = _reduce(eta)
    lam = np.asarray(lam, dtype=complex)
    if _is_flat(eta):
        return np.zeros_like(lam)
    den = _denominator(lam, eta)
    return -math.sin(2.0 * eta) * np.sinh(2.0 * lam) / (2.0 * math.pi * den**2)


def _bound_etas(r: int, zeta: float):
    if r == 1:
        return (zeta,)
    return (zeta * (r + 1) / 2.0, zeta * (r - 1) / 2.0)


def kernel_K(lam: ArrayLike, eta: float) -> np.ndarray:
    """Evaluate :math:`K(\\lambda|\\eta)`.

    :param lam: Rapidity or array of rapidities, possibly complex.
    :type lam: complex or numpy.ndarray
    :param eta: Angle in ``(0, pi)``.
    :type eta: float
    :return: :math:`\\sin 2\\eta / (2\\pi \\sinh(\\lambda+i\\eta)
      \\sinh(\\lambda-i\\eta))`, with the shape of ``lam``.
    :rtype: numpy.ndarray
    :raises: :py:exc:`DomainError` for ``eta`` outside ``(0, pi)``,
      :py:exc:`PoleError` when ``lam`` sits on a pole.
    """
    _check_eta(eta)
    return _kernel(lam, eta)


def kernel_K_deriv(lam: ArrayLike, eta: float) -> np.ndarray:
    """Evaluate the rapidity derivative of :math:`K(\\lambda|\\eta)`."""
    _check_eta(eta)
    return _kernel_deriv(lam, eta)


def kernel_Kr(lam: ArrayLike, r: int, zeta: float) -> np.ndarray:
    """Evaluate the bound-state kernel
    :math:`K_r = K(\\cdot|\\zeta(r+1)/2) + K(\\cdot|\\zeta(r-1)/2)`.

    Both angles are reduced modulo :math:`\\pi` before evaluation.

    :param lam: Rapidity or array of rapidities.
    :param r: String length, at least 2.
    :param zeta: Anisotropy angle in ``(0, pi)``.
    :rtype: numpy.ndarray
    """
    if r < 2:
        raise DomainError(f"kernel_Kr needs r >= 2, got {r}")
    _check_eta(zeta)
    return kernel_r(lam, r, zeta)


def kernel_r(lam: ArrayLike, r: int, zeta: float) -> np.ndarray:
    """Bound-state kernel with the convention :math:`K_1 = K(\\cdot|\\zeta)`."""
    return sum(_kernel(lam, eta) for eta in _bound_etas(r, zeta))


def kernel_r_deriv(lam: ArrayLike, r: int, zeta: float) -> np.ndarray:
    return sum(_kernel_deriv(lam, eta) for eta in _bound_etas(r, zeta))


def _log_sinh(w: np.ndarray) -> np.ndarray:
    """Principal logarithm of ``sinh(w)`` that does not overflow."""
    sign = np.where(w.real < 0.0, -1.0, 1.0)
    u = sign * w
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        large = u - _LN2 + np.log1p(-np.exp(-2.0 * u))
        large = large + np.where(sign < 0.0, 1j * math.pi, 0.0)
        turns = np.ceil((large.imag - math.pi) / (2.0 * math.pi))
        imag = large.imag - 2.0 * math.pi * turns
        large = large.real + 1j * imag
        small = np.log(np.sinh(np.where(np.abs(u) < 0.5, w, 0.25)))
    return np.where(np.abs(u) < 0.5, small, large)


def _count_shifted(lo: np.ndarray, hi: np.ndarray, center: float) -> np.ndarray:
    """Count the integers k with ``center + pi k`` strictly inside ``(lo, hi)``."""
    kmin = np.floor((lo - center) / math.pi) + 1
    kmax = np.ceil((hi - center) / math.pi) - 1
    return np.maximum(0.0, kmax - kmin + 1)


def _check_pole_rays(y: np.ndarray, eta: float) -> None:
    for center in (eta, -eta):
        offset = (y - center) / math.pi
        if np.any(np.abs(offset - np.round(offset)) * math.pi < _POLE_TOL):
            raise PoleError(
                f"Rapidity lies on a pole ray of the kernel with eta = {eta}"
            )


def theta(lam: ArrayLike, eta: float) -> np.ndarray:
    """Closed-form bare phase :math:`\\theta(\\lambda|\\eta)`.

    The phase is :math:`2\\pi` times the integral of the kernel along
    ``[0, i Im lam]`` followed by ``[i Im lam, lam]``, with the poles met on
    the vertical leg passed on their left.

    :param lam: Rapidity or array of rapidities.
    :param eta: Any real angle; it is reduced modulo :math:`\\pi`.
    :rtype: numpy.ndarray
    :raises: :py:exc:`PoleError` when ``Im lam`` is congruent to
      :math:`\\pm\\eta` modulo :math:`\\pi`.
    """
    eta = _reduce(eta)
    lam = np.asarray(lam, dtype=complex)
    if _is_flat(eta):
        return np.zeros_like(lam)
    y = lam.imag
    _check_pole_rays(y, eta)

    lo = np.minimum(0.0, y)
    hi = np.maximum(0.0, y)
    crossings = _count_shifted(lo, hi, -eta) - _count_shifted(lo, hi, eta)
    with np.errstate(divide="ignore"):
        modulus = np.log(np.abs(np.sin(y - eta) / np.sin(y + eta)))
    vertical = -1j * modulus + math.pi * np.sign(y) * crossings

    start_minus = _log_sinh(1j * (y - eta))
    start_plus = _log_sinh(1j * (y + eta))
    horizontal = -1j * (
        (_log_sinh(lam - 1j * eta) - start_minus)
        - (_log_sinh(lam + 1j * eta) - start_plus)
    )
    horizontal = np.where(lam.real == 0.0, 0.0, horizontal)
    return vertical + horizontal


def theta_r(lam: ArrayLike, r: int, zeta: float) -> np.ndarray:
    """Closed-form bound-state bare phase :math:`\\theta_r`."""
    if r < 1:
        raise DomainError(f"r must be positive, got {r}")
    return sum(theta(lam, eta) for eta in _bound_etas(r, zeta))


def _quad(func, lower: float, upper: float) -> float:
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", integrate.IntegrationWarning)
        value, error = integrate.quad(
            func,
            lower,
            upper,
            epsabs=_QUAD_EPSABS,
            epsrel=_QUAD_EPSREL,
            limit=_QUAD_LIMIT,
        )
    if caught:
        logger.debug("quad warning on [%g, %g]: %s", lower, upper, caught[-1].message)
        if error > _QUAD_FAIL:
            raise ConvergenceError(
                "Adaptive quadrature of the bare phase did not converge",
                residual=error,
                tolerance=_QUAD_FAIL,
            )
    return value


def _complex_quad(func, lower: float, upper: float) -> complex:
    real = _quad(lambda t: func(t).real, lower, upper)
    imag = _quad(lambda t: func(t).imag, lower, upper)
    return real + 1j * imag


def _vertical_poles(y: float, eta: float):
    """Yield ``(t0, residue)`` for the poles of ``2 pi K`` near ``[0, i y]``."""
    lo, hi = min(0.0, y) - 1.0, max(0.0, y) + 1.0
    for center, residue in ((eta, -1j), (-eta, 1j)):
        kmin = math.ceil((lo - center) / math.pi)
        kmax = math.floor((hi - center) / math.pi)
        for k in range(kmin, kmax + 1):
            yield center + math.pi * k, residue


def _theta_quad(lam: complex, eta: float, offset: float) -> complex:
    x, y = lam.real, lam.imag
    sin2 = math.sin(2.0 * eta)
    sin_sq = math.sin(eta) ** 2

    def density(mu: complex) -> complex:
        return sin2 / (cmath.sinh(mu) ** 2 + sin_sq)

    total = 0j
    if y != 0.0:
        poles = list(_vertical_poles(y, eta))

        def vertical(t: float) -> complex:
            mu = complex(-offset, t)
            value = 1j * density(mu)
            for t0, residue in poles:
                value -= residue * 1j / complex(-offset, t - t0)
            return value

        total += _complex_quad(vertical, 0.0, y)
        for t0, residue in poles:
            end = -complex(-offset, y - t0)
            start = -complex(-offset, -t0)
            total += residue * (cmath.log(end) - cmath.log(start))
    if x != 0.0:
        total += _complex_quad(
            lambda s: density(complex(s - offset, y)), 0.0, x
        )
    return complex(total)


def bare_theta(lam: complex, eta: float) -> complex:
    """Bare phase :math:`\\theta(\\lambda|\\eta)` by adaptive quadrature.

    The integration variable is shifted by ``-AVOID_OFFSET`` so that the
    poles on the vertical leg are passed on their left. Their singular parts
    are subtracted and integrated in closed form. When a pole lies within
    ``NEAR_POLE`` of the vertical leg, the offset is Richardson-extrapolated
    to zero.

    :param lam: Complex rapidity.
    :type lam: complex
    :param eta: Real angle, reduced modulo :math:`\\pi`.
    :type eta: float
    :return: The bare phase.
    :rtype: complex
    :raises: :py:exc:`PoleError` on a pole ray,
      :py:exc:`ConvergenceError` when quadrature fails.
    """
    eta = _reduce(eta)
    lam = complex(lam)
    if _is_flat(eta):
        return 0j
    _check_pole_rays(np.asarray(lam.imag), eta)
    if lam == 0:
        return 0j
    y = lam.imag
    lo, hi = min(0.0, y), max(0.0, y)
    near = any(
        lo - NEAR_POLE <= t0 <= hi + NEAR_POLE for t0, _ in _vertical_poles(y, eta)
    ) and y != 0.0
    value = _theta_quad(lam, eta, AVOID_OFFSET)
    if near:
        value = 2.0 * value - _theta_quad(lam, eta, 2.0 * AVOID_OFFSET)
    return value


def bare_theta_r(lam: complex, r: int, zeta: float) -> complex:
    """Bound-state bare phase :math:`\\theta_r` by adaptive quadrature."""
    if r < 1:
        raise DomainError(f"r must be positive, got {r}")
    return sum(bare_theta(lam, eta) for eta in _bound_etas(r, zeta))
