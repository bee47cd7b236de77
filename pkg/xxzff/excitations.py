"""
xxzff.excitations
~~~~~~~~~~~~~~~~~

This module contains the functionals of a massive excitation descriptor:
its energy and momentum, the reduced combination ``U``, the shift
exponent, the critical exponents and the singular D-factor, together with
the companion descriptors used on the jump rays of the form factor density.

"""

import cmath
import logging
import math
from typing import Dict, Sequence

import numpy as np

from .dressed import DressedState, cut_height
from .errors import DomainError, SingularityError
from .models import ExcitationY, Exponents

logger = logging.getLogger(__name__)

#: Distance below which rapidities are considered coincident.
COINCIDENCE = 1e-14

#: Offset used to place a rapidity on either side of a jump ray.
SIDE_OFFSET = 1e-9

_ON_CUT = 1e-6


def _rapidities(values: Sequence[complex]) -> np.ndarray:
    return np.asarray(values, dtype=complex)


def excitation_energy(Y: ExcitationY, dressed: DressedState) -> complex:
    """Return ``sum_r sum_a eps_r(nu_a^(r)) - sum_a eps_1(mu_a)``."""
    total = 0j
    for r, values in Y.strings:
        total += complex(np.sum(dressed.epsilon(r)(_rapidities(values))))
    total -= complex(np.sum(dressed.eps1(_rapidities(Y.holes))))
    return total


def excitation_momentum(
    Y: ExcitationY, dressed: DressedState, umklapp: bool = False
) -> complex:
    """Return the massive momentum, plus ``sum_ups ups l_ups p_F`` when
    ``umklapp`` is set."""
    total = 0j
    for r, values in Y.strings:
        total += complex(np.sum(dressed.momentum(r)(_rapidities(values))))
    total -= complex(np.sum(dressed.p1(_rapidities(Y.holes))))
    if umklapp:
        total += (Y.umklapp[0] - Y.umklapp[1]) * dressed.fermi.p_F
    return total


def u_r(r: int, lam, v: float, dressed: DressedState) -> np.ndarray:
    """Return ``p_r(lam) - eps_r(lam) / v``."""
    if v == 0:
        raise DomainError("u_r needs a non-zero velocity")
    lam = _rapidities(lam)
    return dressed.momentum(r)(lam) - dressed.epsilon(r)(lam) / v


def reduced_U(Y: ExcitationY, v: float, dressed: DressedState) -> complex:
    """Return the reduced combination ``P - E / v`` of ``Y`` at velocity ``v``,
    Umklapp term included.

    :raises: :py:exc:`DomainError` when ``v`` is zero.
    """
    if v == 0:
        raise DomainError("reduced_U is undefined at v = 0")
    total = 0j
    for r, values in Y.strings:
        total += complex(np.sum(u_r(r, values, v, dressed)))
    total -= complex(np.sum(u_r(1, Y.holes, v, dressed)))
    total += (Y.umklapp[0] - Y.umklapp[1]) * dressed.fermi.p_F
    return total


def shift_exponent(omega, Y: ExcitationY, dressed: DressedState) -> np.ndarray:
    """Return the shift exponent ``theta(omega|Y)``.

    :param omega: Rapidity or array of rapidities.
    :rtype: numpy.ndarray
    """
    omega = _rapidities(omega)
    flat = omega.ravel()
    q = dressed.fermi.q
    l_plus, l_minus = Y.umklapp
    first = dressed.phase_table(1, flat, list(Y.holes) + [q, -q])
    n_h = Y.n_holes
    value = first[:, :n_h].sum(axis=1)
    value -= l_plus * first[:, n_h] + l_minus * first[:, n_h + 1]
    value += 0.5 * Y.operator_spin * dressed.charge(flat)
    for r, values in Y.strings:
        value -= dressed.phase_table(r, flat, values).sum(axis=1)
    return value.reshape(omega.shape)


def critical_exponents(Y: ExcitationY, dressed: DressedState) -> Exponents:
    """Return ``theta_ups = theta(ups q|Y) - ups l_ups`` and their squares."""
    q = dressed.fermi.q
    at_edges = shift_exponent(np.array([q, -q]), Y, dressed)
    theta_plus = complex(at_edges[0]) - Y.umklapp[0]
    theta_minus = complex(at_edges[1]) + Y.umklapp[1]
    return Exponents(
        theta_plus=theta_plus,
        theta_minus=theta_minus,
        delta_plus=theta_plus**2,
        delta_minus=theta_minus**2,
    )


def _ordered_product(values: np.ndarray) -> complex:
    """Return the product of ``x_a - x_b`` over ordered pairs ``a != b``."""
    n = values.size
    if n < 2:
        return 1.0 + 0j
    diff = values[:, None] - values[None, :]
    square = complex(np.prod(diff[np.triu_indices(n, 1)])) ** 2
    return (-1) ** (n * (n - 1) // 2) * square


def _hole_log(ratio: np.ndarray) -> np.ndarray:
    """Logarithm with its argument in ``[0, 2 pi)``."""
    angle = np.angle(ratio)
    angle = np.where(angle < 0.0, angle + 2.0 * math.pi, angle)
    return np.log(np.abs(ratio)) + 1j * angle


def _check_edges(values: np.ndarray, q: float, label: str) -> None:
    for edge in (q, -q):
        if np.any(np.abs(values - edge) < COINCIDENCE):
            raise SingularityError(f"A {label} rapidity sits on the Fermi point {edge}")


def string_vandermonde(Y: ExcitationY) -> complex:
    """Product over bound states ``r >= 2`` of ``prod_{a != b}(nu_a - nu_b)``."""
    total = 1.0 + 0j
    for r, values in Y.strings:
        if r >= 2:
            total *= _ordered_product(_rapidities(values))
    return total


def singular_D(
    Y: ExcitationY, dressed: DressedState, shift: Dict[str, np.ndarray] = None
) -> complex:
    """Return the singular factor ``D`` of the form factor density.

    Particle powers use the principal logarithm of ``(nu + q)/(nu - q)``; hole
    powers use the logarithm of ``(mu - q)/(mu + q)`` with its argument in
    ``[0, 2 pi)``, which is continuous along the hole contour.

    :param shift: Precomputed ``theta(.|Y)`` at the particles and holes, under
      the keys ``"particles"`` and ``"holes"``.
    :raises: :py:exc:`SingularityError` on a rapidity at a Fermi point or a
      particle coinciding with a hole.
    """
    q = dressed.fermi.q
    particles = _rapidities(Y.particles)
    holes = _rapidities(Y.holes)
    _check_edges(particles, q, "particle")
    _check_edges(holes, q, "hole")
    if particles.size and holes.size:
        cross = particles[:, None] - holes[None, :]
        if np.any(np.abs(cross) < COINCIDENCE):
            raise SingularityError("A particle coincides with a hole")
        cross_product = complex(np.prod(cross)) ** 2
    else:
        cross_product = 1.0 + 0j
    if shift is None:
        shift = {
            "particles": shift_exponent(particles, Y, dressed),
            "holes": shift_exponent(holes, Y, dressed),
        }
    log_value = np.sum(
        2.0 * shift["particles"] * np.log((particles + q) / (particles - q))
    ) + np.sum(2.0 * shift["holes"] * _hole_log((holes - q) / (holes + q)))
    value = cmath.exp(complex(log_value))
    for upsilon, ell in ((1, Y.umklapp[0]), (-1, Y.umklapp[1])):
        ratio = complex(np.prod(particles - upsilon * q)) / complex(
            np.prod(holes - upsilon * q)
        )
        value *= ratio ** (2 * ell)
    value *= _ordered_product(holes) * _ordered_product(particles)
    return value / cross_product


def u_sigma(r: int, sigma: int, zeta: float) -> int:
    """Return the Umklapp jump ``u_r^sigma`` across the ray of ``r``, ``sigma``."""
    if sigma < 0 and r == 1:
        return 0
    argument = (
        math.pi + 2.0 * math.pi * math.floor((r + sigma) * zeta / (2.0 * math.pi))
        - (r + sigma) * zeta
    )
    return -((argument > 0) - (argument < 0))


def jump_ray(r: int, sigma: int, zeta: float) -> float:
    """Height of the jump ray of an ``r``-rapidity for the given ``sigma``."""
    return cut_height((r + sigma) * zeta / 2.0)


def jump_shifted_Y(
    Y: ExcitationY,
    r: int,
    index: int,
    sigma: int,
    side: str,
    dressed: DressedState,
) -> ExcitationY:
    """Return the descriptor on one side of a jump ray.

    The ``index``-th ``r``-rapidity must lie on ``x + i f`` with ``x < -q``
    (modulo ``i pi``). It is moved to ``x + i f +- i SIDE_OFFSET``; on the
    ``"down"`` side the Umklapp integers become ``l_ups + ups u_r^sigma``.

    :raises: :py:exc:`DomainError` when the rapidity is not on the ray.
    """
    if side not in ("up", "down"):
        raise DomainError(f"side must be 'up' or 'down', got {side}")
    if r == 1 and sigma < 0:
        raise DomainError("Particles only jump across the sigma = + ray")
    zeta = dressed.params.zeta
    values = list(Y.rapidities(r))
    if not 0 <= index < len(values):
        raise DomainError(f"No {r}-rapidity with index {index}")
    target = values[index]
    height = jump_ray(r, sigma, zeta)
    offset = (target.imag - height) / math.pi
    if target.real >= -dressed.fermi.q or abs(offset - round(offset)) > _ON_CUT:
        raise DomainError(
            f"Rapidity {target} is not on the jump ray at height {height}"
        )
    base = complex(target.real, height + math.pi * round(offset))
    values[index] = base + 1j * (SIDE_OFFSET if side == "up" else -SIDE_OFFSET)
    description = Y.to_dict()
    description["strings"][str(r)] = [[z.real, z.imag] for z in values]
    if side == "down":
        u = u_sigma(r, sigma, zeta)
        description["umklapp"] = [Y.umklapp[0] + u, Y.umklapp[1] - u]
    return ExcitationY(description)
