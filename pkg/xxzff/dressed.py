"""
xxzff.dressed
~~~~~~~~~~~~~

This module contains the Nystrom solvers for the linear integral equations
of the ground state: the dressed energies, momenta, phases and charge, and
the search for the Fermi endpoint.

Every equation is discretized on the same Gauss-Legendre grid of the Fermi
zone. The operator ``I + K w`` is factorized once per grid and the factors
are reused for every right-hand side.

"""

import logging
import math
from typing import Callable, Dict, Optional, Tuple

import numpy as np
from numpy.polynomial import Chebyshev
from scipy import optimize
from scipy.linalg import lu_factor, lu_solve

from .errors import DomainError, NoRootError, SingularSystemError
from .kernels import (
    hat_eta,
    kernel_r,
    kernel_r_deriv,
    theta,
    theta_r,
)
from .kernels import _kernel as _bare_kernel
from .kernels import _kernel_deriv as _bare_kernel_deriv
from .models import FermiData, ModelParams, QuadGrid
from .quadrature import chebyshev_fit, fermi_grid, gauss_legendre

logger = logging.getLogger(__name__)

#: Absolute tolerance on ``eps(q|q)`` at the Fermi endpoint.
ROOT_TOL = 1e-10

_PIVOT_TOL = 1e-14
_CHUNK = 2048
_Q_START = 1e-4
_Q_MAX = 60.0
_Q_GROWTH = 1.5

Evaluator = Callable[[np.ndarray], np.ndarray]


def sgn(x: float) -> int:
    """Sign with ``sgn(0) = 0``."""
    return (x > 0) - (x < 0)


def ell_r(r: int, zeta: float) -> int:
    """Integer offset of the bound-state momentum in units of pi."""
    return 1 - r + 2 * math.floor(r * zeta / (2.0 * math.pi))


def m_r(r: int, zeta: float) -> int:
    """Integer offset of the bound-state momentum in units of ``p_F``."""
    total = 2 - r - (1 if r == 1 else 0)
    for upsilon in (1, -1):
        total += 2 * math.floor(zeta * (r + upsilon) / (2.0 * math.pi))
    return total


def cut_height(eta: float) -> float:
    """Distance ``min(hat, pi - hat)`` of the cut line from the real axis."""
    reduced = hat_eta(eta)
    return min(reduced, math.pi - reduced)


def reduce_strip(lam: np.ndarray) -> np.ndarray:
    """Shift ``lam`` by multiples of ``i pi`` into ``-pi/2 < Im <= pi/2``."""
    shift = np.ceil((lam.imag - math.pi / 2.0) / math.pi)
    return lam - 1j * math.pi * shift


def _kernel_for(zeta: float) -> Tuple[Evaluator, Evaluator]:
    return (
        lambda lam: _bare_kernel(lam, zeta),
        lambda lam: _bare_kernel_deriv(lam, zeta),
    )


class NystromOperator:
    """LU-factorized Nystrom discretization of ``I + K(.|zeta)`` on a grid.

    :param grid: The Fermi-zone grid.
    :type grid: :py:class:`QuadGrid`
    :param zeta: Anisotropy angle.
    :type zeta: float
    :raises: :py:exc:`SingularSystemError` when the matrix is singular.
    """

    grid: QuadGrid
    zeta: float

    def __init__(self, grid: QuadGrid, zeta: float) -> None:
        self.grid = grid
        self.zeta = zeta
        nodes = grid.nodes
        kernel = _bare_kernel(nodes[:, None] - nodes[None, :], zeta).real
        matrix = np.eye(grid.n_nodes) + kernel * grid.weights[None, :]
        self._factors = lu_factor(matrix)
        pivot = np.min(np.abs(np.diag(self._factors[0])))
        if pivot < _PIVOT_TOL:
            raise SingularSystemError(
                "The Nystrom matrix is singular", residual=pivot, tolerance=_PIVOT_TOL
            )

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        """Solve for one right-hand side or a matrix of them (one per column)."""
        return lu_solve(self._factors, rhs)


class DressedFn:
    """A solved function of the rapidity.

    The function is represented by the defining equation
    ``f(lam) = driving(lam) - sum_j w_j smear(lam - x_j) c_j`` where ``c_j``
    are node values of the solved density. Real rapidities inside the Fermi
    zone are evaluated from the Chebyshev interpolant of that formula.

    .. attribute:: kind

      One of ``"epsilon"``, ``"momentum_deriv"``, ``"momentum"``,
      ``"phase"`` or ``"charge"``.

      :type: str

    .. attribute:: r

      :type: int

    .. attribute:: grid

      :type: :py:class:`QuadGrid`

    .. attribute:: density

      Node values of the solved density entering the smearing sum.

      :type: numpy.ndarray
    """

    kind: str
    r: int
    grid: QuadGrid
    density: np.ndarray

    def __init__(
        self,
        kind: str,
        r: int,
        grid: QuadGrid,
        density: np.ndarray,
        driving: Evaluator,
        smear: Evaluator,
        driving_deriv: Optional[Evaluator] = None,
        smear_deriv: Optional[Evaluator] = None,
        periodic: bool = False,
        coefficients: Optional[np.ndarray] = None,
    ) -> None:
        self.kind = kind
        self.r = r
        self.grid = grid
        self.density = np.asarray(density)
        self._weighted = grid.weights * self.density
        self._driving = driving
        self._smear = smear
        self._driving_deriv = driving_deriv
        self._smear_deriv = smear_deriv
        self._periodic = periodic
        self._series: Optional[Chebyshev] = None
        if coefficients is not None:
            self._series = Chebyshev(coefficients, domain=[-grid.q, grid.q])

    def direct(self, lam) -> np.ndarray:
        """Evaluate the defining formula, bypassing the interpolant."""
        return self._apply(lam, self._driving, self._smear)

    def __call__(self, lam) -> np.ndarray:
        lam = np.asarray(lam, dtype=complex)
        flat = lam.ravel()
        inside = (flat.imag == 0.0) & (np.abs(flat.real) <= self.grid.q)
        out = np.empty(flat.shape, dtype=complex)
        if np.any(inside):
            out[inside] = self.series(flat[inside].real)
        if np.any(~inside):
            out[~inside] = self.direct(flat[~inside])
        return out.reshape(lam.shape)

    def deriv(self, lam) -> np.ndarray:
        """Evaluate the rapidity derivative."""
        if self._driving_deriv is None or self._smear_deriv is None:
            raise DomainError(f"No derivative is available for {self.kind}")
        return self._apply(lam, self._driving_deriv, self._smear_deriv)

    @property
    def series(self) -> Chebyshev:
        """Chebyshev interpolant on ``[-q, q]``, built on first use."""
        if self._series is None:
            self._series = chebyshev_fit(
                lambda x: self.direct(x), self.grid.q, self.grid.n_nodes
            )
        return self._series

    @property
    def coefficients(self) -> np.ndarray:
        return self.series.coef

    def _apply(self, lam, driving: Evaluator, smear: Evaluator) -> np.ndarray:
        lam = np.asarray(lam, dtype=complex)
        flat = lam.ravel()
        if self._periodic:
            flat = reduce_strip(flat)
        out = np.empty(flat.shape, dtype=complex)
        nodes = self.grid.nodes
        for start in range(0, flat.size, _CHUNK):
            part = flat[start : start + _CHUNK]
            out[start : start + _CHUNK] = driving(part) - smear(
                part[:, None] - nodes[None, :]
            ) @ self._weighted
        return out.reshape(lam.shape)


def _solve(
    kind: str,
    r: int,
    operator: NystromOperator,
    driving: Evaluator,
    driving_deriv: Optional[Evaluator] = None,
) -> DressedFn:
    kernel, kernel_deriv = _kernel_for(operator.zeta)
    nodes = operator.grid.nodes
    values = operator.solve(driving(nodes.astype(complex)).real)
    return DressedFn(
        kind,
        r,
        operator.grid,
        values,
        driving,
        kernel,
        driving_deriv,
        kernel_deriv,
    )


def _energy_driving(params: ModelParams, r: int) -> Tuple[Evaluator, Evaluator]:
    scale = 4.0 * math.pi * params.J * math.sin(params.zeta)
    eta = r * params.zeta / 2.0
    return (
        lambda lam: r * params.h - scale * _bare_kernel(lam, eta),
        lambda lam: -scale * _bare_kernel_deriv(lam, eta),
    )


def solve_epsilon_Q(
    params: ModelParams,
    Q: float,
    n: int,
    operator: Optional[NystromOperator] = None,
) -> DressedFn:
    """Solve for the dressed energy ``eps(.|Q)`` on ``[-Q, Q]``.

    :param params: Model parameters.
    :type params: :py:class:`ModelParams`
    :param Q: Half-width of the integration interval.
    :type Q: float
    :param n: Number of Gauss-Legendre nodes.
    :type n: int
    :return: The solved function, even in the rapidity.
    :rtype: :py:class:`DressedFn`
    """
    if operator is None:
        operator = NystromOperator(fermi_grid(Q, n), params.zeta)
    driving, driving_deriv = _energy_driving(params, 1)
    return _solve("epsilon", 1, operator, driving, driving_deriv)


def _fermi_gap(params: ModelParams, Q: float, n: int) -> float:
    return float(solve_epsilon_Q(params, Q, n).direct(Q).real)


def _bracket_fermi(params: ModelParams, n: int) -> Tuple[float, float]:
    lower = _Q_START
    if _fermi_gap(params, lower, n) >= 0.0:
        raise NoRootError(
            f"eps(Q|Q) is non-negative at Q = {lower}: h = {params.h} is not"
            f" below h_c = {params.h_c}"
        )
    upper = lower
    while upper < _Q_MAX:
        upper *= _Q_GROWTH
        if _fermi_gap(params, upper, n) > 0.0:
            return lower, upper
        lower = upper
    raise NoRootError(f"No Fermi endpoint below Q = {_Q_MAX} for h = {params.h}")


def _locate_q(params: ModelParams, n: int) -> float:
    lower, upper = _bracket_fermi(params, n)
    q = optimize.brentq(
        lambda Q: _fermi_gap(params, Q, n), lower, upper, xtol=1e-14, rtol=1e-15
    )
    gap = abs(_fermi_gap(params, q, n))
    if gap > ROOT_TOL:
        raise NoRootError(
            "The Fermi endpoint did not converge", residual=gap, tolerance=ROOT_TOL
        )
    logger.info("Fermi endpoint q = %.15g (|eps(q|q)| = %.2g)", q, gap)
    return q


def ground_drivings(params: ModelParams) -> Dict[str, Tuple[Evaluator, Evaluator]]:
    """Driving terms and their derivatives of the ground-state equations."""
    eta = params.zeta / 2.0
    return {
        "eps1": _energy_driving(params, 1),
        "p1_deriv": (
            lambda lam: 2.0 * math.pi * _bare_kernel(lam, eta),
            lambda lam: 2.0 * math.pi * _bare_kernel_deriv(lam, eta),
        ),
        "charge": (np.ones_like, np.zeros_like),
    }


def _p1_deriv(params: ModelParams, operator: NystromOperator) -> DressedFn:
    return _solve("momentum_deriv", 1, operator, *ground_drivings(params)["p1_deriv"])


def _momentum(
    params: ModelParams, p_F: float, p1_deriv: DressedFn, r: int
) -> DressedFn:
    zeta = params.zeta
    eta = r * zeta / 2.0
    offset = math.pi * ell_r(r, zeta) + p_F * m_r(r, zeta)
    jumps = []
    for sigma in (1, -1):
        if sigma < 0 and r == 1:
            continue
        height = (r + sigma) * zeta / 2.0
        weight = sgn(1.0 - 2.0 / math.pi * hat_eta(height))
        if weight:
            jumps.append((cut_height(height), 2.0 * p_F * weight))

    def driving(lam: np.ndarray) -> np.ndarray:
        value = theta(lam, eta) + offset
        height = np.abs(lam.imag)
        for floor, jump in jumps:
            value = value - jump * ((height >= floor) & (height <= math.pi / 2.0))
        return value

    return DressedFn(
        "momentum",
        r,
        p1_deriv.grid,
        p1_deriv.density,
        driving,
        lambda lam: theta_r(lam, r, zeta) / (2.0 * math.pi),
        lambda lam: 2.0 * math.pi * _bare_kernel(lam, eta),
        lambda lam: kernel_r(lam, r, zeta),
        periodic=True,
    )


def solve_p1(
    params: ModelParams,
    fermi: FermiData,
    n: int,
    operator: Optional[NystromOperator] = None,
) -> Tuple[DressedFn, DressedFn]:
    """Solve for ``p_1'`` and build ``p_1`` pinned by ``p_1(0) = 0``.

    :return: The pair ``(p1_deriv, p1)``.
    :rtype: tuple
    """
    if operator is None:
        operator = NystromOperator(fermi_grid(fermi.q, n), params.zeta)
    p1_deriv = _p1_deriv(params, operator)
    return p1_deriv, _momentum(params, fermi.p_F, p1_deriv, 1)


def dressed_energy_r(
    params: ModelParams, fermi: FermiData, eps1: DressedFn, r: int
) -> DressedFn:
    """Build the dressed energy ``eps_r`` of the ``r``-strings.

    It is ``i pi``-periodic and meant to be evaluated on the string line
    ``R + i delta_r pi/2``.
    """
    if r < 1:
        raise DomainError(f"r must be positive, got {r}")
    driving, driving_deriv = _energy_driving(params, r)
    zeta = params.zeta
    return DressedFn(
        "epsilon",
        r,
        eps1.grid,
        eps1.density,
        driving,
        lambda lam: kernel_r(lam, r, zeta),
        driving_deriv,
        lambda lam: kernel_r_deriv(lam, r, zeta),
        periodic=True,
    )


def dressed_momentum_r(
    params: ModelParams, fermi: FermiData, p1_deriv: DressedFn, r: int
) -> DressedFn:
    """Build the dressed momentum ``p_r``, ``i pi``-periodically extended.

    Its :py:meth:`DressedFn.deriv` is ``p_r'``.
    """
    if r < 1:
        raise DomainError(f"r must be positive, got {r}")
    return _momentum(params, fermi.p_F, p1_deriv, r)


def _phase_driving(zeta: float, r: int, mu: complex) -> Evaluator:
    constant = m_r(r, zeta) / 2.0
    return lambda lam: theta_r(lam - mu, r, zeta) / (2.0 * math.pi) + constant


def dressed_phase(
    params: ModelParams,
    fermi: FermiData,
    r: int,
    mu: complex,
    n: int,
    operator: Optional[NystromOperator] = None,
) -> DressedFn:
    """Solve for ``lam -> phi_r(lam, mu)``."""
    if operator is None:
        operator = NystromOperator(fermi_grid(fermi.q, n), params.zeta)
    driving = _phase_driving(params.zeta, r, complex(mu))
    kernel, _ = _kernel_for(params.zeta)
    values = operator.solve(driving(operator.grid.nodes.astype(complex)))
    return DressedFn("phase", r, operator.grid, values, driving, kernel)


def dressed_charge(
    params: ModelParams,
    fermi: FermiData,
    n: int,
    operator: Optional[NystromOperator] = None,
) -> DressedFn:
    """Solve for the dressed charge ``Z``."""
    if operator is None:
        operator = NystromOperator(fermi_grid(fermi.q, n), params.zeta)
    return _solve("charge", 1, operator, *ground_drivings(params)["charge"])


def phase_table(
    operator: NystromOperator, r: int, omegas: np.ndarray, mus: np.ndarray
) -> np.ndarray:
    """Return ``phi_r(omega_i, mu_k)`` for all pairs, with one batched solve."""
    zeta = operator.zeta
    grid = operator.grid
    omegas = np.asarray(omegas, dtype=complex).ravel()
    mus = np.asarray(mus, dtype=complex).ravel()
    if mus.size == 0:
        return np.zeros((omegas.size, 0), dtype=complex)
    constant = m_r(r, zeta) / 2.0
    rhs = theta_r(grid.nodes[:, None] - mus[None, :], r, zeta) / (2.0 * math.pi)
    solution = operator.solve(rhs + constant)
    weighted = grid.weights[:, None] * solution
    table = theta_r(omegas[:, None] - mus[None, :], r, zeta) / (2.0 * math.pi)
    kernel = _bare_kernel(omegas[:, None] - grid.nodes[None, :], zeta)
    return table + constant - kernel @ weighted


def find_fermi_q(params: ModelParams, n: int) -> FermiData:
    """Locate the Fermi endpoint and compute ``p_F`` and ``v_F``.

    :param params: Model parameters in the massless regime.
    :type params: :py:class:`ModelParams`
    :param n: Number of Gauss-Legendre nodes.
    :type n: int
    :rtype: :py:class:`FermiData`
    :raises: :py:exc:`NoRootError` when no endpoint is found.
    """
    return DressedState.build(params, n).fermi


def equation_residual(fn: DressedFn, zeta: float, points: np.ndarray) -> float:
    """Residual of ``f + int K f = driving`` at ``points``, by independent
    quadrature on a doubled Gauss-Legendre rule."""
    q = fn.grid.q
    nodes, weights = gauss_legendre(2 * fn.grid.n_nodes, -q, q)
    points = np.asarray(points, dtype=float)
    inner = fn(nodes)
    kernel = _bare_kernel(points[:, None] - nodes[None, :], zeta)
    lhs = fn(points) + kernel @ (weights * inner)
    rhs = fn._driving(points.astype(complex))
    return float(np.max(np.abs(lhs - rhs)))


class DressedState:
    """All dressed quantities of one ground state.

    ``eps_1``, ``p_1'`` and ``Z`` are solved on construction; bound-state
    energies and momenta are built on first request and memoized. Phases are
    solved through the shared factorization.

    .. attribute:: params

      :type: :py:class:`ModelParams`

    .. attribute:: fermi

      :type: :py:class:`FermiData`

    .. attribute:: operator

      :type: :py:class:`NystromOperator`
    """

    params: ModelParams
    fermi: FermiData
    operator: NystromOperator
    eps1: DressedFn
    p1_deriv: DressedFn
    charge: DressedFn

    def __init__(
        self,
        params: ModelParams,
        fermi: FermiData,
        operator: NystromOperator,
        eps1: DressedFn,
        p1_deriv: DressedFn,
        charge: DressedFn,
    ) -> None:
        self.params = params
        self.fermi = fermi
        self.operator = operator
        self.eps1 = eps1
        self.p1_deriv = p1_deriv
        self.charge = charge
        self._energies: Dict[int, DressedFn] = {1: eps1}
        self._momenta: Dict[int, DressedFn] = {}

    @classmethod
    def build(cls, params: ModelParams, n: int) -> "DressedState":
        """Solve every ground-state equation for ``params`` on ``n`` nodes."""
        q = _locate_q(params, n)
        operator = NystromOperator(fermi_grid(q, n), params.zeta)
        eps1 = solve_epsilon_Q(params, q, n, operator)
        p1_deriv = _p1_deriv(params, operator)
        p_F = float(_momentum(params, 0.0, p1_deriv, 1).direct(q).real)
        v_F = float(eps1.deriv(q).real / p1_deriv.direct(q).real)
        if p_F <= 0 or v_F <= 0:
            raise NoRootError(f"Unphysical Fermi data p_F = {p_F}, v_F = {v_F}")
        fermi = FermiData({"q": q, "p_F": p_F, "v_F": v_F})
        logger.info("p_F = %.12g, v_F = %.12g", p_F, v_F)
        charge = dressed_charge(params, fermi, n, operator)
        return cls(params, fermi, operator, eps1, p1_deriv, charge)

    @property
    def grid(self) -> QuadGrid:
        return self.operator.grid

    @property
    def p1(self) -> DressedFn:
        return self.momentum(1)

    def epsilon(self, r: int) -> DressedFn:
        if r not in self._energies:
            self._energies[r] = dressed_energy_r(self.params, self.fermi, self.eps1, r)
        return self._energies[r]

    def momentum(self, r: int) -> DressedFn:
        if r not in self._momenta:
            self._momenta[r] = dressed_momentum_r(
                self.params, self.fermi, self.p1_deriv, r
            )
        return self._momenta[r]

    def phase(self, r: int, mu: complex) -> DressedFn:
        return dressed_phase(
            self.params, self.fermi, r, mu, self.grid.n_nodes, self.operator
        )

    def phase_table(self, r: int, omegas, mus) -> np.ndarray:
        return phase_table(self.operator, r, omegas, mus)

    def string_orientation(self, r: int, delta_r: int, samples: int = 64) -> int:
        """Sign of ``p_r'`` along ``R + i delta_r pi/2``, or 0 if it varies."""
        line = np.linspace(-6.0, 6.0, samples) + 0.5j * math.pi * delta_r
        derivative = self.momentum(r).deriv(line).real
        signs = set(np.sign(derivative).astype(int).tolist())
        if len(signs) != 1 or 0 in signs:
            logger.warning("p_%d' changes sign on its string line", r)
            return 0
        return signs.pop()

    def identity_residuals(self, samples: int = 50) -> Dict[str, float]:
        """Maximal residuals of the integral equations and of the identities
        relating the dressed phase to the dressed charge."""
        q = self.fermi.q
        zeta = self.params.zeta
        points = np.linspace(-0.987 * q, 0.983 * q, samples)
        table = self.phase_table(1, np.concatenate([points, [q, -q]]), [q, -q])
        plus, minus = table[:, 0], table[:, 1]
        pointwise = np.abs(plus[:-2] - minus[:-2] + 1.0 - self.charge(points))
        at_q = abs(1.0 + plus[-2] - plus[-1] - 1.0 / self.charge(q))
        return {
            "epsilon": equation_residual(self.eps1, zeta, points),
            "momentum_deriv": equation_residual(self.p1_deriv, zeta, points),
            "charge": equation_residual(self.charge, zeta, points),
            "charge_phase_pointwise": float(np.max(pointwise)),
            "charge_phase_at_q": float(at_q),
            "fermi_gap": float(abs(self.eps1(q).real)),
        }

    def phase_jump(self, r: int, sigma: int, x: float, lam) -> np.ndarray:
        """Jump of ``phi_r(lam, .)`` across the cut above ``x < -q``."""
        height = cut_height((r + sigma) * self.params.zeta / 2.0)
        mus = np.array([x + 1j * (height + 1e-9), x + 1j * (height - 1e-9)])
        table = self.phase_table(r, lam, mus)
        return table[:, 0] - table[:, 1]
