"""
xxzff.chain
~~~~~~~~~~~

This module contains the :py:class:`Chain` class tying a model, its solved
ground state, the cache and the parallel fan-out together.

"""

import logging
import math
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from .cache import cache_load, cache_store
from .config import load_config, prepare_config, prepare_excitation
from .dressed import DressedState
from .errors import CacheMissError, DomainError
from .excitations import critical_exponents, u_sigma
from .ffseries import evaluate_correlator, momentum_rep
from .models import (
    CorrelatorValue,
    ExcitationY,
    Exponents,
    FermiData,
    ModelParams,
    ResponseTotal,
    RestrictedSumConfig,
    StringSpec,
    ThermoReport,
    VerifyCheck,
)
from .response import brute_force_T, fourier_T_closed, response_grid, response_total
from .restricted import B_leading_check, restricted_sum
from .strings import classify_strings

logger = logging.getLogger(__name__)

#: Bound on the residuals of the ground-state equations and identities.
IDENTITY_TOL = 1e-8

#: Highest string length scanned when no truncation asks for more.
DEFAULT_STRING_SCAN = 8

#: Momenta and frequencies, with v_F = 1, at which the closed-form transform
#: is compared with the direct one. All lie inside the light cone and away
#: from its edges.
FOURIER_POINTS = ((0.3, 1.5), (-0.4, 2.0), (0.2, 2.5), (0.5, 1.4), (-0.1, 3.5))

_FREE_FERMION = {"J": 1.0, "zeta": math.pi / 2.0, "h": 2.0}


class Chain:
    """Numerical access to one XXZ chain.

    The ground state is solved on first use. With a cache directory the
    solved functions are read from it and stored after a miss.

    :param config: A run configuration; it is validated and completed with
      defaults.
    """

    config: Dict[str, Any]
    params: ModelParams
    _state: Optional[DressedState]
    _cache_hit: bool

    def __init__(self, config: Dict[str, Any]) -> None:
        self.config = prepare_config(config)
        self.params = ModelParams(self.config["model"])
        self._state = None
        self._cache_hit = False

    @classmethod
    def from_file(cls, path: str) -> "Chain":
        return cls(load_config(path))

    @property
    def n_nodes(self) -> int:
        return self.config["grid"]["n_nodes"]

    @property
    def n_jobs(self) -> int:
        return self.config["n_jobs"]

    @property
    def state(self) -> DressedState:
        if self._state is None:
            self._state = self._solve()
        return self._state

    @property
    def fermi(self) -> FermiData:
        return self.state.fermi

    def _solve(self) -> DressedState:
        cache_dir = self.config["cache_dir"]
        if cache_dir:
            try:
                state = cache_load(cache_dir, self.params, self.n_nodes)
            except CacheMissError:
                logger.info("Cache miss for %s", self.params)
            else:
                self._cache_hit = True
                return state
        state = DressedState.build(self.params, self.n_nodes)
        if cache_dir:
            cache_store(state, cache_dir)
        return state

    def thermo(self) -> ThermoReport:
        """Solve the ground state and report its Fermi data and residuals."""
        state = self.state
        return ThermoReport(
            {
                "fermi": state.fermi,
                "residuals": state.identity_residuals(),
                "cache_hit": self._cache_hit,
            }
        )

    def strings(self, r_max_scan: int = DEFAULT_STRING_SCAN) -> List[StringSpec]:
        """Classify the bound states up to ``r_max_scan`` with their
        orientations."""
        return classify_strings(self.params, r_max_scan, self.state)

    def excitation(self, description: Optional[Dict[str, Any]] = None) -> ExcitationY:
        if description is None:
            description = self.config.get("excitation")
        if description is None:
            raise DomainError("No excitation was given")
        return prepare_excitation(description)

    def exponents(self, description: Optional[Dict[str, Any]] = None) -> Exponents:
        """Critical exponents of an excitation, the configured one by default."""
        return critical_exponents(self.excitation(description), self.state)

    def _check_delta(self) -> None:
        delta = self.config["series"]["delta"]
        if not delta < self.fermi.q / 4.0:
            raise DomainError(
                f"series.delta = {delta} must be below q/4 = {self.fermi.q / 4.0}"
            )

    def correlator(self, m: int, t: float) -> CorrelatorValue:
        """The truncated correlator at distance ``m`` and time ``t``."""
        self._check_delta()
        return evaluate_correlator(
            m, t, self.config["series"], self.state, self.n_jobs
        )

    def correlator_sweep(self, points: Sequence) -> List[CorrelatorValue]:
        self._check_delta()
        return [self.correlator(m, t) for m, t in points]

    def response(self, k: float, omega: float) -> ResponseTotal:
        """The truncated dynamic response function at ``(k, omega)``."""
        options = self.config["response"]
        rep = momentum_rep(options, self.state)
        return response_total(k, omega, options, rep, self.n_jobs)

    def response_grid(
        self, ks: Sequence[float], omegas: Sequence[float]
    ) -> List[ResponseTotal]:
        options = self.config["response"]
        rep = momentum_rep(options, self.state)
        return response_grid(ks, omegas, options, rep, self.n_jobs)

    def verify(self, quick: bool = False) -> List[VerifyCheck]:
        """Run the verification suite.

        The ground-state identities are checked on this chain; the other
        checks use fixed reference models.
        """
        checks = _identity_checks(self.state)
        checks.append(_jump_check(self.state))
        checks.extend(_free_fermion_checks(self.n_nodes))
        checks.extend(_positivity_checks(self, quick))
        checks.extend(_restricted_sum_checks(quick))
        checks.extend(_fourier_checks(quick))
        checks.extend(_leading_checks(quick))
        for check in checks:
            level = logging.INFO if check.passed else logging.WARNING
            logger.log(
                level,
                "%s: %.3g (tolerance %.3g)",
                check.name,
                check.value,
                check.tolerance,
            )
        return checks


def _check(
    name: str, value: float, tolerance: float, report_only: bool = False
) -> VerifyCheck:
    return VerifyCheck(
        {
            "name": name,
            "passed": bool(value < tolerance),
            "value": value,
            "tolerance": tolerance,
            "report_only": report_only,
        }
    )


def _identity_checks(state: DressedState) -> List[VerifyCheck]:
    return [
        _check(f"identity.{name}", value, IDENTITY_TOL)
        for name, value in state.identity_residuals().items()
    ]


def _jump_check(state: DressedState) -> VerifyCheck:
    """Report-only: the jump of phi_1 across its cut is u_1^+ Z."""
    q = state.fermi.q
    points = np.linspace(-0.8 * q, 0.8 * q, 9)
    jump = state.phase_jump(1, 1, -q - 0.5, points)
    expected = u_sigma(1, 1, state.params.zeta) * state.charge(points)
    value = float(np.max(np.abs(jump - expected)))
    return _check("identity.phase_jump", value, 1e-6, True)


def _free_fermion_checks(n_nodes: int) -> List[VerifyCheck]:
    params = ModelParams(_FREE_FERMION)
    state = DressedState.build(params, n_nodes)
    fermi = state.fermi
    J, h = params.J, params.h
    points = np.linspace(-fermi.q, fermi.q, 33)
    q_exact = math.asinh(math.sqrt(2.0 * J / h - 0.5))
    v_exact = h * math.sinh(2.0 * q_exact)
    phases = state.phase_table(1, points, [fermi.q, -fermi.q])
    return [
        _check(
            "free_fermion.charge",
            float(np.max(np.abs(state.charge(points) - 1.0))),
            1e-10,
        ),
        _check("free_fermion.phase", float(np.max(np.abs(phases))), 1e-10),
        _check("free_fermion.q", abs(fermi.q - q_exact), 1e-8),
        _check("free_fermion.v_F", abs(fermi.v_F / v_exact - 1.0), 1e-6),
    ]


def _positivity_checks(chain: Chain, quick: bool) -> List[VerifyCheck]:
    """Report-only: ``eps_r > 0`` and ``|p_r'| > 0`` along each string line."""
    checks = []
    scan = 4 if quick else DEFAULT_STRING_SCAN
    for spec in chain.strings(scan):
        if not spec.exists:
            continue
        line = np.linspace(-6.0, 6.0, 64) + 0.5j * math.pi * spec.delta_r
        energy = float(np.min(chain.state.epsilon(spec.r)(line).real))
        slope = float(np.min(np.abs(chain.state.momentum(spec.r).deriv(line))))
        checks.append(_check(f"positivity.eps_{spec.r}", -energy, 0.0, True))
        checks.append(_check(f"positivity.p_{spec.r}_deriv", -slope, 0.0, True))
    return checks


def _restricted_sum_checks(quick: bool) -> List[VerifyCheck]:
    cases = [(nu, ell) for nu in (0.3, -0.4) for ell in (-1, 0, 1, 2)]
    if quick:
        cases = [(0.3, 0)]
    sizes = [50.0] if quick else [50.0, 100.0]
    checks = []
    for nu, ell in cases:
        for L in sizes:
            errors = []
            for cut in (30, 60):
                options = {"nu": nu, "ell": ell, "L": L, "x": L}
                cfg = RestrictedSumConfig({**options, "p_cut": cut, "h_cut": cut})
                errors.append(restricted_sum(cfg).relative_error)
            name = f"restricted_sum.nu={nu:g}.ell={ell}.L={L:g}"
            checks.append(_check(name, errors[1], 1e-3))
            checks.append(
                _check(f"{name}.decreasing", float(errors[1] >= errors[0]), 0.5)
            )
    return checks


def _fourier_checks(quick: bool) -> List[VerifyCheck]:
    fermi = FermiData({"q": 1.0, "p_F": 1.0, "v_F": 1.0})
    exponents = (0.5,) if quick else (0.25, 0.5, 1.0)
    points = FOURIER_POINTS[:1] if quick else FOURIER_POINTS
    checks = []
    for delta in exponents:
        for k, omega in points:
            closed = fourier_T_closed(delta, delta, k, omega, fermi).value
            brute = brute_force_T(delta, delta, k, omega, fermi)
            checks.append(
                _check(
                    f"fourier.delta={delta:g}.k={k:g}.omega={omega:g}",
                    abs(brute / closed - 1.0),
                    1e-2,
                )
            )
    return checks


def _leading_checks(quick: bool) -> List[VerifyCheck]:
    sizes = (200.0, 400.0, 800.0)
    if quick:
        result = B_leading_check(40.0, 0.1, 0.5, sizes[-1])
        return [_check("leading.ratio", abs(result.ratio - 1.0), 2e-2)]
    results = [B_leading_check(40.0, 0.1, 0.5, L) for L in sizes]
    deviations = [abs(result.ratio - 1.0) for result in results]
    phases = [result.phase_error for result in results]
    improving = all(b < a for a, b in zip(deviations[:-1], deviations[1:]))
    converging = all(b < a for a, b in zip(phases[:-1], phases[1:]))
    return [
        _check("leading.ratio", deviations[-1], 2e-2),
        _check("leading.improving", float(not improving), 0.5),
        _check("leading.phase", results[-1].finite_size_phase_error, 1e-2),
        _check("leading.phase_converging", float(not converging), 0.5),
    ]
