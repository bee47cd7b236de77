"""
xxzff.response
~~~~~~~~~~~~~~

This module contains the dynamic response function: the closed-form
space-time Fourier transform of the light-cone power laws, a brute-force
evaluation of the same transform, and the per-channel contributions of the
massive excitations.

"""

import itertools
import logging
import math
from typing import Dict, List, Sequence, Tuple

import numpy as np
from joblib import Parallel, delayed
from scipy import optimize, special

from .errors import DomainError
from .excitations import critical_exponents
from .ffseries import DensityPlugin, MomentumRep, enumerate_configs
from .models import (
    FermiData,
    MomentumK,
    NConfig,
    ResponseTotal,
    ResponseValue,
    TransformValue,
)
from .quadrature import extrapolate_to_zero, gauss_legendre

logger = logging.getLogger(__name__)

#: Distance of ``zhat`` to zero counted as an edge hit.
EDGE_HIT = 1e-6

#: Exponents below this are treated as vanishing.
ZERO_EXPONENT = 1e-10

#: Default regulator strengths of the brute-force transform.
BRUTE_FORCE_ETAS = (0.1, 0.07, 0.05)

_ROOT_SAMPLES = 48
_THRESHOLD_SAMPLES = 64
_GAUSSIAN_REACH = 6.0
_STEP_PER_SHIFT = 4


def J_delta(delta: float) -> float:
    """Return ``2 pi / Gamma(delta)``, the transform of ``(-i [phi + i0])^-delta``."""
    return 2.0 * math.pi * float(special.rgamma(delta))


def fourier_T_closed(
    delta_plus: float,
    delta_minus: float,
    k: float,
    omega: float,
    fermi: FermiData,
    n_window: int = 2,
) -> TransformValue:
    """Closed-form transform of ``prod_ups (i [v_F (t - i0) - ups m])^-delta_ups``.

    ``(2 pi)^2 / (2 v_F)`` times the sum over ``|n| <= n_window`` of
    ``prod_ups Xi(O) O^(delta - 1) / Gamma(delta)`` with
    ``O = (omega + ups v_F (k + 2 pi n)) / (2 v_F)``. A vanishing exponent
    turns its factor into ``delta(O)``; such terms are returned as
    ``(n, ups, weight)`` with ``ups = 0`` when both exponents vanish.
    """
    for value in (delta_plus, delta_minus):
        if value < 0:
            raise DomainError(f"Exponents must be non-negative, got {value}")
    v_F = fermi.v_F
    prefactor = (2.0 * math.pi) ** 2 / (2.0 * v_F)
    total = 0.0
    deltas = []
    finite = True
    for n in range(-n_window, n_window + 1):
        factors = []
        singular = []
        for upsilon, exponent in ((1, delta_plus), (-1, delta_minus)):
            big_omega = (omega + upsilon * v_F * (k + 2.0 * math.pi * n)) / (2.0 * v_F)
            if exponent == 0.0:
                singular.append(upsilon)
            elif big_omega > 0.0:
                factors.append(big_omega ** (exponent - 1.0) * special.rgamma(exponent))
            elif big_omega == 0.0 and exponent < 1.0:
                factors.append(math.inf)
            else:
                factors.append(0.0)
        if 0.0 in factors:
            continue
        regular = math.prod(factors)
        if math.isinf(regular):
            finite = False
        elif not singular:
            total += prefactor * regular
        else:
            label = singular[0] if len(singular) == 1 else 0
            deltas.append((n, label, prefactor * regular))
    return TransformValue(
        {
            "value": total if finite else math.inf,
            "delta_terms": deltas,
            "finite": finite,
        }
    )


def _brute_force_at(
    delta_plus: float,
    delta_minus: float,
    k: float,
    omega: float,
    v_F: float,
    eta: float,
) -> complex:
    """Gaussian-regulated transform with the time contour at ``Im t = -1/v_F``."""
    shift = 1.0 / v_F
    reach = _GAUSSIAN_REACH / eta
    m = np.arange(-math.ceil(reach), math.ceil(reach) + 1, dtype=float)
    step = shift / _STEP_PER_SHIFT
    s = np.arange(-reach / v_F, reach / v_F + step, step)
    t = s - 1j * shift
    phase = np.exp(1j * omega * t - (eta * v_F * t) ** 2)
    total = 0j
    for chunk in np.array_split(m, max(1, m.size // 64)):
        cone = (1j * (v_F * t[None, :] - chunk[:, None])) ** (-delta_plus)
        cone = cone * (1j * (v_F * t[None, :] + chunk[:, None])) ** (-delta_minus)
        lattice = np.exp(-1j * k * chunk - (eta * chunk) ** 2)
        total += np.sum(lattice[:, None] * cone * phase[None, :]) * step
    return total


def brute_force_T(
    delta_plus: float,
    delta_minus: float,
    k: float,
    omega: float,
    fermi: FermiData,
    etas: Sequence[float] = BRUTE_FORCE_ETAS,
) -> float:
    """Direct transform of the light-cone power laws.

    The lattice sum and time integral are regulated by
    ``exp(-eta^2 (m^2 + v_F^2 t^2))`` and the results extrapolated to
    ``eta = 0`` in ``eta^2``. Valid away from the edges
    ``omega = +-v_F (k + 2 pi n)``.
    """
    if len(etas) < 2:
        raise DomainError("The brute-force transform needs at least two regulators")
    values = [
        _brute_force_at(delta_plus, delta_minus, k, omega, fermi.v_F, eta)
        for eta in etas
    ]
    value = extrapolate_to_zero([eta**2 for eta in etas], values)
    logger.debug("Brute-force transform %r, imaginary part %.3g", value, value.imag)
    return value.real


def edge_trim(response: Dict, fermi: FermiData) -> float:
    trim = response.get("edge_trim")
    return 1e-2 * fermi.p_F if trim is None else trim


def _energy_momentum(K: MomentumK, rep: MomentumRep) -> Tuple[float, float]:
    energy = -sum(rep.e_hole(t) for t in K.holes)
    momentum = -sum(K.holes) + math.pi * K.operator_spin
    momentum += rep.dressed.fermi.p_F * (K.umklapp[0] - K.umklapp[1])
    for r, momenta in K.strings:
        energy += sum(rep.e(r, k) for k in momenta)
        momentum += sum(momenta)
    return energy, momentum


def _zpair(
    energy: float, momentum: float, s: int, k: float, omega: float, v_F: float
) -> Tuple[float, float]:
    shift = v_F * (k - momentum + 2.0 * math.pi * s)
    return omega - energy + shift, omega - energy - shift


def zhat(
    K: MomentumK, s: int, k: float, omega: float, rep: MomentumRep
) -> Tuple[float, float]:
    """Return ``(zhat_plus, zhat_minus)`` of the momenta ``K``.

    ``zhat_ups = omega - E(K) + ups v_F (k - P(K) + 2 pi s)``.
    """
    energy, momentum = _energy_momentum(K, rep)
    return _zpair(energy, momentum, s, k, omega, rep.dressed.fermi.v_F)


def _s_range(k: float, window: int) -> range:
    center = -int(round(k / (2.0 * math.pi)))
    return range(center - window, center + window + 1)


def _intervals(rep: MomentumRep, trim: float) -> Dict:
    out = {}
    for key, (low, high) in rep.intervals.items():
        if high - low <= 2.0 * trim:
            raise DomainError(f"The edge trim {trim} empties the {key} interval")
        out[key] = (low + trim, high - trim)
    return out


class _Point:
    """One abscissa of a channel: its momenta and the dressed data there."""

    def __init__(self, K: MomentumK, rep: MomentumRep, plugin: DensityPlugin) -> None:
        self.K = K
        density, Y = rep.density(K.holes, dict(K.strings), K.umklapp, plugin)
        exponents = critical_exponents(Y, rep.dressed)
        self.density = abs(density)
        self.deltas = {
            1: float(exponents.delta_plus.real),
            -1: float(exponents.delta_minus.real),
        }
        self.energy, self.momentum = _energy_momentum(K, rep)


def _species(n_config: NConfig) -> List[Tuple]:
    species = [("hole", n_config.n_holes)]
    species.extend((r, n) for r, n in n_config.n_strings)
    return [(key, n) for key, n in species if n]


def _build_K(keys, values, n_config: NConfig, spin: int) -> MomentumK:
    holes, strings = [], {}
    for key, momentum in zip(keys, values):
        if key == "hole":
            holes.append(momentum)
        else:
            strings.setdefault(key, []).append(momentum)
    return MomentumK(
        {
            "holes": holes,
            "strings": strings,
            "umklapp": n_config.umklapp,
            "operator_spin": spin,
        }
    )


class _Channel:
    """Quadrature of one channel of the response function."""

    def __init__(
        self,
        n_config: NConfig,
        response: Dict,
        rep: MomentumRep,
        plugin: DensityPlugin,
    ) -> None:
        self.n_config = n_config
        self.response = response
        self.rep = rep
        self.plugin = plugin
        self.v_F = rep.dressed.fermi.v_F
        self.trim = edge_trim(response, rep.dressed.fermi)
        self.intervals = _intervals(rep, self.trim)
        self.species = _species(n_config)
        for key, _ in self.species:
            if key not in self.intervals:
                raise DomainError(f"No momentum interval for the {key}-string")
        counts = [n for _, n in self.species]
        self.n_vars = sum(counts)
        self.measure = 1.0 / (2.0 * math.pi) ** self.n_vars

    def _K(self, keys, values) -> MomentumK:
        return _build_K(keys, values, self.n_config, self.plugin.operator_spin)

    def _ordered_points(self, nodes: int):
        """Strictly increasing node tuples per species, with their weights."""
        per_species = []
        for key, n in self.species:
            low, high = self.intervals[key]
            x, w = gauss_legendre(nodes, low, high)
            combos = [list(c) for c in itertools.combinations(range(nodes), n)]
            per_species.append([(key, n, x[c], np.prod(w[c])) for c in combos])
        for choice in itertools.product(*per_species):
            keys, values, weight = [], [], 1.0
            for key, n, momenta, w in choice:
                keys.extend([key] * n)
                values.extend(momenta.tolist())
                weight *= w
            yield keys, values, weight

    def regular(self, k: float, omega: float, nodes: int) -> Tuple[float, int]:
        window = self.response["s_window"]
        total = 0.0
        hits = 0
        for keys, values, weight in self._ordered_points(nodes):
            point = _Point(self._K(keys, values), self.rep, self.plugin)
            base = (
                (2.0 * math.pi) ** 2
                * point.density
                * (2.0 * self.v_F) ** (1.0 - point.deltas[1] - point.deltas[-1])
                * special.rgamma(point.deltas[1])
                * special.rgamma(point.deltas[-1])
            )
            for s in _s_range(k, window):
                zs = _zpair(point.energy, point.momentum, s, k, omega, self.v_F)
                factor = 1.0
                for z, upsilon in zip(zs, (1, -1)):
                    delta = point.deltas[upsilon]
                    if abs(z) < EDGE_HIT and delta < 1.0:
                        hits += 1
                    factor *= z ** (delta - 1.0) if z > 0.0 else 0.0
                total += weight * base * factor
        return total * self.measure, hits

    def threshold(self, k: float) -> float:
        """Lowest ``omega`` with ``zhat_+ >= 0`` and ``zhat_- >= 0`` somewhere on
        the channel, ``min E(K) + v_F |k - P(K) + 2 pi s|``.

        The abscissae are scanned on a uniform grid and the best one polished
        with a bounded Powell search.
        """
        keys = [key for key, n in self.species for _ in range(n)]
        window = self.response["s_window"]

        def excitation(values) -> float:
            energy, momentum = _energy_momentum(self._K(keys, list(values)), self.rep)
            return energy + self.v_F * min(
                abs(k - momentum + 2.0 * math.pi * s) for s in _s_range(k, window)
            )

        if not keys:
            return excitation([])
        bounds = [self.intervals[key] for key in keys]
        axes = [np.linspace(low, high, _THRESHOLD_SAMPLES) for low, high in bounds]
        start = min(itertools.product(*axes), key=excitation)
        result = optimize.minimize(
            excitation,
            np.array(start),
            method="Powell",
            bounds=bounds,
            options={"xtol": 1e-10, "ftol": 1e-12},
        )
        return float(min(result.fun, excitation(start)))

    def exponents_vanish(self, nodes: int) -> Dict[int, bool]:
        """Which exponents vanish identically over the channel's abscissae."""
        largest = {1: 0.0, -1: 0.0}
        for keys, values, _ in self._ordered_points(min(nodes, 6)):
            point = _Point(self._K(keys, values), self.rep, self.plugin)
            for upsilon in (1, -1):
                largest[upsilon] = max(largest[upsilon], abs(point.deltas[upsilon]))
        return {upsilon: value < ZERO_EXPONENT for upsilon, value in largest.items()}

    def _energy_of(self, key, momentum: float) -> float:
        if key == "hole":
            return -self.rep.e_hole(momentum)
        return self.rep.e(key, momentum)

    def on_constraint(
        self, k: float, omega: float, nodes: int, vanishing: int
    ) -> Tuple[float, int]:
        """Integrate with ``delta(zhat_vanishing)`` by solving the constraint
        for the first momentum."""
        keys = [key for key, n in self.species for _ in range(n)]
        first = keys[0]
        sign = -1.0 if first == "hole" else 1.0
        low, high = self.intervals[first]
        grid = np.linspace(low, high, _ROOT_SAMPLES)
        grid_energy = np.array([self._energy_of(first, x) for x in grid])
        rest_rules = []
        for key in keys[1:]:
            r_low, r_high = self.intervals[key]
            rest_rules.append(gauss_legendre(nodes, r_low, r_high))
        symmetry = 1.0
        for _, n in self.species:
            symmetry /= math.factorial(n)
        regular_ups = -vanishing
        total = 0.0
        hits = 0
        window = self.response["s_window"]
        for picks in itertools.product(*[range(nodes)] * len(rest_rules)):
            rest = [rule[0][i] for rule, i in zip(rest_rules, picks)]
            weight = float(np.prod([rule[1][i] for rule, i in zip(rest_rules, picks)]))
            rest_K = self._K(keys[1:], rest)
            rest_energy, rest_momentum = _energy_momentum(rest_K, self.rep)

            def constraint(x, energy, s):
                momentum = rest_momentum + sign * x
                zs = _zpair(rest_energy + energy, momentum, s, k, omega, self.v_F)
                return zs[0] if vanishing == 1 else zs[1]

            for s in _s_range(k, window):
                values = np.array(
                    [constraint(x, e, s) for x, e in zip(grid, grid_energy)]
                )
                crossings = np.nonzero(np.sign(values[:-1]) * np.sign(values[1:]) < 0)
                for index in crossings[0]:
                    root = optimize.brentq(
                        lambda x: constraint(x, self._energy_of(first, x), s),
                        grid[index],
                        grid[index + 1],
                        xtol=1e-13,
                    )
                    h = 1e-6 * (high - low)
                    slope = (
                        constraint(root + h, self._energy_of(first, root + h), s)
                        - constraint(root - h, self._energy_of(first, root - h), s)
                    ) / (2.0 * h)
                    point = _Point(self._K(keys, [root] + rest), self.rep, self.plugin)
                    delta = point.deltas[regular_ups]
                    z_plus, z_minus = _zpair(
                        point.energy, point.momentum, s, k, omega, self.v_F
                    )
                    z = z_plus if regular_ups == 1 else z_minus
                    if abs(z) < EDGE_HIT and delta < 1.0:
                        hits += 1
                    if z <= 0.0:
                        continue
                    total += (
                        weight
                        * (2.0 * math.pi) ** 2
                        * point.density
                        * (2.0 * self.v_F) ** (1.0 - delta)
                        * special.rgamma(delta)
                        * z ** (delta - 1.0)
                        / abs(slope)
                    )
        return total * self.measure * symmetry, hits


def response_Sn(
    n_config: NConfig,
    k: float,
    omega: float,
    response: Dict,
    rep: MomentumRep,
) -> ResponseValue:
    """Contribution of the channel ``n_config`` to the response function.

    The momenta run over the trimmed intervals with ``response["nodes"]``
    Gauss nodes each; the error estimate compares with half as many nodes.
    When one exponent vanishes on the whole channel its factor is the delta
    function of ``zhat`` and the constraint is solved for one momentum.
    """
    plugin = DensityPlugin(response["plugin"], response["operator_spin"])
    channel = _Channel(n_config, response, rep, plugin)
    nodes = response["nodes"]
    distributional = False
    if channel.n_vars == 0:
        vanish = channel.exponents_vanish(1)
        if any(vanish.values()):
            distributional = True
            value, hits, error = 0.0, 0, 0.0
        else:
            value, hits = channel.regular(k, omega, 1)
            error = 0.0
    else:
        vanish = channel.exponents_vanish(nodes)
        if vanish[1] and vanish[-1]:
            logger.warning(
                "Both exponents vanish on channel %s; it is left out",
                n_config.to_dict(),
            )
            distributional = True
            value, hits, error = 0.0, 0, 0.0
        elif vanish[1] or vanish[-1]:
            distributional = True
            upsilon = 1 if vanish[1] else -1
            value, hits = channel.on_constraint(k, omega, nodes, upsilon)
            coarse, _ = channel.on_constraint(k, omega, max(2, nodes // 2), upsilon)
            error = abs(value - coarse)
        else:
            value, hits = channel.regular(k, omega, nodes)
            coarse, _ = channel.regular(k, omega, max(2, nodes // 2))
            error = abs(value - coarse)
    if hits:
        logger.warning(
            "%d abscissae of channel %s sit on an edge singularity",
            hits,
            n_config.to_dict(),
        )
    return ResponseValue(
        {
            "n_config": n_config,
            "value": value,
            "error_estimate": error,
            "distributional": distributional,
            "edge_hits": hits,
        }
    )


def response_total(
    k: float,
    omega: float,
    response: Dict,
    rep: MomentumRep,
    n_jobs: int = 1,
) -> ResponseTotal:
    """Sum :py:func:`response_Sn` over the truncation of ``response``."""
    configs = enumerate_configs(response, list(rep.string_branches))
    if n_jobs == 1:
        channels = [response_Sn(c, k, omega, response, rep) for c in configs]
    else:
        channels = Parallel(n_jobs=n_jobs, prefer="threads")(
            delayed(response_Sn)(c, k, omega, response, rep) for c in configs
        )
    return ResponseTotal(
        {
            "value": float(sum(channel.value for channel in channels)),
            "channels": channels,
            "edge_trim": edge_trim(response, rep.dressed.fermi),
        }
    )


def response_threshold(k: float, response: Dict, rep: MomentumRep) -> float:
    """Lower edge of the support of :py:func:`response_total` at ``k``.

    The smallest channel threshold ``min E(K) + v_F |k - P(K) + 2 pi s|``
    over the truncation, leaving out channels on which both exponents
    vanish. ``inf`` when no channel contributes.
    """
    plugin = DensityPlugin(response["plugin"], response["operator_spin"])
    lowest = math.inf
    for config in enumerate_configs(response, list(rep.string_branches)):
        channel = _Channel(config, response, rep, plugin)
        vanish = channel.exponents_vanish(max(1, response["nodes"]))
        if vanish[1] and vanish[-1]:
            continue
        lowest = min(lowest, channel.threshold(k))
    logger.debug("Response threshold at k = %g: %.12g", k, lowest)
    return lowest


def parse_grid(spec: str) -> Tuple[np.ndarray, np.ndarray]:
    """Parse ``kmin:kmax:nk,omin:omax:no`` into the two axes."""
    try:
        k_part, omega_part = spec.split(",")
        axes = []
        for part in (k_part, omega_part):
            low, high, count = part.split(":")
            axes.append(np.linspace(float(low), float(high), int(count)))
    except ValueError as ex:
        raise DomainError(
            f"Invalid grid {spec!r}: expected kmin:kmax:nk,omin:omax:no"
        ) from ex
    return axes[0], axes[1]


def response_grid(
    ks: Sequence[float],
    omegas: Sequence[float],
    response: Dict,
    rep: MomentumRep,
    n_jobs: int = 1,
) -> List[ResponseTotal]:
    """Evaluate :py:func:`response_total` on the ``k``-major product grid."""
    return [
        response_total(k, omega, response, rep, n_jobs)
        for k in ks
        for omega in omegas
    ]
