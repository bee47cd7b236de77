"""
xxzff.ffseries
~~~~~~~~~~~~~~

This module contains the evaluation of the truncated form factor series of
the two-point function ``<sigma^gamma'(t) sigma^gamma_{m+1}>`` and its
momentum representation.

Each term is a tensor-product Gauss quadrature over the hole, particle and
bound-state contours. The integrand is symmetric in the rapidities of one
species and vanishes when two of them coincide, so only strictly increasing
node tuples are summed; this absorbs the ``1/n!`` of the measure. Terms
sharing the same numbers of rapidities are evaluated together for all their
Umklapp integers.

"""

import itertools
import logging
import math
from collections import OrderedDict
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from joblib import Parallel, delayed
from scipy import optimize

from .contours import Contour, build_contours
from .dressed import DressedFn, DressedState, sgn
from .errors import (
    ConvergenceError,
    DomainError,
    InvalidConfigError,
    NonMonotoneError,
    RegimeError,
)
from .excitations import (
    _hole_log,
    singular_D,
    string_vandermonde,
    u_sigma,
)
from .models import (
    CorrelatorValue,
    DeltaStability,
    ExcitationY,
    NConfig,
    SeriesTerm,
    StringSpec,
)
from .quadrature import extrapolate_to_zero
from .strings import allowed_strings

logger = logging.getLogger(__name__)

#: Distance to a D-factor pole below which a warning is logged.
POLE_PROXIMITY = 1e-3

#: Real part beyond which dressed functions are taken at their limits.
FAR_RAPIDITY = 30.0

_CHUNK = 20000
_FREQUENCY_MARGIN = 2.0
_INVERSION_TOL = 1e-13
_INVERSION_RTOL = 4.0 * np.finfo(float).eps
_MONOTONE_SAMPLES = 200
_MONOTONE_TOL = 1e-12

BatchDensity = Callable[[np.ndarray, Dict[int, np.ndarray]], np.ndarray]


def _unit_density(holes: np.ndarray, strings: Dict[int, np.ndarray]) -> np.ndarray:
    return np.ones(holes.shape[0], dtype=complex)


def _sech_density(holes: np.ndarray, strings: Dict[int, np.ndarray]) -> np.ndarray:
    value = np.ones(holes.shape[0], dtype=complex)
    for rapidities in strings.values():
        value = value * np.prod(1.0 / np.cosh(2.0 * rapidities), axis=1)
    return value


_PLUGINS = {"unit": _unit_density, "sech": _sech_density}


class DensityPlugin:
    """The regular factor of the form factor density.

    ``"unit"`` is identically 1. ``"sech"`` is the product of
    ``1/cosh(2 nu)`` over particle and bound-state rapidities; it decays
    along every infinite contour.

    .. attribute:: name

      :type: str

    .. attribute:: operator_spin

      Pseudo-spin of the operator it belongs to.

      :type: int
    """

    name: str
    operator_spin: int

    def __init__(self, name: str, operator_spin: int = 0) -> None:
        if name not in _PLUGINS:
            raise InvalidConfigError(f"Unknown density plugin {name}")
        self.name = name
        self.operator_spin = operator_spin
        self._batch: BatchDensity = _PLUGINS[name]

    @property
    def decays(self) -> bool:
        return self.name != "unit"

    def batch(self, holes: np.ndarray, strings: Dict[int, np.ndarray]) -> np.ndarray:
        """Evaluate on a batch: ``holes`` is ``(B, n_h)``, every string array
        is ``(B, n_r)``."""
        return self._batch(holes, strings)

    def __call__(self, Y: ExcitationY) -> complex:
        holes = np.asarray(Y.holes, dtype=complex).reshape(1, -1)
        strings = {
            r: np.asarray(values, dtype=complex).reshape(1, -1)
            for r, values in Y.strings
        }
        return complex(self.batch(holes, strings)[0])


def form_factor_density(
    Y: ExcitationY, dressed: DressedState, plugin: DensityPlugin
) -> complex:
    """Return the string Vandermonde times ``D`` times the regular factor."""
    return string_vandermonde(Y) * singular_D(Y, dressed) * plugin(Y)


def enumerate_configs(truncation: Dict, allowed: Sequence[int] = ()) -> List[NConfig]:
    """List the occupation numbers within ``truncation`` that satisfy
    ``n_h = l_+ + l_- + sum_r r n_r``.

    :param truncation: Mapping with ``max_holes``, ``max_particles``,
      ``max_strings`` and ``umklapp_window``.
    :param allowed: Lengths of the existing bound states.
    """
    window = truncation["umklapp_window"]
    max_strings = {
        int(r): n for r, n in truncation.get("max_strings", {}).items() if n > 0
    }
    for r in sorted(set(max_strings) - set(allowed)):
        logger.warning("No %d-string exists; its truncation is ignored", r)
    lengths = [1] + sorted(r for r in max_strings if r in allowed)
    ranges = [range(truncation.get("max_particles", 0) + 1)] + [
        range(max_strings[r] + 1) for r in lengths[1:]
    ]
    configs = []
    for n_holes in range(truncation["max_holes"] + 1):
        for counts in itertools.product(*ranges):
            moved = sum(r * n for r, n in zip(lengths, counts))
            for l_plus in range(-window, window + 1):
                l_minus = n_holes - moved - l_plus
                if abs(l_minus) > window:
                    continue
                configs.append(
                    NConfig(
                        {
                            "n_holes": n_holes,
                            "n_strings": dict(zip(lengths, counts)),
                            "umklapp": (l_plus, l_minus),
                        }
                    )
                )
    return configs


def _ordered_pairs(values: np.ndarray) -> np.ndarray:
    """Row-wise product of ``x_a - x_b`` over ordered pairs ``a != b``."""
    n = values.shape[1]
    out = np.ones(values.shape[0], dtype=complex)
    for a in range(n):
        for b in range(a + 1, n):
            out = out * (values[:, a] - values[:, b]) ** 2
    return out * (-1) ** (n * (n - 1) // 2)


def _combinations(size: int, n: int) -> np.ndarray:
    if n == 0:
        return np.zeros((1, 0), dtype=int)
    combos = np.array(list(itertools.combinations(range(size), n)), dtype=int)
    return combos.reshape(-1, n)


class _Species:
    """Quadrature nodes of one contour with the data the integrand needs."""

    def __init__(self, contour: Contour, n: int, frequency: float = 0.0) -> None:
        self.points, self.weights, self.labels = contour.rule(n, frequency)
        self.size = self.points.size


class SeriesEngine:
    """Tabulated ingredients of the series at fixed ``m`` and ``t``.

    The dressed phases are tabulated once between all contour nodes and the
    Fermi points; every term is then assembled from table lookups.

    :param m: Lattice distance, an integer.
    :param t: Time.
    :param series: The validated ``series`` section of a run configuration.
    :param dressed: The solved ground state.
    :param strings: Classified bound states with their orientation.
    """

    def __init__(
        self,
        m: int,
        t: float,
        series: Dict,
        dressed: DressedState,
        strings: Sequence[StringSpec] = (),
    ) -> None:
        if int(m) != m:
            raise DomainError(f"The distance m must be an integer, got {m}")
        self.m = int(m)
        self.t = float(t)
        self.series = series
        self.dressed = dressed
        self.spin = series["operator_spin"]
        self.plugin = DensityPlugin(series["plugin"], self.spin)
        fermi = dressed.fermi
        self.q = fermi.q
        for upsilon in (1, -1):
            if abs(fermi.light_cone(upsilon, self.m, self.t)) < 1e-12:
                raise RegimeError(
                    f"m = {m}, t = {t} lies on the light cone of the Fermi point"
                    f" {'+' if upsilon > 0 else '-'}q"
                )
        if self.t == 0.0:
            v = math.copysign(math.inf, self.m)
            self.steps: Tuple[float, ...] = (0.0,)
        else:
            v = self.m / self.t
            self.steps = tuple(series["im_t"])
        self.contours = build_contours(
            series["delta"],
            v,
            fermi,
            strings,
            time_sign=sgn(self.t) or 1,
            warp=series["arc_warp"],
        )
        n = series["nodes_per_arc"]
        frequency = self._frequency()
        self.holes = _Species(self.contours["hole"], n, frequency)
        self.particles = _Species(self.contours["particle"], n, frequency)
        self.bound = {
            r: _Species(c, n, frequency)
            for r, c in self.contours.items()
            if isinstance(r, int)
        }
        self._tabulate()
        self._check_proximity()

    def _frequency(self) -> float:
        """Bound on ``|m p_1' - t eps_1'|`` around the Fermi zone."""
        q = self.q
        sample = np.linspace(-q - _FREQUENCY_MARGIN, q + _FREQUENCY_MARGIN, 101)
        slope_p = np.max(np.abs(self.dressed.p1_deriv(sample)))
        slope_e = np.max(np.abs(self.dressed.eps1.deriv(sample)))
        return float(abs(self.m) * slope_p + abs(self.t) * slope_e)

    def _tabulate(self) -> None:
        dressed = self.dressed
        q = self.q
        hole_pts, part_pts = self.holes.points, self.particles.points
        self.omegas = np.concatenate([[q, -q], hole_pts, part_pts])
        columns = np.concatenate([hole_pts, part_pts, [q, -q]])
        self.phi1 = dressed.phase_table(1, self.omegas, columns)
        self.col_plus = columns.size - 2
        self.col_minus = columns.size - 1
        self.phir = {
            r: dressed.phase_table(r, self.omegas, species.points)
            for r, species in self.bound.items()
        }
        self.charge = 0.5 * self.spin * dressed.charge(self.omegas)
        self.hole_log = _hole_log((hole_pts - q) / (hole_pts + q))
        self.part_log = np.log((part_pts + q) / (part_pts - q))

        times = np.array([complex(self.t, -e) if self.t else 0j for e in self.steps])
        self.times = times
        self.hole_osc = np.exp(
            1j * np.outer(dressed.eps1(hole_pts), times)
            - 1j * self.m * dressed.p1(hole_pts)[:, None]
        )
        self.part_osc = self._osc(1, part_pts)
        self.bound_osc = {r: self._osc(r, s.points) for r, s in self.bound.items()}
        fermi = dressed.fermi
        self.log_cone = {
            upsilon: np.log(-1j * (upsilon * self.m - fermi.v_F * times))
            for upsilon in (1, -1)
        }

    def _osc(self, r: int, points: np.ndarray) -> np.ndarray:
        energy = _limited(self.dressed.epsilon(r), points)
        momentum = _limited(self.dressed.momentum(r), points)
        phase = 1j * self.m * momentum[:, None] - 1j * np.outer(energy, self.times)
        return np.exp(phase)

    def _check_proximity(self) -> None:
        q = self.q
        gaps = [np.min(np.abs(self.holes.points[:, None] - np.array([q, -q])))]
        gaps.append(np.min(np.abs(self.particles.points[:, None] - np.array([q, -q]))))
        gaps.append(
            np.min(np.abs(self.particles.points[:, None] - self.holes.points[None, :]))
        )
        closest = float(min(gaps))
        if closest < POLE_PROXIMITY:
            logger.warning(
                "A quadrature node is %.2g away from a pole of the D-factor", closest
            )

    def evaluate(
        self,
        n_holes: int,
        n_strings: Dict[int, int],
        umklapps: Sequence[Tuple[int, int]],
    ) -> Dict[Tuple[int, int], Tuple[complex, float]]:
        """Evaluate the terms with the given numbers of rapidities.

        :return: Mapping from ``(l_plus, l_minus)`` to the pair
          ``(value, error_estimate)``.
        """
        lengths = sorted(r for r, n in n_strings.items() if n > 0)
        for r in lengths:
            if r != 1 and r not in self.bound:
                raise DomainError(f"No contour for the {r}-string")
        if any(r != 1 for r in lengths) and not self.plugin.decays:
            raise InvalidConfigError(
                "Bound-state terms need a decaying density plugin, not 'unit'"
            )
        species = [self.holes] + [
            self.particles if r == 1 else self.bound[r] for r in lengths
        ]
        counts = [n_holes] + [n_strings[r] for r in lengths]
        combos = [_combinations(s.size, n) for s, n in zip(species, counts)]
        sizes = [c.shape[0] for c in combos]
        total = int(np.prod(sizes))
        sums = {pair: np.zeros(len(self.steps), dtype=complex) for pair in umklapps}
        for start in range(0, total, _CHUNK):
            flat = np.arange(start, min(start + _CHUNK, total))
            picks = np.unravel_index(flat, sizes)
            chosen = [c[p] for c, p in zip(combos, picks)]
            self._accumulate(lengths, chosen, umklapps, sums)
        n_total = sum(counts)
        sign = (-1) ** (self.m * self.spin)
        results = {}
        for pair, values in sums.items():
            values = sign * values / (2.0 * math.pi) ** n_total
            if not np.all(np.isfinite(values)):
                raise ConvergenceError(f"Non-finite series term for umklapp {pair}")
            if len(self.steps) == 1:
                results[pair] = (complex(values[0]), 0.0)
                continue
            value = extrapolate_to_zero(self.steps, values)
            coarse = extrapolate_to_zero(self.steps[1:], values[1:])
            results[pair] = (value, abs(value - coarse))
        return results

    def _accumulate(self, lengths, chosen, umklapps, sums) -> None:
        q = self.q
        n_h_nodes = self.holes.size
        hole_idx = chosen[0]
        batch = hole_idx.shape[0]
        mu = self.holes.points[hole_idx]
        weight = np.prod(self.holes.weights[hole_idx], axis=1)
        osc = np.prod(self.hole_osc[hole_idx], axis=1)
        targets = [np.zeros((batch, 1), dtype=int), np.ones((batch, 1), dtype=int)]
        targets.append(2 + hole_idx)
        strings = {}
        part_idx = np.zeros((batch, 0), dtype=int)
        for r, idx in zip(lengths, chosen[1:]):
            species = self.particles if r == 1 else self.bound[r]
            strings[r] = species.points[idx]
            weight = weight * np.prod(species.weights[idx], axis=1)
            table = self.part_osc if r == 1 else self.bound_osc[r]
            osc = osc * np.prod(table[idx], axis=1)
            if r == 1:
                part_idx = idx
                targets.append(2 + n_h_nodes + idx)
        target = np.concatenate(targets, axis=1)
        nu = strings.get(1, np.zeros((batch, 0), dtype=complex))

        base = self.charge[target]
        for a in range(hole_idx.shape[1]):
            base = base + self.phi1[target, hole_idx[:, a : a + 1]]
        for a in range(part_idx.shape[1]):
            base = base - self.phi1[target, n_h_nodes + part_idx[:, a : a + 1]]
        for r, idx in zip(lengths, chosen[1:]):
            if r == 1:
                continue
            for a in range(idx.shape[1]):
                base = base - self.phir[r][target, idx[:, a : a + 1]]
        to_plus = self.phi1[target, self.col_plus]
        to_minus = self.phi1[target, self.col_minus]

        n_h = hole_idx.shape[1]
        fixed = _ordered_pairs(mu) * _ordered_pairs(nu)
        for r in lengths:
            if r != 1:
                fixed = fixed * _ordered_pairs(strings[r])
        if n_h and nu.shape[1]:
            fixed = fixed / np.prod(
                (nu[:, :, None] - mu[:, None, :]) ** 2, axis=(1, 2)
            )
        fixed = fixed * self.plugin.batch(mu, strings) * weight
        umklapp_base = {
            upsilon: np.prod(nu - upsilon * q, axis=1)
            / np.prod(mu - upsilon * q, axis=1)
            for upsilon in (1, -1)
        }
        hole_log = self.hole_log[hole_idx]
        part_log = self.part_log[part_idx]

        for l_plus, l_minus in umklapps:
            shift = base - l_plus * to_plus - l_minus * to_minus
            theta_plus = shift[:, 0] - l_plus
            theta_minus = shift[:, 1] + l_minus
            exponent = 2.0 * np.sum(shift[:, 2 : 2 + n_h] * hole_log, axis=1)
            exponent += 2.0 * np.sum(shift[:, 2 + n_h :] * part_log, axis=1)
            density = fixed * np.exp(exponent)
            density = density * umklapp_base[1] ** (2 * l_plus)
            density = density * umklapp_base[-1] ** (2 * l_minus)
            cone = np.exp(
                -np.outer(theta_plus**2, self.log_cone[1])
                - np.outer(theta_minus**2, self.log_cone[-1])
            )
            phase = np.exp(1j * self.m * (l_plus - l_minus) * self.dressed.fermi.p_F)
            sums[(l_plus, l_minus)] += phase * np.sum(
                density[:, None] * osc * cone, axis=0
            )


def _limited(fn: DressedFn, points: np.ndarray) -> np.ndarray:
    """Evaluate ``fn`` with real parts clipped to ``+-FAR_RAPIDITY``."""
    clipped = np.clip(points.real, -FAR_RAPIDITY, FAR_RAPIDITY) + 1j * points.imag
    return fn(clipped)


def _strings_for(series: Dict, dressed: DressedState) -> List[StringSpec]:
    wanted = [int(r) for r, n in series.get("max_strings", {}).items() if n > 0]
    if not wanted:
        return []
    return allowed_strings(dressed.params, max(wanted), dressed)


def evaluate_term(
    m: int,
    t: float,
    n_config: NConfig,
    series: Dict,
    dressed: DressedState,
    engine: Optional[SeriesEngine] = None,
) -> SeriesTerm:
    """Evaluate one term of the series, ``(-1)^{m s_gamma}`` included.

    :raises: :py:exc:`RegimeError` on the light cone,
      :py:exc:`ConvergenceError` when the quadrature is not finite.
    """
    if not n_config.is_balanced:
        raise DomainError(f"Unbalanced occupation numbers {n_config.to_dict()}")
    if engine is None:
        engine = SeriesEngine(m, t, series, dressed, _strings_for(series, dressed))
    results = engine.evaluate(
        n_config.n_holes, dict(n_config.n_strings), [n_config.umklapp]
    )
    value, error = results[n_config.umklapp]
    return SeriesTerm(
        {"n_config": n_config, "value": value, "quadrature_error_estimate": error}
    )


def evaluate_correlator(
    m: int,
    t: float,
    series: Dict,
    dressed: DressedState,
    n_jobs: int = 1,
) -> CorrelatorValue:
    """Evaluate the truncated correlator with its per-term breakdown.

    Terms are summed in enumeration order.
    """
    strings = _strings_for(series, dressed)
    engine = SeriesEngine(m, t, series, dressed, strings)
    configs = enumerate_configs(series, [s.r for s in strings])
    groups: "OrderedDict[Tuple, List[NConfig]]" = OrderedDict()
    for config in configs:
        groups.setdefault((config.n_holes, config.n_strings), []).append(config)
    logger.info("Evaluating %d terms in %d groups", len(configs), len(groups))

    def run(key):
        n_holes, n_strings = key
        return engine.evaluate(
            n_holes, dict(n_strings), [c.umklapp for c in groups[key]]
        )

    keys = list(groups)
    if n_jobs == 1:
        evaluated = [run(key) for key in keys]
    else:
        evaluated = Parallel(n_jobs=n_jobs, prefer="threads")(
            delayed(run)(key) for key in keys
        )
    by_key = dict(zip(keys, evaluated))
    terms = []
    for config in configs:
        value, error = by_key[(config.n_holes, config.n_strings)][config.umklapp]
        terms.append(
            SeriesTerm(
                {"n_config": config, "value": value, "quadrature_error_estimate": error}
            )
        )
    total = complex(sum(term.value for term in terms))
    return CorrelatorValue({"total": total, "terms": terms})


def remainder_bound(delta: float, m: int, t: float, v_F: float) -> float:
    """The remainder estimate of the series at radius ``delta``, without its
    constant:

    ``delta |ln delta| + sum_ups (delta^2 |m_ups| + delta |ln |m_ups|| +
    exp(-delta |m_ups|))`` with ``m_ups = ups m - v_F t``.
    """
    value = delta * abs(math.log(delta))
    for upsilon in (1, -1):
        distance = abs(upsilon * m - v_F * t)
        value += delta**2 * distance + delta * abs(math.log(distance))
        value += math.exp(-delta * distance)
    return value


def delta_stability(
    m: int,
    t: float,
    series: Dict,
    dressed: DressedState,
    halvings: int = 2,
    n_jobs: int = 1,
) -> DeltaStability:
    """Evaluate the correlator at ``delta``, ``delta/2``, ... and fit the
    constant of the remainder estimate to the observed differences.

    The endpoints of the hole and particle contours contribute terms of the
    order of ``exp(-delta |m_ups|)``, so the differences only shrink where
    ``delta |m_ups|`` is large.
    """
    if halvings < 1:
        raise DomainError(f"At least one halving is needed, got {halvings}")
    v_F = dressed.fermi.v_F
    deltas = [series["delta"] * 0.5**k for k in range(halvings + 1)]
    totals = [
        evaluate_correlator(m, t, {**series, "delta": d}, dressed, n_jobs).total
        for d in deltas
    ]
    differences = [abs(a - b) for a, b in zip(totals[:-1], totals[1:])]
    bounds = [remainder_bound(d, m, t, v_F) for d in deltas]
    constant = max(
        diff / (bounds[i] + bounds[i + 1]) for i, diff in enumerate(differences)
    )
    logger.info(
        "delta stability at m = %d, t = %g: differences %s, C = %.3g",
        m,
        t,
        ", ".join(f"{d:.3g}" for d in differences),
        constant,
    )
    return DeltaStability(
        {
            "deltas": deltas,
            "totals": totals,
            "differences": differences,
            "bounds": bounds,
            "constant": constant,
        }
    )


def _bisect(func: Callable[[float], float], lower: float, upper: float) -> float:
    try:
        return optimize.brentq(
            func, lower, upper, xtol=_INVERSION_TOL, rtol=_INVERSION_RTOL
        )
    except ValueError as exc:
        raise DomainError(f"Cannot invert on [{lower}, {upper}]: {exc}") from exc


class _Branch:
    """A monotone piece of a momentum function along a straight line.

    ``x -> momentum(base + direction * x)`` for ``x`` in ``[lower, upper]``.
    """

    def __init__(
        self,
        fn: DressedFn,
        base: complex,
        direction: float,
        lower: float,
        upper: float,
        offset: float,
        label: str,
    ) -> None:
        self.fn = fn
        self.base = base
        self.direction = direction
        self.lower = lower
        self.upper = upper
        self.offset = offset
        self.label = label
        samples = np.linspace(lower, upper, _MONOTONE_SAMPLES)
        values = self.momentum(samples)
        steps = np.diff(values)
        tol = _MONOTONE_TOL * max(1.0, float(np.max(np.abs(values))))
        if not (np.all(steps > -tol) or np.all(steps < tol)) or np.all(
            np.abs(steps) <= tol
        ):
            raise NonMonotoneError(
                f"The momentum is not monotone along the {label} piece"
            )
        self.increasing = bool(np.sum(steps) > 0)
        ends = self.momentum(np.array([lower, upper]))
        self.k_low, self.k_high = float(ends.min()), float(ends.max())

    def rapidity(self, x) -> np.ndarray:
        return self.base + self.direction * np.asarray(x, dtype=float)

    def momentum(self, x) -> np.ndarray:
        return self.fn(self.rapidity(x)).real + self.offset

    def contains(self, k: float) -> bool:
        return self.k_low <= k <= self.k_high

    def invert(self, k: float) -> complex:
        if not self.contains(k):
            raise DomainError(f"k = {k} is outside the {self.label} piece")
        x = _bisect(
            lambda x: float(self.momentum(np.array([x]))[0]) - k, self.lower, self.upper
        )
        return complex(self.rapidity(x))


class MomentumRep:
    """Momentum representation of the massive modes.

    Holes take momenta in ``(-p_F, p_F)``; particles in ``(p_F, p_mx)``
    through the redefined momentum ``p_1 + 2 p_F u_1^+`` on the left real
    half-line and ``+ 2 pi`` on the left half-line and on ``R + i pi/2``;
    an ``r``-string in the image of its contour. A particle on the left
    half-line enters the rapidity descriptor with ``l_ups + ups u_1^+``.

    .. attribute:: p_mx

      ``2 pi - p_F - 2 p_F sgn(pi - 2 zeta)``

      :type: float

    .. attribute:: intervals

      Mapping from ``"hole"``, ``1`` and the string lengths to the momentum
      interval ``(low, high)``.

      :type: dict
    """

    def __init__(
        self, dressed: DressedState, strings: Sequence[StringSpec] = ()
    ) -> None:
        self.dressed = dressed
        fermi = dressed.fermi
        zeta = dressed.params.zeta
        q, p_F = fermi.q, fermi.p_F
        self.u1 = u_sigma(1, 1, zeta)
        self.p_mx = 2.0 * math.pi - p_F - 2.0 * p_F * sgn(math.pi - 2.0 * zeta)
        p1 = dressed.p1
        far = FAR_RAPIDITY
        self.hole_branch = _Branch(p1, 0j, 1.0, -q, q, 0.0, "hole")
        half = 0.5j * math.pi
        self.particle_branches = [
            _Branch(p1, 0j, 1.0, q, far, 0.0, "right"),
            _Branch(p1, half, -1.0, -far, far, 2.0 * math.pi, "line"),
            _Branch(
                p1, 0j, 1.0, -far, -q, 2.0 * math.pi + 2.0 * p_F * self.u1, "left"
            ),
        ]
        self.string_branches = {}
        for spec in strings:
            if spec.exists and spec.s_r in (1, -1):
                self.string_branches[spec.r] = _Branch(
                    dressed.momentum(spec.r),
                    0.5j * math.pi * spec.delta_r,
                    float(spec.s_r),
                    -far,
                    far,
                    0.0,
                    f"{spec.r}-string",
                )
        self.intervals = {
            "hole": (-p_F, p_F),
            1: (p_F, self.p_mx),
        }
        for r, branch in self.string_branches.items():
            self.intervals[r] = (branch.k_low, branch.k_high)
        self._check_junctions()

    def _check_junctions(self) -> None:
        branches = sorted(self.particle_branches, key=lambda b: b.k_low)
        for first, second in zip(branches[:-1], branches[1:]):
            gap = abs(second.k_low - first.k_high)
            if gap > 1e-6:
                logger.warning(
                    "Particle momenta jump by %.3g between the %s and %s pieces",
                    gap,
                    first.label,
                    second.label,
                )

    def hole_rapidity(self, k: float) -> complex:
        return self.hole_branch.invert(k)

    def particle_rapidity(self, k: float) -> Tuple[complex, str]:
        """Return ``(rapidity, piece label)`` of a particle of momentum ``k``."""
        for branch in self.particle_branches:
            if branch.contains(k):
                return branch.invert(k), branch.label
        raise DomainError(f"k = {k} is outside the particle interval")

    def string_rapidity(self, r: int, k: float) -> complex:
        if r not in self.string_branches:
            raise DomainError(f"No momentum representation of the {r}-string")
        return self.string_branches[r].invert(k)

    def rapidity(self, r: int, k: float) -> complex:
        if r == 1:
            return self.particle_rapidity(k)[0]
        return self.string_rapidity(r, k)

    def e(self, r: int, k: float) -> float:
        """Dressed energy as a function of momentum, ``eps_r o p_r^{-1}``."""
        lam = self.rapidity(r, k)
        return float(self.dressed.epsilon(r)(np.array([lam]))[0].real)

    def e_hole(self, k: float) -> float:
        lam = self.hole_rapidity(k)
        return float(self.dressed.eps1(np.array([lam]))[0].real)

    def u(self, r: int, k: float, v: float) -> float:
        """Return ``k - e_r(k) / v``."""
        if v == 0:
            raise DomainError("u is undefined at v = 0")
        return k - self.e(r, k) / v

    def descriptor(
        self,
        holes: Sequence[float],
        strings: Dict[int, Sequence[float]],
        umklapp: Tuple[int, int],
        operator_spin: int,
    ) -> Tuple[ExcitationY, complex]:
        """Map momenta to a rapidity descriptor and the Jacobian
        ``prod p'(lambda)`` of the map."""
        l_plus, l_minus = umklapp
        mus = [self.hole_rapidity(k) for k in holes]
        slopes = self.dressed.p1.deriv(np.array(mus, dtype=complex))
        jacobian = complex(np.prod(slopes))
        description = {"holes": [[z.real, z.imag] for z in mus], "strings": {}}
        for r, momenta in strings.items():
            rapidities = []
            for k in momenta:
                if r == 1:
                    lam, label = self.particle_rapidity(k)
                    if label == "left":
                        l_plus += self.u1
                        l_minus -= self.u1
                else:
                    lam = self.string_rapidity(r, k)
                rapidities.append(lam)
            if rapidities:
                derivative = self.dressed.momentum(r).deriv(
                    np.array(rapidities, dtype=complex)
                )
                jacobian *= complex(np.prod(derivative))
                description["strings"][str(r)] = [[z.real, z.imag] for z in rapidities]
        description["umklapp"] = [l_plus, l_minus]
        description["operator_spin"] = operator_spin
        return ExcitationY(description), jacobian

    def density(
        self,
        holes: Sequence[float],
        strings: Dict[int, Sequence[float]],
        umklapp: Tuple[int, int],
        plugin: DensityPlugin,
    ) -> Tuple[complex, ExcitationY]:
        """Return the momentum-space density ``F(Y) / prod p'`` and ``Y``."""
        Y, jacobian = self.descriptor(holes, strings, umklapp, plugin.operator_spin)
        value = form_factor_density(Y, self.dressed, plugin)
        return value / jacobian, Y


def momentum_rep(series: Dict, dressed: DressedState) -> MomentumRep:
    """Build the momentum representation for the bound states the
    truncation of ``series`` asks for."""
    return MomentumRep(dressed, _strings_for(series, dressed))
