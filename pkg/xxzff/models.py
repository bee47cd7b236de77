"""
xxzff.models
~~~~~~~~~~~~

This module contains the immutable value objects passed between the
solvers and returned to callers.

"""

import math
from collections import namedtuple
from functools import update_wrapper
from typing import Any, Dict, Iterable, Optional, Tuple

import numpy as np


# Using a closure rather than a class-based decorator as class based
# decorators don't work right with `update_wrapper`, causing help(class) to
# not work correctly.
def _inflate_to_namedtuple(orig_cls):
    keys = sorted(orig_cls._fields.keys())
    fields = orig_cls._fields
    name = orig_cls.__name__
    orig_cls.__name__ += "Super"
    ntup = namedtuple(name, keys)
    ntup.__name__ = name + "NamedTuple"
    ntup.__new__.__defaults__ = (None,) * len(keys)
    new_cls = type(
        name, (ntup, orig_cls), {"__slots__": (), "__doc__": orig_cls.__doc__}
    )
    update_wrapper(_inflate_to_namedtuple, new_cls)
    orig_new = new_cls.__new__

    def new(cls, *args, **kwargs):
        """Create new instance."""
        if (args and kwargs) or len(args) > 1:
            raise ValueError(
                "Only provide a single (dict) positional argument"
                " or use keyword arguments. Do not use both."
            )
        if args:
            values = args[0] if args[0] else {}

            for field, default in fields.items():
                if callable(default):
                    kwargs[field] = default(values.get(field))
                else:
                    kwargs[field] = values.get(field, default)

        return orig_new(cls, **kwargs)

    new_cls.__new__ = staticmethod(new)
    return new_cls


def _float(value: Any) -> Optional[float]:
    return None if value is None else float(value)


def _complex_tuple(values: Optional[Iterable[Any]]) -> Tuple[complex, ...]:
    if values is None:
        return ()
    return tuple(_to_complex(v) for v in values)


def _to_complex(value: Any) -> complex:
    if isinstance(value, (list, tuple)):
        return complex(value[0], value[1])
    return complex(value)


def _string_map(
    values: Optional[Dict[Any, Iterable[Any]]]
) -> Tuple[Tuple[int, Tuple[complex, ...]], ...]:
    if not values:
        return ()
    pairs = ((int(r), _complex_tuple(rapidities)) for r, rapidities in values.items())
    return tuple(sorted((r, rap) for r, rap in pairs if rap))


def _count_map(values: Optional[Dict[Any, int]]) -> Tuple[Tuple[int, int], ...]:
    if not values:
        return ()
    if isinstance(values, dict):
        values = values.items()
    return tuple(sorted((int(r), int(n)) for r, n in values if int(n) > 0))


def _pair(values: Optional[Iterable[Any]]) -> Tuple[int, int]:
    if values is None:
        return (0, 0)
    plus, minus = values
    return (int(plus), int(minus))


def _tuple(values: Optional[Iterable[Any]]) -> Tuple[Any, ...]:
    if values is None:
        return ()
    return tuple(values)


def _array(values: Optional[Iterable[Any]]) -> np.ndarray:
    if values is None:
        return np.zeros(0)
    array = np.asarray(values, dtype=float)
    array.setflags(write=False)
    return array


@_inflate_to_namedtuple
class ModelParams:
    """Parameters of the chain in the massless regime.

    .. attribute:: J

      The exchange coupling, positive.

      :type: float

    .. attribute:: zeta

      The anisotropy angle, in ``(0, pi)``.

      :type: float

    .. attribute:: h

      The longitudinal magnetic field, in ``(0, h_c)``.

      :type: float
    """

    J: float
    zeta: float
    h: float

    __slots__ = ()
    _fields = {
        "J": _float,
        "zeta": _float,
        "h": _float,
    }

    @property
    def h_c(self) -> float:
        """The critical field ``8 J cos(zeta/2)^2``."""
        return 8.0 * self.J * math.cos(self.zeta / 2.0) ** 2

    @property
    def is_free_fermion(self) -> bool:
        """True at ``zeta = pi/2`` where every kernel vanishes."""
        return abs(self.zeta - math.pi / 2.0) < 1e-14


@_inflate_to_namedtuple
class QuadGrid:
    """Gauss-Legendre discretization of the Fermi zone ``[-q, q]``.

    .. attribute:: n_nodes

      :type: int

    .. attribute:: nodes

      Strictly increasing nodes.

      :type: numpy.ndarray

    .. attribute:: weights

      Positive weights summing to ``2 q``.

      :type: numpy.ndarray

    .. attribute:: q

      :type: float
    """

    n_nodes: int
    nodes: np.ndarray
    weights: np.ndarray
    q: float

    __slots__ = ()
    _fields = {
        "n_nodes": None,
        "nodes": _array,
        "weights": _array,
        "q": _float,
    }


@_inflate_to_namedtuple
class FermiData:
    """Fermi-point data of the ground state.

    .. attribute:: q

      The endpoint of the Fermi zone.

      :type: float

    .. attribute:: p_F

      The Fermi momentum ``p_1(q)``.

      :type: float

    .. attribute:: v_F

      The Fermi velocity ``eps_1'(q) / p_1'(q)``.

      :type: float
    """

    q: float
    p_F: float
    v_F: float

    __slots__ = ()
    _fields = {
        "q": _float,
        "p_F": _float,
        "v_F": _float,
    }

    def light_cone(self, upsilon: int, m: float, t: complex) -> complex:
        """Return ``upsilon m - v_F t``."""
        return upsilon * m - self.v_F * t


@_inflate_to_namedtuple
class StringSpec:
    """Classification of one bound state of length ``r``.

    .. attribute:: r

      :type: int

    .. attribute:: exists

      :type: bool

    .. attribute:: status

      One of ``"allowed"``, ``"forbidden"`` or ``"degenerate"``.

      :type: str

    .. attribute:: delta_r

      The parity: the string is centred on ``R + i delta_r pi/2``.

      :type: int

    .. attribute:: kappa_r

      ``floor((r-1) zeta / pi)``, only set when ``zeta < pi/2``.

      :type: int | None

    .. attribute:: s_r

      Orientation of the string contour, the sign of ``p_r'`` along it.
      Zero when it was not computed or is not constant.

      :type: int

    .. attribute:: uncovered

      Values of ``k`` that no condition block constrained.

      :type: tuple[int]
    """

    r: int
    exists: bool
    status: str
    delta_r: int
    kappa_r: Optional[int]
    s_r: int
    uncovered: Tuple[int, ...]

    __slots__ = ()
    _fields = {
        "r": None,
        "exists": False,
        "status": "forbidden",
        "delta_r": 0,
        "kappa_r": None,
        "s_r": 0,
        "uncovered": _tuple,
    }


@_inflate_to_namedtuple
class ExcitationY:
    """Descriptor of the massive modes of an excited state.

    .. attribute:: holes

      Hole rapidities.

      :type: tuple[complex]

    .. attribute:: strings

      Pairs ``(r, rapidities)`` sorted by ``r``; ``r = 1`` holds the
      particles. Species without rapidities are omitted.

      :type: tuple[tuple[int, tuple[complex]]]

    .. attribute:: umklapp

      The pair ``(l_plus, l_minus)``.

      :type: tuple[int, int]

    .. attribute:: operator_spin

      Pseudo-spin of the operator, in ``{-1, 0, 1}``.

      :type: int
    """

    holes: Tuple[complex, ...]
    strings: Tuple[Tuple[int, Tuple[complex, ...]], ...]
    umklapp: Tuple[int, int]
    operator_spin: int

    __slots__ = ()
    _fields = {
        "holes": _complex_tuple,
        "strings": _string_map,
        "umklapp": _pair,
        "operator_spin": lambda s: 0 if s is None else int(s),
    }

    @property
    def n_holes(self) -> int:
        return len(self.holes)

    def rapidities(self, r: int) -> Tuple[complex, ...]:
        """Return the rapidities of the ``r``-strings (particles for r = 1)."""
        for length, values in self.strings:
            if length == r:
                return values
        return ()

    @property
    def particles(self) -> Tuple[complex, ...]:
        return self.rapidities(1)

    def ell(self, upsilon: int) -> int:
        return self.umklapp[0] if upsilon > 0 else self.umklapp[1]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "holes": [[z.real, z.imag] for z in self.holes],
            "strings": {
                str(r): [[z.real, z.imag] for z in values]
                for r, values in self.strings
            },
            "umklapp": list(self.umklapp),
            "operator_spin": self.operator_spin,
        }


@_inflate_to_namedtuple
class Exponents:
    """Critical exponents of an excitation.

    .. attribute:: theta_plus

      :type: complex

    .. attribute:: theta_minus

      :type: complex

    .. attribute:: delta_plus

      ``theta_plus ** 2``

      :type: complex

    .. attribute:: delta_minus

      ``theta_minus ** 2``

      :type: complex
    """

    theta_plus: complex
    theta_minus: complex
    delta_plus: complex
    delta_minus: complex

    __slots__ = ()
    _fields = {
        "theta_plus": None,
        "theta_minus": None,
        "delta_plus": None,
        "delta_minus": None,
    }

    def theta(self, upsilon: int) -> complex:
        return self.theta_plus if upsilon > 0 else self.theta_minus

    def delta(self, upsilon: int) -> complex:
        return self.delta_plus if upsilon > 0 else self.delta_minus


@_inflate_to_namedtuple
class NConfig:
    """Occupation numbers selecting one term of a series.

    .. attribute:: n_holes

      :type: int

    .. attribute:: n_strings

      Pairs ``(r, n_r)`` with ``n_r > 0``, sorted by ``r``; ``r = 1`` counts
      the particles.

      :type: tuple[tuple[int, int]]

    .. attribute:: umklapp

      :type: tuple[int, int]
    """

    n_holes: int
    n_strings: Tuple[Tuple[int, int], ...]
    umklapp: Tuple[int, int]

    __slots__ = ()
    _fields = {
        "n_holes": lambda n: 0 if n is None else int(n),
        "n_strings": _count_map,
        "umklapp": _pair,
    }

    def count(self, r: int) -> int:
        return dict(self.n_strings).get(r, 0)

    @property
    def is_balanced(self) -> bool:
        """True when ``n_h = l_+ + l_- + sum_r r n_r``."""
        return self.n_holes == sum(self.umklapp) + sum(
            r * n for r, n in self.n_strings
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "n_holes": self.n_holes,
            "n_strings": {str(r): n for r, n in self.n_strings},
            "umklapp": list(self.umklapp),
        }


@_inflate_to_namedtuple
class SeriesTerm:
    """One evaluated multiple integral of the correlator series.

    .. attribute:: n_config

      :type: :py:class:`NConfig`

    .. attribute:: value

      :type: complex

    .. attribute:: quadrature_error_estimate

      Difference between the extrapolated value and the value at the
      smallest imaginary part of ``t``, plus the extrapolation spread.

      :type: float
    """

    n_config: NConfig
    value: complex
    quadrature_error_estimate: float

    __slots__ = ()
    _fields = {
        "n_config": None,
        "value": None,
        "quadrature_error_estimate": _float,
    }


@_inflate_to_namedtuple
class CorrelatorValue:
    """A truncated correlator and its per-term breakdown.

    .. attribute:: total

      :type: complex

    .. attribute:: terms

      :type: tuple[SeriesTerm]
    """

    total: complex
    terms: Tuple[SeriesTerm, ...]

    __slots__ = ()
    _fields = {
        "total": None,
        "terms": _tuple,
    }


@_inflate_to_namedtuple
class DeltaStability:
    """Dependence of a truncated correlator on the detachment radius.

    .. attribute:: deltas

      Radii, each half of the previous one.

      :type: tuple[float]

    .. attribute:: totals

      :type: tuple[complex]

    .. attribute:: differences

      ``|total(delta_i) - total(delta_{i+1})|``

      :type: tuple[float]

    .. attribute:: bounds

      The remainder estimate at every radius, without its constant.

      :type: tuple[float]

    .. attribute:: constant

      Smallest ``C`` with every difference below ``C`` times the sum of the
      estimates at its two radii.

      :type: float
    """

    deltas: Tuple[float, ...]
    totals: Tuple[complex, ...]
    differences: Tuple[float, ...]
    bounds: Tuple[float, ...]
    constant: float

    __slots__ = ()
    _fields = {
        "deltas": _tuple,
        "totals": _complex_tuple,
        "differences": _tuple,
        "bounds": _tuple,
        "constant": _float,
    }


@_inflate_to_namedtuple
class TransformValue:
    """Closed-form Fourier transform of the light-cone power laws.

    .. attribute:: value

      The regular part.

      :type: float

    .. attribute:: delta_terms

      Triples ``(n, ups, weight)`` of Dirac delta contributions that arise
      when an exponent vanishes; ``ups = 0`` when both vanish.

      :type: tuple

    .. attribute:: finite

      False when an integrable edge divergence was hit exactly.

      :type: bool
    """

    value: float
    delta_terms: Tuple[Any, ...]
    finite: bool

    __slots__ = ()
    _fields = {
        "value": _float,
        "delta_terms": _tuple,
        "finite": True,
    }


@_inflate_to_namedtuple
class ResponseValue:
    """Contribution of one channel to the dynamic response function.

    .. attribute:: n_config

      :type: :py:class:`NConfig`

    .. attribute:: value

      :type: float

    .. attribute:: error_estimate

      :type: float

    .. attribute:: distributional

      True when an exponent vanished and the channel was integrated on the
      delta constraint.

      :type: bool

    .. attribute:: edge_hits

      Number of abscissae that landed within ``1e-6`` of an edge.

      :type: int
    """

    n_config: NConfig
    value: float
    error_estimate: float
    distributional: bool
    edge_hits: int

    __slots__ = ()
    _fields = {
        "n_config": None,
        "value": _float,
        "error_estimate": _float,
        "distributional": False,
        "edge_hits": 0,
    }


@_inflate_to_namedtuple
class ResponseTotal:
    """The truncated dynamic response function with its breakdown.

    .. attribute:: value

      :type: float

    .. attribute:: channels

      :type: tuple[ResponseValue]

    .. attribute:: edge_trim

      The trim of the momentum intervals that was used.

      :type: float
    """

    value: float
    channels: Tuple[ResponseValue, ...]
    edge_trim: float

    __slots__ = ()
    _fields = {
        "value": _float,
        "channels": _tuple,
        "edge_trim": _float,
    }


@_inflate_to_namedtuple
class RestrictedSumValue:
    """Both sides of the restricted summation identity.

    .. attribute:: lhs

      The truncated sum.

      :type: complex

    .. attribute:: accelerated

      The truncated sum after the oscillatory tail correction.

      :type: complex

    .. attribute:: rhs

      :type: complex

    .. attribute:: relative_error

      ``|accelerated - rhs| / |rhs|``

      :type: float

    .. attribute:: cut

      :type: int
    """

    lhs: complex
    accelerated: complex
    rhs: complex
    relative_error: float
    cut: int

    __slots__ = ()
    _fields = {
        "lhs": None,
        "accelerated": None,
        "rhs": None,
        "relative_error": _float,
        "cut": None,
    }


@_inflate_to_namedtuple
class LeadingCheck:
    """Numerical reconstruction of a light-cone power law.

    .. attribute:: numeric

      :type: complex

    .. attribute:: closed_form

      :type: complex

    .. attribute:: ratio

      ``|numeric / closed_form|``

      :type: float

    .. attribute:: phase_error

      :type: float

    .. attribute:: finite_size

      The right-hand side of the restricted-sum identity at the same size.

      :type: complex

    .. attribute:: finite_size_phase_error

      :type: float
    """

    numeric: complex
    closed_form: complex
    ratio: float
    phase_error: float
    finite_size: complex
    finite_size_phase_error: float

    __slots__ = ()
    _fields = {
        "numeric": None,
        "closed_form": None,
        "ratio": _float,
        "phase_error": _float,
        "finite_size": None,
        "finite_size_phase_error": _float,
    }


@_inflate_to_namedtuple
class ThermoReport:
    """Summary of a solved ground state.

    .. attribute:: fermi

      :type: :py:class:`FermiData`

    .. attribute:: residuals

      Maximal residuals of the integral equations and identities, by name.

      :type: dict

    .. attribute:: cache_hit

      :type: bool
    """

    fermi: FermiData
    residuals: Dict[str, float]
    cache_hit: bool

    __slots__ = ()
    _fields = {
        "fermi": None,
        "residuals": None,
        "cache_hit": False,
    }


def _labels(values: Optional[Iterable[Any]]) -> Tuple[int, ...]:
    if values is None:
        return ()
    return tuple(sorted(int(v) for v in values))


@_inflate_to_namedtuple
class DiscreteZ:
    """Particle and hole labels of the massless modes at one Fermi point.

    .. attribute:: particles

      Distinct non-negative integers, sorted.

      :type: tuple[int]

    .. attribute:: holes

      Distinct non-negative integers, sorted.

      :type: tuple[int]
    """

    particles: Tuple[int, ...]
    holes: Tuple[int, ...]

    __slots__ = ()
    _fields = {
        "particles": _labels,
        "holes": _labels,
    }

    @property
    def ell(self) -> int:
        """``n_p - n_h``"""
        return len(self.particles) - len(self.holes)

    @property
    def total(self) -> int:
        """``sum_a p_a + sum_a (h_a + 1)``"""
        return sum(self.particles) + sum(h + 1 for h in self.holes)


@_inflate_to_namedtuple
class RestrictedSumConfig:
    """Parameters of one restricted sum.

    .. attribute:: nu

      :type: float

    .. attribute:: ell

      :type: int

    .. attribute:: L

      :type: float

    .. attribute:: x

      :type: float

    .. attribute:: p_cut

      Largest particle label summed over.

      :type: int

    .. attribute:: h_cut

      Largest hole label summed over.

      :type: int
    """

    nu: float
    ell: int
    L: float
    x: float
    p_cut: int
    h_cut: int

    __slots__ = ()
    _fields = {
        "nu": _float,
        "ell": lambda n: 0 if n is None else int(n),
        "L": _float,
        "x": _float,
        "p_cut": None,
        "h_cut": None,
    }

    @property
    def phase(self) -> float:
        """``x / L``"""
        return self.x / self.L


def _momentum_map(
    values: Optional[Dict[Any, Iterable[Any]]]
) -> Tuple[Tuple[int, Tuple[float, ...]], ...]:
    if not values:
        return ()
    if isinstance(values, dict):
        values = values.items()
    pairs = ((int(r), tuple(float(k) for k in momenta)) for r, momenta in values)
    return tuple(sorted((r, k) for r, k in pairs if k))


@_inflate_to_namedtuple
class MomentumK:
    """Momenta of the massive modes of an excited state.

    .. attribute:: holes

      Hole momenta in ``(-p_F, p_F)``.

      :type: tuple[float]

    .. attribute:: strings

      Pairs ``(r, momenta)``; ``r = 1`` holds the particles.

      :type: tuple[tuple[int, tuple[float]]]

    .. attribute:: umklapp

      :type: tuple[int, int]

    .. attribute:: operator_spin

      :type: int
    """

    holes: Tuple[float, ...]
    strings: Tuple[Tuple[int, Tuple[float, ...]], ...]
    umklapp: Tuple[int, int]
    operator_spin: int

    __slots__ = ()
    _fields = {
        "holes": lambda v: () if v is None else tuple(float(k) for k in v),
        "strings": _momentum_map,
        "umklapp": _pair,
        "operator_spin": lambda s: 0 if s is None else int(s),
    }


@_inflate_to_namedtuple
class VerifyCheck:
    """Outcome of one check of the verification suite.

    .. attribute:: name

      :type: str

    .. attribute:: passed

      :type: bool

    .. attribute:: value

      The measured deviation.

      :type: float

    .. attribute:: tolerance

      :type: float

    .. attribute:: report_only

      True for diagnostics that never fail the suite.

      :type: bool
    """

    name: str
    passed: bool
    value: float
    tolerance: float
    report_only: bool

    __slots__ = ()
    _fields = {
        "name": None,
        "passed": False,
        "value": _float,
        "tolerance": _float,
        "report_only": False,
    }
