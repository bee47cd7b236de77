"""This is an internal module used for validating run configurations.

Internal code for validating the configuration dictionary, excitation
descriptions and cache documents.

This code is only intended for internal use and is subject to change in ways
that may break any direct use of it.

"""

import math
from typing import Any, Dict

from voluptuous import (
    All,
    Any as AnyOf,
    Coerce,
    ExactSequence,
    In,
    Invalid,
    Length,
    Range,
    Required,
    Schema,
)

# Pylint doesn't like the private function type naming for the callable
# objects below. Given the consistent use of them, the current names seem
# preferable to blindly following pylint.
#
# pylint: disable=invalid-name

CACHE_FORMAT = 1

_number = All(AnyOf(float, int), Coerce(float))

_positive = All(_number, Range(min=0, min_included=False))

_angle = All(_number, Range(min=0, max=math.pi, min_included=False, max_included=False))

_count = All(int, Range(min=0))

_nodes = All(int, Range(min=4))

_spin = In([-1, 0, 1])

_rapidity = AnyOf(_number, ExactSequence([_number, _number]))

_string_length = All(Coerce(int), Range(min=1))

_bound_state_length = All(Coerce(int), Range(min=2))


def _below_critical(model: Dict[str, float]) -> Dict[str, float]:
    h_c = 8.0 * model["J"] * math.cos(model["zeta"] / 2.0) ** 2
    if not model["h"] < h_c:
        raise Invalid(f"value must be below h_c = {h_c:.12g}", path=["h"])
    return model


def _balanced(excitation: Dict[str, Any]) -> Dict[str, Any]:
    n_holes = len(excitation["holes"])
    moved = sum(excitation["umklapp"]) + sum(
        r * len(rapidities) for r, rapidities in excitation["strings"].items()
    )
    if n_holes != moved:
        raise Invalid(
            f"{n_holes} holes do not balance l_+ + l_- + sum r n_r = {moved}",
            path=["holes"],
        )
    return excitation


def _increasing(values):
    if any(b <= a for a, b in zip(values[:-1], values[1:])):
        raise Invalid("nodes must be strictly increasing")
    return values


_model = All(
    {
        Required("J", default=1.0): _positive,
        Required("zeta"): _angle,
        Required("h"): _positive,
    },
    _below_critical,
)

_grid = {Required("n_nodes", default=128): All(int, Range(min=32))}

_series = {
    Required("delta", default=0.05): _positive,
    Required("nodes_per_arc", default=24): _nodes,
    Required("max_holes", default=2): _count,
    Required("max_particles", default=2): _count,
    Required("max_strings", default=dict): {_bound_state_length: _count},
    Required("umklapp_window", default=2): _count,
    Required("plugin", default="unit"): In(["unit", "sech"]),
    Required("im_t", default=lambda: [1e-3, 5e-4, 2.5e-4]): All(
        [_positive], Length(min=2)
    ),
    Required("arc_warp", default="linear"): In(["linear", "quadratic"]),
    Required("operator_spin", default=0): _spin,
}

_response = {
    Required("edge_trim", default=None): AnyOf(None, _positive),
    Required("s_window", default=2): _count,
    Required("nodes", default=24): _nodes,
    Required("max_holes", default=1): _count,
    Required("max_particles", default=0): _count,
    Required("max_strings", default=dict): {_bound_state_length: _count},
    Required("umklapp_window", default=1): _count,
    Required("operator_spin", default=0): _spin,
    Required("plugin", default="unit"): In(["unit", "sech"]),
}

_excitation = All(
    {
        Required("holes", default=list): [_rapidity],
        Required("strings", default=dict): {_string_length: [_rapidity]},
        Required("umklapp", default=lambda: [0, 0]): ExactSequence([int, int]),
        Required("operator_spin", default=0): _spin,
    },
    _balanced,
)

validate_excitation = Schema(_excitation)

validate_model = Schema(_model)

validate_config = Schema(
    {
        Required("model"): _model,
        Required("grid", default=dict): _grid,
        Required("series", default=dict): _series,
        Required("response", default=dict): _response,
        "excitation": _excitation,
        Required("cache_dir", default=None): AnyOf(None, str),
        Required("output", default="json"): In(["json", "csv"]),
        Required("n_jobs", default=1): All(int, AnyOf(Range(min=1), -1)),
    }
)

_function_record = {
    Required("values"): [_number],
    Required("coefficients"): [_number],
}

validate_cache_document = Schema(
    {
        Required("format"): In([CACHE_FORMAT]),
        Required("params"): {
            Required("J"): _number,
            Required("zeta"): _number,
            Required("h"): _number,
        },
        Required("n_nodes"): int,
        Required("fermi"): {
            Required("q"): _positive,
            Required("p_F"): _positive,
            Required("v_F"): _positive,
        },
        Required("nodes"): All([_number], _increasing),
        Required("weights"): [_positive],
        Required("functions"): {
            Required("eps1"): _function_record,
            Required("p1_deriv"): _function_record,
            Required("charge"): _function_record,
        },
    }
)


def validate_restricted_sum(options: Dict[str, Any]) -> Dict[str, Any]:
    """Validate the options of a restricted-sum verification."""
    return Schema(
        {
            Required("nu"): _number,
            Required("ell"): int,
            Required("L"): _positive,
            Required("x"): _number,
            Required("cut"): All(int, Range(min=1)),
            Required("p_cut", default=None): AnyOf(None, All(int, Range(min=0))),
            Required("h_cut", default=None): AnyOf(None, All(int, Range(min=0))),
        }
    )(options)
