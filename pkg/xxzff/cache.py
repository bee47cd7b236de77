"""
xxzff.cache
~~~~~~~~~~~

This module contains the on-disk cache of solved ground states.

Each entry is a versioned JSON document holding the grid, the Fermi data
and the node values and Chebyshev coefficients of ``eps_1``, ``p_1'`` and
``Z``. Entries are keyed by a hash of the model parameters, the number of
nodes and the format version.

"""

import hashlib
import json
import logging
import math
import os
from typing import Any, Dict

import numpy as np
from voluptuous import MultipleInvalid

from .dressed import (
    DressedFn,
    DressedState,
    NystromOperator,
    _kernel_for,
    ground_drivings,
)
from .errors import CacheMissError, CacheVersionError
from .models import FermiData, ModelParams, QuadGrid
from .validation import CACHE_FORMAT, validate_cache_document

logger = logging.getLogger(__name__)

_FUNCTIONS = ("eps1", "p1_deriv", "charge")


def cache_key(params: ModelParams, n: int) -> str:
    """Return the hex digest identifying ``params`` on ``n`` nodes."""
    canonical = json.dumps(
        {
            "J": params.J,
            "zeta": params.zeta,
            "h": params.h,
            "n": n,
            "format": CACHE_FORMAT,
        },
        sort_keys=True,
    )
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def cache_path(cache_dir: str, params: ModelParams, n: int) -> str:
    return os.path.join(cache_dir, f"{cache_key(params, n)}.json")


def _record(fn: DressedFn) -> Dict[str, Any]:
    return {
        "values": [float(v) for v in np.real(fn.density)],
        "coefficients": [float(c) for c in np.real(fn.coefficients)],
    }


def cache_store(state: DressedState, cache_dir: str) -> str:
    """Write ``state`` to the cache and return the path of the entry."""
    params = state.params
    grid = state.grid
    document = {
        "format": CACHE_FORMAT,
        "params": {"J": params.J, "zeta": params.zeta, "h": params.h},
        "n_nodes": grid.n_nodes,
        "fermi": {
            "q": state.fermi.q,
            "p_F": state.fermi.p_F,
            "v_F": state.fermi.v_F,
        },
        "nodes": [float(x) for x in grid.nodes],
        "weights": [float(w) for w in grid.weights],
        "functions": {
            "eps1": _record(state.eps1),
            "p1_deriv": _record(state.p1_deriv),
            "charge": _record(state.charge),
        },
    }
    os.makedirs(cache_dir, exist_ok=True)
    path = cache_path(cache_dir, params, grid.n_nodes)
    tmp = f"{path}.tmp"
    with open(tmp, "w", encoding="utf-8") as handle:
        json.dump(document, handle)
    os.replace(tmp, path)
    logger.info("Stored ground state in %s", path)
    return path


def _check_document(document: Any, params: ModelParams, n: int) -> Dict[str, Any]:
    try:
        document = validate_cache_document(document)
    except MultipleInvalid as ex:
        raise CacheVersionError(f"Invalid cache entry: {ex}") from ex
    stored = document["params"]
    if (stored["J"], stored["zeta"], stored["h"]) != (params.J, params.zeta, params.h):
        raise CacheVersionError("Cache entry belongs to other parameters")
    if document["n_nodes"] != n:
        raise CacheVersionError("Cache entry has another number of nodes")
    lengths = {len(document["nodes"]), len(document["weights"])}
    lengths.update(len(document["functions"][k]["values"]) for k in _FUNCTIONS)
    if lengths != {n}:
        raise CacheVersionError("Cache entry arrays have inconsistent lengths")
    numbers = list(document["nodes"]) + list(document["weights"])
    for name in _FUNCTIONS:
        numbers.extend(document["functions"][name]["values"])
        numbers.extend(document["functions"][name]["coefficients"])
    if not all(math.isfinite(v) for v in numbers):
        raise CacheVersionError("Cache entry holds non-finite numbers")
    q = document["fermi"]["q"]
    if abs(math.fsum(document["weights"]) - 2.0 * q) > 1e-12 * max(1.0, q):
        raise CacheVersionError("Cache entry weights do not sum to 2 q")
    return document


def cache_load(cache_dir: str, params: ModelParams, n: int) -> DressedState:
    """Rebuild the ground state of ``params`` from the cache.

    :raises: :py:exc:`CacheMissError` when there is no entry,
      :py:exc:`CacheVersionError` when the entry is of another format or
      corrupted.
    """
    path = cache_path(cache_dir, params, n)
    if not os.path.exists(path):
        raise CacheMissError(f"No cache entry at {path}")
    try:
        with open(path, encoding="utf-8") as handle:
            document = json.load(handle)
    except (json.JSONDecodeError, UnicodeDecodeError) as ex:
        raise CacheVersionError(f"Corrupted cache entry {path}: {ex}") from ex
    document = _check_document(document, params, n)

    fermi = FermiData(document["fermi"])
    grid = QuadGrid(
        {
            "n_nodes": n,
            "nodes": document["nodes"],
            "weights": document["weights"],
            "q": fermi.q,
        }
    )
    operator = NystromOperator(grid, params.zeta)
    kernel, kernel_deriv = _kernel_for(params.zeta)
    functions = document["functions"]
    drivings = ground_drivings(params)

    def restore(name: str, kind: str) -> DressedFn:
        driving, driving_deriv = drivings[name]
        return DressedFn(
            kind,
            1,
            grid,
            np.asarray(functions[name]["values"]),
            driving,
            kernel,
            driving_deriv,
            kernel_deriv,
            coefficients=np.asarray(functions[name]["coefficients"]),
        )

    eps1 = restore("eps1", "epsilon")
    p1_deriv = restore("p1_deriv", "momentum_deriv")
    charge = restore("charge", "charge")
    logger.info("Loaded ground state from %s", path)
    return DressedState(params, fermi, operator, eps1, p1_deriv, charge)
