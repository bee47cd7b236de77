"""This is an internal module used for preparing a run configuration.

This code is only intended for internal use and is subject to change in ways
that may break any direct use of it.

"""

import json
import os
from typing import Any, Dict, Optional

from voluptuous import MultipleInvalid

from .errors import InvalidConfigError
from .models import ExcitationY, RestrictedSumConfig
from .validation import (
    validate_config,
    validate_excitation,
    validate_restricted_sum,
)

#: Environment variable overriding ``cache_dir``.
CACHE_DIR_ENV = "XXZFF_CACHE_DIR"


def _copy_and_clean(data: Any) -> Any:
    """Create a copy of the data structure with Nones removed."""
    if isinstance(data, dict):
        return dict((k, _copy_and_clean(v)) for (k, v) in data.items() if v is not None)
    if isinstance(data, (list, set, tuple)):
        return [_copy_and_clean(x) for x in data if x is not None]
    return data


def _describe(ex: MultipleInvalid) -> str:
    messages = []
    for error in ex.errors:
        path = ".".join(str(p) for p in error.path)
        messages.append(f"{path}: {error.msg}" if path else error.msg)
    return "; ".join(messages)


def prepare_config(config: Dict[str, Any]) -> Dict[str, Any]:
    """Validate a run configuration and fill in its defaults.

    ``XXZFF_CACHE_DIR`` takes precedence over ``cache_dir``.

    :raises: :py:exc:`InvalidConfigError` naming every failing field.
    """
    cleaned = _copy_and_clean(config)
    try:
        prepared = validate_config(cleaned)
    except MultipleInvalid as ex:
        raise InvalidConfigError(f"Invalid run configuration: {_describe(ex)}") from ex
    override = os.environ.get(CACHE_DIR_ENV)
    if override:
        prepared["cache_dir"] = override
    return prepared


def load_config(path: str) -> Dict[str, Any]:
    """Read a JSON run configuration from ``path`` and prepare it."""
    try:
        with open(path, encoding="utf-8") as handle:
            raw = json.load(handle)
    except json.JSONDecodeError as ex:
        raise InvalidConfigError(
            f"Invalid run configuration: line {ex.lineno} column {ex.colno}:"
            f" {ex.msg}"
        ) from ex
    except OSError as ex:
        raise InvalidConfigError(f"Cannot read run configuration {path}: {ex}") from ex
    if not isinstance(raw, dict):
        raise InvalidConfigError("Invalid run configuration: expected an object")
    return prepare_config(raw)


def prepare_excitation(
    description: Optional[Dict[str, Any]], operator_spin: Optional[int] = None
) -> ExcitationY:
    """Validate an excitation description and build the descriptor.

    :param description: Mapping with ``holes``, ``strings``, ``umklapp`` and
      ``operator_spin``. Rapidities are numbers or ``[re, im]`` pairs.
    :param operator_spin: Overrides the description's operator spin.
    :raises: :py:exc:`InvalidConfigError` when the description is invalid or
      the occupation numbers are not balanced.
    """
    cleaned = _copy_and_clean(description or {})
    if operator_spin is not None:
        cleaned["operator_spin"] = operator_spin
    try:
        prepared = validate_excitation(cleaned)
    except MultipleInvalid as ex:
        raise InvalidConfigError(f"Invalid excitation: {_describe(ex)}") from ex
    return ExcitationY(prepared)


def prepare_restricted_sum(options: Dict[str, Any]) -> RestrictedSumConfig:
    """Validate restricted-sum options; both cutoffs default to ``cut``."""
    try:
        prepared = validate_restricted_sum(dict(options))
    except MultipleInvalid as ex:
        raise InvalidConfigError(f"Invalid restricted sum: {_describe(ex)}") from ex
    for key in ("p_cut", "h_cut"):
        if prepared[key] is None:
            prepared[key] = prepared["cut"]
    return RestrictedSumConfig(prepared)
