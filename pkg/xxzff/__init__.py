"""
xxzff
~~~~~

Correlation functions, form factor series and dynamic response of the
massless XXZ spin chain.
"""

# flake8: noqa: F401
from .errors import (
    XXZError,
    InvalidConfigError,
    DomainError,
    NumericalError,
    CacheError,
)

from .chain import Chain
from .version import __version__

__author__ = "The xxzff developers"
