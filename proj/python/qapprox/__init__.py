"""Python bindings for the qapprox simulation library."""

from ._qapprox import *  # noqa: F401,F403
from ._qapprox import (
    ConfigError,
    DomainError,
    Error,
    InputError,
    ResourceError,
    StructuralError,
    ValidationError,
)

__version__ = "0.1.0"
