"""Core functionality for Coalesce."""

from coalesce.core.app import CoalesceApp
from coalesce.core.config import CoalesceSettings, Config, ExperimentSpec
from coalesce.core.selftest import CheckRegistry, InvariantCheck

__all__ = [
    "CoalesceApp",
    "CoalesceSettings",
    "Config",
    "ExperimentSpec",
    "CheckRegistry",
    "InvariantCheck",
]
