"""Coalesce - two-photon interference with photon-number-resolving detectors."""

__version__ = "0.1.0"

from coalesce.core.app import CoalesceApp

__all__ = ["CoalesceApp", "__version__"]
