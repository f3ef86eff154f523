"""Biphoton state and two-photon interference probabilities."""

from coalesce.theory.biphoton import mismatch, sinc_state_function, to_spectral, to_temporal
from coalesce.theory.interference import (
    cross_port_probability,
    same_port_probability,
    sweep,
    triangle_oracle,
)
from coalesce.theory.models import (
    CrystalConfig,
    DelaySetting,
    ExchangeSign,
    GridSpec,
    InterferenceCurve,
    InterferencePoint,
    SpectralAmplitude,
    TemporalAmplitude,
)

__all__ = [
    "CrystalConfig",
    "DelaySetting",
    "ExchangeSign",
    "GridSpec",
    "InterferenceCurve",
    "InterferencePoint",
    "SpectralAmplitude",
    "TemporalAmplitude",
    "cross_port_probability",
    "mismatch",
    "same_port_probability",
    "sinc_state_function",
    "sweep",
    "to_spectral",
    "to_temporal",
    "triangle_oracle",
]
