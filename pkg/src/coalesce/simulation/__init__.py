"""Detector model, Monte Carlo acquisition and event files."""

from coalesce.simulation.acquisition import generate, outcome_distribution
from coalesce.simulation.eventfile import deserialize, serialize
from coalesce.simulation.models import DetectorModel, EventRecord, EventStream, RunConfig

__all__ = [
    "DetectorModel",
    "EventRecord",
    "EventStream",
    "RunConfig",
    "deserialize",
    "generate",
    "outcome_distribution",
    "serialize",
]
