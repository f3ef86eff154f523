"""Reconstruction of coincidence probabilities from event streams."""

from coalesce.analysis.counting import CoincidenceClassifier, classify
from coalesce.analysis.estimation import estimate, klyshko_eta
from coalesce.analysis.fitting import fit_visibility
from coalesce.analysis.models import CountsSummary, EstimatedPoint

__all__ = [
    "CoincidenceClassifier",
    "CountsSummary",
    "EstimatedPoint",
    "classify",
    "estimate",
    "fit_visibility",
    "klyshko_eta",
]
