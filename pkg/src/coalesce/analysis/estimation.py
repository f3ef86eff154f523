"""Efficiency-corrected probability estimates and absolute efficiency calibration."""

import math
from typing import Optional

import numpy as np

from coalesce.analysis.models import CountsSummary, DirectSignal, EstimatedPoint, EtaCalibration
from coalesce.errors import EstimationError
from coalesce.simulation.acquisition import MEAN_PHOTONS_PER_DETECTOR
from coalesce.simulation.models import DetectorId, EventStream
from coalesce.theory.interference import FAR_P11
from coalesce.theory.models import InterferencePoint
from coalesce.utils.logging import get_logger

logger = get_logger(__name__)

# Share of the photons reaching one detector whose partner reaches the other,
# for distinguishable photons: P(1,1) / MEAN_PHOTONS_PER_DETECTOR
DISTINGUISHABLE_HERALDING_FRACTION = FAR_P11 / MEAN_PHOTONS_PER_DETECTOR


def heralding_fraction(point: InterferencePoint) -> float:
    """Probability that a photon reaching one detector has its partner at the other."""
    return point.p11 / MEAN_PHOTONS_PER_DETECTOR


def _check_eta(name: str, eta: float) -> None:
    if not 0.0 < eta <= 1.0:
        raise EstimationError(f"{name} must lie in (0, 1], got {eta}")


def _registrations(singles: int, doubles: int) -> int:
    return singles + 2 * doubles


def infer_pair_count(summary: CountsSummary, eta_a: float, eta_b: float) -> float:
    """Pair count implied by the registered photon numbers and the efficiencies.

    Every pair sends on average MEAN_PHOTONS_PER_DETECTOR photons to each
    detector regardless of delay, so registrations / (eta * 1/2) estimates the
    pair count; the two detectors are averaged.
    """
    _check_eta("eta_a", eta_a)
    _check_eta("eta_b", eta_b)
    from_a = _registrations(summary.singles_a, summary.doubles_a) / eta_a
    from_b = _registrations(summary.singles_b, summary.doubles_b) / eta_b
    pairs = (from_a + from_b) / (2.0 * MEAN_PHOTONS_PER_DETECTOR)
    if pairs <= 0:
        raise EstimationError("no registrations to infer a pair count from")
    return pairs


def _binomial(count: int, pairs: float, weight: float) -> tuple[float, float]:
    fraction = count / pairs
    error = math.sqrt(max(fraction * (1.0 - fraction), 0.0) / pairs)
    return fraction / weight, error / weight


def estimate(summary: CountsSummary, eta_a: float, eta_b: float) -> EstimatedPoint:
    """Invert efficiency losses to estimate P(2,0), P(0,2) and P(1,1).

    p20 = doubles_A / (N eta_A^2), p02 = doubles_B / (N eta_B^2) and
    p11 = cross / (N eta_A eta_B), with binomial standard errors
    sqrt(q (1 - q) / N) divided by the same efficiency factor. When the summary
    carries no pair count, N is inferred from the registrations and the
    estimate is flagged as Klyshko-normalized with a widened error.

    Args:
        summary: Counts from classify
        eta_a: Efficiency of detector A in (0, 1]
        eta_b: Efficiency of detector B in (0, 1]

    Returns:
        Estimated point at the summary's delay

    Raises:
        EstimationError: For efficiencies outside (0, 1] or a zero pair count
    """
    _check_eta("eta_a", eta_a)
    _check_eta("eta_b", eta_b)

    normalization = "header"
    relative_pairs_error = 0.0
    if summary.n_pairs_assumed is None:
        pairs = infer_pair_count(summary, eta_a, eta_b)
        registrations = _registrations(summary.singles_a, summary.doubles_a) + _registrations(
            summary.singles_b, summary.doubles_b
        )
        relative_pairs_error = 1.0 / math.sqrt(registrations)
        normalization = "klyshko"
    else:
        pairs = float(summary.n_pairs_assumed)
    if pairs <= 0:
        raise EstimationError("pair count is zero")

    p20, p20_err = _binomial(summary.doubles_a, pairs, eta_a**2)
    p02, p02_err = _binomial(summary.doubles_b, pairs, eta_b**2)
    p11, p11_err = _binomial(summary.cross, pairs, eta_a * eta_b)
    if relative_pairs_error:
        p20_err = math.hypot(p20_err, p20 * relative_pairs_error)
        p02_err = math.hypot(p02_err, p02 * relative_pairs_error)
        p11_err = math.hypot(p11_err, p11 * relative_pairs_error)

    degenerate = 0 in (summary.doubles_a, summary.doubles_b, summary.cross)
    if degenerate:
        logger.warning(
            f"Zero counts at tau={summary.tau_fs} fs; binomial errors vanish for those estimates"
        )

    return EstimatedPoint(
        tau_fs=summary.tau_fs if summary.tau_fs is not None else 0.0,
        p20_hat=p20,
        p02_hat=p02,
        p11_hat=p11,
        p20_err=p20_err,
        p02_err=p02_err,
        p11_err=p11_err,
        eta_corrected=(eta_a, eta_b) != (1.0, 1.0),
        normalization=normalization,
        degenerate=degenerate,
    )


def klyshko_eta(
    summary: CountsSummary, fraction: Optional[float] = None
) -> EtaCalibration:
    """Absolute efficiencies from heralded cross-coincidences.

    A photon registered at B heralds a partner routed to A with probability
    `fraction`, and that partner registers with probability eta_A, so
    eta_A = cross / (fraction * registrations_B) where registrations count
    singles plus twice the doubles. With fraction = 1 and no doubles this is the
    textbook cross / singles_B. The summary should come from a delay far
    outside the dip, where fraction = 1/4 for this interferometer.

    Args:
        summary: Counts from a run at distinguishable delay
        fraction: Heralding fraction; defaults to the distinguishable value

    Returns:
        Efficiencies of both detectors with counting errors

    Raises:
        EstimationError: If there are no cross-coincidences or registrations
    """
    fraction = DISTINGUISHABLE_HERALDING_FRACTION if fraction is None else fraction
    if not 0.0 < fraction <= 1.0:
        raise EstimationError(f"heralding fraction must lie in (0, 1], got {fraction}")
    registrations_a = _registrations(summary.singles_a, summary.doubles_a)
    registrations_b = _registrations(summary.singles_b, summary.doubles_b)
    if summary.cross == 0 or registrations_a == 0 or registrations_b == 0:
        raise EstimationError(
            "Klyshko calibration needs cross-coincidences and registrations at both detectors"
        )

    eta_a = summary.cross / (fraction * registrations_b)
    eta_b = summary.cross / (fraction * registrations_a)
    relative_a = math.sqrt(1.0 / summary.cross + 1.0 / registrations_b)
    relative_b = math.sqrt(1.0 / summary.cross + 1.0 / registrations_a)
    logger.debug(f"Klyshko: eta_A={eta_a:.4f}, eta_B={eta_b:.4f} (fraction {fraction:g})")
    return EtaCalibration(
        eta_a=eta_a,
        eta_b=eta_b,
        eta_a_err=eta_a * relative_a,
        eta_b_err=eta_b * relative_b,
        heralding_fraction=fraction,
    )


def direct_coincidence_signal(stream: EventStream, det: DetectorId) -> DirectSignal:
    """Rate and mean energy of the events one detector resolves as photon pairs."""
    own = stream.for_detector(det)
    mask = own.n_inferred == 2
    doubles = int(np.count_nonzero(mask))
    pairs = stream.header.pairs
    return DirectSignal(
        det=det,
        doubles=doubles,
        per_pair=doubles / pairs if pairs else None,
        mean_energy_ev=float(own.energy_ev[mask].mean()) if doubles else None,
    )
