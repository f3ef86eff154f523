"""Photon-number-resolving energy detector.

The detector integrates the energy of every photon absorbed within its thermal
relaxation window, so n photons of energy E register as one event near n*E.
Detection itself is independent per-photon binomial thinning.
"""

from collections.abc import Sequence
from typing import Optional, Union

import numpy as np
from scipy import constants, stats

from coalesce.errors import StreamOrderError
from coalesce.simulation.models import Absorption, DetectorModel, PoissonFit

IntLike = Union[int, np.ndarray]
FloatLike = Union[float, np.ndarray]


def photon_energy_for_wavelength(wavelength_nm: float) -> float:
    """Photon energy in eV at a vacuum wavelength in nm."""
    return constants.h * constants.c / (wavelength_nm * 1e-9) / constants.e


def thin(n_incident: IntLike, eta: float, rng: np.random.Generator) -> IntLike:
    """Binomial detection of each incident photon with probability eta."""
    n = np.asarray(n_incident)
    if np.any(n < 0):
        raise ValueError("photon counts must be nonnegative")
    detected = rng.binomial(n, eta)
    return int(detected) if n.ndim == 0 else detected


def measure_energy(
    n_absorbed: IntLike, model: DetectorModel, rng: np.random.Generator
) -> FloatLike:
    """Deposited energy n*E smeared by Gaussian noise of the model's FWHM, clamped at 0."""
    n = np.asarray(n_absorbed)
    if np.any(n < 0):
        raise ValueError("photon counts must be nonnegative")
    energy = n * model.photon_energy_ev
    if model.sigma_ev > 0:
        energy = energy + rng.normal(0.0, model.sigma_ev, size=n.shape)
    energy = np.maximum(energy, 0.0)
    return float(energy) if n.ndim == 0 else energy


def infer_count(energy: FloatLike, model: DetectorModel) -> IntLike:
    """Nearest photon number to energy/E; exact half-integers round up."""
    e = np.asarray(energy, dtype=float)
    if np.any(e < 0):
        raise ValueError("energies must be nonnegative")
    count = np.maximum(np.floor(e / model.photon_energy_ev + 0.5), 0).astype(np.int64)
    return int(count) if e.ndim == 0 else count


def merge_groups(
    t_ns: np.ndarray, quanta: np.ndarray, window_ns: int
) -> tuple[np.ndarray, np.ndarray]:
    """Coalesce absorptions separated by less than window_ns.

    Returns the first timestamp and summed quanta of every group.
    """
    t_ns = np.asarray(t_ns, dtype=np.int64)
    quanta = np.asarray(quanta, dtype=np.int64)
    if t_ns.size == 0:
        return t_ns.copy(), quanta.copy()
    gaps = np.diff(t_ns)
    if np.any(gaps < 0):
        raise StreamOrderError("absorptions must be time-ordered")
    starts = np.flatnonzero(np.concatenate(([True], gaps >= window_ns)))
    return t_ns[starts], np.add.reduceat(quanta, starts)


def pileup_merge(arrivals: Sequence[tuple[int, int]], model: DetectorModel) -> list[Absorption]:
    """Merge time-ordered (t_ns, n_absorbed) arrivals within the relaxation window.

    Args:
        arrivals: Time-ordered (timestamp in ns, absorbed photon number) pairs
        model: Detector whose relaxation window applies

    Returns:
        One Absorption per merged group

    Raises:
        StreamOrderError: If the arrivals are not time-ordered
    """
    if not arrivals:
        return []
    t_ns, quanta = (np.array(column, dtype=np.int64) for column in zip(*arrivals))
    group_t, group_quanta = merge_groups(t_ns, quanta, model.relax_window_ns)
    return [Absorption(int(t), int(q)) for t, q in zip(group_t, group_quanta)]


def weak_laser_counts(
    mean_photons: float, model: DetectorModel, pulses: int, rng: np.random.Generator
) -> np.ndarray:
    """Inferred photon numbers for attenuated coherent pulses.

    Coherent light carries Poisson photon numbers; thinning keeps them Poisson
    with mean eta * mean_photons, which makes the detector's number resolution
    measurable without a calibrated source.
    """
    incident = rng.poisson(mean_photons, size=pulses)
    absorbed = thin(incident, model.eta, rng)
    return np.asarray(infer_count(measure_energy(absorbed, model, rng), model))


def poisson_goodness_of_fit(
    counts: np.ndarray, mean: Optional[float] = None, min_expected: float = 5.0
) -> PoissonFit:
    """Chi-squared test of integer counts against a Poisson distribution.

    Args:
        counts: Nonnegative integer samples
        mean: Poisson mean; estimated from the samples when omitted
        min_expected: Bins with fewer expected entries are pooled

    Returns:
        Test statistic, degrees of freedom and p-value
    """
    counts = np.asarray(counts, dtype=np.int64)
    if counts.size == 0:
        raise ValueError("no samples")
    fitted = mean is None
    mu = float(counts.mean()) if mean is None else float(mean)

    observed = list(np.bincount(counts).astype(float))
    k = np.arange(len(observed))
    expected = list(counts.size * stats.poisson.pmf(k, mu))
    # Last bin absorbs the upper tail so both tables sum to the sample size
    expected[-1] = counts.size * float(stats.poisson.sf(k[-1] - 1, mu))

    while len(expected) > 2 and expected[-1] < min_expected:
        observed[-2] += observed.pop()
        expected[-2] += expected.pop()
    while len(expected) > 2 and expected[0] < min_expected:
        observed[1] += observed.pop(0)
        expected[1] += expected.pop(0)

    ddof = 1 if fitted else 0
    result = stats.chisquare(observed, expected, ddof=ddof)
    return PoissonFit(
        mean=mu,
        statistic=float(result.statistic),
        dof=len(observed) - 1 - ddof,
        p_value=float(result.pvalue),
    )
