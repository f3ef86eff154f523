"""Coincidence probabilities P(2,0), P(0,2) and P(1,1) versus relative delay."""

import math
from concurrent.futures import ThreadPoolExecutor
from typing import Optional, Sequence, Union

import numpy as np

from coalesce.errors import GridExtentError, QuadratureError
from coalesce.theory.biphoton import sinc_state_function, to_temporal
from coalesce.theory.models import (
    TOTAL_PAIR_PROBABILITY,
    CrystalConfig,
    CurveMetadata,
    DelaySetting,
    ExchangeSign,
    GridSpec,
    InterferenceCurve,
    InterferencePoint,
    TemporalAmplitude,
)
from coalesce.utils.logging import get_logger

logger = get_logger(__name__)

# Largest fraction of |Phi(t)|^2 a shift may push off the time grid
MAX_LOST_FRACTION = 1e-3
NEGATIVE_TOLERANCE = 1e-12
# Largest |P(1,1) + 2 P(2,0) - 1/4| accepted from the two exchange integrals
COMPLEMENTARITY_TOLERANCE = 1e-9

# Distinguishable (binomial) limit shared by bosons and fermions
FAR_P20 = 1.0 / 16.0
FAR_P11 = 1.0 / 8.0

DelayLike = Union[DelaySetting, float]


class OverlapIntegrator:
    """Exchange integrals of one temporal amplitude under delay shifts.

    For a shift tau the integrator forms g(t) = Phi(t - tau) by a spectral phase
    ramp, so that Phi(-t - tau) is g sampled on the mirrored grid, and evaluates
    the rectangle-rule integrals of |g(t) +/- g(-t)|^2.
    """

    def __init__(self, phi: TemporalAmplitude) -> None:
        self.phi = phi
        self._dt = phi.grid_step
        self._t = phi.grid
        points = phi.points
        omega_step = 2.0 * math.pi / (points * self._dt)
        half = (points - 1) // 2
        self._omega = np.fft.ifftshift(np.arange(-half, half + 1, dtype=float) * omega_step)
        self._spectrum = np.fft.fft(np.fft.ifftshift(phi.values))
        self._density = np.abs(phi.values) ** 2 * self._dt
        # Half-width holding all but 1e-4 of the mass; ringing tails never vanish
        order = np.argsort(np.abs(self._t), kind="stable")
        cumulative = np.cumsum(self._density[order])
        inside = min(
            int(np.searchsorted(cumulative, (1.0 - 1e-4) * cumulative[-1])), points - 1
        )
        self._support = float(np.abs(self._t[order][inside]))

    def _check_extent(self, tau: float) -> None:
        edge = self._t[-1] + self._dt / 2.0
        moved = self._t + tau
        lost = float(self._density[np.abs(moved) > edge].sum())
        if lost > MAX_LOST_FRACTION:
            half_points = math.ceil(1.1 * (abs(tau) + self._support) / self._dt)
            raise GridExtentError(tau, lost, 2 * half_points + 1)

    def shifted(self, tau: float) -> np.ndarray:
        """Samples of Phi(t - tau) on the amplitude's time grid."""
        self._check_extent(tau)
        ramp = np.exp(-1j * self._omega * tau)
        return np.fft.fftshift(np.fft.ifft(self._spectrum * ramp))

    def integrals(self, tau: float, sign: ExchangeSign) -> tuple[float, float]:
        """Return (int |g(t) + s g(-t)|^2 dt, int |g(t) - s g(-t)|^2 dt)."""
        g = self.shifted(tau)
        mirrored = int(sign) * g[::-1]
        plus = float(np.sum(np.abs(g + mirrored) ** 2) * self._dt)
        minus = float(np.sum(np.abs(g - mirrored) ** 2) * self._dt)
        return plus, minus

    def probabilities(self, tau: float, sign: ExchangeSign) -> tuple[float, float]:
        """Return (P(2,0), P(1,1)) at raw delay tau."""
        plus, minus = self.integrals(tau, sign)
        return _clamp(plus / 32.0), _clamp(minus / 16.0)


def _clamp(probability: float) -> float:
    if probability < 0.0:
        if probability < -NEGATIVE_TOLERANCE:
            raise QuadratureError(f"Quadrature produced a negative probability {probability!r}")
        return 0.0
    return min(probability, TOTAL_PAIR_PROBABILITY)


def _tau(delay: DelayLike) -> float:
    if isinstance(delay, DelaySetting):
        return delay.tau_fs
    return DelaySetting(tau_fs=delay).tau_fs


def same_port_probability(
    phi: TemporalAmplitude, delay: DelayLike, sign: ExchangeSign = ExchangeSign.BOSON
) -> float:
    """P(2,0) = P(0,2) = 1/32 * int |Phi(t - tau) + s Phi(-t - tau)|^2 dt.

    Args:
        phi: Normalized temporal amplitude
        delay: Raw relative delay tau in fs
        sign: Exchange sign s

    Returns:
        Probability that both photons register at the same detector

    Raises:
        GridExtentError: If the shift moves more than 0.1% of the mass off the grid
    """
    return OverlapIntegrator(phi).probabilities(_tau(delay), sign)[0]


def cross_port_probability(
    phi: TemporalAmplitude, delay: DelayLike, sign: ExchangeSign = ExchangeSign.BOSON
) -> float:
    """P(1,1) = 1/16 * int |Phi(t - tau) - s Phi(-t - tau)|^2 dt.

    Args:
        phi: Normalized temporal amplitude
        delay: Raw relative delay tau in fs
        sign: Exchange sign s

    Returns:
        Probability that the photons register at different detectors

    Raises:
        GridExtentError: If the shift moves more than 0.1% of the mass off the grid
    """
    return OverlapIntegrator(phi).probabilities(_tau(delay), sign)[1]


def apply_visibility(p20: float, p11: float, visibility: float) -> tuple[float, float]:
    """Pull ideal probabilities toward the distinguishable limit.

    p = p_far + v (p_ideal - p_far), which keeps P(1,1) + 2 P(2,0) = 1/4.
    """
    if not 0.0 <= visibility <= 1.0:
        raise ValueError(f"visibility must lie in [0, 1], got {visibility}")
    return (
        FAR_P20 + visibility * (p20 - FAR_P20),
        FAR_P11 + visibility * (p11 - FAR_P11),
    )


def _bounded_overlap(p20: float, p11: float, sign: ExchangeSign) -> tuple[float, float]:
    residual = p11 + 2.0 * p20 - TOTAL_PAIR_PROBABILITY
    if abs(residual) > COMPLEMENTARITY_TOLERANCE:
        raise QuadratureError(
            f"Exchange integrals disagree: P(1,1) + 2 P(2,0) misses 1/4 by {residual:.3g}"
        )
    # Mean of the overlaps implied by each integral. The sinc state's overlap
    # lies in [0, 1]; spectral truncation rings around it at the 1e-7 level
    overlap = int(sign) * (8.0 * p20 - 4.0 * p11)
    overlap = min(max(overlap, 0.0), 1.0)
    return (1.0 + int(sign) * overlap) / 16.0, (1.0 - int(sign) * overlap) / 8.0


def sweep(
    crystal: CrystalConfig,
    taus: Sequence[DelayLike],
    sign: ExchangeSign = ExchangeSign.BOSON,
    visibility: float = 1.0,
    grid: Optional[GridSpec] = None,
    workers: int = 1,
) -> InterferenceCurve:
    """Interference curve over delays measured from the dip center.

    Args:
        crystal: Crystal configuration
        taus: Strictly increasing delays in fs, zero at the dip/peak extremum
        sign: Exchange sign
        visibility: Interference visibility in [0, 1]
        grid: Detuning grid, defaults to GridSpec.for_crystal(crystal)
        workers: Threads used to evaluate delay points

    Returns:
        Interference curve with the raw dip offset in its metadata
    """
    delays = [_tau(tau) for tau in taus]
    if not delays:
        raise ValueError("sweep needs at least one delay")

    grid = grid or GridSpec.for_crystal(crystal)
    integrator = OverlapIntegrator(to_temporal(sinc_state_function(crystal, grid)))
    offset = crystal.dip_center_fs

    def evaluate(tau: float) -> InterferencePoint:
        p20, p11 = integrator.probabilities(tau + offset, sign)
        p20, p11 = _bounded_overlap(p20, p11, sign)
        p20, p11 = apply_visibility(p20, p11, visibility)
        return InterferencePoint(tau_fs=tau, p20=p20, p02=p20, p11=p11)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            points = list(pool.map(evaluate, delays))
    else:
        points = [evaluate(tau) for tau in delays]

    logger.debug(f"Swept {len(points)} delays ({sign.name.lower()}, v={visibility})")
    return InterferenceCurve(
        points=points,
        metadata=CurveMetadata(
            crystal=crystal,
            grid=grid,
            sign=sign,
            visibility=visibility,
            tau_offset_fs=offset,
        ),
    )


def triangle_oracle(
    crystal: CrystalConfig, delay: DelayLike, sign: ExchangeSign = ExchangeSign.BOSON
) -> InterferencePoint:
    """Closed-form probabilities for the sinc state under linear mismatch.

    |Phi(t)|^2 is a rectangle of width W = L*D, so the exchange overlap is the
    unit triangle Lambda(tau / (W/2)) in the delay measured from the dip center.
    """
    tau = _tau(delay)
    half_width = abs(crystal.width_fs) / 2.0
    overlap = int(sign) * max(0.0, 1.0 - abs(tau) / half_width)
    p20 = (1.0 + overlap) / 16.0
    p11 = (1.0 - overlap) / 8.0
    return InterferencePoint(tau_fs=tau, p20=p20, p02=p20, p11=p11)
