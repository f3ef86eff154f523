"""Biphoton state function and its temporal counterpart."""

import math
from typing import Optional, Union

import numpy as np

from coalesce.errors import CoverageError
from coalesce.theory.models import CrystalConfig, GridSpec, SpectralAmplitude, TemporalAmplitude
from coalesce.utils.logging import get_logger

logger = get_logger(__name__)

# Fraction of the analytic |Phi(w)|^2 mass the grid must hold
MIN_COVERAGE = 0.999

ArrayLike = Union[float, np.ndarray]


def mismatch(crystal: CrystalConfig, omega: ArrayLike) -> ArrayLike:
    """Linearized wave-vector mismatch Delta(w) = D * w.

    Args:
        crystal: Crystal configuration
        omega: Detuning in rad/fs (scalar or array)

    Returns:
        Mismatch in rad/mm
    """
    return crystal.dvg_fs_per_mm * omega


def sinc(x: ArrayLike) -> ArrayLike:
    """Unnormalized sinc, sin(x)/x with sinc(0) = 1."""
    return np.sinc(np.asarray(x) / np.pi)


def sinc_state_function(
    crystal: CrystalConfig, grid: Optional[GridSpec] = None
) -> SpectralAmplitude:
    """State function of a single bulk crystal.

    Phi(w) is proportional to L sinc(L Delta(w) / 2) exp(i L Delta(w) / 2),
    sampled on `grid` and normalized.

    Args:
        crystal: Crystal configuration
        grid: Detuning grid, defaults to GridSpec.for_crystal(crystal)

    Returns:
        Normalized spectral amplitude

    Raises:
        GridError: If the grid is degenerate
        CoverageError: If less than 99.9% of the spectral mass lies on the grid
    """
    grid = grid or GridSpec.for_crystal(crystal)
    grid.validate_grid()

    omega = grid.omega()
    half_phase = crystal.length_mm * mismatch(crystal, omega) / 2.0
    raw = crystal.length_mm * sinc(half_phase) * np.exp(1j * half_phase)

    analytic_mass = 2.0 * math.pi * crystal.length_mm / abs(crystal.dvg_fs_per_mm)
    coverage = float(np.sum(np.abs(raw) ** 2) * grid.step) / analytic_mass
    if coverage < MIN_COVERAGE:
        raise CoverageError(coverage, MIN_COVERAGE)

    logger.debug(
        f"Sinc state function: {grid.points} points, step {grid.step:.4g} rad/fs, "
        f"coverage {coverage:.6f}"
    )
    return SpectralAmplitude.from_values(omega, raw)


def time_grid(points: int, omega_step: float) -> np.ndarray:
    """Time axis paired with a detuning axis so that dt * dw = 2 pi / N."""
    dt = 2.0 * math.pi / (points * omega_step)
    half = (points - 1) // 2
    return np.arange(-half, half + 1, dtype=float) * dt


def to_temporal(spectrum: SpectralAmplitude) -> TemporalAmplitude:
    """Inverse Fourier transform Phi(t) = (2 pi)^-1/2 * integral Phi(w) exp(i w t) dw.

    The transform is unitary on the grid, so the Riemann sums of |Phi|^2 agree.
    """
    points = spectrum.points
    step = spectrum.grid_step
    t = time_grid(points, step)
    values = np.fft.fftshift(np.fft.ifft(np.fft.ifftshift(spectrum.values)))
    values *= points * step / math.sqrt(2.0 * math.pi)
    return TemporalAmplitude.from_values(t, values)


def to_spectral(temporal: TemporalAmplitude) -> SpectralAmplitude:
    """Forward transform, the inverse of to_temporal."""
    points = temporal.points
    step = temporal.grid_step
    omega = time_grid(points, step)
    values = np.fft.fftshift(np.fft.fft(np.fft.ifftshift(temporal.values)))
    values *= step / math.sqrt(2.0 * math.pi)
    return SpectralAmplitude.from_values(omega, values)
