"""Data models for the biphoton state and the interference observables."""

import math
from enum import IntEnum
from typing import Any

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from scipy import constants

from coalesce.errors import GridError

NORMALIZATION_TOLERANCE = 1e-9
COMPLEMENTARITY_TOLERANCE = 1e-9
TOTAL_PAIR_PROBABILITY = 0.25


class CrystalConfig(BaseModel):
    """Bulk type-II crystal under a monochromatic cw pump.

    The wave-vector mismatch is linearized as Delta(w) = D * w, so the crystal is
    fully described by its length and the inverse-group-velocity difference D.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    length_mm: float = Field(gt=0, description="Crystal length L in millimeters")
    dvg_fs_per_mm: float = Field(description="Inverse-group-velocity difference D in fs/mm")
    pump_wavelength_nm: float = Field(default=351.1, gt=0, description="Pump wavelength in nm")

    @field_validator("dvg_fs_per_mm")
    @classmethod
    def _nonzero_dvg(cls, value: float) -> float:
        if value == 0 or not math.isfinite(value):
            raise ValueError("dvg_fs_per_mm must be finite and nonzero")
        return value

    @property
    def width_fs(self) -> float:
        """Signed temporal width L*D of the two-photon wavepacket."""
        return self.length_mm * self.dvg_fs_per_mm

    @property
    def dip_center_fs(self) -> float:
        """Raw delay at which the two wavepackets overlap perfectly."""
        return self.width_fs / 2.0

    @property
    def first_zero(self) -> float:
        """Detuning (rad/fs) of the first zero of the sinc state function."""
        return 2.0 * math.pi / abs(self.width_fs)

    @property
    def signal_wavelength_nm(self) -> float:
        """Degenerate signal/idler wavelength."""
        return 2.0 * self.pump_wavelength_nm

    @property
    def signal_photon_energy_ev(self) -> float:
        """Energy of one degenerate down-converted photon in eV."""
        wavelength_m = self.signal_wavelength_nm * 1e-9
        return constants.h * constants.c / wavelength_m / constants.e


class GridSpec(BaseModel):
    """Uniform detuning grid symmetric about zero."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    span: float = Field(description="Full width of the detuning grid in rad/fs")
    points: int = Field(description="Number of samples (odd, so that w = 0 is sampled)")

    @classmethod
    def for_crystal(
        cls, crystal: CrystalConfig, points: int = 4097, lobes: float = 320.0
    ) -> "GridSpec":
        """Default grid: `points` samples across `lobes` first-zero spacings."""
        return cls(span=lobes * crystal.first_zero, points=points)

    def validate_grid(self) -> None:
        """Raise GridError for degenerate grids."""
        if self.points < 3:
            raise GridError(f"Grid needs at least 3 points, got {self.points}")
        if self.points % 2 == 0:
            raise GridError(f"Grid needs an odd number of points, got {self.points}")
        if not self.span > 0 or not math.isfinite(self.span):
            raise GridError(f"Grid span must be positive and finite, got {self.span}")

    @property
    def step(self) -> float:
        return self.span / (self.points - 1)

    def omega(self) -> np.ndarray:
        half = (self.points - 1) // 2
        return np.arange(-half, half + 1, dtype=float) * self.step

    def doubled(self) -> "GridSpec":
        """Same span at twice the resolution."""
        return GridSpec(span=self.span, points=2 * self.points - 1)


def _check_uniform_axis(axis: np.ndarray, name: str) -> float:
    if axis.ndim != 1 or axis.size < 3 or axis.size % 2 == 0:
        raise ValueError(f"{name} must be 1-D with an odd number (>= 3) of samples")
    step = float(axis[1] - axis[0])
    if step <= 0:
        raise ValueError(f"{name} must be increasing")
    if not np.allclose(np.diff(axis), step, rtol=1e-9, atol=0.0):
        raise ValueError(f"{name} must be uniformly spaced")
    if abs(axis[axis.size // 2]) > 1e-9 * step:
        raise ValueError(f"{name} must be symmetric about zero")
    return step


def _frozen(array: Any, dtype: Any) -> np.ndarray:
    out = np.array(array, dtype=dtype, copy=True)
    out.setflags(write=False)
    return out


class _SampledAmplitude(BaseModel):
    """Normalized complex amplitude on a symmetric uniform grid."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    grid: np.ndarray
    values: np.ndarray

    @model_validator(mode="before")
    @classmethod
    def _coerce(cls, data: Any) -> Any:
        if isinstance(data, dict):
            data = dict(data)
            data["grid"] = _frozen(data["grid"], float)
            data["values"] = _frozen(data["values"], complex)
        return data

    @model_validator(mode="after")
    def _check(self) -> "_SampledAmplitude":
        step = _check_uniform_axis(self.grid, "grid")
        if self.values.shape != self.grid.shape:
            raise ValueError("values and grid must have the same shape")
        mass = float(np.sum(np.abs(self.values) ** 2) * step)
        if abs(mass - 1.0) > NORMALIZATION_TOLERANCE:
            raise ValueError(f"amplitude is not normalized (Riemann sum {mass!r})")
        return self

    @property
    def grid_step(self) -> float:
        return float(self.grid[1] - self.grid[0])

    @property
    def points(self) -> int:
        return int(self.grid.size)

    def mass(self) -> float:
        """Riemann sum of |values|^2 over the grid."""
        return float(np.sum(np.abs(self.values) ** 2) * self.grid_step)


class SpectralAmplitude(_SampledAmplitude):
    """State function Phi(w) over detuning w (rad/fs) about the degenerate frequency."""

    @classmethod
    def from_values(cls, grid: np.ndarray, values: np.ndarray) -> "SpectralAmplitude":
        """Normalize arbitrary samples into a spectral amplitude."""
        return cls(grid=grid, values=_normalized(grid, values))


class TemporalAmplitude(_SampledAmplitude):
    """Temporal amplitude Phi(t) over time t (fs)."""

    @classmethod
    def from_values(cls, grid: np.ndarray, values: np.ndarray) -> "TemporalAmplitude":
        """Normalize arbitrary samples into a temporal amplitude."""
        return cls(grid=grid, values=_normalized(grid, values))


def _normalized(grid: np.ndarray, values: np.ndarray) -> np.ndarray:
    grid = np.asarray(grid, dtype=float)
    values = np.asarray(values, dtype=complex)
    if grid.size < 2:
        raise GridError("Grid needs at least 3 points")
    mass = float(np.sum(np.abs(values) ** 2) * (grid[1] - grid[0]))
    if not mass > 0:
        raise ValueError("amplitude vanishes on the grid")
    return values / math.sqrt(mass)


class DelaySetting(BaseModel):
    """Relative delay between the two photons set by the compensator."""

    model_config = ConfigDict(frozen=True)

    tau_fs: float

    @field_validator("tau_fs")
    @classmethod
    def _finite(cls, value: float) -> float:
        if not math.isfinite(value):
            raise ValueError("tau_fs must be finite")
        return value


class ExchangeSign(IntEnum):
    """Exchange symmetry of the interfering particles."""

    BOSON = 1
    FERMION = -1


class InterferencePoint(BaseModel):
    """Coincidence probabilities at one delay."""

    model_config = ConfigDict(frozen=True)

    tau_fs: float
    p20: float = Field(ge=0.0, le=TOTAL_PAIR_PROBABILITY)
    p02: float = Field(ge=0.0, le=TOTAL_PAIR_PROBABILITY)
    p11: float = Field(ge=0.0, le=TOTAL_PAIR_PROBABILITY)

    @model_validator(mode="after")
    def _check(self) -> "InterferencePoint":
        if self.p20 != self.p02:
            raise ValueError("P(2,0) and P(0,2) must be equal")
        total = self.p20 + self.p02 + self.p11
        if abs(total - TOTAL_PAIR_PROBABILITY) > COMPLEMENTARITY_TOLERANCE:
            raise ValueError(f"P(1,1) + P(2,0) + P(0,2) = {total!r}, expected 1/4")
        return self


class CurveMetadata(BaseModel):
    """How an interference curve was computed."""

    model_config = ConfigDict(frozen=True)

    crystal: CrystalConfig
    grid: GridSpec
    sign: ExchangeSign
    visibility: float = Field(ge=0.0, le=1.0)
    tau_offset_fs: float = Field(description="Raw delay of the dip center")


class InterferenceCurve(BaseModel):
    """Interference observables over a delay sweep."""

    model_config = ConfigDict(frozen=True)

    points: list[InterferencePoint]
    metadata: CurveMetadata

    @field_validator("points")
    @classmethod
    def _increasing(cls, points: list[InterferencePoint]) -> list[InterferencePoint]:
        taus = [point.tau_fs for point in points]
        if any(b <= a for a, b in zip(taus, taus[1:])):
            raise ValueError("delays must be strictly increasing")
        return points

    @property
    def taus(self) -> np.ndarray:
        return np.array([point.tau_fs for point in self.points])

    @property
    def p20(self) -> np.ndarray:
        return np.array([point.p20 for point in self.points])

    @property
    def p02(self) -> np.ndarray:
        return np.array([point.p02 for point in self.points])

    @property
    def p11(self) -> np.ndarray:
        return np.array([point.p11 for point in self.points])
