"""Data models for the detector response and the simulated event stream."""

import math
from collections.abc import Iterator
from enum import Enum
from typing import Any, Literal, NamedTuple, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from coalesce.theory.models import CrystalConfig, ExchangeSign, GridSpec

# FWHM of a Gaussian in units of its standard deviation, 2 sqrt(2 ln 2)
FWHM_PER_SIGMA = 2.0 * math.sqrt(2.0 * math.log(2.0))

DETECTOR_IDS: tuple[str, str] = ("A", "B")

EVENT_SCHEMA = "coalesce-events"
EVENT_SCHEMA_VERSION = 1

DetectorId = Literal["A", "B"]


class DetectorModel(BaseModel):
    """Phenomenological photon-number-resolving energy detector."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    id: DetectorId
    eta: float = Field(ge=0.0, le=1.0, description="Quantum efficiency")
    photon_energy_ev: float = Field(gt=0.0, description="Energy of one signal photon")
    energy_fwhm_ev: float = Field(default=0.25, ge=0.0, description="Gaussian energy FWHM")
    relax_window_us: float = Field(default=15.0, gt=0.0, description="Thermal relaxation window")

    @property
    def sigma_ev(self) -> float:
        return self.energy_fwhm_ev / FWHM_PER_SIGMA

    @property
    def relax_window_ns(self) -> int:
        return max(1, round(self.relax_window_us * 1000.0))


class EventRecord(BaseModel):
    """One time-stamped detection."""

    model_config = ConfigDict(frozen=True)

    t_ns: int = Field(ge=0)
    det: DetectorId
    energy_ev: float = Field(ge=0.0)
    n_inferred: int = Field(ge=0)


class Absorption(NamedTuple):
    """Photons absorbed within one relaxation window."""

    t_ns: int
    quanta: int


class PairOutcome(str, Enum):
    """Photon numbers reaching detectors (A, B) after splitter and polarizers."""

    BOTH_A = "2,0"
    BOTH_B = "0,2"
    SPLIT = "1,1"
    ONLY_A = "1,0"
    ONLY_B = "0,1"
    NONE = "0,0"

    @property
    def counts(self) -> tuple[int, int]:
        a, b = self.value.split(",")
        return int(a), int(b)


class RunConfig(BaseModel):
    """Everything needed to replay one acquisition run."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    pair_rate: float = Field(gt=0.0, description="Pairs per second at the beam splitter")
    duration_s: Optional[float] = Field(default=None, gt=0.0)
    pair_count: Optional[int] = Field(default=None, ge=0)
    tau_fs: float = Field(description="Delay measured from the dip center")
    crystal: CrystalConfig
    sign: ExchangeSign = ExchangeSign.BOSON
    visibility: float = Field(default=1.0, ge=0.0, le=1.0)
    detectors: tuple[DetectorModel, DetectorModel]
    seed: int = Field(ge=0, lt=2**64)
    stream_id: int = Field(default=0, ge=0)
    leakage_rate: float = Field(
        default=0.0, ge=0.0, description="Pump-leakage arrivals per second per detector"
    )
    grid: Optional[GridSpec] = None

    @model_validator(mode="after")
    def _check(self) -> "RunConfig":
        if (self.duration_s is None) == (self.pair_count is None):
            raise ValueError("exactly one of duration_s and pair_count must be set")
        if tuple(detector.id for detector in self.detectors) != DETECTOR_IDS:
            raise ValueError("detectors must be ordered (A, B)")
        if not math.isfinite(self.tau_fs):
            raise ValueError("tau_fs must be finite")
        return self


class StreamHeader(BaseModel):
    """Header line of an event file."""

    model_config = ConfigDict(frozen=True, extra="forbid", populate_by_name=True)

    schema_name: Literal["coalesce-events"] = Field(default=EVENT_SCHEMA, alias="schema")
    version: int = EVENT_SCHEMA_VERSION
    pairs: Optional[int] = Field(default=None, ge=0, description="Pairs generated")
    config: Optional[RunConfig] = None


def _column(values: Any, dtype: Any) -> np.ndarray:
    out = np.array(values, dtype=dtype, copy=True)
    out.setflags(write=False)
    return out


class EventStream(BaseModel):
    """Time-ordered detection events held column-wise.

    Detector ids are stored as codes into DETECTOR_IDS.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    header: StreamHeader = Field(default_factory=StreamHeader)
    t_ns: np.ndarray
    det: np.ndarray
    energy_ev: np.ndarray
    n_inferred: np.ndarray

    @model_validator(mode="before")
    @classmethod
    def _coerce(cls, data: Any) -> Any:
        if isinstance(data, dict):
            data = dict(data)
            data["t_ns"] = _column(data.get("t_ns", []), np.int64)
            data["det"] = _column(data.get("det", []), np.int8)
            data["energy_ev"] = _column(data.get("energy_ev", []), np.float64)
            data["n_inferred"] = _column(data.get("n_inferred", []), np.int64)
        return data

    @model_validator(mode="after")
    def _check(self) -> "EventStream":
        size = self.t_ns.size
        if not all(col.size == size for col in (self.det, self.energy_ev, self.n_inferred)):
            raise ValueError("event columns must have equal length")
        if size:
            if self.t_ns[0] < 0:
                raise ValueError("timestamps must be nonnegative")
            if np.any(np.diff(self.t_ns) < 0):
                raise ValueError("timestamps must be nondecreasing")
            if np.any((self.det != 0) & (self.det != 1)):
                raise ValueError("detector codes must be 0 (A) or 1 (B)")
            if np.any(self.energy_ev < 0) or np.any(self.n_inferred < 0):
                raise ValueError("energies and inferred counts must be nonnegative")
        return self

    @classmethod
    def from_records(
        cls, records: list[EventRecord], header: Optional[StreamHeader] = None
    ) -> "EventStream":
        return cls(
            header=header or StreamHeader(),
            t_ns=[record.t_ns for record in records],
            det=[DETECTOR_IDS.index(record.det) for record in records],
            energy_ev=[record.energy_ev for record in records],
            n_inferred=[record.n_inferred for record in records],
        )

    def __len__(self) -> int:
        return int(self.t_ns.size)

    def records(self) -> Iterator[EventRecord]:
        """Iterate events as EventRecord objects."""
        for t, det, energy, n in zip(
            self.t_ns.tolist(), self.det.tolist(), self.energy_ev.tolist(), self.n_inferred.tolist()
        ):
            yield EventRecord(t_ns=t, det=DETECTOR_IDS[det], energy_ev=energy, n_inferred=n)

    def chunks(self, size: int) -> Iterator["EventStream"]:
        """Split into time-contiguous chunks of at most `size` events."""
        if size < 1:
            raise ValueError("chunk size must be positive")
        for start in range(0, len(self), size):
            stop = start + size
            yield EventStream(
                header=self.header,
                t_ns=self.t_ns[start:stop],
                det=self.det[start:stop],
                energy_ev=self.energy_ev[start:stop],
                n_inferred=self.n_inferred[start:stop],
            )

    def for_detector(self, det: DetectorId) -> "EventStream":
        mask = self.det == DETECTOR_IDS.index(det)
        return EventStream(
            header=self.header,
            t_ns=self.t_ns[mask],
            det=self.det[mask],
            energy_ev=self.energy_ev[mask],
            n_inferred=self.n_inferred[mask],
        )


class PoissonFit(BaseModel):
    """Chi-squared goodness of fit of photon counts to a Poisson law."""

    model_config = ConfigDict(frozen=True)

    mean: float
    statistic: float
    dof: int
    p_value: float
