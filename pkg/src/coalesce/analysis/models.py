"""Data models for reconstructed coincidence statistics."""

from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field

# Default coincidence window for cross-coincidence matching
DEFAULT_WINDOW_NS = 1000


class CountsSummary(BaseModel):
    """Event counts extracted from one stream."""

    model_config = ConfigDict(frozen=True)

    n_pairs_assumed: Optional[int] = Field(default=None, ge=0)
    singles_a: int = Field(default=0, ge=0)
    singles_b: int = Field(default=0, ge=0)
    doubles_a: int = Field(default=0, ge=0)
    doubles_b: int = Field(default=0, ge=0)
    cross: int = Field(default=0, ge=0)
    window_ns: int = Field(default=DEFAULT_WINDOW_NS, ge=0)
    tau_fs: Optional[float] = None

    def swapped(self) -> "CountsSummary":
        """The same counts with detector labels exchanged."""
        return self.model_copy(
            update={
                "singles_a": self.singles_b,
                "singles_b": self.singles_a,
                "doubles_a": self.doubles_b,
                "doubles_b": self.doubles_a,
            }
        )


class EstimatedPoint(BaseModel):
    """Coincidence probabilities estimated at one delay."""

    model_config = ConfigDict(frozen=True)

    tau_fs: float
    p20_hat: float = Field(ge=0.0)
    p02_hat: float = Field(ge=0.0)
    p11_hat: float = Field(ge=0.0)
    p20_err: float = Field(ge=0.0)
    p02_err: float = Field(ge=0.0)
    p11_err: float = Field(ge=0.0)
    eta_corrected: bool = False
    normalization: Literal["header", "klyshko"] = "header"
    degenerate: bool = False


class EtaCalibration(BaseModel):
    """Absolute efficiencies from heralded coincidences."""

    model_config = ConfigDict(frozen=True)

    eta_a: float = Field(ge=0.0)
    eta_b: float = Field(ge=0.0)
    eta_a_err: float = Field(ge=0.0)
    eta_b_err: float = Field(ge=0.0)
    heralding_fraction: float = Field(gt=0.0, le=1.0)


class DirectSignal(BaseModel):
    """Inferred-two-photon events at one detector."""

    model_config = ConfigDict(frozen=True)

    det: Literal["A", "B"]
    doubles: int = Field(ge=0)
    per_pair: Optional[float] = None
    mean_energy_ev: Optional[float] = None


class VisibilityFit(BaseModel):
    """Triangle-model fit to a measured interference curve."""

    model_config = ConfigDict(frozen=True)

    visibility: float
    tau_center_fs: float
    width_fs: float
    visibility_err: float = 0.0
    residual_norm: float
    identifiable: bool = True
    converged: bool = True
