"""Configuration management for Coalesce."""

import json
from collections.abc import Mapping
from pathlib import Path
from typing import Any, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from coalesce.analysis.models import DEFAULT_WINDOW_NS
from coalesce.errors import GridError
from coalesce.simulation.models import DetectorModel, RunConfig
from coalesce.theory.models import CrystalConfig, DelaySetting, ExchangeSign, GridSpec
from coalesce.utils.files import atomic_write_text
from coalesce.utils.logging import get_logger

logger = get_logger(__name__)

SPEC_VERSION = 1
DEFAULT_PAIR_COUNT = 100_000


class CoalesceSettings(BaseSettings):
    """Application settings using pydantic."""

    model_config = SettingsConfigDict(env_prefix="COALESCE_", env_file=".env")

    debug: bool = Field(default=False, description="Enable debug mode")
    workers: int = Field(default=1, ge=1, description="Threads for delay-parallel work")
    default_out_dir: str = Field(default="out", description="Output directory if a spec names none")


class ExperimentSpec(BaseModel):
    """Flat, typed and versioned description of one experiment."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    version: int = SPEC_VERSION

    # Crystal and theory grid
    crystal_length_mm: float = Field(default=0.5, gt=0.0)
    dvg_fs_per_mm: float = Field(default=200.0, description="Illustrative value, not measured")
    pump_wavelength_nm: float = Field(default=351.1, gt=0.0)
    grid_points: int = Field(default=4097, ge=3)
    grid_lobes: float = Field(default=320.0, gt=0.0)

    # Delay sweep, zero at the dip center
    tau_min_fs: float = -200.0
    tau_max_fs: float = 200.0
    tau_steps: int = Field(default=101, ge=1)
    fermion: bool = False
    visibility: float = Field(default=1.0, ge=0.0, le=1.0)

    # Acquisition
    pair_rate: float = Field(default=10.0, gt=0.0, description="Pairs per second")
    pair_count: Optional[int] = Field(default=None, ge=0)
    duration_s: Optional[float] = Field(default=None, gt=0.0)
    eta_a: float = Field(default=0.2, ge=0.0, le=1.0)
    eta_b: float = Field(default=0.2, ge=0.0, le=1.0)
    energy_fwhm_ev: float = Field(default=0.25, ge=0.0)
    relax_window_us: float = Field(default=15.0, gt=0.0)
    leakage_rate: float = Field(default=0.0, ge=0.0)
    seed: int = Field(default=0, ge=0, lt=2**64)

    # Analysis and output
    coincidence_window_ns: int = Field(default=DEFAULT_WINDOW_NS, ge=0)
    out_dir: str = "out"
    svg: bool = False

    @model_validator(mode="after")
    def _check(self) -> "ExperimentSpec":
        if self.version != SPEC_VERSION:
            raise ValueError(f"unsupported spec version {self.version}, expected {SPEC_VERSION}")
        if self.pair_count is not None and self.duration_s is not None:
            raise ValueError("set at most one of pair_count and duration_s")
        if self.tau_steps > 1 and not self.tau_max_fs > self.tau_min_fs:
            raise ValueError("tau_max_fs must exceed tau_min_fs")
        # Re-validate the domain models the spec feeds
        self.crystal()
        try:
            self.grid().validate_grid()
        except GridError as e:
            raise ValueError(str(e)) from e
        self.detectors()
        return self

    def crystal(self) -> CrystalConfig:
        return CrystalConfig(
            length_mm=self.crystal_length_mm,
            dvg_fs_per_mm=self.dvg_fs_per_mm,
            pump_wavelength_nm=self.pump_wavelength_nm,
        )

    def grid(self) -> GridSpec:
        return GridSpec.for_crystal(self.crystal(), points=self.grid_points, lobes=self.grid_lobes)

    def sign(self) -> ExchangeSign:
        return ExchangeSign.FERMION if self.fermion else ExchangeSign.BOSON

    def taus(self) -> list[DelaySetting]:
        """Evenly spaced delays from tau_min_fs to tau_max_fs inclusive."""
        if self.tau_steps == 1:
            values = [self.tau_min_fs]
        else:
            values = np.linspace(self.tau_min_fs, self.tau_max_fs, self.tau_steps).tolist()
        return [DelaySetting(tau_fs=value) for value in values]

    def detectors(self) -> tuple[DetectorModel, DetectorModel]:
        energy = self.crystal().signal_photon_energy_ev
        return (
            DetectorModel(
                id="A",
                eta=self.eta_a,
                photon_energy_ev=energy,
                energy_fwhm_ev=self.energy_fwhm_ev,
                relax_window_us=self.relax_window_us,
            ),
            DetectorModel(
                id="B",
                eta=self.eta_b,
                photon_energy_ev=energy,
                energy_fwhm_ev=self.energy_fwhm_ev,
                relax_window_us=self.relax_window_us,
            ),
        )

    def run_config(self, tau: Union[DelaySetting, float], stream_id: int = 0) -> RunConfig:
        """Acquisition run at one delay."""
        tau_fs = tau.tau_fs if isinstance(tau, DelaySetting) else float(tau)
        pair_count = self.pair_count
        if pair_count is None and self.duration_s is None:
            pair_count = DEFAULT_PAIR_COUNT
        return RunConfig(
            pair_rate=self.pair_rate,
            duration_s=self.duration_s,
            pair_count=pair_count,
            tau_fs=tau_fs,
            crystal=self.crystal(),
            sign=self.sign(),
            visibility=self.visibility,
            detectors=self.detectors(),
            seed=self.seed,
            stream_id=stream_id,
            leakage_rate=self.leakage_rate,
            grid=self.grid(),
        )


class Config:
    """Configuration manager for Coalesce."""

    def __init__(self) -> None:
        """Initialize configuration."""
        self.config_dir = Path.home() / ".coalesce"
        self.config_file = self.config_dir / "config.json"
        self.settings = CoalesceSettings()
        self._user_config: dict[str, Any] = {}

    def load(self) -> None:
        """Load user defaults from file."""
        self.config_dir.mkdir(parents=True, exist_ok=True)

        if self.config_file.exists():
            try:
                with open(self.config_file, encoding="utf-8") as f:
                    self._user_config = json.load(f)
            except json.JSONDecodeError:
                logger.warning(f"Ignoring corrupted config file {self.config_file}")
                self._user_config = {}

    def save(self) -> None:
        """Save user defaults to file."""
        atomic_write_text(self.config_file, json.dumps(self._user_config, indent=2) + "\n")

    def get(self, key: str, default: Any = None) -> Any:
        """Get a configuration value.

        Args:
            key: Configuration key
            default: Default value if key not found

        Returns:
            Configuration value
        """
        # User config, then settings, then default
        if key in self._user_config:
            return self._user_config[key]
        elif hasattr(self.settings, key):
            return getattr(self.settings, key)
        else:
            return default

    def set(self, key: str, value: Any) -> Any:
        """Set a user default and persist it.

        Args:
            key: Name of a `CoalesceSettings` field
            value: New value, coerced to the field type

        Returns:
            The stored value

        Raises:
            ValueError: If no setting has this name or the value does not fit it
        """
        if key not in CoalesceSettings.model_fields:
            known = ", ".join(sorted(CoalesceSettings.model_fields))
            raise ValueError(f"Unknown setting {key!r} (known: {known})")
        value = getattr(CoalesceSettings.model_validate({key: value}), key)
        self._user_config[key] = value
        self.save()
        return value

    @property
    def workers(self) -> int:
        return int(self.get("workers", 1))

    def load_spec(
        self,
        path: Optional[Union[str, Path]] = None,
        overrides: Optional[Mapping[str, Any]] = None,
    ) -> ExperimentSpec:
        """Build an experiment spec from a JSON file and command-line overrides.

        Values resolve as overrides, then the file, then user defaults for
        `out_dir`, then built-in defaults. Every derived domain model is
        validated before the spec is returned.

        Args:
            path: JSON spec file
            overrides: Field values; None entries are ignored

        Returns:
            Validated experiment spec

        Raises:
            pydantic.ValidationError: With field-level messages for invalid values
            ValueError: If the file is not a JSON object
        """
        data: dict[str, Any] = {}
        default_out_dir = self.get("default_out_dir")
        if default_out_dir:
            data["out_dir"] = default_out_dir
        if path is not None:
            with open(path, encoding="utf-8") as f:
                document = json.load(f)
            if not isinstance(document, dict):
                raise ValueError(f"{path}: experiment spec must be a JSON object")
            data.update(document)
        given = {key: value for key, value in (overrides or {}).items() if value is not None}
        # A flag choosing one acquisition length replaces the other from the file
        if "pair_count" in given:
            data.pop("duration_s", None)
        if "duration_s" in given:
            data.pop("pair_count", None)
        data.update(given)

        spec = ExperimentSpec.model_validate(data)
        logger.debug(f"Loaded experiment spec: {spec.model_dump()}")
        return spec

    @staticmethod
    def save_spec(spec: ExperimentSpec, path: Union[str, Path]) -> Path:
        """Write a spec as an indented JSON document."""
        return atomic_write_text(path, spec.model_dump_json(indent=2) + "\n")
