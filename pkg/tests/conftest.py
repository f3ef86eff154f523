"""Pytest configuration and fixtures."""

import math
from pathlib import Path

import numpy as np
import pytest

from coalesce.simulation.models import DetectorModel, RunConfig
from coalesce.theory.models import CrystalConfig

SIGNAL_ENERGY_EV = CrystalConfig(length_mm=0.5, dvg_fs_per_mm=200.0).signal_photon_energy_ev
# Split pairs share one timestamp, so a tight window leaves out accidental coincidences
TIGHT_WINDOW_NS = 10


@pytest.fixture
def temp_home(tmp_path: Path, monkeypatch: pytest.MonkeyPatch) -> Path:
    """Create a temporary home directory for testing.

    Args:
        tmp_path: Pytest temporary directory
        monkeypatch: Pytest monkeypatch fixture

    Returns:
        Path to temporary home directory
    """
    home = tmp_path / "home"
    home.mkdir()
    monkeypatch.setattr(Path, "home", lambda: home)
    return home


@pytest.fixture
def crystal() -> CrystalConfig:
    """0.5 mm crystal with a 100 fs wavepacket."""
    return CrystalConfig(length_mm=0.5, dvg_fs_per_mm=200.0)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(12345)


def make_detector(
    det: str = "A", eta: float = 1.0, fwhm: float = 0.0, window_us: float = 15.0
) -> DetectorModel:
    return DetectorModel(
        id=det,
        eta=eta,
        photon_energy_ev=SIGNAL_ENERGY_EV,
        energy_fwhm_ev=fwhm,
        relax_window_us=window_us,
    )


def make_run(crystal: CrystalConfig, **overrides: object) -> RunConfig:
    """Ideal-detector run of 1000 pairs at the dip center unless overridden."""
    eta = overrides.pop("eta", 1.0)
    fwhm = overrides.pop("fwhm", 0.0)
    fields: dict[str, object] = {
        "pair_rate": 10.0,
        "pair_count": 1000,
        "tau_fs": 0.0,
        "crystal": crystal,
        "detectors": (make_detector("A", eta, fwhm), make_detector("B", eta, fwhm)),
        "seed": 7,
    }
    fields.update(overrides)
    return RunConfig.model_validate(fields)


def three_sigma(probability: float, pairs: int, efficiency: float = 1.0) -> float:
    """3-sigma binomial band of an efficiency-corrected probability estimate.

    Counts are Binomial(pairs, probability * efficiency); the band is floored at
    one count so that zero-probability points tolerate a stray event.
    """
    observed = probability * efficiency
    sigma = math.sqrt(observed * (1.0 - observed) / pairs)
    return 3.0 * max(sigma, 1.0 / pairs) / efficiency
