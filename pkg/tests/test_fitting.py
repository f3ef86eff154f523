"""Tests for the triangle-model visibility fit."""

import numpy as np
import pytest

from coalesce.analysis.fitting import fit_curve, fit_visibility, triangle_model
from coalesce.analysis.models import EstimatedPoint
from coalesce.errors import FitError
from coalesce.theory.interference import sweep
from coalesce.theory.models import CrystalConfig, ExchangeSign


def _points(
    taus: np.ndarray, p20: np.ndarray, p11: np.ndarray, error: float
) -> list[EstimatedPoint]:
    return [
        EstimatedPoint(
            tau_fs=float(tau),
            p20_hat=float(a),
            p02_hat=float(a),
            p11_hat=float(c),
            p20_err=error,
            p02_err=error,
            p11_err=error,
        )
        for tau, a, c in zip(taus, p20, p11)
    ]


class TestTriangleModel:
    """Test triangle_model."""

    def test_shape(self) -> None:
        """Full dip at the center, half depth a quarter width away, flat outside."""
        taus = np.array([0.0, 25.0, 50.0, 80.0])
        p20, p11 = triangle_model(taus, 1.0, 0.0, 100.0, ExchangeSign.BOSON)
        assert np.allclose(p11, [0.0, 1 / 16, 1 / 8, 1 / 8])
        assert np.allclose(2 * p20 + p11, 0.25)

    def test_fermion_peak(self) -> None:
        """Fermions show a peak of the same width."""
        _, p11 = triangle_model(np.array([0.0, 60.0]), 0.5, 0.0, 100.0, ExchangeSign.FERMION)
        assert np.allclose(p11, [0.1875, 0.125])


class TestFitCurve:
    """Test self-fits of computed curves."""

    def test_ideal_dip(self, crystal: CrystalConfig) -> None:
        """A computed dip recovers v = 1 and W = L*D."""
        fit = fit_curve(sweep(crystal, np.linspace(-150, 150, 61).tolist()))
        assert fit.visibility == pytest.approx(1.0, abs=1e-3)
        assert fit.width_fs == pytest.approx(crystal.width_fs, rel=0.01)
        assert fit.tau_center_fs == pytest.approx(0.0, abs=0.5)
        assert fit.identifiable

    def test_partial_visibility(self, crystal: CrystalConfig) -> None:
        """v = 0.5 is recovered."""
        curve = sweep(crystal, np.linspace(-150, 150, 61).tolist(), visibility=0.5)
        fit = fit_curve(curve)
        assert fit.visibility == pytest.approx(0.5, abs=1e-3)
        assert fit.width_fs == pytest.approx(crystal.width_fs, rel=0.01)

    def test_fermion_peak(self, crystal: CrystalConfig) -> None:
        """A fermion peak fits with the fermion model."""
        curve = sweep(crystal, np.linspace(-150, 150, 61).tolist(), sign=ExchangeSign.FERMION)
        fit = fit_curve(curve)
        assert fit.visibility == pytest.approx(1.0, abs=1e-3)
        assert fit.width_fs == pytest.approx(crystal.width_fs, rel=0.01)

    def test_flat_curve_unidentifiable(self, crystal: CrystalConfig) -> None:
        """v = 0 leaves center and width undetermined."""
        curve = sweep(crystal, np.linspace(-150, 150, 31).tolist(), visibility=0.0)
        fit = fit_curve(curve)
        assert fit.visibility == pytest.approx(0.0, abs=1e-6)
        assert not fit.identifiable


class TestFitVisibility:
    """Test fit_visibility on estimates."""

    def test_noisy_estimates(self) -> None:
        """Weighted fit of noisy points lands near the true parameters."""
        rng = np.random.default_rng(2024)
        taus = np.linspace(-150, 150, 41)
        p20, p11 = triangle_model(taus, 0.8, 5.0, 120.0, ExchangeSign.BOSON)
        error = 0.002
        points = _points(
            taus,
            p20 + rng.normal(0, error, taus.size),
            p11 + rng.normal(0, error, taus.size),
            error,
        )
        fit = fit_visibility(points)
        assert fit.visibility == pytest.approx(0.8, abs=0.03)
        assert fit.tau_center_fs == pytest.approx(5.0, abs=4.0)
        assert fit.width_fs == pytest.approx(120.0, rel=0.08)
        assert 0 < fit.visibility_err < 0.03
        assert fit.identifiable
        assert fit.converged

    def test_unordered_points(self) -> None:
        """Points are sorted by delay before fitting."""
        taus = np.linspace(-150, 150, 21)
        p20, p11 = triangle_model(taus, 1.0, 0.0, 100.0, ExchangeSign.BOSON)
        points = _points(taus, p20, p11, 0.0)
        fit = fit_visibility(points[::-1])
        assert fit.visibility == pytest.approx(1.0, abs=1e-4)
        assert fit.width_fs == pytest.approx(100.0, rel=1e-3)

    def test_too_few_points(self) -> None:
        """Seven points are needed."""
        taus = np.linspace(-50, 50, 6)
        p20, p11 = triangle_model(taus, 1.0, 0.0, 100.0, ExchangeSign.BOSON)
        with pytest.raises(FitError, match="at least 7"):
            fit_visibility(_points(taus, p20, p11, 0.01))

    def test_coincident_delays(self) -> None:
        """All points at one delay give no width."""
        taus = np.zeros(8)
        with pytest.raises(FitError, match="distinct"):
            fit_visibility(_points(taus, np.full(8, 0.1), np.full(8, 0.05), 0.01))
