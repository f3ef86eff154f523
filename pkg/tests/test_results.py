"""Tests for curve CSV tables and SVG figures."""

from pathlib import Path

import numpy as np
import pytest

from coalesce.analysis.models import EstimatedPoint
from coalesce.analysis.results import (
    ESTIMATE_COLUMNS,
    THEORY_COLUMNS,
    read_estimates_csv,
    read_theory_csv,
    write_estimates_csv,
    write_theory_csv,
)
from coalesce.errors import ResultFileError
from coalesce.theory.interference import sweep
from coalesce.theory.models import CrystalConfig, InterferenceCurve
from coalesce.utils.plotting import GENERATOR, plot_curves


@pytest.fixture
def curve(crystal: CrystalConfig) -> InterferenceCurve:
    return sweep(crystal, np.linspace(-200, 200, 101).tolist())


@pytest.fixture
def estimates() -> list[EstimatedPoint]:
    return [
        EstimatedPoint(
            tau_fs=-50.0,
            p20_hat=0.06,
            p02_hat=0.065,
            p11_hat=0.12,
            p20_err=0.002,
            p02_err=0.002,
            p11_err=0.003,
        ),
        EstimatedPoint(
            tau_fs=0.0,
            p20_hat=0.124,
            p02_hat=0.121,
            p11_hat=0.004,
            p20_err=0.003,
            p02_err=0.003,
            p11_err=0.001,
        ),
    ]


class TestTheoryCsv:
    """Test theory curve tables."""

    def test_layout(self, curve: InterferenceCurve, tmp_path: Path) -> None:
        """One header row and one row per delay."""
        path = write_theory_csv(curve, tmp_path / "theory.csv")
        lines = path.read_text(encoding="utf-8").splitlines()
        assert lines[0] == ",".join(THEORY_COLUMNS)
        assert len(lines) == 102
        assert lines[1].startswith("-200,")

    def test_read_back(self, curve: InterferenceCurve, tmp_path: Path) -> None:
        """Rows come back as validated points."""
        path = write_theory_csv(curve, tmp_path / "theory.csv")
        points = read_theory_csv(path)
        assert len(points) == 101
        for read, written in zip(points, curve.points):
            assert read.tau_fs == pytest.approx(written.tau_fs)
            assert read.p11 == pytest.approx(written.p11, abs=1e-14)

    def test_creates_parent(self, curve: InterferenceCurve, tmp_path: Path) -> None:
        """Missing output directories are created."""
        path = write_theory_csv(curve, tmp_path / "nested" / "out" / "theory.csv")
        assert path.exists()

    def test_wrong_columns(self, tmp_path: Path) -> None:
        """Foreign tables are refused."""
        path = tmp_path / "theory.csv"
        path.write_text("tau,p11\n0,0\n", encoding="utf-8")
        with pytest.raises(ResultFileError, match="expected columns"):
            read_theory_csv(path)

    def test_invalid_row(self, tmp_path: Path) -> None:
        """Rows violating complementarity are refused."""
        path = tmp_path / "theory.csv"
        path.write_text("tau_fs,p20,p02,p11\n0,0.1,0.1,0.1\n", encoding="utf-8")
        with pytest.raises(ResultFileError):
            read_theory_csv(path)

    def test_missing_value(self, tmp_path: Path) -> None:
        """Empty cells are refused."""
        path = tmp_path / "theory.csv"
        path.write_text("tau_fs,p20,p02,p11\n0,0.125,,0\n", encoding="utf-8")
        with pytest.raises(ResultFileError, match="missing values"):
            read_theory_csv(path)

    def test_not_numeric(self, tmp_path: Path) -> None:
        """Text cells are refused."""
        path = tmp_path / "theory.csv"
        path.write_text("tau_fs,p20,p02,p11\n0,x,0.125,0\n", encoding="utf-8")
        with pytest.raises(ResultFileError):
            read_theory_csv(path)


class TestEstimatesCsv:
    """Test estimated curve tables."""

    def test_round_trip(self, estimates: list[EstimatedPoint], tmp_path: Path) -> None:
        """Estimates and their errors survive the table."""
        path = write_estimates_csv(estimates, tmp_path / "estimates.csv")
        assert path.read_text(encoding="utf-8").splitlines()[0] == ",".join(ESTIMATE_COLUMNS)
        assert read_estimates_csv(path) == estimates

    def test_empty(self, tmp_path: Path) -> None:
        """No estimates, header only."""
        path = write_estimates_csv([], tmp_path / "estimates.csv")
        assert path.read_text(encoding="utf-8") == ",".join(ESTIMATE_COLUMNS) + "\n"

    def test_negative_estimate(self, tmp_path: Path) -> None:
        """Negative probabilities are refused."""
        path = tmp_path / "estimates.csv"
        path.write_text(",".join(ESTIMATE_COLUMNS) + "\n0,-0.1,0,0,0,0,0\n", encoding="utf-8")
        with pytest.raises(ResultFileError):
            read_estimates_csv(path)


class TestPlotCurves:
    """Test plot_curves."""

    def test_svg(
        self, curve: InterferenceCurve, estimates: list[EstimatedPoint], tmp_path: Path
    ) -> None:
        """An SVG document with both layers is written."""
        path = plot_curves(tmp_path / "curve.svg", curve=curve, estimates=estimates)
        text = path.read_text(encoding="utf-8")
        assert "<svg" in text
        assert "P(1,1) estimate" in text
        assert "P(2,0) theory" in text
        assert GENERATOR in text

    def test_deterministic(self, curve: InterferenceCurve, tmp_path: Path) -> None:
        """The same inputs give the same bytes."""
        first = plot_curves(tmp_path / "a.svg", curve=curve).read_bytes()
        second = plot_curves(tmp_path / "b.svg", curve=curve).read_bytes()
        assert first == second

    def test_nothing_to_plot(self, tmp_path: Path) -> None:
        """A figure needs a curve or estimates."""
        with pytest.raises(ValueError):
            plot_curves(tmp_path / "empty.svg")
