"""Main application class for Coalesce."""

from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Optional, TypeVar, Union

from pydantic import BaseModel, ConfigDict

from coalesce import __version__
from coalesce.analysis.counting import classify
from coalesce.analysis.estimation import direct_coincidence_signal, estimate, klyshko_eta
from coalesce.analysis.fitting import MIN_FIT_POINTS, fit_visibility
from coalesce.analysis.models import (
    CountsSummary,
    DirectSignal,
    EstimatedPoint,
    EtaCalibration,
    VisibilityFit,
)
from coalesce.analysis.results import write_estimates_csv, write_theory_csv
from coalesce.core.config import Config, ExperimentSpec
from coalesce.core.selftest import CheckRegistry, CheckResult, InvariantCheck
from coalesce.errors import FitError
from coalesce.simulation.acquisition import generate
from coalesce.simulation.eventfile import deserialize, serialize
from coalesce.theory.interference import sweep
from coalesce.theory.models import DelaySetting, InterferenceCurve
from coalesce.utils.logging import get_logger, log_duration
from coalesce.utils.plotting import plot_curves

logger = get_logger(__name__)

PathLike = Union[str, Path]
T = TypeVar("T")
R = TypeVar("R")


class TheoryResult(BaseModel):
    """Output of a theory sweep."""

    curve: InterferenceCurve
    csv_path: Path
    svg_path: Optional[Path] = None


class FileAnalysis(BaseModel):
    """Counts and estimates for one event file."""

    model_config = ConfigDict(frozen=True)

    path: Path
    summary: CountsSummary
    point: EstimatedPoint
    direct: tuple[DirectSignal, DirectSignal]


class AnalysisResult(BaseModel):
    """Output of analyzing a set of event files."""

    files: list[FileAnalysis]
    csv_path: Path
    svg_path: Optional[Path] = None
    fit: Optional[VisibilityFit] = None

    @property
    def points(self) -> list[EstimatedPoint]:
        return [analysis.point for analysis in self.files]


def event_file_name(stream_id: int, tau_fs: float, seed: int) -> str:
    """File name of one run. The stream id keeps nearly equal delays apart."""
    return f"events_{stream_id:04d}_tau{tau_fs:+.3f}fs_seed{seed}.tsv"


def pooled_summary(summaries: Sequence[CountsSummary]) -> CountsSummary:
    """Sum counts over runs; the pair count is kept only when every run has one."""
    pairs = [summary.n_pairs_assumed for summary in summaries]
    return CountsSummary(
        n_pairs_assumed=None if None in pairs else sum(p for p in pairs if p is not None),
        singles_a=sum(summary.singles_a for summary in summaries),
        singles_b=sum(summary.singles_b for summary in summaries),
        doubles_a=sum(summary.doubles_a for summary in summaries),
        doubles_b=sum(summary.doubles_b for summary in summaries),
        cross=sum(summary.cross for summary in summaries),
        window_ns=summaries[0].window_ns if summaries else 0,
    )


class CoalesceApp:
    """Main application class that coordinates all components."""

    def __init__(self, debug: bool = False) -> None:
        """Initialize the Coalesce application.

        Args:
            debug: Enable debug mode
        """
        self.debug = debug
        self.config = Config()
        self.checks = CheckRegistry()
        self._initialize()

    def _initialize(self) -> None:
        """Initialize the application components."""
        self.config.load()
        self.checks.discover_checks()

    @property
    def workers(self) -> int:
        return max(1, self.config.workers)

    def _map(self, func: Callable[[T], R], items: Sequence[T]) -> list[R]:
        if self.workers > 1 and len(items) > 1:
            with ThreadPoolExecutor(max_workers=self.workers) as pool:
                return list(pool.map(func, items))
        return [func(item) for item in items]

    def get_info(self, spec: Optional[ExperimentSpec] = None) -> str:
        """Get information about Coalesce and the resolved experiment.

        Returns:
            Formatted information string
        """
        spec = spec or ExperimentSpec()
        crystal = spec.crystal()
        info_lines = [
            f"[bold]Coalesce v{__version__}[/bold]",
            "",
            "[cyan]Crystal:[/cyan] "
            f"L = {crystal.length_mm:g} mm, D = {crystal.dvg_fs_per_mm:g} fs/mm, "
            f"pump {crystal.pump_wavelength_nm:g} nm",
            f"[cyan]Dip full width L*D:[/cyan] {abs(crystal.width_fs):g} fs",
            f"[cyan]Signal photon energy:[/cyan] {crystal.signal_photon_energy_ev:.4f} eV",
            f"[cyan]Grid:[/cyan] {spec.grid_points} points over {spec.grid_lobes:g} lobes",
            f"[cyan]Delay sweep:[/cyan] {spec.tau_min_fs:g} to {spec.tau_max_fs:g} fs, "
            f"{spec.tau_steps} steps",
            f"[cyan]Statistics:[/cyan] {'fermion' if spec.fermion else 'boson'}, "
            f"visibility {spec.visibility:g}",
            f"[cyan]Efficiencies:[/cyan] A {spec.eta_a:g}, B {spec.eta_b:g}",
            f"[cyan]Seed:[/cyan] {spec.seed}",
            f"[cyan]Output directory:[/cyan] {spec.out_dir}",
            f"[cyan]Workers:[/cyan] {self.workers}",
            f"[cyan]Self-test checks:[/cyan] {len(self.checks.checks)}",
            f"[cyan]Debug mode:[/cyan] {'Enabled' if self.debug else 'Disabled'}",
        ]

        return "\n".join(info_lines)

    def theory(self, spec: ExperimentSpec) -> TheoryResult:
        """Sweep the theory curve and write it as CSV (and SVG when requested)."""
        curve = sweep(
            spec.crystal(),
            spec.taus(),
            sign=spec.sign(),
            visibility=spec.visibility,
            grid=spec.grid(),
            workers=self.workers,
        )
        out_dir = Path(spec.out_dir)
        csv_path = write_theory_csv(curve, out_dir / "theory.csv")
        svg_path = plot_curves(out_dir / "theory.svg", curve=curve) if spec.svg else None
        logger.info(f"Wrote theory curve with {len(curve.points)} points to {csv_path}")
        return TheoryResult(curve=curve, csv_path=csv_path, svg_path=svg_path)

    def run(self, spec: ExperimentSpec) -> list[Path]:
        """Simulate one acquisition per delay and write an event file for each."""
        out_dir = Path(spec.out_dir)

        def acquire(indexed: tuple[int, DelaySetting]) -> Path:
            stream_id, tau = indexed
            config = spec.run_config(tau, stream_id=stream_id)
            path = out_dir / event_file_name(stream_id, tau.tau_fs, spec.seed)
            serialize(generate(config), path)
            return path

        with log_duration(logger, "Acquisition"):
            paths = self._map(acquire, list(enumerate(spec.taus())))
        logger.info(f"Wrote {len(paths)} event files to {out_dir}")
        return paths

    def analyze_file(self, path: PathLike, spec: ExperimentSpec) -> FileAnalysis:
        """Classify and estimate one event file."""
        stream = deserialize(path)
        summary = classify(stream, spec.coincidence_window_ns)
        return FileAnalysis(
            path=Path(path),
            summary=summary,
            point=estimate(summary, spec.eta_a, spec.eta_b),
            direct=(
                direct_coincidence_signal(stream, "A"),
                direct_coincidence_signal(stream, "B"),
            ),
        )

    def analyze(self, spec: ExperimentSpec, paths: Sequence[PathLike]) -> AnalysisResult:
        """Estimate the interference curve from event files.

        Every file is parsed before anything is written, so a malformed file
        aborts the analysis without output.
        """
        with log_duration(logger, "Event file analysis"):
            files = self._map(lambda path: self.analyze_file(path, spec), list(paths))
        files.sort(key=lambda analysis: analysis.point.tau_fs)
        points = [analysis.point for analysis in files]

        fit = None
        if len(points) >= MIN_FIT_POINTS:
            try:
                fit = fit_visibility(points, crystal=spec.crystal(), sign=spec.sign())
            except FitError as e:
                logger.warning(f"{e}")
                fit = e.best

        out_dir = Path(spec.out_dir)
        csv_path = write_estimates_csv(points, out_dir / "estimates.csv")
        svg_path = None
        if spec.svg:
            curve = sweep(
                spec.crystal(),
                spec.taus(),
                sign=spec.sign(),
                visibility=spec.visibility,
                grid=spec.grid(),
                workers=self.workers,
            )
            svg_path = plot_curves(out_dir / "estimates.svg", curve=curve, estimates=points)
        logger.info(f"Wrote {len(points)} estimated points to {csv_path}")
        return AnalysisResult(files=files, csv_path=csv_path, svg_path=svg_path, fit=fit)

    def calibrate(self, spec: ExperimentSpec, paths: Sequence[PathLike]) -> EtaCalibration:
        """Klyshko efficiencies from event files recorded at distinguishable delay."""
        summaries = [
            classify(deserialize(path), spec.coincidence_window_ns) for path in paths
        ]
        return klyshko_eta(pooled_summary(summaries))

    def list_checks(self, selector: Optional[str] = None) -> list[InvariantCheck]:
        """Registered checks matching `selector`, without running them."""
        return self.checks.find_checks(selector)

    def selftest(self, spec: ExperimentSpec, selector: Optional[str] = None) -> list[CheckResult]:
        """Run the invariant checks matching `selector` (all when None)."""
        return self.checks.run(spec, selector)
