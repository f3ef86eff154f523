"""CLI entry point for Coalesce."""

from collections.abc import Callable
from typing import Any, NoReturn, Optional, TypeVar

import click
from pydantic import ValidationError
from rich.console import Console
from rich.markup import escape
from rich.panel import Panel
from rich.table import Table
from rich.text import Text

from coalesce import __version__
from coalesce.core.app import CoalesceApp
from coalesce.core.config import CoalesceSettings, ExperimentSpec
from coalesce.errors import CoalesceError
from coalesce.utils.logging import setup_logging

console = Console()

F = TypeVar("F", bound=Callable[..., Any])

# CLI option name -> ExperimentSpec field
OVERRIDES = {
    "seed": "seed",
    "out": "out_dir",
    "tau_min": "tau_min_fs",
    "tau_max": "tau_max_fs",
    "tau_steps": "tau_steps",
    "crystal_length": "crystal_length_mm",
    "dvg": "dvg_fs_per_mm",
    "eta_a": "eta_a",
    "eta_b": "eta_b",
    "visibility": "visibility",
    "fermion": "fermion",
    "svg": "svg",
    "pair_count": "pair_count",
    "duration": "duration_s",
    "pair_rate": "pair_rate",
    "window": "coincidence_window_ns",
}

EXPERIMENT_OPTIONS = [
    click.option(
        "--config",
        "config_path",
        type=click.Path(exists=True, dir_okay=False),
        help="JSON experiment spec; flags override its values.",
    ),
    click.option("--seed", type=click.IntRange(min=0), help="Random seed."),
    click.option("--out", type=click.Path(file_okay=False), help="Output directory."),
    click.option("--tau-min", type=float, help="First delay in fs (0 at the dip center)."),
    click.option("--tau-max", type=float, help="Last delay in fs."),
    click.option("--tau-steps", type=click.IntRange(min=1), help="Number of delays."),
    click.option("--crystal-length", type=float, help="Crystal length L in mm."),
    click.option("--dvg", type=float, help="Inverse-group-velocity difference D in fs/mm."),
    click.option("--eta-a", type=float, help="Quantum efficiency of detector A."),
    click.option("--eta-b", type=float, help="Quantum efficiency of detector B."),
    click.option("--visibility", type=float, help="Interference visibility in [0, 1]."),
    click.option("--fermion/--boson", default=None, help="Exchange statistics."),
    click.option("--svg/--no-svg", default=None, help="Also write an SVG figure."),
    click.option("--pair-count", type=click.IntRange(min=0), help="Pairs per run."),
    click.option("--duration", type=float, help="Run duration in seconds."),
    click.option("--pair-rate", type=float, help="Pairs per second at the beam splitter."),
    click.option("--window", type=click.IntRange(min=0), help="Coincidence window in ns."),
]


def experiment_options(func: F) -> F:
    """Attach the shared experiment flags to a command."""
    for option in reversed(EXPERIMENT_OPTIONS):
        func = option(func)
    return func


def _load_spec(ctx: click.Context, options: dict[str, Any]) -> ExperimentSpec:
    app: CoalesceApp = ctx.obj["app"]
    overrides = {field: options.get(name) for name, field in OVERRIDES.items()}
    return app.config.load_spec(options.get("config_path"), overrides)


def _fail(ctx: click.Context, error: Exception) -> NoReturn:
    console.print(f"[red]Error:[/red] {escape(str(error))}", soft_wrap=True)
    ctx.exit(1)


def _pm(value: float, error: float) -> str:
    return f"{value:.5f} ± {error:.5f}"


@click.group(invoke_without_command=True)
@click.option(
    "--version",
    "-v",
    is_flag=True,
    help="Show version and exit.",
)
@click.option(
    "--debug",
    is_flag=True,
    help="Enable debug mode.",
)
@click.pass_context
def cli(ctx: click.Context, version: bool, debug: bool) -> None:
    """Coalesce - two-photon interference with photon-number-resolving detectors.

    Coalesce computes and simulates coincidence probabilities of photon
    pairs meeting at a beam splitter:
    - Theory curves P(2,0), P(0,2), P(1,1) versus delay
    - Monte Carlo time-tagged detection events
    - Estimation of the curves from event files
    - Klyshko efficiency calibration
    """
    if version:
        console.print(f"Coalesce version {__version__}")
        ctx.exit()

    if ctx.invoked_subcommand is None:
        welcome_text = Text.from_markup(
            "[bold cyan]Coalesce[/bold cyan] - Two-photon interference toolkit\n\n"
            f"Version: {__version__}\n"
            "Type 'coalesce --help' to see available commands."
        )
        console.print(Panel(welcome_text, title="Welcome", border_style="cyan"))

    setup_logging(debug=debug)

    ctx.ensure_object(dict)
    ctx.obj["app"] = CoalesceApp(debug=debug)


@cli.command()
@experiment_options
@click.option(
    "--save-spec",
    type=click.Path(dir_okay=False),
    help="Write the resolved experiment spec to this JSON file.",
)
@click.pass_context
def info(ctx: click.Context, save_spec: Optional[str], **options: Any) -> None:
    """Show version, configuration and the resolved experiment spec."""
    app: CoalesceApp = ctx.obj["app"]
    try:
        spec = _load_spec(ctx, options)
    except (CoalesceError, ValidationError, ValueError, OSError) as e:
        _fail(ctx, e)
    console.print(Panel(app.get_info(spec), title="Coalesce Information", border_style="green"))
    console.print_json(spec.model_dump_json())
    if save_spec:
        path = app.config.save_spec(spec, save_spec)
        console.print(f"[green]Saved experiment spec to {path}[/green]")


@cli.command()
@experiment_options
@click.pass_context
def theory(ctx: click.Context, **options: Any) -> None:
    """Compute the interference curve and write it as CSV.

    Examples:
        coalesce theory --tau-steps 101 --svg
        coalesce theory --fermion --out out/fermion
    """
    app: CoalesceApp = ctx.obj["app"]
    try:
        spec = _load_spec(ctx, options)
        with console.status("Computing interference curve", spinner="dots"):
            result = app.theory(spec)
    except (CoalesceError, ValidationError, ValueError, OSError) as e:
        _fail(ctx, e)

    lines = [
        f"[cyan]Points:[/cyan] {len(result.curve.points)}",
        f"[cyan]CSV:[/cyan] {result.csv_path}",
    ]
    if result.svg_path:
        lines.append(f"[cyan]SVG:[/cyan] {result.svg_path}")
    console.print(Panel("\n".join(lines), title="Theory Curve", border_style="green"))


@cli.command()
@experiment_options
@click.pass_context
def run(ctx: click.Context, **options: Any) -> None:
    """Simulate one acquisition run per delay and write event files.

    Examples:
        coalesce run --pair-count 10000 --tau-steps 3 --seed 7
    """
    app: CoalesceApp = ctx.obj["app"]
    try:
        spec = _load_spec(ctx, options)
        with console.status("Simulating acquisition runs", spinner="dots"):
            paths = app.run(spec)
    except (CoalesceError, ValidationError, ValueError, OSError) as e:
        _fail(ctx, e)

    table = Table(title="Event Files")
    table.add_column("File", style="cyan")
    for path in paths:
        table.add_row(str(path))
    console.print(table)


@cli.command()
@click.argument("files", nargs=-1, type=click.Path(dir_okay=False))
@experiment_options
@click.pass_context
def analyze(ctx: click.Context, files: tuple[str, ...], **options: Any) -> None:
    """Estimate coincidence probabilities from event files.

    Examples:
        coalesce analyze out/events_*.tsv --eta-a 0.2 --eta-b 0.2 --svg
    """
    if not files:
        raise click.UsageError("at least one event file is required")
    app: CoalesceApp = ctx.obj["app"]
    try:
        spec = _load_spec(ctx, options)
        result = app.analyze(spec, files)
    except (CoalesceError, ValidationError, ValueError, OSError) as e:
        _fail(ctx, e)

    table = Table(title="Estimated Coincidence Probabilities")
    table.add_column("tau (fs)", justify="right", style="cyan")
    table.add_column("P(2,0)", justify="right")
    table.add_column("P(0,2)", justify="right")
    table.add_column("P(1,1)", justify="right")
    table.add_column("2E events A/B", justify="right")
    for analysis in result.files:
        point = analysis.point
        table.add_row(
            f"{point.tau_fs:g}",
            _pm(point.p20_hat, point.p20_err),
            _pm(point.p02_hat, point.p02_err),
            _pm(point.p11_hat, point.p11_err),
            f"{analysis.direct[0].doubles}/{analysis.direct[1].doubles}",
        )
    console.print(table)

    if result.fit is not None:
        fit = result.fit
        note = "" if fit.identifiable else " [yellow](center and width unidentifiable)[/yellow]"
        console.print(
            f"Visibility {_pm(fit.visibility, fit.visibility_err)}, "
            f"center {fit.tau_center_fs:.2f} fs, width {fit.width_fs:.2f} fs{note}"
        )
    console.print(f"Wrote {result.csv_path}")
    if result.svg_path:
        console.print(f"Wrote {result.svg_path}")


@cli.command()
@click.argument("files", nargs=-1, type=click.Path(dir_okay=False))
@experiment_options
@click.pass_context
def calibrate(ctx: click.Context, files: tuple[str, ...], **options: Any) -> None:
    """Klyshko efficiencies from event files taken far from the dip.

    Examples:
        coalesce run --tau-min 500 --tau-steps 1 --pair-count 1000000
        coalesce calibrate out/events_0000_tau+500.000fs_seed0.tsv
    """
    if not files:
        raise click.UsageError("at least one event file is required")
    app: CoalesceApp = ctx.obj["app"]
    try:
        spec = _load_spec(ctx, options)
        calibration = app.calibrate(spec, files)
    except (CoalesceError, ValidationError, ValueError, OSError) as e:
        _fail(ctx, e)

    table = Table(title="Klyshko Calibration")
    table.add_column("Detector", style="cyan")
    table.add_column("eta", justify="right")
    table.add_row("A", _pm(calibration.eta_a, calibration.eta_a_err))
    table.add_row("B", _pm(calibration.eta_b, calibration.eta_b_err))
    console.print(table)


@cli.command()
@click.option("--check", "selector", help="Run only this check or category.")
@click.option("--list", "list_only", is_flag=True, help="List the checks without running them.")
@experiment_options
@click.pass_context
def selftest(
    ctx: click.Context, selector: Optional[str], list_only: bool, **options: Any
) -> None:
    """Run the invariant suite against the configured crystal."""
    app: CoalesceApp = ctx.obj["app"]
    if list_only:
        checks = app.list_checks(selector)
        if not checks:
            console.print(f"[yellow]No checks match {selector!r}[/yellow]")
            ctx.exit(1)
        listing = Table(title="Self-test checks")
        listing.add_column("Check", style="cyan")
        listing.add_column("Category")
        listing.add_column("Description")
        for check in checks:
            listing.add_row(check.name, check.category, check.description)
        console.print(listing)
        return

    try:
        spec = _load_spec(ctx, options)
    except (CoalesceError, ValidationError, ValueError, OSError) as e:
        _fail(ctx, e)

    with console.status("Running self-test", spinner="dots"):
        results = app.selftest(spec, selector)
    if not results:
        console.print(f"[yellow]No checks match {selector!r}[/yellow]")
        ctx.exit(1)

    table = Table(title="Self-test")
    table.add_column("Check", style="cyan")
    table.add_column("Category")
    table.add_column("Result")
    table.add_column("Detail")
    for result in results:
        status = "[green]pass[/green]" if result.passed else "[red]FAIL[/red]"
        table.add_row(result.name, result.category, status, result.detail)
    console.print(table)

    failed = [result.name for result in results if not result.passed]
    if failed:
        console.print(f"[red]{len(failed)} check(s) failed:[/red] {', '.join(failed)}")
        ctx.exit(1)


@cli.command("config")
@click.argument("key", required=False)
@click.argument("value", required=False)
@click.pass_context
def config_command(ctx: click.Context, key: Optional[str], value: Optional[str]) -> None:
    """Show user settings, or store VALUE for KEY in the user config file.

    Examples:
        coalesce config
        coalesce config workers 4
    """
    app: CoalesceApp = ctx.obj["app"]
    if key is not None and value is not None:
        try:
            stored = app.config.set(key, value)
        except ValueError as e:
            _fail(ctx, e)
        console.print(f"[green]{key} = {stored!r}[/green] saved to {app.config.config_file}")
        return

    table = Table(title="Settings")
    table.add_column("Key", style="cyan")
    table.add_column("Value")
    for name in CoalesceSettings.model_fields:
        if key is None or key == name:
            table.add_row(name, repr(app.config.get(name)))
    if not table.row_count:
        _fail(ctx, ValueError(f"Unknown setting {key!r}"))
    console.print(table)


def main() -> None:
    """Main entry point."""
    cli(obj={})


if __name__ == "__main__":
    main()
