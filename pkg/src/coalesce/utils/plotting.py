"""SVG figures of interference curves."""

from collections.abc import Sequence
from pathlib import Path
from typing import Optional, Union

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from coalesce import __version__  # noqa: E402
from coalesce.analysis.models import EstimatedPoint  # noqa: E402
from coalesce.theory.models import ExchangeSign, InterferenceCurve  # noqa: E402
from coalesce.utils.files import atomic_writer  # noqa: E402
from coalesce.utils.logging import get_logger  # noqa: E402

logger = get_logger(__name__)

GENERATOR = f"coalesce {__version__}"
SVG_RC = {
    "svg.hashsalt": "coalesce",
    "svg.fonttype": "none",
    "path.simplify": False,
}


def plot_curves(
    path: Union[str, Path],
    curve: Optional[InterferenceCurve] = None,
    estimates: Sequence[EstimatedPoint] = (),
    title: Optional[str] = None,
) -> Path:
    """Draw P(2,0), P(0,2) and P(1,1) against delay and save as SVG.

    Theory is drawn as dashed lines, estimates as symbols with error bars. The
    output depends only on the inputs and the generator version.

    Args:
        path: Destination .svg file
        curve: Theory curve
        estimates: Estimated points to overlay
        title: Figure title

    Returns:
        The written path
    """
    if curve is None and not estimates:
        raise ValueError("nothing to plot")

    with plt.rc_context(SVG_RC):
        fig, ax = plt.subplots(figsize=(7.0, 4.5))
        if curve is not None:
            ax.plot(curve.taus, curve.p20, "--", color="tab:blue", label="P(2,0) theory")
            ax.plot(curve.taus, curve.p02, ":", color="tab:green", label="P(0,2) theory")
            ax.plot(curve.taus, curve.p11, "--", color="tab:red", label="P(1,1) theory")
            if title is None:
                kind = "fermion" if curve.metadata.sign == ExchangeSign.FERMION else "boson"
                title = (
                    f"L = {curve.metadata.crystal.length_mm:g} mm, "
                    f"D = {curve.metadata.crystal.dvg_fs_per_mm:g} fs/mm, "
                    f"v = {curve.metadata.visibility:g} ({kind})"
                )
        if estimates:
            taus = [point.tau_fs for point in estimates]
            ax.errorbar(
                taus,
                [point.p20_hat for point in estimates],
                yerr=[point.p20_err for point in estimates],
                fmt="o",
                color="tab:blue",
                markersize=4,
                label="P(2,0) estimate",
            )
            ax.errorbar(
                taus,
                [point.p02_hat for point in estimates],
                yerr=[point.p02_err for point in estimates],
                fmt="s",
                color="tab:green",
                markersize=4,
                label="P(0,2) estimate",
            )
            ax.errorbar(
                taus,
                [point.p11_hat for point in estimates],
                yerr=[point.p11_err for point in estimates],
                fmt="^",
                color="tab:red",
                markersize=4,
                label="P(1,1) estimate",
            )

        ax.set_xlabel("Relative delay tau (fs)")
        ax.set_ylabel("Coincidence probability")
        ax.set_ylim(bottom=0.0)
        if title:
            ax.set_title(title)
        ax.grid(True, alpha=0.3)
        ax.legend(loc="best", fontsize="small")

        with atomic_writer(path) as handle:
            fig.savefig(handle, format="svg", metadata={"Date": None, "Creator": GENERATOR})
        plt.close(fig)

    logger.debug(f"Wrote figure {path}")
    return Path(path)
