"""Triangle-model visibility fits to measured interference curves."""

from collections.abc import Sequence
from typing import Optional

import numpy as np
from scipy.optimize import least_squares

from coalesce.analysis.models import EstimatedPoint, VisibilityFit
from coalesce.errors import FitError
from coalesce.theory.models import CrystalConfig, ExchangeSign, InterferenceCurve
from coalesce.utils.logging import get_logger

logger = get_logger(__name__)

MIN_FIT_POINTS = 7
MAX_EVALUATIONS = 500
# Visibilities below this (or below three standard errors) leave W and tau_0 undetermined
MIN_IDENTIFIABLE_VISIBILITY = 0.01


def triangle_model(
    taus: np.ndarray, visibility: float, center: float, width: float, sign: ExchangeSign
) -> tuple[np.ndarray, np.ndarray]:
    """P(2,0) and P(1,1) of a triangular feature of full width `width`."""
    overlap = int(sign) * visibility * np.clip(1.0 - np.abs(taus - center) / (width / 2.0), 0, 1)
    return (1.0 + overlap) / 16.0, (1.0 - overlap) / 8.0


def _weights(errors: np.ndarray) -> np.ndarray:
    positive = errors[errors > 0]
    if positive.size == 0:
        return np.ones_like(errors)
    return 1.0 / np.where(errors > 0, errors, positive.min())


def fit_visibility(
    points: Sequence[EstimatedPoint],
    crystal: Optional[CrystalConfig] = None,
    sign: ExchangeSign = ExchangeSign.BOSON,
) -> VisibilityFit:
    """Fit visibility, dip center and full width jointly to P(1,1) and P(2,0).

    Residuals are weighted by the estimates' standard errors (unit weights when
    none are available). The crystal, if given, only seeds the width.

    Args:
        points: At least seven estimates spanning the feature
        crystal: Crystal whose L*D seeds the width
        sign: Exchange sign of the triangle model

    Returns:
        Fitted parameters, their residual norm and an identifiability flag

    Raises:
        FitError: With too few points, or when the fit does not converge; the
            best iterate is attached as `best`
    """
    if len(points) < MIN_FIT_POINTS:
        raise FitError(f"visibility fit needs at least {MIN_FIT_POINTS} points, got {len(points)}")

    ordered = sorted(points, key=lambda point: point.tau_fs)
    taus = np.array([point.tau_fs for point in ordered])
    p20 = np.array([point.p20_hat for point in ordered])
    p11 = np.array([point.p11_hat for point in ordered])
    w20 = _weights(np.array([point.p20_err for point in ordered]))
    w11 = _weights(np.array([point.p11_err for point in ordered]))
    unit_weights = not any(point.p11_err > 0 or point.p20_err > 0 for point in ordered)

    span = float(taus[-1] - taus[0])
    if span <= 0:
        raise FitError("visibility fit needs distinct delays")

    # Seed from the most interfering point
    overlap = int(sign) * (1.0 - 8.0 * p11)
    extreme = int(np.argmax(overlap))
    width0 = abs(crystal.width_fs) if crystal is not None else span / 4.0
    lower = np.array([0.0, taus[0], span * 1e-6])
    upper = np.array([1.0, taus[-1], 4.0 * span])
    x0 = np.clip([overlap[extreme], taus[extreme], width0], lower + 1e-9, upper - 1e-9)

    def residuals(params: np.ndarray) -> np.ndarray:
        model20, model11 = triangle_model(taus, params[0], params[1], params[2], sign)
        return np.concatenate([(model11 - p11) * w11, (model20 - p20) * w20])

    result = least_squares(
        residuals, x0, bounds=(lower, upper), max_nfev=MAX_EVALUATIONS, x_scale="jac"
    )
    visibility, center, width = (float(value) for value in result.x)
    residual_norm = float(np.linalg.norm(result.fun))

    covariance = np.linalg.pinv(result.jac.T @ result.jac)
    if unit_weights:
        dof = max(result.fun.size - result.x.size, 1)
        covariance = covariance * residual_norm**2 / dof
    visibility_err = float(np.sqrt(max(covariance[0, 0], 0.0)))

    identifiable = visibility > max(MIN_IDENTIFIABLE_VISIBILITY, 3.0 * visibility_err)
    fit = VisibilityFit(
        visibility=visibility,
        tau_center_fs=center,
        width_fs=width,
        visibility_err=visibility_err,
        residual_norm=residual_norm,
        identifiable=identifiable,
        converged=bool(result.success),
    )

    if result.status == 0:
        raise FitError(
            f"visibility fit stopped after {result.nfev} evaluations without converging", best=fit
        )
    if not identifiable:
        logger.warning(
            f"Visibility {visibility:.4f} +/- {visibility_err:.4f} is consistent with zero; "
            "dip center and width are unidentifiable"
        )
    logger.info(
        f"Fitted visibility {visibility:.4f} +/- {visibility_err:.4f}, center {center:.2f} fs, "
        f"width {width:.2f} fs"
    )
    return fit


def fit_curve(curve: InterferenceCurve) -> VisibilityFit:
    """Self-fit of a computed interference curve."""
    points = [
        EstimatedPoint(
            tau_fs=point.tau_fs,
            p20_hat=point.p20,
            p02_hat=point.p02,
            p11_hat=point.p11,
            p20_err=0.0,
            p02_err=0.0,
            p11_err=0.0,
        )
        for point in curve.points
    ]
    return fit_visibility(points, crystal=curve.metadata.crystal, sign=curve.metadata.sign)
