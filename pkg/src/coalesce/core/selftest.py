"""Invariant checks runnable from the command line."""

import io
import time
from abc import ABC, abstractmethod
from collections.abc import Callable
from typing import Optional

import numpy as np
from pydantic import BaseModel

from coalesce.analysis.counting import classify
from coalesce.analysis.estimation import estimate
from coalesce.analysis.fitting import fit_curve
from coalesce.core.config import ExperimentSpec
from coalesce.simulation.acquisition import generate, rng_for
from coalesce.simulation.detector import (
    infer_count,
    measure_energy,
    poisson_goodness_of_fit,
    thin,
)
from coalesce.simulation.eventfile import serialize
from coalesce.theory.biphoton import sinc_state_function, to_temporal
from coalesce.theory.interference import sweep, triangle_oracle
from coalesce.theory.models import TOTAL_PAIR_PROBABILITY, ExchangeSign
from coalesce.utils.logging import get_logger

logger = get_logger(__name__)

Outcome = tuple[bool, str]


class CheckResult(BaseModel):
    """Outcome of one invariant check."""

    name: str
    category: str
    passed: bool
    detail: str
    seconds: float


class InvariantCheck(ABC):
    """Base class for all self-test checks."""

    @property
    @abstractmethod
    def name(self) -> str:
        """Check name."""
        pass

    @property
    @abstractmethod
    def description(self) -> str:
        """What the check verifies."""
        pass

    @property
    @abstractmethod
    def category(self) -> str:
        """Module the check exercises."""
        pass

    @abstractmethod
    def check(self, spec: ExperimentSpec) -> Outcome:
        """Run the check.

        Args:
            spec: Experiment whose crystal and grid are exercised

        Returns:
            Whether the invariant holds, and a one-line detail
        """
        pass

    def run(self, spec: ExperimentSpec) -> CheckResult:
        """Run the check, timing it and turning exceptions into failures."""
        start = time.perf_counter()
        try:
            passed, detail = self.check(spec)
        except Exception as e:
            logger.debug(f"Check {self.name} raised", exc_info=True)
            passed, detail = False, f"{type(e).__name__}: {e}"
        return CheckResult(
            name=self.name,
            category=self.category,
            passed=passed,
            detail=detail,
            seconds=time.perf_counter() - start,
        )


class FunctionCheck(InvariantCheck):
    """Check backed by a plain function."""

    def __init__(
        self, name: str, category: str, description: str, func: Callable[[ExperimentSpec], Outcome]
    ) -> None:
        self._name = name
        self._category = category
        self._description = description
        self._func = func

    @property
    def name(self) -> str:
        return self._name

    @property
    def description(self) -> str:
        return self._description

    @property
    def category(self) -> str:
        return self._category

    def check(self, spec: ExperimentSpec) -> Outcome:
        return self._func(spec)


def _normalization(spec: ExperimentSpec) -> Outcome:
    spectrum = sinc_state_function(spec.crystal(), spec.grid())
    temporal = to_temporal(spectrum)
    error = max(abs(spectrum.mass() - 1.0), abs(temporal.mass() - 1.0))
    return error < 1e-9, f"|mass - 1| = {error:.2e}"


def _coalescence(spec: ExperimentSpec) -> Outcome:
    point = sweep(spec.crystal(), [0.0], grid=spec.grid()).points[0]
    error = max(abs(point.p20 - 0.125), abs(point.p11))
    return error < 1e-6, f"P(2,0) = {point.p20:.9f}, P(1,1) = {point.p11:.2e}"


def _binomial_limit(spec: ExperimentSpec) -> Outcome:
    tau = 2.0 * abs(spec.crystal().width_fs)
    point = sweep(spec.crystal(), [tau], grid=spec.grid()).points[0]
    error = max(abs(point.p20 - 0.0625), abs(point.p11 - 0.125))
    return error < 1e-4, f"P(2,0) = {point.p20:.6f}, P(1,1) = {point.p11:.6f}"


def _complementarity(spec: ExperimentSpec) -> Outcome:
    width = abs(spec.crystal().width_fs)
    taus = np.linspace(-2.0 * width, 2.0 * width, 101).tolist()
    worst = 0.0
    for sign in ExchangeSign:
        for visibility in (0.0, 0.5, 1.0):
            curve = sweep(spec.crystal(), taus, sign=sign, visibility=visibility, grid=spec.grid())
            total = curve.p20 + curve.p02 + curve.p11
            worst = max(worst, float(np.max(np.abs(total - TOTAL_PAIR_PROBABILITY))))
    return worst < 1e-9, f"max |sum - 1/4| = {worst:.2e}"


def _oracle_agreement(spec: ExperimentSpec) -> Outcome:
    crystal = spec.crystal()
    width = abs(crystal.width_fs)
    taus = np.linspace(-2.0 * width, 2.0 * width, 101).tolist()
    worst = 0.0
    for sign in ExchangeSign:
        curve = sweep(crystal, taus, sign=sign, grid=spec.grid())
        for point in curve.points:
            oracle = triangle_oracle(crystal, point.tau_fs, sign)
            worst = max(worst, abs(point.p11 - oracle.p11), abs(point.p20 - oracle.p20))
    return worst < 2e-4, f"max deviation from triangle = {worst:.2e}"


def _duality(spec: ExperimentSpec) -> Outcome:
    width = abs(spec.crystal().width_fs)
    taus = np.linspace(-width, width, 21).tolist()
    boson = sweep(spec.crystal(), taus, grid=spec.grid())
    fermion = sweep(spec.crystal(), taus, sign=ExchangeSign.FERMION, grid=spec.grid())
    worst = float(
        max(
            np.max(np.abs(boson.p11 - 2.0 * fermion.p20)),
            np.max(np.abs(fermion.p11 - 2.0 * boson.p20)),
        )
    )
    return worst < 1e-9, f"max duality residual = {worst:.2e}"


def _dip_width(spec: ExperimentSpec) -> Outcome:
    crystal = spec.crystal()
    width = abs(crystal.width_fs)
    curve = sweep(crystal, np.linspace(-2.0 * width, 2.0 * width, 101).tolist(), grid=spec.grid())
    fit = fit_curve(curve)
    relative = abs(fit.width_fs - width) / width
    return (
        relative < 0.01 and abs(fit.visibility - 1.0) < 1e-3,
        f"v = {fit.visibility:.5f}, W = {fit.width_fs:.3f} fs (L*D = {width:.3f} fs)",
    )


def _poisson_thinning(spec: ExperimentSpec) -> Outcome:
    rng = rng_for(spec.seed, 0, 100)
    mean, eta = 3.0, spec.eta_a
    counts = thin(rng.poisson(mean, size=100_000), eta, rng)
    fit = poisson_goodness_of_fit(counts, mean=eta * mean)
    return fit.p_value > 0.01, f"chi2 = {fit.statistic:.2f} on {fit.dof} dof, p = {fit.p_value:.3f}"


def _energy_resolution(spec: ExperimentSpec) -> Outcome:
    model = spec.detectors()[0]
    rng = rng_for(spec.seed, 0, 101)
    samples = 1_000_000
    ones = infer_count(measure_energy(np.ones(samples, dtype=np.int64), model, rng), model)
    twos = infer_count(measure_energy(np.full(samples, 2, dtype=np.int64), model, rng), model)
    wrong = (np.count_nonzero(ones != 1) + np.count_nonzero(twos != 2)) / (2 * samples)
    return wrong < 1e-3, f"misclassified fraction = {wrong:.2e}"


def _determinism(spec: ExperimentSpec) -> Outcome:
    config = spec.run_config(0.0).model_copy(update={"pair_count": 2000, "duration_s": None})
    first, second = io.StringIO(), io.StringIO()
    serialize(generate(config), first)
    serialize(generate(config), second)
    return first.getvalue() == second.getvalue(), f"{len(first.getvalue())} bytes per replay"


def _shoulder_ratio(spec: ExperimentSpec) -> Outcome:
    tau = 2.0 * abs(spec.crystal().width_fs)
    config = spec.run_config(tau).model_copy(update={"pair_count": 200_000, "duration_s": None})
    point = estimate(
        classify(generate(config), spec.coincidence_window_ns), spec.eta_a, spec.eta_b
    )
    ratio = point.p11_hat / point.p20_hat
    sigma = ratio * float(np.hypot(point.p11_err / point.p11_hat, point.p20_err / point.p20_hat))
    return abs(ratio - 2.0) < 3.0 * sigma, f"P(1,1)/P(2,0) = {ratio:.3f} +/- {sigma:.3f}"


BUILTIN_CHECKS = [
    FunctionCheck(
        "normalization", "theory", "Spectral and temporal amplitudes are normalized", _normalization
    ),
    FunctionCheck(
        "coalescence", "theory", "Boson coalescence limit at the dip center", _coalescence
    ),
    FunctionCheck(
        "binomial-limit", "theory", "Distinguishable limit far from the dip", _binomial_limit
    ),
    FunctionCheck(
        "complementarity", "theory", "P(1,1) + P(2,0) + P(0,2) = 1/4", _complementarity
    ),
    FunctionCheck("triangle", "theory", "Quadrature matches the triangular dip", _oracle_agreement),
    FunctionCheck("duality", "theory", "Boson and fermion curves exchange roles", _duality),
    FunctionCheck("dip-width", "analysis", "Fitted dip width equals L*D", _dip_width),
    FunctionCheck(
        "poisson-thinning", "detector", "Thinned Poisson counts stay Poisson", _poisson_thinning
    ),
    FunctionCheck(
        "energy-resolution",
        "detector",
        "One- and two-photon energies separate",
        _energy_resolution,
    ),
    FunctionCheck(
        "determinism", "acquisition", "Same seed gives the same event file", _determinism
    ),
    FunctionCheck(
        "shoulder-ratio", "analysis", "P(1,1) is twice P(2,0) off the dip", _shoulder_ratio
    ),
]


class CheckRegistry:
    """Manages self-test checks."""

    def __init__(self) -> None:
        """Initialize the registry."""
        self.checks: dict[str, InvariantCheck] = {}

    def discover_checks(self) -> None:
        """Register the built-in checks."""
        for check in BUILTIN_CHECKS:
            self.register_check(check)

    def register_check(self, check: InvariantCheck) -> None:
        """Register a check.

        Args:
            check: Check instance to register
        """
        self.checks[check.name] = check

    def get_check(self, name: str) -> Optional[InvariantCheck]:
        """Get a check by name.

        Args:
            name: Check name

        Returns:
            Check instance or None
        """
        return self.checks.get(name)

    def find_checks(self, selector: Optional[str] = None) -> list[InvariantCheck]:
        """Checks whose name or category equals the selector (all when None)."""
        if selector is None:
            return list(self.checks.values())
        exact = self.get_check(selector)
        if exact is not None:
            return [exact]
        return [
            check for check in self.checks.values() if selector in (check.name, check.category)
        ]

    def run(self, spec: ExperimentSpec, selector: Optional[str] = None) -> list[CheckResult]:
        """Run the selected checks in registration order."""
        results = []
        for check in self.find_checks(selector):
            result = check.run(spec)
            logger.debug(f"{result.name}: {'ok' if result.passed else 'FAILED'} ({result.detail})")
            results.append(result)
        return results
