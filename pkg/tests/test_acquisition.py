"""Tests for the Monte Carlo acquisition."""

import math

import numpy as np
import pytest
from pydantic import ValidationError
from scipy import stats

from coalesce.analysis.counting import classify
from coalesce.simulation.acquisition import generate, outcome_distribution
from coalesce.simulation.models import PairOutcome
from coalesce.theory.interference import sweep, triangle_oracle
from coalesce.theory.models import CrystalConfig, ExchangeSign

from tests.conftest import TIGHT_WINDOW_NS, make_detector, make_run, three_sigma


class TestOutcomeDistribution:
    """Test outcome_distribution."""

    def test_dip_center(self, crystal: CrystalConfig) -> None:
        """At perfect overlap both survivors share a port."""
        table = outcome_distribution(triangle_oracle(crystal, 0.0))
        assert table[PairOutcome.BOTH_A] == 0.125
        assert table[PairOutcome.BOTH_B] == 0.125
        assert table[PairOutcome.SPLIT] == 0.0
        assert table[PairOutcome.ONLY_A] == 0.25
        assert table[PairOutcome.ONLY_B] == 0.25
        assert table[PairOutcome.NONE] == 0.25

    def test_distinguishable(self, crystal: CrystalConfig) -> None:
        """Far from the dip the survivors route binomially."""
        table = outcome_distribution(triangle_oracle(crystal, 500.0))
        assert table[PairOutcome.BOTH_A] == pytest.approx(1 / 16)
        assert table[PairOutcome.SPLIT] == pytest.approx(1 / 8)

    @pytest.mark.parametrize("tau", [-80.0, -10.0, 0.0, 25.0, 200.0])
    def test_sums_to_one(self, crystal: CrystalConfig, tau: float) -> None:
        """The six outcomes are exhaustive."""
        table = outcome_distribution(triangle_oracle(crystal, tau))
        assert math.fsum(table.values()) == pytest.approx(1.0, abs=1e-12)

    def test_photons_per_detector(self, crystal: CrystalConfig) -> None:
        """Each detector receives half a photon per pair at every delay."""
        for tau in (0.0, 30.0, 300.0):
            table = outcome_distribution(triangle_oracle(crystal, tau))
            for index in (0, 1):
                mean = sum(p * outcome.counts[index] for outcome, p in table.items())
                assert mean == pytest.approx(0.5)


class TestRunConfig:
    """Test RunConfig validation."""

    def test_duration_and_count_exclusive(self, crystal: CrystalConfig) -> None:
        """A run is bounded by duration or pair count, never both."""
        with pytest.raises(ValidationError, match="exactly one"):
            make_run(crystal, duration_s=10.0)

    def test_one_bound_required(self, crystal: CrystalConfig) -> None:
        """A run needs a bound."""
        with pytest.raises(ValidationError, match="exactly one"):
            make_run(crystal, pair_count=None)

    def test_detector_order(self, crystal: CrystalConfig) -> None:
        """Detectors are listed as (A, B)."""
        with pytest.raises(ValidationError):
            make_run(crystal, detectors=(make_detector("B"), make_detector("A")))

    def test_nonfinite_delay(self, crystal: CrystalConfig) -> None:
        """The delay must be finite."""
        with pytest.raises(ValidationError):
            make_run(crystal, tau_fs=float("inf"))

    def test_json_round_trip(self, crystal: CrystalConfig) -> None:
        """A run config survives JSON."""
        config = make_run(crystal, leakage_rate=2.0)
        assert type(config).model_validate_json(config.model_dump_json()) == config


class TestGenerate:
    """Test generate."""

    def test_zero_pairs(self, crystal: CrystalConfig) -> None:
        """No pairs, no events."""
        stream = generate(make_run(crystal, pair_count=0))
        assert len(stream) == 0
        assert stream.header.pairs == 0

    def test_header(self, crystal: CrystalConfig) -> None:
        """The header records the pair count and the config."""
        config = make_run(crystal, pair_count=200)
        stream = generate(config)
        assert stream.header.pairs == 200
        assert stream.header.config == config

    def test_deterministic(self, crystal: CrystalConfig) -> None:
        """The same config replays the same stream."""
        config = make_run(crystal, eta=0.5, fwhm=0.25)
        first, second = generate(config), generate(config)
        assert np.array_equal(first.t_ns, second.t_ns)
        assert np.array_equal(first.det, second.det)
        assert np.array_equal(first.energy_ev, second.energy_ev)
        assert np.array_equal(first.n_inferred, second.n_inferred)

    def test_seed_changes_stream(self, crystal: CrystalConfig) -> None:
        """Another seed or stream id gives another stream."""
        base = generate(make_run(crystal))
        reseeded = generate(make_run(crystal, seed=8))
        restreamed = generate(make_run(crystal, stream_id=1))
        assert not np.array_equal(base.t_ns, reseeded.t_ns)
        assert not np.array_equal(base.t_ns, restreamed.t_ns)

    def test_time_ordered(self, crystal: CrystalConfig) -> None:
        """Events come out sorted by time."""
        stream = generate(make_run(crystal, pair_count=2000, eta=0.5, fwhm=0.25))
        assert np.all(np.diff(stream.t_ns) >= 0)

    def test_duration_bound(self, crystal: CrystalConfig) -> None:
        """A duration-bounded run draws a Poisson number of pairs within the duration."""
        stream = generate(make_run(crystal, pair_count=None, duration_s=100.0))
        assert stream.header.pairs == pytest.approx(1000, abs=5 * math.sqrt(1000))
        assert stream.t_ns.max() < 100 * 10**9

    def test_fermion_never_bunches(self, crystal: CrystalConfig) -> None:
        """Fermions at perfect overlap never send both photons to one port."""
        stream = generate(
            make_run(crystal, pair_count=2000, pair_rate=1.0, sign=ExchangeSign.FERMION)
        )
        assert np.count_nonzero(stream.n_inferred == 2) <= 1

    def test_registrations_independent_of_delay(self, crystal: CrystalConfig) -> None:
        """Registered photons per detector do not depend on the delay."""
        pairs = 10_000
        for tau in (0.0, 500.0):
            summary = classify(generate(make_run(crystal, pair_count=pairs, tau_fs=tau)))
            for singles, doubles in (
                (summary.singles_a, summary.doubles_a),
                (summary.singles_b, summary.doubles_b),
            ):
                registered = (singles + 2 * doubles) / pairs
                assert registered == pytest.approx(0.5, abs=0.03)

    def test_leakage_adds_doubles(self, crystal: CrystalConfig) -> None:
        """Leaked pump photons register as extra 2E events."""
        fields = {"pair_count": None, "duration_s": 20.0}
        clean = classify(generate(make_run(crystal, **fields)))
        leaky = classify(generate(make_run(crystal, leakage_rate=50.0, **fields)))
        extra = leaky.doubles_a - clean.doubles_a
        assert 800 <= extra <= 1200
        assert leaky.cross == pytest.approx(clean.cross, abs=3)


@pytest.mark.slow
class TestLongRuns:
    """Acquisition statistics at a million pairs and more."""

    def test_ideal_frequencies_converge(self, crystal: CrystalConfig) -> None:
        """Lossless runs reproduce the theory from the dip center to the shoulders."""
        pairs = 1_000_000
        curve = sweep(crystal, [0.0, 25.0, 50.0, 100.0, 300.0])
        for point in curve.points:
            config = make_run(crystal, pair_count=pairs, tau_fs=point.tau_fs)
            summary = classify(generate(config), TIGHT_WINDOW_NS)
            assert summary.doubles_a / pairs == pytest.approx(
                point.p20, abs=three_sigma(point.p20, pairs)
            )
            assert summary.doubles_b / pairs == pytest.approx(
                point.p02, abs=three_sigma(point.p02, pairs)
            )
            assert summary.cross / pairs == pytest.approx(
                point.p11, abs=three_sigma(point.p11, pairs)
            )

    def test_boson_doubles_at_dip(self, crystal: CrystalConfig) -> None:
        """Perfect overlap sends an eighth of the pairs into detector A as doubles."""
        pairs = 1_000_000
        stream = generate(make_run(crystal, pair_count=pairs))
        doubles = np.count_nonzero((stream.det == 0) & (stream.n_inferred == 2))
        assert doubles / pairs == pytest.approx(1 / 8, abs=three_sigma(1 / 8, pairs))

    def test_lossy_doubles(self, crystal: CrystalConfig) -> None:
        """Both photons must survive thinning: doubles occur at eta^2 P(2,0) per pair."""
        pairs = 10_000_000
        eta = 0.2
        expected = eta**2 * sweep(crystal, [0.0]).points[0].p20
        stream = generate(make_run(crystal, pair_count=pairs, eta=eta, fwhm=0.25))
        doubles = np.count_nonzero((stream.det == 0) & (stream.n_inferred == 2))
        assert doubles / pairs == pytest.approx(expected, abs=three_sigma(expected, pairs))

    def test_registration_rate_has_no_delay_trend(self, crystal: CrystalConfig) -> None:
        """Registered photons per pair regress on the delay with a slope consistent with zero."""
        pairs = 200_000
        taus = np.linspace(-300.0, 300.0, 13)
        rates: tuple[list[float], list[float]] = ([], [])
        for stream_id, tau in enumerate(taus):
            config = make_run(
                crystal,
                pair_count=pairs,
                tau_fs=float(tau),
                eta=0.2,
                fwhm=0.25,
                stream_id=stream_id,
            )
            summary = classify(generate(config))
            rates[0].append((summary.singles_a + 2 * summary.doubles_a) / pairs)
            rates[1].append((summary.singles_b + 2 * summary.doubles_b) / pairs)
        for per_detector in rates:
            assert stats.linregress(taus, per_detector).pvalue > 0.05
