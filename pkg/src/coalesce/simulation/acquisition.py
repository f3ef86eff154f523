"""Monte Carlo acquisition of time-tagged detection events."""

import numpy as np

from coalesce.simulation.detector import infer_count, measure_energy, merge_groups, thin
from coalesce.simulation.models import (
    DETECTOR_IDS,
    DetectorModel,
    EventStream,
    PairOutcome,
    RunConfig,
    StreamHeader,
)
from coalesce.theory.interference import sweep
from coalesce.theory.models import InterferencePoint
from coalesce.utils.logging import get_logger

logger = get_logger(__name__)

# Probability that exactly one photon survives its polarizer and heads to a given
# detector, and that neither survives. Interference only shapes the two-survivor terms.
SINGLE_SURVIVOR_PROBABILITY = 0.25
NO_SURVIVOR_PROBABILITY = 0.25

# Mean number of photons reaching one detector per pair
MEAN_PHOTONS_PER_DETECTOR = 0.5

# Energy decimals kept in the stream and in event files
ENERGY_DECIMALS = 6

SOURCE_STREAM = 0
LEAKAGE_QUANTA = 2


def rng_for(seed: int, stream_id: int, component: int) -> np.random.Generator:
    """Independent random stream for one component of a run.

    Component 0 drives pair arrivals and routing; component 1 + i drives detector i.
    """
    return np.random.default_rng(np.random.SeedSequence([seed, stream_id, component]))


def outcome_distribution(point: InterferencePoint) -> dict[PairOutcome, float]:
    """Probabilities of the photon numbers reaching (A, B) for one pair.

    Each photon passes the 50/50 splitter and then a 45 degree polarizer of
    transmittance 1/2. When both survive, the interference probabilities decide
    the routing; single survivors go either way with equal odds.
    """
    point = InterferencePoint.model_validate(point.model_dump())
    return {
        PairOutcome.BOTH_A: point.p20,
        PairOutcome.BOTH_B: point.p02,
        PairOutcome.SPLIT: point.p11,
        PairOutcome.ONLY_A: SINGLE_SURVIVOR_PROBABILITY,
        PairOutcome.ONLY_B: SINGLE_SURVIVOR_PROBABILITY,
        PairOutcome.NONE: NO_SURVIVOR_PROBABILITY,
    }


def _pair_times(config: RunConfig, rng: np.random.Generator) -> np.ndarray:
    if config.duration_s is not None:
        count = rng.poisson(config.pair_rate * config.duration_s)
        seconds = np.sort(rng.uniform(0.0, config.duration_s, size=count))
    else:
        gaps = rng.exponential(1.0 / config.pair_rate, size=config.pair_count)
        seconds = np.cumsum(gaps)
    return np.floor(seconds * 1e9).astype(np.int64)


def _detector_events(
    t_ns: np.ndarray,
    photons: np.ndarray,
    model: DetectorModel,
    rng: np.random.Generator,
    leakage_rate: float,
    span_s: float,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    absorbed = thin(photons, model.eta, rng)
    hit = absorbed > 0
    times, quanta = t_ns[hit], absorbed[hit]

    if leakage_rate > 0:
        # A leaked pump photon deposits 2E in one absorption
        count = rng.poisson(leakage_rate * span_s)
        leak_t = np.floor(rng.uniform(0.0, span_s, size=count) * 1e9).astype(np.int64)
        leak_t = leak_t[rng.random(count) < model.eta]
        times = np.concatenate([times, leak_t])
        quanta = np.concatenate([quanta, np.full(leak_t.size, LEAKAGE_QUANTA, dtype=np.int64)])
        order = np.argsort(times, kind="stable")
        times, quanta = times[order], quanta[order]

    group_t, group_quanta = merge_groups(times, quanta, model.relax_window_ns)
    energy = np.round(np.asarray(measure_energy(group_quanta, model, rng)), ENERGY_DECIMALS)
    return group_t, energy, np.asarray(infer_count(energy, model))


def generate(config: RunConfig) -> EventStream:
    """Simulate one acquisition run.

    Pairs arrive as a Poisson process, each draws an outcome from
    outcome_distribution at the configured delay, and the photons reaching each
    detector are thinned, merged within the relaxation window and measured.
    Same-port photons share their pair's timestamp, so they always merge into
    one 2E event.

    Args:
        config: Run configuration, including the seed

    Returns:
        Time-ordered event stream whose header records the pair count and config
    """
    point = sweep(
        config.crystal,
        [config.tau_fs],
        sign=config.sign,
        visibility=config.visibility,
        grid=config.grid,
    ).points[0]
    table = outcome_distribution(point)

    source = rng_for(config.seed, config.stream_id, SOURCE_STREAM)
    t_ns = _pair_times(config, source)
    outcomes = source.choice(len(table), size=t_ns.size, p=np.array(list(table.values())))

    if config.duration_s is not None:
        span_s = config.duration_s
    else:
        span_s = float(t_ns[-1]) / 1e9 if t_ns.size else 0.0
    columns = []
    for index, model in enumerate(config.detectors):
        per_outcome = np.array([outcome.counts[index] for outcome in table], dtype=np.int64)
        rng = rng_for(config.seed, config.stream_id, 1 + index)
        times, energy, n_inferred = _detector_events(
            t_ns, per_outcome[outcomes], model, rng, config.leakage_rate, span_s
        )
        columns.append((times, np.full(times.size, index, dtype=np.int8), energy, n_inferred))

    t_all, det_all, energy_all, n_all = (np.concatenate(parts) for parts in zip(*columns))
    order = np.lexsort((det_all, t_all))

    stream = EventStream(
        header=StreamHeader(pairs=int(t_ns.size), config=config),
        t_ns=t_all[order],
        det=det_all[order],
        energy_ev=energy_all[order],
        n_inferred=n_all[order],
    )
    logger.info(
        f"Generated {t_ns.size} pairs at tau={config.tau_fs:g} fs: "
        + ", ".join(
            f"{det} {int(np.count_nonzero(stream.det == i))} events"
            for i, det in enumerate(DETECTOR_IDS)
        )
    )
    return stream
