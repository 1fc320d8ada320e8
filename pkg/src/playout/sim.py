"""Event-driven Monte Carlo simulator of the prefetching playout buffer.

The simulator is the independent cross-check for every analytic result in
this package: it replays the actual mechanics (arrival epochs, one-at-a-time
services, prefetch pauses) with no shared formulas.

Per replication: all N arrival epochs are generated up front from the chosen
arrival model (plain Poisson, ON/OFF gated Poisson, or Poisson against a
slotted decoder).  Playback starts once the threshold is buffered, or once
everything left has arrived if fewer packets remain.  A departure that leaves
the buffer empty is a starvation unless it belongs to the final packet; each
starvation pauses service until the resume threshold is re-buffered.

Replications draw from per-index RNG streams spawned deterministically from
the master seed, and results are reduced in replication order, so a report is
bit-identical for the same config whether it ran serially or in parallel.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .core import IppParams, QueueParams, ScenarioSpec, SlotParams

__all__ = ["SimConfig", "SimReport", "simulate", "simulate_kernel_check"]

_SCAN_CHUNK = 4096


@dataclass(frozen=True)
class SimConfig:
    """One simulation request: scenario, replication count, seeding, parallelism."""

    params: QueueParams
    spec: ScenarioSpec
    replications: int = 5000
    master_seed: int = 0
    parallel: bool = False
    resume_threshold: int | None = None  # None: resume at the start-up threshold

    def __post_init__(self):
        if self.replications < 1:
            raise ValueError(f"replications must be >= 1, got {self.replications}")
        resume = self.resume_threshold
        if resume is not None and resume < 1:
            raise ValueError(f"resume threshold must be >= 1, got {resume}")


@dataclass(frozen=True, eq=False)
class SimReport:
    """Aggregated simulation outcome.

    ``histogram`` maps starvation counts to replication counts;
    ``empirical_pmf`` spreads it over 0..floor(N/x1) with per-bin standard
    errors sqrt(phat (1 - phat) / R).  The mean interval between consecutive
    starvation events is reported when at least one replication produced two
    starvations.
    """

    histogram: dict[int, int]
    empirical_pmf: np.ndarray
    standard_errors: np.ndarray
    replications: int
    mean_interstarvation: float | None
    interstarvation_se: float | None
    interval_count: int
    total_events: int
    wall_time_s: float = field(compare=False)


def _poisson_arrivals(rng: np.random.Generator, lam: float, n: int) -> np.ndarray:
    return np.cumsum(rng.exponential(1.0 / lam, n))

def _ipp_arrivals(
    rng: np.random.Generator, lam: float, ipp: IppParams, n: int
) -> np.ndarray:
    """Arrival epochs of an ON/OFF gated Poisson process, starting ON.

    Arrivals are laid out on an ON-only clock first (plain Poisson), then the
    clock is re-inflated to wall time by inserting an OFF excursion after each
    completed ON sojourn.
    """
    on_clock = np.cumsum(rng.exponential(1.0 / lam, n))
    total_on = on_clock[-1]
    blocks = []
    covered = 0.0
    size = max(16, int(total_on * ipp.alpha * 1.5) + 16)
    while covered < total_on:
        blk = rng.exponential(1.0 / ipp.alpha, size)
        blocks.append(blk)
        covered += float(blk.sum())
    on_durations = np.concatenate(blocks)
    cum_on = np.cumsum(on_durations)
    # completed ON sojourns strictly before each arrival's ON-clock position
    idx = np.searchsorted(cum_on, on_clock, side="right")
    n_off = int(idx.max())
    off_prefix = np.concatenate([[0.0], np.cumsum(rng.exponential(1.0 / ipp.beta, n_off))])
    return on_clock + off_prefix[idx]


def _playback(
    arrivals: np.ndarray,
    services: np.ndarray | None,
    slot_d: float | None,
    n: int,
    x1: int,
    resume: int,
) -> tuple[int, list[float]]:
    """Play one replication; returns (starvation count, starvation epochs).

    ``services`` holds per-packet exponential service times; for the slotted
    decoder they are implied by the slot length instead.  Departures are
    scanned in chunks so each packet is visited once per playback segment.
    """
    served = 0
    starved = 0
    epochs: list[float] = []
    first_segment = True
    while served < n:
        want = x1 if first_segment else resume
        first_segment = False
        need = min(want, n - served)
        t = arrivals[served + need - 1]
        segment_open = True
        while segment_open:
            hi = min(served + _SCAN_CHUNK, n)
            if slot_d is not None:
                deps = t + slot_d * np.arange(1, hi - served + 1)
            else:
                deps = t + np.cumsum(services[served:hi])
            arrived = np.searchsorted(arrivals, deps, side="right")
            level = arrived - np.arange(served + 1, hi + 1)
            empty = np.nonzero(level == 0)[0]
            if empty.size:
                z = int(empty[0])
                pkt = served + z + 1
                served = pkt
                if pkt < n:
                    starved += 1
                    epochs.append(float(deps[z]))
                segment_open = False
            else:
                t = float(deps[-1])
                served = hi
                segment_open = served < n
    return starved, epochs


def _replicate(seed: np.random.SeedSequence, config: SimConfig):
    rng = np.random.default_rng(seed)
    spec, params = config.spec, config.params
    n, x1 = spec.file_size, spec.threshold
    resume = config.resume_threshold if config.resume_threshold is not None else x1
    arrival = spec.arrival
    if isinstance(arrival, IppParams):
        arrivals = _ipp_arrivals(rng, params.lam, arrival, n)
    else:
        arrivals = _poisson_arrivals(rng, params.lam, n)
    if isinstance(arrival, SlotParams):
        services, slot_d = None, arrival.d
    else:
        services, slot_d = rng.exponential(1.0 / params.mu, n), None
    count, epochs = _playback(arrivals, services, slot_d, n, x1, resume)
    gaps = [b - a for a, b in zip(epochs, epochs[1:])]
    return count, gaps


def simulate(config: SimConfig) -> SimReport:
    """Run the configured replications and aggregate their histograms.

    The same master seed always produces the same report, with or without the
    parallel flag: per-replication streams are fixed by index and the
    reduction runs in index order.
    """
    start = time.perf_counter()
    r = config.replications
    seeds = np.random.SeedSequence(config.master_seed).spawn(r)
    if config.parallel:
        with ThreadPoolExecutor() as pool:
            results = list(pool.map(lambda s: _replicate(s, config), seeds, chunksize=64))
    else:
        results = [_replicate(s, config) for s in seeds]

    spec = config.spec
    bound = spec.max_starvations
    histogram: dict[int, int] = {}
    gap_sum = 0.0
    gap_sumsq = 0.0
    gap_n = 0
    for count, gaps in results:
        histogram[count] = histogram.get(count, 0) + 1
        for g in gaps:
            gap_sum += g
            gap_sumsq += g * g
            gap_n += 1
    pmf = np.zeros(bound + 1)
    for j, c in histogram.items():
        pmf[j] = c / r
    se = np.sqrt(pmf * (1.0 - pmf) / r)
    if gap_n >= 2:
        mean_gap = gap_sum / gap_n
        var_gap = max(gap_sumsq / gap_n - mean_gap * mean_gap, 0.0)
        gap_se = math.sqrt(var_gap / gap_n)
    else:
        mean_gap, gap_se = None, None
    return SimReport(
        histogram=histogram,
        empirical_pmf=pmf,
        standard_errors=se,
        replications=r,
        mean_interstarvation=mean_gap,
        interstarvation_se=gap_se,
        interval_count=gap_n,
        total_events=2 * spec.file_size * r,
        wall_time_s=time.perf_counter() - start,
    )


def simulate_kernel_check(
    params: QueueParams,
    i: int,
    samples: int,
    ipp: IppParams | None = None,
    seed: int = 0,
) -> np.ndarray:
    """Empirical per-arrival departure-count distribution (micro oracle).

    Starts one inter-arrival period with ``i`` packets buffered and counts
    how many depart before the next arrival.  The inter-arrival time is drawn
    from the model (plain exponential, or a geometric number of truncated
    ON sojourns plus OFF excursions for gated arrivals); given that time the
    departure count is Poisson at the service rate, truncated at ``i``.
    Returns frequencies over counts 0..i.
    """
    if i < 1:
        raise ValueError(f"buffered count must be >= 1, got {i}")
    if samples < 1:
        raise ValueError(f"sample count must be >= 1, got {samples}")
    rng = np.random.default_rng(seed)
    if ipp is None:
        gap = rng.exponential(1.0 / params.lam, samples)
    else:
        lam, alpha, beta = params.lam, ipp.alpha, ipp.beta
        # number of OFF excursions before the next arrival
        excursions = rng.geometric(lam / (lam + alpha), samples) - 1
        gap = rng.standard_gamma(excursions + 1) / (lam + alpha)
        gap += rng.standard_gamma(excursions) / beta
    departures = np.minimum(rng.poisson(params.mu * gap), i)
    return np.bincount(departures, minlength=i + 1) / samples
