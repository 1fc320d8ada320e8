"""Slotted playback solver: Poisson arrivals, one departure per time slot.

When the decoder consumes exactly one packet per slot of ``d`` seconds, the
per-slot arrival counts are i.i.d. Poisson(lam * d) and therefore cyclically
interchangeable, so the discrete ballot argument applies: the probability
that the buffer, started with x1 packets, first empties at the l-th
departure is (x1 / l) times the probability that exactly l - x1 packets
arrived over those l slots,

    P(l) = (x1 / l) * (lam l d)^(l - x1) / (l - x1)! * exp(-lam l d).

Public functions index events by the packet whose departure reveals the
empty buffer (the starvation itself lands in the following slot), matching
the continuous-time solver's indexing.

The starvation-count pmf reuses the same path-decomposition engine as the
continuous solver; only the three ingredient probabilities change, and the
gap matrices keep the banded Toeplitz structure because the gap probability
depends only on the packet-index difference.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .ballot import assemble_pmf
from .core import StarvationDistribution

__all__ = [
    "SlottedScenario",
    "takacs_first_starvation",
    "takacs_starvation_probability",
    "takacs_pmf",
]


@dataclass(frozen=True)
class SlottedScenario:
    """Slotted playout scenario: arrival rate, slot length, file size, threshold."""

    lam: float
    d: float
    file_size: int
    threshold: int

    def __post_init__(self):
        if not (self.lam > 0.0 and math.isfinite(self.lam)):
            raise ValueError(f"arrival rate must be positive, got {self.lam}")
        if not (self.d > 0.0 and math.isfinite(self.d)):
            raise ValueError(f"slot duration must be positive, got {self.d}")
        if not (isinstance(self.file_size, int) and self.file_size >= 1):
            raise ValueError(f"file size must be an integer >= 1, got {self.file_size}")
        if not (isinstance(self.threshold, int) and 1 <= self.threshold <= self.file_size):
            raise ValueError(
                f"threshold must be an integer in [1, file_size], got {self.threshold}"
            )

    @property
    def mean_per_slot(self) -> float:
        """Mean arrivals per slot, lam * d."""
        return self.lam * self.d

    @property
    def max_starvations(self) -> int:
        return self.file_size // self.threshold


def _slot_terms(spec: SlottedScenario) -> np.ndarray:
    """First-empty probabilities indexed by departure count l = 0..N.

    Entry l holds (x1/l) Poisson(l - x1; lam l d) for l >= x1 and zero below;
    evaluated in log space since the Poisson mean grows with l.
    """
    n, x1 = spec.file_size, spec.threshold
    out = np.zeros(n + 1)
    ls = np.arange(x1, n + 1, dtype=np.float64)
    if ls.size == 0:
        return out
    mean = spec.lam * spec.d * ls
    k = ls - x1
    out[x1:] = np.exp(
        math.log(x1) - np.log(ls) + k * np.log(mean) - mean - gammaln(k + 1.0)
    )
    return out


def takacs_first_starvation(spec: SlottedScenario, l: int) -> float:
    """Probability that the buffer first empties at the l-th departure.

    Zero (by convention) outside the feasible range x1 <= l <= N - 1: the
    prefetched packets cannot run out earlier, and the final packet's
    departure does not count as a starvation.
    """
    n, x1 = spec.file_size, spec.threshold
    if l < x1 or l >= n:
        return 0.0
    mean = spec.lam * spec.d * l
    return (x1 / l) * math.exp((l - x1) * math.log(mean) - mean - math.lgamma(l - x1 + 1))


def takacs_starvation_probability(spec: SlottedScenario) -> float:
    """Probability of at least one starvation in slotted playback."""
    n, x1 = spec.file_size, spec.threshold
    if x1 == n:
        return 0.0
    return float(math.fsum(takacs_first_starvation(spec, l) for l in range(x1, n)))


def takacs_pmf(spec: SlottedScenario, j_max: int | None = None) -> StarvationDistribution:
    """Distribution of the starvation count in slotted playback.

    Same first/gap/closing decomposition as the continuous-time solver, with
    the slotted first-empty probabilities substituted throughout.
    """
    n, x1 = spec.file_size, spec.threshold
    bound = spec.max_starvations
    if j_max is None:
        j_max = bound
    if j_max > bound:
        raise ValueError(f"j_max must be at most floor(N/x1) = {bound}, got {j_max}")
    if x1 == n:
        return StarvationDistribution(pmf=(1.0,) + (0.0,) * j_max, method_tag="takacs")
    terms = _slot_terms(spec)
    pe = terms.copy()
    pe[n] = 0.0
    gap = terms.copy()
    gap[n] = 0.0
    # closing probability: no further starvation after resuming at packet k
    cum = np.cumsum(terms)
    pu = np.zeros(n + 1)
    ks = np.arange(1, n)
    rem = n - ks
    pu[1:n] = np.where(rem <= x1, 1.0, 1.0 - cum[np.maximum(rem - 1, 0)])
    pu[n] = 0.0
    return assemble_pmf(pe, gap, pu, n, x1, j_max, "takacs")
