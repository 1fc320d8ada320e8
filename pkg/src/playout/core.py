"""Shared domain types and numerical primitives for playout-buffer analysis.

The model: a media file of ``file_size`` packets is streamed into a playout
buffer.  Packets arrive at rate ``lam`` and are consumed by the decoder at
rate ``mu``.  Playback starts once ``threshold`` packets are buffered and,
after any starvation (a departure that leaves the buffer empty before the
final packet), pauses until the buffer is refilled to the threshold again.

Every solver in this package consumes the small value types defined here.
All types are immutable after construction and every function is pure, so
everything is safe to share across threads.

Probabilities built from large binomial or Poisson weights are evaluated in
natural-log space.  Probability zero is represented by an exact ``-inf`` in
the log domain (never a large negative float), so structural zeros survive
sums and products unchanged.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "LOG_ZERO",
    "LogProb",
    "QueueParams",
    "IppParams",
    "SlotParams",
    "ScenarioSpec",
    "StarvationDistribution",
    "log_binomial_pmf",
    "poisson_pmf",
]

LOG_ZERO = float("-inf")

# Natural-log probability; LOG_ZERO stands for exact probability zero.
LogProb = float


@dataclass(frozen=True)
class QueueParams:
    """Arrival/service rates of the buffer and the derived step probabilities.

    In a non-empty buffer with both processes active, the next event is an
    arrival with probability ``p = lam / (lam + mu)`` and a departure with
    probability ``q = 1 - p``.  ``q`` is always computed as the complement of
    ``p`` so that ``p + q == 1`` holds exactly.

    Parameters
    ----------
    lam : float
        Packet arrival rate in packets/second (> 0).
    mu : float
        Packet service (playback) rate in packets/second (> 0).
    """

    lam: float
    mu: float

    def __post_init__(self):
        if not (self.lam > 0.0 and math.isfinite(self.lam)):
            raise ValueError(f"arrival rate must be positive, got {self.lam}")
        if not (self.mu > 0.0 and math.isfinite(self.mu)):
            raise ValueError(f"service rate must be positive, got {self.mu}")

    @classmethod
    def from_rho(cls, rho: float, mu: float = 1.0) -> "QueueParams":
        """Build parameters from a traffic intensity, with ``mu`` normalized to 1."""
        if not (rho > 0.0 and math.isfinite(rho)):
            raise ValueError(f"traffic intensity must be positive, got {rho}")
        return cls(lam=rho * mu, mu=mu)

    @property
    def rho(self) -> float:
        """Traffic intensity lam/mu."""
        return self.lam / self.mu

    @property
    def p(self) -> float:
        """Probability that the next buffer event is an arrival."""
        return self.lam / (self.lam + self.mu)

    @property
    def q(self) -> float:
        """Probability that the next buffer event is a departure (exactly 1 - p)."""
        return 1.0 - self.p


@dataclass(frozen=True)
class IppParams:
    """ON/OFF gating rates of an interrupted Poisson arrival process.

    ``alpha`` is the ON -> OFF transition rate, ``beta`` the OFF -> ON rate.
    Arrivals occur only while the gate is ON.
    """

    alpha: float
    beta: float

    def __post_init__(self):
        if not (self.alpha > 0.0 and math.isfinite(self.alpha)):
            raise ValueError(f"ON->OFF rate must be positive, got {self.alpha}")
        if not (self.beta > 0.0 and math.isfinite(self.beta)):
            raise ValueError(f"OFF->ON rate must be positive, got {self.beta}")


@dataclass(frozen=True)
class SlotParams:
    """Slotted playback: exactly one departure per slot of ``d`` seconds."""

    d: float

    def __post_init__(self):
        if not (self.d > 0.0 and math.isfinite(self.d)):
            raise ValueError(f"slot duration must be positive, got {self.d}")


@dataclass(frozen=True)
class ScenarioSpec:
    """A single streaming scenario: file size, prefetch threshold, arrival model.

    ``arrival`` selects the arrival-process variant: ``None`` for plain
    Poisson arrivals, an :class:`IppParams` for ON/OFF gated arrivals, or a
    :class:`SlotParams` for the slotted (one departure per slot) system.
    """

    file_size: int
    threshold: int
    arrival: IppParams | SlotParams | None = None

    def __post_init__(self):
        if not (isinstance(self.file_size, int) and self.file_size >= 1):
            raise ValueError(f"file size must be an integer >= 1, got {self.file_size}")
        if not (isinstance(self.threshold, int) and 1 <= self.threshold <= self.file_size):
            raise ValueError(
                f"threshold must be an integer in [1, file_size], got {self.threshold}"
            )

    @property
    def max_starvations(self) -> int:
        """Upper bound on the number of starvations: floor(file_size / threshold)."""
        return self.file_size // self.threshold


@dataclass(frozen=True)
class StarvationDistribution:
    """Probability mass function of the number of starvations in one file.

    ``pmf[j]`` is the probability of exactly ``j`` starvations.  The tuple may
    be truncated below the structural bound floor(N/x1), in which case it sums
    to less than one by the truncated mass.

    ``method_tag`` records which solver produced the distribution
    ("ballot-exact", "ballot-gaussian", "recursive", "takacs" or "ipp").
    """

    pmf: tuple[float, ...]
    method_tag: str

    def __post_init__(self):
        cleaned = []
        for v in self.pmf:
            if not (-1e-9 <= v <= 1.0 + 1e-9):
                raise ValueError(f"pmf entry outside [0, 1]: {v!r}")
            # Round-off can push structurally tiny masses a hair negative.
            cleaned.append(min(max(v, 0.0), 1.0))
        object.__setattr__(self, "pmf", tuple(cleaned))

    @property
    def j_max(self) -> int:
        return len(self.pmf) - 1

    def pgf(self, z: float) -> float:
        """Probability generating function: sum of pmf[j] * z**j (Horner form)."""
        acc = 0.0
        for v in reversed(self.pmf):
            acc = acc * z + v
        return acc

    def total_mass(self) -> float:
        return math.fsum(self.pmf)


def log_binomial_pmf(n: int, k: int, p: float) -> LogProb:
    """Log of the binomial mass C(n, k) * p**k * (1-p)**(n-k), via log-gamma.

    Exact zero probability is returned as -inf.  Raises ValueError when
    ``k`` is outside [0, n] or ``p`` is outside [0, 1].
    """
    if not (isinstance(n, int) and n >= 0):
        raise ValueError(f"trial count must be a non-negative integer, got {n}")
    if not (isinstance(k, int) and 0 <= k <= n):
        raise ValueError(f"success count must satisfy 0 <= k <= n, got k={k}, n={n}")
    if not (0.0 <= p <= 1.0):
        raise ValueError(f"success probability must be in [0, 1], got {p}")
    if p == 0.0:
        return 0.0 if k == 0 else LOG_ZERO
    if p == 1.0:
        return 0.0 if k == n else LOG_ZERO
    return (
        math.lgamma(n + 1)
        - math.lgamma(k + 1)
        - math.lgamma(n - k + 1)
        + k * math.log(p)
        + (n - k) * math.log1p(-p)
    )


def poisson_pmf(k: int, m: float) -> float:
    """Poisson mass m**k * exp(-m) / k!, evaluated in log space.

    ``m`` is the mean count.  ``m == 0`` degenerates to a point mass at zero.
    """
    if not (isinstance(k, int) and k >= 0):
        raise ValueError(f"count must be a non-negative integer, got {k}")
    if not (m >= 0.0 and math.isfinite(m)):
        raise ValueError(f"mean must be finite and non-negative, got {m}")
    if m == 0.0:
        return 1.0 if k == 0 else 0.0
    return math.exp(k * math.log(m) - m - math.lgamma(k + 1))
