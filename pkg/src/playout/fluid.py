"""Fluid-limit starvation analysis across a population of files.

With deterministic arrival rate ``lam`` and playback rate ``mu >= lam``, a
buffer prefilled to ``x1`` packets drains at rate mu - lam once playback
starts, so exactly

    N_p = x1 * mu / (mu - lam)

packets are served before the level hits zero.  A file avoids starvation iff
it is shorter than that horizon, so the starvation probability over a file
population is just the tail probability P(size > N_p) of the size
distribution.  Closed forms are provided for exponential, Pareto and
log-normal file sizes, plus mean-matching helpers to compare families at
equal average size.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

__all__ = [
    "Exponential",
    "Pareto",
    "LogNormal",
    "FileSizeDistribution",
    "FluidScenario",
    "no_starvation_horizon",
    "fluid_starvation_probability",
    "match_means",
]


@dataclass(frozen=True)
class Exponential:
    """Exponential file sizes with rate ``theta`` (mean 1/theta packets)."""

    theta: float

    def __post_init__(self):
        if not (self.theta > 0.0 and math.isfinite(self.theta)):
            raise ValueError(f"rate must be positive, got {self.theta}")

    def mean(self) -> float:
        return 1.0 / self.theta

    def tail(self, x: float) -> float:
        """P(size > x)."""
        if x <= 0.0:
            return 1.0
        return math.exp(-self.theta * x)

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return rng.exponential(1.0 / self.theta, size)


@dataclass(frozen=True)
class Pareto:
    """Pareto file sizes with minimum ``n_m`` packets and exponent ``upsilon``.

    ``upsilon`` must exceed one so the mean upsilon * n_m / (upsilon - 1)
    is finite.
    """

    n_m: float
    upsilon: float

    def __post_init__(self):
        if not (self.n_m >= 1.0 and math.isfinite(self.n_m)):
            raise ValueError(f"minimum size must be >= 1, got {self.n_m}")
        if not (self.upsilon > 1.0 and math.isfinite(self.upsilon)):
            raise ValueError(f"exponent must be > 1 for a finite mean, got {self.upsilon}")

    def mean(self) -> float:
        return self.upsilon * self.n_m / (self.upsilon - 1.0)

    def tail(self, x: float) -> float:
        """P(size > x); exactly one while x is at or below the minimum size."""
        if x <= self.n_m:
            return 1.0
        return (self.n_m / x) ** self.upsilon

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        # inverse CDF: n_m * U^(-1/upsilon)
        u = rng.random(size)
        return self.n_m * u ** (-1.0 / self.upsilon)


@dataclass(frozen=True)
class LogNormal:
    """Log-normal file sizes: log(size) ~ Normal(varrho, sigma^2)."""

    varrho: float
    sigma: float

    def __post_init__(self):
        if not (self.sigma > 0.0 and math.isfinite(self.sigma)):
            raise ValueError(f"log-scale stddev must be positive, got {self.sigma}")
        if not math.isfinite(self.varrho):
            raise ValueError(f"log-scale mean must be finite, got {self.varrho}")

    def mean(self) -> float:
        return math.exp(self.varrho + 0.5 * self.sigma * self.sigma)

    def tail(self, x: float) -> float:
        """P(size > x) = 1/2 - 1/2 erf((log x - varrho) / (sqrt(2) sigma))."""
        if x <= 0.0:
            return 1.0
        if math.isinf(x):
            return 0.0
        z = (math.log(x) - self.varrho) / (math.sqrt(2.0) * self.sigma)
        return 0.5 - 0.5 * math.erf(z)

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return rng.lognormal(self.varrho, self.sigma, size)


FileSizeDistribution = Union[Exponential, Pareto, LogNormal]


@dataclass(frozen=True)
class FluidScenario:
    """Deterministic-rate playout: arrival rate, playback rate, threshold.

    Requires mu >= lam: a faster arrival than playback rate never starves in
    the fluid limit, so the model has nothing to say there.  ``lam == 0``
    is allowed as the no-refill edge (the buffer drains exactly x1 packets).
    """

    lam: float
    mu: float
    threshold: int

    def __post_init__(self):
        if not (self.mu > 0.0 and math.isfinite(self.mu)):
            raise ValueError(f"playback rate must be positive, got {self.mu}")
        if not (0.0 <= self.lam and math.isfinite(self.lam)):
            raise ValueError(f"arrival rate must be non-negative, got {self.lam}")
        if self.lam > self.mu:
            raise ValueError("fluid model requires mu >= lam (otherwise no starvation)")
        if not (isinstance(self.threshold, int) and self.threshold >= 1):
            raise ValueError(f"threshold must be an integer >= 1, got {self.threshold}")


def no_starvation_horizon(scn: FluidScenario) -> float:
    """Packets served before the buffer empties: x1 * mu / (mu - lam).

    Infinite when the rates balance (the level never drains), meaning no file
    of finite size can starve.
    """
    if scn.mu == scn.lam:
        return math.inf
    return scn.threshold * scn.mu / (scn.mu - scn.lam)


def fluid_starvation_probability(scn: FluidScenario, dist: FileSizeDistribution) -> float:
    """Probability that a random file outlasts the no-starvation horizon."""
    return dist.tail(no_starvation_horizon(scn))


def match_means(
    target_mean: float,
    family: str,
    *,
    n_m: float | None = None,
    upsilon: float | None = None,
    varrho: float | None = None,
    sigma: float | None = None,
) -> FileSizeDistribution:
    """Build a size distribution of the given family with the given mean.

    Families with two parameters need one of them fixed; the other is solved
    from the mean identity (upsilon n_m / (upsilon - 1) for Pareto,
    exp(varrho + sigma^2 / 2) for log-normal).

    - ``exp``: no fixed parameter, theta = 1 / mean.
    - ``pareto``: fix ``n_m`` (requires n_m < mean) or ``upsilon``.
    - ``lognormal``: fix ``varrho`` (requires varrho < log mean) or ``sigma``.
    """
    if not (target_mean > 0.0 and math.isfinite(target_mean)):
        raise ValueError(f"target mean must be positive, got {target_mean}")
    if family == "exp":
        return Exponential(theta=1.0 / target_mean)
    if family == "pareto":
        if n_m is not None and upsilon is None:
            if not n_m < target_mean:
                raise ValueError(
                    f"minimum size {n_m} must be below the target mean {target_mean}"
                )
            return Pareto(n_m=n_m, upsilon=target_mean / (target_mean - n_m))
        if upsilon is not None and n_m is None:
            if not upsilon > 1.0:
                raise ValueError(f"exponent must be > 1, got {upsilon}")
            return Pareto(n_m=target_mean * (upsilon - 1.0) / upsilon, upsilon=upsilon)
        raise ValueError("pareto needs exactly one of n_m or upsilon fixed")
    if family == "lognormal":
        if varrho is not None and sigma is None:
            gap = math.log(target_mean) - varrho
            if not gap > 0.0:
                raise ValueError(
                    f"log-scale mean {varrho} must be below log of the target mean"
                )
            return LogNormal(varrho=varrho, sigma=math.sqrt(2.0 * gap))
        if sigma is not None and varrho is None:
            return LogNormal(varrho=math.log(target_mean) - 0.5 * sigma * sigma, sigma=sigma)
        raise ValueError("lognormal needs exactly one of varrho or sigma fixed")
    raise ValueError(f"unknown family {family!r} (expected exp, pareto or lognormal)")
