"""Prefetch-threshold optimization against quality-of-experience costs.

The user cost trades the starvation measure against the squared start-up
delay (x1 / lam)^2 weighted by ``gamma``.  Four deployment scenarios:

- finite file: cost = starvation probability + gamma (x1/lam)^2, scanned
  exhaustively over thresholds because the total cost is neither concave nor
  convex in x1;
- endless stream with rho > 1: the starvation probability converges to
  exp(x1 (1-2p) / (2pq)), giving a closed-form optimum through the principal
  Lambert W branch;
- endless stream with rho < 1: starvation is certain, so the cost penalizes
  short continuous-playback runs, exp(-delta x1 / (lam (1-rho))), again with
  a Lambert W optimum;
- file level (media-server side): the fluid-limit tail for exponential file
  sizes, exp(-theta x1 mu / (mu - lam)), optimized the same way.

Every closed form is the exact stationary point of its smooth cost; the
integer threshold reported alongside is whichever of floor/ceil has the
lower true cost.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .ballot import starvation_pmf, starvation_probability
from .core import QueueParams, ScenarioSpec

__all__ = [
    "QoeWeights",
    "OptimizationResult",
    "lambert_w0",
    "cost_finite",
    "optimize_finite",
    "optimize_infinite_supercritical",
    "optimize_infinite_subcritical",
    "optimize_file_level",
]


@dataclass(frozen=True)
class QoeWeights:
    """Cost weights: ``gamma`` on squared start-up delay, ``delta`` on playback runs."""

    gamma: float
    delta: float = 1.0

    def __post_init__(self):
        if not (self.gamma >= 0.0 and math.isfinite(self.gamma)):
            raise ValueError(f"delay weight must be non-negative, got {self.gamma}")
        if not (self.delta > 0.0 and math.isfinite(self.delta)):
            raise ValueError(f"playback weight must be positive, got {self.delta}")


@dataclass(frozen=True)
class OptimizationResult:
    """An optimal threshold: real-valued stationary point and best integer."""

    x1_star: float
    x1_star_int: int
    cost_at_optimum: float
    method: str


def lambert_w0(x: float) -> float:
    """Principal branch of the Lambert W function (W e^W = x), x >= -1/e.

    Halley iteration from a branch-appropriate start: a square-root series
    near the branch point, log(1+x) in the midrange, log x - log log x for
    large arguments.  Converges to machine precision in a handful of steps.
    """
    if not math.isfinite(x):
        raise ValueError(f"argument must be finite, got {x}")
    branch_point = -1.0 / math.e
    if x < branch_point - 1e-15:
        raise ValueError(f"argument must be >= -1/e on the principal branch, got {x}")
    if x == 0.0:
        return 0.0
    if x < -0.25:
        w = -1.0 + math.sqrt(max(2.0 * (math.e * x + 1.0), 0.0))
    elif x < math.e:
        w = math.log1p(x) if x > 0 else x
    else:
        lx = math.log(x)
        w = lx - math.log(lx)
    for _ in range(100):
        ew = math.exp(w)
        f = w * ew - x
        wp1 = w + 1.0
        if wp1 == 0.0:
            w += 1e-12
            continue
        dw = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1))
        w -= dw
        if abs(dw) <= 1e-16 * (2.0 + abs(w)):
            break
    return w


def _int_candidate(x_real: float, cost, lo: int = 1, hi: int | None = None) -> tuple[int, float]:
    """Best integer threshold around a real optimum under the true cost."""
    floor_x = max(lo, int(math.floor(x_real)))
    cands = {floor_x, floor_x + 1}
    if hi is not None:
        cands = {min(max(c, lo), hi) for c in cands}
    best = None
    for c in sorted(cands):
        v = cost(c)
        if best is None or v < best[1]:
            best = (c, v)
    return best


def _clamp(x: float, lo: float | None, hi: float | None) -> float:
    if lo is not None:
        x = max(x, lo)
    if hi is not None:
        x = min(x, hi)
    return x


def cost_finite(
    params: QueueParams,
    file_size: int,
    threshold: int,
    weights: QoeWeights,
    tolerated: int = 0,
    mode: str | None = None,
) -> float:
    """User cost for a finite file at the given threshold.

    The starvation term is the probability of more than ``tolerated``
    starvations (the plain starvation probability when zero are tolerated);
    the delay term is gamma (x1/lam)^2.
    """
    if tolerated < 0:
        raise ValueError(f"tolerated starvation count must be >= 0, got {tolerated}")
    spec = ScenarioSpec(file_size=file_size, threshold=threshold)
    if tolerated == 0 and mode in (None, "exact"):
        starve = starvation_probability(params, spec)
    else:
        j_cap = min(tolerated, spec.max_starvations)
        dist = starvation_pmf(params, spec, j_max=j_cap, mode=mode)
        starve = max(0.0, 1.0 - math.fsum(dist.pmf))
    delay = weights.gamma * (threshold / params.lam) ** 2
    return starve + delay


def optimize_finite(
    params: QueueParams,
    file_size: int,
    weights: QoeWeights,
    tolerated: int = 0,
    mode: str | None = None,
    bounds: tuple[int, int] | None = None,
) -> OptimizationResult:
    """Exhaustive threshold scan for a finite file.

    The total cost is neither concave nor convex in the threshold, so every
    candidate is evaluated; ties break toward the smaller threshold.  The
    Gaussian fast path may be requested through ``mode`` for large files.
    """
    lo, hi = bounds if bounds is not None else (1, file_size)
    lo = max(1, lo)
    hi = min(file_size, hi)
    if lo > hi:
        raise ValueError(f"empty threshold range [{lo}, {hi}]")
    best_x, best_cost = None, math.inf
    for x1 in range(lo, hi + 1):
        c = cost_finite(params, file_size, x1, weights, tolerated=tolerated, mode=mode)
        if c < best_cost:
            best_x, best_cost = x1, c
    return OptimizationResult(
        x1_star=float(best_x),
        x1_star_int=best_x,
        cost_at_optimum=best_cost,
        method="grid-search",
    )


def optimize_infinite_supercritical(
    params: QueueParams,
    weights: QoeWeights,
    bounds: tuple[float, float] | None = None,
) -> OptimizationResult:
    """Closed-form optimum for an endless stream with rho > 1.

    Minimizes exp(x1 (1-2p)/(2pq)) + gamma (x1/lam)^2.  Setting the
    derivative to zero gives x e^(a x) = a lam^2 / (2 gamma) with
    a = (2p-1)/(2pq), solved by the principal Lambert W branch:

        x1* = W(((2p-1) lam / (2pq))^2 / (2 gamma)) * 2pq / (2p-1).
    """
    if params.rho <= 1.0:
        raise ValueError("requires rho > 1; use the subcritical optimizer otherwise")
    if weights.gamma <= 0.0:
        raise ValueError("delay weight must be positive for a finite optimum")
    p, q, lam = params.p, params.q, params.lam
    a = (2.0 * p - 1.0) / (2.0 * p * q)
    arg = (a * lam) ** 2 / (2.0 * weights.gamma)
    x_real = lambert_w0(arg) / a
    lo, hi = bounds if bounds is not None else (None, None)
    x_real = _clamp(x_real, lo, hi)

    def cost(x):
        return math.exp(-a * x) + weights.gamma * (x / lam) ** 2

    x_int, _ = _int_candidate(x_real, cost, hi=None if hi is None else int(hi))
    return OptimizationResult(
        x1_star=x_real,
        x1_star_int=x_int,
        cost_at_optimum=cost(x_real),
        method="lambert-closed-form",
    )


def optimize_infinite_subcritical(
    params: QueueParams,
    weights: QoeWeights,
    bounds: tuple[float, float] | None = None,
) -> OptimizationResult:
    """Closed-form optimum for an endless stream with rho < 1.

    Starvation is certain, so the cost scores the expected continuous
    playback run instead: exp(-delta x1 / (lam (1-rho))) + gamma (x1/lam)^2,
    minimized at

        x1* = W(delta^2 / (2 gamma (1-rho)^2)) * lam (1-rho) / delta.
    """
    if params.rho >= 1.0:
        raise ValueError("requires rho < 1; use the supercritical optimizer otherwise")
    if weights.gamma <= 0.0:
        raise ValueError("delay weight must be positive for a finite optimum")
    lam, delta = params.lam, weights.delta
    c = delta / (lam * (1.0 - params.rho))
    arg = delta**2 / (2.0 * weights.gamma * (1.0 - params.rho) ** 2)
    x_real = lambert_w0(arg) / c
    lo, hi = bounds if bounds is not None else (None, None)
    x_real = _clamp(x_real, lo, hi)

    def cost(x):
        return math.exp(-c * x) + weights.gamma * (x / lam) ** 2

    x_int, _ = _int_candidate(x_real, cost, hi=None if hi is None else int(hi))
    return OptimizationResult(
        x1_star=x_real,
        x1_star_int=x_int,
        cost_at_optimum=cost(x_real),
        method="lambert-closed-form",
    )


def optimize_file_level(
    lam: float,
    mu: float,
    theta: float,
    weights: QoeWeights,
    bounds: tuple[float, float] | None = None,
) -> OptimizationResult:
    """Closed-form server-side optimum over exponential file sizes.

    The fluid-limit starvation probability exp(-theta x1 mu / (mu - lam))
    plays the starvation term, giving

        x1* = W((theta mu lam / (mu - lam))^2 / (2 gamma)) * (mu - lam) / (mu theta).

    At exact rate balance (mu == lam) the buffer never drains once playback
    starts, so any positive threshold avoids starvation and the optimum
    degenerates to the smallest one: the real optimum is the limit 0 and the
    integer optimum is 1.
    """
    if not mu >= lam > 0.0:
        raise ValueError("requires mu >= lam > 0")
    if not (theta > 0.0 and math.isfinite(theta)):
        raise ValueError(f"size-distribution rate must be positive, got {theta}")
    if weights.gamma <= 0.0:
        raise ValueError("delay weight must be positive for a finite optimum")
    if mu == lam:
        return OptimizationResult(
            x1_star=0.0,
            x1_star_int=1,
            cost_at_optimum=weights.gamma / (lam * lam),
            method="lambert-closed-form",
        )
    c = theta * mu / (mu - lam)
    arg = (c * lam) ** 2 / (2.0 * weights.gamma)
    x_real = lambert_w0(arg) / c
    lo, hi = bounds if bounds is not None else (None, None)
    x_real = _clamp(x_real, lo, hi)

    def cost(x):
        return math.exp(-c * x) + weights.gamma * (x / lam) ** 2

    x_int, _ = _int_candidate(x_real, cost, hi=None if hi is None else int(hi))
    return OptimizationResult(
        x1_star=x_real,
        x1_star_int=x_int,
        cost_at_optimum=cost(x_real),
        method="lambert-closed-form",
    )
