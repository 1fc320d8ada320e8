"""Recursive starvation solver, with an ON/OFF bursty-arrival extension.

Instead of enumerating paths explicitly, this solver conditions on the state
seen by each arriving packet.  ``table[i][n]`` is the probability of (a given
number of) starvations for a file of ``n`` packets whose first packet arrives
to find ``i`` packets already buffered, with playback running.  One departure
kernel drives the whole recursion: ``Q[i][k]`` is the probability that k of i
buffered packets are consumed during one inter-arrival period.

For plain Poisson arrivals the kernel is geometric (p q^k with a q^i boundary
mass).  For arrivals gated by an ON/OFF Markov chain the inter-arrival period
stretches across OFF excursions and the kernel becomes a mix of two geometric
series whose bases are the roots of a rate quadratic; starvations during OFF
periods are exactly the events where the next ON arrival finds the buffer
empty, so the same recursion applies with the kernel swapped.

An emptied buffer hands control to a refill phase: the packet that completes
the refill is treated as the first packet of the remaining file, arriving to
find threshold-1 packets buffered.  The same bookkeeping anchors the initial
prefetch, so the whole solve is the kernel-weighted combination of table
entries at the prefetch-completion state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import IppParams, QueueParams, StarvationDistribution

__all__ = [
    "DepartureKernel",
    "RecursionTable",
    "mm1_kernel",
    "ipp_kernel",
    "starvation_probability_recursive",
    "starvation_pmf_recursive",
    "build_recursion_table",
]


@dataclass(frozen=True, eq=False)
class DepartureKernel:
    """Per-arrival departure-count distribution, rows i = 0..i_max.

    ``rows[i, k]`` is the probability that exactly k of i buffered packets
    depart during one inter-arrival period (k = i collects the emptied-buffer
    boundary mass).  Rows are full distributions: each sums to one.
    """

    rows: np.ndarray
    variant: str  # "mm1" or "ipp-on"

    @property
    def i_max(self) -> int:
        return self.rows.shape[0] - 1

    def row(self, i: int) -> np.ndarray:
        return self.rows[i, : i + 1]


def mm1_kernel(params: QueueParams, i_max: int) -> DepartureKernel:
    """Departure kernel for exponential services racing one Poisson inter-arrival.

    Q[i][k] = p q^k for k < i and Q[i][i] = q^i: each departure beats the next
    arrival with probability q independently, so the count is geometric,
    truncated by the buffer emptying.
    """
    if i_max < 1:
        raise ValueError(f"kernel size must be >= 1, got {i_max}")
    p, q = params.p, params.q
    k = np.arange(i_max + 1)
    qpow = q**k
    rows = np.tril(np.broadcast_to(p * qpow, (i_max + 1, i_max + 1)).copy(), -1)
    rows[k, k] = qpow
    return DepartureKernel(rows=rows, variant="mm1")


def ipp_kernel(params: QueueParams, ipp: IppParams, i_max: int) -> DepartureKernel:
    """Departure kernel when arrivals are gated by an ON/OFF Markov chain.

    Conditioned on an arrival in the ON state, the time to the next arrival is
    a geometric number of (truncated ON + OFF) excursions plus a final ON
    stretch; its Laplace transform is rational with denominator roots solving

        s^2 + s(lam + alpha + beta) + lam*beta = 0.

    Expanding at the service rate gives a two-geometric mixture

        Q_i(k) = c1 (1/a1)^k + c2 (1/a2)^k,   k < i,

    with a_{1,2} = 1 + (lam + alpha + beta +- sqrt(D)) / (2 mu) and
    c_j = (lam (beta + mu) - lam mu a_j) / (mu^2 a_j (a_other - a_j)); the
    boundary mass Q_i(i) closes each geometric tail.  (The c_j include the
    1/mu^2 factor that makes them dimensionless; without it the kernel rows
    only normalize when mu = 1.)
    """
    if i_max < 1:
        raise ValueError(f"kernel size must be >= 1, got {i_max}")
    lam, mu = params.lam, params.mu
    alpha, beta = ipp.alpha, ipp.beta
    disc = (lam + alpha + beta) ** 2 - 4.0 * lam * beta
    # (lam - beta)^2 + alpha^2 + 2 alpha (lam + beta) > 0 for positive rates.
    assert disc > 0.0, "rate quadratic must have distinct real roots"
    root = math.sqrt(disc)
    a1 = 1.0 + (lam + alpha + beta + root) / (2.0 * mu)
    a2 = 1.0 + (lam + alpha + beta - root) / (2.0 * mu)
    c1 = (lam * (beta + mu) - lam * mu * a1) / (mu * mu * a1 * (a2 - a1))
    c2 = (lam * (beta + mu) - lam * mu * a2) / (mu * mu * a2 * (a1 - a2))
    r1, r2 = 1.0 / a1, 1.0 / a2
    k = np.arange(i_max + 1)
    interior = c1 * r1**k + c2 * r2**k
    rows = np.tril(np.broadcast_to(interior, (i_max + 1, i_max + 1)).copy(), -1)
    rows[k, k] = c1 * r1**k / (1.0 - r1) + c2 * r2**k / (1.0 - r2)
    return DepartureKernel(rows=rows, variant="ipp-on")


def _transition_matrix(kernel: DepartureKernel, n: int) -> np.ndarray:
    """Matrix M with M[i, m] = Q_{i+1}(i+1-m), so new_col = M @ old_col.

    Row i spreads the state 'packet arrives seeing i buffered' over the
    states seen by the following arrival.  Row 0 is left empty: the emptied
    buffer is handled by the refill rule, not by the running recursion.
    """
    if kernel.i_max < n:
        raise ValueError(f"kernel too small: need rows up to {n}, have {kernel.i_max}")
    m = np.zeros((n + 1, n + 1))
    for i in range(1, n):
        m[i, : i + 2] = kernel.rows[i + 1, : i + 2][::-1]
    return m


def _entry_weights(kernel: DepartureKernel, x1: int) -> np.ndarray:
    """Prefetch-completion weights: Q_{x1}(k) against table column N - x1.

    When the threshold-th packet arrives, playback starts with x1 buffered;
    k of them depart before the next arrival, which then sees x1 - k.
    """
    return kernel.rows[x1, : x1 + 1][::-1]


def starvation_probability_recursive(kernel: DepartureKernel, file_size: int, threshold: int) -> float:
    """Probability of at least one starvation, by state recursion.

    Matches the lattice-path solver on the plain Poisson kernel; with the
    ON/OFF kernel it covers bursty arrivals that have no closed form here.
    """
    n, x1 = file_size, threshold
    if not 1 <= x1 <= n:
        raise ValueError(f"threshold must be in [1, file_size], got {x1}")
    if x1 == n:
        return 0.0
    mat = _transition_matrix(kernel, n)
    col = np.zeros(n + 1)
    col[0] = 1.0  # an empty buffer at any arrival means starvation happened
    # column for remaining-file size 1: starvation impossible once the last
    # packet arrives to a non-empty buffer
    for rem in range(2, n - x1 + 1):
        col = mat @ col
        col[0] = 1.0
        col[n - rem + 1 :] = 0.0  # states holding more packets than exist
    return float(_entry_weights(kernel, x1) @ col[: x1 + 1])


def _pmf_phase(
    kernel_mat: np.ndarray,
    n: int,
    n_cols: int,
    j: int,
    resume: int,
    q1_row: np.ndarray,
    prev_slab: np.ndarray | None,
) -> np.ndarray:
    """Table slab for a fixed starvation count j: slab[i, rem] over all states.

    ``prev_slab`` is the (j-1)-slab, consulted by the refill rule whenever a
    packet arrives to an empty buffer: that arrival is the first of a refill
    of ``resume`` packets (fewer if fewer remain), it accounts for one
    starvation, and the refill-completing packet re-enters the table at state
    (resume - 1, rem - resume + 1).
    """
    slab = np.zeros((n + 1, n_cols + 1))
    # remaining-file size 1
    if j == 0:
        slab[1:n, 1] = 1.0
    elif j == 1:
        slab[0, 1] = 1.0
    for rem in range(2, n_cols + 1):
        col = kernel_mat @ slab[:, rem - 1]
        if j == 0:
            col[0] = 0.0
        elif resume >= 2:
            if rem <= resume - 1:
                col[0] = 1.0 if j == 1 else 0.0
            else:
                col[0] = prev_slab[resume - 1, rem - resume + 1]
        else:
            # resume == 1: the arrival that finds the buffer empty restarts
            # playback immediately, so step the previous-count slab once
            col[0] = q1_row @ prev_slab[:2, rem - 1][::-1]
        col[n - rem + 1 :] = 0.0
        slab[:, rem] = col
    return slab


def starvation_pmf_recursive(
    kernel: DepartureKernel,
    file_size: int,
    threshold: int,
    j_max: int | None = None,
    resume_count: int | None = None,
) -> StarvationDistribution:
    """Distribution of the starvation count, by state recursion.

    ``resume_count`` is how many packets the player refills after a
    starvation before resuming (defaults to the start-up threshold, the
    convention under which this solver agrees with the lattice-path one; the
    threshold-minus-one alternative stays selectable for comparison).
    """
    n, x1 = file_size, threshold
    if not 1 <= x1 <= n:
        raise ValueError(f"threshold must be in [1, file_size], got {x1}")
    bound = n // x1
    if j_max is None:
        j_max = bound
    if j_max > bound:
        raise ValueError(f"j_max must be at most floor(N/x1) = {bound}, got {j_max}")
    resume = x1 if resume_count is None else resume_count
    if resume < 1:
        raise ValueError(f"resume count must be >= 1, got {resume}")
    tag = "ipp" if kernel.variant == "ipp-on" else "recursive"
    if x1 == n:
        return StarvationDistribution(pmf=(1.0,) + (0.0,) * j_max, method_tag=tag)
    n_cols = n - x1
    mat = _transition_matrix(kernel, n)
    q1_row = kernel.rows[1, :2]
    entry = _entry_weights(kernel, x1)
    pmf = []
    prev_slab = None
    for j in range(j_max + 1):
        slab = _pmf_phase(mat, n, n_cols, j, resume, q1_row, prev_slab)
        pmf.append(float(entry @ slab[: x1 + 1, n_cols]))
        prev_slab = slab
    return StarvationDistribution(pmf=tuple(pmf), method_tag=tag)


@dataclass(frozen=True, eq=False)
class RecursionTable:
    """Full solver state for inspection: values[j, i, rem].

    ``values[j, i, rem]`` is the probability of exactly j starvations for a
    remaining file of ``rem`` packets whose next packet arrives to find ``i``
    packets buffered.  Building the table twice with identical inputs yields
    bit-identical arrays.
    """

    values: np.ndarray
    file_size: int
    threshold: int
    resume_count: int

    def prob(self, i: int, j: int, rem: int) -> float:
        return float(self.values[j, i, rem])


def build_recursion_table(
    kernel: DepartureKernel,
    file_size: int,
    threshold: int,
    j_max: int,
    resume_count: int | None = None,
) -> RecursionTable:
    """Materialize every table slab up to ``j_max`` (test and inspection aid)."""
    n, x1 = file_size, threshold
    if not 1 <= x1 <= n:
        raise ValueError(f"threshold must be in [1, file_size], got {x1}")
    resume = x1 if resume_count is None else resume_count
    n_cols = max(n - x1, 1)
    mat = _transition_matrix(kernel, n)
    q1_row = kernel.rows[1, :2]
    slabs = []
    prev = None
    for j in range(j_max + 1):
        prev = _pmf_phase(mat, n, n_cols, j, resume, q1_row, prev)
        slabs.append(prev)
    return RecursionTable(
        values=np.stack(slabs), file_size=n, threshold=x1, resume_count=resume
    )
