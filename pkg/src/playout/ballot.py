"""Lattice-path solver for the M/M/1 playout buffer.

Starvation events are counted by decomposing each arrival/departure path into
a first-empty event, a chain of empty-to-empty gaps, and a final
no-more-starvation event.  The classical ballot argument gives each piece in
closed form: the probability that the buffer, started with ``x1`` packets,
first empties at the ``d``-th departure is

    (x1 / (2d - x1)) * C(2d - x1, d - x1) * p**(d - x1) * q**d

for d >= x1 (d - x1 arrivals race 2d - x1 events).  Summing over d gives the
total starvation probability; chaining gap matrices gives the full pmf of the
starvation count.

The empty-to-empty gap matrices are upper-triangular and constant along
diagonals inside an admissible band, so they are kept in a compressed
generator form (:class:`BandedToeplitzMatrix`) and multiplied in O(N^2) by
convolving generators instead of materializing N x N arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .core import QueueParams, ScenarioSpec, StarvationDistribution, log_binomial_pmf

__all__ = [
    "BandedToeplitzMatrix",
    "EventVectors",
    "starvation_probability",
    "first_starvation_vector",
    "last_starvation_vector",
    "event_vectors",
    "inter_starvation_matrix",
    "starvation_pmf",
    "assemble_pmf",
    "pgf",
    "gaussian_term",
    "gaussian_term_error_bound",
    "asymptotic_starvation_probability",
    "mean_starvation_interval",
]

MODE_EXACT = "exact"
MODE_GAUSSIAN = "gaussian"

# Above this file size the Gaussian fast path becomes the default.
AUTO_GAUSSIAN_THRESHOLD = 2000

# Dense materialization is test-only; the banded form is canonical above this.
DENSE_LIMIT = 512


def _require_poisson(spec: ScenarioSpec):
    if spec.arrival is not None:
        raise ValueError("this solver handles plain Poisson arrivals only")


def _resolve_mode(mode: str | None, n: int) -> str:
    if mode is None or mode == "auto":
        return MODE_EXACT if n <= AUTO_GAUSSIAN_THRESHOLD else MODE_GAUSSIAN
    if mode not in (MODE_EXACT, MODE_GAUSSIAN):
        raise ValueError(f"mode must be 'exact' or 'gaussian', got {mode!r}")
    return mode


def _gaussian_guard_ok(m: np.ndarray, p: float, q: float) -> np.ndarray:
    """Validity of the normal approximation to Binomial(m, p) masses.

    Accepts when both m*p and m*q exceed 5, or when the skew proxy
    |(sqrt(q/p) - sqrt(p/q)) / sqrt(m)| stays below 0.3.
    """
    skew = abs(math.sqrt(q / p) - math.sqrt(p / q)) / np.sqrt(m)
    return ((m * p > 5.0) & (m * q > 5.0)) | (skew < 0.3)


def _race_terms(n: int, x1: int, params: QueueParams, mode: str) -> np.ndarray:
    """First-empty probabilities indexed by departure count d = 0..n.

    Entry d holds (x1/(2d-x1)) C(2d-x1, d-x1) p^(d-x1) q^d for d >= x1 and
    zero below; callers apply any further range masks.  In gaussian mode the
    binomial factor is replaced by the matching normal density wherever the
    validity guard holds, falling back to the exact log-space value elsewhere.
    """
    p, q = params.p, params.q
    d = np.arange(n + 1)
    out = np.zeros(n + 1)
    sel = d >= x1
    if not sel.any():
        return out
    dv = d[sel].astype(np.float64)
    m = 2.0 * dv - x1
    log_exact = (
        math.log(x1)
        - np.log(m)
        + gammaln(m + 1.0)
        - gammaln(dv - x1 + 1.0)
        - gammaln(dv + 1.0)
        + (dv - x1) * math.log(p)
        + dv * math.log(q)
    )
    if mode == MODE_EXACT:
        out[sel] = np.exp(log_exact)
        return out
    var = m * p * q
    gauss = np.exp(-((dv - x1 - m * p) ** 2) / (2.0 * var)) / np.sqrt(2.0 * math.pi * var)
    binom = np.where(_gaussian_guard_ok(m, p, q), gauss, np.exp(log_exact + np.log(m) - math.log(x1)))
    out[sel] = (x1 / m) * binom
    return out


def starvation_probability(params: QueueParams, spec: ScenarioSpec) -> float:
    """Probability of at least one starvation while playing the whole file.

    Sums the first-empty probabilities over departures x1..N-1 in ascending
    order with exact compensated accumulation.  The sum is empty (probability
    zero) when the whole file is prefetched (x1 == N).
    """
    _require_poisson(spec)
    n, x1 = spec.file_size, spec.threshold
    if x1 == n:
        return 0.0
    terms = _race_terms(n, x1, params, MODE_EXACT)
    return float(math.fsum(terms[x1:n]))


def first_starvation_vector(params: QueueParams, spec: ScenarioSpec, mode: str | None = None) -> np.ndarray:
    """Probabilities that the buffer first empties at packet k's departure.

    Returns an array indexed by packet number k = 0..N (index 0 unused).
    Entries are zero for k < x1 (cannot empty before the prefetched packets
    are consumed) and at k = N (the final packet's departure does not count).
    The entries over k sum to :func:`starvation_probability`.
    """
    _require_poisson(spec)
    n, x1 = spec.file_size, spec.threshold
    pe = _race_terms(n, x1, params, _resolve_mode(mode, n))
    pe[n] = 0.0
    return pe


def _no_more_starvation_core(params: QueueParams, n: int, x1: int, mode: str) -> np.ndarray:
    """Probability of no further starvation after resuming at packet k.

    Indexed by packet number k = 1..N.  Entry k is 1 when at most x1 packets
    remain (the player waits for all of them), 0 at k = N, and otherwise the
    complement of the starvation probability of the remaining N-k packets.
    The per-j admissibility mask (zero below j*x1) is left to callers.
    """
    terms = _race_terms(n, x1, params, mode)
    # cum[t] = sum of first-empty terms with d <= t; remaining-file starvation
    # probability for n' packets is cum[n'-1].
    cum = np.cumsum(terms)
    pu = np.zeros(n + 1)
    ks = np.arange(1, n)
    rem = n - ks
    pu[1:n] = np.where(rem <= x1, 1.0, 1.0 - cum[np.maximum(rem - 1, 0)])
    pu[n] = 0.0
    return pu


def last_starvation_vector(
    params: QueueParams, spec: ScenarioSpec, j: int, mode: str | None = None
) -> np.ndarray:
    """Probabilities that the j-th starvation at packet k is the last one.

    Indexed by packet number k = 0..N (index 0 unused).  Zero for k < j*x1
    (j starvations need at least j*x1 departures) and at k = N; one when
    N - x1 <= k < N; otherwise one minus the starvation probability of the
    remaining file.
    """
    _require_poisson(spec)
    n, x1 = spec.file_size, spec.threshold
    if not 1 <= j <= spec.max_starvations:
        raise ValueError(f"starvation count must be in [1, {spec.max_starvations}], got {j}")
    pu = _no_more_starvation_core(params, n, x1, _resolve_mode(mode, n))
    pu[: min(j * x1, n + 1)] = 0.0
    return pu


@dataclass(frozen=True, eq=False)
class EventVectors:
    """First-empty and last-empty probabilities of one scenario.

    ``p_e[k]`` is the probability that the buffer first empties at packet
    k's departure; ``p_u[j][k]`` the probability that an empty buffer at
    packet k, reached as the j-th starvation, is the last one.  Both arrays
    are indexed by packet number 0..N with index 0 unused.
    """

    p_e: np.ndarray
    p_u: dict[int, np.ndarray]


def event_vectors(
    params: QueueParams, spec: ScenarioSpec, j_max: int | None = None, mode: str | None = None
) -> EventVectors:
    """Bundle the first-empty vector with last-empty vectors for j = 1..j_max."""
    if j_max is None:
        j_max = spec.max_starvations
    return EventVectors(
        p_e=first_starvation_vector(params, spec, mode=mode),
        p_u={j: last_starvation_vector(params, spec, j, mode=mode) for j in range(1, j_max + 1)},
    )


@dataclass(frozen=True, eq=False)
class BandedToeplitzMatrix:
    """Compressed empty-to-empty gap matrix.

    The matrix is square over packet indices 1..file_size.  Entry (k, k') is
    ``gen[k' - k]`` when the pair is admissible (k >= row_min, k' - k >=
    min_offset, k' <= col_max) and zero elsewhere, so a single generator row
    plus three bounds describe the whole matrix.  Products of composable
    instances reduce to generator convolution, which keeps each matrix
    product at O(N^2).
    """

    file_size: int
    level: int
    threshold: int
    gen: np.ndarray  # gen[d] = value at column - row offset d
    min_offset: int
    row_min: int
    col_max: int

    def entry(self, row: int, col: int) -> float:
        if not (1 <= row <= self.file_size and 1 <= col <= self.file_size):
            raise ValueError("indices must lie in [1, file_size]")
        off = col - row
        if row < self.row_min or col > self.col_max or off < self.min_offset:
            return 0.0
        return float(self.gen[off])

    def to_dense(self, *, force: bool = False) -> np.ndarray:
        """Materialize the full matrix; refused for large sizes unless forced."""
        if self.file_size > DENSE_LIMIT and not force:
            raise ValueError(
                f"dense materialization disabled for file_size > {DENSE_LIMIT}; pass force=True"
            )
        n = self.file_size
        dense = np.zeros((n + 1, n + 1))
        rows = np.arange(1, n + 1)
        for r in rows:
            if r < self.row_min:
                continue
            lo = r + self.min_offset
            hi = min(self.col_max, n)
            if lo > hi:
                continue
            cols = np.arange(lo, hi + 1)
            dense[r, cols] = self.gen[cols - r]
        return dense[1:, 1:]

    def __matmul__(self, other: "BandedToeplitzMatrix") -> "BandedToeplitzMatrix":
        if not isinstance(other, BandedToeplitzMatrix):
            return NotImplemented
        if other.file_size != self.file_size:
            raise ValueError("matrix sizes differ")
        # The product stays banded Toeplitz when the right factor's row mask
        # is implied by the left factor's band, and the left factor's column
        # mask is implied by the right factor's band.  Both hold for
        # consecutive gap levels of one path decomposition.
        if other.row_min > self.row_min + self.min_offset:
            raise ValueError("right factor's row mask would break shift invariance")
        if other.col_max - other.min_offset > self.col_max:
            raise ValueError("left factor's column mask would break shift invariance")
        n = self.file_size
        gen = np.convolve(self.gen, other.gen)[: n + 1]
        return BandedToeplitzMatrix(
            file_size=n,
            level=self.level,
            threshold=self.threshold,
            gen=gen,
            min_offset=self.min_offset + other.min_offset,
            row_min=self.row_min,
            col_max=other.col_max,
        )

    def premultiply(self, vec: np.ndarray) -> np.ndarray:
        """Row vector (indexed 0..file_size) times this matrix."""
        n = self.file_size
        masked = np.array(vec[: n + 1])
        masked[: min(self.row_min, n + 1)] = 0.0
        out = np.convolve(masked, self.gen)[: n + 1]
        if self.col_max < n:
            out[self.col_max + 1 :] = 0.0
        out[: min(self.min_offset, n + 1)] = 0.0
        return out


def inter_starvation_matrix(
    params: QueueParams, spec: ScenarioSpec, j: int, l: int, mode: str | None = None
) -> BandedToeplitzMatrix:
    """Gap matrix between the l-th and (l+1)-th starvation on a j-starvation path.

    Entry (k_l, k_{l+1}) is the probability that, after resuming at packet
    k_l, the buffer next empties exactly at packet k_{l+1}'s departure.  It
    depends only on the gap k_{l+1} - k_l, and is admissible when
    k_l >= l*x1 and k_l + x1 <= k_{l+1} < N - (j - l - 1)*x1.
    """
    _require_poisson(spec)
    n, x1 = spec.file_size, spec.threshold
    if not 1 <= l <= j - 1:
        raise ValueError(f"gap level must be in [1, j-1], got l={l}, j={j}")
    if j > spec.max_starvations:
        raise ValueError(f"starvation count must be at most {spec.max_starvations}, got {j}")
    gen = _race_terms(n, x1, params, _resolve_mode(mode, n))
    gen[n] = 0.0  # gaps of a full file length never occur inside a path
    return BandedToeplitzMatrix(
        file_size=n,
        level=l,
        threshold=x1,
        gen=gen,
        min_offset=x1,
        row_min=l * x1,
        col_max=n - (j - l - 1) * x1 - 1,
    )


def assemble_pmf(
    pe: np.ndarray,
    gap_gen: np.ndarray,
    pu_core: np.ndarray,
    file_size: int,
    threshold: int,
    j_max: int,
    method_tag: str,
) -> StarvationDistribution:
    """Chain first-empty, gap and closing probabilities into a starvation pmf.

    Shared path-decomposition engine: the continuous-time and slotted solvers
    differ only in the three ingredient arrays.  ``pe`` and ``pu_core`` are
    indexed by packet number 0..N, ``gap_gen`` by gap length.  For j >= 2 the
    j-th mass is pe . gap^(j-1) . pu evaluated left to right, each step one
    O(N^2) banded product.  The per-level admissibility masks are implied by
    the band itself (the running vector is supported on k >= l*x1 and entries
    pushed beyond N - (j-l-1)*x1 cannot reach a valid closing packet), so
    skipping them changes nothing; tests check this against the literal
    masked-matrix evaluation.
    """
    n, x1 = file_size, threshold
    pmf = [1.0 - math.fsum(pe[x1:n])]
    if j_max >= 1:
        v = np.array(pe[: n + 1])
        pmf.append(float(v @ pu_core))
        for _ in range(2, j_max + 1):
            v = np.convolve(v, gap_gen)[: n + 1]
            pmf.append(float(v @ pu_core))
    return StarvationDistribution(pmf=tuple(pmf), method_tag=method_tag)


def starvation_pmf(
    params: QueueParams,
    spec: ScenarioSpec,
    j_max: int | None = None,
    mode: str | None = None,
) -> StarvationDistribution:
    """Distribution of the number of starvations over one file.

    ``j_max`` truncates the support (defaults to the structural bound
    floor(N/x1)).  ``mode`` selects exact binomial terms or the Gaussian
    fast path; by default files up to 2000 packets use exact terms.  The
    Gaussian path is never substituted silently when exact mode is requested.
    """
    _require_poisson(spec)
    n, x1 = spec.file_size, spec.threshold
    bound = spec.max_starvations
    if j_max is None:
        j_max = bound
    if j_max > bound:
        raise ValueError(f"j_max must be at most floor(N/x1) = {bound}, got {j_max}")
    mode = _resolve_mode(mode, n)
    tag = "ballot-exact" if mode == MODE_EXACT else "ballot-gaussian"
    if x1 == n:
        return StarvationDistribution(pmf=(1.0,) + (0.0,) * j_max, method_tag=tag)
    terms = _race_terms(n, x1, params, mode)
    pe = terms.copy()
    pe[n] = 0.0
    gap = terms.copy()
    gap[n] = 0.0
    pu = _no_more_starvation_core(params, n, x1, mode)
    return assemble_pmf(pe, gap, pu, n, x1, j_max, tag)


def pgf(dist: StarvationDistribution, z: float) -> float:
    """Generating function of the starvation count at argument z in [0, 1]."""
    return dist.pgf(z)


def gaussian_term(params: QueueParams, k: int, x1: int) -> float:
    """Normal-density approximation of the binomial factor at departure k.

    Approximates C(2k-x1, k-x1) p^(k-x1) q^k by the normal density with mean
    (2k-x1)p and variance (2k-x1)pq evaluated at k-x1.  When the validity
    guard fails the exact log-space value is returned instead, so the result
    is always usable.
    """
    if k < x1:
        return 0.0
    p, q = params.p, params.q
    m = 2 * k - x1
    if _gaussian_guard_ok(np.asarray(float(m)), p, q):
        var = m * p * q
        return math.exp(-((k - x1 - m * p) ** 2) / (2.0 * var)) / math.sqrt(2.0 * math.pi * var)
    return math.exp(log_binomial_pmf(m, k - x1, p))


def gaussian_term_error_bound(params: QueueParams, k: int, x1: int) -> float:
    """Berry-Esseen bound on the CDF error of the normal approximation at k."""
    p, q = params.p, params.q
    m = 2 * k - x1
    return 0.7655 * (p * p + q * q) / math.sqrt(m * p * q)


def asymptotic_starvation_probability(params: QueueParams, x1: int) -> float:
    """Large-file limit of the starvation probability.

    One whenever the arrivals cannot outrun playback (rho <= 1); otherwise
    exp(x1 (1 - 2p) / (2pq)), which the finite-file sum approaches as a
    plateau.
    """
    if x1 < 1:
        raise ValueError(f"threshold must be >= 1, got {x1}")
    p, q = params.p, params.q
    if params.rho <= 1.0:
        return 1.0
    return math.exp(x1 * (1.0 - 2.0 * p) / (2.0 * p * q))


def mean_starvation_interval(params: QueueParams, x1: int) -> float:
    """Expected time between consecutive starvation events when rho < 1.

    Covers one full cycle: the refill of x1 packets (x1/lam) plus the busy
    period started with x1 buffered packets (x1/(mu-lam)), which collapses to
    x1 / (lam (1 - rho)).
    """
    if x1 < 1:
        raise ValueError(f"threshold must be >= 1, got {x1}")
    if params.rho >= 1.0:
        raise ValueError("mean starvation interval is undefined for rho >= 1")
    return x1 / (params.lam * (1.0 - params.rho))
