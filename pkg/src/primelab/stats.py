"""Second-order statistics of the shifted model and the primes' error split.

Three families live here:

* exact variance/covariance of the model's indicator positions, including a
  gap-grouped fast path for the full pair sum (for fixed i the joint
  survival factor of a prime p depends on the gap j - i only through p | gap,
  so pairs collapse onto blocks x gaps);
* window sums of fixed coprimality depth and their exact variance over all
  shifts of one period, plus a sampled histogram for the central-limit view;
* the per-position error of the primes against the smoothed count, whose
  square decomposes into a variance-like and a covariance-like term, and the
  growth monitors built from it.

The covariance kernel is validated against exhaustive enumeration over full
residue systems in the test suite; that enumeration, not a closed-form
citation, is its authority.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import isqrt, log, sqrt
from typing import NamedTuple

import numpy as np

from primelab.analytic import (
    AnalyticConfig,
    DEFAULT_CONFIG,
    li_values,
    mertens_blocks,
    riemann_R,
    riemann_R_values,
)
from primelab.errors import ResourceLimitError, ShiftDepthError
from primelab.random_model import ShiftResidues
from primelab.sieve import PrimeBasis, indicator_values, is_prime_structural


@dataclass(frozen=True)
class CovarianceKernelConfig:
    """How pair sums are evaluated: exactness and the naive/grouped cutover."""

    exactness: str = "float"
    pair_cap: int = 20_000

    def __post_init__(self):
        if self.exactness not in ("float", "rational"):
            raise ValueError(f"exactness must be 'float' or 'rational', got {self.exactness!r}")
        if self.pair_cap <= 0:
            raise ValueError(f"pair_cap must be positive, got {self.pair_cap}")


DEFAULT_KERNEL = CovarianceKernelConfig()


@dataclass(frozen=True)
class DecompositionResult:
    """Squared-sum split: total = sum_sq + cross (an algebraic identity)."""

    x: float
    sum_sq: float
    cross: float
    total: float
    source: str


# ---------------------------------------------------------------------------
# indicator variance / covariance
# ---------------------------------------------------------------------------


def var_indicator_rm_exact(i: int, basis: PrimeBasis) -> Fraction:
    w = mertens_blocks(basis)[_block_index(i, basis)]
    return w * (1 - w)


def var_indicator_rm(i: int, basis: PrimeBasis) -> float:
    """Bernoulli variance W(sqrt(i)) * (1 - W(sqrt(i))) of one position."""
    return float(var_indicator_rm_exact(i, basis))


def _block_index(n: int, basis: PrimeBasis) -> int:
    r = isqrt(n)
    basis.require(r, f"statistics at {n}")
    return basis.count_leq(r)


def cov_indicator_rm_exact(i: int, j: int, basis: PrimeBasis) -> Fraction:
    """Exact covariance of the indicator at positions i < j.

    Joint survival: a prime p active for both positions (p <= sqrt(i)) must
    avoid one residue when p divides the gap and two otherwise (p = 2 with an
    odd gap forces 0: both parities are hit).  Primes in (sqrt(i), sqrt(j)]
    only constrain j.
    """
    if i >= j:
        raise ValueError(f"need i < j, got ({i}, {j})")
    ki = _block_index(i, basis)
    kj = _block_index(j, basis)
    blocks = mertens_blocks(basis)
    gap = j - i
    joint = Fraction(1)
    for k in range(1, ki + 1):
        p = basis.prime(k)
        joint *= Fraction(p - 1, p) if gap % p == 0 else Fraction(p - 2, p)
    joint *= blocks[kj] / blocks[ki]
    return joint - blocks[ki] * blocks[kj]


def cov_indicator_rm(i: int, j: int, basis: PrimeBasis) -> float:
    return float(cov_indicator_rm_exact(i, j, basis))


def covariance_sum(
    x: float,
    cfg: CovarianceKernelConfig = DEFAULT_KERNEL,
    basis: PrimeBasis | None = None,
) -> float | Fraction:
    """Sum of indicator covariances over all pairs 2 <= i < j <= floor(x).

    Below ``cfg.pair_cap`` pairs the naive double loop runs; above it the
    gap-grouped evaluation takes over.  Both paths agree exactly in rational
    mode (enforced by tests); rational mode returns a Fraction.
    """
    if basis is None:
        raise ValueError("covariance_sum needs a prime basis")
    N = int(x)
    if N < 3:
        return Fraction(0) if cfg.exactness == "rational" else 0.0
    exact = cfg.exactness == "rational"
    n_pairs = (N - 1) * (N - 2) // 2
    if n_pairs <= cfg.pair_cap:
        return _covariance_sum_naive(N, basis, exact)
    return _covariance_sum_grouped(N, basis, exact)


def _covariance_sum_naive(N: int, basis: PrimeBasis, exact: bool):
    total = Fraction(0)
    for i in range(2, N):
        for j in range(i + 1, N + 1):
            total += cov_indicator_rm_exact(i, j, basis)
    return total if exact else float(total)


def _gap_factor_exact(p: int, divides: bool) -> Fraction:
    # joint / marginal**2 for one prime: p/(p-1) when p | gap, else p(p-2)/(p-1)^2
    if divides:
        return Fraction(p, p - 1)
    return Fraction(p * (p - 2), (p - 1) ** 2)


def _covariance_sum_grouped(N: int, basis: PrimeBasis, exact: bool):
    """Gap-grouped pair sum.

    Cov(i, j) = W(sqrt(i)) W(sqrt(j)) (R_k(g) - 1) with g = j - i, k the
    block of i, and R_k(g) a product over the first k primes that depends on
    g only through divisibility.  Summing j for fixed (k, g) is one lookup in
    the cumulative density, so the whole sum is O(x pi(sqrt(x))).
    """
    if N < 5:
        return Fraction(0) if exact else 0.0
    basis.require(isqrt(N), f"covariance_sum({N})")
    blocks = mertens_blocks(basis)
    if exact:
        return _grouped_exact(N, basis, blocks)
    return _grouped_float(N, basis, blocks)


def _grouped_float(N: int, basis: PrimeBasis, blocks) -> float:
    cum = _cumulative_density(N, basis)
    gaps = np.arange(1, N - 3, dtype=np.int64)
    ratio = np.ones(gaps.size)
    total = 0.0
    k = 1
    while k <= len(basis) and basis.prime(k) ** 2 <= N - 1:
        p = basis.prime(k)
        ratio = ratio * np.where(
            gaps % p == 0, p / (p - 1.0), p * (p - 2.0) / (p - 1.0) ** 2
        )
        first = p * p
        last = basis.prime(k + 1) ** 2 - 1 if k < len(basis) else N
        n_valid = N - first
        if n_valid < 1:
            break
        gv = gaps[:n_valid]
        hi = np.minimum(last + gv, N)
        lo = first - 1 + gv
        total += float(blocks[k]) * float(
            np.sum((ratio[:n_valid] - 1.0) * (cum[hi] - cum[lo]))
        )
        k += 1
    return total


def _grouped_exact(N: int, basis: PrimeBasis, blocks) -> Fraction:
    cum = _cumulative_density_exact(N, basis)
    total = Fraction(0)
    k_top = basis.count_leq(isqrt(N - 1))
    primes = [basis.prime(k) for k in range(1, k_top + 1)]
    bounds = [
        (p * p, basis.prime(k + 1) ** 2 - 1 if k < len(basis) else N)
        for k, p in enumerate(primes, start=1)
    ]
    for g in range(1, N - 3):
        ratio = Fraction(1)
        for k, p in enumerate(primes, start=1):
            first, last = bounds[k - 1]
            if first > N - g:
                break
            ratio *= _gap_factor_exact(p, g % p == 0)
            hi = min(last + g, N)
            lo = first - 1 + g
            total += blocks[k] * (ratio - 1) * (cum[hi] - cum[lo])
    return total


def _cumulative_density(N: int, basis: PrimeBasis) -> np.ndarray:
    """cum[m] = sum over n = 1..m of the survival probability W(sqrt(n))."""
    blocks = mertens_blocks(basis)
    dens = np.empty(N + 1)
    dens[0] = 0.0
    k_max = basis.count_leq(isqrt(N))
    for k in range(k_max + 1):
        start = basis.prime(k) ** 2 if k else 1
        end = min(N, basis.prime(k + 1) ** 2 - 1) if k < len(basis) else N
        if end >= start:
            dens[start : end + 1] = float(blocks[k])
    return np.cumsum(dens)


def _cumulative_density_exact(N: int, basis: PrimeBasis) -> list[Fraction]:
    blocks = mertens_blocks(basis)
    out = [Fraction(0)] * (N + 1)
    acc = Fraction(0)
    k_max = basis.count_leq(isqrt(N))
    idx = 0
    for n in range(1, N + 1):
        while idx < k_max and basis.prime(idx + 1) ** 2 <= n:
            idx += 1
        acc += blocks[idx]
        out[n] = acc
    return out


def variance_sum_rm_exact(x: float, basis: PrimeBasis) -> Fraction:
    """Sum of per-position indicator variances up to floor(x), blockwise."""
    N = int(x)
    if N < 1:
        return Fraction(0)
    basis.require(isqrt(N), f"variance_sum_rm({x})")
    blocks = mertens_blocks(basis)
    k_max = basis.count_leq(isqrt(N))
    total = Fraction(0)
    for k in range(k_max + 1):
        start = basis.prime(k) ** 2 if k else 1
        end = min(N, basis.prime(k + 1) ** 2 - 1) if k < len(basis) else N
        if end >= start:
            w = blocks[k]
            total += (end - start + 1) * w * (1 - w)
    return total


def variance_pi_rm(
    x: float,
    cfg: CovarianceKernelConfig = DEFAULT_KERNEL,
    basis: PrimeBasis | None = None,
) -> DecompositionResult:
    """Variance of the model's count split into variance and covariance parts."""
    if basis is None:
        raise ValueError("variance_pi_rm needs a prime basis")
    sum_sq = float(variance_sum_rm_exact(x, basis))
    cross = 2.0 * float(covariance_sum(x, cfg, basis))
    return DecompositionResult(
        x=float(x), sum_sq=sum_sq, cross=cross, total=sum_sq + cross, source="rm-analytic"
    )


def correlation_rm(m: int, n: int, basis: PrimeBasis) -> float:
    """Correlation of the indicator at positions m < n."""
    if m >= n:
        raise ValueError(f"need m < n, got ({m}, {n})")
    vm = var_indicator_rm_exact(m, basis)
    vn = var_indicator_rm_exact(n, basis)
    if vm == 0 or vn == 0:
        raise ValueError(f"zero variance at position {m if vm == 0 else n}")
    return float(cov_indicator_rm_exact(m, n, basis)) / sqrt(float(vm) * float(vn))


# ---------------------------------------------------------------------------
# error decomposition for the primes
# ---------------------------------------------------------------------------


def epsilon_prime(i: int, basis: PrimeBasis, cfg: AnalyticConfig = DEFAULT_CONFIG) -> float:
    """Per-position error: indicator minus the smoothed-count increment.

    Position 1 is defined to be 0 (the unit's 1 cancels against the counting
    convention), which closes the telescoping sum exactly: the partial sums
    equal pi(x) - Ri(x) at every integer x.
    """
    if i < 1:
        raise ValueError(f"i must be >= 1, got {i}")
    if i == 1:
        return 0.0
    return float(is_prime_structural(i, basis)) - (riemann_R(i, cfg) - riemann_R(i - 1, cfg))


def epsilon_array(n_max: int, basis: PrimeBasis, cfg: AnalyticConfig = DEFAULT_CONFIG) -> np.ndarray:
    """Vectorized per-position errors for 0..n_max (entries 0 and 1 are 0)."""
    ind = indicator_values(n_max, basis).astype(np.float64)
    ri = riemann_R_values(np.arange(n_max + 1, dtype=np.float64), cfg)
    eps = np.zeros(n_max + 1)
    eps[2:] = ind[2:] - (ri[2:] - ri[1:-1])
    return eps


def squared_error_decomposition(
    x: float,
    basis: PrimeBasis,
    cfg: AnalyticConfig = DEFAULT_CONFIG,
) -> DecompositionResult:
    """|pi(x) - Ri(x)|**2 split into the squared and cross error terms.

    cross is computed as total - sum_sq (O(x)); the direct pairwise
    evaluation is available as ``cross_term_direct`` for desk-scale checks.
    """
    N = int(x)
    eps = epsilon_array(N, basis, cfg)
    sum_sq = float(np.sum(eps * eps))
    s = float(np.sum(eps))
    total = s * s
    return DecompositionResult(
        x=float(x), sum_sq=sum_sq, cross=total - sum_sq, total=total, source="primes"
    )


def cross_term_direct(eps: np.ndarray) -> float:
    """2 sum_{i<j} eps_i eps_j accumulated pair by pair (prefix grouping)."""
    prefix = np.cumsum(eps)
    return 2.0 * float(np.sum(eps[1:] * prefix[:-1]))


# ---------------------------------------------------------------------------
# window sums of fixed coprimality depth
# ---------------------------------------------------------------------------


class SubrandomVariance(NamedTuple):
    variance: Fraction
    bound: Fraction


@dataclass(frozen=True)
class HistogramResult:
    values: tuple[int, ...]
    counts: tuple[int, ...]
    mean: float
    variance: float
    skewness: float
    excess_kurtosis: float


_ENUMERATION_DEPTH_CAP = 9  # primorial(9) is the largest period that fits in memory


def primorial(k: int, basis: PrimeBasis) -> int:
    out = 1
    for i in range(1, k + 1):
        out *= basis.prime(i)
    return out


def subrandom_sum_S(k: int, h: int, shift: ShiftResidues, basis: PrimeBasis) -> int:
    """Number of positions 1..h whose first k shifted sequences all read 1."""
    if k < 0:
        raise ValueError(f"k must be >= 0, got {k}")
    if h < 1:
        raise ValueError(f"h must be >= 1, got {h}")
    if shift.depth < k:
        raise ShiftDepthError(k, shift.depth)
    primes = basis.primes[:k]
    res = shift.residues[:k]
    total = 0
    for n in range(1, h + 1):
        if all((n + b) % p for p, b in zip(primes, res)):
            total += 1
    return total


def _coprime_prefix(k: int, basis: PrimeBasis, upto: int) -> np.ndarray:
    """G[m] = count of 1 <= t <= m with t coprime to the first k primes."""
    flags = np.ones(upto + 1, dtype=bool)
    flags[0] = False
    for i in range(1, k + 1):
        p = basis.prime(i)
        flags[p::p] = False
    return np.cumsum(flags, dtype=np.int64)


def subrandom_variance_exact(k: int, h: int, basis: PrimeBasis) -> SubrandomVariance:
    """Exact variance of the depth-k window sum over all shifts of one period.

    Also returns the independent-sampling benchmark h W(p_k)(1 - W(p_k));
    the variance is strictly below it for every h > 1.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if h < 1:
        raise ValueError(f"h must be >= 1, got {h}")
    if k > _ENUMERATION_DEPTH_CAP:
        raise ResourceLimitError(
            f"exact enumeration supports k <= {_ENUMERATION_DEPTH_CAP}; "
            "use clt_histogram sampling instead"
        )
    period = primorial(k, basis)
    counts = _coprime_prefix(k, basis, period + h)
    windows = counts[h : h + period] - counts[:period]
    if period * h * h < (1 << 62):
        s1 = int(windows.sum(dtype=np.int64))
        s2 = int(np.dot(windows, windows))
    else:
        freq = np.bincount(windows)
        s1 = sum(v * int(c) for v, c in enumerate(freq) if c)
        s2 = sum(v * v * int(c) for v, c in enumerate(freq) if c)
    variance = Fraction(period * s2 - s1 * s1, period * period)
    w = mertens_blocks(basis)[k]
    return SubrandomVariance(variance, h * w * (1 - w))


def clt_histogram(
    k: int,
    h: int,
    num_samples: int,
    seed: int,
    basis: PrimeBasis,
) -> HistogramResult:
    """Empirical distribution of the depth-k window sum over sampled shifts.

    Shifts are drawn uniformly over one full period (equivalent, by the
    Chinese remainder theorem, to independent uniform residues per prime).
    Reports moments; makes no normality assertion.
    """
    if num_samples < 1:
        raise ValueError(f"num_samples must be >= 1, got {num_samples}")
    if k < 1 or k > _ENUMERATION_DEPTH_CAP:
        raise ResourceLimitError(f"sampling supports 1 <= k <= {_ENUMERATION_DEPTH_CAP}")
    period = primorial(k, basis)
    counts = _coprime_prefix(k, basis, period + h)
    rng = np.random.default_rng(seed)
    shifts = rng.integers(0, period, size=num_samples, dtype=np.int64)
    sums = counts[shifts + h] - counts[shifts]
    mean = float(sums.mean())
    centered = sums - mean
    variance = float(np.mean(centered**2))
    if variance > 0:
        skew = float(np.mean(centered**3)) / variance**1.5
        kurt = float(np.mean(centered**4)) / variance**2 - 3.0
    else:
        skew = 0.0
        kurt = 0.0
    freq = np.bincount(sums)
    values = tuple(int(v) for v in np.flatnonzero(freq))
    return HistogramResult(
        values=values,
        counts=tuple(int(freq[v]) for v in values),
        mean=mean,
        variance=variance,
        skewness=skew,
        excess_kurtosis=kurt,
    )


# ---------------------------------------------------------------------------
# truncated Moebius sum and growth monitors
# ---------------------------------------------------------------------------


def truncated_mobius_sum(
    n: int,
    basis: PrimeBasis,
    node_cap: int = 2_000_000,
) -> Fraction:
    """Exact sum of mu(d)/d over squarefree d <= n built from primes <= sqrt(n).

    Enumerated by pruned depth-first search over the prime list (ascending,
    so the d <= n cut cauterizes whole subtrees).  The sum is accumulated as
    an integer numerator over the fixed denominator prod(primes <= sqrt(n)).
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    r = isqrt(n)
    basis.require(r, f"truncated_mobius_sum({n})")
    primes = [p for p in basis.primes if p <= r]
    denom = 1
    for p in primes:
        denom *= p
    numer = 0
    nodes = 0
    stack: list[tuple[int, int, int, int]] = [(0, 1, denom, 1)]
    while stack:
        start, d, cofactor, sign = stack.pop()
        numer += sign * cofactor
        nodes += 1
        if nodes > node_cap:
            raise ResourceLimitError(f"divisor enumeration exceeded {node_cap} nodes")
        for idx in range(start, len(primes)):
            p = primes[idx]
            nd = d * p
            if nd > n:
                break
            stack.append((idx + 1, nd, cofactor // p, -sign))
    return Fraction(numer, denom)


def von_koch_monitor(x: float, basis: PrimeBasis, cfg: AnalyticConfig = DEFAULT_CONFIG) -> float:
    """|pi(x) - Ri(x)|**2 / (x (log x)**2) at one checkpoint."""
    if x < 10:
        raise ValueError(f"monitor needs x >= 10, got {x}")
    N = int(x)
    ind = indicator_values(N, basis)
    pi_x = int(ind.sum()) - 1
    return (pi_x - riemann_R(N, cfg)) ** 2 / (N * log(N) ** 2)


def monitor_series(
    checkpoints: np.ndarray,
    basis: PrimeBasis,
    cfg: AnalyticConfig = DEFAULT_CONFIG,
) -> dict[str, np.ndarray]:
    """Counting values and growth monitors on a shared checkpoint grid.

    Keys: pi, li, ri, expected_rm, eps_li, eps_ri, von_koch,
    monach_montgomery.  The last monitor normalizes |pi - li|**2 by
    x (log x)**-2 (log log log x)**4 and is reported, never asserted.
    """
    from primelab.random_model import expected_pi_rm

    cps = np.asarray(checkpoints, dtype=np.int64)
    N = int(cps.max())
    ind = indicator_values(N, basis)
    counts = np.cumsum(ind, dtype=np.int64)
    pi_vals = (counts[cps] - 1).astype(np.float64)
    xf = cps.astype(np.float64)
    li_vals = li_values(xf)
    ri_vals = riemann_R_values(xf, cfg)
    expected = np.array([expected_pi_rm(int(c), basis) for c in cps])
    eps_li = pi_vals - li_vals
    eps_ri = pi_vals - ri_vals
    logs = np.log(xf)
    von_koch = eps_ri**2 / (xf * logs**2)
    lll = np.log(np.log(logs))
    monach = eps_li**2 / (xf * logs**-2 * lll**4)
    return {
        "pi": pi_vals,
        "li": li_vals,
        "ri": ri_vals,
        "expected_rm": expected,
        "eps_li": eps_li,
        "eps_ri": eps_ri,
        "von_koch": von_koch,
        "monach_montgomery": monach,
    }


def fig4_rows(
    checkpoints: np.ndarray,
    basis: PrimeBasis,
    kernel: CovarianceKernelConfig = DEFAULT_KERNEL,
    cfg: AnalyticConfig = DEFAULT_CONFIG,
) -> tuple[list[str], list[list[float]]]:
    """Model-variance and prime-error splits on a shared grid (CSV payload).

    Header: x,var_sum_rm,cov_sum_rm,var_total_rm,eps_sq_primes,
    eps_cross_primes,eps_total_primes.
    """
    cps = np.asarray(checkpoints, dtype=np.int64)
    N = int(cps.max())
    eps = epsilon_array(N, basis, cfg)
    cum_eps = np.cumsum(eps)
    cum_sq = np.cumsum(eps * eps)
    header = [
        "x",
        "var_sum_rm",
        "cov_sum_rm",
        "var_total_rm",
        "eps_sq_primes",
        "eps_cross_primes",
        "eps_total_primes",
    ]
    rows = []
    for cp in cps:
        var_sum = float(variance_sum_rm_exact(int(cp), basis))
        cov_sum = 2.0 * float(covariance_sum(int(cp), kernel, basis))
        sum_sq = float(cum_sq[cp])
        total = float(cum_eps[cp]) ** 2
        rows.append(
            [int(cp), var_sum, cov_sum, var_sum + cov_sum, sum_sq, total - sum_sq, total]
        )
    return header, rows
