"""Analytic baselines: logarithmic integral, Riemann's smoothed count,
the Moebius function, and the Euler product over primes.

Conventions used throughout the package:

* ``li`` has lower limit 2, so li(2) = 0.  The principal-value integral from
  0 differs only by an additive constant and is never used here.
* ``riemann_R`` truncates its series where the argument drops below 2, and
  is extended by 0 for arguments below 2 so that downstream telescoping sums
  close exactly at the lower boundary.
* The Euler product W is kept as an exact Fraction; Python integers do not
  overflow, so no floating-point fallback is needed.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from fractions import Fraction
from math import isqrt, log

import numpy as np
from scipy.integrate import quad
from scipy.special import expi

from primelab.errors import BasisTooSmallError
from primelab.sieve import PrimeBasis, integer_set_index


@dataclass(frozen=True)
class AnalyticConfig:
    quad_tol: float = 1e-12
    ri_min_arg: float = 2.0

    def __post_init__(self):
        if not (0.0 < self.quad_tol <= 1e-6):
            raise ValueError(f"quad_tol must be in (0, 1e-6], got {self.quad_tol}")
        if self.ri_min_arg < 2.0:
            raise ValueError(f"ri_min_arg must be >= 2, got {self.ri_min_arg}")


DEFAULT_CONFIG = AnalyticConfig()

_LI_OFFSET = expi(log(2.0))  # value of the principal-value integral at 2


@functools.lru_cache(maxsize=65536)
def _li_quad(x: float, tol: float) -> float:
    # QUADPACK rejects relative tolerances below ~50 machine epsilons.
    eps = max(tol, 1.2e-13)
    value, _err = quad(lambda t: 1.0 / log(t), 2.0, x, epsabs=0.0, epsrel=eps, limit=200)
    return value


def li(x: float, cfg: AnalyticConfig = DEFAULT_CONFIG) -> float:
    """Integral of dt/log t from 2 to x, by adaptive quadrature."""
    if x < 2:
        raise ValueError(f"li is defined from 2, got {x}")
    if x == 2:
        return 0.0
    return _li_quad(float(x), cfg.quad_tol)


def li_values(x: np.ndarray) -> np.ndarray:
    """Vectorized li (same convention) via the exponential integral.

    Fast path for array workloads; agrees with the quadrature route to
    ~1e-12 relative (tested).  Arguments must be >= 2.
    """
    x = np.asarray(x, dtype=float)
    return expi(np.log(x)) - _LI_OFFSET


def li_romberg(x: float, tol: float = 1e-12, max_levels: int = 22) -> float:
    """li by fixed-grid trapezoid sums with Richardson extrapolation.

    Second, independent quadrature rule (Romberg on the log-substituted
    integrand e**u / u) used to cross-check the adaptive route.
    """
    if x < 2:
        raise ValueError(f"li is defined from 2, got {x}")
    if x == 2:
        return 0.0
    a, b = log(2.0), log(x)

    def f(u: np.ndarray) -> np.ndarray:
        return np.exp(u) / u

    h = b - a
    table = [0.5 * h * (f(np.array([a])) + f(np.array([b]))).sum()]
    for level in range(1, max_levels + 1):
        mids = np.linspace(a + h / 2.0, b - h / 2.0, 2 ** (level - 1))
        trap = 0.5 * table[0] + 0.5 * h * float(np.sum(f(mids)))
        h /= 2.0
        new = [trap]
        factor = 1.0
        for prev in table:
            factor *= 4.0
            new.append(new[-1] + (new[-1] - prev) / (factor - 1.0))
        if level > 3 and abs(new[-1] - table[-1]) <= tol * abs(new[-1]):
            return new[-1]
        table = new
    return table[-1]


def mobius(m: int) -> int:
    """Moebius function by trial-division factorization."""
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    if m == 1:
        return 1
    distinct = 0
    d = 2
    while d * d <= m:
        if m % d == 0:
            m //= d
            if m % d == 0:
                return 0
            distinct += 1
        d += 1 if d == 2 else 2
    if m > 1:
        distinct += 1
    return -1 if distinct % 2 else 1


def riemann_R(x: float, cfg: AnalyticConfig = DEFAULT_CONFIG) -> float:
    """Truncated Moebius-weighted sum of li(x ** (1/m)).

    Terms whose argument falls below ``cfg.ri_min_arg`` are dropped (li is
    only defined from 2).  Extended by 0 for x < 2.
    """
    if x < 2:
        return 0.0
    total = 0.0
    m = 1
    while True:
        arg = x ** (1.0 / m)
        if arg < cfg.ri_min_arg:
            break
        mu = mobius(m)
        if mu:
            total += (mu / m) * li(arg, cfg)
        m += 1
    return total


def riemann_R_values(x: np.ndarray, cfg: AnalyticConfig = DEFAULT_CONFIG) -> np.ndarray:
    """Vectorized ``riemann_R`` over an array of points (0 below 2)."""
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    m = 1
    while True:
        args = x ** (1.0 / m)
        mask = args >= cfg.ri_min_arg
        if not mask.any():
            break
        mu = mobius(m)
        if mu:
            out[mask] += (mu / m) * li_values(args[mask])
        m += 1
    return out


def mertens_W(x: float, basis: PrimeBasis) -> Fraction:
    """Euler product of (1 - 1/p) over primes p <= x, as an exact rational.

    The empty product is 1.  Use ``float(...)`` for the real exposure.
    """
    if x > basis.limit:
        raise BasisTooSmallError(int(x), basis.limit, f"mertens_W({x})")
    w = Fraction(1)
    for p in basis.primes:
        if p > x:
            break
        w *= Fraction(p - 1, p)
    return w


@functools.lru_cache(maxsize=64)
def _mertens_blocks_cached(primes: tuple[int, ...]) -> tuple[Fraction, ...]:
    blocks = [Fraction(1)]
    for p in primes:
        blocks.append(blocks[-1] * Fraction(p - 1, p))
    return tuple(blocks)


def mertens_blocks(basis: PrimeBasis) -> tuple[Fraction, ...]:
    """W at every basis prefix: entry k is the product over the first k primes."""
    return _mertens_blocks_cached(basis.primes)


def expected_density(n: int, basis: PrimeBasis) -> float:
    """Survival probability of position n: W over primes p with p*p <= n."""
    return float(expected_density_exact(n, basis))


def expected_density_exact(n: int, basis: PrimeBasis) -> Fraction:
    return mertens_blocks(basis)[integer_set_index(n, basis)]


def euler_gamma() -> float:
    """Euler-Mascheroni constant."""
    return float(np.euler_gamma)
