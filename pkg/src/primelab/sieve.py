"""Prime periodic sequences and the structure they impose on the integers.

The integers are treated as a stack of periodic sequences: the unit sequence
of period 1, and for every prime p and power j a sequence of period p**j
whose value is p at multiples of p**j and 1 elsewhere.  Primality testing,
factorization, the prime count and the square-bounded subdivision of the
integers all reduce to evaluating finitely many of these sequences, which is
what this module does.  Sequences are pure functions of n; nothing is ever
stored as an infinite table.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass
from math import isqrt

import numpy as np

from primelab.errors import BasisTooSmallError


@dataclass(frozen=True)
class PrimeBasis:
    """All primes up to ``limit``, in increasing order.

    Index convention is 1-based: ``prime(1) == 2``.  Index 0 plays the role
    of the unit (value 1) and is never stored.
    """

    primes: tuple[int, ...]
    limit: int

    def __len__(self) -> int:
        return len(self.primes)

    def prime(self, k: int) -> int:
        """k-th prime for k >= 1; the unit 1 for k == 0."""
        if k == 0:
            return 1
        if k < 0 or k > len(self.primes):
            raise IndexError(f"prime index {k} outside basis of size {len(self.primes)}")
        return self.primes[k - 1]

    def count_leq(self, x: float) -> int:
        """Number of basis primes <= x (only valid for x <= limit)."""
        return bisect_right(self.primes, x)

    def require(self, needed: int, what: str = "operation") -> None:
        if needed > self.limit:
            raise BasisTooSmallError(needed, self.limit, what)


@dataclass(frozen=True)
class SequenceRef:
    """Reference to the periodic sequence of period prime(i) ** j.

    ``prime_index == 0`` is the unit sequence (period 1); its power is
    irrelevant and fixed to 1.
    """

    prime_index: int
    power: int = 1

    def __post_init__(self):
        if self.prime_index < 0:
            raise ValueError("prime_index must be >= 0")
        if self.power < 1:
            raise ValueError("power must be >= 1")
        if self.prime_index == 0 and self.power != 1:
            raise ValueError("the unit sequence only exists at power 1")

    def period(self, basis: PrimeBasis) -> int:
        if self.prime_index == 0:
            return 1
        return basis.prime(self.prime_index) ** self.power


@dataclass(frozen=True)
class FactorizationResult:
    """Prime factorization of ``n`` as ascending (prime, multiplicity) pairs."""

    n: int
    factors: tuple[tuple[int, int], ...]

    def value(self) -> int:
        """Reassemble the integer from its factors (1 for the empty product)."""
        out = 1
        for p, e in self.factors:
            out *= p**e
        return out


def _simple_sieve(limit: int) -> list[int]:
    if limit < 2:
        return []
    flags = bytearray([1]) * (limit + 1)
    flags[0] = flags[1] = 0
    for p in range(2, isqrt(limit) + 1):
        if flags[p]:
            flags[p * p :: p] = bytes(len(range(p * p, limit + 1, p)))
    return [i for i in range(2, limit + 1) if flags[i]]


def generate_primes(limit: int) -> PrimeBasis:
    """All primes <= limit via a segmented sieve.

    Equivalent to iterating the rule "the next prime is the first position
    past 1 not measured by any earlier prime sequence"; see
    ``primes_by_unit_measure`` for the literal (slow) version used in tests.
    """
    if limit < 2:
        raise ValueError(f"limit must be >= 2, got {limit}")
    root = isqrt(limit)
    base = _simple_sieve(root)
    primes = list(base)
    segment = 1 << 16
    lo = root + 1
    while lo <= limit:
        hi = min(lo + segment - 1, limit)
        flags = bytearray([1]) * (hi - lo + 1)
        for p in base:
            start = max(p * p, ((lo + p - 1) // p) * p)
            if start > hi:
                continue
            flags[start - lo :: p] = bytes(len(range(start, hi + 1, p)))
        primes.extend(i + lo for i, f in enumerate(flags) if f)
        lo = hi + 1
    return PrimeBasis(tuple(primes), limit)


def primes_by_unit_measure(limit: int) -> list[int]:
    """Primes by the literal constructive rule, for cross-validation only.

    Walk the unit sequence from position 2; a position is a new prime exactly
    when no previously constructed prime sequence measures it.  O(n * pi(n)),
    intended for limits up to ~10**4.
    """
    if limit < 2:
        raise ValueError(f"limit must be >= 2, got {limit}")
    found: list[int] = []
    for n in range(2, limit + 1):
        if all(n % p for p in found):
            found.append(n)
    return found


def rho(ref: SequenceRef, n: int, basis: PrimeBasis) -> int:
    """Value of the referenced periodic sequence at position n: prime(i) or 1."""
    if n < 1:
        raise ValueError(f"position must be >= 1, got {n}")
    if ref.prime_index == 0:
        return 1
    p = basis.prime(ref.prime_index)
    return p if n % p**ref.power == 0 else 1


def kappa(k: int, n: int, basis: PrimeBasis) -> int:
    """0/1 recoding of the k-th prime sequence: 1 where it reads 1, else 0."""
    if n < 1:
        raise ValueError(f"position must be >= 1, got {n}")
    if k == 0:
        return 1
    return 0 if n % basis.prime(k) == 0 else 1


def factorize(n: int, basis: PrimeBasis) -> FactorizationResult:
    """Prime factorization by repeated division along the basis.

    Multiplicities equal the largest power j for which the period-p**j
    sequence measures n.  Raises BasisTooSmallError (naming the required
    limit) when the basis cannot certify the remaining cofactor prime.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    m = n
    factors: list[tuple[int, int]] = []
    for p in basis.primes:
        if p * p > m:
            break
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            factors.append((p, e))
    else:
        if m > 1 and isqrt(m) > basis.limit:
            raise BasisTooSmallError(isqrt(m), basis.limit, f"factorize({n})")
    if m > 1:
        factors.append((m, 1))
    return FactorizationResult(n, tuple(factors))


def is_prime_structural(n: int, basis: PrimeBasis) -> int:
    """Characteristic value of n: product of kappa_k(n) for k = 0..pi(isqrt(n)).

    Returns 1 for n == 1 by construction (the unit sequence alone decides it).
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    r = isqrt(n)
    basis.require(r, f"is_prime_structural({n})")
    for p in basis.primes:
        if p > r:
            break
        if n % p == 0:
            return 0
    return 1


def prime_count(x: float, basis: PrimeBasis) -> int:
    """pi(x): sum of the characteristic values over 1..floor(x), minus one.

    The minus one cancels the unit's contribution at position 1, so the
    result is the number of primes <= x.  Values x < 2 return 0 (a count
    cannot be negative).
    """
    if x < 2:
        return 0
    top = int(x)
    basis.require(isqrt(top), f"prime_count({x})")
    total = 0
    for n in range(1, top + 1):
        total += is_prime_structural(n, basis)
    return total - 1


def integer_set_index(n: int, basis: PrimeBasis) -> int:
    """Index k of the block [p_k**2, p_{k+1}**2) containing n, with p_0 = 1."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    r = isqrt(n)
    basis.require(r, f"integer_set_index({n})")
    return basis.count_leq(r)


def indicator_values(n_max: int, basis: PrimeBasis) -> np.ndarray:
    """Characteristic values for positions 0..n_max as a uint8 array.

    Bulk twin of ``is_prime_structural`` (position 1 carries a 1, position 0
    a 0).  Used by the statistics layer where per-position loops would be too
    slow; equivalence with the scalar route is enforced by tests.
    """
    if n_max < 1:
        raise ValueError(f"n_max must be >= 1, got {n_max}")
    basis.require(isqrt(n_max), f"indicator_values({n_max})")
    out = np.ones(n_max + 1, dtype=np.uint8)
    out[0] = 0
    for p in basis.primes:
        if p * p > n_max:
            break
        out[p * p :: p] = 0
    return out


def structure_trace_header(stop: int, basis: PrimeBasis) -> list[str]:
    k = integer_set_index(stop, basis)
    return ["n"] + [f"rho_{i}" for i in range(k + 1)]


def structure_trace_rows(start: int, stop: int, basis: PrimeBasis) -> list[list[int]]:
    """Matrix of first-power sequence values over [start, stop].

    One row per position: n, rho_0(n), rho_1(n), ..., rho_k(n) with k the
    block index of ``stop`` (enough sequences to decide primality on the
    whole interval).  Values are 1 or the respective prime.
    """
    if start < 1 or stop < start:
        raise ValueError(f"need 1 <= start <= stop, got [{start}, {stop}]")
    k = integer_set_index(stop, basis)
    rows = []
    for n in range(start, stop + 1):
        row = [n, 1]
        for i in range(1, k + 1):
            p = basis.prime(i)
            row.append(p if n % p == 0 else 1)
        rows.append(row)
    return rows
