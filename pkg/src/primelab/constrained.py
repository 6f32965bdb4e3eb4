"""Constrained random model: shifts whose sequence product never exceeds n.

A shift survives when, at every position n, the product of the primes whose
shifted sequences land on n stays <= n.  The survivors are enumerated level
by level over the residue systems: depth-k survivors have been checked on
every position below p_{k+1}**2, and extending to depth k+1 only has to
check the next block [p_{k+1}**2, p_{k+2}**2).  The all-zero shift (the
primes) survives every level, since the product of distinct prime divisors
of n below sqrt(n) divides n.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from primelab.errors import ResourceLimitError
from primelab.random_model import ShiftResidues, pi_rm
from primelab.sieve import PrimeBasis

# Running products are clipped here; any clipped value already exceeds every
# position in a desk-scale block, so the <= n comparison is unaffected.
_PRODUCT_CAP = 1 << 40

DESK_SCALE_LEVELS = 40


class LevelCensus(NamedTuple):
    level: int
    prime: int
    survivors: int


@dataclass(frozen=True)
class EnumerationReport:
    """Per-level census and the final survivor set of the constrained model."""

    levels: tuple[LevelCensus, ...]
    survivors: tuple[ShiftResidues, ...]
    horizon: int

    @property
    def final_count(self) -> int:
        return self.levels[-1].survivors if self.levels else 0


def constraint_ok(shift: ShiftResidues, n: int, basis: PrimeBasis) -> bool:
    """Whether the shifted sequence product at position n stays <= n.

    Multiplies the primes p_k (k <= pi(isqrt(n))) with (n + b_k) = 0 mod p_k,
    short-circuiting as soon as the running product exceeds n.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    from primelab.random_model import _required_depth
    from primelab.errors import ShiftDepthError

    needed = _required_depth(n, basis)
    if shift.depth < needed:
        raise ShiftDepthError(needed, shift.depth)
    product = 1
    for k in range(needed):
        p = basis.primes[k]
        if (n + shift.residues[k]) % p == 0:
            product *= p
            if product > n:
                return False
    return True


def enumerate_rmc(
    depth: int,
    basis: PrimeBasis,
    max_survivors: int = 1_000_000,
) -> EnumerationReport:
    """Level-wise branch-and-prune census of the constrained model.

    Starts from the depth-1 residues {0, 1}; at each level every survivor is
    extended by all residues of the next prime and pruned against the newly
    determined block of positions.  Survivors are kept in lexicographic
    residue order, so output is deterministic.
    """
    if depth < 1:
        raise ValueError(f"depth must be >= 1, got {depth}")
    if len(basis) < depth + 1:
        raise ValueError(
            f"basis holds {len(basis)} primes; enumerating to depth {depth} "
            f"needs at least {depth + 1}"
        )
    if depth > DESK_SCALE_LEVELS:
        warnings.warn(
            f"depth {depth} is beyond the desk-scale envelope "
            f"({DESK_SCALE_LEVELS}); expect long runtimes",
            RuntimeWarning,
            stacklevel=2,
        )
    horizon = basis.prime(depth + 1) ** 2 - 1
    if horizon >= _PRODUCT_CAP:
        raise ResourceLimitError(f"horizon {horizon} exceeds the product cap")

    levels: list[LevelCensus] = []
    parents: list[tuple[int, ...]] = [()]
    for m in range(1, depth + 1):
        p_new = basis.prime(m)
        block_lo = p_new * p_new
        block_hi = basis.prime(m + 1) ** 2  # exclusive
        block = np.arange(block_lo, block_hi, dtype=np.int64)
        # Residue of each position modulo the earlier primes, shared by all parents.
        mods = [block % basis.prime(i) for i in range(1, m)]
        survivors: list[tuple[int, ...]] = []
        for parent in parents:
            q = np.ones(block.size, dtype=np.int64)
            for i, b in enumerate(parent):
                p = basis.prime(i + 1)
                hit = mods[i] == (-b) % p
                q[hit] = np.minimum(q[hit] * p, _PRODUCT_CAP)
            if bool(np.any(q > block)):
                continue  # violated before the new prime: no child survives
            tight = q * p_new > block
            if tight.any():
                bad = set(int(r) for r in np.unique((-block[tight]) % p_new))
                children = [b for b in range(p_new) if b not in bad]
            else:
                children = list(range(p_new))
            for b in children:
                survivors.append(parent + (b,))
            if len(survivors) > max_survivors:
                raise ResourceLimitError(
                    f"more than {max_survivors} survivors at level {m}"
                )
        parents = survivors
        levels.append(LevelCensus(m, p_new, len(parents)))
    return EnumerationReport(
        levels=tuple(levels),
        survivors=tuple(ShiftResidues(s) for s in parents),
        horizon=horizon,
    )


def pi_rmc(x: float, shift: ShiftResidues, basis: PrimeBasis) -> int:
    """Counting function of a constrained realisation.

    Identical to the unconstrained count; callers are responsible for
    passing a survivor of ``enumerate_rmc`` of sufficient depth.
    """
    return pi_rm(x, shift, basis)


def canonical_representative(shift: ShiftResidues, basis: PrimeBasis) -> int:
    """Smallest nonnegative shift integer with the given residues.

    Chinese-remainder combination modulo the primorial of the shift depth;
    display only (the residues are what every computation uses).
    """
    a, modulus = 0, 1
    for k, b in enumerate(shift.residues):
        p = basis.prime(k + 1)
        t = ((b - a) * pow(modulus, -1, p)) % p
        a += modulus * t
        modulus *= p
    return a


def primorial(depth: int, basis: PrimeBasis) -> int:
    out = 1
    for k in range(1, depth + 1):
        out *= basis.prime(k)
    return out
