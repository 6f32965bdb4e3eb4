"""Shift-based random model of the primes.

A realisation applies a random additive shift a to every prime periodic
sequence before reading off the characteristic product.  The shift is never
materialized as one integer (it would need hundreds of bits at depth 40);
only its residues b_k = a mod p_k are stored, which is enough because each
sequence reads n + a mod its own prime.  The all-zero shift reproduces the
primes themselves.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import isqrt

import numpy as np

from primelab.analytic import mertens_blocks
from primelab.errors import ShiftDepthError
from primelab.sieve import PrimeBasis


@dataclass(frozen=True)
class ShiftResidues:
    """A shift represented as residues (b_1, ..., b_K) modulo p_1, ..., p_K."""

    residues: tuple[int, ...]

    @property
    def depth(self) -> int:
        return len(self.residues)

    def extended(self, residue: int) -> "ShiftResidues":
        """Same shift, one prime deeper; the first K residues are unchanged."""
        return ShiftResidues(self.residues + (residue,))

    def validate(self, basis: PrimeBasis) -> None:
        if self.depth > len(basis):
            raise ValueError(f"shift depth {self.depth} exceeds basis size {len(basis)}")
        for k, b in enumerate(self.residues):
            p = basis.prime(k + 1)
            if not 0 <= b < p:
                raise ValueError(f"residue {b} out of range for prime {p}")


def zero_shift(depth: int) -> ShiftResidues:
    """The shift of the primes themselves: every residue zero."""
    return ShiftResidues((0,) * depth)


def sample_shift(depth: int, seed: int, basis: PrimeBasis) -> ShiftResidues:
    """Draw each residue independently and uniformly, deterministically per seed.

    Seeds are unsigned 64-bit integers fed to numpy's default generator; the
    same (seed, depth) always yields the same residues.
    """
    if depth < 1:
        raise ValueError(f"depth must be >= 1, got {depth}")
    if depth > len(basis):
        raise ValueError(f"depth {depth} exceeds basis size {len(basis)}")
    rng = np.random.default_rng(seed)
    draws = rng.integers(0, np.asarray(basis.primes[:depth], dtype=np.int64))
    return ShiftResidues(tuple(int(b) for b in draws))


def _required_depth(n: int, basis: PrimeBasis) -> int:
    r = isqrt(n)
    basis.require(r, f"indicator at {n}")
    return basis.count_leq(r)


def indicator_rm(n: int, shift: ShiftResidues, basis: PrimeBasis) -> int:
    """Characteristic value of the shifted model at position n.

    Product of kappa_k(n + a) for k = 0..pi(isqrt(n)), evaluated entirely in
    residue arithmetic: the k-th factor is 1 iff (n + b_k) mod p_k != 0.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    needed = _required_depth(n, basis)
    if shift.depth < needed:
        raise ShiftDepthError(needed, shift.depth)
    for k in range(needed):
        if (n + shift.residues[k]) % basis.primes[k] == 0:
            return 0
    return 1


def pi_rm(x: float, shift: ShiftResidues, basis: PrimeBasis) -> int:
    """Counting function of a realisation: indicator sum over 1..floor(x), minus one."""
    if x < 1:
        return 0
    top = int(x)
    total = 0
    for n in range(1, top + 1):
        total += indicator_rm(n, shift, basis)
    return total - 1


def alive_array(x_max: int, shift: ShiftResidues, basis: PrimeBasis) -> np.ndarray:
    """Indicator values 0..x_max for one shift, as a bool array (index 0 False).

    Vectorized twin of ``indicator_rm``: each prime kills the arithmetic
    progression n = -b_k (mod p_k) from p_k**2 on.  Tested to agree with the
    scalar route position by position.
    """
    if x_max < 1:
        raise ValueError(f"x_max must be >= 1, got {x_max}")
    needed = _required_depth(x_max, basis)
    if shift.depth < needed:
        raise ShiftDepthError(needed, shift.depth)
    alive = np.ones(x_max + 1, dtype=bool)
    alive[0] = False
    for k in range(needed):
        p = basis.primes[k]
        base = (-shift.residues[k]) % p
        start = base + ((p * p - base + p - 1) // p) * p
        alive[start::p] = False
    return alive


def pi_rm_series(checkpoints: np.ndarray, shift: ShiftResidues, basis: PrimeBasis) -> np.ndarray:
    """pi_rm evaluated at every checkpoint (ascending integers >= 1)."""
    cps = np.asarray(checkpoints, dtype=np.int64)
    alive = alive_array(int(cps.max()), shift, basis)
    counts = np.cumsum(alive, dtype=np.int64)
    return counts[cps] - 1


def pi_rm_ensemble(
    checkpoints: np.ndarray,
    n_seeds: int,
    basis: PrimeBasis,
    seed0: int = 0,
    threads: int = 1,
) -> tuple[np.ndarray, np.ndarray]:
    """pi_rm at each checkpoint for seeds seed0..seed0+n_seeds-1.

    Returns (seeds, matrix) with matrix[s, c] the count for seed s at
    checkpoint c.  Each row is exactly ``pi_rm_series(checkpoints,
    sample_shift(K, seed))`` for the depth K = pi(isqrt(max checkpoint)), so
    ensembles are reproducible seed by seed and order-independent.
    """
    cps = np.asarray(checkpoints, dtype=np.int64)
    x_max = int(cps.max())
    depth = basis.count_leq(isqrt(x_max))
    basis.require(isqrt(x_max), "pi_rm_ensemble")
    seeds = np.arange(seed0, seed0 + n_seeds, dtype=np.int64)

    def run(seed: int) -> np.ndarray:
        return pi_rm_series(cps, sample_shift(depth, int(seed), basis), basis)

    if threads > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(run, seeds))
    else:
        rows = [run(s) for s in seeds]
    return seeds, np.vstack(rows)


def expected_pi_rm_exact(x: float, basis: PrimeBasis) -> Fraction:
    """Exact partial sum of the per-position survival probabilities from n = 2.

    The probabilities are constant on each block [p_k**2, p_{k+1}**2), so the
    sum collapses to one multiplication per block.
    """
    top = int(x)
    if top < 2:
        return Fraction(0)
    basis.require(isqrt(top), f"expected_pi_rm({x})")
    blocks = mertens_blocks(basis)
    k_max = basis.count_leq(isqrt(top))
    total = Fraction(0)
    for k in range(k_max + 1):
        start = max(2, basis.prime(k) ** 2)
        if k < len(basis):
            end = min(top, basis.prime(k + 1) ** 2 - 1)
        else:
            end = top
        if end >= start:
            total += (end - start + 1) * blocks[k]
    return total


def expected_pi_rm(x: float, basis: PrimeBasis) -> float:
    """Expected value of pi_rm(x); reuses the per-position expected density."""
    return float(expected_pi_rm_exact(x, basis))


def count_pattern_rm(
    x: float,
    shift: ShiftResidues,
    offsets: list[int],
    basis: PrimeBasis,
) -> int:
    """Number of positions 2 <= n <= x whose whole offset pattern survives.

    offsets must be sorted and start at 0; [0, 2] counts the twin analog.
    Position 1 is excluded: the unit sequence makes it survive under every
    shift, so it would pollute every pattern count with a constant artifact.
    """
    if not offsets or offsets[0] != 0 or sorted(offsets) != list(offsets):
        raise ValueError(f"offsets must be sorted and start at 0, got {offsets}")
    top = int(x)
    count = 0
    for n in range(2, top + 1):
        if all(indicator_rm(n + o, shift, basis) for o in offsets):
            count += 1
    return count
