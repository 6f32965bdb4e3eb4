from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import sieve_flags, trial_factorize, trial_is_prime
from primelab.errors import BasisTooSmallError
from primelab.sieve import (
    FactorizationResult,
    SequenceRef,
    factorize,
    generate_primes,
    indicator_values,
    integer_set_index,
    is_prime_structural,
    kappa,
    prime_count,
    primes_by_unit_measure,
    rho,
    structure_trace_header,
    structure_trace_rows,
)


def test_generate_primes_small():
    assert generate_primes(10).primes == (2, 3, 5, 7)


def test_generate_primes_table_scale():
    basis = generate_primes(45)
    assert len(basis) == 14
    assert basis.primes[-1] == 43


def test_generate_primes_contains_41st():
    basis = generate_primes(179)
    assert trial_is_prime(179)
    assert basis.prime(41) == 179
    assert len(basis) == 41


def test_generate_primes_rejects_tiny_limit():
    with pytest.raises(ValueError):
        generate_primes(1)


def test_segmented_matches_unit_measure_reference():
    assert list(generate_primes(10_000).primes) == primes_by_unit_measure(10_000)


def test_segmented_matches_trial_division():
    flags = sieve_flags(5000)
    assert list(generate_primes(5000).primes) == [n for n in range(2, 5001) if flags[n]]


def test_rho_first_prime_sequence(b100):
    assert rho(SequenceRef(1, 1), 2, b100) == 2
    assert rho(SequenceRef(1, 1), 3, b100) == 1


def test_rho_renormalised(b100):
    assert rho(SequenceRef(1, 2), 4, b100) == 2
    assert rho(SequenceRef(1, 2), 2, b100) == 1


def test_rho_unit(b100):
    for n in (1, 2, 17, 360):
        assert rho(SequenceRef(0), n, b100) == 1


def test_sequence_ref_period(b100):
    assert SequenceRef(0).period(b100) == 1
    assert SequenceRef(2, 3).period(b100) == 27
    with pytest.raises(ValueError):
        SequenceRef(0, 2)
    with pytest.raises(ValueError):
        SequenceRef(1, 0)


@settings(max_examples=200, deadline=None)
@given(
    i=st.integers(min_value=0, max_value=6),
    j=st.integers(min_value=1, max_value=4),
    n=st.integers(min_value=1, max_value=2000),
)
def test_rho_periodicity(b100, i, j, n):
    if i == 0 and j != 1:
        j = 1
    ref = SequenceRef(i, j)
    period = ref.period(b100)
    assert rho(ref, n + period, b100) == rho(ref, n, b100)


def test_kappa_values(b100):
    assert kappa(1, 4, b100) == 0
    assert kappa(2, 4, b100) == 1
    assert kappa(0, 1, b100) == 1


def test_kappa_matches_rho(b100):
    for k in range(4):
        ref = SequenceRef(k) if k else SequenceRef(0)
        for n in range(1, 200):
            assert kappa(k, n, b100) == (1 if rho(ref, n, b100) == 1 else 0)


def test_factorize_examples(b400):
    assert factorize(12, b400).factors == ((2, 2), (3, 1))
    assert factorize(1, b400).factors == ()
    assert trial_factorize(32041) == [(179, 2)]
    assert factorize(32041, b400).factors == ((179, 2),)


def test_factorize_reconstruction(b400):
    for n in range(1, 10_001):
        result = factorize(n, b400)
        assert result.value() == n
        assert result.factors == tuple(trial_factorize(n))


def test_factorize_ascending_distinct(b400):
    fac = factorize(75_600, b400).factors
    primes = [p for p, _ in fac]
    assert primes == sorted(set(primes))
    assert all(e >= 1 for _, e in fac)


@settings(max_examples=300, deadline=None)
@given(n=st.integers(min_value=1, max_value=150_000))
def test_factorize_roundtrip_property(b400, n):
    assert factorize(n, b400).value() == n


def test_factorize_basis_too_small():
    basis = generate_primes(10)
    with pytest.raises(BasisTooSmallError) as err:
        factorize(10_007 * 10_009, basis)
    assert err.value.needed > 10


def test_is_prime_structural_examples(b100):
    assert is_prime_structural(1, b100) == 1
    assert is_prime_structural(29, b100) == 1
    assert is_prime_structural(30, b100) == 0


def test_is_prime_structural_matches_trial_division(b400):
    for n in range(2, 10_001):
        assert is_prime_structural(n, b400) == int(trial_is_prime(n)), n


def test_is_prime_structural_needs_coverage():
    basis = generate_primes(5)
    with pytest.raises(BasisTooSmallError):
        is_prime_structural(10_007, basis)


def test_prime_count_examples(b400):
    assert prime_count(45, b400) == 14
    assert prime_count(2, b400) == 1
    assert prime_count(1, b400) == 0
    assert prime_count(1.5, b400) == 0


def test_prime_count_matches_sieve_oracle(b400):
    flags = sieve_flags(5000)
    oracle = 0
    for x in range(2, 5001):
        oracle += flags[x]
        if x % 97 == 0 or x in (2, 3, 4, 25, 49):
            assert prime_count(x, b400) == oracle


def test_indicator_values_matches_scalar(b400):
    values = indicator_values(20_000, b400)
    assert values[0] == 0 and values[1] == 1
    for n in range(1, 20_001):
        assert values[n] == is_prime_structural(n, b400)


def test_indicator_values_pi_millionth(b1000):
    # pi(10^6) via the bulk structural route; the scalar route is checked
    # against it above and against trial division in the acceptance suite.
    values = indicator_values(10**6, b1000)
    assert int(values.sum()) - 1 == 78_498


def test_integer_set_index_examples(b100):
    assert integer_set_index(3, b100) == 0
    assert integer_set_index(25, b100) == 3
    assert integer_set_index(48, b100) == 3
    assert integer_set_index(49, b100) == 4


def test_integer_set_index_partition(b100):
    # Every n below p_26^2 lands in exactly one block and boundaries sit on squares.
    top = b100.prime(25) ** 2 - 1
    previous = 0
    for n in range(1, top + 1):
        k = integer_set_index(n, b100)
        assert k >= previous
        if k != previous:
            assert k == previous + 1
            assert n == b100.prime(k) ** 2
            previous = k
    assert integer_set_index(1, b100) == 0


def test_structure_trace_block(b100):
    header = structure_trace_header(48, b100)
    assert header == ["n", "rho_0", "rho_1", "rho_2", "rho_3"]
    rows = {row[0]: row[1:] for row in structure_trace_rows(25, 48, b100)}
    assert rows[29] == [1, 1, 1, 1]
    assert rows[30] == [1, 2, 3, 5]
    assert rows[25] == [1, 1, 1, 5]
    assert rows[48] == [1, 2, 3, 1]


def test_factorization_result_value():
    assert FactorizationResult(1, ()).value() == 1
    assert FactorizationResult(360, ((2, 3), (3, 2), (5, 1))).value() == 360
