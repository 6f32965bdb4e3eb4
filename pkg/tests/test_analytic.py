from __future__ import annotations

from fractions import Fraction
from math import exp, log

import numpy as np
import pytest

from oracles import trial_factorize
from primelab.analytic import (
    AnalyticConfig,
    DEFAULT_CONFIG,
    euler_gamma,
    expected_density,
    expected_density_exact,
    li,
    li_romberg,
    li_values,
    mertens_W,
    mobius,
    riemann_R,
    riemann_R_values,
)
from primelab.errors import BasisTooSmallError


def test_li_at_lower_limit():
    assert li(2.0) == 0.0


def test_li_small_value():
    # frozen from the fixed-grid Richardson oracle
    assert li_romberg(4.0) == pytest.approx(1.922422, abs=1e-5)
    assert li(4.0) == pytest.approx(1.92, abs=0.01)


def test_li_large_value():
    assert li(1e6) == pytest.approx(78626.5, abs=0.5)


def test_li_rejects_below_two():
    with pytest.raises(ValueError):
        li(1.99)


def test_li_two_rules_agree():
    cfg = DEFAULT_CONFIG
    for x in (3.0, 10.0, 1e3, 1e5, 1e6):
        a = li(x, cfg)
        b = li_romberg(x, cfg.quad_tol)
        assert abs(a - b) <= 10 * cfg.quad_tol * abs(a)


def test_li_values_matches_scalar():
    xs = np.array([2.0, 2.5, 10.0, 1e4, 1e6])
    bulk = li_values(xs)
    for x, v in zip(xs, bulk):
        assert v == pytest.approx(li(float(x)), rel=1e-11, abs=1e-11)


def test_analytic_config_validation():
    with pytest.raises(ValueError):
        AnalyticConfig(quad_tol=1e-3)
    with pytest.raises(ValueError):
        AnalyticConfig(ri_min_arg=1.5)


def test_mobius_examples():
    assert mobius(1) == 1
    assert mobius(2) == -1
    assert mobius(6) == 1
    assert mobius(12) == 0


def test_mobius_matches_factorization():
    for m in range(1, 2000):
        factors = trial_factorize(m)
        if any(e > 1 for _, e in factors):
            assert mobius(m) == 0
        else:
            assert mobius(m) == (-1) ** len(factors)


def test_riemann_R_truncates_to_li():
    assert riemann_R(4.0) == pytest.approx(li(4.0), rel=1e-12)


def test_riemann_R_value():
    # oracle: the same series evaluated at tolerance 1e-14
    oracle = riemann_R(1e4, AnalyticConfig(quad_tol=1e-14))
    assert oracle == pytest.approx(1226.9, abs=0.1)
    assert riemann_R(1e4) == pytest.approx(oracle, abs=1.0)


def test_riemann_R_below_li():
    for x in np.geomspace(8, 1e6, 25):
        assert riemann_R(float(x)) < li(float(x))


def test_riemann_R_zero_below_two():
    assert riemann_R(1.0) == 0.0
    assert riemann_R(1.999) == 0.0


def test_riemann_li_asymptotic_agreement():
    gaps = []
    for x in (1e2, 1e3, 1e4, 1e5, 1e6, 1e7):
        gaps.append(abs(riemann_R(x) / li(x) - 1.0))
    assert all(a > b for a, b in zip(gaps, gaps[1:]))


def test_riemann_R_values_matches_scalar():
    xs = np.array([1.0, 2.0, 29.0, 1e4])
    bulk = riemann_R_values(xs)
    for x, v in zip(xs, bulk):
        assert v == pytest.approx(riemann_R(float(x)), rel=1e-9, abs=1e-9)


def test_mertens_W_examples(b100):
    assert mertens_W(1.9, b100) == 1
    assert mertens_W(2, b100) == Fraction(1, 2)
    assert mertens_W(5, b100) == Fraction(4, 15)


def test_mertens_W_monotone_positive(b100):
    values = [mertens_W(x, b100) for x in range(1, 101)]
    assert all(v > 0 for v in values)
    assert all(a >= b for a, b in zip(values, values[1:]))


def test_mertens_W_requires_coverage(b100):
    with pytest.raises(BasisTooSmallError):
        mertens_W(101, b100)


def test_expected_density_examples(b100):
    assert expected_density_exact(3, b100) == 1
    assert expected_density_exact(4, b100) == Fraction(1, 2)
    assert expected_density_exact(25, b100) == Fraction(4, 15)
    assert expected_density(25, b100) == pytest.approx(4 / 15)


def test_mertens_asymptotic(b1000):
    # W(sqrt(n)) against 2 e^-gamma / log n at n = 10^6
    n = 10**6
    ratio = float(mertens_W(1000, b1000)) / (2 * exp(-euler_gamma()) / log(n))
    assert abs(ratio - 1.0) < 0.05


def test_euler_gamma():
    g = euler_gamma()
    assert g == 0.5772156649015329
    assert 2 * exp(-g) == pytest.approx(1.1229189, abs=1e-6)
    assert exp(g) * exp(-g) == pytest.approx(1.0, rel=1e-15)
