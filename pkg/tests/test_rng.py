import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gram_spectra import rng, special


def test_same_key_is_bit_identical():
    a = rng.stream(42, 0).standard_normal(100)
    b = rng.stream(42, 0).standard_normal(100)
    np.testing.assert_array_equal(a, b)


def test_distinct_trials_differ():
    a = rng.stream(42, 0).standard_normal(10)
    b = rng.stream(42, 1).standard_normal(10)
    assert not np.array_equal(a, b)


def test_distinct_seeds_differ():
    a = rng.stream(1, 7).standard_normal(10)
    b = rng.stream(2, 7).standard_normal(10)
    assert not np.array_equal(a, b)


def test_stream_key_validation():
    with pytest.raises(ValueError):
        rng.StreamKey(-1, 0)
    with pytest.raises(ValueError):
        rng.StreamKey(0, 2**64)


def test_standard_normal_moments():
    x = rng.standard_normal(rng.stream(20240601, 0), 10**6)
    assert abs(x.mean()) < 0.005
    assert abs(x.var() - 1.0) < 0.01


def test_rademacher_support_and_symmetry():
    gen = rng.stream(20240601, 1)
    z = rng.rademacher(gen, 10**6)
    assert set(np.unique(z)) == {-1, 1}
    assert abs(z.mean()) < 0.005


def test_rademacher_half_probability():
    z = rng.rademacher(rng.stream(20240601, 2), 10**5)
    assert abs(np.mean(z == 1) - 0.5) < 0.01


def test_inverse_cdf_analytic_points():
    assert rng.u_from_q(1.0) == pytest.approx(1.0, abs=0.0)
    assert rng.u_from_q(0.5) == pytest.approx(math.exp(-1.0), rel=1e-15)


def test_counterexample_support():
    u = rng.counterexample_u(rng.stream(20240601, 3), 10**5)
    assert np.all(u > 0.0)
    assert np.all(u <= 1.0)


def test_counterexample_cdf_values():
    assert rng.counterexample_cdf(1.0) == 1.0
    assert rng.counterexample_cdf(math.exp(-1.0)) == pytest.approx(0.5, rel=1e-14)
    assert rng.counterexample_cdf(0.0) == 0.0


def test_counterexample_empirical_cdf_at_inv_e():
    u = rng.counterexample_u(rng.stream(20240601, 4), 10**4)
    assert abs(np.mean(u <= math.exp(-1.0)) - 0.5) < 0.015


def test_counterexample_ks_distance():
    u = rng.counterexample_u(rng.stream(20240601, 5), 10**4)
    d = special.ks_statistic(u, rng.counterexample_cdf)
    assert d < special.ks_critical_value_1pct(10**4)


def test_signed_composition_is_centered():
    gen = rng.stream(20240601, 6)
    n = 10**6
    x = rng.rademacher(gen, n) * rng.counterexample_u(gen, n)
    se = x.std(ddof=1) / math.sqrt(n)
    assert abs(x.mean()) < 5 * se


@given(st.floats(min_value=1e-6, max_value=1.0))
@settings(max_examples=100, deadline=None)
def test_inverse_cdf_roundtrip(q):
    u = rng.u_from_q(q)
    assert 0.0 < u <= 1.0
    if u < 1.0:
        assert rng.counterexample_cdf(u) == pytest.approx(q, rel=1e-9)


def test_resolve_master_seed():
    assert rng.resolve_master_seed(None) == rng.DEFAULT_MASTER_SEED
    assert rng.resolve_master_seed(7) == 7
    with pytest.raises(ValueError):
        rng.resolve_master_seed(-3)
