import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gram_spectra import linalg, rng


def _random(shape, seed=0, scale=1.0):
    return rng.stream(seed, 0).standard_normal(shape) * scale


def _check_svd(a):
    u, s, v = linalg.svd(a)
    k = min(a.shape)
    s_max = s[0] if s[0] > 0 else 1.0
    assert np.max(np.abs(a - u @ np.diag(s) @ v.T)) <= 1e-10 * s_max
    assert np.max(np.abs(u.T @ u - np.eye(k))) <= 1e-10
    assert np.max(np.abs(v.T @ v - np.eye(k))) <= 1e-10
    assert np.all(np.diff(s) <= 0.0)
    assert np.all(s >= 0.0)


class TestSvd:
    def test_diagonal(self):
        _, s, _ = linalg.svd(np.diag([3.0, 1.0]))
        np.testing.assert_allclose(s, [3.0, 1.0], atol=1e-14)

    def test_identity(self):
        _, s, _ = linalg.svd(np.eye(4))
        np.testing.assert_allclose(s, np.ones(4), atol=1e-14)

    def test_shear(self):
        # eigenvalues of A'A for [[1,1],[0,1]] solve x^2 - 3x + 1 = 0
        _, s, _ = linalg.svd(np.array([[1.0, 1.0], [0.0, 1.0]]))
        expected = [math.sqrt((3 + math.sqrt(5)) / 2), math.sqrt((3 - math.sqrt(5)) / 2)]
        np.testing.assert_allclose(s, expected, rtol=1e-12)

    @pytest.mark.parametrize("shape", [(7, 7), (30, 7), (7, 30), (120, 40), (1, 5), (5, 1), (1, 1)])
    def test_roundtrip_shapes(self, shape):
        _check_svd(_random(shape, seed=shape[0] * 100 + shape[1]))

    def test_rank_deficient_roundtrip(self):
        a = np.ones((6, 4))
        _check_svd(a)
        _, s, _ = linalg.svd(a)
        assert s[1] <= 1e-12 * s[0]

    def test_rejects_nonfinite(self):
        with pytest.raises(ValueError):
            linalg.svd(np.array([[1.0, np.nan], [0.0, 1.0]]))

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            linalg.svd(np.zeros((0, 3)))

    def test_transpose_same_singular_values(self):
        a = _random((40, 15), seed=3)
        s1 = linalg.singular_values(a)
        s2 = linalg.singular_values(a.T)
        assert np.max(np.abs(s1 - s2)) <= 1e-10 * s1[0]

    def test_singular_values_match_svd(self):
        a = _random((25, 10), seed=4)
        _, s, _ = linalg.svd(a)
        np.testing.assert_allclose(linalg.singular_values(a), s, rtol=1e-12)

    @given(st.integers(min_value=1, max_value=10), st.integers(min_value=1, max_value=10),
           st.integers(min_value=0, max_value=1000))
    @settings(max_examples=40, deadline=None)
    def test_roundtrip_property(self, n, p, seed):
        _check_svd(rng.stream(seed, 0).standard_normal((n, p)))


class TestSpectralSummary:
    def test_diagonal_kappa(self):
        assert linalg.spectral_summary(np.diag([3.0, 1.0])).kappa == pytest.approx(3.0)

    def test_scale_invariance(self):
        a = _random((20, 8), seed=5)
        k1 = linalg.spectral_summary(a).kappa
        k2 = linalg.spectral_summary(2.75e3 * a).kappa
        assert k2 == pytest.approx(k1, rel=1e-12)

    def test_rank_one_is_infinite(self):
        summ = linalg.spectral_summary(np.ones((2, 2)))
        assert summ.s_max == pytest.approx(2.0, rel=1e-14)
        assert summ.s_min == pytest.approx(0.0, abs=1e-15)
        assert math.isinf(summ.kappa)

    def test_spectrum_sorted(self):
        summ = linalg.spectral_summary(_random((9, 14), seed=6))
        assert summ.spectrum.shape == (9,)
        assert np.all(np.diff(summ.spectrum) <= 0.0)


class TestSymEig:
    def test_diagonal(self):
        lam, _ = linalg.sym_eig(np.diag([5.0, 2.0, 2.0]))
        np.testing.assert_allclose(lam, [5.0, 2.0, 2.0], atol=1e-14)

    def test_two_by_two(self):
        lam, v = linalg.sym_eig(np.array([[2.0, 1.0], [1.0, 2.0]]))
        np.testing.assert_allclose(lam, [3.0, 1.0], rtol=1e-13)
        assert np.max(np.abs(v @ v.T - np.eye(2))) <= 1e-12

    def test_identity(self):
        lam, _ = linalg.sym_eig(np.eye(5))
        np.testing.assert_allclose(lam, np.ones(5))

    def test_eigen_equation(self):
        x = _random((30, 12), seed=7)
        s = x.T @ x / 30
        s = (s + s.T) / 2
        lam, v = linalg.sym_eig(s)
        assert np.max(np.abs(s @ v - v * lam)) <= 1e-10 * abs(lam[0])
        assert np.max(np.abs(v.T @ v - np.eye(12))) <= 1e-10

    def test_rejects_asymmetric(self):
        with pytest.raises(ValueError):
            linalg.sym_eig(np.array([[1.0, 2.0], [0.5, 1.0]]))

    def test_rejects_rectangular(self):
        with pytest.raises(ValueError):
            linalg.sym_eig(np.ones((2, 3)))

    def test_eigvalues_only_matches(self):
        s = np.cov(_random((40, 6), seed=8), rowvar=False)
        lam, _ = linalg.sym_eig(s)
        np.testing.assert_allclose(linalg.sym_eigvalues(s), lam, rtol=1e-12)


class TestSqrtPsd:
    def test_diagonal(self):
        np.testing.assert_allclose(linalg.sqrt_psd(np.diag([4.0, 9.0])), np.diag([2.0, 3.0]), atol=1e-13)

    def test_identity(self):
        np.testing.assert_allclose(linalg.sqrt_psd(np.eye(3)), np.eye(3), atol=1e-14)

    def test_ar1_self_consistency(self):
        rho = 0.5
        idx = np.arange(3)
        s = rho ** np.abs(idx[:, None] - idx[None, :])
        r = linalg.sqrt_psd(s)
        assert np.max(np.abs(r @ r - s)) <= 1e-10

    def test_rejects_indefinite(self):
        with pytest.raises(ValueError):
            linalg.sqrt_psd(np.diag([1.0, -0.5]))

    def test_clamps_tiny_negative(self):
        s = np.diag([1.0, -1e-14])
        r = linalg.sqrt_psd(s)
        assert r[1, 1] == 0.0


def _check_penrose(a, tol=1e-8):
    ap = linalg.pinv(a)
    scale = max(linalg.spectral_norm(a), 1e-300)
    pscale = max(linalg.spectral_norm(ap), 1e-300)
    assert np.max(np.abs(a @ ap @ a - a)) <= tol * scale
    assert np.max(np.abs(ap @ a @ ap - ap)) <= tol * pscale
    assert np.max(np.abs((a @ ap).T - a @ ap)) <= tol
    assert np.max(np.abs((ap @ a).T - ap @ a)) <= tol


class TestPinv:
    def test_invertible_diagonal(self):
        np.testing.assert_allclose(linalg.pinv(np.diag([2.0, 4.0])), np.diag([0.5, 0.25]), atol=1e-14)

    def test_rank_one(self):
        np.testing.assert_allclose(linalg.pinv(np.ones((2, 2))), np.ones((2, 2)) / 4, atol=1e-14)

    def test_zero_matrix(self):
        np.testing.assert_array_equal(linalg.pinv(np.zeros((3, 2))), np.zeros((2, 3)))

    @pytest.mark.parametrize("rank", [1, 3, 8])
    def test_penrose_low_rank_psd(self, rank):
        gen = rng.stream(9, rank)
        b = gen.standard_normal((8, rank))
        _check_penrose(b @ b.T)

    def test_penrose_rectangular(self):
        _check_penrose(_random((12, 5), seed=10))
        _check_penrose(_random((5, 12), seed=11))

    def test_rank_tol_override(self):
        a = np.diag([1.0, 1e-6])
        assert linalg.pinv(a, rank_tol=1e-3)[1, 1] == 0.0
        assert linalg.pinv(a)[1, 1] == pytest.approx(1e6)


class TestSingularValueInequalities:
    @given(st.integers(min_value=0, max_value=500))
    @settings(max_examples=25, deadline=None)
    def test_product_bounds(self, seed):
        gen = rng.stream(seed, 1)
        a = gen.standard_normal((6, 6))
        b = gen.standard_normal((6, 6))
        sa = linalg.spectral_summary(a)
        sb = linalg.spectral_summary(b)
        sab = linalg.spectral_summary(a @ b)
        assert sab.s_min >= sa.s_min * sb.s_min - 1e-9
        assert sab.s_max <= sa.s_max * sb.s_max + 1e-9


def test_default_rank_tol():
    tol = linalg.default_rank_tol((100, 40), 2.0)
    assert tol == pytest.approx(100 * np.finfo(np.float64).eps * 2.0)
