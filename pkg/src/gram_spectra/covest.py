"""Sample covariance and inverse-covariance estimation errors.

One draw gives the pair (||S - Sigma||_2, ||S^{-1} - Sigma^{-1}||_2) for the
uncentered sample covariance S of row-i.i.d. data.  Under the Gaussian law
both errors share the non-asymptotic rate sqrt(p/n) v p/n; under the
heavy-near-zero entry law the inverse error has infinite mean, which the
divergence diagnostic exhibits through growing running means.

For the heavy-tailed law the population covariance is E[U^2] * I; the scalar
E[U^2] has no closed form and is computed once by adaptive Simpson
quadrature (target absolute error 1e-8) and cross-checked by Monte Carlo in
the test suite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import ensembles, linalg, mc, rng


@dataclass(frozen=True)
class CovErrorSample:
    forward_error: float  # ||S - Sigma||_2
    inverse_error: float  # ||S^{-1} - Sigma^{-1}||_2; +inf when S is numerically singular
    rate_denominator: float  # max(sqrt(p/n), p/n)


@dataclass
class RateRow:
    n: int
    p: int
    r: float
    trials: int
    forward_norm_moment: float  # (E ||S - Sigma||^r)^(1/r)
    forward_ratio: float
    forward_stderr: float
    inverse_norm_moment: float
    inverse_ratio: float
    inverse_stderr: float
    overflow_count: int
    valid: bool  # n > p + 2r - 1 (the regime for which a finite rate is claimed)


def _integrand(q: float) -> float:
    # second moment of exp(1 - 1/Q) with Q uniform on (0, 1]
    if q <= 0.0:
        return 0.0
    return math.exp(2.0 - 2.0 / q)


def _adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, depth) -> float:
    m = (a + b) / 2.0
    lm = (a + m) / 2.0
    rm = (m + b) / 2.0
    flm = f(lm)
    frm = f(rm)
    left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
    right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
    if depth <= 0 or abs(left + right - whole) <= 15.0 * tol:
        return left + right + (left + right - whole) / 15.0
    return _adaptive_simpson(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + (
        _adaptive_simpson(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    )


@lru_cache(maxsize=1)
def counterexample_second_moment(tol: float = 1e-8) -> float:
    """E[U^2] for the heavy-near-zero law, by adaptive quadrature of
    integral_0^1 exp(2 - 2/q) dq (U = exp(1 - 1/Q), Q uniform)."""
    a, b = 0.0, 1.0
    fa, fb = _integrand(a), _integrand(b)
    fm = _integrand((a + b) / 2.0)
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    return _adaptive_simpson(_integrand, a, b, fa, fm, fb, whole, tol, depth=40)


def _population(spec: ensembles.DesignSpec) -> tuple[float | None, np.ndarray, np.ndarray]:
    """(isotropic scale or None, Sigma, Sigma^{-1}) for the spec's law."""
    if spec.entry_law == "counterexample":
        m2 = counterexample_second_moment()
        p = spec.p
        return m2, m2 * np.eye(p), (1.0 / m2) * np.eye(p)
    cov = spec.covariance
    if cov.is_isotropic:
        return float(cov.matrix[0, 0]), cov.matrix, cov.inv_matrix
    return None, cov.matrix, cov.inv_matrix


def cov_errors(spec: ensembles.DesignSpec, gen: np.random.Generator) -> CovErrorSample:
    """Draw one design per ``spec`` and measure both spectral-norm errors of
    its uncentered sample covariance against the population covariance."""
    scale, sigma, sigma_inv = _population(spec)
    y = ensembles.draw_design(spec, gen)
    s = ensembles.gram(y)
    denom = max(math.sqrt(spec.p / spec.n), spec.p / spec.n)
    if scale is not None:
        lam = linalg.sym_eigvalues(s)
        forward = float(np.max(np.abs(lam - scale)))
        tol = linalg.default_rank_tol(s.shape, max(float(lam[0]), 0.0))
        if lam[-1] <= tol:
            inverse = math.inf
        else:
            inverse = float(np.max(np.abs(1.0 / lam - 1.0 / scale)))
        return CovErrorSample(forward, inverse, denom)
    lam, vecs = linalg.sym_eig(s)
    diff_lam = linalg.sym_eigvalues(s - sigma)
    forward = float(max(abs(diff_lam[0]), abs(diff_lam[-1])))
    tol = linalg.default_rank_tol(s.shape, max(float(lam[0]), 0.0))
    if lam[-1] <= tol:
        inverse = math.inf
    else:
        s_inv = (vecs / lam) @ vecs.T
        inv_lam = linalg.sym_eigvalues((s_inv + s_inv.T) / 2.0 - sigma_inv)
        inverse = float(max(abs(inv_lam[0]), abs(inv_lam[-1])))
    return CovErrorSample(forward, inverse, denom)


def _norm_moment(powered: np.ndarray, r: float, denom: float) -> tuple[float, float, float]:
    finite = powered[np.isfinite(powered)]
    if finite.size == 0:
        return math.nan, math.nan, math.nan
    mean = float(np.sum(finite)) / finite.size
    se_mean = rng.standard_error(finite)
    moment = mean ** (1.0 / r)
    # delta method through x -> x^(1/r)
    se_moment = se_mean * moment / (r * mean) if mean > 0 else math.nan
    return moment, moment / denom, se_moment / denom


def rate_experiment(
    grid,
    r: float,
    trials: int,
    master_seed: int,
    workers: int = 1,
    entry_law: str = "gaussian",
    covariance_kind: str = "identity",
    covariance_params: dict | None = None,
) -> list[RateRow]:
    """Normalized error moments (E||.||^r)^(1/r) / (sqrt(p/n) v p/n) over a
    grid of (n, p) shapes; forward and inverse errors share trials.

    Rows where n <= p + 2r - 1 are still computed but flagged invalid (no
    finite inverse moment is claimed there).
    """
    if r <= 0:
        raise ValueError("moment order r must be positive")
    if trials < 2:
        raise ValueError("trials must be >= 2")
    rows: list[RateRow] = []
    for k, (n, p) in enumerate(grid):
        if entry_law == "counterexample":
            spec = ensembles.counterexample_spec(n, p)
        else:
            cov = ensembles.covariance_from_config(
                covariance_kind, covariance_params or {}, p
            )
            spec = ensembles.DesignSpec(n=n, p=p, covariance=cov)
        raw = mc._collect(("cov_pair", spec), trials, master_seed, k * trials, workers)
        fwd = raw[:, 0] ** r
        inv = raw[:, 1] ** r
        denom = max(math.sqrt(p / n), p / n)
        f_m, f_ratio, f_se = _norm_moment(fwd, r, denom)
        i_m, i_ratio, i_se = _norm_moment(inv, r, denom)
        rows.append(
            RateRow(
                n=n,
                p=p,
                r=r,
                trials=trials,
                forward_norm_moment=f_m,
                forward_ratio=f_ratio,
                forward_stderr=f_se,
                inverse_norm_moment=i_m,
                inverse_ratio=i_ratio,
                inverse_stderr=i_se,
                overflow_count=int(np.count_nonzero(~np.isfinite(inv))),
                valid=n > p + 2 * r - 1,
            )
        )
    return rows


def counterexample_inverse_divergence(
    n: int, p: int, trials: int, master_seed: int, workers: int = 1
) -> mc.MomentEstimate:
    """Divergence diagnostic for ||S^{-1} - Sigma^{-1}||_2 under the
    heavy-near-zero entry law (requires 2 <= p <= n)."""
    if not 2 <= p <= n:
        raise ValueError("requires 2 <= p <= n")
    spec = ensembles.counterexample_spec(n, p)
    return mc.divergence_diagnostic(spec, "inv_cov_error", trials, master_seed, workers)
