"""Reproducible parallel Monte Carlo engine.

Trial i of an experiment with master seed s always runs on the generator of
``StreamKey(s, i)``, and aggregation happens after all trials complete, in
ascending trial order with numpy's pairwise summation.  Worker processes
only change who computes which trial, never the values, so every estimate is
bit-identical for any worker count.  BLAS threading is pinned to one thread
around trial computation for the same reason.

Non-finite statistics (for example kappa = +inf on an exactly singular draw)
are excluded from means but counted in ``overflow_count``; more than 1%
overflow flags the estimate unreliable.  For the heavy-tailed entry law the
overflow counter itself is part of the evidence of divergence.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from threadpoolctl import threadpool_limits

from . import ensembles, linalg, rng, special

STATISTICS = (
    "kappa",
    "sqrt_n_over_smin",
    "smax_over_sqrt_n",
    "log_kappa",
    "inv_cov_error",
    "cov_error",
)

OVERFLOW_FRACTION_LIMIT = 0.01
_CHUNK_CAP = 20_000


@dataclass
class MomentEstimate:
    """Streaming Monte Carlo estimate of E[statistic^r]."""

    statistic_name: str
    r: float
    trials: int
    mean: float
    stderr: float
    max_sample: float
    running_means: list = field(default_factory=list)  # (trial_count, mean) pairs
    overflow_count: int = 0
    unreliable: bool = False


@dataclass
class SweepRow:
    n: int
    p: int
    gamma: Fraction
    estimate: MomentEstimate


@dataclass
class InvChisqResult:
    ks_statistic: float
    critical_value_1pct: float
    df: int
    trials: int
    passed: bool


def _design_statistic(spec: ensembles.DesignSpec, statistic: str, gen) -> float:
    if statistic in ("cov_error", "inv_cov_error"):
        from . import covest  # deferred: covest builds on this module

        sample = covest.cov_errors(spec, gen)
        return sample.forward_error if statistic == "cov_error" else sample.inverse_error
    x = ensembles.draw_design(spec, gen)
    summary = linalg.spectral_summary(x)
    if statistic == "kappa":
        return summary.kappa
    if statistic == "log_kappa":
        return math.log(summary.kappa) if math.isfinite(summary.kappa) else math.inf
    if statistic == "sqrt_n_over_smin":
        if summary.s_min == 0.0:
            return math.inf
        return math.sqrt(spec.n) / summary.s_min
    if statistic == "smax_over_sqrt_n":
        return summary.s_max / math.sqrt(spec.n)
    raise ValueError(f"unknown statistic {statistic!r}")


def _invchisq_quadform(n: int, p: int, gen) -> float:
    # e1' (Z'Z)^{-1} e1 for Z with i.i.d. N(0,1) entries
    z = ensembles.gaussian_iid(n, p, gen)
    w = z.T @ z
    lam, vecs = linalg.sym_eig((w + w.T) / 2.0)
    if lam[-1] <= 0.0:
        return math.inf
    return float(np.sum(vecs[0, :] ** 2 / lam))


def _trial_values(task: tuple, gen) -> tuple:
    kind = task[0]
    if kind == "stat":
        _, spec, statistic = task
        return (_design_statistic(spec, statistic, gen),)
    if kind == "invchisq":
        _, n, p = task
        return (_invchisq_quadform(n, p, gen),)
    if kind == "cov_pair":
        from . import covest

        _, spec = task
        sample = covest.cov_errors(spec, gen)
        return (sample.forward_error, sample.inverse_error)
    if kind == "gd_trial":
        from . import gramsolve

        return gramsolve._complexity_trial(task, gen)
    if kind == "ridge_design":
        from . import ridge

        return ridge._design_trial(task, gen)
    raise ValueError(f"unknown task kind {kind!r}")


def _run_chunk(args) -> tuple[int, np.ndarray]:
    task, master_seed, start, count = args
    with threadpool_limits(limits=1):
        first = _trial_values(task, rng.stream(master_seed, start))
        out = np.empty((count, len(first)), dtype=np.float64)
        out[0] = first
        for i in range(1, count):
            out[i] = _trial_values(task, rng.stream(master_seed, start + i))
    return start, out


def _collect(
    task: tuple, trials: int, master_seed: int, trial_offset: int = 0, workers: int = 1
) -> np.ndarray:
    """Values of one task over ``trials`` independent streams, in trial order."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if workers <= 1:
        return _run_chunk((task, master_seed, trial_offset, trials))[1]
    chunk = max(1, min(-(-trials // (workers * 4)), _CHUNK_CAP))
    jobs = [
        (task, master_seed, trial_offset + s, min(chunk, trials - s))
        for s in range(0, trials, chunk)
    ]
    first = _trial_values(task, rng.stream(master_seed, trial_offset))
    out = np.empty((trials, len(first)), dtype=np.float64)
    with ProcessPoolExecutor(max_workers=workers) as pool:
        for start, values in pool.map(_run_chunk, jobs):
            out[start - trial_offset : start - trial_offset + values.shape[0]] = values
    return out


def _checkpoints(trials: int) -> list[int]:
    points = []
    c = 10
    while c <= trials:
        points.append(c)
        c *= 10
    if not points or points[-1] != trials:
        points.append(trials)
    return points


def _reduce(raw: np.ndarray, statistic: str, r: float, trials: int) -> MomentEstimate:
    powered = raw**r
    finite = np.isfinite(powered)
    overflow = int(trials - np.count_nonzero(finite))
    kept = powered[finite]
    if kept.size:
        mean = float(np.sum(kept)) / kept.size
        max_sample = float(np.max(kept))
    else:
        mean = math.nan
        max_sample = math.nan
    stderr = rng.standard_error(kept)
    running = []
    for c in _checkpoints(trials):
        head = powered[:c][finite[:c]]
        running.append((c, float(np.sum(head)) / head.size if head.size else math.nan))
    return MomentEstimate(
        statistic_name=statistic,
        r=r,
        trials=trials,
        mean=mean,
        stderr=stderr,
        max_sample=max_sample,
        running_means=running,
        overflow_count=overflow,
        unreliable=overflow > OVERFLOW_FRACTION_LIMIT * trials,
    )


def estimate_moment(
    spec: ensembles.DesignSpec,
    statistic: str,
    r: float,
    trials: int,
    master_seed: int,
    workers: int = 1,
    trial_offset: int = 0,
) -> MomentEstimate:
    """Monte Carlo estimate of E[statistic(X)^r] over independent designs."""
    if statistic not in STATISTICS:
        raise ValueError(f"statistic must be one of {STATISTICS}, got {statistic!r}")
    if trials < 2:
        raise ValueError("trials must be >= 2")
    if statistic == "inv_cov_error" and spec.p > spec.n:
        raise ValueError("inv_cov_error requires p <= n")
    raw = _collect(("stat", spec, statistic), trials, master_seed, trial_offset, workers)
    return _reduce(raw[:, 0], statistic, r, trials)


def sweep_gamma(
    n: int,
    gamma_grid,
    statistic: str,
    r: float,
    trials: int,
    master_seed: int,
    workers: int = 1,
    entry_law: str = "gaussian",
) -> list[SweepRow]:
    """One moment estimate per aspect ratio gamma, p = round(gamma * n).

    The same master seed is reused with disjoint trial-index ranges per grid
    point, so grids can be extended without disturbing existing points.
    """
    grid = sorted(float(g) for g in gamma_grid)
    rows: list[SweepRow] = []
    for k, g in enumerate(grid):
        p = round(g * n)
        if p < 1:
            raise ValueError(f"gamma={g} with n={n} yields p={p} < 1")
        if entry_law == "gaussian":
            spec = ensembles.gaussian_spec(n, p)
        else:
            spec = ensembles.counterexample_spec(n, p)
        est = estimate_moment(
            spec, statistic, r, trials, master_seed,
            workers=workers, trial_offset=k * trials,
        )
        rows.append(SweepRow(n=n, p=p, gamma=Fraction(p, n), estimate=est))
    return rows


def tail_estimate(
    spec: ensembles.DesignSpec,
    statistic: str,
    thresholds,
    trials: int,
    master_seed: int,
    workers: int = 1,
) -> list[tuple[float, float, float]]:
    """Empirical exceedance probabilities P(statistic >= t) with binomial
    standard errors, for an ascending list of thresholds."""
    if statistic not in STATISTICS:
        raise ValueError(f"statistic must be one of {STATISTICS}, got {statistic!r}")
    if trials < 100:
        raise ValueError("tail estimation needs trials >= 100")
    thresholds = [float(t) for t in thresholds]
    if any(b < a for a, b in zip(thresholds, thresholds[1:])):
        raise ValueError("thresholds must be ascending")
    raw = _collect(("stat", spec, statistic), trials, master_seed, 0, workers)[:, 0]
    out = []
    for t in thresholds:
        if math.isinf(t) and t > 0:
            hits = int(np.count_nonzero(raw > t))  # empty: +inf is never exceeded
        else:
            hits = int(np.count_nonzero(raw >= t))
        prob = hits / trials
        stderr = math.sqrt(prob * (1.0 - prob) / trials)
        out.append((t, prob, stderr))
    return out


def divergence_diagnostic(
    spec: ensembles.DesignSpec,
    statistic: str,
    trials: int,
    master_seed: int,
    workers: int = 1,
) -> MomentEstimate:
    """Running-mean diagnostic for statistics with infinite expectation.

    Growth of the running means across the powers-of-ten checkpoints (and of
    ``max_sample`` and the overflow counter) is reported as evidence of an
    infinite mean; no convergence claim is attached to the final value.
    """
    if spec.entry_law != "counterexample":
        raise ValueError("divergence diagnostics are defined for the counterexample law")
    if statistic not in ("sqrt_n_over_smin", "kappa", "inv_cov_error"):
        raise ValueError(f"statistic {statistic!r} not supported for divergence runs")
    return estimate_moment(spec, statistic, 1.0, trials, master_seed, workers=workers)


def inv_chisq_check(
    n: int, p: int, trials: int, master_seed: int, workers: int = 1
) -> InvChisqResult:
    """Kolmogorov-Smirnov check that e1'(Z'Z)^{-1}e1 follows the inverse
    chi-squared law with n - p + 1 degrees of freedom."""
    if n <= p + 1:
        raise ValueError("requires n > p + 1")
    if trials < 2:
        raise ValueError("trials must be >= 2")
    raw = _collect(("invchisq", n, p), trials, master_seed, 0, workers)[:, 0]
    df = n - p + 1
    ks = special.ks_statistic(raw, lambda u: special.inverse_chisq_cdf(u, df))
    crit = special.ks_critical_value_1pct(trials)
    return InvChisqResult(
        ks_statistic=ks,
        critical_value_1pct=crit,
        df=df,
        trials=trials,
        passed=ks < crit,
    )
