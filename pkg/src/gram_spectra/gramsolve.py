"""Gradient descent and conjugate gradient for Gram linear systems S theta = b.

``make_system`` builds the system from a design matrix and certifies the
spectral data (L, mu, rank) once by eigendecomposition; the solvers then
measure the iteration count T needed to shrink the objective gap by a
factor epsilon, for comparison with the closed-form iteration bounds.  The
per-step contraction of the gap is (1 - mu/L)^2 with step size 1/L; the
worst-case start theta* + alpha*v_min attains that factor exactly at every
step, which is what makes the iteration lower bound sharp.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import _kernels, bounds, ensembles, linalg, mc, rng

DEFAULT_MAX_ITER = 10**6

B_MODES = ("random_in_range", "from_regression")
INITS = ("random", "worstcase", "both")


@dataclass(frozen=True, eq=False)
class GramSystem:
    S: np.ndarray
    b: np.ndarray
    L: float  # largest eigenvalue
    mu: float  # smallest eigenvalue above the rank tolerance
    rank: int
    rank_tol: float
    eigenvalues: np.ndarray  # descending
    eigenvectors: np.ndarray  # columns match eigenvalues

    def __post_init__(self) -> None:
        if not 0.0 < self.mu <= self.L:
            raise ValueError("need 0 < mu <= L")

    @property
    def kappa_design(self) -> float:
        """Condition number of any design X with gram(X) = S: sqrt(L/mu)."""
        return math.sqrt(self.L / self.mu)


@dataclass
class GdTrace:
    gaps: np.ndarray  # objective gaps g(theta_t) - g(theta*), one per iterate
    t_epsilon: int  # first t with gap_t <= eps*gap_0; -1 when censored
    censored: bool
    q_factor: float  # 1 - mu/L
    step_size: float  # 1/L
    theta_final: np.ndarray | None = None  # last iterate
    recursion_residuals: np.ndarray | None = None  # per-step, when collected


def make_system(
    X, b_mode: str = "random_in_range", generator: np.random.Generator | None = None
) -> GramSystem:
    """Build S = gram(X) and a right-hand side guaranteed to lie in range(S).

    ``random_in_range`` sets b = S w for a standard normal w;
    ``from_regression`` sets b = X'y/n for a standard normal y (the normal
    equations of a random regression).  Either way b is in range(S) by
    construction.
    """
    if b_mode not in B_MODES:
        raise ValueError(f"b_mode must be one of {B_MODES}")
    if generator is None:
        raise ValueError("a generator is required to construct b")
    x = linalg._as_matrix(X, "design matrix")
    s = ensembles.gram(x)
    lam, vecs = linalg.sym_eig(s)
    tol = linalg.default_rank_tol(s.shape, max(float(lam[0]), 0.0))
    rank = int(np.count_nonzero(lam > tol))
    if rank == 0:
        raise ValueError("gram matrix has numerical rank 0")
    if b_mode == "random_in_range":
        w = generator.standard_normal(s.shape[0])
        b = s @ w
    else:
        y = generator.standard_normal(x.shape[0])
        b = x.T @ y / x.shape[0]
    return GramSystem(
        S=s,
        b=b,
        L=float(lam[0]),
        mu=float(lam[rank - 1]),
        rank=rank,
        rank_tol=tol,
        eigenvalues=lam,
        eigenvectors=vecs,
    )


def range_project(system: GramSystem, theta) -> np.ndarray:
    """Orthogonal projection onto the span of eigenvectors above the rank
    tolerance (idempotent; the identity map for full-rank systems)."""
    theta = np.asarray(theta, dtype=np.float64)
    vr = system.eigenvectors[:, : system.rank]
    return vr @ (vr.T @ theta)


def pinv_solution(system: GramSystem) -> np.ndarray:
    """Minimum-norm solution S^+ b; rejects b outside range(S)."""
    vr = system.eigenvectors[:, : system.rank]
    coeff = vr.T @ system.b
    b_norm = math.sqrt(float(system.b @ system.b))
    resid = system.b - vr @ coeff
    if b_norm > 0 and math.sqrt(float(resid @ resid)) > 1e-8 * b_norm:
        raise ValueError("right-hand side lies outside range(S)")
    return vr @ (coeff / system.eigenvalues[: system.rank])


def worst_case_init(system: GramSystem, alpha: float) -> np.ndarray:
    """Start theta* + alpha * v_min: the initial error sits entirely in the
    slowest eigendirection, so the gap contracts by exactly (1 - mu/L)^2
    per step."""
    if alpha == 0.0:
        raise ValueError("alpha must be nonzero")
    v_min = system.eigenvectors[:, system.rank - 1]
    return pinv_solution(system) + alpha * v_min


def gd_solve(
    system: GramSystem,
    theta0,
    epsilon: float,
    max_iter: int = DEFAULT_MAX_ITER,
    collect_residuals: bool = False,
) -> GdTrace:
    """Gradient descent with step 1/L from theta0 (projected onto range(S)).

    Stops at the first t with gap_t <= epsilon * gap_0 (t_epsilon); if
    max_iter updates do not reach that, the trace is censored and t_epsilon
    is the sentinel -1.  ``collect_residuals`` additionally records the
    relative residual of the error recursion e_{t+1} = (I - S/L) e_t at
    every step.
    """
    if not 0.0 < epsilon < 1.0:
        raise ValueError("epsilon must lie in (0, 1)")
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    theta = range_project(system, theta0)
    theta_star = pinv_solution(system)
    gaps = np.empty(max_iter + 1)
    resids = np.empty(max_iter if collect_residuals else 0)
    t_eps = _kernels.gd_loop(
        system.S,
        system.b,
        theta,
        theta_star,
        system.L,
        epsilon,
        max_iter,
        gaps,
        resids,
        collect_residuals,
    )
    end = max_iter if t_eps < 0 else t_eps
    return GdTrace(
        gaps=gaps[: end + 1].copy(),
        t_epsilon=t_eps,
        censored=t_eps < 0,
        q_factor=1.0 - system.mu / system.L,
        step_size=1.0 / system.L,
        theta_final=theta,
        recursion_residuals=resids[:end].copy() if collect_residuals else None,
    )


def cg_solve(
    system: GramSystem, theta0, epsilon: float, max_iter: int = DEFAULT_MAX_ITER
) -> GdTrace:
    """Conjugate gradient reference solver, measured on the same gap
    criterion as gradient descent."""
    if not 0.0 < epsilon < 1.0:
        raise ValueError("epsilon must lie in (0, 1)")
    theta = range_project(system, theta0)
    theta_star = pinv_solution(system)
    r = system.b - system.S @ theta
    d = r.copy()
    # gap = e'Se/2 with S e = S theta - b = -r
    gaps = [-0.5 * float((theta - theta_star) @ r)]
    eps_gap = epsilon * gaps[0]
    t_eps = 0 if gaps[0] <= eps_gap else -1
    t = 0
    rs = float(r @ r)
    while t_eps < 0 and t < max_iter:
        q = system.S @ d
        dq = float(d @ q)
        if dq <= 0.0 or rs == 0.0:
            break
        a = rs / dq
        theta += a * d
        r -= a * q
        t += 1
        gap = -0.5 * float((theta - theta_star) @ r)
        gaps.append(gap)
        if gap <= eps_gap:
            t_eps = t
            break
        rs_new = float(r @ r)
        d = r + (rs_new / rs) * d
        rs = rs_new
    return GdTrace(
        gaps=np.array(gaps),
        t_epsilon=t_eps,
        censored=t_eps < 0,
        q_factor=1.0 - system.mu / system.L,
        step_size=1.0 / system.L,
        theta_final=theta,
    )


@dataclass
class ComplexityRow:
    n: int
    p: int
    gamma: Fraction
    solver: str
    init: str
    epsilon: float
    trials: int
    mean_T: float  # censoring-aware: censored runs contribute max_iter (a lower bound)
    stderr_T: float
    mean_upper_bound: float  # mean of kappa^2 log(1/eps) + 1 over instances
    mean_lower_bound: float  # mean of ceil((L-mu)/(2mu) log(1/eps)) over instances
    censored_fraction: float


def _solve_T(system: GramSystem, theta0, epsilon, solver, max_iter) -> tuple[float, float]:
    run = gd_solve if solver == "gd" else cg_solve
    trace = run(system, theta0, epsilon, max_iter)
    if trace.censored:
        return float(max_iter), 1.0
    return float(trace.t_epsilon), 0.0


def _complexity_trial(task: tuple, gen: np.random.Generator) -> tuple:
    _, n, p, epsilon, solver, init, max_iter = task
    x = ensembles.gaussian_iid(n, p, gen)
    system = make_system(x, "random_in_range", gen)
    theta0 = gen.standard_normal(p)  # drawn even if unused, to keep streams aligned
    t_rand = cens_rand = math.nan
    t_wc = cens_wc = math.nan
    if init in ("random", "both"):
        t_rand, cens_rand = _solve_T(system, theta0, epsilon, solver, max_iter)
    if init in ("worstcase", "both"):
        t_wc, cens_wc = _solve_T(
            system, worst_case_init(system, 1.0), epsilon, solver, max_iter
        )
    upper = bounds.gd_iteration_upper(system.kappa_design, epsilon)
    lower = float(bounds.gd_worstcase_lower(system.L, system.mu, epsilon))
    return (t_rand, cens_rand, t_wc, cens_wc, upper, lower)


def complexity_experiment(
    n: int,
    gamma_grid,
    epsilon: float,
    trials: int,
    master_seed: int,
    solver: str = "gd",
    init: str = "both",
    max_iter: int = DEFAULT_MAX_ITER,
    workers: int = 1,
) -> list[ComplexityRow]:
    """Measured iteration counts versus the closed-form bounds, per aspect
    ratio.  Both inits of one trial share the same random system (paired
    comparison); censored runs enter the means at max_iter, so reported
    means are lower bounds wherever censoring occurred."""
    if solver not in ("gd", "cg"):
        raise ValueError("solver must be 'gd' or 'cg'")
    if init not in INITS:
        raise ValueError(f"init must be one of {INITS}")
    if trials < 2:
        raise ValueError("trials must be >= 2")
    grid = sorted(float(g) for g in gamma_grid)
    rows: list[ComplexityRow] = []
    for k, g in enumerate(grid):
        p = round(g * n)
        if p < 1:
            raise ValueError(f"gamma={g} with n={n} yields p={p} < 1")
        task = ("gd_trial", n, p, epsilon, solver, init, max_iter)
        vals = mc._collect(task, trials, master_seed, k * trials, workers)
        for name, t_col, c_col in (("random", 0, 1), ("worstcase", 2, 3)):
            if init not in (name, "both"):
                continue
            t_vals = vals[:, t_col]
            rows.append(
                ComplexityRow(
                    n=n,
                    p=p,
                    gamma=Fraction(p, n),
                    solver=solver,
                    init=name,
                    epsilon=epsilon,
                    trials=trials,
                    mean_T=float(np.sum(t_vals)) / trials,
                    stderr_T=rng.standard_error(t_vals),
                    mean_upper_bound=float(np.sum(vals[:, 4])) / trials,
                    mean_lower_bound=float(np.sum(vals[:, 5])) / trials,
                    censored_fraction=float(np.sum(vals[:, c_col])) / trials,
                )
            )
    return rows
