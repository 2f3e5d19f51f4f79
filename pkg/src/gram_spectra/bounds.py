"""Closed-form evaluators for the moment and tail bounds.

Every evaluator is a deterministic pure function returning a
:class:`BoundReport`: the bound's value, the named constants it was
assembled from, and a validity flag that records whether the bound's stated
preconditions hold for the given arguments.  Invalid reports carry
``value = inf`` (the bound is vacuous there) plus a human-readable reason.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

DEFAULT_K = 42.0 * math.e  # makes the geometric ratio 21e/K equal to 1/2
K_LOWER_LIMIT = 21.0 * math.e
DONGARRA_C_RANGE = (5.013, 6.414)
DEFAULT_DONGARRA_C = 6.414  # conservative upper end of the admissible range
EXPECTED_LOG_KAPPA_CONSTANT = 2.258


@dataclass(frozen=True)
class BoundReport:
    value: float
    constants: dict = field(default_factory=dict)
    valid: bool = True
    reason: str | None = None

    def __post_init__(self) -> None:
        if self.valid and not self.value >= 0.0:
            raise ValueError("bound values are non-negative")


def _invalid(reason: str, constants: dict | None = None) -> BoundReport:
    return BoundReport(value=math.inf, constants=constants or {}, valid=False, reason=reason)


def _neg_moment_constants(r: float, K: float) -> dict:
    return {
        "K": K,
        "c1": r * K ** (r / 2.0) / 2.0,
        "c2": K_LOWER_LIMIT / K,
        "c3": 27.0 * r * (3.0 * math.e) ** (r / 2.0 - 1.0) / (8.0 * K * math.sqrt(math.pi)),
    }


def min_sv_negative_moment_bound(n: int, p: int, r: float, K: float = DEFAULT_K) -> BoundReport:
    """Upper bound on E[s_min(X)^(-r)] for an n x p matrix with i.i.d.
    standard normal entries:

        c1(r)/(n-p-1)^(r/2) + c3(r) * c2^((n-p-r+1)/2) / (n-p-1)^((r-4)/2)

    with c1(r) = r K^(r/2) / 2, c2 = 21e/K, c3(r) = 27 r (3e)^(r/2-1) / (8 K sqrt(pi)).
    Requires n > p + r - 1 and K > 21e (so that c2 < 1).
    """
    if r < 0:
        return _invalid(f"moment order r must be >= 0, got {r}")
    if K <= K_LOWER_LIMIT:
        return _invalid(f"K must exceed 21e ~= {K_LOWER_LIMIT:.3f}, got {K}")
    consts = _neg_moment_constants(r, K)
    if not n > p + r - 1:
        return _invalid(f"requires n > p + r - 1 (n={n}, p={p}, r={r})", consts)
    gap = n - p - 1
    if gap <= 0:
        return _invalid(f"requires n - p - 1 > 0 (n={n}, p={p})", consts)
    lead = consts["c1"] / gap ** (r / 2.0)
    tail = consts["c3"] * consts["c2"] ** ((n - p - r + 1) / 2.0) / gap ** ((r - 4.0) / 2.0)
    return BoundReport(value=lead + tail, constants=consts)


def min_sv_normalized_moment_bound(n: int, p: int, r: float, K: float = DEFAULT_K) -> BoundReport:
    """Upper bound on E[(sqrt(n)/s_min(X))^r], the n-normalized form:

        c1(r)/(1 - p/n - 1/n)^(r/2)
          + (n-p-1)^2 * c2^((n-p-r+1)/2) * c3(r) / (1 - p/n - 1/n)^(r/2)
    """
    if r < 0:
        return _invalid(f"moment order r must be >= 0, got {r}")
    if K <= K_LOWER_LIMIT:
        return _invalid(f"K must exceed 21e ~= {K_LOWER_LIMIT:.3f}, got {K}")
    consts = _neg_moment_constants(r, K)
    if not n > p + r - 1:
        return _invalid(f"requires n > p + r - 1 (n={n}, p={p}, r={r})", consts)
    margin = 1.0 - p / n - 1.0 / n
    if margin <= 0.0:
        return _invalid(f"requires p/n + 1/n < 1 (n={n}, p={p})", consts)
    gap = n - p - 1
    lead = consts["c1"] / margin ** (r / 2.0)
    tail = gap**2 * consts["c2"] ** ((n - p - r + 1) / 2.0) * consts["c3"] / margin ** (r / 2.0)
    return BoundReport(value=lead + tail, constants=consts)


def max_sv_moment_bound(n: int, p: int, r: float) -> BoundReport:
    """Upper bound on E[s_max(X)^r] for i.i.d. standard normal entries:

        ct1(r) (sqrt(n) + sqrt(p))^r + ct2(r)

    with ct1(r) = r C^r / 2 (C = sqrt(2)) and ct2(r) = r Gamma(r/2) c^(-r)
    (c = 0.25).  The n-normalized form (divided by n^(r/2)) is reported under
    ``constants["normalized"]``.
    """
    if r <= 0:
        raise ValueError(f"moment order r must be positive, got {r}")
    if n < 1 or p < 1:
        raise ValueError("n and p must be >= 1")
    big_c = math.sqrt(2.0)
    small_c = 0.25
    ct1 = r * big_c**r / 2.0
    ct2 = r * math.gamma(r / 2.0) * small_c ** (-r)
    value = ct1 * (math.sqrt(n) + math.sqrt(p)) ** r + ct2
    consts = {
        "C": big_c,
        "c": small_c,
        "ct1": ct1,
        "ct2": ct2,
        "normalized": value / n ** (r / 2.0),
    }
    return BoundReport(value=value, constants=consts)


def dongarra_kappa_tail(n: int, p: int, t: float, C: float = DEFAULT_DONGARRA_C) -> BoundReport:
    """Tail bound on P(kappa(Z) >= t) for an n x p standard Gaussian matrix:

        (1/sqrt(2 pi)) * (C p / (7 t (n - p + 1)))^(n - p + 1)

    Stated for t >= n, n > p and C in [5.013, 6.414]; outside that region the
    formula value is still computed but flagged invalid.
    """
    lo, hi = DONGARRA_C_RANGE
    if not lo <= C <= hi:
        return _invalid(f"C must lie in [{lo}, {hi}], got {C}")
    exponent = n - p + 1
    consts = {"C": C, "exponent": exponent}
    if exponent < 1 or t <= 0:
        return _invalid(f"requires n >= p and t > 0 (n={n}, p={p}, t={t})", consts)
    value = (C * p / (7.0 * t * exponent)) ** exponent / math.sqrt(2.0 * math.pi)
    if t < n:
        return BoundReport(
            value=value, constants=consts, valid=False,
            reason=f"tail bound only stated for t >= n (t={t}, n={n})",
        )
    if not n > p:
        return BoundReport(
            value=value, constants=consts, valid=False,
            reason=f"tail bound stated for n > p (n={n}, p={p})",
        )
    return BoundReport(value=value, constants=consts)


def expected_log_kappa_bound(n: int, p: int) -> float:
    """Upper bound on E[log kappa(Z)]: log(n / (n - p + 1)) + 2.258.

    Stated for n, p >= 2 (and n >= p so the log argument is positive).
    """
    if n < 2 or p < 2:
        raise ValueError("expected-log bound requires n, p >= 2")
    if n - p + 1 <= 0:
        raise ValueError("expected-log bound requires n >= p")
    return math.log(n / (n - p + 1)) + EXPECTED_LOG_KAPPA_CONSTANT


def gd_iteration_upper(kappa: float, epsilon: float) -> float:
    """Iteration-count upper bound kappa^2 * log(1/epsilon) + 1."""
    if not kappa >= 1.0:
        raise ValueError(f"kappa must be >= 1, got {kappa}")
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"epsilon must lie in (0, 1), got {epsilon}")
    return kappa**2 * math.log(1.0 / epsilon) + 1.0


def gd_worstcase_lower(L: float, mu: float, epsilon: float) -> int:
    """Worst-case-start iteration lower bound ceil((L - mu)/(2 mu) * log(1/epsilon))."""
    if mu <= 0.0:
        raise ValueError(f"mu must be positive, got {mu}")
    if L < mu:
        raise ValueError(f"need L >= mu, got L={L}, mu={mu}")
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"epsilon must lie in (0, 1), got {epsilon}")
    return math.ceil((L - mu) / (2.0 * mu) * math.log(1.0 / epsilon))


def rv_smallball_bound(n: int, p: int, epsilon: float, C: float, c: float) -> float:
    """Sub-Gaussian small-ball tail bound (C epsilon)^(n-p+1) + exp(-c n),
    for comparison with empirical P(s_min <= epsilon (sqrt(n) - sqrt(p-1))).
    C and c are user-supplied (they depend on the sub-Gaussian norm)."""
    if n < p:
        raise ValueError("requires n >= p")
    if epsilon < 0.0 or C <= 0.0 or c <= 0.0:
        raise ValueError("requires epsilon >= 0 and C, c > 0")
    return (C * epsilon) ** (n - p + 1) + math.exp(-c * n)


def ridge_risk_upper(
    lambda_tilde: float,
    B_frob_sq: float,
    p: int,
    trace_sigma_eps: float,
    n: int,
    lambda_max_S: float,
    lambda_min_S: float,
) -> tuple[float, float]:
    """Bias and variance upper bounds for the ridge prediction risk:

        bias     <= lt^2 lam_max / (lam_min + lt)^2 * ||B||_F^2
        variance <= p tr(Sigma_eps)/n * lam_max^2 / (lam_min + lt)^2
    """
    if lambda_tilde <= 0.0:
        raise ValueError("lambda_tilde must be positive")
    if min(B_frob_sq, trace_sigma_eps, lambda_max_S, lambda_min_S) < 0.0:
        raise ValueError("matrix functionals must be non-negative")
    denom = (lambda_min_S + lambda_tilde) ** 2
    bias = lambda_tilde**2 * lambda_max_S / denom * B_frob_sq
    variance = p * trace_sigma_eps / n * lambda_max_S**2 / denom
    return bias, variance
