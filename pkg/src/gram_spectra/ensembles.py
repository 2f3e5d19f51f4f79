"""Random matrix ensembles, covariance models and Gram matrices.

A :class:`CovarianceModel` is a symmetric PSD matrix together with certified
eigenvalue extremes ``(c_m, c_M)``; construction fails unless
``0 < c_m <= c_M``, so every model in circulation is uniformly
well-conditioned.  The square root and inverse are precomputed once (they
are reused across thousands of Monte Carlo trials).

Designs are drawn row-i.i.d.: ``gaussian`` rows are N(0, Sigma); the
``counterexample`` law has i.i.d. entries Z*U with Z Rademacher and U
following F(u) = 1/log(e/u), a bounded (hence sub-Gaussian) law whose mass
piles up near zero.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import linalg, rng

ENTRY_LAWS = ("gaussian", "counterexample")


@dataclass(frozen=True, eq=False)
class CovarianceModel:
    kind: str
    params: dict
    dimension: int
    matrix: np.ndarray
    c_m: float
    c_M: float
    sqrt_matrix: np.ndarray
    inv_matrix: np.ndarray

    def __post_init__(self) -> None:
        if not (0.0 < self.c_m <= self.c_M < np.inf):
            raise ValueError(
                f"covariance eigenvalues must satisfy 0 < c_m <= c_M < inf, "
                f"got c_m={self.c_m}, c_M={self.c_M}"
            )

    @property
    def trace(self) -> float:
        return float(np.trace(self.matrix))

    @property
    def is_isotropic(self) -> bool:
        """True when the model is an exact multiple of the identity."""
        return self.kind in ("identity", "scaled_identity")

    def to_config(self) -> dict:
        return {"kind": self.kind, "params": dict(self.params)}


def _diagonal_model(kind: str, params: dict, values: np.ndarray) -> CovarianceModel:
    values = np.asarray(values, dtype=np.float64)
    if values.ndim != 1 or values.size == 0:
        raise ValueError("diagonal covariance needs a non-empty 1-D value array")
    if np.any(values <= 0.0) or not np.all(np.isfinite(values)):
        raise ValueError("diagonal covariance values must be positive and finite")
    return CovarianceModel(
        kind=kind,
        params=params,
        dimension=values.size,
        matrix=np.diag(values),
        c_m=float(values.min()),
        c_M=float(values.max()),
        sqrt_matrix=np.diag(np.sqrt(values)),
        inv_matrix=np.diag(1.0 / values),
    )


def identity(p: int) -> CovarianceModel:
    return _diagonal_model("identity", {}, np.ones(p))


def scaled_identity(p: int, c: float) -> CovarianceModel:
    return _diagonal_model("scaled_identity", {"c": float(c)}, np.full(p, float(c)))


def diagonal(values) -> CovarianceModel:
    values = np.asarray(values, dtype=np.float64)
    return _diagonal_model("diagonal", {"values": values.tolist()}, values)


def _certified_model(kind: str, params: dict, matrix: np.ndarray) -> CovarianceModel:
    # Generic pathway: certify the eigenvalue extremes by an explicit
    # eigendecomposition and derive sqrt/inverse from it.
    lam, vecs = linalg.sym_eig(matrix)
    c_M, c_m = float(lam[0]), float(lam[-1])
    if c_m <= 0.0:
        raise ValueError(f"{kind} covariance is not positive definite (lambda_min={c_m})")
    sqrt_m = (vecs * np.sqrt(lam)) @ vecs.T
    inv_m = (vecs / lam) @ vecs.T
    return CovarianceModel(
        kind=kind,
        params=params,
        dimension=matrix.shape[0],
        matrix=matrix,
        c_m=c_m,
        c_M=c_M,
        sqrt_matrix=(sqrt_m + sqrt_m.T) / 2.0,
        inv_matrix=(inv_m + inv_m.T) / 2.0,
    )


def ar1(p: int, rho: float) -> CovarianceModel:
    """AR(1) correlation matrix: Sigma[i, j] = rho^|i-j|."""
    rho = float(rho)
    if not -1.0 < rho < 1.0:
        raise ValueError("ar1 requires |rho| < 1")
    idx = np.arange(p)
    matrix = rho ** np.abs(idx[:, None] - idx[None, :])
    return _certified_model("ar1", {"rho": rho}, matrix)


def from_matrix(matrix) -> CovarianceModel:
    """Accept any user-supplied symmetric positive definite matrix, certifying
    its eigenvalue extremes at construction."""
    m = linalg._as_matrix(matrix, "covariance matrix")
    if m.shape[0] != m.shape[1]:
        raise ValueError("covariance matrix must be square")
    return _certified_model("custom", {"matrix": m.tolist()}, m)


def covariance_from_config(kind: str, params: dict, p: int) -> CovarianceModel:
    if kind == "identity":
        return identity(p)
    if kind == "scaled_identity":
        return scaled_identity(p, params["c"])
    if kind == "diagonal":
        values = np.asarray(params["values"], dtype=np.float64)
        if values.size != p:
            raise ValueError(f"diagonal covariance has {values.size} values but p={p}")
        return diagonal(values)
    if kind == "ar1":
        return ar1(p, params["rho"])
    if kind == "custom":
        m = np.asarray(params["matrix"], dtype=np.float64)
        if m.shape != (p, p):
            raise ValueError(f"custom covariance has shape {m.shape} but p={p}")
        return from_matrix(m)
    raise ValueError(f"unknown covariance kind {kind!r}")


@dataclass(frozen=True, eq=False)
class DesignSpec:
    """Shape, covariance and entry law of one random design matrix."""

    n: int
    p: int
    covariance: CovarianceModel = field(repr=False)
    entry_law: str = "gaussian"

    def __post_init__(self) -> None:
        if self.n < 1 or self.p < 1:
            raise ValueError("n and p must be >= 1")
        if self.covariance.dimension != self.p:
            raise ValueError(
                f"covariance dimension {self.covariance.dimension} != p={self.p}"
            )
        if self.entry_law not in ENTRY_LAWS:
            raise ValueError(f"entry_law must be one of {ENTRY_LAWS}")
        if self.entry_law == "counterexample" and self.covariance.kind != "identity":
            raise ValueError(
                "the counterexample law has i.i.d. entries and is only valid "
                "with an identity covariance"
            )

    @property
    def gamma(self) -> Fraction:
        """Aspect ratio p/n as an exact rational."""
        return Fraction(self.p, self.n)

    def to_config(self) -> dict:
        return {
            "n": self.n,
            "p": self.p,
            "covariance": self.covariance.to_config(),
            "entry_law": self.entry_law,
        }

    @staticmethod
    def from_config(cfg: dict) -> "DesignSpec":
        cov_cfg = cfg.get("covariance", {"kind": "identity", "params": {}})
        cov = covariance_from_config(
            cov_cfg.get("kind", "identity"), cov_cfg.get("params", {}), cfg["p"]
        )
        return DesignSpec(
            n=cfg["n"],
            p=cfg["p"],
            covariance=cov,
            entry_law=cfg.get("entry_law", "gaussian"),
        )


def gaussian_spec(n: int, p: int, covariance: CovarianceModel | None = None) -> DesignSpec:
    return DesignSpec(n=n, p=p, covariance=covariance or identity(p))


def counterexample_spec(n: int, p: int) -> DesignSpec:
    return DesignSpec(n=n, p=p, covariance=identity(p), entry_law="counterexample")


def gaussian_iid(n: int, p: int, gen: np.random.Generator) -> np.ndarray:
    """n x p matrix of independent standard normals."""
    if n < 1 or p < 1:
        raise ValueError("n and p must be >= 1")
    return gen.standard_normal((n, p))


def correlated_gaussian(spec: DesignSpec, gen: np.random.Generator) -> np.ndarray:
    """Design with i.i.d. N(0, Sigma) rows, via Z @ sqrt(Sigma)."""
    if spec.entry_law != "gaussian":
        raise ValueError("correlated_gaussian requires a gaussian entry law")
    z = gaussian_iid(spec.n, spec.p, gen)
    if spec.covariance.kind == "identity":
        return z
    return z @ spec.covariance.sqrt_matrix


def counterexample_matrix(n: int, p: int, gen: np.random.Generator) -> np.ndarray:
    """i.i.d. entries Z*U: Rademacher sign times the heavy-near-zero law.

    All entries lie strictly inside (-1, 1).  Requires p >= 2 (the regime in
    which the condition-number divergence statement applies).
    """
    if p < 2:
        raise ValueError("counterexample_matrix requires p >= 2")
    if n < 1:
        raise ValueError("n must be >= 1")
    z = rng.rademacher(gen, (n, p)).astype(np.float64)
    u = rng.counterexample_u(gen, (n, p))
    return z * u


def draw_design(spec: DesignSpec, gen: np.random.Generator) -> np.ndarray:
    if spec.entry_law == "gaussian":
        return correlated_gaussian(spec, gen)
    return counterexample_matrix(spec.n, spec.p, gen)


def gram(x) -> np.ndarray:
    """Uncentered Gram matrix X^T X / n (symmetric PSD, p x p)."""
    m = linalg._as_matrix(x, "design matrix")
    s = m.T @ m / m.shape[0]
    return (s + s.T) / 2.0
