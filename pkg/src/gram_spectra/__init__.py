"""Monte Carlo toolkit for extreme singular values, condition numbers and
Gram-matrix experiments: reproducible random streams, self-contained dense
linear algebra, closed-form bound evaluators, and batch experiment drivers
for ridge risk, covariance estimation error and gradient-descent iteration
complexity."""

__version__ = "0.1.0"

from . import bounds, covest, ensembles, gramsolve, linalg, mc, ridge, rng, special
from .ensembles import CovarianceModel, DesignSpec
from .linalg import SpectralSummary, spectral_summary, svd, sym_eig
from .mc import MomentEstimate, estimate_moment, sweep_gamma
from .rng import DEFAULT_MASTER_SEED, StreamKey, stream

__all__ = [
    "__version__",
    "DEFAULT_MASTER_SEED",
    "CovarianceModel",
    "DesignSpec",
    "MomentEstimate",
    "SpectralSummary",
    "StreamKey",
    "bounds",
    "covest",
    "ensembles",
    "estimate_moment",
    "gramsolve",
    "linalg",
    "mc",
    "ridge",
    "rng",
    "special",
    "spectral_summary",
    "stream",
    "svd",
    "sweep_gamma",
    "sym_eig",
]
