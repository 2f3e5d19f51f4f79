"""Deterministic, splittable random streams and the entry-level samplers.

Every Monte Carlo trial owns its own generator, derived from a
``(master_seed, trial_index)`` pair through a counter-based bit generator
(Philox).  Distinct pairs give statistically independent streams; the same
pair gives a bit-identical stream no matter how trials are scheduled across
workers, so experiments reproduce exactly for any worker count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

DEFAULT_MASTER_SEED = 20240601

# Smallest positive double; used to keep heavy-tailed uniforms strictly
# positive when exp(1 - 1/q) underflows.
_TINY = np.nextafter(0.0, 1.0)

_U64_MAX = 2**64


@dataclass(frozen=True)
class StreamKey:
    """Identity of one random stream: a master seed plus a trial index."""

    master_seed: int
    trial_index: int

    def __post_init__(self) -> None:
        for name in ("master_seed", "trial_index"):
            v = getattr(self, name)
            if not isinstance(v, (int, np.integer)) or not 0 <= v < _U64_MAX:
                raise ValueError(f"{name} must be an unsigned 64-bit integer, got {v!r}")

    def generator(self) -> np.random.Generator:
        """Independent generator for this key.

        The (seed, trial) pair is used directly as the 128-bit Philox key,
        so stream construction is pure counter-mode keying: no shared state,
        no sequential seeding, order-independent across workers.
        """
        key = np.array([self.master_seed, self.trial_index], dtype=np.uint64)
        return np.random.Generator(np.random.Philox(key=key))


def stream(master_seed: int, trial_index: int) -> np.random.Generator:
    """Shorthand for ``StreamKey(master_seed, trial_index).generator()``."""
    return StreamKey(master_seed, trial_index).generator()


def standard_normal(gen: np.random.Generator, size=None):
    """Draw N(0,1) variates (exact ziggurat rejection sampling, not a table
    approximation, so the tails are exact to double precision)."""
    return gen.standard_normal(size)


def rademacher(gen: np.random.Generator, size=None):
    """Draw from {-1, +1} with equal probability."""
    return gen.integers(0, 2, size=size) * 2 - 1


def u_from_q(q):
    """Inverse CDF of the heavy-near-zero law: u = exp(1 - 1/q).

    Maps Uniform(0,1] quantiles to a variable with distribution function
    F(u) = 1/log(e/u) on (0,1].  q -> 0+ maps to the smallest positive
    double rather than 0 (documented edge: exp underflows below ~1e-308).
    """
    u = np.exp(1.0 - 1.0 / np.asarray(q, dtype=np.float64))
    return np.maximum(u, _TINY)


def counterexample_u(gen: np.random.Generator, size=None):
    """Draw from the sub-Gaussian-but-heavy-near-zero law F(u) = 1/log(e/u).

    Uses inverse-CDF sampling with uniforms drawn from (0, 1]: exact 0 is
    excluded to keep 1/q finite, exact 1 is allowed and maps to u = 1.
    """
    q = 1.0 - gen.random(size)
    return u_from_q(q)


def counterexample_cdf(u):
    """Distribution function F(u) = 1/log(e/u) for u in (0,1], clamped at the
    support ends (0 below, 1 at and above u = 1)."""
    u = np.asarray(u, dtype=np.float64)
    out = np.zeros_like(u)
    inside = (u > 0.0) & (u < 1.0)
    out[inside] = 1.0 / (1.0 - np.log(u[inside]))
    out[u >= 1.0] = 1.0
    if out.ndim == 0:
        return float(out)
    return out


def resolve_master_seed(seed: int | None) -> int:
    """Return ``seed`` or the documented default (20240601)."""
    if seed is None:
        return DEFAULT_MASTER_SEED
    if not 0 <= int(seed) < _U64_MAX:
        raise ValueError(f"master seed must fit in 64 unsigned bits, got {seed}")
    return int(seed)


def standard_error(values: np.ndarray) -> float:
    """Sample standard deviation divided by sqrt(count); nan for < 2 values."""
    m = values.shape[0]
    if m < 2:
        return math.nan
    mean = float(np.sum(values)) / m
    var = float(np.sum((values - mean) ** 2)) / (m - 1)
    return math.sqrt(var / m)
