"""Seedable random streams and the distributions the coalescent machinery draws from.

Everything here is built on a counter-based generator (Philox) keyed by
``(seed, stream_id)``, so trial i of an experiment can use stream i and be
reproduced in isolation, in parallel, on any platform.  The samplers are
exact: geometric by inversion, hypergeometric by an inverse-cdf table walk
for small populations (delegating to numpy's rejection sampler above a
population of 500), negative binomial as a sum of geometrics, and the flat
Dirichlet via normalized exponentials.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

import numpy as np

__all__ = [
    "RngStream",
    "BoundParams",
    "BoundValues",
    "CapacityError",
    "sample_bernoulli",
    "sample_geometric",
    "sample_truncated_geometric",
    "sample_hypergeometric",
    "sample_negative_binomial",
    "sample_dirichlet_uniform",
    "eval_bounds",
]

_UINT64_MAX = 2**64 - 1

# Populations at or below this use the exact inverse-cdf table; above it the
# expected table length would dominate, so draws go to numpy's rejection code.
HYPERGEOMETRIC_TABLE_LIMIT = 500


class CapacityError(Exception):
    """Raised when a request exceeds a documented size guard."""


class RngStream:
    """A deterministic random stream identified by (seed, stream_id).

    Distinct stream_ids index statistically independent streams of the same
    seed (they are separate Philox key blocks, not jumps of one another), so
    per-trial streams can be drawn from concurrently without coordination.
    """

    __slots__ = ("seed", "stream_id", "_gen")

    def __init__(self, seed: int, stream_id: int = 0):
        for name, value in (("seed", seed), ("stream_id", stream_id)):
            if not isinstance(value, (int, np.integer)):
                raise ValueError(f"{name} must be an integer, got {value!r}")
            if not 0 <= value <= _UINT64_MAX:
                raise ValueError(f"{name} must fit in an unsigned 64-bit word")
        self.seed = int(seed)
        self.stream_id = int(stream_id)
        key = np.array([self.seed, self.stream_id], dtype=np.uint64)
        self._gen = np.random.Generator(np.random.Philox(key=key))

    @property
    def generator(self) -> np.random.Generator:
        """The underlying numpy Generator (for bulk array draws)."""
        return self._gen

    def random(self, size=None):
        """Uniform float64 draw(s) in [0, 1)."""
        return self._gen.random(size)

    def integers(self, low: int, high: int, size=None):
        """Uniform integer draw(s) in [low, high), exact (no modulo bias)."""
        return self._gen.integers(low, high, size=size)

    def __repr__(self) -> str:
        return f"RngStream(seed={self.seed}, stream_id={self.stream_id})"


# ---------------------------------------------------------------------------
# scalar samplers
# ---------------------------------------------------------------------------


def _check_probability(p: float, *, allow_zero: bool, allow_one: bool = True) -> float:
    p = float(p)
    lo_ok = p > 0.0 or (allow_zero and p == 0.0)
    hi_ok = p < 1.0 or (allow_one and p == 1.0)
    if not (lo_ok and hi_ok and math.isfinite(p)):
        raise ValueError(f"probability out of range: {p!r}")
    return p


def sample_bernoulli(p: float, rng: RngStream) -> int:
    """One Ber(p) bit."""
    p = _check_probability(p, allow_zero=True)
    return 1 if rng.random() < p else 0


def sample_geometric(p: float, rng: RngStream) -> int:
    """Number of failures before the first success in Ber(p) trials.

    pmf (1-p)^k p on k = 0, 1, 2, ...; sampled by inversion of a single
    uniform, floor(log(1-U) / log(1-p)).
    """
    p = _check_probability(p, allow_zero=False)
    if p == 1.0:
        return 0
    u = rng.random()
    return int(math.log1p(-u) / math.log1p(-p))


def sample_truncated_geometric(p: float, cap: int, rng: RngStream) -> int:
    """min(Geo(p), cap): a geometric whose mass at >= cap collapses onto cap."""
    if cap < 0:
        raise ValueError(f"cap must be >= 0, got {cap}")
    return min(sample_geometric(p, rng), int(cap))


def _check_hypergeometric_params(draws: int, successes: int, population: int) -> None:
    if population < 0:
        raise ValueError("population must be >= 0")
    if not 0 <= successes <= population:
        raise ValueError(f"need 0 <= successes <= population, got {successes}/{population}")
    if not 0 <= draws <= population:
        raise ValueError(f"need 0 <= draws <= population, got {draws}/{population}")


@lru_cache(maxsize=4096)
def _hypergeometric_table(draws: int, successes: int, population: int):
    """Support start and cumulative (unnormalized) pmf of HG(draws, successes, population)."""
    lo = max(0, draws + successes - population)
    hi = min(draws, successes)
    weights = np.empty(hi - lo + 1, dtype=np.float64)
    w = 1.0
    weights[0] = w
    for j in range(lo, hi):
        w *= (successes - j) * (draws - j) / ((j + 1) * (population - successes - draws + j + 1))
        weights[j - lo + 1] = w
    return lo, np.cumsum(weights)


def sample_hypergeometric(draws: int, successes: int, population: int, rng: RngStream) -> int:
    """Successes seen when drawing `draws` items without replacement.

    The urn holds `population` items of which `successes` are marked.
    """
    draws, successes, population = int(draws), int(successes), int(population)
    _check_hypergeometric_params(draws, successes, population)
    lo = max(0, draws + successes - population)
    hi = min(draws, successes)
    if lo == hi:
        return lo
    if population > HYPERGEOMETRIC_TABLE_LIMIT:
        return int(rng.generator.hypergeometric(successes, population - successes, draws))
    start, cum = _hypergeometric_table(draws, successes, population)
    u = rng.random() * cum[-1]
    return start + int(np.searchsorted(cum, u, side="right"))


def sample_negative_binomial(r: int, p: float, rng: RngStream) -> int:
    """Total failures before the r-th success: a sum of r Geo(p) draws."""
    r = int(r)
    if r < 1:
        raise ValueError(f"r must be >= 1, got {r}")
    p = _check_probability(p, allow_zero=False)
    if p == 1.0:
        return 0
    log_q = math.log1p(-p)
    u = rng.random(r)
    return int(np.sum(np.floor(np.log1p(-u) / log_q)))


def sample_dirichlet_uniform(k: int, rng: RngStream) -> np.ndarray:
    """A uniform point on the (k-1)-simplex: normalized standard exponentials."""
    k = int(k)
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    while True:
        # 1 - U is in (0, 1], keeping the logs finite.
        e = -np.log1p(-rng.random(k))
        total = e.sum()
        if total > 0.0:
            return e / total


# ---------------------------------------------------------------------------
# batch samplers
#
# Array-shaped companions of the scalar samplers above, implementing the same
# laws, for the verification suites that need 10^4..10^6 draws per step.  Each
# is cross-checked against its scalar twin in the test suite.
# ---------------------------------------------------------------------------


def geometric_array(p: float, size: int, gen: np.random.Generator) -> np.ndarray:
    """`size` iid Geo(p) draws (failure count convention), as int64."""
    p = _check_probability(p, allow_zero=False)
    if p == 1.0:
        return np.zeros(size, dtype=np.int64)
    u = gen.random(size)
    return np.floor(np.log1p(-u) / math.log1p(-p)).astype(np.int64)


def hypergeometric_array(
    draws: int, successes: np.ndarray, population: int, gen: np.random.Generator
) -> np.ndarray:
    """One HG(draws, successes[i], population) draw per lane."""
    if draws == 0 or population == 0:
        return np.zeros(len(successes), dtype=np.int64)
    return gen.hypergeometric(successes, population - successes, draws).astype(np.int64)


# ---------------------------------------------------------------------------
# concentration bound evaluators
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BoundParams:
    """Inputs to the reference concentration bounds.

    delta: relative deviation in (0,1); mu: mean of the binomial-like sum
    being bounded; r: negative-binomial shape (number of successes awaited);
    p: the success probability.
    """

    delta: float
    mu: float
    r: int
    p: float

    def __post_init__(self):
        if not 0.0 < self.delta < 1.0:
            raise ValueError(f"delta must lie in (0,1), got {self.delta}")
        if self.mu < 0.0:
            raise ValueError(f"mu must be >= 0, got {self.mu}")
        if self.r < 1:
            raise ValueError(f"r must be >= 1, got {self.r}")
        if not 0.0 < self.p < 1.0:
            raise ValueError(f"p must lie in (0,1), got {self.p}")


class BoundValues(NamedTuple):
    """The three reference tail bounds, in the order they are always reported."""

    sum_two_sided: float  # 2 exp(-delta^2 mu / 3)
    negbin_upper: float  # exp(-((1-p) delta)^2 r / 6)
    negbin_lower: float  # exp(-((1-p) delta)^2 r / (3 (1 - delta (1-p))))


def eval_bounds(params: BoundParams) -> BoundValues:
    """Evaluate the three concentration bounds at the given parameters."""
    d, mu, r, p = params.delta, params.mu, params.r, params.p
    q = 1.0 - p
    return BoundValues(
        sum_two_sided=2.0 * math.exp(-d * d * mu / 3.0),
        negbin_upper=math.exp(-((q * d) ** 2) * r / 6.0),
        negbin_lower=math.exp(-((q * d) ** 2) * r / (3.0 * (1.0 - d * q))),
    )
