"""Exact small-n ground truth for the coalescent's tree count.

The tree count's law on a fixed graph only ever depends on the set of
surviving roots: the forest hanging under each root never influences which
merges remain possible.  That makes an exact DP over root subsets possible:
a subset with no internal edge is terminal and contributes its size, any
other subset averages over the uniform edge choice and the uniform choice
of which endpoint keeps its root.

Summing the per-graph law against G(n,p) edge-subset weights gives the
exact law of the tree count on a random graph.  All arithmetic is in
`fractions.Fraction`; a float p is a dyadic rational, so even float inputs
stay exact end to end.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .graph import Graph, num_pairs, pair_from_index
from .rngdist import CapacityError

__all__ = [
    "ExactDistribution",
    "exact_c_distribution",
    "exact_cnp_distribution",
    "exact_mean_c",
    "edge_addition_report",
    "distribution_to_json",
]

FIXED_GRAPH_LIMIT = 14  # 2^n memo states
GNP_LIMIT = 6  # 2^C(n,2) graphs; 32768 at n = 6


@dataclass(frozen=True)
class ExactDistribution:
    """A finitely supported law with exact rational masses."""

    support: tuple[int, ...]
    probabilities: tuple[Fraction, ...]

    def __post_init__(self):
        if list(self.support) != sorted(set(self.support)):
            raise ValueError("support must be sorted and duplicate-free")
        if len(self.support) != len(self.probabilities):
            raise ValueError("support/probability length mismatch")
        if sum(self.probabilities, Fraction(0)) != 1:
            raise ValueError("probabilities must sum to 1 exactly")
        if any(p < 0 for p in self.probabilities):
            raise ValueError("negative probability")

    @classmethod
    def from_mapping(cls, masses: dict[int, Fraction]) -> "ExactDistribution":
        support = tuple(sorted(c for c, pr in masses.items() if pr != 0))
        return cls(support, tuple(masses[c] for c in support))

    def prob(self, value: int) -> Fraction:
        try:
            return self.probabilities[self.support.index(value)]
        except ValueError:
            return Fraction(0)

    def as_dict(self) -> dict[int, Fraction]:
        return dict(zip(self.support, self.probabilities))

    def as_float_dict(self) -> dict[int, float]:
        return {c: float(pr) for c, pr in zip(self.support, self.probabilities)}

    def mean(self) -> Fraction:
        return sum((c * pr for c, pr in zip(self.support, self.probabilities)), Fraction(0))


@lru_cache(maxsize=32)
def _pair_endpoints(n: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    us, vs = [], []
    for i in range(num_pairs(n)):
        u, v = pair_from_index(n, i)
        us.append(u)
        vs.append(v)
    return tuple(us), tuple(vs)


@lru_cache(maxsize=8)
def _subset_pair_masks(n: int) -> list[int]:
    """For every vertex subset (bitmask, bit v-1 = vertex v): the mask of pairs inside it."""
    out = [0] * (1 << n)
    for s in range(1, 1 << n):
        low = (s & -s).bit_length()  # lowest vertex in s
        rest = s ^ (1 << (low - 1))
        out[s] = out[rest] | _pairs_joining(rest, low, n)
    return out


def _pairs_joining(rest: int, v: int, n: int) -> int:
    """Mask of the pairs joining vertex v to each vertex of the subset `rest`."""
    mask = 0
    w = rest
    while w:
        b = w & -w
        w ^= b
        other = b.bit_length()
        lo, hi = (v, other) if v < other else (other, v)
        mask |= 1 << ((lo - 1) * n - lo * (lo - 1) // 2 + (hi - lo - 1))
    return mask


def _c_distribution_on(n: int, smask: int, emask: int, subset_pairs, us, vs, memo) -> dict[int, Fraction]:
    key = (smask, emask)
    hit = memo.get(key)
    if hit is not None:
        return hit
    if emask == 0:
        res = {smask.bit_count(): Fraction(1)}
        memo[key] = res
        return res
    cnt = emask.bit_count()
    w = Fraction(1, 2 * cnt)
    res: dict[int, Fraction] = {}
    mm = emask
    while mm:
        b = mm & -mm
        mm ^= b
        i = b.bit_length() - 1
        for drop in (us[i], vs[i]):
            s2 = smask & ~(1 << (drop - 1))
            e2 = emask & subset_pairs[s2]
            for c, pr in _c_distribution_on(n, s2, e2, subset_pairs, us, vs, memo).items():
                res[c] = res.get(c, Fraction(0)) + pr * w
    memo[key] = res
    return res


def exact_c_distribution(g: Graph) -> ExactDistribution:
    """Exact tree-count law of the coalescent on a fixed graph."""
    n = g.n
    if n > FIXED_GRAPH_LIMIT:
        raise CapacityError(f"exact_c_distribution is limited to n <= {FIXED_GRAPH_LIMIT}")
    us, vs = _pair_endpoints(n)
    subset_pairs = _subset_pair_masks(n)
    full = (1 << n) - 1
    masses = _c_distribution_on(n, full, g.mask, subset_pairs, us, vs, {})
    return ExactDistribution.from_mapping(masses)


def _as_fraction_probability(p) -> Fraction:
    pf = Fraction(p)  # exact for float, int and Fraction inputs
    if not 0 <= pf <= 1:
        raise ValueError(f"p must lie in [0,1], got {p!r}")
    return pf


def exact_cnp_distribution(n: int, p) -> ExactDistribution:
    """Exact tree-count law on G(n,p): the per-graph DP mixed over all graphs."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if n > GNP_LIMIT:
        raise CapacityError(f"exact_cnp_distribution is limited to n <= {GNP_LIMIT}")
    pf = _as_fraction_probability(p)
    qf = 1 - pf
    npairs = num_pairs(n)
    p_pow = [Fraction(1)] * (npairs + 1)
    q_pow = [Fraction(1)] * (npairs + 1)
    for i in range(1, npairs + 1):
        p_pow[i] = p_pow[i - 1] * pf
        q_pow[i] = q_pow[i - 1] * qf
    us, vs = _pair_endpoints(n)
    subset_pairs = _subset_pair_masks(n)
    full = (1 << n) - 1
    memo: dict = {}
    total: dict[int, Fraction] = {}
    for gmask in range(1 << npairs):
        e = gmask.bit_count()
        weight = p_pow[e] * q_pow[npairs - e]
        if weight == 0:
            continue
        for c, pr in _c_distribution_on(n, full, gmask, subset_pairs, us, vs, memo).items():
            total[c] = total.get(c, Fraction(0)) + pr * weight
    return ExactDistribution.from_mapping(total)


def exact_mean_c(n: int, p) -> float:
    """Expected tree count on G(n,p), exact under the hood."""
    return float(exact_cnp_distribution(n, p).mean())


def edge_addition_report(n: int) -> dict:
    """Exploratory exact check: does adding one edge ever raise the mean tree count?

    Scans every graph on {1..n} and every absent edge.  Report-only: the
    stochastic-dominance version is an open question, so this returns the
    worst observed change instead of asserting anything.
    """
    if n > 5:
        raise CapacityError("edge_addition_report is limited to n <= 5")
    us, vs = _pair_endpoints(n)
    subset_pairs = _subset_pair_masks(n)
    full = (1 << n) - 1
    npairs = num_pairs(n)
    memo: dict = {}

    def mean_of(gmask: int) -> Fraction:
        masses = _c_distribution_on(n, full, gmask, subset_pairs, us, vs, memo)
        return sum((c * pr for c, pr in masses.items()), Fraction(0))

    worst = Fraction(-10**9)
    worst_case = None
    checked = 0
    for gmask in range(1 << npairs):
        base = mean_of(gmask)
        for i in range(npairs):
            if (gmask >> i) & 1:
                continue
            delta = mean_of(gmask | (1 << i)) - base  # > 0 would be a violation
            checked += 1
            if delta > worst:
                worst = delta
                worst_case = (gmask, i)
    return {
        "n": n,
        "pairs_checked": checked,
        "worst_mean_increase": float(worst),
        "monotone": worst <= 0,
        "worst_case": worst_case,
    }


def distribution_to_json(dist: ExactDistribution) -> dict:
    return {"support": list(dist.support), "prob": [float(pr) for pr in dist.probabilities]}


def distribution_to_json_text(dist: ExactDistribution) -> str:
    # key order is part of the printed contract: support first, then prob
    return json.dumps(distribution_to_json(dist), separators=(",", ":"))
