"""The edge-reveal process and its edge-count walk.

The process queries a uniform pair of {1..n} each step and resolves a
once-and-for-all Ber(p) bit per pair.  A 1-bit on two roots coalesces them
(uniform orientation, edge label = current forest edge count + 1); a 0-bit
on two roots is recorded as a verified non-edge of the complement graph;
everything else only grows the revealed graph.  The process stops as soon
as every pair of surviving roots is a verified non-edge, at which point the
forest is distributed exactly as a Kingman forest of G(n,p).

fast_walk skips the forest entirely and simulates only M_j, the number of
verified non-edges seen at the j-th coalescing time: per epoch a truncated
geometric adds fresh non-edges and a hypergeometric removes the ones hitting
the vertex that leaves.  The first index j with M_j >= C(n-j,2) stops the
walk; a strict crossing is the all-pairs-exhausted freeze (no vertex left
at the final step, tree count n-j+1), while an exact hit means termination
coincided with a coalescence (tree count n-j).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .forest import RootedLabeledForest
from .graph import Graph, pair_index
from .rngdist import (
    RngStream,
    geometric_array,
    sample_hypergeometric,
    sample_truncated_geometric,
)

__all__ = [
    "ErpState",
    "WalkTrace",
    "erp_step",
    "run_erp",
    "fast_walk",
    "fast_walk_tree_counts",
    "conditioned_state",
    "walk_trace_to_json",
    "walk_excess_decay_curve",
]


@lru_cache(maxsize=128)
def _pair_table(n: int) -> tuple[tuple[int, int], ...]:
    """All pairs (u,v), u < v, in linear-index order."""
    return tuple((u, v) for u in range(1, n) for v in range(u + 1, n + 1))


def _comb2(r: int) -> int:
    return r * (r - 1) // 2


class ErpState:
    """Mutable state of one edge-reveal run (single-owner; steps mutate it).

    The memo maps pair indices to their resolved bits.  In the default lean
    mode a pair is resolved only while both endpoints are roots (skipped
    queries cannot influence the forest or the complement graph); with
    full_coupling every queried pair is resolved and the leftover pairs are
    materialized at termination, making the revealed graph an exact G(n,p).
    """

    __slots__ = (
        "n",
        "p",
        "full_coupling",
        "step",
        "coalescences",
        "_is_root",
        "_root_count",
        "_parent",
        "_label",
        "_m",
        "_complement",
        "_bit_memo",
        "_m_trace",
        "_threshold",
    )

    def __init__(self, n: int, p: float, *, full_coupling: bool = False):
        if n < 1:
            raise ValueError(f"n must be >= 1, got {n}")
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"p must lie in [0,1], got {p}")
        self.n = n
        self.p = float(p)
        self.full_coupling = full_coupling
        self.step = 0
        self.coalescences = 0
        self._is_root = bytearray(n + 1)
        for v in range(1, n + 1):
            self._is_root[v] = 1
        self._root_count = n
        self._parent = [0] * (n + 1)
        self._label = [0] * (n + 1)
        self._m = 0
        self._complement: set[int] = set()
        self._bit_memo: dict[int, int] = {}
        self._m_trace: list[int] = [0]
        self._threshold = _comb2(n)

    # -- views ------------------------------------------------------------

    @property
    def roots(self) -> set[int]:
        return {v for v in range(1, self.n + 1) if self._is_root[v]}

    @property
    def root_count(self) -> int:
        return self._root_count

    @property
    def forest(self) -> RootedLabeledForest:
        return RootedLabeledForest(self.n, self._parent, self._label)

    @property
    def revealed(self) -> Graph:
        pairs = _pair_table(self.n)
        return Graph.from_edges(
            self.n, (pairs[i] for i, b in self._bit_memo.items() if b == 1)
        )

    @property
    def complement_edges(self) -> set[tuple[int, int]]:
        pairs = _pair_table(self.n)
        return {pairs[i] for i in self._complement}

    @property
    def complement_count(self) -> int:
        return len(self._complement)

    @property
    def bit_memo(self) -> dict[tuple[int, int], int]:
        pairs = _pair_table(self.n)
        return {pairs[i]: b for i, b in self._bit_memo.items()}

    @property
    def m_trace(self) -> list[int]:
        return list(self._m_trace)

    def is_terminated(self) -> bool:
        return len(self._complement) >= self._threshold

    def __repr__(self) -> str:
        return (
            f"ErpState(n={self.n}, p={self.p}, roots={self._root_count}, "
            f"step={self.step}, coalescences={self.coalescences})"
        )


def erp_step(state: ErpState, rng: RngStream) -> ErpState:
    """Query one uniform pair and apply the matching reveal rule in place."""
    n = state.n
    pairs = _pair_table(n)
    idx = int(rng.integers(0, len(pairs)))
    state.step += 1
    u, v = pairs[idx]
    is_root = state._is_root
    both = is_root[u] and is_root[v]
    bit = state._bit_memo.get(idx)
    if bit is None:
        if not (both or state.full_coupling):
            return state  # lean mode defers bits that cannot matter
        bit = 1 if rng.random() < state.p else 0
        state._bit_memo[idx] = bit
    if not both:
        return state  # reveal-only (rule ii) or an off-root non-edge (rule i)
    if bit == 0:
        state._complement.add(idx)
        return state
    # rule (iii): coalesce with a uniform orientation
    tail, head = (u, v) if rng.random() < 0.5 else (v, u)
    state._m += 1
    state._parent[tail] = head
    state._label[tail] = state._m
    is_root[tail] = 0
    state._root_count -= 1
    comp = state._complement
    if comp:
        for w in range(1, n + 1):
            if is_root[w]:
                comp.discard(pair_index(n, tail, w))
    state.coalescences += 1
    state._m_trace.append(len(comp))
    state._threshold = _comb2(state._root_count)
    return state


@dataclass(frozen=True)
class WalkTrace:
    """The verified-non-edge walk of one run, frozen at its first crossing.

    m[j] is the count at the j-th coalescing time; the final entry is the
    crossing value itself.  tree_count follows the crossing dichotomy: a
    strict crossing (mid-epoch freeze) leaves n - j_star + 1 trees, an exact
    hit of C(n - j_star, 2) means the last coalescence ended the run and
    n - j_star trees remain.
    """

    n: int
    p: float
    m: list[int] = field(compare=False)
    j_star: int | None
    tree_count: int


def _finish_trace(n: int, p: float, m_trace: list[int], coalescences: int, root_count: int) -> WalkTrace:
    threshold = _comb2(root_count)
    if m_trace[-1] == threshold:
        return WalkTrace(n=n, p=p, m=list(m_trace), j_star=coalescences, tree_count=root_count)
    return WalkTrace(
        n=n,
        p=p,
        m=list(m_trace) + [threshold],
        j_star=coalescences + 1,
        tree_count=root_count,
    )


def run_erp(
    n: int, p: float, rng: RngStream, *, full_coupling: bool = False
) -> tuple[ErpState, WalkTrace]:
    """Run the reveal process to termination.

    p = 0 is degenerate but well defined: no pair ever coalesces, and the
    run ends once every pair has been queried (tree count n).
    """
    state = ErpState(n, p, full_coupling=full_coupling)
    while not state.is_terminated():
        erp_step(state, rng)
    if full_coupling:
        for idx in range(len(_pair_table(n))):
            if idx not in state._bit_memo:
                state._bit_memo[idx] = 1 if rng.random() < p else 0
    trace = _finish_trace(n, p, state._m_trace, state.coalescences, state._root_count)
    return state, trace


def conditioned_state(
    n: int, surviving_roots: int, m_edges: int, rng: RngStream, *, p: float
) -> ErpState:
    """Sample the process state at a coalescing time with the given summary.

    Conditional on reaching surviving_roots roots with m_edges verified
    non-edges, the forest is uniform on F_{n,n-surviving_roots} and the
    complement graph is an independent uniform m_edges-subset of the root
    pairs; both are drawn exactly (the forest via a recursive forest plus a
    uniform fiber inversion).  The trace list restarts at this time, so its
    first entry is m_edges.
    """
    from .urrf import phi_fiber_sample, sample_urrf

    if not 1 <= surviving_roots <= n:
        raise ValueError(f"need 1 <= surviving_roots <= n, got {surviving_roots}")
    max_edges = _comb2(surviving_roots)
    if not 0 <= m_edges <= max_edges:
        raise ValueError(
            f"m_edges must lie in 0..C(surviving_roots,2) = {max_edges}, got {m_edges}"
        )
    state = ErpState(n, p)
    target = sample_urrf(n, surviving_roots, rng).forest
    f = phi_fiber_sample(target, rng)
    for v in range(1, n + 1):
        pv = f._parent[v]
        if pv:
            state._parent[v] = pv
            state._label[v] = f._label[v]
            state._is_root[v] = 0
    state._m = n - surviving_roots
    state._root_count = surviving_roots
    state.coalescences = n - surviving_roots
    state._threshold = max_edges

    roots = sorted(v for v in range(1, n + 1) if state._is_root[v])
    root_pairs = [pair_index(n, roots[a], roots[b]) for a in range(len(roots)) for b in range(a + 1, len(roots))]
    if m_edges:
        chosen = rng.generator.choice(len(root_pairs), size=m_edges, replace=False)
        state._complement = {root_pairs[int(i)] for i in chosen}
    for idx in state._complement:
        state._bit_memo[idx] = 0
    for v in range(1, n + 1):
        if state._parent[v]:
            state._bit_memo[pair_index(n, v, state._parent[v])] = 1
    state._m_trace = [m_edges]
    return state


# ---------------------------------------------------------------------------
# the fast walk
# ---------------------------------------------------------------------------


def fast_walk(n: int, p: float, rng: RngStream) -> WalkTrace:
    """Sample one M-walk (and hence one tree count) without touching a forest."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if not 0.0 < p < 1.0:
        raise ValueError(f"fast_walk needs 0 < p < 1, got {p}")
    m_trace = [0]
    m = 0
    k = 0
    while True:
        r = n - k
        pairs = _comb2(r)
        if m >= pairs:
            # equality: the k-th coalescence itself ended the run
            return WalkTrace(n=n, p=p, m=m_trace, j_star=k, tree_count=r)
        x = sample_truncated_geometric(p, pairs - m, rng)
        if m + x >= pairs:
            # freeze: every remaining root pair verified, nobody merged
            m_trace.append(pairs)
            return WalkTrace(n=n, p=p, m=m_trace, j_star=k + 1, tree_count=r)
        y = sample_hypergeometric(r - 2, m + x, pairs - 1, rng)
        m = m + x - y
        m_trace.append(m)
        k += 1


def fast_walk_tree_counts(n: int, p: float, trials: int, rng: RngStream) -> np.ndarray:
    """Tree counts of `trials` independent fast walks, vectorized across trials.

    Same per-epoch law as fast_walk (truncated geometric plus hypergeometric
    removal), with all lanes advanced one epoch at a time.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if not 0.0 < p < 1.0:
        raise ValueError(f"fast_walk needs 0 < p < 1, got {p}")
    if trials < 0:
        raise ValueError("trials must be >= 0")
    gen = rng.generator
    trees = np.zeros(trials, dtype=np.int64)
    alive = np.arange(trials)
    m = np.zeros(trials, dtype=np.int64)
    for k in range(n):
        r = n - k
        pairs = _comb2(r)
        done = m >= pairs
        if done.any():
            trees[alive[done]] = r
            alive = alive[~done]
            m = m[~done]
        if alive.size == 0:
            return trees
        x = np.minimum(geometric_array(p, alive.size, gen), pairs - m)
        mx = m + x
        frozen = mx >= pairs
        if frozen.any():
            trees[alive[frozen]] = r
            alive = alive[~frozen]
            mx = mx[~frozen]
        if alive.size == 0:
            return trees
        if r > 2:
            y = gen.hypergeometric(mx, (pairs - 1) - mx, r - 2)
            m = mx - y
        else:
            m = mx
    return trees


# ---------------------------------------------------------------------------
# serialization and report-only curves
# ---------------------------------------------------------------------------


def walk_trace_to_json(trace: WalkTrace, include_m: bool = False) -> dict:
    obj = {"n": trace.n, "p": trace.p, "j_star": trace.j_star, "tree_count": trace.tree_count}
    if include_m:
        obj["m"] = list(trace.m)
    return obj


def walk_excess_decay_curve(
    n: int, p: float, eps: float, ells: list[int], trials: int, rng: RngStream
) -> list[tuple[int, float]]:
    """Frequency that some index k <= n - ell sees M_k >= (1+eps)(1-p)(n-k)/p.

    Report-only diagnostic: the claim is that the frequency decays in ell,
    with constants the theory does not quantify, so no threshold is applied.
    """
    hits = np.zeros(n + 1, dtype=np.int64)  # hits[j] = runs whose first excess is at index j
    for _ in range(trials):
        trace = fast_walk(n, p, rng)
        m = trace.m
        first = None
        for k in range(n):
            mk = m[k] if k < len(m) else m[-1]
            if mk >= (1.0 + eps) * (1.0 - p) * (n - k) / p:
                first = k
                break
        if first is not None:
            hits[first] += 1
    prefix = np.cumsum(hits)
    out = []
    for ell in ells:
        kmax = n - ell
        freq = float(prefix[min(max(kmax, -1), n)]) / trials if kmax >= 0 else 0.0
        out.append((ell, freq))
    return out
