"""The Kingman coalescent on an arbitrary graph.

Starting from the empty spanning forest, repeatedly pick a uniform edge of G
whose endpoints are both roots, orient it uniformly at random, and merge the
tail's tree under the head.  The process stops when the surviving roots form
an independent set; the result is the Kingman forest of G.
"""

from __future__ import annotations

from dataclasses import dataclass

from .forest import RootedLabeledForest
from .graph import Graph, pairs_from_indices
from .rngdist import RngStream

__all__ = ["CoalescentRun", "run_kingman", "count_trees"]

# Below this many surviving roots the valid candidate set is rebuilt exactly
# after every merge (O(roots^2) scans are cheap); above it, stale entries are
# lazily rejected and swap-removed from a flat candidate list.
_EXACT_PHASE_ROOTS = 24


@dataclass(frozen=True)
class CoalescentRun:
    """One complete coalescent run on a fixed graph."""

    graph: Graph
    final_forest: RootedLabeledForest
    tree_count: int
    forest_trajectory: list[RootedLabeledForest] | None = None

    def __post_init__(self):
        if self.tree_count != len(self.final_forest.roots()):
            raise ValueError("tree_count does not match the final forest's roots")


def count_trees(run: CoalescentRun) -> int:
    """Number of trees of the final forest (= n minus the number of merges)."""
    return run.tree_count


def run_kingman(g: Graph, rng: RngStream, record_trajectory: bool = False) -> CoalescentRun:
    """Run the coalescent on g to termination.

    Candidate edges (both endpoints roots) are drawn uniformly; a single
    buffered uniform supplies both the edge index and its orientation.
    Entries invalidated by earlier merges are rejected and dropped, which
    keeps the draw uniform over the valid set.
    """
    n = g.n
    parent = [0] * (n + 1)
    label = [0] * (n + 1)
    is_root = bytearray(n + 1)
    for v in range(1, n + 1):
        is_root[v] = 1
    root_count = n
    merges = 0
    trajectory: list[RootedLabeledForest] | None = [] if record_trajectory else None

    gen = rng.generator
    buf = gen.random(64)
    bi = 0

    def next_uniform() -> float:
        nonlocal buf, bi
        if bi == len(buf):
            buf = gen.random(64)
            bi = 0
        u = buf[bi]
        bi += 1
        return u

    def do_merge(u: int, v: int, orient: int) -> None:
        nonlocal root_count, merges
        tail, head = (u, v) if orient else (v, u)
        merges += 1
        parent[tail] = head
        label[tail] = merges
        is_root[tail] = 0
        root_count -= 1
        if record_trajectory:
            trajectory.append(RootedLabeledForest(n, parent, label))

    # Lazy phase: flat list of graph edges, stale entries removed when drawn.
    terminal = False
    if root_count > _EXACT_PHASE_ROOTS:
        idx = g.edge_indices()
        us, vs = pairs_from_indices(n, idx)
        cand = list(zip(us.tolist(), vs.tolist()))
        while root_count > _EXACT_PHASE_ROOTS and cand:
            two_l = 2 * len(cand)
            t = int(next_uniform() * two_l)
            if t >= two_l:
                t = two_l - 1
            i = t >> 1
            u, v = cand[i]
            cand[i] = cand[-1]
            cand.pop()
            if is_root[u] and is_root[v]:
                do_merge(u, v, t & 1)
        # an exhausted list means no edge joins two roots (entries only leave
        # when used by a merge or observed stale, and staleness is permanent)
        terminal = not cand

    # Exact phase: rebuild the valid candidate list after every merge.
    mask = g.mask
    while not terminal and root_count > 1:
        roots = [v for v in range(1, n + 1) if is_root[v]]
        valid = []
        for a in range(len(roots)):
            u = roots[a]
            row = (u - 1) * n - u * (u - 1) // 2 - u - 1
            for b in range(a + 1, len(roots)):
                v = roots[b]
                if (mask >> (row + v)) & 1:
                    valid.append((u, v))
        if not valid:
            break
        two_l = 2 * len(valid)
        t = int(next_uniform() * two_l)
        if t >= two_l:
            t = two_l - 1
        u, v = valid[t >> 1]
        do_merge(u, v, t & 1)

    final = RootedLabeledForest(n, parent, label)
    return CoalescentRun(
        graph=g,
        final_forest=final,
        tree_count=root_count,
        forest_trajectory=trajectory,
    )
