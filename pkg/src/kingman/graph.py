"""Simple undirected graphs on {1..n} with bit-packed edge membership.

Unordered pairs {u,v} (u < v) are linearized row-major: all pairs (1,*),
then (2,*), and so on.  That single ordering is shared by the G(n,p)
sampler, the coalescent's candidate arrays, and the exact oracle's edge
masks, so a pair index means the same thing everywhere.
"""

from __future__ import annotations

import json
from functools import lru_cache
from typing import Iterable, Iterator

import numpy as np

from .rngdist import RngStream

__all__ = [
    "Graph",
    "num_pairs",
    "pair_index",
    "pair_from_index",
    "sample_gnp",
    "add_edge",
    "degree",
    "graph_to_json",
    "graph_from_json",
    "canonical_graph_json",
]


def num_pairs(n: int) -> int:
    """Number of unordered pairs on {1..n}."""
    return n * (n - 1) // 2


@lru_cache(maxsize=256)
def _row_starts(n: int) -> np.ndarray:
    """Index of the first pair (u, u+1) for each u, 1-based rows in slot u-1."""
    u = np.arange(1, n + 1, dtype=np.int64)
    return (u - 1) * n - u * (u - 1) // 2


def pair_index(n: int, u: int, v: int) -> int:
    """Linear index of the unordered pair {u,v} in the row-major order."""
    if u == v:
        raise ValueError(f"self-loop {{{u},{v}}} has no pair index")
    if u > v:
        u, v = v, u
    if not (1 <= u and v <= n):
        raise ValueError(f"pair {{{u},{v}}} out of range for n={n}")
    return (u - 1) * n - u * (u - 1) // 2 + (v - u - 1)


def pair_from_index(n: int, idx: int) -> tuple[int, int]:
    """Inverse of pair_index."""
    if not 0 <= idx < num_pairs(n):
        raise ValueError(f"pair index {idx} out of range for n={n}")
    starts = _row_starts(n)
    u = int(np.searchsorted(starts, idx, side="right"))
    return u, idx - int(starts[u - 1]) + u + 1


def pairs_from_indices(n: int, idx: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized pair_from_index: arrays (u, v) for an index array."""
    starts = _row_starts(n)
    u = np.searchsorted(starts, idx, side="right")
    v = idx - starts[u - 1] + u + 1
    return u.astype(np.int64), v.astype(np.int64)


class Graph:
    """Immutable simple graph; membership is one bit per linearized pair."""

    __slots__ = ("n", "_mask", "_m", "_edge_idx")

    def __init__(self, n: int, mask: int = 0, m: int | None = None, _edge_idx=None):
        if n < 1:
            raise ValueError(f"vertex count must be >= 1, got {n}")
        self.n = int(n)
        self._mask = mask
        self._m = mask.bit_count() if m is None else m
        self._edge_idx = _edge_idx

    @classmethod
    def empty(cls, n: int) -> "Graph":
        return cls(n)

    @classmethod
    def complete(cls, n: int) -> "Graph":
        np_ = num_pairs(n)
        return cls(n, (1 << np_) - 1, np_)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        mask = 0
        for u, v in edges:
            mask |= 1 << pair_index(n, u, v)
        return cls(n, mask)

    @property
    def edge_count(self) -> int:
        return self._m

    @property
    def mask(self) -> int:
        """The raw membership bitmask (bit i = pair i present)."""
        return self._mask

    def _check_vertex(self, v: int) -> None:
        if not 1 <= v <= self.n:
            raise ValueError(f"vertex {v} out of range 1..{self.n}")

    def has_edge(self, u: int, v: int) -> bool:
        self._check_vertex(u)
        self._check_vertex(v)
        if u == v:
            return False
        return bool((self._mask >> pair_index(self.n, u, v)) & 1)

    def edge_indices(self) -> np.ndarray:
        """Sorted linear indices of the present edges."""
        if self._edge_idx is None:
            nbits = num_pairs(self.n)
            if nbits == 0 or self._mask == 0:
                self._edge_idx = np.empty(0, dtype=np.int64)
            else:
                raw = self._mask.to_bytes((nbits + 7) // 8, "little")
                bits = np.unpackbits(np.frombuffer(raw, dtype=np.uint8), bitorder="little")
                self._edge_idx = np.flatnonzero(bits[:nbits]).astype(np.int64)
        return self._edge_idx

    def edges(self) -> Iterator[tuple[int, int]]:
        """Edges as (u, v) with u < v, in canonical (lexicographic) order."""
        for idx in self.edge_indices():
            yield pair_from_index(self.n, int(idx))

    def __eq__(self, other) -> bool:
        return isinstance(other, Graph) and self.n == other.n and self._mask == other._mask

    def __hash__(self) -> int:
        return hash((self.n, self._mask))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, edges={self._m})"


def sample_gnp(n: int, p: float, rng: RngStream) -> Graph:
    """One Erdos-Renyi draw: each pair is an edge independently with probability p."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0,1], got {p}")
    npairs = num_pairs(n)
    if npairs == 0:
        return Graph(n)
    bools = rng.random(npairs) < p
    packed = np.packbits(bools, bitorder="little").tobytes()
    mask = int.from_bytes(packed, "little")
    return Graph(n, mask, int(bools.sum()), np.flatnonzero(bools).astype(np.int64))


def add_edge(g: Graph, e: tuple[int, int]) -> Graph:
    """G + e: a copy with edge e present.  Adding an existing edge is a no-op."""
    u, v = e
    if u == v:
        raise ValueError(f"self-loop {{{u},{v}}} is not a valid edge")
    g._check_vertex(u)
    g._check_vertex(v)
    bit = 1 << pair_index(g.n, u, v)
    if g._mask & bit:
        return g
    return Graph(g.n, g._mask | bit, g._m + 1)


def degree(g: Graph, v: int) -> int:
    """Number of edges incident to v."""
    g._check_vertex(v)
    return sum(1 for w in range(1, g.n + 1) if w != v and (g._mask >> pair_index(g.n, v, w)) & 1)


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------


def graph_to_json(g: Graph) -> dict:
    return {"n": g.n, "edges": [[u, v] for u, v in g.edges()]}


def graph_from_json(obj: dict) -> Graph:
    return Graph.from_edges(int(obj["n"]), [(int(u), int(v)) for u, v in obj["edges"]])


def canonical_graph_json(g: Graph) -> str:
    """Bit-exact canonical text form (fixed key order, no whitespace)."""
    return json.dumps(graph_to_json(g), separators=(",", ":"), sort_keys=True)
