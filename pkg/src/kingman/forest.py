"""Rooted forests on {1..n}: edge-labeled merge forests and plain parent maps.

A RootedLabeledForest orients every edge child->parent and carries edge
labels 1..m that strictly decrease along any root-to-leaf path (equivalently:
walking upward from a vertex, labels strictly increase).  Such forests are
exactly the states reachable by a sequence of root merges, with the edge
added at step t carrying label t; the enumerators below exploit that
correspondence directly.

PlainRootedForest drops the labels.  The "increasing" predicate (roots are
exactly {1..k} and every other vertex attaches to a smaller-numbered parent)
carves out the recursive-forest class that the relabeling map targets.
"""

from __future__ import annotations

import json
import math
from typing import Iterator, Sequence

__all__ = [
    "RootedLabeledForest",
    "PlainRootedForest",
    "InvalidMergeError",
    "merge",
    "height",
    "tree_sizes",
    "enumerate_labeled_forests",
    "enumerate_increasing_forests",
    "validate_labeled_forest",
    "is_increasing_forest",
    "labeled_forest_count",
    "increasing_forest_count",
    "forest_to_json",
    "forest_from_json",
    "canonical_forest_json",
]

from .rngdist import CapacityError

# Tight because the counts explode: |F_{7,6}| = 7!*6! = 3,628,800 already.
ENUMERATION_LIMIT_LABELED = 7
ENUMERATION_LIMIT_INCREASING = 8


class InvalidMergeError(ValueError):
    """A merge was attempted whose tail or head is not currently a root."""


class RootedLabeledForest:
    """Forest with parent pointers and decreasing edge labels.

    parent[v] == 0 marks a root; label[v] is the label of the edge
    v -> parent[v] (0 for roots).  Index 0 of both arrays is padding.
    """

    __slots__ = ("n", "_parent", "_label", "_m")

    def __init__(self, n: int, parent: Sequence[int], label: Sequence[int]):
        self.n = n
        self._parent = list(parent)
        self._label = list(label)
        self._m = sum(1 for v in range(1, n + 1) if self._parent[v])

    @classmethod
    def empty(cls, n: int) -> "RootedLabeledForest":
        if n < 1:
            raise ValueError(f"vertex count must be >= 1, got {n}")
        zeros = [0] * (n + 1)
        return cls(n, zeros, zeros)

    @classmethod
    def from_edges(cls, n: int, edges) -> "RootedLabeledForest":
        """Build from (tail, head, label) triples and validate."""
        parent = [0] * (n + 1)
        label = [0] * (n + 1)
        for tail, head, lab in edges:
            if parent[tail]:
                raise ValueError(f"vertex {tail} has two parents")
            parent[tail] = head
            label[tail] = lab
        f = cls(n, parent, label)
        validate_labeled_forest(f)
        return f

    @property
    def m(self) -> int:
        """Edge count."""
        return self._m

    def parent_of(self, v: int) -> int | None:
        self._check_vertex(v)
        return self._parent[v] or None

    def label_of(self, v: int) -> int | None:
        """Label of the edge from v up to its parent (None for a root)."""
        self._check_vertex(v)
        return self._label[v] or None

    def is_root(self, v: int) -> bool:
        self._check_vertex(v)
        return self._parent[v] == 0

    def roots(self) -> list[int]:
        return [v for v in range(1, self.n + 1) if self._parent[v] == 0]

    def edges_by_label(self) -> list[tuple[int, int, int]]:
        """(tail, head, label) triples sorted by label."""
        out = [(v, self._parent[v], self._label[v]) for v in range(1, self.n + 1) if self._parent[v]]
        out.sort(key=lambda e: e[2])
        return out

    def strip_labels(self) -> "PlainRootedForest":
        return PlainRootedForest(self.n, self._parent)

    def structure_key(self) -> tuple:
        """Hashable identity: (parents..., labels...)."""
        return tuple(self._parent[1:]) + tuple(self._label[1:])

    def _check_vertex(self, v: int) -> None:
        if not 1 <= v <= self.n:
            raise ValueError(f"vertex {v} out of range 1..{self.n}")

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, RootedLabeledForest)
            and self.n == other.n
            and self._parent == other._parent
            and self._label == other._label
        )

    def __hash__(self) -> int:
        return hash((self.n, self.structure_key()))

    def __repr__(self) -> str:
        return f"RootedLabeledForest(n={self.n}, edges={self.edges_by_label()})"


class PlainRootedForest:
    """Parent-map forest without edge labels; parent[v] == 0 marks a root."""

    __slots__ = ("n", "_parent")

    def __init__(self, n: int, parent: Sequence[int]):
        self.n = n
        self._parent = list(parent)

    @classmethod
    def from_parent_map(cls, n: int, parents: dict[int, int]) -> "PlainRootedForest":
        arr = [0] * (n + 1)
        for v, w in parents.items():
            arr[v] = w
        return cls(n, arr)

    def parent_of(self, v: int) -> int | None:
        self._check_vertex(v)
        return self._parent[v] or None

    def is_root(self, v: int) -> bool:
        self._check_vertex(v)
        return self._parent[v] == 0

    def roots(self) -> list[int]:
        return [v for v in range(1, self.n + 1) if self._parent[v] == 0]

    def structure_key(self) -> tuple:
        return tuple(self._parent[1:])

    def _check_vertex(self, v: int) -> None:
        if not 1 <= v <= self.n:
            raise ValueError(f"vertex {v} out of range 1..{self.n}")

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, PlainRootedForest)
            and self.n == other.n
            and self._parent == other._parent
        )

    def __hash__(self) -> int:
        return hash((self.n, self.structure_key()))

    def __repr__(self) -> str:
        edges = [(v, self._parent[v]) for v in range(1, self.n + 1) if self._parent[v]]
        return f"PlainRootedForest(n={self.n}, edges={edges})"


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------


def merge(f: RootedLabeledForest, tail: int, head: int) -> RootedLabeledForest:
    """Hang root `tail`'s tree under root `head`; the new edge gets label m+1."""
    f._check_vertex(tail)
    f._check_vertex(head)
    if tail == head:
        raise InvalidMergeError(f"cannot merge root {tail} with itself")
    if f._parent[tail] != 0:
        raise InvalidMergeError(f"tail {tail} is not a root")
    if f._parent[head] != 0:
        raise InvalidMergeError(f"head {head} is not a root")
    parent = list(f._parent)
    label = list(f._label)
    parent[tail] = head
    label[tail] = f._m + 1
    return RootedLabeledForest(f.n, parent, label)


def _depths(parent: Sequence[int], n: int) -> list[int]:
    depth = [-1] * (n + 1)
    for v in range(1, n + 1):
        chain = []
        w = v
        while w != 0 and depth[w] < 0:
            chain.append(w)
            w = parent[w]
        base = 0 if w == 0 else depth[w]
        for x in reversed(chain):
            base = base + 1 if parent[x] != 0 else 0
            # a root's depth is 0 regardless of position in the chain
            depth[x] = base
    return depth


def height(f, v: int | None = None) -> int:
    """Distance of v from its tree's root, or the forest-wide maximum."""
    parent = f._parent
    if v is not None:
        f._check_vertex(v)
        d = 0
        while parent[v] != 0:
            v = parent[v]
            d += 1
        return d
    if f.n == 0:
        return 0
    return max(_depths(parent, f.n)[1:])


def tree_sizes(f) -> tuple[int, ...]:
    """Sizes of the trees, one per root, as a descending tuple (a multiset)."""
    parent = f._parent
    n = f.n
    root_of = [0] * (n + 1)
    for v in range(1, n + 1):
        chain = []
        w = v
        while parent[w] != 0 and root_of[w] == 0:
            chain.append(w)
            w = parent[w]
        r = root_of[w] if root_of[w] else w
        for x in chain:
            root_of[x] = r
        root_of[v] = r
    counts: dict[int, int] = {}
    for v in range(1, n + 1):
        counts[root_of[v]] = counts.get(root_of[v], 0) + 1
    return tuple(sorted(counts.values(), reverse=True))


# ---------------------------------------------------------------------------
# validators
# ---------------------------------------------------------------------------


def validate_labeled_forest(f: RootedLabeledForest) -> None:
    """Raise ValueError unless f is a well-formed decreasing-label forest."""
    n, parent, label = f.n, f._parent, f._label
    m = f._m
    seen_labels = set()
    for v in range(1, n + 1):
        p = parent[v]
        if p == 0:
            if label[v] != 0:
                raise ValueError(f"root {v} carries an edge label")
            continue
        if not 1 <= p <= n or p == v:
            raise ValueError(f"bad parent {p} for vertex {v}")
        if not 1 <= label[v] <= m:
            raise ValueError(f"edge label {label[v]} at {v} outside 1..{m}")
        seen_labels.add(label[v])
    if len(seen_labels) != m:
        raise ValueError("edge labels are not a bijection onto 1..m")
    # acyclicity: every upward walk must reach a root within n steps
    for v in range(1, n + 1):
        w, steps = v, 0
        while parent[w] != 0:
            w = parent[w]
            steps += 1
            if steps > n:
                raise ValueError(f"cycle reachable from vertex {v}")
    # downward-decreasing labels == upward-increasing labels
    for v in range(1, n + 1):
        p = parent[v]
        if p != 0 and parent[p] != 0 and not label[v] < label[p]:
            raise ValueError(
                f"labels fail to decrease from the root: edge {v}->{p} has "
                f"label {label[v]} under parent edge label {label[p]}"
            )


def is_increasing_forest(f: PlainRootedForest, k: int | None = None) -> bool:
    """True iff roots are exactly {1..k} and every non-root attaches below itself."""
    roots = f.roots()
    kk = len(roots)
    if k is not None and kk != k:
        return False
    if roots != list(range(1, kk + 1)):
        return False
    return all(f._parent[v] < v for v in range(kk + 1, f.n + 1))


# ---------------------------------------------------------------------------
# enumeration
# ---------------------------------------------------------------------------


def labeled_forest_count(n: int, m: int) -> int:
    """|F_{n,m}| = n!(n-1)!/(k!(k-1)!) with k = n - m trees."""
    k = n - m
    return math.factorial(n) * math.factorial(n - 1) // (math.factorial(k) * math.factorial(k - 1))


def increasing_forest_count(n: int, k: int) -> int:
    """|R_{n,k}| = (n-1)!/(k-1)!."""
    return math.factorial(n - 1) // math.factorial(k - 1)


def enumerate_labeled_forests(n: int, m: int) -> list[RootedLabeledForest]:
    """All of F_{n,m}, generated as every sequence of m ordered root merges."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if not 0 <= m <= n - 1:
        raise ValueError(f"edge count must satisfy 0 <= m <= n-1, got m={m}")
    if n > ENUMERATION_LIMIT_LABELED:
        raise CapacityError(
            f"labeled-forest enumeration is limited to n <= {ENUMERATION_LIMIT_LABELED}"
        )
    out: list[RootedLabeledForest] = []
    parent = [0] * (n + 1)
    label = [0] * (n + 1)
    roots = list(range(1, n + 1))

    def extend(step: int) -> None:
        if step > m:
            out.append(RootedLabeledForest(n, parent, label))
            return
        for i in range(len(roots)):
            tail = roots[i]
            # drop tail from the root list by swap-with-last
            roots[i] = roots[-1]
            last = roots.pop()
            parent[tail] = 0  # placeholder, set per head below
            for head in roots:
                parent[tail] = head
                label[tail] = step
                extend(step + 1)
            parent[tail] = 0
            label[tail] = 0
            roots.append(last)
            roots[i] = tail
    extend(1)
    return out


def enumerate_increasing_forests(n: int, k: int) -> list[PlainRootedForest]:
    """All of R_{n,k}: roots {1..k}, each v > k choosing a parent in {1..v-1}."""
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    if n > ENUMERATION_LIMIT_INCREASING:
        raise CapacityError(
            f"increasing-forest enumeration is limited to n <= {ENUMERATION_LIMIT_INCREASING}"
        )
    out: list[PlainRootedForest] = []
    parent = [0] * (n + 1)

    def extend(v: int) -> None:
        if v > n:
            out.append(PlainRootedForest(n, parent))
            return
        for w in range(1, v):
            parent[v] = w
            extend(v + 1)
        parent[v] = 0
    extend(k + 1)
    return out


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------


def forest_to_json(f: RootedLabeledForest) -> dict:
    return {
        "n": f.n,
        "edges": [{"tail": t, "head": h, "label": l} for t, h, l in f.edges_by_label()],
    }


def forest_from_json(obj: dict) -> RootedLabeledForest:
    return RootedLabeledForest.from_edges(
        int(obj["n"]),
        [(int(e["tail"]), int(e["head"]), int(e["label"])) for e in obj["edges"]],
    )


def canonical_forest_json(f: RootedLabeledForest) -> str:
    return json.dumps(forest_to_json(f), separators=(",", ":"), sort_keys=True)
