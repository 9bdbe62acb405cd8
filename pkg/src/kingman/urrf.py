"""Uniform random recursive trees and forests, and their couplings.

A recursive forest with k roots starts as the edgeless forest on {1..k};
vertex v (for v = k+1..n) attaches to a uniform vertex of {1..v-1}.  Every
forest in R_{n,k} arises with the same probability 1/((n-1)!/(k-1)!), so
"uniform attachment" and "uniform over R_{n,k}" are the same law.

The relabeling map phi sends an edge-labeled merge forest to a recursive
forest: sorted roots become 1..k and a vertex whose upward edge carries
label l becomes n - l + 1.  phi is an n!/k!-to-1 surjection, and
phi_fiber_sample inverts it uniformly, which is how the package samples a
uniform edge-labeled forest without enumeration.

Scalar operations draw one value per rng call; the *_batch helpers at the
bottom vectorize the same update laws across runs for the big verification
sweeps, and are cross-checked against the scalar forms in the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .forest import PlainRootedForest, RootedLabeledForest, is_increasing_forest, validate_labeled_forest
from .rngdist import RngStream

__all__ = [
    "UrrfSample",
    "UrnState",
    "sample_urrt",
    "sample_urrf",
    "phi",
    "phi_fiber_sample",
    "sample_kingman_forest_structure",
    "polya_urn",
    "delete_root_block_edges",
    "urrf_parents_batch",
    "increasing_forest_depths_batch",
    "increasing_forest_root_ids_batch",
    "polya_urn_counts_batch",
]


@dataclass(frozen=True)
class UrrfSample:
    """A recursive forest draw plus the attachment history that built it."""

    n: int
    k: int
    forest: PlainRootedForest
    attachment_order: list[tuple[int, int]] = field(default_factory=list)


@dataclass(frozen=True)
class UrnState:
    """A Polya urn after some steps: one initial ball per colour."""

    k: int
    counts: list[int]

    def __post_init__(self):
        if self.k != len(self.counts) or any(c < 1 for c in self.counts):
            raise ValueError("urn counts must hold >= 1 ball per colour")


def sample_urrf(n: int, k: int, rng: RngStream) -> UrrfSample:
    """Uniform recursive forest: roots {1..k}, uniform attachment above."""
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    parent = [0] * (n + 1)
    order: list[tuple[int, int]] = []
    for v in range(k + 1, n + 1):
        w = int(rng.integers(1, v))
        parent[v] = w
        order.append((v, w))
    return UrrfSample(n, k, PlainRootedForest(n, parent), order)


def sample_urrt(n: int, rng: RngStream) -> UrrfSample:
    """Uniform recursive tree: the k = 1 forest."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    return sample_urrf(n, 1, rng)


def phi(f: RootedLabeledForest) -> PlainRootedForest:
    """Relabel a merge forest onto its recursive-forest shape.

    Sorted roots map to 1..k; a non-root whose upward edge has label l maps
    to n - l + 1.  Edge labels are dropped; the image lands in R_{n,k}.
    """
    validate_labeled_forest(f)
    n = f.n
    rename = [0] * (n + 1)
    roots = f.roots()
    for new, old in enumerate(roots, start=1):
        rename[old] = new
    for v in range(1, n + 1):
        lab = f._label[v]
        if lab:
            rename[v] = n - lab + 1
    parent = [0] * (n + 1)
    for v in range(1, n + 1):
        p = f._parent[v]
        if p:
            parent[rename[v]] = rename[p]
    return PlainRootedForest(n, parent)


def phi_fiber_sample(target: PlainRootedForest, rng: RngStream) -> RootedLabeledForest:
    """Uniform preimage of `target` under phi.

    In target coordinates the edge below vertex v must carry label n - v + 1;
    the fiber is then swept out by the n!/k! vertex relabelings that keep the
    root images in ascending order, one of which is drawn uniformly.
    """
    if not is_increasing_forest(target):
        raise ValueError("phi_fiber_sample target must be an increasing forest")
    n = target.n
    k = len(target.roots())
    sigma = rng.generator.permutation(n) + 1  # sigma[j-1] = new name of target vertex j
    sigma[:k] = np.sort(sigma[:k])
    parent = [0] * (n + 1)
    label = [0] * (n + 1)
    for v in range(k + 1, n + 1):
        child = int(sigma[v - 1])
        parent[child] = int(sigma[target._parent[v] - 1])
        label[child] = n - v + 1
    return RootedLabeledForest(n, parent, label)


def sample_kingman_forest_structure(n: int, tree_count: int, rng: RngStream) -> PlainRootedForest:
    """Shape of a coalescent forest conditioned on its tree count.

    Given the tree count the forest is uniform on F_{n,n-c}, and its shape
    under phi is exactly URRF_c(n); sampling the recursive forest is the
    cheap route to structure statistics at large n.
    """
    if not 1 <= tree_count <= n:
        raise ValueError(f"need 1 <= tree_count <= n, got {tree_count}, n={n}")
    return sample_urrf(n, tree_count, rng).forest


def polya_urn(k: int, steps: int, rng: RngStream) -> UrnState:
    """Run a flat Polya urn (one starting ball per colour) for `steps` additions."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if steps < 0:
        raise ValueError(f"steps must be >= 0, got {steps}")
    counts = [1] * k
    total = k
    for _ in range(steps):
        u = rng.random() * total
        acc = 0
        chosen = k - 1
        for i in range(k):
            acc += counts[i]
            if u < acc:
                chosen = i
                break
        counts[chosen] += 1
        total += 1
    return UrnState(k, counts)


def delete_root_block_edges(t: UrrfSample, c: int) -> PlainRootedForest:
    """Remove every tree edge with both endpoints in {1..c}.

    On a recursive tree the restriction to {1..c} is a subtree containing
    root 1, so exactly c - 1 edges go away and the result has roots 1..c.
    """
    if t.k != 1:
        raise ValueError("delete_root_block_edges expects a single-tree sample (k=1)")
    if not 1 <= c <= t.n:
        raise ValueError(f"need 1 <= c <= n, got c={c}, n={t.n}")
    src = t.forest
    parent = [0] * (t.n + 1)
    for v in range(c + 1, t.n + 1):
        parent[v] = src._parent[v]
    return PlainRootedForest(t.n, parent)


# ---------------------------------------------------------------------------
# batch forms
# ---------------------------------------------------------------------------


def urrf_parents_batch(n: int, k: int, runs: int, gen: np.random.Generator) -> np.ndarray:
    """Parent matrix of `runs` URRF_k(n) draws; column v holds parent(v), 0 for roots."""
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    parents = np.zeros((runs, n + 1), dtype=np.int32)
    for v in range(k + 1, n + 1):
        parents[:, v] = gen.integers(1, v, size=runs, dtype=np.int32)
    return parents


def increasing_forest_depths_batch(parents: np.ndarray, root_cutoff) -> np.ndarray:
    """Per-vertex depths when every vertex <= root_cutoff[r] counts as a root.

    Works for any parent matrix with parent(v) < v, so one matrix serves both
    the tree itself (cutoff 1) and its root-block-deleted forest (cutoff c).
    """
    runs, n1 = parents.shape
    n = n1 - 1
    cutoff = np.broadcast_to(np.asarray(root_cutoff, dtype=np.int32), (runs,))
    depths = np.zeros((runs, n + 1), dtype=np.int32)
    rows = np.arange(runs)
    for v in range(2, n + 1):
        up = depths[rows, parents[:, v]] + 1
        depths[:, v] = np.where(v <= cutoff, 0, up)
    return depths


def increasing_forest_root_ids_batch(parents: np.ndarray, k: int) -> np.ndarray:
    """Root (in {1..k}) of every vertex, by pointer doubling on the parent matrix."""
    runs, n1 = parents.shape
    n = n1 - 1
    reach = parents.astype(np.int32).copy()
    for v in range(1, min(k, n) + 1):
        reach[:, v] = v
    hops = 1
    while hops < n:
        reach = np.take_along_axis(reach, reach, axis=1)
        hops *= 2
    return reach


def polya_urn_counts_batch(k: int, steps: int, runs: int, gen: np.random.Generator) -> np.ndarray:
    """Final counts of `runs` independent flat urns after `steps` additions."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    counts = np.ones((runs, k), dtype=np.int64)
    if k == 1:
        counts[:, 0] += steps
        return counts
    rows = np.arange(runs)
    for t in range(steps):
        u = gen.random(runs) * (k + t)
        if k == 2:
            first = u < counts[:, 0]
            counts[rows, np.where(first, 0, 1)] += 1
        else:
            chosen = (u[:, None] >= np.cumsum(counts, axis=1)).sum(axis=1)
            counts[rows, chosen] += 1
    return counts
