"""The reveal process, its conditional resampler, and the fast M-walk."""

import math
from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kingman.edge_reveal import (
    ErpState,
    conditioned_state,
    fast_walk,
    fast_walk_tree_counts,
    run_erp,
    walk_excess_decay_curve,
    walk_trace_to_json,
)
from kingman.forest import validate_labeled_forest
from kingman.oracle import exact_cnp_distribution
from kingman.rngdist import RngStream
from kingman.stats import chi_square_test, chi_square_two_sample


def _comb2(r):
    return r * (r - 1) // 2


def test_state_validation():
    with pytest.raises(ValueError):
        ErpState(0, 0.5)
    with pytest.raises(ValueError):
        ErpState(3, -0.1)


def test_run_terminates_with_independent_roots():
    for seed in range(5):
        state, trace = run_erp(8, 0.45, RngStream(20, seed))
        assert state.is_terminated()
        f = state.forest
        validate_labeled_forest(f)
        roots = sorted(f.roots())
        assert trace.tree_count == len(roots)
        comp = state.complement_edges
        for i, u in enumerate(roots):
            for v in roots[i + 1 :]:
                assert (u, v) in comp  # every surviving root pair was verified absent


def test_m_trace_stays_below_root_pair_budget():
    for seed in range(5):
        state, _ = run_erp(9, 0.4, RngStream(21, seed))
        for j, mj in enumerate(state.m_trace):
            assert 0 <= mj <= _comb2(9 - j)


def test_lean_mode_one_bits_are_exactly_the_merges():
    for seed in range(5):
        state, trace = run_erp(8, 0.5, RngStream(22, seed))
        ones = [pair for pair, b in state.bit_memo.items() if b == 1]
        assert len(ones) == 8 - trace.tree_count
        f = state.forest
        forest_edges = {tuple(sorted((t, h))) for t, h, _ in f.edges_by_label()}
        assert set(ones) == forest_edges


def test_full_coupling_materializes_every_pair():
    state, trace = run_erp(7, 0.4, RngStream(23, 0), full_coupling=True)
    memo = state.bit_memo
    assert len(memo) == _comb2(7)
    g = state.revealed
    # the forest is a subgraph of the revealed graph and its roots are
    # independent within it
    for t, h, _ in state.forest.edges_by_label():
        assert g.has_edge(t, h)
    roots = state.forest.roots()
    assert all(not g.has_edge(u, v) for i, u in enumerate(roots) for v in roots[i + 1 :])


def test_full_coupling_revealed_graph_is_gnp():
    n, p, trials = 6, 0.35, 20_000
    rng = RngStream(24, 0)
    pairs = _comb2(n)
    obs = Counter(run_erp(n, p, rng, full_coupling=True)[0].revealed.edge_count for _ in range(trials))
    pmf = {m: math.comb(pairs, m) * p**m * (1 - p) ** (pairs - m) for m in range(pairs + 1)}
    assert chi_square_test(obs, pmf, trials, threshold=0.01).passed


def test_degenerate_p_zero():
    state, trace = run_erp(5, 0.0, RngStream(25, 0))
    assert trace.tree_count == 5
    assert state.complement_count == _comb2(5)
    assert state.forest.m == 0


def test_degenerate_p_one():
    state, trace = run_erp(5, 1.0, RngStream(25, 1))
    assert trace.tree_count == 1
    assert state.forest.m == 4


def test_single_vertex_is_born_terminated():
    state, trace = run_erp(1, 0.7, RngStream(25, 2))
    assert state.step == 0
    assert trace.tree_count == 1 and trace.j_star == 0


def test_conditioned_state_invariants():
    rng = RngStream(26, 0)
    state = conditioned_state(10, 4, 3, rng, p=0.5)
    f = state.forest
    validate_labeled_forest(f)
    roots = sorted(f.roots())
    assert len(roots) == 4 and f.m == 6
    assert state.root_count == 4
    assert state.complement_count == 3
    assert state.m_trace == [3]
    root_set = set(roots)
    for u, v in state.complement_edges:
        assert u in root_set and v in root_set
    # memo holds exactly the forced bits: forest edges 1, complement pairs 0
    memo = state.bit_memo
    assert sum(b for b in memo.values()) == 6
    assert sum(1 for b in memo.values() if b == 0) == 3


def test_conditioned_state_validation():
    rng = RngStream(26, 1)
    with pytest.raises(ValueError):
        conditioned_state(5, 0, 0, rng, p=0.5)
    with pytest.raises(ValueError):
        conditioned_state(5, 6, 0, rng, p=0.5)
    with pytest.raises(ValueError):
        conditioned_state(5, 3, 4, rng, p=0.5)  # C(3,2) = 3 caps m_edges
    with pytest.raises(ValueError):
        conditioned_state(5, 3, -1, rng, p=0.5)


def test_conditioned_state_joint_law():
    # n=4 with 3 surviving roots: the forest is uniform on the 12 one-edge
    # forests and the single verified non-edge is uniform on the 3 root
    # pairs, independently -- 36 equally likely joint outcomes
    rng = RngStream(27, 0)
    trials = 36_000
    obs = Counter()
    for _ in range(trials):
        state = conditioned_state(4, 3, 1, rng, p=0.5)
        comp = next(iter(state.complement_edges))
        obs[state.forest.structure_key() + comp] += 1
    assert len(obs) == 36
    pmf = {key: 1.0 / 36.0 for key in obs}
    assert chi_square_test(obs, pmf, trials, threshold=0.01).passed


def test_conditioned_state_steps_like_the_process():
    rng = RngStream(27, 1)
    state = conditioned_state(12, 5, 2, rng, p=0.4)
    from kingman.edge_reveal import erp_step

    while not state.is_terminated():
        erp_step(state, rng)
    validate_labeled_forest(state.forest)
    assert state.root_count <= 5
    assert state.m_trace[0] == 2


def test_fast_walk_validation():
    rng = RngStream(28, 0)
    with pytest.raises(ValueError):
        fast_walk(0, 0.5, rng)
    with pytest.raises(ValueError):
        fast_walk(5, 0.0, rng)
    with pytest.raises(ValueError):
        fast_walk(5, 1.0, rng)
    with pytest.raises(ValueError):
        fast_walk_tree_counts(5, 0.0, 10, rng)


def test_fast_walk_two_vertex_law():
    # with two vertices the sole pair coalesces before being verified absent
    # with probability exactly p
    p, trials = 0.37, 100_000
    rng = RngStream(28, 1)
    obs = Counter(fast_walk(2, p, rng).tree_count for _ in range(trials))
    assert chi_square_test(obs, {1: p, 2: 1 - p}, trials, threshold=0.01).passed


@given(
    n=st.integers(min_value=1, max_value=40),
    p=st.floats(min_value=0.05, max_value=0.95),
    seed=st.integers(min_value=0, max_value=2**32),
)
@settings(max_examples=120, deadline=None)
def test_fast_walk_trace_shape(n, p, seed):
    trace = fast_walk(n, p, RngStream(seed, 0))
    j = trace.j_star
    assert len(trace.m) == j + 1
    assert trace.m[0] == 0
    # strict inequality before the crossing, crossing at j
    for i in range(j):
        assert trace.m[i] < _comb2(n - i)
    assert trace.m[j] >= _comb2(n - j)
    if trace.m[j] == _comb2(n - j):
        assert trace.tree_count == n - j  # the crossing was itself a merge
    else:
        assert trace.tree_count == n - j + 1  # mid-epoch freeze
    assert 1 <= trace.tree_count <= n


def test_batch_walk_matches_scalar_law():
    n, p, trials = 6, 0.4, 30_000
    rng = RngStream(29, 0)
    scalar = Counter(fast_walk(n, p, rng).tree_count for _ in range(trials))
    batch = Counter(fast_walk_tree_counts(n, p, trials, RngStream(29, 1)).tolist())
    assert chi_square_two_sample(scalar, batch, threshold=0.01).passed


def test_batch_walk_matches_exact_law():
    n, p, trials = 5, 0.5, 50_000
    exact = exact_cnp_distribution(n, p).as_float_dict()
    batch = Counter(fast_walk_tree_counts(n, p, trials, RngStream(29, 2)).tolist())
    assert chi_square_test(batch, exact, trials, threshold=0.01).passed


def test_batch_walk_empty():
    assert fast_walk_tree_counts(5, 0.5, 0, RngStream(29, 3)).tolist() == []


def test_walk_trace_json():
    trace = fast_walk(6, 0.5, RngStream(30, 0))
    obj = walk_trace_to_json(trace)
    assert set(obj) == {"n", "p", "j_star", "tree_count"}
    obj = walk_trace_to_json(trace, include_m=True)
    assert obj["m"] == list(trace.m)


def test_excess_decay_curve_shape():
    ells = [0, 2, 5, 10]
    curve = walk_excess_decay_curve(30, 0.3, 0.1, ells, 200, RngStream(31, 0))
    assert [ell for ell, _ in curve] == ells
    freqs = [f for _, f in curve]
    assert all(0.0 <= f <= 1.0 for f in freqs)
    assert all(a >= b for a, b in zip(freqs, freqs[1:]))  # fewer indices, fewer hits
