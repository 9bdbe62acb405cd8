"""Named verification suites behind `kingman verify`.

Each suite draws its randomness from RngStream(seed, block) handles, where
sub-experiment i of a suite owns the stream block i * 2**32.  That keeps
every verdict replayable from (suite, seed) alone and leaves room for 2**32
per-trial offsets inside a block without collisions between sub-experiments.
"""

from __future__ import annotations

import math
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .edge_reveal import (
    conditioned_state,
    erp_step,
    fast_walk,
    fast_walk_tree_counts,
    run_erp,
    walk_excess_decay_curve,
)
from .forest import (
    PlainRootedForest,
    RootedLabeledForest,
    enumerate_increasing_forests,
    enumerate_labeled_forests,
    increasing_forest_count,
    is_increasing_forest,
    labeled_forest_count,
)
from .graph import sample_gnp
from .kingman import run_kingman
from .oracle import GNP_LIMIT, exact_cnp_distribution
from .rngdist import BoundParams, RngStream, eval_bounds
from .stats import (
    TestReport,
    chi_square_test,
    chi_square_two_sample,
    dominance_check,
    ks_test,
    mean_ci,
)
from .urrf import (
    increasing_forest_depths_batch,
    phi,
    polya_urn_counts_batch,
    urrf_parents_batch,
)

__all__ = ["SuiteResult", "SUITE_NAMES", "SUITE_DEFAULTS", "run_suite", "STREAM_BLOCK"]

STREAM_BLOCK = 1 << 32

# Ladder for the monotonicity suite and state summary for the step-law suite.
MONOTONICITY_LADDER = (5, 10, 20, 40)
STEP_LAW_STATE = (30, 20, 40)
NULL_CALIBRATION_REPS = 100


@dataclass(frozen=True)
class SuiteResult:
    """Reports plus any report-only data rows a suite wants emitted."""

    name: str
    reports: tuple[TestReport, ...]
    data: tuple[dict, ...] = field(default=())
    advisory: bool = False  # advisory suites always exit 0

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.reports)


def _stream(seed: int, block: int, offset: int = 0) -> RngStream:
    return RngStream(seed, block * STREAM_BLOCK + offset)


def _exact_report(suite: str, violations: int, checks: int, seed: int, notes: str = "") -> TestReport:
    note = f"{checks} exact checks"
    if notes:
        note = f"{note}; {notes}"
    return TestReport(
        suite=suite,
        statistic=float(violations),
        p_value=None,
        threshold=0.0,
        passed=violations == 0,
        trials=checks,
        seed=seed,
        notes=note,
    )


# ---------------------------------------------------------------------------
# exact combinatorial suites
# ---------------------------------------------------------------------------


def _suite_counting(n, p, trials, seed) -> SuiteResult:
    """Enumeration sizes vs the closed-form counts, over every (n, k) in range."""
    bad = 0
    checks = 0
    for nn in range(1, 7):
        for k in range(1, nn + 1):
            checks += 1
            if len(enumerate_labeled_forests(nn, nn - k)) != labeled_forest_count(nn, nn - k):
                bad += 1
    for nn in range(1, 8):
        for k in range(1, nn + 1):
            checks += 1
            if len(enumerate_increasing_forests(nn, k)) != increasing_forest_count(nn, k):
                bad += 1
    rep = _exact_report("counting:closed-forms", bad, checks, seed, "labeled n<=6, increasing n<=7")
    return SuiteResult("counting", (rep,))


# Worked relabeling example: merge labels 1..3 on 5 vertices, image rooted at {1,2}.
_RELABEL_EXAMPLE_IN = (5, ((1, 2, 3), (4, 1, 2), (3, 1, 1)))
_RELABEL_EXAMPLE_OUT = (5, {3: 1, 4: 3, 5: 3})


def _suite_phi(n, p, trials, seed) -> SuiteResult:
    bad = 0
    mapped = 0
    for nn in (4, 5):
        for k in range(1, nn + 1):
            fiber = math.factorial(nn) // math.factorial(k)
            images: Counter = Counter()
            for f in enumerate_labeled_forests(nn, nn - k):
                g = phi(f)
                if not is_increasing_forest(g, k):
                    bad += 1
                images[g] += 1
                mapped += 1
            bad += sum(1 for c in images.values() if c != fiber)
            if len(images) != increasing_forest_count(nn, k):
                bad += 1
    ex_n, ex_edges = _RELABEL_EXAMPLE_IN
    got = phi(RootedLabeledForest.from_edges(ex_n, ex_edges))
    want = PlainRootedForest.from_parent_map(*_RELABEL_EXAMPLE_OUT)
    if got != want:
        bad += 1
    rep = _exact_report("phi:fibers", bad, mapped + 1, seed, "n in {4,5}, all k, plus worked example")
    return SuiteResult("phi", (rep,))


# ---------------------------------------------------------------------------
# distributional suites
# ---------------------------------------------------------------------------


def _suite_equivalence(n, p, trials, seed) -> SuiteResult:
    """Tree-count law agreement: direct coalescent vs reveal process vs walk."""
    s_direct = _stream(seed, 0)
    s_erp = _stream(seed, 1)
    s_walk = _stream(seed, 2)
    direct: Counter = Counter()
    erp: Counter = Counter()
    walk: Counter = Counter()
    for _ in range(trials):
        direct[run_kingman(sample_gnp(n, p, s_direct), s_direct).tree_count] += 1
    for _ in range(trials):
        erp[run_erp(n, p, s_erp)[0].root_count] += 1
    for _ in range(trials):
        walk[fast_walk(n, p, s_walk).tree_count] += 1
    counts = {"direct": direct, "erp": erp, "walk": walk}
    reports = []
    names = list(counts)
    for i in range(len(names)):
        for j in range(i + 1, len(names)):
            a, b = names[i], names[j]
            reports.append(
                chi_square_two_sample(
                    counts[a], counts[b], suite=f"equivalence:{a}-vs-{b}", threshold=0.01, seed=seed
                )
            )
    if n <= GNP_LIMIT:
        exact = exact_cnp_distribution(n, p).as_float_dict()
        for name in names:
            reports.append(
                chi_square_test(
                    counts[name],
                    exact,
                    trials,
                    suite=f"equivalence:{name}-vs-oracle",
                    threshold=0.01,
                    seed=seed,
                )
            )
    return SuiteResult("equivalence", tuple(reports))


def _suite_uniformity(n, p, trials, seed) -> SuiteResult:
    """Conditional on its tree count, the final forest is uniform (checked on
    the modal count, where the sample is largest)."""
    s = _stream(seed, 0)
    groups: defaultdict[int, Counter] = defaultdict(Counter)
    for _ in range(trials):
        run = run_kingman(sample_gnp(n, p, s), s)
        groups[run.tree_count][run.final_forest] += 1
    modal, observed = max(groups.items(), key=lambda kv: (sum(kv[1].values()), -kv[0]))
    group_size = sum(observed.values())
    family = enumerate_labeled_forests(n, n - modal)
    expected = {f: 1.0 / len(family) for f in family}
    rep = chi_square_test(
        dict(observed),
        expected,
        group_size,
        suite="uniformity:modal-group",
        threshold=0.01,
        seed=seed,
        notes=f"tree_count={modal}, {group_size}/{trials} runs, {len(family)} forests",
    )
    return SuiteResult("uniformity", (rep,))


def _truncated_geometric_pmf(p: float, cap: int) -> dict[int, float]:
    q = 1.0 - p
    pmf = {x: q**x * p for x in range(cap)}
    pmf[cap] = q**cap
    return pmf


def _hypergeometric_pmf(draws: int, successes: int, population: int) -> dict[int, float]:
    denom = math.comb(population, draws)
    lo = max(0, draws - (population - successes))
    hi = min(draws, successes)
    return {
        y: math.comb(successes, y) * math.comb(population - successes, draws - y) / denom
        for y in range(lo, hi + 1)
    }


def _suite_step_law(n, p, trials, seed) -> SuiteResult:
    """One-epoch increments from a fixed conditioned state.

    Each trial rebuilds the state (n0 vertices, r roots, m0 verified
    non-edges), steps to the next coalescence, and records the fresh
    non-edge count X and the pruned count Y.  Epochs that terminate without
    a coalescence are excluded; at the default p their probability is
    (1-p)^cap, far below one event per run.
    """
    n0, r, m0 = STEP_LAW_STATE
    cap = r * (r - 1) // 2 - m0
    s = _stream(seed, 0)
    xs: Counter = Counter()
    ys: Counter = Counter()
    frozen = 0
    for _ in range(trials):
        st = conditioned_state(n0, r, m0, s, p=p)
        base = st.coalescences
        prev = st.complement_count
        while st.coalescences == base and not st.is_terminated():
            prev = st.complement_count
            erp_step(st, s)
        if st.coalescences == base:
            frozen += 1
            continue
        xs[prev - m0] += 1
        ys[prev - st.complement_count] += 1
    x_pmf = _truncated_geometric_pmf(p, cap)
    pop = r * (r - 1) // 2 - 1
    y_pmf: defaultdict[int, float] = defaultdict(float)
    for x in range(cap):
        w = x_pmf[x]
        if w < 1e-18:
            break
        for y, q in _hypergeometric_pmf(r - 2, m0 + x, pop).items():
            y_pmf[y] += w * q
    kept = trials - frozen
    note = f"state (n={n0}, roots={r}, m={m0}); {frozen} non-coalescing epochs dropped"
    rx = chi_square_test(
        dict(xs), x_pmf, kept, suite="step-law:fresh-non-edges", threshold=0.01, seed=seed, notes=note
    )
    ry = chi_square_test(
        dict(ys), dict(y_pmf), kept, suite="step-law:pruned", threshold=0.01, seed=seed, notes=note
    )
    return SuiteResult("step-law", (rx, ry))


def _suite_dirichlet(n, p, trials, seed) -> SuiteResult:
    """Scaled size of the first tree, conditional on the modal tree count."""
    counts = fast_walk_tree_counts(n, p, trials, _stream(seed, 0))
    tally = Counter(int(c) for c in counts)
    modal = max(tally.items(), key=lambda kv: (kv[1], -kv[0]))[0]
    if modal < 3:
        raise ValueError(f"modal tree count {modal} < 3 at p={p}; pick a smaller p")
    group = tally[modal]
    urn = polya_urn_counts_batch(modal, n - modal, group, _stream(seed, 1).generator)
    first = urn[:, 0] / n
    shape = modal - 1

    def cdf(x):
        return 1.0 - (1.0 - np.clip(x, 0.0, 1.0)) ** shape

    rep = ks_test(
        first,
        cdf,
        suite="dirichlet:first-size",
        threshold=0.01,
        seed=seed,
        notes=f"modal tree count {modal}, {group}/{trials} walks",
    )
    return SuiteResult("dirichlet", (rep,))


def _suite_height(n, p, trials, seed) -> SuiteResult:
    """Deletion coupling: forest height sandwiched by the recursive tree height."""
    counts = fast_walk_tree_counts(n, p, trials, _stream(seed, 0))
    gen = _stream(seed, 1).generator
    violations = 0
    heights = np.empty(trials, dtype=np.int64)
    tree_heights = np.empty(trials, dtype=np.int64)
    chunk = 2000
    for lo in range(0, trials, chunk):
        hi = min(lo + chunk, trials)
        c = counts[lo:hi]
        parents = urrf_parents_batch(n, 1, hi - lo, gen)
        h_tree = increasing_forest_depths_batch(parents, 1).max(axis=1)
        h_forest = increasing_forest_depths_batch(parents, c).max(axis=1)
        violations += int(np.sum((h_forest > h_tree) | (h_forest < h_tree - c)))
        heights[lo:hi] = h_forest
        tree_heights[lo:hi] = h_tree
    sandwich = _exact_report(
        "height:sandwich",
        violations,
        trials,
        seed,
        f"tree height mean {float(tree_heights.mean()):.3f}",
    )
    mean, half = mean_ci(heights)
    center = math.e * math.log(n) - 1.5 * math.log(math.log(n))
    window = TestReport(
        suite="height:mean-window",
        statistic=mean - center,
        p_value=None,
        threshold=5.0,
        passed=abs(mean - center) <= 5.0,
        trials=trials,
        seed=seed,
        notes=f"forest mean {mean:.3f} +- {half:.3f} (4 SE), window center {center:.3f}",
    )
    return SuiteResult("height", (sandwich, window))


def _suite_monotonicity(n, p, trials, seed) -> SuiteResult:
    """Tree counts grow stochastically with n; exact means agree at oracle sizes."""
    ladder = MONOTONICITY_LADDER
    samples = {
        nn: fast_walk_tree_counts(nn, p, trials, _stream(seed, i))
        for i, nn in enumerate(ladder)
    }
    reports = []
    for small, big in zip(ladder, ladder[1:]):
        reports.append(
            dominance_check(
                samples[small],
                samples[big],
                suite=f"monotonicity:{small}-vs-{big}",
                seed=seed,
                notes=f"p={p}",
            )
        )
    means = [exact_cnp_distribution(nn, p).mean() for nn in range(1, GNP_LIMIT + 1)]
    bad = sum(1 for a, b in zip(means, means[1:]) if b < a)
    float_means = ", ".join(f"{float(m):.4f}" for m in means)
    reports.append(
        _exact_report(
            "monotonicity:exact-means", bad, len(means) - 1, seed, f"means {float_means}"
        )
    )
    return SuiteResult("monotonicity", tuple(reports))


# Two hand-substituted tail-bound fixtures: (params, field, expected value).
_BOUND_FIXTURES = (
    (BoundParams(delta=0.5, mu=100.0, r=1, p=0.5), "sum_two_sided", 2.0 * math.exp(-25.0 / 3.0)),
    (BoundParams(delta=0.5, mu=0.0, r=100, p=0.5), "negbin_upper", math.exp(-100.0 / 96.0)),
)


def _suite_bounds(n, p, trials, seed) -> SuiteResult:
    """Advisory: emit tail-bound curves along the walk plus the excess-decay
    frequencies.  The only hard checks are the two hand-substituted fixture
    values and the monotone-in-(mu, r) property on the emitted grid."""
    bad = 0
    for params, fld, want in _BOUND_FIXTURES:
        got = getattr(eval_bounds(params), fld)
        if got != want:
            bad += 1
    fixtures = _exact_report("bounds:fixtures", bad, len(_BOUND_FIXTURES), seed)

    data = []
    prev = None
    mono_bad = 0
    grid = sorted({int(k) for k in np.linspace(1, n - 1, 33)})
    for k in grid:
        r = n - k
        mu = (1.0 - p) * r / p
        vals = eval_bounds(BoundParams(delta=0.25, mu=mu, r=r, p=p))
        row = {
            "kind": "bound-curve",
            "k": k,
            "mu": mu,
            "r": r,
            "delta": 0.25,
            "p": p,
            "sum_two_sided": vals.sum_two_sided,
            "negbin_upper": vals.negbin_upper,
            "negbin_lower": vals.negbin_lower,
        }
        data.append(row)
        if prev is not None and any(
            row[fld] < prev[fld] - 1e-15
            for fld in ("sum_two_sided", "negbin_upper", "negbin_lower")
        ):
            mono_bad += 1  # shrinking mu and r must never shrink a bound
        prev = row
    mono = _exact_report("bounds:monotone-grid", mono_bad, len(grid) - 1, seed)

    curve = walk_excess_decay_curve(n, p, 0.1, [0, 1, 2, 5, 10, 20, 50], trials, _stream(seed, 1))
    for ell, freq in curve:
        data.append({"kind": "excess-decay", "ell": ell, "freq": freq, "eps": 0.1, "trials": trials})
    return SuiteResult("bounds", (fixtures, mono), tuple(data), advisory=True)


def _suite_null_calibration(n, p, trials, seed) -> SuiteResult:
    """Rejection rates of the p-value tests on true-null data stay near alpha."""
    reps = NULL_CALIBRATION_REPS
    ks_rej = 0
    for i in range(reps):
        xs = _stream(seed, 0, i).random(10_000)
        if not ks_test(xs, lambda x: np.clip(x, 0.0, 1.0), threshold=0.01).passed:
            ks_rej += 1
    pmf = _truncated_geometric_pmf(0.5, 10)
    support = sorted(pmf)
    probs = [pmf[x] for x in support]
    chi_rej = 0
    for i in range(reps):
        draws = _stream(seed, 1, i).generator.multinomial(100_000, probs)
        observed = {x: int(c) for x, c in zip(support, draws)}
        if not chi_square_test(observed, pmf, 100_000, threshold=0.01).passed:
            chi_rej += 1

    def rate_report(name: str, rejections: int) -> TestReport:
        rate = rejections / reps
        return TestReport(
            suite=f"null-calibration:{name}",
            statistic=rate,
            p_value=None,
            threshold=0.03,
            passed=rate <= 0.03,
            trials=reps,
            seed=seed,
            notes=f"{rejections}/{reps} rejections at alpha 0.01",
        )

    return SuiteResult("null-calibration", (rate_report("ks", ks_rej), rate_report("chi2", chi_rej)))


# ---------------------------------------------------------------------------
# registry
# ---------------------------------------------------------------------------

# suite -> (runner, default n, default p, default trials)
_REGISTRY = {
    "counting": (_suite_counting, None, None, None),
    "phi": (_suite_phi, None, None, None),
    "equivalence": (_suite_equivalence, 5, 0.5, 20_000),
    "uniformity": (_suite_uniformity, 4, 0.5, 50_000),
    "step-law": (_suite_step_law, STEP_LAW_STATE[0], 0.5, 20_000),
    "dirichlet": (_suite_dirichlet, 5000, 0.3, 4000),
    "height": (_suite_height, 3000, 0.5, 2000),
    "monotonicity": (_suite_monotonicity, MONOTONICITY_LADDER[-1], 0.5, 20_000),
    "bounds": (_suite_bounds, 400, 0.2, 500),
    "null-calibration": (_suite_null_calibration, None, None, NULL_CALIBRATION_REPS),
}

SUITE_NAMES = tuple(_REGISTRY)
SUITE_DEFAULTS = {name: spec[1:] for name, spec in _REGISTRY.items()}


def run_suite(
    name: str,
    *,
    n: int | None = None,
    p: float | None = None,
    trials: int | None = None,
    seed: int = 0,
) -> SuiteResult:
    """Run one named suite with per-suite defaults filling any omitted knobs."""
    if name not in _REGISTRY:
        raise KeyError(f"unknown suite {name!r}; choose from {', '.join(SUITE_NAMES)}")
    fn, dn, dp, dtrials = _REGISTRY[name]
    return fn(
        dn if n is None else n,
        dp if p is None else p,
        dtrials if trials is None else trials,
        seed,
    )
