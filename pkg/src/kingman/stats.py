"""Statistical verdict machinery for the verification suites.

Every check returns a TestReport carrying the statistic, the p-value when
the test has one, the threshold it was judged against, and the (seed,
trials) pair that makes the verdict replayable.  The pass rule is uniform:
with a p-value, pass means p_value >= threshold; without one, pass means
|statistic| <= threshold.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
from scipy import special as sps

from .rngdist import CapacityError

__all__ = [
    "TestReport",
    "ks_test",
    "ks_two_sample",
    "chi_square_test",
    "chi_square_two_sample",
    "dominance_check",
    "mean_ci",
    "report_to_json",
]

KS_MIN_SAMPLES = 50
DOMINANCE_MIN_SAMPLES = 1000
POOL_MIN_EXPECTED = 5.0


@dataclass(frozen=True)
class TestReport:
    __test__ = False  # keep pytest from collecting this as a test class

    suite: str
    statistic: float
    p_value: float | None
    threshold: float
    passed: bool
    trials: int
    seed: int
    notes: str = ""


def _verdict(
    suite: str,
    statistic: float,
    p_value: float | None,
    threshold: float,
    trials: int,
    seed: int,
    notes: str,
) -> TestReport:
    if p_value is not None:
        ok = p_value >= threshold
    else:
        ok = abs(statistic) <= threshold
    return TestReport(suite, float(statistic), p_value, threshold, ok, trials, seed, notes)


def report_to_json(report: TestReport) -> dict:
    return {
        "suite": report.suite,
        "statistic": report.statistic,
        "p_value": report.p_value,
        "threshold": report.threshold,
        "pass": report.passed,
        "trials": report.trials,
        "seed": report.seed,
        "notes": report.notes,
    }


# ---------------------------------------------------------------------------
# Kolmogorov-Smirnov
# ---------------------------------------------------------------------------


def _eval_cdf(cdf, xs: np.ndarray) -> np.ndarray:
    try:
        vals = np.asarray(cdf(xs), dtype=np.float64)
        if vals.shape == xs.shape:
            return vals
    except Exception:
        pass
    return np.array([float(cdf(float(x))) for x in xs], dtype=np.float64)


def ks_test(samples, cdf, *, suite: str = "ks", threshold: float = 0.01, seed: int = 0, notes: str = "") -> TestReport:
    """One-sample KS against a reference cdf, asymptotic Kolmogorov p-value."""
    xs = np.sort(np.asarray(samples, dtype=np.float64))
    n = xs.size
    if n < KS_MIN_SAMPLES:
        raise CapacityError(f"ks_test needs >= {KS_MIN_SAMPLES} samples, got {n}")
    f = _eval_cdf(cdf, xs)
    i = np.arange(n, dtype=np.float64)
    d = float(max(np.max((i + 1) / n - f), np.max(f - i / n)))
    p = float(sps.kolmogorov(math.sqrt(n) * d))
    return _verdict(suite, d, p, threshold, n, seed, notes)


def ks_two_sample(a, b, *, suite: str = "ks2", threshold: float = 0.01, seed: int = 0, notes: str = "") -> TestReport:
    """Two-sample KS with the asymptotic p-value (conservative under ties)."""
    xa = np.sort(np.asarray(a, dtype=np.float64))
    xb = np.sort(np.asarray(b, dtype=np.float64))
    na, nb = xa.size, xb.size
    if min(na, nb) < KS_MIN_SAMPLES:
        raise CapacityError(f"ks_two_sample needs >= {KS_MIN_SAMPLES} samples per side")
    grid = np.union1d(xa, xb)
    fa = np.searchsorted(xa, grid, side="right") / na
    fb = np.searchsorted(xb, grid, side="right") / nb
    d = float(np.max(np.abs(fa - fb)))
    en = math.sqrt(na * nb / (na + nb))
    p = float(sps.kolmogorov(en * d))
    return _verdict(suite, d, p, threshold, na + nb, seed, notes)


# ---------------------------------------------------------------------------
# chi-square
# ---------------------------------------------------------------------------


def _pool_categories(expected_probs: dict, trials: int) -> list[list]:
    """Deterministic pooling: ascending expected probability (ties by key repr),
    greedily merged until every pool expects at least POOL_MIN_EXPECTED counts."""
    order = sorted(expected_probs, key=lambda k: (expected_probs[k], repr(k)))
    pools: list[list] = []
    current: list = []
    acc = 0.0
    for key in order:
        current.append(key)
        acc += expected_probs[key] * trials
        if acc >= POOL_MIN_EXPECTED:
            pools.append(current)
            current = []
            acc = 0.0
    if current:
        if pools:
            pools[-1].extend(current)
        else:
            pools.append(current)
    return pools


def chi_square_test(
    observed: dict,
    expected: dict,
    trials: int | None = None,
    *,
    suite: str = "chi2",
    threshold: float = 0.01,
    seed: int = 0,
    notes: str = "",
) -> TestReport:
    """Pearson goodness-of-fit of observed counts against expected probabilities."""
    if not set(observed) & set(expected):
        raise ValueError("observed and expected share no categories")
    if trials is None:
        trials = int(sum(observed.values()))
    total_prob = float(sum(expected.values()))
    if not math.isclose(total_prob, 1.0, rel_tol=0, abs_tol=1e-9):
        raise ValueError(f"expected probabilities sum to {total_prob}, not 1")

    stray = [k for k in observed if k not in expected and observed[k] > 0]
    if stray:
        stray_count = sum(observed[k] for k in stray)
        note = f"{stray_count} observations in {len(stray)} zero-probability categories; {notes}"
        return _verdict(suite, math.inf, 0.0, threshold, trials, seed, note.strip("; "))

    pools = _pool_categories(expected, trials)
    if len(pools) < 2:
        raise CapacityError("fewer than 2 pooled buckets; increase trials")
    stat = 0.0
    for pool in pools:
        exp = sum(expected[k] for k in pool) * trials
        obs = sum(observed.get(k, 0) for k in pool)
        stat += (obs - exp) ** 2 / exp
    dof = len(pools) - 1
    p = float(sps.chdtrc(dof, stat))
    note = f"dof={dof}; {notes}" if notes else f"dof={dof}"
    return _verdict(suite, stat, p, threshold, trials, seed, note)


def chi_square_two_sample(
    counts_a: dict,
    counts_b: dict,
    *,
    suite: str = "chi2-2sample",
    threshold: float = 0.01,
    seed: int = 0,
    notes: str = "",
) -> TestReport:
    """Homogeneity test of two count tables over a shared category space."""
    keys = set(counts_a) | set(counts_b)
    na = int(sum(counts_a.values()))
    nb = int(sum(counts_b.values()))
    if na == 0 or nb == 0:
        raise ValueError("both samples must be non-empty")
    pooled = {k: (counts_a.get(k, 0) + counts_b.get(k, 0)) / (na + nb) for k in keys}
    pools = _pool_categories(pooled, min(na, nb))
    if len(pools) < 2:
        raise CapacityError("fewer than 2 pooled buckets; increase trials")
    stat = 0.0
    for pool in pools:
        prop = sum(pooled[k] for k in pool)
        oa = sum(counts_a.get(k, 0) for k in pool)
        ob = sum(counts_b.get(k, 0) for k in pool)
        stat += (oa - na * prop) ** 2 / (na * prop) + (ob - nb * prop) ** 2 / (nb * prop)
    dof = len(pools) - 1
    p = float(sps.chdtrc(dof, stat))
    note = f"dof={dof}; {notes}" if notes else f"dof={dof}"
    return _verdict(suite, stat, p, threshold, na + nb, seed, note)


# ---------------------------------------------------------------------------
# stochastic dominance and confidence intervals
# ---------------------------------------------------------------------------


def dominance_check(
    samples_lo,
    samples_hi,
    *,
    suite: str = "dominance",
    threshold: float = 0.0,
    seed: int = 0,
    notes: str = "",
) -> TestReport:
    """Check P(hi >= x) >= P(lo >= x) - 3 SE pointwise.

    The statistic is the worst violation clamped at 0, so a clean pass
    reports 0.0; the worst raw margin is kept in the notes either way.
    """
    lo = np.sort(np.asarray(samples_lo, dtype=np.float64))
    hi = np.sort(np.asarray(samples_hi, dtype=np.float64))
    if min(lo.size, hi.size) < DOMINANCE_MIN_SAMPLES:
        raise CapacityError(f"dominance_check needs >= {DOMINANCE_MIN_SAMPLES} samples per side")
    grid = np.union1d(lo, hi)
    p_lo = 1.0 - np.searchsorted(lo, grid, side="left") / lo.size
    p_hi = 1.0 - np.searchsorted(hi, grid, side="left") / hi.size
    se = np.sqrt(p_lo * (1 - p_lo) / lo.size + p_hi * (1 - p_hi) / hi.size)
    margins = p_lo - p_hi - 3.0 * se
    worst = float(np.max(margins))
    raw = float(np.max(p_lo - p_hi))
    stat = max(0.0, worst)
    note = f"worst raw ccdf gap {raw:.5f}; worst slack margin {worst:.5f}"
    if notes:
        note = f"{note}; {notes}"
    return _verdict(suite, stat, None, threshold, int(lo.size + hi.size), seed, note)


def mean_ci(samples) -> tuple[float, float]:
    """Sample mean with a 4-standard-error halfwidth."""
    xs = np.asarray(samples, dtype=np.float64)
    if xs.size < 30:
        raise CapacityError(f"mean_ci needs >= 30 samples, got {xs.size}")
    mean = float(xs.mean())
    half = 4.0 * float(xs.std(ddof=1)) / math.sqrt(xs.size)
    return mean, half


def reports_to_jsonl(reports) -> str:
    return "\n".join(json.dumps(report_to_json(r), separators=(",", ":"), sort_keys=True) for r in reports)
