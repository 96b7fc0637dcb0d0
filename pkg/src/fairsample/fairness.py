"""Fairness statistics over ground-state hit counts.

Counts are rank-sorted ascending, so the most frequently found state has
the largest index.  The core statistic is

    theta_max = max_x |F_emp(x) - x / N_GS|,   x = 1..N_GS,

the largest gap between the empirical cumulative distribution of the
rank-sorted hits and the uniform cumulative distribution.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .ising import SpinConfig

log = logging.getLogger(__name__)

BOOTSTRAP_RESAMPLES = 10_000
MIN_SOLUTIONS = 50


@dataclass(frozen=True)
class HitHistogram:
    """Per-ground-state hit counts in rank order (ascending).

    ``order[x]`` is the index, in the ground-state set, of the state at rank
    ``x``.  ``excited`` counts samples that were not ground states.
    """

    instance_id: str
    n_gs: int
    counts: np.ndarray
    order: np.ndarray
    sampler_id: str = ""
    excited: int = 0

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    @property
    def ranks(self) -> np.ndarray:
        return np.arange(1, self.n_gs + 1)

    @property
    def normalized_rank(self) -> np.ndarray:
        """Rank divided by N_GS, the horizontal axis of the rank plots."""
        return self.ranks / self.n_gs

    @property
    def excited_rate(self) -> float:
        n = self.total + self.excited
        return self.excited / n if n else 0.0


def rank_histogram(counts, instance_id: str = "", sampler_id: str = "", excited: int = 0) -> HitHistogram:
    """Sort counts ascending; ties keep their ground-state (canonical) order."""
    counts = np.asarray(counts, dtype=np.int64)
    order = np.argsort(counts, kind="stable")
    return HitHistogram(instance_id, len(counts), counts[order], order, sampler_id, excited)


def tally(records, ground_states, instance_id: str = "", sampler_id: str = "") -> HitHistogram:
    """Count how often each ground state appears among ``records`` (configs or SampleRecords)."""
    index = ground_states.index()
    counts = np.zeros(len(ground_states.configs), dtype=np.int64)
    excited = 0
    for rec in records:
        cfg = rec if isinstance(rec, SpinConfig) else rec.config
        k = index.get(cfg)
        if k is None:
            excited += 1
        else:
            counts[k] += 1
    return rank_histogram(counts, instance_id, sampler_id, excited)


def theta_max(counts, n_gs: int | None = None) -> float:
    """Largest gap between the rank-sorted empirical CDF and the uniform CDF.

    ``counts`` is sorted here, so any order is accepted.
    """
    c = np.sort(np.asarray(counts, dtype=np.int64))
    n_gs = len(c) if n_gs is None else n_gs
    if len(c) != n_gs:
        raise ValueError(f"{len(c)} counts for {n_gs} ground states")
    total = c.sum()
    if total <= 0:
        raise ValueError("theta_max is undefined without samples")
    # exact rational comparison first so uniform counts give exactly 0
    cum = np.cumsum(c)
    x = np.arange(1, n_gs + 1)
    num = np.abs(cum * n_gs - x * total)
    return float(num.max() / (total * n_gs))


def _theta_rows(counts: np.ndarray) -> np.ndarray:
    """theta_max for each row of a 2-d count array (rows sorted here)."""
    c = np.sort(counts, axis=1)
    total = c.sum(axis=1, keepdims=True)
    n_gs = c.shape[1]
    x = np.arange(1, n_gs + 1)
    return np.abs(np.cumsum(c, axis=1) / total - x / n_gs).max(axis=1)


@dataclass(frozen=True)
class Baseline:
    """Distribution of theta_max for a uniform sampler with matched sample count."""

    values: np.ndarray = field(repr=False)
    mean: float
    ci: tuple[float, float]


def uniform_baseline(n_samples: int, n_gs: int, trials: int = 2000, rng=None) -> Baseline:
    """theta_max of ``n_samples`` uniform draws from ``{1..N_GS}``, over ``trials`` repeats."""
    if n_samples <= 0 or trials <= 0:
        raise ValueError("n_samples and trials must be positive")
    rng = np.random.default_rng(rng)
    draws = rng.multinomial(n_samples, np.full(n_gs, 1.0 / n_gs), size=trials)
    vals = _theta_rows(draws)
    lo, hi = np.percentile(vals, [2.5, 97.5])
    return Baseline(vals, float(vals.mean()), (float(lo), float(hi)))


def bootstrap_ci(counts, resamples: int = BOOTSTRAP_RESAMPLES, rng=None,
                 level: float = 0.95) -> tuple[float, float]:
    """Basic (reflected) bootstrap interval for theta_max.

    Each resample redraws ``total`` hits from the empirical categorical
    distribution and recomputes theta_max.  theta_max is biased upwards
    for finite samples, so the percentile interval undercovers when the
    true value is small; reflecting the quantiles about the estimate
    corrects for that.  Bounds are clipped to [0, 1].
    """
    counts = np.asarray(counts, dtype=np.int64)
    total = int(counts.sum())
    if total <= 0:
        raise ValueError("bootstrap needs at least one sample")
    if resamples < 1000:
        raise ValueError("use at least 1000 bootstrap resamples")
    rng = np.random.default_rng(rng)
    draws = rng.multinomial(total, counts / total, size=resamples)
    vals = _theta_rows(draws)
    a = 100 * (1 - level) / 2
    q_lo, q_hi = np.percentile(vals, [a, 100 - a])
    t = theta_max(counts)
    lo, hi = min(max(2 * t - q_hi, 0.0), 1.0), min(max(2 * t - q_lo, 0.0), 1.0)
    return float(lo), float(hi)


@dataclass(frozen=True)
class FairnessReport:
    histogram: HitHistogram
    theta_max: float
    ci: tuple[float, float]
    baseline: Baseline | None
    n_qubits: int = 0

    @property
    def instance_id(self) -> str:
        return self.histogram.instance_id

    @property
    def total(self) -> int:
        return self.histogram.total

    @property
    def n_gs(self) -> int:
        return self.histogram.n_gs

    @property
    def within_baseline(self) -> bool:
        lo, hi = self.baseline.ci
        return lo <= self.theta_max <= hi

    def row(self) -> dict:
        b = self.baseline
        return {
            "instance": self.instance_id, "N": self.n_qubits, "N_GS": self.n_gs,
            "sampler": self.histogram.sampler_id, "total": self.total,
            "theta_max": self.theta_max, "ci_low": self.ci[0], "ci_high": self.ci[1],
            "baseline": b.mean if b else float("nan"),
            "baseline_low": b.ci[0] if b else float("nan"),
            "baseline_high": b.ci[1] if b else float("nan"),
            "excited_rate": self.histogram.excited_rate,
        }


def fairness_report(hist: HitHistogram, resamples: int = BOOTSTRAP_RESAMPLES, rng=None,
                    baseline_trials: int = 2000, n_qubits: int = 0) -> FairnessReport:
    """theta_max, its bootstrap interval and a matched uniform baseline.

    Reports with no ground-state hits get NaN statistics.
    """
    rng = np.random.default_rng(rng)
    if hist.total == 0:
        nan = float("nan")
        return FairnessReport(hist, nan, (nan, nan), None, n_qubits)
    t = theta_max(hist.counts, hist.n_gs)
    ci = bootstrap_ci(hist.counts, resamples, rng)
    base = uniform_baseline(hist.total, hist.n_gs, baseline_trials, rng)
    return FairnessReport(hist, t, ci, base, n_qubits)


def min_solutions_filter(reports, floor: int = MIN_SOLUTIONS) -> list:
    """Keep reports whose ground-state hit total is at least ``floor``."""
    return [r for r in reports if r.total >= floor]


@dataclass(frozen=True)
class ComparisonRow:
    instance_id: str
    theta_a: float
    ci_a: tuple[float, float]
    theta_b: float
    ci_b: tuple[float, float]

    @property
    def gap(self) -> float:
        return self.theta_b - self.theta_a


def compare_runs(reports_a, reports_b) -> list[ComparisonRow]:
    """Pair reports by instance, keeping instances with hits in both runs."""
    by_b = {r.instance_id: r for r in reports_b if r.total > 0}
    rows = [ComparisonRow(a.instance_id, a.theta_max, a.ci, by_b[a.instance_id].theta_max,
                          by_b[a.instance_id].ci)
            for a in reports_a if a.total > 0 and a.instance_id in by_b]
    if not rows:
        log.warning("compare_runs: no instance has ground-state hits in both runs")
    return rows
