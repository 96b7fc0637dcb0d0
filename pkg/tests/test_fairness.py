import numpy as np
import pytest
from hypothesis import given, strategies as st

from fairsample import (SpinConfig, bootstrap_ci, compare_runs, fairness_report, min_solutions_filter,
                        rank_histogram, tally, theta_max, uniform_baseline)
from fairsample.oracle import GroundStateSet

count_lists = st.lists(st.integers(0, 500), min_size=1, max_size=24).filter(lambda c: sum(c) > 0)


def report(counts, seed=0, name="x"):
    return fairness_report(rank_histogram(counts, name), 2000, seed, 500)


def test_rank_sorting():
    h = rank_histogram([7, 2, 11])
    assert h.counts.tolist() == [2, 7, 11]
    assert h.order.tolist() == [1, 0, 2]
    assert h.normalized_rank.tolist() == [1 / 3, 2 / 3, 1.0]


def test_rank_ties_keep_canonical_order():
    assert rank_histogram([3, 1, 3, 1]).order.tolist() == [1, 3, 0, 2]


def test_tally_counts_and_excited():
    gs = GroundStateSet(-5, (SpinConfig(0, 2), SpinConfig(3, 2)), 2)
    h = tally([SpinConfig(3, 2), SpinConfig(3, 2), SpinConfig(1, 2)], gs)
    assert h.counts.tolist() == [0, 2]
    assert h.excited == 1 and h.excited_rate == pytest.approx(1 / 3)


@pytest.mark.parametrize("counts,expected", [((10, 10, 10), 0.0), ((0, 0, 30), 2 / 3), ((1, 2, 3), 1 / 6),
                                             ((0, 0, 0, 0, 0, 1), 5 / 6)])
def test_theta_max_cases(counts, expected):
    assert theta_max(counts) == expected


def test_theta_max_single_sample():
    for n in (2, 6, 48):
        c = np.zeros(n, dtype=int)
        c[0] = 1
        assert theta_max(c) == 1 - 1 / n


def test_theta_max_rejects_empty():
    with pytest.raises(ValueError):
        theta_max([0, 0])
    with pytest.raises(ValueError):
        theta_max([1, 2], n_gs=3)


@given(count_lists)
def test_theta_zero_iff_uniform(counts):
    uniform = len(set(counts)) == 1
    assert (theta_max(counts) == 0) == uniform
    assert 0 <= theta_max(counts) <= 1 - 1 / len(counts)


@given(count_lists, st.randoms(), st.integers(1, 50))
def test_theta_permutation_and_scale_invariant(counts, rnd, m):
    t = theta_max(counts)
    shuffled = list(counts)
    rnd.shuffle(shuffled)
    assert theta_max(shuffled) == t
    assert theta_max([m * x for x in counts]) == pytest.approx(t, abs=1e-15)


def test_baseline_single_state():
    assert np.all(uniform_baseline(100, 1, 200, 0).values == 0)


def test_baseline_single_sample():
    assert np.allclose(uniform_baseline(1, 6, 200, 0).values, 5 / 6)


def test_baseline_decreases_over_decades():
    means = [uniform_baseline(n, 12, 2000, n).mean for n in (100, 1000, 10_000)]
    assert means[0] > means[1] > means[2]
    assert means[2] < 0.03


def test_baseline_validation():
    with pytest.raises(ValueError):
        uniform_baseline(0, 6)


def test_bootstrap_point_mass():
    lo, hi = bootstrap_ci([0, 0, 0, 0, 0, 200], 2000, 0)
    assert hi - lo < 0.01
    assert lo <= 5 / 6 <= hi


def test_bootstrap_width_scales():
    rng = np.random.default_rng(1)
    p = np.array([1, 1, 2, 2, 4, 6]) / 16
    widths = []
    for total in (100, 10_000):
        ws = [np.subtract(*bootstrap_ci(rng.multinomial(total, p), 2000, rng)[::-1]) for _ in range(20)]
        widths.append(np.mean(ws))
    assert widths[0] / widths[1] == pytest.approx(10, rel=0.35)


def test_bootstrap_validation():
    with pytest.raises(ValueError):
        bootstrap_ci([0, 0], 2000)
    with pytest.raises(ValueError):
        bootstrap_ci([1, 2], 999)


def test_report_reproducible_and_nan_without_hits():
    a, b = report([3, 9, 14], 4), report([3, 9, 14], 4)
    assert a.row() == b.row()
    r = report([0, 0, 0])
    assert np.isnan(r.theta_max) and r.baseline is None


def test_floor_filter():
    reps = [report([20, 29]), report([25, 25]), report([40, 60])]
    assert min_solutions_filter(reps, 50) == reps[1:]
    assert min_solutions_filter(reps, 0) == reps
    assert min_solutions_filter([report([49])], 50) == []


def test_compare_diagonal_and_join():
    a = [report([5, 10, 30], name="i1"), report([9, 9, 9], name="i2"), report([1, 2, 3], name="only_a")]
    b = [report([5, 10, 30], name="i1"), report([9, 9, 9], name="i2"), report([0, 0, 0], name="only_a")]
    rows = compare_runs(a, a)
    assert all(r.theta_a == r.theta_b for r in rows) and len(rows) == 3
    assert [r.instance_id for r in compare_runs(a, b)] == ["i1", "i2"]


def test_compare_recovers_injected_gap():
    rng = np.random.default_rng(2)
    fair = np.full(6, 1 / 6)
    skew = np.array([0.05, 0.1, 0.15, 0.2, 0.2, 0.3])
    truth = theta_max(skew * 600)
    a = [report(rng.multinomial(5000, fair), i, f"i{i}") for i in range(10)]
    b = [report(rng.multinomial(5000, skew), i, f"i{i}") for i in range(10)]
    rows = compare_runs(a, b)
    gaps = np.array([r.gap for r in rows])
    assert abs(gaps.mean() - truth) < 0.02
    assert sum(r.ci_b[0] <= truth <= r.ci_b[1] for r in rows) >= 8
