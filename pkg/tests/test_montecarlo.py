import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from wishart_smin.exact import EnsembleParams, cdf, moment, smin_closed_form
from wishart_smin.fixed_trace import ft_cdf, ft_closed_form
from wishart_smin.montecarlo import (
    SampleSet,
    draw_rng,
    histogram,
    histogram_errors,
    ks_statistic,
    sample_ginibre,
    smallest_eig_samples,
)


def test_reproducible_and_slice_stable():
    p = EnsembleParams(3, 5)
    a = smallest_eig_samples(p, 50, seed=11)
    b = smallest_eig_samples(p, 50, seed=11)
    assert np.array_equal(a.values, b.values)
    # draw k depends only on (seed, k)
    w = sample_ginibre(p, draw_rng(11, 37))
    lam = np.linalg.eigvalsh(w @ w.conj().T)[0]
    assert lam == pytest.approx(a.values[37], rel=1e-12)
    assert not np.array_equal(a.values, smallest_eig_samples(p, 50, seed=12).values)


def test_batches_do_not_change_draws(monkeypatch):
    import wishart_smin.montecarlo as mc

    p = EnsembleParams(2, 3)
    ref = smallest_eig_samples(p, 30, seed=4).values
    monkeypatch.setattr(mc, "BATCH", 7)
    assert np.allclose(smallest_eig_samples(p, 30, seed=4).values, ref, rtol=1e-13)


def test_entry_variance_and_trace_moments():
    p = EnsembleParams(4, 6)
    traces = []
    for k in range(4000):
        a = sample_ginibre(p, draw_rng(3, k))
        traces.append(np.sum(np.abs(a) ** 2))
    traces = np.array(traces)
    # tr W is Gamma(nm, 1): mean and variance both nm
    assert traces.mean() == pytest.approx(p.nm, rel=0.02)
    assert traces.var() == pytest.approx(p.nm, rel=0.1)


def test_single_eigenvalue_fixed_trace_is_one():
    s = smallest_eig_samples(EnsembleParams(1, 3), 20, seed=0, fixed_trace=True)
    assert np.allclose(s.values, 1.0)


def test_fixed_trace_bounded():
    s = smallest_eig_samples(EnsembleParams(4, 4), 500, seed=2, fixed_trace=True)
    assert np.all((s.values >= 0) & (s.values <= 0.25))


def test_ks_of_exact_sample_is_small():
    rng = np.random.default_rng(0)
    x = rng.exponential(size=20000)
    d = ks_statistic(x, lambda v: 1 - np.exp(-v))
    assert d == pytest.approx(stats.kstest(x, "expon").statistic, abs=1e-12)
    assert d < 0.015


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(min_value=0, max_value=10, allow_nan=False), min_size=1, max_size=40))
def test_ks_matches_scipy(values):
    f = lambda v: 1 - np.exp(-np.asarray(v))
    ours = ks_statistic(np.array(values), f)
    ref = stats.kstest(values, lambda v: 1 - np.exp(-v)).statistic
    assert ours == pytest.approx(ref, abs=1e-12)


def test_square_case_histogram_matches_exponential():
    n = 3
    s = smallest_eig_samples(EnsembleParams(n, n), 20000, seed=5)
    h = histogram(s, 20, range_=(0, 1.5))
    edges = np.array(h.metadata["edges"])
    expected = (np.exp(-n * edges[:-1]) - np.exp(-n * edges[1:])) / np.diff(edges)
    # the histogram is normalised over the counted range only
    inside = 1 - math.exp(-n * 1.5)
    z = (h.ys * inside - expected) / (histogram_errors(h) + 1e-12)
    assert np.max(np.abs(z)) < 5


@pytest.mark.parametrize("fixed", [False, True])
def test_moderate_sample_ks(fixed):
    p = EnsembleParams(4, 6)
    s = smallest_eig_samples(p, 5000, seed=8, fixed_trace=fixed)
    if fixed:
        form = ft_closed_form(p)
        d = ks_statistic(s, lambda x: ft_cdf(form, x))
    else:
        form = smin_closed_form(p)
        d = ks_statistic(s, lambda x: cdf(form, x))
    assert d < 1.63 / math.sqrt(5000)


def test_sample_mean_matches_exact_moment():
    p = EnsembleParams(3, 4)
    s = smallest_eig_samples(p, 20000, seed=9)
    m1 = float(moment(smin_closed_form(p), 1))
    m2 = float(moment(smin_closed_form(p), 2))
    se = math.sqrt((m2 - m1**2) / s.count)
    assert abs(s.values.mean() - m1) < 5 * se


def test_histogram_area_and_errors():
    h = histogram(np.random.default_rng(1).normal(size=1000), 25)
    assert h.integral() == pytest.approx(1, rel=0.05)
    widths = np.diff(h.metadata["edges"])
    assert np.sum(h.ys * widths) == pytest.approx(1)
    assert np.all(histogram_errors(h) >= 0)
    with pytest.raises(ValueError):
        histogram([1.0, 2.0], 1)


def test_sample_set_csv_round_trip():
    s = smallest_eig_samples(EnsembleParams(2, 5), 10, seed=3, fixed_trace=True)
    back = SampleSet.from_csv(s.to_csv())
    assert np.array_equal(back.values, s.values)
    assert (back.params, back.fixed_trace, back.seed, back.count) == (s.params, True, 3, 10)


def test_sample_set_validation():
    p = EnsembleParams(2, 2)
    with pytest.raises(ValueError):
        SampleSet(np.array([]), p, False, 0)
    with pytest.raises(ValueError):
        SampleSet(np.array([-1.0]), p, False, 0)
    with pytest.raises(ValueError):
        SampleSet(np.array([0.6]), p, True, 0)
    with pytest.raises(ValueError):
        smallest_eig_samples(p, 0, seed=1)
