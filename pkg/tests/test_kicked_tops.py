import cmath
import math
from fractions import Fraction

import numpy as np
import pytest

import oracles
from wishart_smin.exact import EnsembleParams
from wishart_smin.fixed_trace import ft_cdf, ft_closed_form
from wishart_smin.kicked_tops import (
    DEFAULT_INITIAL_CONDITIONS,
    CoherentAngles,
    TopParams,
    coherent_state,
    floquet_factors,
    initial_state,
    run_ensemble,
    schmidt_spectrum,
    step,
    wigner_d_half_pi,
)
from wishart_smin.montecarlo import ks_statistic

SET_A = DEFAULT_INITIAL_CONDITIONS["A"]


@pytest.mark.parametrize("two_j", range(1, 41))
def test_wigner_d_matches_matrix_exponential(two_j):
    j = two_j / 2
    assert np.allclose(wigner_d_half_pi(Fraction(two_j, 2)), oracles.rotation_y(j, math.pi / 2).real, atol=1e-12)


def test_wigner_d_spin_half_closed_form():
    d = wigner_d_half_pi(Fraction(1, 2))
    assert np.allclose(d, np.array([[1, 1], [-1, 1]]) / math.sqrt(2), atol=1e-15)


@pytest.mark.parametrize("j", [Fraction(1, 2), 1, Fraction(7, 2), 10])
def test_wigner_d_orthogonal_and_composes(j):
    d = wigner_d_half_pi(j)
    assert np.allclose(d @ d.T, np.eye(d.shape[0]), atol=1e-13)
    # two quarter turns make d(pi), which is antidiagonal with entries (-1)**(j - m)
    size = d.shape[0]
    ms = np.arange(size) - float(j)
    expected = np.zeros((size, size))
    for c, m in enumerate(ms):
        expected[size - 1 - c, c] = (-1) ** int(round(float(j) - m))
    assert np.allclose(d @ d, expected, atol=1e-13)


def test_half_integer_validation():
    with pytest.raises(ValueError):
        wigner_d_half_pi(0.3)
    with pytest.raises(ValueError):
        TopParams(Fraction(5), Fraction(1), 1, 1, 1)
    with pytest.raises(ValueError):
        TopParams(0, 1, 1, 1, 1)
    with pytest.raises(ValueError):
        CoherentAngles(4.0, 0.0)
    p = TopParams.from_dims(4, 7, 1, 1, 1)
    assert (p.j1, p.j2, p.n1, p.n2) == (Fraction(3, 2), 3, 4, 7)


def test_floquet_factors_unitary_and_unimodular():
    u1, u2, v = floquet_factors(TopParams.from_dims(11, 21, 7, 8, 1))
    assert np.max(np.abs(u1 @ u1.conj().T - np.eye(11))) < 1e-12
    assert np.max(np.abs(u2 @ u2.conj().T - np.eye(21))) < 1e-12
    assert np.allclose(np.abs(v), 1, atol=1e-15)
    _, _, v0 = floquet_factors(TopParams.from_dims(3, 5, 7, 8, 0))
    assert np.array_equal(v0, np.ones((3, 5)))


def test_floquet_matches_operator_exponentials():
    j, k = 2, 1.3
    u1, _, _ = floquet_factors(TopParams(j, j, k, 0.0, 0.0))
    jz = np.diag(np.arange(5) - 2.0)
    ref = np.diag(np.exp(-1j * k * np.diag(jz) ** 2 / (2 * j))) @ oracles.rotation_y(j, math.pi / 2)
    assert np.allclose(u1, ref, atol=1e-12)


@pytest.mark.parametrize("j", [Fraction(1, 2), 3, Fraction(15, 2)])
def test_coherent_state_normalised_and_expectation(j):
    ang = CoherentAngles(1.1, 2.3)
    psi = coherent_state(j, ang)
    assert np.linalg.norm(psi) == pytest.approx(1, abs=1e-14)
    ms = np.arange(psi.size) - float(j)
    # theta = 0 is the m = +j pole, so <J_z> = j cos(theta)
    assert np.sum(np.abs(psi) ** 2 * ms) == pytest.approx(float(j) * math.cos(1.1), abs=1e-12)


def test_coherent_state_poles_exact():
    up = coherent_state(2, CoherentAngles(0.0, 0.0))
    assert np.array_equal(up, np.array([0, 0, 0, 0, 1], dtype=complex))
    down = coherent_state(2, CoherentAngles(math.pi, 0.0))
    assert abs(down[0]) == pytest.approx(1) and np.max(np.abs(down[1:])) < 1e-15


def test_two_by_two_step_by_hand():
    k1, k2, eps = 0.9, 1.7, 0.4
    params = TopParams(Fraction(1, 2), Fraction(1, 2), k1, k2, eps)
    pole = CoherentAngles(0.0, 0.0)
    psi = step(initial_state(params, pole, pole), floquet_factors(params))
    a, b = cmath.exp(-1j * eps / 2), cmath.exp(1j * eps / 2)
    expected = cmath.exp(-1j * (k1 + k2) / 4) / 2 * np.array([[a, b], [b, a]])
    assert np.allclose(psi, expected, atol=1e-15)


def test_step_shape_check():
    params = TopParams.from_dims(2, 3, 1, 1, 1)
    with pytest.raises(ValueError):
        step(np.zeros((3, 2)), floquet_factors(params))


def test_norm_drift_over_ten_thousand_periods():
    params = TopParams.from_dims(11, 21, 7, 8, 1)
    factors = floquet_factors(params)
    psi = initial_state(params, *SET_A)
    worst = 0.0
    for _ in range(10_000):
        psi = step(psi, factors)
        worst = max(worst, abs(np.linalg.norm(psi) - 1))
    assert worst < 1e-10


def test_zero_kick_zero_coupling_norm():
    params = TopParams.from_dims(5, 7, 0, 0, 0)
    factors = floquet_factors(params)
    psi = initial_state(params, *SET_A)
    for _ in range(1000):
        psi = step(psi, factors)
    assert abs(np.linalg.norm(psi) - 1) < 1e-12


def test_schmidt_spectrum_properties():
    params = TopParams.from_dims(5, 9, 7, 8, 1)
    factors = floquet_factors(params)
    psi = initial_state(params, *SET_A)
    product = schmidt_spectrum(psi)
    assert product.mu[0] == pytest.approx(1, abs=1e-12)
    assert np.all(product.mu[1:] <= 1e-12) and product.smallest >= 0
    for _ in range(50):
        psi = step(psi, factors)
    s = schmidt_spectrum(psi)
    assert abs(s.mu.sum() - 1) < 1e-12
    assert np.all(np.diff(s.mu) <= 0) and np.all(s.mu >= 0)
    assert s.mu.size == 5
    with pytest.raises(ValueError):
        schmidt_spectrum(2 * psi)


def test_run_ensemble_bookkeeping():
    params = TopParams.from_dims(3, 5, 7, 8, 1)
    run = run_ensemble(params, *SET_A, skip=10, stride=3, count=40)
    assert run.periods == [10 + 3 * k for k in range(1, 41)]
    assert len(run.spectra) == 40 and run.pooled().size == 120
    assert run.max_norm_drift < 1e-12
    with pytest.raises(ValueError):
        run_ensemble(params, *SET_A, stride=0)


@pytest.mark.parametrize("dims", [(5, 5), (5, 9), (11, 11), (11, 21)])
def test_ks_non_increasing_in_coupling(dims):
    n1, n2 = dims
    form = ft_closed_form(EnsembleParams(n1, n2))
    ks = []
    for eps in (0.05, 0.1, 0.5):
        run = run_ensemble(TopParams.from_dims(n1, n2, 7, 8, eps), *SET_A, count=1000)
        ks.append(ks_statistic(run.smallest(), lambda x: ft_cdf(form, x)))
    assert ks[0] >= ks[1] >= ks[2]


@pytest.mark.xfail(
    strict=True,
    reason="observed: at eps = 0.05 the KS distance grows with N2 at fixed N1 "
    "(about 0.10, 0.26, 0.47 for N2 = 11, 15, 25) and longer transients do not change this",
)
def test_ks_decreases_with_second_dimension():
    ks = []
    for n2 in (11, 15, 25):
        form = ft_closed_form(EnsembleParams(11, n2))
        run = run_ensemble(TopParams.from_dims(11, n2, 7, 8, 0.05), *SET_A, count=1000)
        ks.append(ks_statistic(run.smallest(), lambda x: ft_cdf(form, x)))
    assert ks[0] > ks[1] > ks[2]


def test_coherent_state_equator_spin_half():
    psi = coherent_state(Fraction(1, 2), CoherentAngles(math.pi / 2, 0.0))
    assert np.allclose(psi, np.array([1, 1]) / math.sqrt(2), atol=1e-15)
