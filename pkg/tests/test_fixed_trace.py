import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
import sympy as sp

import oracles
from wishart_smin.exact import EnsembleParams, moment, smin_closed_form
from wishart_smin.fixed_trace import (
    clz_alpha1_check,
    eval_ft_density,
    ft_cdf,
    ft_closed_form,
    ft_moment,
    r_delta,
    r_delta_exact,
    scaled_approx_density,
)


@pytest.mark.parametrize("row", oracles.golden_rows("fixed_trace"), ids=lambda r: f"n{r['n']}m{r['m']}")
def test_fixed_trace_table_rows(row):
    form = ft_closed_form(EnsembleParams(row["n"], row["m"]))
    assert form.polynomial().coefficients == oracles.golden_coefficients(row["expr"])


@pytest.mark.parametrize("n", [1, 2, 3, 5, 8])
def test_alpha_one_direct_and_survival_forms(n):
    assert clz_alpha1_check(n)


def test_degenerate_single_eigenvalue():
    form = ft_closed_form(EnsembleParams(1, 4))
    assert form.degenerate
    assert eval_ft_density(form, 0.5) == 0.0
    assert ft_cdf(form, 0.999) == 0.0 and ft_cdf(form, 1.0) == 1.0
    assert r_delta(EnsembleParams(1, 4), Fraction(1, 10)) == 1


@pytest.mark.parametrize("n,m", [(2, 2), (3, 5), (6, 9), (10, 14), (20, 26)])
def test_density_integrates_to_one_and_cdf_matches(n, m):
    form = ft_closed_form(EnsembleParams(n, m))
    f = lambda x: mpmath.mpf(eval_ft_density(form, float(x)))
    assert float(oracles.quad(f, 0, 1 / n)) == pytest.approx(1, abs=1e-10)
    for x in (0.2 / n, 0.5 / n, 0.8 / n):
        assert ft_cdf(form, x) == pytest.approx(float(oracles.quad(f, 0, x)), abs=1e-10)


def test_density_zero_outside_support():
    form = ft_closed_form(EnsembleParams(3, 5))
    assert np.all(eval_ft_density(form, np.array([-0.1, 0.34, 2.0])) == 0)
    assert ft_cdf(form, -1.0) == 0.0 and ft_cdf(form, 1.0) == 1.0


def test_prefactor_pole_terms_vanish():
    # nm - j <= 0 only when n = 1; any other shape keeps every prefactor finite and nonzero
    form = ft_closed_form(EnsembleParams(2, 2))
    assert form.prefactors == {1: Fraction(2 * math.factorial(3), math.factorial(2))}
    assert all(v != 0 for v in ft_closed_form(EnsembleParams(4, 9)).prefactors.values())


@pytest.mark.parametrize("n,m", [(2, 3), (3, 4), (4, 9), (6, 10)])
@pytest.mark.parametrize("eta", [1, 2, 3])
def test_moment_relation_exact(n, m, eta):
    p = EnsembleParams(n, m)
    lhs = ft_moment(p, eta) * Fraction(math.factorial(p.nm + eta - 1), math.factorial(p.nm - 1))
    assert lhs == moment(smin_closed_form(p), eta)


def test_moment_against_quadrature():
    p = EnsembleParams(3, 6)
    form = ft_closed_form(p)
    ref = oracles.quad(lambda x: x**1.5 * eval_ft_density(form, float(x)), 0, 1 / 3)
    assert float(ft_moment(p, 1.5)) == pytest.approx(float(ref), rel=1e-10)
    assert float(ft_moment(p, 1)) == pytest.approx(
        float(oracles.quad(lambda x: x * eval_ft_density(form, float(x)), 0, 1 / 3)), rel=1e-12
    )
    with pytest.raises(ValueError):
        ft_moment(p, -4)


@pytest.mark.parametrize("n,m", [(3, 11), (7, 19), (11, 25)])
def test_r_delta_exact_integration(n, m):
    p = EnsembleParams(n, m)
    delta = Fraction(1, 10 * n)
    exact = r_delta_exact(p, delta)
    # independent route: integrate the expanded polynomial with sympy
    coeffs = ft_closed_form(p).polynomial().coefficients
    poly = sum(sp.Rational(c.numerator, c.denominator) * oracles.X**k for k, c in enumerate(coeffs))
    lo = sp.Rational(1, n) - sp.Rational(delta.numerator, delta.denominator)
    ref = sp.integrate(poly, (oracles.X, lo, sp.Rational(1, n)))
    assert exact == Fraction(int(ref.p), int(ref.q))
    with mpmath.workprec(256):
        ratio = r_delta(p, delta) / mpmath.mpf(exact.numerator) * exact.denominator
    assert abs(ratio - 1) < 1e-30


def test_r_delta_against_float_quadrature():
    p = EnsembleParams(3, 11)
    form = ft_closed_form(p)
    ref = oracles.quad(lambda x: mpmath.mpf(eval_ft_density(form, float(x))), 0.9 / 3, 1 / 3)
    assert float(r_delta(p, Fraction(1, 30))) == pytest.approx(float(ref), rel=1e-8)


def test_r_delta_validation():
    with pytest.raises(ValueError):
        r_delta(EnsembleParams(3, 5), 0)
    with pytest.raises(ValueError):
        r_delta_exact(EnsembleParams(3, 5), Fraction(1, 2))
    assert r_delta_exact(EnsembleParams(3, 5), Fraction(1, 3)) == 1


def test_extended_cdf_agrees_with_double_cdf():
    form = ft_closed_form(EnsembleParams(20, 22))
    assert form.uses_extended
    xs = np.array([0.001, 0.003, 0.01, 0.02])
    u = xs * 20
    ref = [
        sum(float(w) * float(mpmath.betainc(j, form.params.nm - j, 0, ui, regularized=True)) for j, w in form.weights().items())
        for ui in u
    ]
    assert np.allclose(ft_cdf(form, xs), ref, atol=1e-12)


def test_scaled_density_approaches_fixed_trace():
    xs = np.linspace(0.002, 0.05, 30)
    gaps = []
    for n, m in [(4, 6), (8, 12), (16, 24)]:
        p = EnsembleParams(n, m)
        xs = np.linspace(0, 1 / n, 400)
        exact = eval_ft_density(ft_closed_form(p), xs)
        approx = scaled_approx_density(p, xs)
        gaps.append(np.trapezoid(np.abs(exact - approx), xs))
    assert gaps[0] > gaps[1] > gaps[2]
    with pytest.raises(ValueError):
        scaled_approx_density(EnsembleParams(2, 3), -1.0)
