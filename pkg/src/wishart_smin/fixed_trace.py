"""Smallest eigenvalue of the fixed-trace ensemble ``F = W / tr W``.

Inverting the Laplace transform term by term turns every
``h_j x**(j-1) exp(-n x)`` of the regular density into
``Gamma(nm) h_j x**(j-1) (1 - n x)**(nm-j-1) / Gamma(nm-j)`` supported on
``[0, 1/n]``.  The mixture weights ``h_j Gamma(j) / n**j`` are shared with
the regular ensemble, which gives the CDF as a weighted sum of regularised
incomplete beta functions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from numbers import Real

import mpmath
import numpy as np
from gmpy2 import mpq, mpz
from scipy import special

from ._terms import TermSum, tail_sums
from .exact import (
    EXTENDED_THRESHOLD,
    EnsembleParams,
    eval_density,
    moment,
    smin_closed_form,
    _is_integer,
)
from .polynomial import RationalPolynomial

__all__ = [
    "FTSminClosedForm",
    "ft_closed_form",
    "eval_ft_density",
    "ft_cdf",
    "ft_moment",
    "r_delta",
    "r_delta_exact",
    "scaled_approx_density",
    "clz_alpha1_check",
    "clz_alpha1_prefactors",
    "clz_survival_polynomial",
    "R_DELTA_PREC",
]

R_DELTA_PREC = 256


def _inv_gamma_int(k: int) -> Fraction:
    """``1/Gamma(k)`` for integer ``k``; zero at the poles ``k <= 0``."""
    if k <= 0:
        return Fraction(0)
    return Fraction(1, math.factorial(k - 1))


@dataclass(frozen=True, eq=False)
class FTSminClosedForm:
    """Fixed-trace density ``sum_j prefactor_j x**(j-1) (1-nx)**(nm-j-1)`` on ``[0, 1/n]``.

    ``h`` holds the regular-ensemble coefficients.  For ``n == 1`` the single
    eigenvalue is pinned at 1; such a form is flagged ``degenerate`` and has
    no continuous density.
    """

    params: EnsembleParams
    h: dict

    kind = "fixed-trace"

    @property
    def n(self) -> int:
        return self.params.n

    @property
    def m(self) -> int:
        return self.params.m

    @property
    def degenerate(self) -> bool:
        return self.params.n == 1

    @property
    def support(self) -> tuple[float, float]:
        return 0.0, 1.0 / self.n

    def __eq__(self, other):
        if not isinstance(other, FTSminClosedForm):
            return NotImplemented
        return self.params == other.params and self.h == other.h

    def __hash__(self):
        return hash((self.kind, self.params, tuple(sorted(self.h.items()))))

    @property
    def terms(self) -> list:
        """``(j, h_j, (x exponent, (1 - n x) exponent))`` per term."""
        nm = self.params.nm
        return [(j, self.h[j], (j - 1, nm - j - 1)) for j in sorted(self.h)]

    @cached_property
    def prefactors(self) -> dict:
        """``Gamma(nm) h_j / Gamma(nm - j)`` (zero where ``Gamma`` has a pole)."""
        nm = self.params.nm
        g = math.factorial(nm - 1)
        return {j: g * hj * _inv_gamma_int(nm - j) for j, hj in self.h.items()}

    def polynomial(self) -> RationalPolynomial:
        """The density on its support, expanded to a dense polynomial in x."""
        n, nm = self.n, self.params.nm
        one_minus = RationalPolynomial([1, -n])
        total = RationalPolynomial()
        for j, a in self.prefactors.items():
            if a == 0:
                continue
            total = total + (one_minus ** (nm - j - 1)).shift(j - 1) * a
        return total

    def weights(self) -> dict:
        n = self.n
        return {j: hj * math.factorial(j - 1) / Fraction(n) ** j for j, hj in self.h.items()}

    @cached_property
    def density_terms(self) -> TermSum:
        nm = self.params.nm
        js = sorted(self.h)
        pre = self.prefactors
        return TermSum([pre[j] for j in js], [j - 1 for j in js], [nm - j - 1 for j in js], n=self.n)

    @cached_property
    def survival_terms(self) -> TermSum:
        """``1 - F(x) = sum_k T_k C(nm-1, k) (n x)**k (1 - n x)**(nm-1-k)``."""
        n, nm = self.n, self.params.nm
        weights = {}
        for j, hj in self.h.items():
            weights[j] = mpq(mpz(hj.numerator) * math.factorial(j - 1), mpz(hj.denominator) * mpz(n) ** j)
        tails = tail_sums(weights)
        coeffs = [t * math.comb(nm - 1, k) * mpz(n) ** k for k, t in enumerate(tails)]
        ks = range(len(coeffs))
        return TermSum(coeffs, ks, [nm - 1 - k for k in ks], n=n, prec=R_DELTA_PREC)

    @property
    def uses_extended(self) -> bool:
        return self.params.nm > EXTENDED_THRESHOLD

    @cached_property
    def _float_weights(self) -> np.ndarray:
        return np.array([float(w) for _, w in sorted(self.weights().items())])


def ft_closed_form(params: EnsembleParams) -> FTSminClosedForm:
    return FTSminClosedForm(params, dict(smin_closed_form(params).h))


def _as_array(x):
    arr = np.asarray(x, dtype=float)
    return arr, arr.ndim == 0


def eval_ft_density(form: FTSminClosedForm, x):
    """Density value; zero outside ``[0, 1/n]`` and for degenerate forms."""
    arr, scalar = _as_array(x)
    out = np.zeros_like(arr)
    if not form.degenerate:
        inside = (arr >= 0) & (arr * form.n <= 1)
        xs = arr[inside]
        terms = form.density_terms
        if form.uses_extended:
            vals = terms.values(xs)
        else:
            vals = np.zeros_like(xs)
            with np.errstate(divide="ignore", invalid="ignore"):
                lx = np.log(xs)
                ly = np.log1p(-form.n * xs)
                # 0 * log 0 is nan but is masked out by the where
                for lc, s, p, q in zip(terms._logs, terms._signs, terms.p, terms.q):
                    e = lc + np.where(p == 0, 0.0, p * lx) + np.where(q == 0, 0.0, q * ly)
                    vals += s * np.exp(e)
        out[inside] = np.maximum(vals, 0.0)
    return float(out) if scalar else out


def ft_cdf(form: FTSminClosedForm, x):
    """``sum_j w_j I_{nx}(j, nm - j)`` with the regular-ensemble weights ``w_j``."""
    arr, scalar = _as_array(x)
    n, nm = form.n, form.params.nm
    if form.degenerate:
        out = (arr >= 1.0).astype(float)
        return float(out) if scalar else out
    u = np.clip(arr * n, 0.0, 1.0)
    if not form.uses_extended:
        out = np.zeros_like(arr)
        for (j, _), w in zip(sorted(form.h.items()), form._float_weights):
            out += w * special.betainc(j, nm - j, u)
    else:
        terms = form.survival_terms
        out = np.empty_like(arr)
        with mpmath.workprec(terms.prec):
            for idx, xv in np.ndenumerate(arr):
                if xv <= 0:
                    out[idx] = 0.0
                elif xv * n >= 1:
                    out[idx] = 1.0
                else:
                    out[idx] = float(1 - terms.value(xv))
    out = np.clip(out, 0.0, 1.0)
    out = np.where(arr <= 0, 0.0, np.where(arr * n >= 1, 1.0, out))
    return float(out) if scalar else out


def ft_moment(params: EnsembleParams, eta):
    """``<x**eta>_F = Gamma(nm) / Gamma(nm + eta) <x**eta>``."""
    if not isinstance(eta, (Real, Fraction)):
        raise TypeError("eta must be real")
    if not eta > -params.alpha - 1:
        raise ValueError(f"moment order must exceed -alpha-1 = {-params.alpha - 1}, got {eta}")
    regular = moment(smin_closed_form(params), eta)
    nm = params.nm
    if _is_integer(eta):
        e = int(eta)
        ratio = Fraction(math.factorial(nm - 1), math.factorial(nm + e - 1))
        return regular * ratio
    with mpmath.workprec(R_DELTA_PREC):
        return regular * mpmath.exp(mpmath.loggamma(nm) - mpmath.loggamma(nm + mpmath.mpf(eta)))


def _check_delta(params: EnsembleParams, delta) -> None:
    if not (0 < delta <= Fraction(1, params.n)):
        raise ValueError(f"delta must lie in (0, 1/n] = (0, 1/{params.n}], got {delta}")


def r_delta(params: EnsembleParams, delta):
    """Probability that the smallest eigenvalue exceeds ``1/n - delta``.

    Evaluated from the exact survival-function terms at 256-bit precision;
    the result is an ``mpmath.mpf`` so values far below double range survive.
    """
    delta_q = Fraction(delta)
    _check_delta(params, delta_q)
    form = ft_closed_form(params)
    if form.degenerate:
        return mpmath.mpf(1)
    terms = form.survival_terms
    with mpmath.workprec(terms.prec):
        return terms.value(Fraction(1, params.n) - delta_q)


def r_delta_exact(params: EnsembleParams, delta) -> Fraction:
    """Exact rational R(delta) for rational ``delta``."""
    delta = Fraction(delta)
    _check_delta(params, delta)
    form = ft_closed_form(params)
    if form.degenerate:
        return Fraction(1)
    n, nm = params.n, params.nm
    u = 1 - n * delta
    total = Fraction(0)
    tail = Fraction(0)
    weights = form.weights()
    for k in range(max(weights) - 1, -1, -1):
        tail += weights.get(k + 1, 0)
        total += tail * math.comb(nm - 1, k) * u ** k * (1 - u) ** (nm - 1 - k)
    return total


def scaled_approx_density(params: EnsembleParams, x):
    """``mn f(mn x)``: regular density of the ensemble ``W / mn``."""
    arr, scalar = _as_array(x)
    if np.any(arr < 0):
        raise ValueError("x must be non-negative")
    nm = params.nm
    out = nm * np.asarray(eval_density(smin_closed_form(params), nm * arr))
    return float(out) if scalar else out


# ---------------------------------------------------------------------------
# alpha = 1 cross-check against the determinant-based survival function


def clz_alpha1_prefactors(n: int) -> dict:
    """Coefficients of the alpha = 1 closed-form density, coded directly.

    ``Gamma(n^2+n) Gamma(n+2) / (Gamma(n-j+2) Gamma(j+1) Gamma(j-1) Gamma(n^2+n-j))``
    for ``j = 2 .. n+1``.
    """
    f = math.factorial
    N = n * n + n
    out = {}
    for j in range(2, n + 2):
        c = Fraction(f(N - 1) * f(n + 1), f(n - j + 1) * f(j) * f(j - 2))
        out[j] = c * _inv_gamma_int(N - j)
    return out


def clz_survival_polynomial(n: int) -> RationalPolynomial:
    """Survival function for alpha = 1 after explicit Laplace inversion.

    ``Q(x) = Gamma(n+1) Gamma(n^2+n) sum_{j=0}^{n} x^j (1-nx)^{n^2+n-j-1}
    / (Gamma(j+1)^2 Gamma(n-j+1) Gamma(n^2+n-j))``, expanded in x.
    """
    f = math.factorial
    N = n * n + n
    one_minus = RationalPolynomial([1, -n])
    total = RationalPolynomial()
    for j in range(n + 1):
        c = Fraction(f(n) * f(N - 1), f(j) ** 2 * f(n - j)) * _inv_gamma_int(N - j)
        if c:
            total = total + (one_minus ** (N - j - 1)).shift(j) * c
    return total


def clz_alpha1_check(n: int) -> bool:
    """Recurrence-based fixed-trace form for ``m = n + 1`` equals both
    the directly coded alpha = 1 density and ``-dQ/dx``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    form = ft_closed_form(EnsembleParams(n, n + 1))
    direct = clz_alpha1_prefactors(n)
    if {j: a for j, a in form.prefactors.items() if a} != {j: a for j, a in direct.items() if a}:
        return False
    from_survival = -clz_survival_polynomial(n).derivative()
    return form.polynomial() == from_survival
