"""One-level (marginal) eigenvalue densities.

``marginal_regular`` uses the two-term Laguerre form
``Gamma(n)/Gamma(m) e^-x x^a [L_{n-1}^a L_n^{a+1} - L_n^a L_{n-1}^{a+1}]`` with
Laguerre values from the upward three-term recurrence; the Laguerre-square
sum is kept alongside as ``marginal_regular_sum``.

``marginal_ft`` evaluates the fixed-trace density as a sum over ``i`` of
terminating Gauss hypergeometric series in ``z = mu / (mu - 1)``.  Because
``z`` enters as ``z**k``, every term collapses to ``c * mu**p (1 - mu)**(nm-2-p)``,
so the coefficients are collected exactly once and evaluated in log domain.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

import numpy as np

from ._terms import TermSum
from .exact import EnsembleParams
from .grid import GridDensity

__all__ = [
    "laguerre_values",
    "marginal_regular",
    "marginal_regular_sum",
    "ft_marginal_coefficients",
    "marginal_ft",
    "marginal_scaled",
    "marginal_mp",
    "mp_edges",
    "grid_density",
]

_RESCALE = 1e150
CANCELLATION_LIMIT = 1e7


def _as_array(x):
    arr = np.asarray(x, dtype=float)
    return arr, arr.ndim == 0


def laguerre_values(degree: int, a: float, x) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """``(L_{degree-1}^a(x), L_degree^a(x), log_scale)`` with true values ``v * exp(log_scale)``.

    ``L_{-1}`` is taken as zero.  Both values share one scale, rescaled
    whenever they grow past ``1e150``.
    """
    x = np.asarray(x, dtype=float)
    prev = np.zeros_like(x)
    cur = np.ones_like(x)
    log_scale = np.zeros_like(x)
    for k in range(degree):
        nxt = ((2 * k + 1 + a - x) * cur - (k + a) * prev) / (k + 1)
        prev, cur = cur, nxt
        big = np.abs(cur) > _RESCALE
        if np.any(big):
            prev = np.where(big, prev / _RESCALE, prev)
            cur = np.where(big, cur / _RESCALE, cur)
            log_scale = log_scale + np.where(big, math.log(_RESCALE), 0.0)
    return prev, cur, log_scale


def _check_nonneg(arr):
    if np.any(arr < 0) or np.any(np.isnan(arr)):
        raise ValueError("lambda must be non-negative")


def _log_power(x, a):
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(a == 0, 0.0, a * np.log(x))


def marginal_regular(params: EnsembleParams, lam):
    """One-level density of ``W``, two-term Laguerre form."""
    arr, scalar = _as_array(lam)
    _check_nonneg(arr)
    n, alpha = params.n, params.alpha
    p0, p1, s0 = laguerre_values(n, alpha, arr)
    q0, q1, s1 = laguerre_values(n, alpha + 1, arr)
    bracket = p0 * q1 - p1 * q0
    with np.errstate(divide="ignore"):
        logb = np.log(np.maximum(bracket, 0.0))
    logp = math.lgamma(n) - math.lgamma(params.m) - arr + _log_power(arr, alpha) + logb + s0 + s1
    out = np.exp(logp)
    return float(out) if scalar else out


def marginal_regular_sum(params: EnsembleParams, lam):
    """One-level density of ``W`` as ``(1/n) e^-x x^a sum_j j!/(j+a)! (L_j^a)^2``."""
    arr, scalar = _as_array(lam)
    _check_nonneg(arr)
    n, alpha = params.n, params.alpha
    base = -arr + _log_power(arr, alpha) - math.log(n)
    total = np.zeros_like(arr)
    prev = np.zeros_like(arr)
    cur = np.ones_like(arr)
    for j in range(n):
        # exact zeros of L_j give log 0 = -inf, which contributes 0
        with np.errstate(divide="ignore"):
            total += np.exp(2 * np.log(np.abs(cur)) + math.lgamma(j + 1) - math.lgamma(j + alpha + 1) + base)
        prev, cur = cur, ((2 * j + 1 + alpha - arr) * cur - (j + alpha) * prev) / (j + 1)
    return float(total) if scalar else total


def _rising(a: int, k: int) -> int:
    out = 1
    for t in range(k):
        out *= a + t
    return out


@lru_cache(maxsize=64)
def ft_marginal_coefficients(n: int, m: int) -> tuple:
    """Exact ``c_p`` with ``p_F(mu) = sum_p c_p mu**p (1 - mu)**(nm - 2 - p)``.

    Returned as a tuple of ``(p, Fraction)`` pairs, zero entries dropped.
    """
    params = EnsembleParams(n, m)
    alpha, nm = params.alpha, params.nm
    if n == 1:
        return ()
    gc = math.factorial(alpha)  # Gamma(alpha + 1) in the hypergeometric normalisation
    coeffs: dict[int, Fraction] = {}
    for i in range(n):
        # Gamma(m+1)/Gamma(i+a+2) and Gamma(nm)/Gamma(nm-a-i-1) are integers
        k_i = Fraction(
            (-1) ** i * (math.factorial(m) // math.factorial(i + alpha + 1)) * math.perm(nm - 1, alpha + i + 1),
            n * math.factorial(i) * math.factorial(n - i - 1),
        )
        b = i - nm + alpha + 1
        for k in range(n + 1):
            # (-1)**k: the series argument is mu / (mu - 1)
            denom = (-1) ** k * _rising(alpha + 1, k) * math.factorial(k) * gc
            term = Fraction(0)
            if k <= n - 1:
                term += n * Fraction(_rising(1 - n, k) * _rising(b, k), denom)
            term -= (n - i - 1) * Fraction(_rising(-n, k) * _rising(b, k), denom)
            if term:
                p = i + alpha + k
                coeffs[p] = coeffs.get(p, Fraction(0)) + k_i * term
    return tuple((p, c) for p, c in sorted(coeffs.items()) if c)


@lru_cache(maxsize=64)
def _ft_terms(n: int, m: int) -> TermSum:
    nm = n * m
    pairs = ft_marginal_coefficients(n, m)
    return TermSum([c for _, c in pairs], [p for p, _ in pairs], [nm - 2 - p for p, _ in pairs], n=1)


def marginal_ft(params: EnsembleParams, mu):
    """One-level density of the fixed-trace ensemble on ``[0, 1)``.

    Terms are summed in double precision in log domain; points where the
    sum loses more than ~7 digits to cancellation are redone in extended
    precision.
    """
    arr, scalar = _as_array(mu)
    if np.any(arr < 0) or np.any(arr >= 1) or np.any(np.isnan(arr)):
        raise ValueError("mu must lie in [0, 1)")
    arr = np.atleast_1d(arr)
    out = np.zeros_like(arr)
    if params.n > 1:
        terms = _ft_terms(params.n, params.m)
        lx = np.log(arr, where=arr > 0, out=np.full_like(arr, -np.inf))
        ly = np.log1p(-arr)
        vals = np.zeros_like(arr)
        absvals = np.zeros_like(arr)
        for lc, s, p, q in zip(terms._logs, terms._signs, terms.p, terms.q):
            e = lc + (p * lx if p else 0.0) + q * ly
            t = np.exp(e)
            vals += s * t
            absvals += t
        with np.errstate(divide="ignore", invalid="ignore"):
            bad = (absvals > 0) & ~(absvals < CANCELLATION_LIMIT * np.abs(vals))
        for idx in zip(*np.nonzero(bad)):
            vals[idx] = float(terms.value(float(arr[idx])))
        out = np.maximum(vals, 0.0)
    return float(out[0]) if scalar else out


def marginal_scaled(params: EnsembleParams, mu):
    """``mn p(mn mu)``: one-level density of ``W / mn``."""
    arr, scalar = _as_array(mu)
    nm = params.nm
    out = nm * np.asarray(marginal_regular(params, nm * arr))
    return float(out) if scalar else out


def mp_edges(params: EnsembleParams) -> tuple[float, float]:
    """Squared-edge support ``(1 -+ sqrt(n/m))**2 / n``."""
    r = math.sqrt(params.n / params.m)
    return (1 - r) ** 2 / params.n, (1 + r) ** 2 / params.n


def marginal_mp(params: EnsembleParams, mu):
    """Marcenko-Pastur approximation ``(m/2pi) sqrt((mu+ - mu)(mu - mu-)) / mu``."""
    arr, scalar = _as_array(mu)
    lo, hi = mp_edges(params)
    inside = (arr > lo) & (arr < hi) & (arr > 0)
    out = np.zeros_like(arr)
    x = arr[inside]
    out[inside] = params.m / (2 * math.pi) * np.sqrt((hi - x) * (x - lo)) / x
    return float(out) if scalar else out


_KINDS = {
    "regular": marginal_regular,
    "fixed-trace": marginal_ft,
    "scaled": marginal_scaled,
    "marchenko-pastur": marginal_mp,
}


def grid_density(params: EnsembleParams, kind: str, xs) -> GridDensity:
    try:
        fn = _KINDS[kind]
    except KeyError:
        raise ValueError(f"unknown marginal kind {kind!r}; choose from {sorted(_KINDS)}") from None
    xs = np.asarray(xs, dtype=float)
    return GridDensity(xs, fn(params, xs), {"n": params.n, "m": params.m, "kind": kind})
