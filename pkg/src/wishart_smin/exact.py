"""Exact smallest-eigenvalue density of the complex Wishart-Laguerre ensemble.

The density of the smallest eigenvalue of ``W = A A^dagger`` (``A`` an
``n x m`` complex Gaussian matrix) has the form

    f(x) = c_{n,m} exp(-n x) x**alpha g_{n,m}(x) = sum_j h_j x**(j-1) exp(-n x),

with ``alpha = m - n`` and ``g_{n,m}`` a polynomial of degree
``alpha (n - 1)``.  ``g_{n,m}`` is built from ``g_{n,n} = 1`` by one pass of
a three-term recurrence per unit of ``alpha``; every pass is carried out in
exact integer arithmetic.
"""

from __future__ import annotations

import math
import threading
from collections import OrderedDict
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from numbers import Real

import mpmath
import numpy as np
from gmpy2 import mpq, mpz
from scipy import special

from ._terms import EXTENDED_PREC, TermSum, tail_sums
from .polynomial import RationalPolynomial

__all__ = [
    "EnsembleParams",
    "SminClosedForm",
    "NormalizationError",
    "norm_constant",
    "recurrence_g",
    "smin_closed_form",
    "eval_density",
    "cdf",
    "moment",
    "laguerre_polynomial",
    "laguerre_identity_check",
    "alpha1_coefficients",
    "form_to_json",
    "form_from_json",
    "EXTENDED_THRESHOLD",
    "EXTENDED_PREC",
]

# nm above which densities are assembled term-wise in extended precision
EXTENDED_THRESHOLD = 400


class NormalizationError(ArithmeticError):
    """The exact unit-normalisation identity failed for a computed form."""


@dataclass(frozen=True)
class EnsembleParams:
    """Matrix dimension ``n`` and degrees of freedom ``m`` (``m >= n``)."""

    n: int
    m: int

    def __post_init__(self):
        for name in ("n", "m"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, (int, np.integer)):
                raise TypeError(f"{name} must be an integer, got {v!r}")
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        if self.m < self.n:
            raise ValueError(f"m must be >= n, got n={self.n}, m={self.m}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "m", int(self.m))

    @property
    def alpha(self) -> int:
        return self.m - self.n

    @property
    def nm(self) -> int:
        return self.n * self.m


def norm_constant(params: EnsembleParams) -> Fraction:
    """``c_{n,m} = prod_{i<n} Gamma(i+2)/Gamma(i+alpha) / (Gamma(n) Gamma(m))``."""
    n, a = params.n, params.alpha
    num = 1
    den = math.factorial(n - 1) * math.factorial(params.m - 1)
    for i in range(1, n):
        num *= math.factorial(i + 1)
        den *= math.factorial(i + a - 1)
    return Fraction(num, den)


# ---------------------------------------------------------------------------
# recurrence


def _recurrence_pass(g: list, den, n: int, m: int):
    """Map the numerators of ``g_{n,m-1}`` (over ``den``) to ``g_{n,m}``.

    Works on ``(n - i) S_i`` in integers and divides by ``n - i`` when that
    is exact, otherwise the common denominator absorbs it.
    """
    prev = None
    prev_den = den
    cur, cur_den = g, den
    zero = mpz(0)
    for i in range(1, n):
        k = n - i
        kc = k * (m - i + 1)
        new = [(kc - t) * v for t, v in enumerate(cur)]
        new.append(zero)
        for t, v in enumerate(cur):
            new[t + 1] += k * v
        if i > 1:
            f = (i - 1) * (m - i)
            ratio = cur_den // prev_den
            if ratio != 1:
                f = f * ratio
            for t, v in enumerate(prev):
                new[t + 1] += f * v
        qr = [divmod(v, k) for v in new]
        if any(r for _, r in qr):
            new_den = cur_den * k
        else:
            new = [q for q, _ in qr]
            new_den = cur_den
        prev, prev_den = cur, cur_den
        cur, cur_den = new, new_den
    while cur and cur[-1] == 0:
        cur.pop()
    return cur, cur_den


class _GCache:
    """Intermediate ``g_{n,n+k}`` numerators keyed by ``(n, alpha)``.

    Reads are lock-free dictionary lookups; inserts and evictions take the
    lock.  Entries are evicted least-recently-inserted once the stored bit
    count exceeds ``budget_bits``, except the newest entry for every ``n``.
    """

    def __init__(self, budget_bits: int = 2**33):
        self.budget_bits = budget_bits
        self._data: OrderedDict = OrderedDict()
        self._bits = 0
        self._lock = threading.Lock()

    @staticmethod
    def _size(entry) -> int:
        nums, den = entry
        return sum(v.bit_length() for v in nums) + den.bit_length() + 64 * len(nums)

    def get(self, key):
        return self._data.get(key)

    def best_start(self, n: int, alpha: int):
        best = 0
        for (kn, ka) in list(self._data.keys()):
            if kn == n and best < ka <= alpha:
                best = ka
        return best

    def put(self, key, entry) -> None:
        with self._lock:
            if key in self._data:
                return
            self._data[key] = entry
            self._bits += self._size(entry)
            newest = {}
            for (kn, ka) in self._data:
                newest[kn] = max(newest.get(kn, -1), ka)
            for k in list(self._data.keys()):
                if self._bits <= self.budget_bits:
                    break
                if newest.get(k[0]) == k[1]:
                    continue
                self._bits -= self._size(self._data.pop(k))

    def clear(self) -> None:
        with self._lock:
            self._data.clear()
            self._bits = 0


_G_CACHE = _GCache()


def _g_numerators(n: int, alpha: int):
    hit = _G_CACHE.get((n, alpha))
    if hit is not None:
        return hit
    start = _G_CACHE.best_start(n, alpha)
    if start == 0:
        nums, den = [mpz(1)], mpz(1)
    else:
        nums, den = _G_CACHE.get((n, start))
        nums = list(nums)
    for a in range(start + 1, alpha + 1):
        nums, den = _recurrence_pass(nums, den, n, n + a)
        _G_CACHE.put((n, a), (tuple(nums), den))
    return tuple(nums), den


def recurrence_g(params: EnsembleParams) -> RationalPolynomial:
    """The polynomial ``g_{n,m}`` of degree ``alpha (n - 1)``."""
    if not isinstance(params, EnsembleParams):
        raise TypeError("params must be EnsembleParams")
    nums, den = _g_numerators(params.n, params.alpha)
    return RationalPolynomial.from_integers(nums, den)


# ---------------------------------------------------------------------------
# closed form


@dataclass(frozen=True, eq=False)
class SminClosedForm:
    """``f(x) = sum_j h[j] x**(j-1) exp(-n x)`` for ``j = alpha+1 .. alpha n + 1``."""

    params: EnsembleParams
    h: dict

    kind = "regular"

    @property
    def n(self) -> int:
        return self.params.n

    @property
    def m(self) -> int:
        return self.params.m

    @property
    def j_range(self) -> tuple[int, int]:
        return min(self.h), max(self.h)

    def __eq__(self, other):
        if not isinstance(other, SminClosedForm):
            return NotImplemented
        return self.params == other.params and self.h == other.h

    def __hash__(self):
        return hash((self.params, tuple(sorted(self.h.items()))))

    def polynomial(self) -> RationalPolynomial:
        """``sum_j h_j x**(j-1)``, i.e. ``f(x) exp(n x)``."""
        top = max(self.h)
        return RationalPolynomial([self.h.get(j + 1, 0) for j in range(top)])

    def weights(self) -> dict:
        """Exact mixture weights ``h_j Gamma(j) / n**j`` (they sum to 1)."""
        n = self.n
        return {j: hj * math.factorial(j - 1) / Fraction(n) ** j for j, hj in self.h.items()}

    @cached_property
    def _js(self) -> np.ndarray:
        return np.array(sorted(self.h), dtype=float)

    @cached_property
    def _float_h(self):
        vals = np.array([float(self.h[j]) for j in sorted(self.h)])
        if np.all(np.isfinite(vals)) and np.all(np.abs(vals) > 1e-290):
            return vals
        return None

    @property
    def uses_extended(self) -> bool:
        return self.params.nm > EXTENDED_THRESHOLD or self._float_h is None

    @cached_property
    def density_terms(self) -> TermSum:
        js = sorted(self.h)
        return TermSum([self.h[j] for j in js], [j - 1 for j in js], rate=self.n)

    @cached_property
    def survival_terms(self) -> TermSum:
        """``1 - F(x) = exp(-n x) sum_k T_k (n x)**k / k!`` with exact tails ``T_k``."""
        n = self.n
        top = max(self.h)
        weights = {}
        fact, npow = mpz(1), mpz(1)
        for j in range(1, top + 1):
            if j > 1:
                fact *= j - 1
            npow *= n
            if j in self.h:
                q = self.h[j]
                weights[j] = mpq(mpz(q.numerator) * fact, mpz(q.denominator) * npow)
        tails = tail_sums(weights)
        coeffs = []
        fact, npow = mpz(1), mpz(1)
        for k, t in enumerate(tails):
            if k:
                fact *= k
                npow *= n
            coeffs.append(t * npow / fact)
        return TermSum(coeffs, range(len(coeffs)), rate=n)

    @cached_property
    def _float_weights(self) -> np.ndarray:
        return np.array([float(w) for _, w in sorted(self.weights().items())])


def _check_normalisation(nums, den, c: Fraction, n: int, alpha: int) -> None:
    # sum_t c nums[t]/den (t+alpha)! / n**(t+alpha+1) == 1
    top = len(nums) - 1
    fact = mpz(math.factorial(alpha))
    total = mpz(0)
    npow = mpz(n) ** top
    for t, v in enumerate(nums):
        if t:
            fact *= t + alpha
            npow //= n
        total += v * fact * npow
    lhs = total * c.numerator
    rhs = den * c.denominator * mpz(n) ** (top + alpha + 1)
    if lhs != rhs:
        raise NormalizationError(
            f"normalisation identity failed for n={n}, alpha={alpha}: "
            f"sum_j h_j Gamma(j)/n^j = {mpq(lhs, rhs)}"
        )


def smin_closed_form(params: EnsembleParams) -> SminClosedForm:
    """Exact coefficients ``h_j`` of the smallest-eigenvalue density."""
    nums, den = _g_numerators(params.n, params.alpha)
    c = norm_constant(params)
    _check_normalisation(nums, den, c, params.n, params.alpha)
    a = params.alpha
    h = {}
    for t, v in enumerate(nums):
        q = mpq(v * c.numerator, den * c.denominator)
        h[t + a + 1] = Fraction(int(q.numerator), int(q.denominator))
    return SminClosedForm(params, h)


# ---------------------------------------------------------------------------
# numerics


def _as_array(x):
    arr = np.asarray(x, dtype=float)
    return arr, arr.ndim == 0


def eval_density(form: SminClosedForm, x):
    """Numerical value of ``f(x)``; scalar in, scalar out; arrays supported."""
    arr, scalar = _as_array(x)
    if np.any(arr < 0) or np.any(np.isnan(arr)):
        raise ValueError("density is defined for x >= 0 only")
    n, a = form.n, form.params.alpha
    if not form.uses_extended:
        coeffs = form._float_h
        acc = np.zeros_like(arr)
        for cf in coeffs[::-1]:
            acc = acc * arr + cf
        out = acc * np.exp(-n * arr) * arr ** a
    else:
        out = form.density_terms.values(arr)
    out = np.maximum(out, 0.0)
    return float(out) if scalar else out


def cdf(form: SminClosedForm, x):
    """``F(x) = sum_j h_j gamma(j, n x) / n**j`` (lower incomplete gamma)."""
    arr, scalar = _as_array(x)
    if np.any(arr < 0) or np.any(np.isnan(arr)):
        raise ValueError("cdf is defined for x >= 0 only")
    n = form.n
    js = form._js
    if not form.uses_extended:
        w = form._float_weights
        out = np.zeros_like(arr)
        for j, wj in zip(js, w):
            out += wj * special.gammainc(j, n * arr)
    else:
        terms = form.survival_terms
        out = np.empty_like(arr)
        with mpmath.workprec(terms.prec):
            for idx, xv in np.ndenumerate(arr):
                out[idx] = 1.0 if np.isinf(xv) else float(1 - terms.value(xv))
    out = np.clip(out, 0.0, 1.0)
    return float(out) if scalar else out


def _is_integer(eta) -> bool:
    if isinstance(eta, (int, np.integer, Fraction)):
        return Fraction(eta).denominator == 1
    return float(eta).is_integer()


def moment(form: SminClosedForm, eta):
    """``<x**eta> = sum_j h_j Gamma(j+eta) / n**(j+eta)``.

    Integer orders give an exact ``Fraction``; other real orders an
    ``mpmath.mpf`` evaluated through log-gamma.
    """
    if not isinstance(eta, (Real, Fraction)):
        raise TypeError("eta must be real")
    a = form.params.alpha
    if not eta > -a - 1:
        raise ValueError(f"moment order must exceed -alpha-1 = {-a - 1}, got {eta}")
    n = form.n
    if _is_integer(eta):
        e = int(eta)
        total = Fraction(0)
        for j, hj in form.h.items():
            total += hj * math.factorial(j + e - 1) / Fraction(n) ** (j + e)
        return total
    terms = form.density_terms
    with mpmath.workprec(EXTENDED_PREC):
        e = mpmath.mpf(eta)
        ln = mpmath.log(n)
        acc = mpmath.mpf(0)
        for pk, lh, sg in zip(terms.p, terms._mp_logs, terms._signs):
            j = int(pk) + 1
            t = mpmath.exp(lh + mpmath.loggamma(j + e) - (j + e) * ln)
            acc += t if sg > 0 else -t
    return +acc


# ---------------------------------------------------------------------------
# Laguerre cross-checks


def laguerre_polynomial(degree: int, a: int, negate_argument: bool = False) -> RationalPolynomial:
    """Exact ``L_degree^{(a)}(x)``, or ``L_degree^{(a)}(-x)`` when negated."""
    coeffs = []
    for i in range(degree + 1):
        c = Fraction(math.comb(degree + a, degree - i), math.factorial(i))
        if not negate_argument and i % 2:
            c = -c
        coeffs.append(c)
    return RationalPolynomial(coeffs)


def laguerre_identity_check(n: int) -> bool:
    """``g_{n,n+1}(x) == Gamma(n) L_{n-1}^{(2)}(-x)`` as exact polynomials."""
    if n < 1:
        raise ValueError("n must be >= 1")
    lhs = recurrence_g(EnsembleParams(n, n + 1))
    rhs = laguerre_polynomial(n - 1, 2, negate_argument=True) * math.factorial(n - 1)
    return lhs == rhs


def alpha1_coefficients(n: int) -> dict:
    """``h_j = Gamma(n+2) / (Gamma(n-j+2) Gamma(j+1) Gamma(j-1))``, ``j = 2..n+1``."""
    f = math.factorial
    return {j: Fraction(f(n + 1), f(n - j + 1) * f(j) * f(j - 2)) for j in range(2, n + 2)}


# ---------------------------------------------------------------------------
# serialisation


def _digits(v) -> str:
    return mpz(v).digits(10)


def form_to_json(form) -> dict:
    """JSON-ready dict; numerators and denominators as decimal strings."""
    out = {"n": form.n, "m": form.m, "kind": form.kind, "coeffs": []}
    nm = form.params.nm
    for j in sorted(form.h):
        q = form.h[j]
        entry = {"j": j, "num": _digits(q.numerator), "den": _digits(q.denominator)}
        if form.kind == "fixed-trace":
            entry["exponents"] = [j - 1, nm - j - 1]
        out["coeffs"].append(entry)
    return out


def form_from_json(data: dict):
    """Inverse of :func:`form_to_json` (normalisation re-checked)."""
    params = EnsembleParams(int(data["n"]), int(data["m"]))
    h = {}
    for entry in data["coeffs"]:
        num, den = mpz(entry["num"]), mpz(entry["den"])
        h[int(entry["j"])] = Fraction(int(num), int(den))
    total = sum(hj * math.factorial(j - 1) / Fraction(params.n) ** j for j, hj in h.items())
    if total != 1:
        raise NormalizationError("serialised coefficients are not normalised")
    kind = data.get("kind", "regular")
    if kind == "regular":
        return SminClosedForm(params, h)
    if kind == "fixed-trace":
        from .fixed_trace import FTSminClosedForm

        return FTSminClosedForm(params, h)
    raise ValueError(f"unknown kind {kind!r}")


