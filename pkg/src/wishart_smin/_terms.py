"""Log-domain evaluation of exact term sums.

A :class:`TermSum` holds exact rational coefficients ``c_k`` with integer
exponents ``p_k`` and ``q_k`` and evaluates

    sum_k c_k x**p_k (1 - n x)**q_k exp(-rate x)

one point at a time in extended precision.  Each term is assembled as
``sign * exp(log|c_k| + p_k log x + q_k log(1 - n x) - rate x)``; terms more
than ``PRUNE_NATS`` below the largest are skipped.
"""

from __future__ import annotations

import math
import sys
from fractions import Fraction

import mpmath
import numpy as np
from gmpy2 import mpq

_MPQ = type(mpq(0))

EXTENDED_PREC = 160
PRUNE_NATS = 130.0


def _as_mpq(c):
    if isinstance(c, _MPQ):
        return c
    if isinstance(c, Fraction):
        return mpq(c.numerator, c.denominator)
    return mpq(c)


def _mp_log_abs(q):
    return mpmath.log(abs(mpmath.mpf(q.numerator))) - mpmath.log(mpmath.mpf(q.denominator))


class TermSum:
    def __init__(self, coeffs, p, q=None, n: int = 1, rate: float = 0.0, prec: int = EXTENDED_PREC):
        qs = q if q is not None else [0] * len(p)
        pairs = [(c, pk, qk) for c, pk, qk in zip(coeffs, p, qs) if c != 0]
        self.coeffs = [_as_mpq(c) for c, _, _ in pairs]
        self.p = np.array([pk for _, pk, _ in pairs], dtype=float)
        self.q = np.array([qk for _, _, qk in pairs], dtype=float)
        self.n = n
        self.rate = rate
        self.prec = prec
        with mpmath.workprec(prec):
            self._mp_logs = [_mp_log_abs(c) for c in self.coeffs]
        self._logs = np.array([float(v) for v in self._mp_logs])
        self._signs = np.array([1 if c > 0 else -1 for c in self.coeffs])

    def __len__(self) -> int:
        return len(self.coeffs)

    def value(self, x: float):
        """The sum at ``x`` as an ``mpmath.mpf`` (``x`` in the domain of every term)."""
        if not self.coeffs:
            return mpmath.mpf(0)
        with mpmath.workprec(self.prec):
            if isinstance(x, Fraction):
                xm = mpmath.mpf(x.numerator) / x.denominator
                y = mpmath.mpf((1 - self.n * x).numerator) / (1 - self.n * x).denominator
            else:
                xm = mpmath.mpf(x)
                y = 1 - self.n * xm
                # a double at the right edge may land a rounding step past it
                if y < 0 and -y <= 4 * self.n * abs(xm) * sys.float_info.epsilon:
                    y = mpmath.mpf(0)
            approx = self._logs.copy()
            # zero bases only keep zero-exponent terms
            if xm == 0:
                mask = self.p == 0
            else:
                mask = np.ones(len(self.p), dtype=bool)
                approx += self.p * math.log(float(x))
            if y == 0:
                mask &= self.q == 0
            elif np.any(self.q != 0):
                if y < 0:
                    raise ValueError("1 - n x must be non-negative")
                approx += self.q * math.log(float(y))
            if not np.any(mask):
                return mpmath.mpf(0)
            top = np.max(approx[mask])
            keep = np.nonzero(mask & (approx > top - PRUNE_NATS))[0]
            lx = mpmath.log(xm) if xm > 0 else None
            ly = mpmath.log(y) if y > 0 else None
            lin = -mpmath.mpf(self.rate) * xm
            acc = mpmath.mpf(0)
            for k in keep:
                e = self._mp_logs[k] + lin
                if self.p[k]:
                    e += int(self.p[k]) * lx
                if self.q[k]:
                    e += int(self.q[k]) * ly
                t = mpmath.exp(e)
                acc += t if self._signs[k] > 0 else -t
            return +acc

    def values(self, xs) -> np.ndarray:
        xs = np.asarray(xs, dtype=float)
        out = np.empty_like(xs)
        for idx, xv in np.ndenumerate(xs):
            out[idx] = float(self.value(xv))
        return out


def tail_sums(weights: dict) -> list:
    """``T_k = sum_{j > k} w_j`` for ``k = 0 .. max(j) - 1``."""
    top = max(weights)
    out = [mpq(0)] * top
    acc = mpq(0)
    for k in range(top - 1, -1, -1):
        acc += weights.get(k + 1, 0)
        out[k] = acc
    return out
