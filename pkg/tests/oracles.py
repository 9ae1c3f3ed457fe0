"""Independent reference computations used by the tests.

None of these share code paths with the library's evaluation routines:
densities are integrated with mpmath quadrature, polynomials are expanded
with sympy, and matrix functions come from scipy.linalg.expm.
"""

from __future__ import annotations

import json
import math
from fractions import Fraction
from pathlib import Path

import mpmath
import numpy as np
import sympy as sp
from scipy.linalg import expm
from sympy.parsing.sympy_parser import (
    implicit_multiplication_application,
    parse_expr,
    standard_transformations,
)

DATA = Path(__file__).parent / "data"
X = sp.Symbol("x")
_TRANSFORMS = standard_transformations + (implicit_multiplication_application,)


def golden_rows(kind: str) -> list:
    return json.loads((DATA / "golden_tables.json").read_text())[kind]


def golden_coefficients(expr: str) -> list[Fraction]:
    """Ascending exact coefficients of a tabulated polynomial."""
    poly = sp.Poly(sp.expand(parse_expr(expr, local_dict={"x": X}, transformations=_TRANSFORMS)), X)
    out = []
    for c in reversed(poly.all_coeffs()):
        r = sp.Rational(c)
        out.append(Fraction(int(r.p), int(r.q)))
    return out


def sympy_regular_density(n: int, m: int):
    """Smallest-eigenvalue density of W for alpha = 0 and 1 from their closed forms."""
    a = m - n
    if a == 0:
        return n * sp.exp(-n * X)
    if a == 1:
        f = sp.factorial
        s = sum(f(n + 1) / (f(n - j + 1) * f(j) * f(j - 2)) * X ** (j - 1) for j in range(2, n + 2))
        return s * sp.exp(-n * X)
    raise ValueError("only alpha = 0, 1")


def quad(f, a, b, prec=80):
    with mpmath.workprec(prec):
        return mpmath.quad(f, [a, b])


def laplace_marginal_ft(n: int, m: int) -> dict:
    """Fixed-trace one-level density coefficients from the regular one by term-wise Laplace inversion.

    The regular density ``(1/n) e^-x x^a sum_j j!/(j+a)! L_j^a(x)^2`` is expanded
    exactly in sympy; every ``x^k e^-x`` becomes
    ``Gamma(nm) / Gamma(nm-k-1) mu^k (1-mu)^(nm-k-2)``.
    """
    a = m - n
    q = sum(
        sp.factorial(j) / sp.factorial(j + a) * sp.assoc_laguerre(j, a, X) ** 2 for j in range(n)
    )
    poly = sp.Poly(sp.expand(q * X**a / n), X)
    nm = n * m
    out = {}
    for (k,), c in poly.terms():
        r = sp.Rational(c) * sp.factorial(nm - 1) / sp.factorial(nm - k - 2)
        out[k] = Fraction(int(r.p), int(r.q))
    return out


def jy_matrix(j: float) -> np.ndarray:
    """``J_y`` in the ascending ``m = -j .. j`` basis."""
    size = int(round(2 * j)) + 1
    ms = np.arange(size) - j
    jp = np.zeros((size, size))
    for i, mm in enumerate(ms[:-1]):
        jp[i + 1, i] = math.sqrt(j * (j + 1) - mm * (mm + 1))
    return (jp - jp.T) / 2j


def rotation_y(j: float, angle: float) -> np.ndarray:
    return expm(-1j * angle * jy_matrix(j))
