"""Tracy-Widom (beta = 2) law and the soft-edge rescaling of the smallest eigenvalue.

``F2(s) = det(I - K_Ai)`` on ``L^2(s, inf)`` is evaluated by Nystrom
discretisation on Gauss-Legendre nodes pushed to ``(s, inf)`` through
``x = s - scale * log(1 - t)``.  The density is the derivative of ``F2`` by
central differences with one Richardson step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .exact import EnsembleParams, SminClosedForm, eval_density
from .fixed_trace import FTSminClosedForm, eval_ft_density
from .grid import GridDensity

__all__ = [
    "TWScaling",
    "tw_scaling",
    "QuadratureError",
    "airy_kernel",
    "tw2_cdf",
    "tw2_density",
    "tw2_grid_density",
    "rescaled_smin_density",
    "DEFAULT_NODES",
    "GRID_RANGE",
]

DEFAULT_NODES = 60
MAP_SCALE = 2.0
DIFF_STEP = 1e-3
GRID_RANGE = (-10.0, 6.0)
DOUBLING_TOL = 1e-10


class QuadratureError(ArithmeticError):
    pass


@dataclass(frozen=True)
class TWScaling:
    eta_shift: float
    sigma: float


def tw_scaling(params: EnsembleParams) -> TWScaling:
    """``eta = (sqrt n - sqrt m)**2``, ``sigma = (sqrt n - sqrt m)(1/sqrt n - 1/sqrt m)**(1/3)``."""
    if params.m == params.n:
        raise ValueError("soft-edge scaling needs m > n")
    rn, rm = math.sqrt(params.n), math.sqrt(params.m)
    sigma = (rn - rm) * np.cbrt(1 / rn - 1 / rm)
    return TWScaling(eta_shift=(rn - rm) ** 2, sigma=float(sigma))


def airy_kernel(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """``(Ai(x) Ai'(y) - Ai'(x) Ai(y)) / (x - y)``, with ``Ai'(x)**2 - x Ai(x)**2`` on the diagonal."""
    ax, apx, _, _ = special.airy(x)
    ay, apy, _, _ = special.airy(y)
    dx = x[:, None] - y[None, :]
    same = dx == 0
    num = ax[:, None] * apy[None, :] - apx[:, None] * ay[None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        k = np.where(same, 0.0, num / np.where(same, 1.0, dx))
    diag = apx**2 - x * ax**2
    return np.where(same, diag[:, None] * np.ones_like(dx), k)


def _nodes(order: int):
    t, w = np.polynomial.legendre.leggauss(order)
    t = 0.5 * (t + 1)
    w = 0.5 * w
    return -MAP_SCALE * np.log1p(-t), w * MAP_SCALE / (1 - t)


def _f2(s: float, order: int) -> float:
    u, w = _nodes(order)
    x = s + u
    sw = np.sqrt(w)
    mat = np.eye(order) - sw[:, None] * airy_kernel(x, x) * sw[None, :]
    return float(np.linalg.det(mat))


def tw2_cdf(s, nodes: int = DEFAULT_NODES, check: bool = False):
    """``F2(s)``; with ``check`` the value is recomputed on twice the nodes."""
    arr = np.atleast_1d(np.asarray(s, dtype=float))
    out = np.array([_f2(v, nodes) for v in arr])
    if check:
        ref = np.array([_f2(v, 2 * nodes) for v in arr])
        worst = float(np.max(np.abs(ref - out)))
        if worst > DOUBLING_TOL:
            raise QuadratureError(f"F2 changed by {worst:.3e} when doubling {nodes} nodes")
    return float(out[0]) if np.ndim(s) == 0 else out


def tw2_density(s, nodes: int = DEFAULT_NODES, h: float = DIFF_STEP):
    """``F2'(s)`` by central differences at ``h`` and ``h/2`` with Richardson extrapolation."""
    arr = np.atleast_1d(np.asarray(s, dtype=float))
    out = np.empty_like(arr)
    for i, v in enumerate(arr):
        d1 = (_f2(v + h, nodes) - _f2(v - h, nodes)) / (2 * h)
        d2 = (_f2(v + h / 2, nodes) - _f2(v - h / 2, nodes)) / h
        out[i] = (4 * d2 - d1) / 3
    out = np.maximum(out, 0.0)
    return float(out[0]) if np.ndim(s) == 0 else out


def tw2_grid_density(grid, nodes: int = DEFAULT_NODES, check: bool = True) -> GridDensity:
    xs = np.asarray(grid, dtype=float)
    lo, hi = GRID_RANGE
    if xs.size and (xs.min() < lo or xs.max() > hi):
        raise ValueError(f"grid must lie within [{lo}, {hi}]")
    if check:
        tw2_cdf(xs[:: max(1, xs.size // 16)], nodes, check=True)
    return GridDensity(xs, tw2_density(xs, nodes), {"kind": "tracy-widom-2", "nodes": nodes})


def rescaled_smin_density(form, scaling: TWScaling, grid) -> GridDensity:
    """Smallest-eigenvalue density in soft-edge coordinates ``x = (lambda - eta) / sigma``."""
    xs = np.asarray(grid, dtype=float)
    sig, eta = scaling.sigma, scaling.eta_shift
    lam = sig * xs + eta
    out = np.zeros_like(xs)
    ok = lam >= 0
    if isinstance(form, FTSminClosedForm):
        nm = form.params.nm
        out[ok] = -sig / nm * np.asarray(eval_ft_density(form, lam[ok] / nm))
        kind = "rescaled-fixed-trace"
    elif isinstance(form, SminClosedForm):
        out[ok] = -sig * np.asarray(eval_density(form, lam[ok]))
        kind = "rescaled-regular"
    else:
        raise TypeError("expected a closed form")
    meta = {"kind": kind, "n": form.params.n, "m": form.params.m, "eta_shift": eta, "sigma": sig}
    return GridDensity(xs, out, meta)
