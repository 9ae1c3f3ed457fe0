"""Seeded sampling of the smallest eigenvalue of ``W = A A^dagger`` and ``W / tr W``.

Every draw owns an independent Philox stream keyed by ``(seed, draw index)``,
so a sample set is reproducible bit for bit and any slice of it can be
regenerated on its own.  Gaussians come from numpy's ziggurat sampler.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field

import numpy as np

from .exact import EnsembleParams
from .grid import GridDensity, format_float

__all__ = [
    "SampleSet",
    "EigensolverError",
    "draw_rng",
    "sample_ginibre",
    "smallest_eig_samples",
    "ks_statistic",
    "histogram",
    "histogram_errors",
]

_MASK64 = (1 << 64) - 1
BATCH = 4096


class EigensolverError(ArithmeticError):
    def __init__(self, draw: int, cause: Exception):
        super().__init__(f"eigensolver failed at draw {draw}: {cause}")
        self.draw = draw


@dataclass
class SampleSet:
    values: np.ndarray
    params: EnsembleParams
    fixed_trace: bool
    seed: int
    count: int = field(init=False)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        self.count = int(self.values.size)
        if self.count < 1:
            raise ValueError("empty sample set")
        if np.any(self.values < 0):
            raise ValueError("negative smallest eigenvalue")
        if self.fixed_trace and np.any(self.values > 1.0 / self.params.n):
            raise ValueError("fixed-trace sample above 1/n")

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(f"# n={self.params.n}\n# m={self.params.m}\n")
        buf.write(f"# fixed_trace={str(self.fixed_trace).lower()}\n# seed={self.seed}\n# count={self.count}\n")
        buf.write("smallest_eigenvalue\n")
        for v in self.values:
            buf.write(format_float(v) + "\n")
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "SampleSet":
        meta = {}
        values = []
        for line in text.splitlines():
            if line.startswith("#"):
                key, _, val = line[1:].strip().partition("=")
                meta[key] = val
            elif line and line != "smallest_eigenvalue":
                values.append(float(line))
        params = EnsembleParams(int(meta["n"]), int(meta["m"]))
        return cls(np.array(values), params, meta["fixed_trace"] == "true", int(meta["seed"]))


def draw_rng(seed: int, draw: int) -> np.random.Generator:
    """Independent generator for one draw: Philox keyed by the seed, counter by the draw."""
    return np.random.Generator(
        np.random.Philox(key=[seed & _MASK64, 0], counter=[0, 0, draw & _MASK64, 0])
    )


def sample_ginibre(params: EnsembleParams, rng: np.random.Generator) -> np.ndarray:
    """``n x m`` complex Gaussian matrix, real and imaginary parts of variance 1/2."""
    z = rng.standard_normal((2, params.n, params.m))
    return (z[0] + 1j * z[1]) * math.sqrt(0.5)


def _smallest(ws: np.ndarray, fixed_trace: bool, first: int) -> np.ndarray:
    try:
        ev = np.linalg.eigvalsh(ws)
    except np.linalg.LinAlgError:
        for k, w in enumerate(ws):
            try:
                np.linalg.eigvalsh(w)
            except np.linalg.LinAlgError as exc:
                raise EigensolverError(first + k, exc) from exc
        raise
    lam = ev[:, 0]
    traces = np.real(np.trace(ws, axis1=1, axis2=2))
    # round-off can push a zero eigenvalue slightly negative
    tol = 64 * np.finfo(float).eps * np.abs(ev).max(axis=1)
    lam = np.where((lam < 0) & (lam > -tol), 0.0, lam)
    if fixed_trace:
        lam = lam / traces
    return lam


def smallest_eig_samples(
    params: EnsembleParams, count: int, seed: int, fixed_trace: bool = False
) -> SampleSet:
    if count < 1:
        raise ValueError("count must be >= 1")
    n, m = params.n, params.m
    out = np.empty(count)
    for start in range(0, count, BATCH):
        stop = min(count, start + BATCH)
        a = np.empty((stop - start, n, m), dtype=complex)
        for k in range(start, stop):
            a[k - start] = sample_ginibre(params, draw_rng(seed, k))
        ws = a @ np.conj(np.swapaxes(a, 1, 2))
        out[start:stop] = _smallest(ws, fixed_trace, start)
    if fixed_trace:
        # a single eigenvalue is its own trace; keep it exactly 1/n-bounded
        out = np.minimum(out, 1.0 / n)
    return SampleSet(out, params, fixed_trace, seed)


def ks_statistic(samples, cdf) -> float:
    """``sup_i max(|i/N - F(x_i)|, |(i-1)/N - F(x_i)|)`` over the sorted sample."""
    values = samples.values if isinstance(samples, SampleSet) else np.asarray(samples, dtype=float)
    x = np.sort(values)
    if x.size == 0:
        raise ValueError("empty sample")
    f = np.asarray(cdf(x), dtype=float)
    big_n = x.size
    i = np.arange(1, big_n + 1)
    return float(max(np.max(np.abs(i / big_n - f)), np.max(np.abs((i - 1) / big_n - f))))


def histogram(samples, bins: int = 50, range_=None) -> GridDensity:
    """Area-normalised histogram evaluated at bin centres."""
    if bins < 2:
        raise ValueError("bins must be >= 2")
    values = samples.values if isinstance(samples, SampleSet) else np.asarray(samples, dtype=float)
    counts, edges = np.histogram(values, bins=bins, range=range_)
    widths = np.diff(edges)
    dens = counts / (counts.sum() * widths)
    meta = {"bins": bins, "edges": edges.tolist(), "count": int(values.size)}
    if isinstance(samples, SampleSet):
        meta.update(n=samples.params.n, m=samples.params.m, fixed_trace=samples.fixed_trace, seed=samples.seed)
    return GridDensity(0.5 * (edges[:-1] + edges[1:]), dens, meta)


def histogram_errors(hist: GridDensity) -> np.ndarray:
    """Binomial standard error of each bin height."""
    edges = np.asarray(hist.metadata["edges"])
    total = hist.metadata["count"]
    widths = np.diff(edges)
    p = hist.ys * widths
    return np.sqrt(p * (1 - p) / total) / widths
