"""Two coupled kicked tops and the Schmidt spectra of their evolved state.

The joint state is kept as an ``N1 x N2`` matrix ``Psi``.  One Floquet period is
``Psi <- V o (U1 Psi U2^T)`` with ``U_r[a, b] = exp(-i k_r a^2 / 2 j_r) d^{j_r}_{a,b}(pi/2)``
and the Hadamard phase mask ``V[a, b] = exp(-i eps a b / sqrt(j1 j2))``.
Indices run over ``-j .. +j`` ascending.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

__all__ = [
    "TopParams",
    "CoherentAngles",
    "SchmidtSpectrum",
    "EnsembleRun",
    "DEFAULT_INITIAL_CONDITIONS",
    "wigner_d_half_pi",
    "floquet_factors",
    "coherent_state",
    "initial_state",
    "step",
    "schmidt_spectrum",
    "run_ensemble",
]

RENORM_EVERY = 100
RENORM_TOL = 1e-12
SUM_TOL = 1e-10


def _half_integer(j) -> Fraction:
    jf = Fraction(j).limit_denominator(2)
    if jf != Fraction(j) or jf < 0 or (2 * jf).denominator != 1:
        raise ValueError(f"j must be a non-negative half-integer, got {j}")
    return jf


@dataclass(frozen=True)
class TopParams:
    j1: Fraction
    j2: Fraction
    k1: float
    k2: float
    eps: float

    def __post_init__(self):
        object.__setattr__(self, "j1", _half_integer(self.j1))
        object.__setattr__(self, "j2", _half_integer(self.j2))
        if self.j1 < Fraction(1, 2) or self.j2 < Fraction(1, 2):
            raise ValueError("spins must be at least 1/2")
        if self.n1 > self.n2:
            raise ValueError("need N1 <= N2 so that the reduced state lives on the first top")

    @classmethod
    def from_dims(cls, n1: int, n2: int, k1: float, k2: float, eps: float) -> "TopParams":
        return cls(Fraction(n1 - 1, 2), Fraction(n2 - 1, 2), k1, k2, eps)

    @property
    def n1(self) -> int:
        return int(2 * self.j1 + 1)

    @property
    def n2(self) -> int:
        return int(2 * self.j2 + 1)


@dataclass(frozen=True)
class CoherentAngles:
    theta: float
    phi: float

    def __post_init__(self):
        if not 0 <= self.theta <= math.pi:
            raise ValueError("theta must lie in [0, pi]")
        if not 0 <= self.phi < 2 * math.pi:
            raise ValueError("phi must lie in [0, 2 pi)")


# (top 1, top 2) per set.  Both sets start in the chaotic sea for strong
# kicks but lie on different invariant tori for weak kicks.  Points on the
# y axis are avoided: they are fixed points of the single-top map.
DEFAULT_INITIAL_CONDITIONS = {
    "A": (CoherentAngles(1.2, 3.5), CoherentAngles(1.2, 0.5)),
    "B": (CoherentAngles(0.63, 3.5), CoherentAngles(1.2, 3.5)),
}


@dataclass
class SchmidtSpectrum:
    mu: np.ndarray

    def __post_init__(self):
        self.mu = np.asarray(self.mu, dtype=float)

    @property
    def smallest(self) -> float:
        return float(self.mu[-1])


@dataclass
class EnsembleRun:
    spectra: list
    periods: list
    renormalisations: int
    max_norm_drift: float = 0.0
    extra: dict = field(default_factory=dict)

    def smallest(self) -> np.ndarray:
        return np.array([s.smallest for s in self.spectra])

    def pooled(self) -> np.ndarray:
        return np.concatenate([s.mu for s in self.spectra])


@lru_cache(maxsize=32)
def _wigner_d_cached(two_j: int) -> np.ndarray:
    j = Fraction(two_j, 2)
    size = two_j + 1
    ms = [j - k for k in range(size)][::-1]
    out = np.empty((size, size))
    f = math.factorial
    for r, mp in enumerate(ms):
        for c, m in enumerate(ms):
            jpm, jmm = int(j + mp), int(j - mp)
            jp, jm = int(j + m), int(j - m)
            d = int(mp - m)
            total = Fraction(0)
            for s in range(max(0, -d), min(jp, jmm) + 1):
                total += Fraction((-1) ** (d + s), f(jp - s) * f(s) * f(d + s) * f(jmm - s))
            # d = total * sqrt(prod factorials) * 2**-j, squared exactly then rooted
            sq = total * total * f(jpm) * f(jmm) * f(jp) * f(jm) / Fraction(2) ** two_j
            out[r, c] = math.copysign(math.sqrt(sq), total) if total else 0.0
    return out


def wigner_d_half_pi(j) -> np.ndarray:
    """``d^j_{a,b}(pi/2) = <j,a| exp(-i pi/2 J_y) |j,b>``, rows and columns ascending in ``a, b``."""
    jf = _half_integer(j)
    return _wigner_d_cached(int(2 * jf)).copy()


def _ms(j: Fraction) -> np.ndarray:
    return np.arange(int(2 * j) + 1) - float(j)


def floquet_factors(params: TopParams):
    """``(U1, U2, V)`` for one period."""
    us = []
    for j, k in ((params.j1, params.k1), (params.j2, params.k2)):
        a = _ms(j)
        phase = np.exp(-1j * k * a**2 / (2 * float(j)))
        us.append(phase[:, None] * wigner_d_half_pi(j))
    a1, a2 = _ms(params.j1), _ms(params.j2)
    v = np.exp(-1j * params.eps * np.outer(a1, a2) / math.sqrt(float(params.j1 * params.j2)))
    return us[0], us[1], v


def coherent_state(j, angles: CoherentAngles) -> np.ndarray:
    """Spin coherent state on ``m = -j .. j``; uses ``cos^(j+m) sin^(j-m)`` so the poles are exact."""
    jf = _half_integer(j)
    two_j = int(2 * jf)
    m = _ms(jf)
    c, s = math.cos(angles.theta / 2), math.sin(angles.theta / 2)
    binom = np.array([math.comb(two_j, k) for k in range(two_j + 1)], dtype=float)
    amp = np.power(c, float(jf) + m) * np.power(s, float(jf) - m) * np.sqrt(binom)
    return amp * np.exp(1j * angles.phi * (float(jf) - m))


def initial_state(params: TopParams, angles1: CoherentAngles, angles2: CoherentAngles) -> np.ndarray:
    return np.outer(coherent_state(params.j1, angles1), coherent_state(params.j2, angles2))


def step(psi: np.ndarray, factors) -> np.ndarray:
    u1, u2, v = factors
    if psi.shape != v.shape:
        raise ValueError(f"state shape {psi.shape} does not match factors {v.shape}")
    return v * (u1 @ psi @ u2.T)


def schmidt_spectrum(psi: np.ndarray) -> SchmidtSpectrum:
    """Eigenvalues of ``Psi Psi^dagger``, clamped to ``[0, 1]`` and sorted descending."""
    rho = psi @ psi.conj().T
    mu = np.clip(np.linalg.eigvalsh(rho), 0.0, 1.0)[::-1]
    total = mu.sum()
    if abs(total - 1) > SUM_TOL:
        raise ValueError(f"state is not normalised: eigenvalues sum to {total!r}")
    return SchmidtSpectrum(mu / total)


def run_ensemble(
    params: TopParams,
    angles1: CoherentAngles,
    angles2: CoherentAngles,
    skip: int = 500,
    stride: int = 20,
    count: int = 2000,
) -> EnsembleRun:
    """Spectra of ``Psi(skip + stride), Psi(skip + 2 stride), ...`` (``count`` of them)."""
    if skip < 0 or stride < 1 or count < 1:
        raise ValueError("need skip >= 0, stride >= 1, count >= 1")
    factors = floquet_factors(params)
    psi = initial_state(params, angles1, angles2)
    spectra, periods = [], []
    renorm, drift = 0, 0.0
    last = skip + stride * count
    for period in range(1, last + 1):
        psi = step(psi, factors)
        if period % RENORM_EVERY == 0:
            norm = np.linalg.norm(psi)
            drift = max(drift, abs(norm - 1))
            if abs(norm - 1) > RENORM_TOL:
                psi = psi / norm
                renorm += 1
        if period > skip and (period - skip) % stride == 0:
            try:
                spectra.append(schmidt_spectrum(psi))
            except (ValueError, np.linalg.LinAlgError) as exc:
                raise type(exc)(f"period {period}: {exc}") from exc
            periods.append(period)
    return EnsembleRun(spectra, periods, renorm, drift)
