"""Fejér spectra, Riesz partial products and Wiener means on a uniform grid."""
from __future__ import annotations

import csv
import io
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .alphabet import GOLDEN, Angle, PhiContext
from .autocorrelation import EtaTable, WindowTooSmall


@dataclass(frozen=True, eq=False)
class SpectrumGrid:
    resolution: int
    values: np.ndarray
    kernel_order: int

    @property
    def t(self) -> np.ndarray:
        return np.arange(self.resolution) / self.resolution

    def mass(self) -> float:
        return float(np.mean(self.values))

    def clamped(self) -> np.ndarray:
        return np.maximum(self.values, 0.0)

    def top_mass_fraction(self, bins: int = 10) -> float:
        v = self.clamped()
        return float(np.sort(v)[-bins:].sum() / v.sum())

    def relative_l1(self, other: SpectrumGrid) -> float:
        """Mean |f - g| over the grid divided by the mean of g."""
        if other.resolution != self.resolution:
            raise ValueError("grids differ in resolution")
        return float(np.mean(np.abs(self.values - other.values)) / other.mass())

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", "value"])
        for t, v in zip(self.t, self.clamped()):
            w.writerow([repr(float(t)), repr(float(v))])
        return buf.getvalue()


def _check_grid(G: int):
    if G < 2 or G & (G - 1):
        raise ValueError("grid size must be a power of two")


def fejer_spectrum(eta: EtaTable, K: int, G: int) -> SpectrumGrid:
    """sum_{|m|<=K} (1 - |m|/(K+1)) eta(m) e^{-2 pi i m t} at t = j/G."""
    _check_grid(G)
    if K < 0 or 2 * K > G:
        raise ValueError("need 0 <= K <= G/2")
    if eta.max_lag is not None and eta.max_lag < K:
        raise WindowTooSmall(f"eta known up to {eta.max_lag}, need {K}")
    m = np.arange(-K, K + 1)
    coef = (1.0 - np.abs(m) / (K + 1)) * eta.symmetric(K)
    a = np.zeros(G, dtype=complex)
    np.add.at(a, m % G, coef)
    vals = np.fft.fft(a)
    return SpectrumGrid(G, vals.real.copy(), K)


def _riesz_block(j: np.ndarray, a: float, M: int, G: int, logspace: bool) -> np.ndarray:
    if logspace:
        acc = np.zeros(len(j))
    else:
        acc = np.ones(len(j))
    with np.errstate(divide="ignore"):
        for m in range(M):
            # 2^m t mod 1 computed in integers to keep the phase exact
            ph = (pow(2, m, G) * j) % G / G
            f = 1.0 + np.cos(2.0 * np.pi * (a + ph))
            if logspace:
                acc += np.log(f)
            else:
                acc *= f
    return np.exp(acc) if logspace else acc


def riesz_partial(a: Angle | float, M: int, G: int, ctx: PhiContext = GOLDEN,
                  workers: int = 1) -> SpectrumGrid:
    """prod_{m<M} (1/2)|1 + e^{2 pi i a} e^{2 pi i 2^m t}|^2 at t = j/G."""
    _check_grid(G)
    if M < 1:
        raise ValueError("M must be >= 1")
    av = ctx.value(a) if isinstance(a, Angle) else float(a) % 1.0
    j = np.arange(G, dtype=np.int64)
    logspace = M > 20
    if workers <= 1:
        vals = _riesz_block(j, av, M, G, logspace)
    else:
        chunks = np.array_split(j, workers)
        with ThreadPoolExecutor(workers) as ex:
            parts = list(ex.map(lambda c: _riesz_block(c, av, M, G, logspace), chunks))
        vals = np.concatenate(parts)
    return SpectrumGrid(G, vals, M)


def wiener_l2_mean(eta: EtaTable, N: int) -> float:
    if eta.max_lag is not None and eta.max_lag < N:
        raise WindowTooSmall(f"eta known up to {eta.max_lag}, need {N}")
    pos = np.abs(eta.values(range(N + 1))) ** 2
    return float((pos[0] + 2.0 * pos[1:].sum()) / (2 * N + 1))
