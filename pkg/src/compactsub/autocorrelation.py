"""Autocorrelation coefficients of character-weighted combs."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterable

import numpy as np

from .alphabet import GOLDEN, PhiContext, character_angle, eval_unit
from .substitution import ConstantLengthGroup, TwoSidedWord


class WindowTooSmall(ValueError):
    pass


@dataclass(frozen=True)
class BijectiveRecurrenceSpec:
    """Column data of a bijective rule seen through one character: c_r = chi(beta_r)."""

    L: int
    s: int
    c: tuple

    def __post_init__(self):
        object.__setattr__(self, "c", tuple(self.c))
        if self.L < 2 or len(self.c) != self.L:
            raise ValueError("need L >= 2 and one angle per column")
        if not 0 <= self.s <= self.L - 1:
            raise ValueError("s out of range")

    @classmethod
    def from_rule(cls, rule: ConstantLengthGroup, chi, s: int = 1) -> BijectiveRecurrenceSpec:
        if not rule.is_bijective:
            raise ValueError("every column must be a translation")
        angles = tuple(character_angle(chi, col.letter) for col in rule.columns)
        return cls(rule.length, min(s, rule.length - 1), angles)

    def pair(self, i: int, j: int, ctx: PhiContext) -> complex:
        """c_i * conj(c_j), evaluated from the exact angle difference."""
        return eval_unit(self.c[i] - self.c[j], ctx)


def eta1_closed_form(spec: BijectiveRecurrenceSpec, ctx: PhiContext = GOLDEN) -> complex:
    L = spec.L
    num = sum(spec.pair(r, r + 1, ctx) for r in range(L - 1))
    return num / (L - spec.pair(L - 1, 0, ctx))


class _BijectiveEngine:
    # eta(Lm+k) = (1/L) sum_j eta(m + [j+k >= L]) c_j conj(c_{(j+k) mod L})
    def __init__(self, spec: BijectiveRecurrenceSpec, ctx: PhiContext):
        self.spec = spec
        self.ctx = ctx
        L = spec.L
        P = np.array([[spec.pair(i, j, ctx) for j in range(L)] for i in range(L)])
        # split coefficients by carry: lo multiplies eta(m'), hi multiplies eta(m'+1)
        self.lo = np.zeros(L, dtype=complex)
        self.hi = np.zeros(L, dtype=complex)
        for k in range(L):
            for j in range(L):
                v = P[j, (j + k) % L] / L
                if j + k >= L:
                    self.hi[k] += v
                else:
                    self.lo[k] += v
        self.memo: dict[int, complex] = {0: 1.0 + 0j, 1: eta1_closed_form(spec, ctx)}

    def __call__(self, m: int) -> complex:
        if m < 0:
            return complex(np.conj(self(-m)))
        memo = self.memo
        if m in memo:
            return memo[m]
        # iterative descent avoids deep recursion for huge m
        stack = [m]
        while stack:
            x = stack[-1]
            q, k = divmod(x, self.spec.L)
            # k = 0 has no carry term, so eta(q+1) is not needed (and may be x itself)
            deps = (q, q + 1) if k else (q,)
            need = [y for y in deps if y not in memo]
            if need:
                stack.extend(need)
                continue
            stack.pop()
            val = self.lo[k] * memo[q]
            if k:
                val += self.hi[k] * memo[q + 1]
            memo[x] = val
        return memo[m]


@lru_cache(maxsize=256)
def _engine(spec: BijectiveRecurrenceSpec, ctx: PhiContext) -> _BijectiveEngine:
    return _BijectiveEngine(spec, ctx)


def eta_exact_bijective(spec: BijectiveRecurrenceSpec, m: int, ctx: PhiContext = GOLDEN) -> complex:
    return _engine(spec, ctx)(int(m))


def eta_coincidence_scale(eta_m: complex, p: int, L: int) -> complex:
    if not 1 <= p <= L - 1:
        raise ValueError("need 1 <= p <= L-1")
    return p / L + (L - p) / L * eta_m


def _usable_N(prefix: TwoSidedWord, lag: int, N: int | None) -> int:
    avail = min(-prefix.lo, prefix.hi - lag)
    if N is None:
        N = avail
    if N < 0 or N > avail:
        raise WindowTooSmall(f"window [{prefix.lo}, {prefix.hi}] cannot hold N={N}, lag={lag}")
    return N


def eta_empirical(prefix: TwoSidedWord, chi, m: int, ctx: PhiContext = GOLDEN,
                  N: int | None = None) -> complex:
    """(1/(2N+1)) sum_{|j|<=N} chi(w_j) conj(chi(w_{j+m})); negative m by conjugation."""
    if m < 0:
        return complex(np.conj(eta_empirical(prefix, chi, -m, ctx, N)))
    N = _usable_N(prefix, m, N)
    o = prefix.origin
    v = prefix.codec.unit_values(prefix.data[o - N: o + N + m + 1], chi, ctx)
    n = 2 * N + 1
    return complex(np.dot(v[:n], np.conj(v[m:m + n])) / n)


def eta_empirical_many(prefix: TwoSidedWord, chi, ms: Iterable[int], ctx: PhiContext = GOLDEN,
                       N: int | None = None) -> np.ndarray:
    """eta_empirical at several lags, sharing one character evaluation."""
    ms = [int(m) for m in ms]
    top = max((abs(m) for m in ms), default=0)
    N = _usable_N(prefix, top, N)
    o = prefix.origin
    v = prefix.codec.unit_values(prefix.data[o - N: o + N + top + 1], chi, ctx)
    n = 2 * N + 1
    out = np.empty(len(ms), dtype=complex)
    for i, m in enumerate(ms):
        val = np.dot(v[:n], np.conj(v[abs(m):abs(m) + n])) / n
        out[i] = np.conj(val) if m < 0 else val
    return out


def eta_empirical_lags(prefix: TwoSidedWord, chi, M: int, ctx: PhiContext = GOLDEN,
                       N: int | None = None) -> np.ndarray:
    """eta(0..M) in one FFT correlation; same sums as eta_empirical."""
    N = _usable_N(prefix, M, N)
    o = prefix.origin
    v = prefix.codec.unit_values(prefix.data[o - N: o + N + M + 1], chi, ctx)
    n = 2 * N + 1
    a = v[:n]
    size = 1 << int(np.ceil(np.log2(len(v) + n)))
    r = np.fft.ifft(np.conj(np.fft.fft(a, size)) * np.fft.fft(v, size))[:M + 1]
    out = np.conj(r) / n
    out[0] = 1.0
    return out


class EtaTable:
    """Memoised eta(m) with eta(-m) = conj(eta(m)).

    Built from the exact bijective recurrence, from an empirical window, or
    as a coincidence scaling layer over another table.
    """

    def __init__(self, fn: Callable[[int], complex], source: str, L: int | None = None,
                 s: int | None = None, max_lag: int | None = None):
        self._fn = fn
        self.source = source
        self.L = L
        self.s = s
        self.max_lag = max_lag
        self._memo: dict[int, complex] = {}

    def __call__(self, m: int) -> complex:
        m = int(m)
        if m < 0:
            return complex(np.conj(self(-m)))
        if self.max_lag is not None and m > self.max_lag:
            raise WindowTooSmall(f"lag {m} beyond table ({self.max_lag})")
        v = self._memo.get(m)
        if v is None:
            v = complex(self._fn(m))
            self._memo[m] = v
        return v

    def values(self, ms: Iterable[int]) -> np.ndarray:
        return np.array([self(m) for m in ms], dtype=complex)

    def symmetric(self, K: int) -> np.ndarray:
        """eta(-K..K)."""
        pos = self.values(range(K + 1))
        return np.concatenate([np.conj(pos[:0:-1]), pos])

    @classmethod
    def exact_bijective(cls, spec: BijectiveRecurrenceSpec, ctx: PhiContext = GOLDEN) -> EtaTable:
        eng = _BijectiveEngine(spec, ctx)
        return cls(eng, "exact-bijective", spec.L, spec.s)

    @classmethod
    def empirical(cls, prefix: TwoSidedWord, chi, M: int, ctx: PhiContext = GOLDEN,
                  N: int | None = None) -> EtaTable:
        vals = eta_empirical_lags(prefix, chi, M, ctx, N)
        t = cls(lambda m: vals[m], "empirical", max_lag=M)
        t.N = _usable_N(prefix, M, N)
        return t

    @classmethod
    def from_values(cls, vals: Iterable[complex], source: str = "values") -> EtaTable:
        vals = np.asarray(list(vals), dtype=complex)
        return cls(lambda m: vals[m], source, max_lag=len(vals) - 1)

    @classmethod
    def coincidence(cls, base: EtaTable, p: int, L: int) -> EtaTable:
        """eta(Lm) from eta(m) by the coincidence scaling; other lags from ``base``."""
        def fn(m):
            if m and m % L == 0:
                return eta_coincidence_scale(table(m // L), p, L)
            return base(m)
        table = cls(fn, "coincidence-scale", L, None, base.max_lag)
        return table

    def to_csv(self, ms: Iterable[int]) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["m", "re", "im", "abs"])
        for m in ms:
            v = self(m)
            w.writerow([m, repr(v.real), repr(v.imag), repr(abs(v))])
        return buf.getvalue()


@dataclass(frozen=True)
class AlmostPeriods:
    members: list
    max_gap: int | None

    @property
    def relatively_dense(self) -> bool:
        return self.max_gap is not None


def almost_period_set(eta: EtaTable, epsilon: float, M: int) -> AlmostPeriods:
    """{m in [-M, M] : |eta(0) - eta(m)|^(1/2) < epsilon} and its largest gap.

    The gap runs include the stretch from -M to the first member and from the
    last member to M; with no member besides 0 the gap is reported as None.
    """
    if epsilon <= 0 or M < 1:
        raise ValueError("need epsilon > 0 and M >= 1")
    pos = eta.values(range(M + 1))
    good = np.sqrt(np.abs(pos[0] - pos)) < epsilon
    idx = np.nonzero(good)[0]
    members = sorted(set((-idx).tolist()) | set(idx.tolist()))
    nonzero = [m for m in members if m]
    if not nonzero:
        return AlmostPeriods(members, None)
    ext = np.array([-M - 1] + members + [M + 1])
    return AlmostPeriods(members, int(np.diff(ext).max()))
