"""Tile lengths, frequencies and the Delone set of the rule on N0 u {inf}.

The rule is 0 -> 0 1, n -> 0 (n+1) (n-1), inf -> 0 inf inf.  Its natural
length function is l(n) = 2 - 2^-n, l(inf) = 2, with inflation factor 5/2.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .alphabet import INF, ExtNat
from .substitution import NonConstantTable, TwoSidedWord, apply

LAMBDA = Fraction(5, 2)


class NoConvergence(RuntimeError):
    pass


@dataclass
class TruncatedFunction:
    """Values on {0, ..., N} plus a value at infinity."""

    values: list
    at_inf: object

    @property
    def cap(self) -> int:
        return len(self.values) - 1

    def __call__(self, a) -> object:
        if isinstance(a, ExtNat):
            a = a.value
        if a is None:
            return self.at_inf
        return self.values[a]

    def scaled(self, c) -> TruncatedFunction:
        return TruncatedFunction([v * c for v in self.values], self.at_inf * c)

    def as_array(self) -> np.ndarray:
        return np.array([float(v) for v in self.values] + [float(self.at_inf)])

    @classmethod
    def from_array(cls, arr) -> TruncatedFunction:
        arr = list(arr)
        return cls(arr[:-1], arr[-1])


def natural_length(N: int) -> TruncatedFunction:
    """Exact l(n) = 2 - 2^-n and l(inf) = 2."""
    return TruncatedFunction([2 - Fraction(1, 2 ** n) for n in range(N + 1)], Fraction(2))


def tile_length(a: ExtNat) -> Fraction:
    return Fraction(2) if a.value is None else 2 - Fraction(1, 2 ** a.value)


def m_apply(f: TruncatedFunction) -> TruncatedFunction:
    """(Mf)(a) = sum of f over the image of a; letter N+1 is read as inf."""
    N = f.cap
    if N < 2:
        raise ValueError("cap must be >= 2")
    v, inf = f.values, f.at_inf
    out = [v[0] + v[1]]
    out += [v[0] + v[n + 1] + v[n - 1] for n in range(1, N)]
    out.append(v[0] + inf + v[N - 1])
    return TruncatedFunction(out, v[0] + 2 * inf)


def _m_matrix_apply(x: np.ndarray) -> np.ndarray:
    # x = [f(0..N), f(inf)]
    N = len(x) - 2
    y = np.empty_like(x)
    y[0] = x[0] + x[1]
    y[1:N] = x[0] + x[2:N + 1] + x[0:N - 1]
    y[N] = x[0] + x[N + 1] + x[N - 1]
    y[N + 1] = x[0] + 2 * x[N + 1]
    return y


@dataclass
class PowerResult:
    eigenvalue: float
    ell: TruncatedFunction
    iterations: int
    bracket: tuple = (0.0, 0.0)
    history: list = field(default_factory=list)


def power_iteration(N: int = 40, tol: float = 1e-10, max_iter: int = 10_000,
                    start: TruncatedFunction | None = None) -> PowerResult:
    """f -> Mf / (Mf)(0) from f = 1 until the sup-change drops below tol.

    ``history`` holds the Collatz-Wielandt bracket (min, max of Mf/f) per step.
    """
    if N < 10:
        raise ValueError("cap must be >= 10")
    x = np.ones(N + 2) if start is None else start.as_array()
    x = x / x[0]
    history = []
    for it in range(1, max_iter + 1):
        y = _m_matrix_apply(x)
        ratio = y / x
        history.append((float(ratio.min()), float(ratio.max())))
        lam = y[0]
        y = y / lam
        change = float(np.max(np.abs(y - x)))
        x = y
        if change < tol:
            return PowerResult(float(lam), TruncatedFunction.from_array(x), it, history[-1], history)
    raise NoConvergence(f"no convergence within {max_iter} steps")


def frequency_estimate(depth: int = 14, report_cap: int | None = None) -> TruncatedFunction:
    """Exact letter proportions in rho^depth(0); letters above report_cap are lumped into inf."""
    if depth < 8:
        raise ValueError("depth must be >= 8")
    rule = NonConstantTable()
    w = TwoSidedWord.from_letters([ExtNat(0)])
    for _ in range(depth):
        w = apply(rule, w)
    vals = w.data[:, 0]
    total = len(vals)
    counts = Counter(vals.tolist())
    top = max(k for k in counts if k >= 0)
    cap = top if report_cap is None else report_cap
    freqs = [Fraction(counts.get(n, 0), total) for n in range(cap + 1)]
    rest = sum(c for k, c in counts.items() if k > cap) + counts.get(-1, 0)
    return TruncatedFunction(freqs, Fraction(rest, total))


# ---------------------------------------------------------------------------
# Delone set

@dataclass
class DeloneSet:
    points: list          # left endpoints, exact
    labels: list          # ExtNat per tile
    window: tuple         # (left, right) covered by the tiles

    def __len__(self):
        return len(self.points)

    def gaps(self) -> list:
        return [tile_length(a) for a in self.labels]


def delone_build(iterations: int, tiles: int | None = None) -> DeloneSet:
    """Tiles of rho^k(inf | 0), left endpoints, with 0 at the seed boundary.

    When ``tiles`` is given, the window holds exactly that many tiles, the
    right half taking the extra one; iteration continues until both halves suffice.
    """
    rule = NonConstantTable()
    left, right = rule.image(INF), rule.image(ExtNat(0))
    assert left[-1] == INF and right[0] == ExtNat(0), "seed inf | 0 must nest"
    lw = TwoSidedWord.from_letters([INF])
    rw = TwoSidedWord.from_letters([ExtNat(0)])
    n_left = n_right = None
    if tiles is not None:
        n_left = tiles // 2
        n_right = tiles - n_left
    k = 0
    while k < iterations or (tiles is not None and (len(rw) < n_right or len(lw) < n_left)):
        lw, rw = apply(rule, lw), apply(rule, rw)
        k += 1
    r_labels = rw.letters()
    l_labels = lw.letters()
    if tiles is not None:
        r_labels = r_labels[:n_right]
        l_labels = l_labels[len(l_labels) - n_left:]
    points = []
    x = Fraction(0)
    for a in reversed(l_labels):
        x -= tile_length(a)
        points.append(x)
    points.reverse()
    labels = list(l_labels)
    x = Fraction(0)
    for a in r_labels:
        points.append(x)
        x += tile_length(a)
    labels += r_labels
    return DeloneSet(points, labels, (points[0], x))


@dataclass
class DeloneAudit:
    tiles: int
    min_gap: Fraction
    max_gap: Fraction
    max_finite_gap: Fraction | None
    gap_two_only_at_inf: bool
    gaps_in_length_set: bool
    inflation_checked: int
    inflation_ok: bool
    distinct_gaps: int

    def record(self) -> dict:
        def r(x):
            return None if x is None else render_dyadic(x)
        return {
            "tiles": self.tiles, "min_gap": r(self.min_gap), "max_gap": r(self.max_gap),
            "max_finite_gap": r(self.max_finite_gap),
            "gap_two_only_at_inf": self.gap_two_only_at_inf,
            "gaps_in_length_set": self.gaps_in_length_set,
            "inflation_checked": self.inflation_checked, "inflation_ok": self.inflation_ok,
            "distinct_gaps": self.distinct_gaps,
        }


def _is_tile_length(g: Fraction) -> bool:
    if g == 2:
        return True
    d = 2 - g
    # d must be 2^-n with n >= 0
    return d > 0 and d.numerator == 1 and (d.denominator & (d.denominator - 1)) == 0


def audit_delone(d: DeloneSet) -> DeloneAudit:
    if not d.points:
        raise ValueError("empty window")
    gaps = d.gaps()
    finite = [g for g, a in zip(gaps, d.labels) if a.value is not None]
    two_at_inf = all((g == 2) == (a.value is None) for g, a in zip(gaps, d.labels))
    pts = set(d.points)
    lo, hi = d.window
    checked = 0
    ok = True
    for x in d.points:
        y = LAMBDA * x
        if lo <= y < hi:
            checked += 1
            if y not in pts:
                ok = False
    return DeloneAudit(
        tiles=len(gaps), min_gap=min(gaps), max_gap=max(gaps),
        max_finite_gap=max(finite) if finite else None, gap_two_only_at_inf=two_at_inf,
        gaps_in_length_set=all(_is_tile_length(g) for g in gaps),
        inflation_checked=checked, inflation_ok=ok, distinct_gaps=len(set(gaps)))


def render_dyadic(x: Fraction) -> dict:
    """Numerator/exponent form x = num * 2^-exp alongside a decimal."""
    den = x.denominator
    if den & (den - 1):
        raise ValueError(f"{x} is not dyadic")
    return {"num": x.numerator, "exp": den.bit_length() - 1, "decimal": float(x)}
