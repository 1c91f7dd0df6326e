"""Substitution rules, word generation and combinatorial probes."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence, Union

import numpy as np

from .alphabet import (
    GOLDEN, INF, Alphabet, AlphabetMismatch, Angle, Circle, CircleGroup, Codec, Cyclic,
    CyclicGroup, ExtNat, ExtNatSpace, Letter, PhiContext, Product, ProductGroup,
    alphabet_net, alphabet_of, compose, inverse,
)


class NoInternalColumn(ValueError):
    pass


class NotNested(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# Rules

@dataclass(frozen=True)
class Translation:
    letter: Letter


@dataclass(frozen=True)
class Constant:
    letter: Letter


Column = Union[Translation, Constant]


def _compose_columns(first: Column, then: Column) -> Column:
    """The column x -> then(first(x))."""
    if isinstance(then, Constant):
        return then
    if isinstance(first, Constant):
        return Constant(compose(first.letter, then.letter))
    return Translation(compose(first.letter, then.letter))


@dataclass(frozen=True)
class ConstantLengthGroup:
    """Constant-length rule on a group alphabet; column j is a translation or a constant."""

    columns: tuple

    def __post_init__(self):
        cols = tuple(self.columns)
        object.__setattr__(self, "columns", cols)
        if not cols:
            raise ValueError("at least one column is required")
        first = alphabet_of(cols[0].letter)
        if isinstance(first, ExtNatSpace):
            raise AlphabetMismatch("column rules need a group alphabet")
        for c in cols:
            if not isinstance(c, (Translation, Constant)):
                raise TypeError(f"not a column: {c!r}")
            if alphabet_of(c.letter) != first:
                raise AlphabetMismatch(f"column letter {c.letter} not in {first}")

    @property
    def alphabet(self) -> Alphabet:
        return alphabet_of(self.columns[0].letter)

    @property
    def length(self) -> int:
        return len(self.columns)

    @property
    def is_bijective(self) -> bool:
        return all(isinstance(c, Translation) for c in self.columns)

    @property
    def coincidences(self) -> list[int]:
        return [j for j, c in enumerate(self.columns) if isinstance(c, Constant)]

    def letters(self) -> list[Letter]:
        return [c.letter for c in self.columns]

    def image(self, a: Letter) -> list[Letter]:
        return [c.letter if isinstance(c, Constant) else compose(a, c.letter)
                for c in self.columns]

    def power(self, m: int) -> ConstantLengthGroup:
        cols = list(self.columns)
        for _ in range(m - 1):
            cols = [_compose_columns(outer, inner) for outer in cols for inner in self.columns]
        return ConstantLengthGroup(tuple(cols))

    def translated(self, b: Letter) -> ConstantLengthGroup:
        """Multiply every translation column by b; constants are kept."""
        return ConstantLengthGroup(tuple(
            Translation(compose(c.letter, b)) if isinstance(c, Translation) else c
            for c in self.columns))


@dataclass(frozen=True)
class Spin:
    """Spin substitution on circle x {0..q-1}: (t, i) -> (t + W[i][j], j) for j < q."""

    W: tuple

    def __post_init__(self):
        W = tuple(tuple(row) for row in self.W)
        object.__setattr__(self, "W", W)
        q = len(W)
        if q < 2 or any(len(row) != q for row in W):
            raise ValueError("spin matrix must be square of size >= 2")

    @property
    def digits(self) -> int:
        return len(self.W)

    @property
    def length(self) -> int:
        return len(self.W)

    @property
    def alphabet(self) -> Alphabet:
        return ProductGroup((CircleGroup(), CyclicGroup(self.digits)))

    def letters(self) -> list[Letter]:
        return [Circle(w) for row in self.W for w in row]

    def image(self, a: Letter) -> list[Letter]:
        if alphabet_of(a) != self.alphabet:
            raise AlphabetMismatch(f"{a} not in {self.alphabet}")
        spin, digit = a.parts
        return [Product((Circle(spin.angle + w), Cyclic(self.digits, j)))
                for j, w in enumerate(self.W[digit.residue])]


@dataclass(frozen=True)
class NonConstantTable:
    """0 -> 0 1,  n -> 0 (n+1) (n-1),  inf -> 0 inf inf  on N0 u {inf}.

    With ``cap`` set, letters above the cap are replaced by inf.
    """

    cap: int | None = None

    @property
    def alphabet(self) -> Alphabet:
        return ExtNatSpace()

    def _clip(self, n: int) -> ExtNat:
        if self.cap is not None and n > self.cap:
            return INF
        return ExtNat(n)

    def image(self, a: Letter) -> list[Letter]:
        if not isinstance(a, ExtNat):
            raise AlphabetMismatch(f"{a} not in N0 u {{inf}}")
        if a.value is None:
            return [ExtNat(0), INF, INF]
        if a.value == 0:
            return [ExtNat(0), self._clip(1)]
        return [ExtNat(0), self._clip(a.value + 1), ExtNat(a.value - 1)]

    def letters(self) -> list[Letter]:
        return []


Rule = Union[ConstantLengthGroup, Spin, NonConstantTable]


# ---------------------------------------------------------------------------
# Words

@dataclass(frozen=True, eq=False)
class TwoSidedWord:
    """A finite window of a bi-infinite word; letter i sits at coordinate i - origin."""

    data: np.ndarray
    codec: Codec
    origin: int = 0

    def __post_init__(self):
        if len(self.data) and not 0 <= self.origin < len(self.data):
            raise ValueError("origin index out of bounds")

    @classmethod
    def from_letters(cls, letters: Sequence[Letter], origin: int = 0,
                     alphabet: Alphabet | None = None) -> TwoSidedWord:
        letters = list(letters)
        alphabet = alphabet or alphabet_of(letters[0])
        codec = Codec.for_letters(alphabet, letters)
        return cls(codec.encode_many(letters), codec, origin)

    def __len__(self) -> int:
        return len(self.data)

    @property
    def lo(self) -> int:
        return -self.origin

    @property
    def hi(self) -> int:
        return len(self.data) - 1 - self.origin

    def covers(self, lo: int, hi: int) -> bool:
        return self.lo <= lo and hi <= self.hi

    def letters(self) -> list[Letter]:
        return [self.codec.decode(r) for r in self.data]

    def letter_at(self, coord: int) -> Letter:
        if not self.lo <= coord <= self.hi:
            raise IndexError(coord)
        return self.codec.decode(self.data[coord + self.origin])

    def window(self, lo: int, hi: int) -> TwoSidedWord:
        """Sub-window on coordinates [lo, hi]; must contain 0."""
        if not self.covers(lo, hi) or not lo <= 0 <= hi:
            raise IndexError((lo, hi))
        return TwoSidedWord(self.data[lo + self.origin: hi + self.origin + 1], self.codec, -lo)

    def unit_values(self, chi, ctx: PhiContext = GOLDEN) -> np.ndarray:
        return self.codec.unit_values(self.data, chi, ctx)

    def labels(self) -> np.ndarray:
        """Integer labels; equal labels iff equal letters."""
        if self.codec.width == 1:
            return self.data[:, 0]
        _, inv = np.unique(self.data, axis=0, return_inverse=True)
        return inv.reshape(-1)

    def same_as(self, other: TwoSidedWord) -> bool:
        return (self.origin == other.origin and self.codec == other.codec
                and np.array_equal(self.data, other.data))

    def __repr__(self):
        if len(self) > 12:
            return f"TwoSidedWord(len={len(self)}, origin={self.origin}, {self.codec.alphabet})"
        left = "".join(f"[{a}]" for a in self.letters()[:self.origin])
        right = "".join(f"[{a}]" for a in self.letters()[self.origin:])
        return f"{left} | {right}"


def _expand(rule: Rule, codec: Codec, data: np.ndarray) -> np.ndarray:
    """Concatenated images of the encoded letters in ``data``."""
    if isinstance(rule, ConstantLengthGroup):
        out = np.repeat(data[:, None, :], rule.length, axis=1)
        for j, col in enumerate(rule.columns):
            row = np.array(codec.encode(col.letter), dtype=np.int64)
            if isinstance(col, Constant):
                out[:, j, :] = row
            else:
                out[:, j, :] += row
        codec.reduce(out)
        return out.reshape(-1, codec.width)
    if isinstance(rule, Spin):
        q = rule.digits
        shift = np.array([[codec.encode(Product((Circle(w), Cyclic(q, 0)))) for w in row]
                          for row in rule.W], dtype=np.int64)  # q x q x width
        digits = data[:, 2]
        out = np.repeat(data[:, None, :], q, axis=1) + shift[digits]
        out[:, :, 2] = np.arange(q)
        codec.reduce(out)
        return out.reshape(-1, codec.width)
    if isinstance(rule, NonConstantTable):
        v = data[:, 0]
        out = np.full((len(v), 3), -2, dtype=np.int64)
        out[:, 0] = 0
        finite = v >= 0
        up = v + 1
        if rule.cap is not None:
            up = np.where(up > rule.cap, -1, up)
        out[:, 1] = np.where(finite, up, -1)
        out[:, 2] = np.where(v > 0, v - 1, np.where(v == 0, -2, -1))
        flat = out.reshape(-1)
        return flat[flat != -2].reshape(-1, 1)
    raise TypeError(f"unknown rule {rule!r}")


def _image_lengths(rule: Rule, data: np.ndarray) -> np.ndarray:
    if isinstance(rule, NonConstantTable):
        return np.where(data[:, 0] == 0, 2, 3)
    return np.full(len(data), rule.length)


def _codec_for(rule: Rule, codec: Codec) -> Codec:
    if codec.alphabet != rule.alphabet:
        raise AlphabetMismatch(f"word over {codec.alphabet}, rule over {rule.alphabet}")
    return codec.widened(rule.letters())


def apply(rule: Rule, w: TwoSidedWord) -> TwoSidedWord:
    """Substitute every letter; the origin moves to the start of the image of w_0."""
    codec = _codec_for(rule, w.codec)
    data = codec.rescale(w.data, w.codec)
    origin = int(_image_lengths(rule, data[:w.origin]).sum())
    return TwoSidedWord(_expand(rule, codec, data), codec, origin)


def shift(w: TwoSidedWord, n: int) -> TwoSidedWord:
    """sigma^n: the letter at coordinate c moves to c - n."""
    return TwoSidedWord(w.data, w.codec, w.origin + n)


# ---------------------------------------------------------------------------
# Pseudo-fixed points

@dataclass(frozen=True)
class PseudoFixedSetup:
    base: ConstantLengthGroup
    s: int
    seed: Letter
    power: int = 1

    def __post_init__(self):
        col = self.base.columns[self.s]
        if isinstance(col, Translation):
            if col.letter != alphabet_of(col.letter).identity():
                raise ValueError("column s of the base rule must be the identity")


def normalize_pseudo_fixed(rule: ConstantLengthGroup, seed: Letter | None = None,
                           max_power: int = 4) -> PseudoFixedSetup:
    """Pick a power of ``rule`` with an internal column that fixes the seed.

    Pure translation rules are multiplied by the inverse of column s so that
    column s becomes the identity.  Rules with a coincidence take s at the
    first internal constant column and seed the word with that constant.
    """
    if not isinstance(rule, ConstantLengthGroup):
        raise TypeError("pseudo-fixed points are built for constant-length group rules")
    if rule.length < 2:
        raise NoInternalColumn("length-1 rules have no internal column")
    if seed is None:
        seed = rule.alphabet.identity()
    if alphabet_of(seed) != rule.alphabet:
        raise AlphabetMismatch(f"seed {seed} not in {rule.alphabet}")
    for m in range(1, max_power + 1):
        R = rule.power(m)
        L = R.length
        if L < 3:
            continue
        if rule.coincidences:
            internal = [j for j in R.coincidences if 1 <= j <= L - 2]
            if internal:
                s = internal[0]
                return PseudoFixedSetup(R, s, R.columns[s].letter, m)
            continue
        s = 1
        return PseudoFixedSetup(R.translated(inverse(R.columns[s].letter)), s, seed, m)
    raise NoInternalColumn(f"no internal fixed column in powers up to {max_power}")


def _pseudo_step(setup: PseudoFixedSetup, codec: Codec, data: np.ndarray, lo: int,
                 radius: int) -> tuple[np.ndarray, int]:
    # x -> sigma^{-s} rho'(x): coordinate c maps to L*c + k - s; crop to [-radius, radius]
    L = setup.base.length
    out = _expand(setup.base, codec, data)
    new_lo = L * lo - setup.s
    a = max(new_lo, -radius)
    b = min(new_lo + len(out) - 1, radius)
    return out[a - new_lo: b - new_lo + 1], a


def pseudo_fixed_prefix(setup: PseudoFixedSetup, radius: int) -> TwoSidedWord:
    """Window [-radius, radius] of the pseudo-fixed point grown from the seed."""
    if radius < 0:
        raise ValueError("radius must be nonnegative")
    codec = Codec.for_letters(setup.base.alphabet, setup.base.letters() + [setup.seed])
    data = codec.encode_many([setup.seed])
    lo = 0
    if radius == 0:
        return TwoSidedWord(data, codec, 0)
    for _ in range(10_000):
        if lo <= -radius and lo + len(data) - 1 >= radius:
            break
        data, lo = _pseudo_step(setup, codec, data, lo, radius)
    check, check_lo = _pseudo_step(setup, codec, data, lo, radius)
    if check_lo != lo or not np.array_equal(check, data):
        raise NotNested("window changed under a further iteration")
    return TwoSidedWord(data, codec, -lo)


def legal_window(rule: Rule, radius: int, seed: Letter | None = None) -> TwoSidedWord:
    """A legal word of length 2*radius+1 taken from rule^n(seed), centred at its middle.

    Used where no internal fixed column exists (spin and non-constant rules);
    averages over it estimate the same ergodic limits as a pseudo-fixed window.
    """
    if seed is None:
        seed = rule.alphabet.identity() if not isinstance(rule, NonConstantTable) else ExtNat(0)
    codec = Codec.for_letters(rule.alphabet, list(rule.letters()) + [seed])
    data = codec.encode_many([seed])
    need = 2 * radius + 1
    while len(data) < need:
        grown = _expand(rule, codec, data)
        if len(grown) <= len(data):
            raise ValueError("rule does not grow words")
        data = grown
    return TwoSidedWord(data[:need], codec, radius)


# ---------------------------------------------------------------------------
# Probes

@dataclass(frozen=True)
class ProbeResult:
    passed: bool
    witness: Letter | None = None
    epsilon: float = 0.0

    def __bool__(self):
        return self.passed


def _coordinates(letters: Sequence[Letter], ctx: PhiContext):
    """Per-factor numeric coordinates: ('d', ids) discrete, ('c', floats) circular, ('a', floats)."""
    first = letters[0]
    flat: list[list] = []

    def walk(a, out):
        if isinstance(a, Product):
            for p in a.parts:
                walk(p, out)
        elif isinstance(a, Cyclic):
            out.append(("d", a.residue))
        elif isinstance(a, Circle):
            out.append(("c", ctx.value(a.angle)))
        else:
            out.append(("a", 0.0 if a.value is None else 1.0 / (a.value + 1)))

    for a in letters:
        row: list = []
        walk(a, row)
        flat.append(row)
    kinds = [k for k, _ in flat[0]]
    cols = [np.array([row[i][1] for row in flat], dtype=float) for i in range(len(kinds))]
    del first
    return kinds, cols


def _distances(kinds, pts, centre) -> np.ndarray:
    d = np.zeros(len(pts[0]))
    for kind, col, c in zip(kinds, pts, centre):
        if kind == "d":
            comp = np.where(col == c, 0.0, 1.0)
        elif kind == "c":
            comp = np.abs(col - c) % 1.0
            comp = np.minimum(comp, 1.0 - comp)
        else:
            comp = np.abs(col - c)
        d = np.maximum(d, comp)
    return d


def primitivity_probe(rule: Rule, epsilon: float = 0.1, depth: int = 8,
                      ctx: PhiContext = GOLDEN, net: Sequence[Letter] | None = None,
                      extnat_cap: int = 10) -> ProbeResult:
    """Check on an epsilon-net that some power rule^p, p <= depth, meets every ball from every letter.

    A pass is evidence only; a failure returns the centre of an uncovered ball.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    if net is None:
        net = alphabet_net(rule.alphabet, epsilon, extnat_cap)
    net = list(net)
    kinds, centres = _coordinates(net, ctx)
    centre_rows = list(zip(*centres))
    # hit[p][a] = boolean array over centres
    level = [{a} for a in net]
    covered_by_p = []
    for _ in range(depth):
        level = [{b for x in S for b in rule.image(x)} for S in level]
        hits = []
        for S in level:
            S = list(S)
            k2, pts = _coordinates(S, ctx)
            hits.append(np.array([(_distances(k2, pts, c) < epsilon).any() for c in centre_rows]))
        covered_by_p.append(np.all(hits, axis=0))
    ok = np.any(covered_by_p, axis=0)
    if ok.all():
        return ProbeResult(True, None, epsilon)
    return ProbeResult(False, net[int(np.argmin(ok))], epsilon)


def detect_period(w: TwoSidedWord, max_period: int | None = None) -> int | None:
    """Smallest p with w[i+p] == w[i] across the window, for p <= len/4."""
    labels = w.labels()
    n = len(labels)
    limit = n // 4 if max_period is None else min(max_period, n // 4)
    head = min(n, 64)
    for p in range(1, limit + 1):
        if not np.array_equal(labels[p:p + head], labels[:head][: max(0, min(head, n - p))]):
            continue
        if np.array_equal(labels[p:], labels[:-p]):
            return p
    return None
