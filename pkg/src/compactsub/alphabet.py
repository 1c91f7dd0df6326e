"""Compact alphabets: finite cyclic groups, the circle, products, and N0 u {inf}.

Circle letters live in the subgroup {q + k*phi mod 1} where q is rational and
phi is a single formal irrational.  Keeping letters symbolic makes equality,
orders and kernel tests exact; floating point only enters in ``eval_unit``.
"""
from __future__ import annotations

import cmath
import math
import re
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import lru_cache, reduce
from typing import Iterable, Sequence, Union

import numpy as np


class AlphabetMismatch(ValueError):
    pass


class NotAGroup(TypeError):
    pass


# ---------------------------------------------------------------------------
# Angles

@dataclass(frozen=True, order=True)
class Angle:
    """The circle element q + k*phi (mod 1), with q rational."""

    q: Fraction = Fraction(0)
    k: int = 0

    def __post_init__(self):
        object.__setattr__(self, "q", Fraction(self.q) % 1)
        object.__setattr__(self, "k", int(self.k))

    def __add__(self, other: Angle) -> Angle:
        return Angle(self.q + other.q, self.k + other.k)

    def __sub__(self, other: Angle) -> Angle:
        return Angle(self.q - other.q, self.k - other.k)

    def __neg__(self) -> Angle:
        return Angle(-self.q, -self.k)

    def __mul__(self, n: int) -> Angle:
        return Angle(self.q * n, self.k * n)

    __rmul__ = __mul__

    @property
    def is_zero(self) -> bool:
        return self.q == 0 and self.k == 0

    def order(self) -> int | None:
        """Order in the circle group, or None when infinite (phi is irrational)."""
        if self.k != 0:
            return None
        return self.q.denominator

    def __str__(self) -> str:
        parts = []
        if self.q:
            parts.append(str(self.q))
        if self.k:
            coef = {1: "", -1: "-"}.get(self.k, str(self.k))
            term = f"{coef}phi"
            if parts and not term.startswith("-"):
                term = "+" + term
            parts.append(term)
        return "".join(parts) or "0"

    @classmethod
    def parse(cls, text: str) -> Angle:
        """Parse ``"1/4"``, ``"phi"``, ``"-2phi"``, ``"1/2+3*phi"`` and similar."""
        s = text.replace(" ", "").replace("*", "")
        if not s:
            raise ValueError("empty angle")
        q, k = Fraction(0), 0
        for sign, body in re.findall(r"([+-]?)([^+-]+)", s):
            mult = -1 if sign == "-" else 1
            if body.endswith("phi"):
                coef = body[:-3]
                k += mult * (int(coef) if coef else 1)
            else:
                q += mult * Fraction(body)
        consumed = "".join(f"{a}{b}" for a, b in re.findall(r"([+-]?)([^+-]+)", s))
        if consumed != s:
            raise ValueError(f"cannot parse angle {text!r}")
        return cls(q, k)


ZERO = Angle()


# ---------------------------------------------------------------------------
# Letters

@dataclass(frozen=True)
class Cyclic:
    modulus: int
    residue: int

    def __post_init__(self):
        if self.modulus < 1:
            raise ValueError("modulus must be positive")
        object.__setattr__(self, "residue", self.residue % self.modulus)

    def __str__(self):
        return f"{self.residue}"


@dataclass(frozen=True)
class Circle:
    angle: Angle

    def __str__(self):
        return str(self.angle)


@dataclass(frozen=True)
class Product:
    parts: tuple

    def __post_init__(self):
        object.__setattr__(self, "parts", tuple(self.parts))

    def __str__(self):
        return "(" + ", ".join(map(str, self.parts)) + ")"


@dataclass(frozen=True)
class ExtNat:
    """A point of N0 u {inf}; ``value=None`` is the point at infinity."""

    value: int | None

    def __post_init__(self):
        if self.value is not None and self.value < 0:
            raise ValueError("ExtNat values are nonnegative")

    @property
    def is_infinite(self) -> bool:
        return self.value is None

    def __str__(self):
        return "inf" if self.value is None else str(self.value)


INF = ExtNat(None)

Letter = Union[Cyclic, Circle, Product, ExtNat]


# ---------------------------------------------------------------------------
# Alphabet descriptors

@dataclass(frozen=True)
class CyclicGroup:
    modulus: int

    def identity(self) -> Letter:
        return Cyclic(self.modulus, 0)

    def __str__(self):
        return f"cyclic({self.modulus})"


@dataclass(frozen=True)
class CircleGroup:
    def identity(self) -> Letter:
        return Circle(ZERO)

    def __str__(self):
        return "circle"


@dataclass(frozen=True)
class ProductGroup:
    factors: tuple

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))

    def identity(self) -> Letter:
        return Product(tuple(f.identity() for f in self.factors))

    def __str__(self):
        return "product(" + ", ".join(map(str, self.factors)) + ")"


@dataclass(frozen=True)
class ExtNatSpace:
    def identity(self) -> Letter:
        raise NotAGroup("N0 u {inf} carries no group structure")

    def __str__(self):
        return "extnat"


Alphabet = Union[CyclicGroup, CircleGroup, ProductGroup, ExtNatSpace]


def alphabet_of(a: Letter) -> Alphabet:
    if isinstance(a, Cyclic):
        return CyclicGroup(a.modulus)
    if isinstance(a, Circle):
        return CircleGroup()
    if isinstance(a, Product):
        return ProductGroup(tuple(alphabet_of(p) for p in a.parts))
    if isinstance(a, ExtNat):
        return ExtNatSpace()
    raise TypeError(f"not a letter: {a!r}")


def contains(alphabet: Alphabet, a: Letter) -> bool:
    return alphabet_of(a) == alphabet


def compose(a: Letter, b: Letter) -> Letter:
    """Group product a*b (written additively on angles and residues)."""
    if isinstance(a, ExtNat) or isinstance(b, ExtNat):
        raise NotAGroup("N0 u {inf} letters cannot be composed")
    if alphabet_of(a) != alphabet_of(b):
        raise AlphabetMismatch(f"{alphabet_of(a)} vs {alphabet_of(b)}")
    if isinstance(a, Cyclic):
        return Cyclic(a.modulus, a.residue + b.residue)
    if isinstance(a, Circle):
        return Circle(a.angle + b.angle)
    return Product(tuple(compose(x, y) for x, y in zip(a.parts, b.parts)))


def inverse(a: Letter) -> Letter:
    if isinstance(a, Cyclic):
        return Cyclic(a.modulus, -a.residue)
    if isinstance(a, Circle):
        return Circle(-a.angle)
    if isinstance(a, Product):
        return Product(tuple(inverse(p) for p in a.parts))
    raise NotAGroup("N0 u {inf} letters have no inverse")


def identity_of(a: Letter) -> Letter:
    return alphabet_of(a).identity()


# ---------------------------------------------------------------------------
# Characters

@dataclass(frozen=True)
class CyclicChar:
    modulus: int
    index: int

    def __post_init__(self):
        object.__setattr__(self, "index", self.index % self.modulus)

    def __str__(self):
        return f"chi_{self.index} mod {self.modulus}"


@dataclass(frozen=True)
class CircleChar:
    n: int

    def __str__(self):
        return f"chi_{self.n}"


@dataclass(frozen=True)
class ProductChar:
    parts: tuple

    def __post_init__(self):
        object.__setattr__(self, "parts", tuple(self.parts))

    def __str__(self):
        return " x ".join(map(str, self.parts))


@dataclass(frozen=True)
class TrivialChar:
    def __str__(self):
        return "trivial"


Character = Union[CyclicChar, CircleChar, ProductChar, TrivialChar]


def character_angle(chi: Character, a: Letter) -> Angle:
    """The angle t with chi(a) = exp(2 pi i t)."""
    if isinstance(a, ExtNat):
        raise AlphabetMismatch("characters are defined on group alphabets only")
    if isinstance(chi, TrivialChar):
        return ZERO
    if isinstance(chi, CyclicChar):
        if not isinstance(a, Cyclic) or a.modulus != chi.modulus:
            raise AlphabetMismatch(f"{chi} applied to {a!r}")
        return Angle(Fraction(chi.index * a.residue, a.modulus))
    if isinstance(chi, CircleChar):
        if not isinstance(a, Circle):
            raise AlphabetMismatch(f"{chi} applied to {a!r}")
        return a.angle * chi.n
    if isinstance(chi, ProductChar):
        if not isinstance(a, Product) or len(a.parts) != len(chi.parts):
            raise AlphabetMismatch(f"{chi} applied to {a!r}")
        return reduce(lambda x, y: x + y,
                      (character_angle(c, p) for c, p in zip(chi.parts, a.parts)), ZERO)
    raise TypeError(f"not a character: {chi!r}")


# ---------------------------------------------------------------------------
# Numeric evaluation

@dataclass(frozen=True)
class PhiContext:
    """Numeric stand-in for the formal irrational phi.

    When ``exact`` is given, phi is that rational number and all equality
    logic uses it; ``phi`` is then only its float value.
    """

    phi: float
    exact: Fraction | None = None

    def __post_init__(self):
        if self.exact is not None:
            object.__setattr__(self, "exact", Fraction(self.exact))
            object.__setattr__(self, "phi", float(self.exact))
        if not 0.0 < self.phi < 1.0:
            raise ValueError("phi must lie in (0, 1)")

    @classmethod
    def irrational(cls, phi: float = (math.sqrt(5.0) - 1.0) / 2.0) -> PhiContext:
        return cls(float(phi))

    @classmethod
    def rational(cls, value) -> PhiContext:
        value = Fraction(value)
        return cls(float(value), value)

    @property
    def is_rational(self) -> bool:
        return self.exact is not None

    def resolve(self, t: Angle) -> Angle:
        """Substitute phi exactly when it is rational; identity otherwise."""
        if self.exact is None or t.k == 0:
            return t
        return Angle(t.q + t.k * self.exact, 0)

    def value(self, t: Angle) -> float:
        """The representative of t in [0, 1) as a float."""
        t = self.resolve(t)
        if t.k == 0:
            return float(t.q)
        return (float(t.q) + math.fmod(t.k * self.phi, 1.0)) % 1.0


GOLDEN = PhiContext.irrational()

_EXACT_UNITS = {
    Fraction(0): 1 + 0j,
    Fraction(1, 4): 1j,
    Fraction(1, 2): -1 + 0j,
    Fraction(3, 4): -1j,
}


def eval_unit(t: Angle, ctx: PhiContext = GOLDEN) -> complex:
    """exp(2 pi i (q + k*phi)) in double precision."""
    t = ctx.resolve(t)
    if t.k == 0 and t.q in _EXACT_UNITS:
        return _EXACT_UNITS[t.q]
    return cmath.exp(2j * math.pi * ctx.value(t))


def circle_distance(x: float, y: float) -> float:
    d = abs(x - y) % 1.0
    return min(d, 1.0 - d)


# ---------------------------------------------------------------------------
# Exact vanishing of sums of unit complexes

class SumVerdict(Enum):
    ZERO = "zero"
    NONZERO = "nonzero"
    UNKNOWN = "unknown"


def _poly_divmod(num: list[int], den: list[int]) -> tuple[list[int], list[int]]:
    # coefficient lists, lowest degree first; den must be monic
    num = list(num)
    dd = len(den) - 1
    if len(num) - 1 < dd:
        return [0], num
    quot = [0] * (len(num) - dd)
    for i in range(len(num) - 1, dd - 1, -1):
        c = num[i]
        if c:
            quot[i - dd] = c
            for j, dj in enumerate(den):
                num[i - dd + j] -= c * dj
    return quot, num[:dd] or [0]


@lru_cache(maxsize=None)
def cyclotomic_poly(n: int) -> tuple[int, ...]:
    """Integer coefficients of the n-th cyclotomic polynomial, lowest first."""
    poly = [-1] + [0] * (n - 1) + [1]
    for d in range(1, n):
        if n % d == 0:
            poly, rem = _poly_divmod(poly, list(cyclotomic_poly(d)))
            assert not any(rem)
    return tuple(poly)


def roots_of_unity_sum_is_zero(fracs: Iterable[Fraction]) -> bool:
    """Exact test of sum_j exp(2 pi i f_j) == 0 inside Q(zeta_N)."""
    fracs = [Fraction(f) % 1 for f in fracs]
    if not fracs:
        return True
    N = reduce(math.lcm, (f.denominator for f in fracs), 1)
    coeffs = [0] * N
    for f in fracs:
        coeffs[(f.numerator * (N // f.denominator)) % N] += 1
    _, rem = _poly_divmod(coeffs, list(cyclotomic_poly(N)))
    return not any(rem)


def exact_sum_is_zero(ts: Sequence[Angle], ctx: PhiContext = GOLDEN) -> SumVerdict:
    """Decide whether sum_j exp(2 pi i t_j) vanishes, without floating point.

    Terms are grouped by their phi-coefficient; for irrational phi the groups
    are treated as linearly independent, so the sum vanishes iff every group
    does.
    """
    groups: dict[int, list[Fraction]] = {}
    for t in ts:
        t = ctx.resolve(t)
        groups.setdefault(t.k, []).append(t.q)
    if all(roots_of_unity_sum_is_zero(g) for g in groups.values()):
        return SumVerdict.ZERO
    return SumVerdict.NONZERO


# ---------------------------------------------------------------------------
# Metric and nets (used by the primitivity probe)

def letter_distance(a: Letter, b: Letter, ctx: PhiContext = GOLDEN) -> float:
    if isinstance(a, Cyclic):
        return 0.0 if a == b else 1.0
    if isinstance(a, Circle):
        return circle_distance(ctx.value(a.angle), ctx.value(b.angle))
    if isinstance(a, Product):
        return max(letter_distance(x, y, ctx) for x, y in zip(a.parts, b.parts))
    if isinstance(a, ExtNat):
        fa = 0.0 if a.value is None else 1.0 / (a.value + 1)
        fb = 0.0 if b.value is None else 1.0 / (b.value + 1)
        return abs(fa - fb)
    raise TypeError(a)


def alphabet_net(alphabet: Alphabet, epsilon: float, extnat_cap: int = 10) -> list[Letter]:
    """A finite set of letters whose epsilon-balls cover the alphabet."""
    if isinstance(alphabet, CyclicGroup):
        return [Cyclic(alphabet.modulus, r) for r in range(alphabet.modulus)]
    if isinstance(alphabet, CircleGroup):
        steps = max(1, math.ceil(1.0 / epsilon))
        return [Circle(Angle(Fraction(j, steps))) for j in range(steps)]
    if isinstance(alphabet, ProductGroup):
        nets = [alphabet_net(f, epsilon, extnat_cap) for f in alphabet.factors]
        out: list[list[Letter]] = [[]]
        for net in nets:
            out = [prev + [x] for prev in out for x in net]
        return [Product(tuple(p)) for p in out]
    if isinstance(alphabet, ExtNatSpace):
        return [ExtNat(n) for n in range(extnat_cap + 1)] + [INF]
    raise TypeError(alphabet)


# ---------------------------------------------------------------------------
# Integer encoding of letters, for vectorised word generation

class Codec:
    """Encodes letters of one alphabet as fixed-width integer rows.

    Cyclic factors use one column (residue), circle factors two columns
    (numerator over ``denominator``, phi-coefficient), ExtNat one column with
    -1 standing for infinity.
    """

    def __init__(self, alphabet: Alphabet, denominator: int = 1):
        self.alphabet = alphabet
        self.denominator = int(denominator)
        self._slots: list[tuple[str, int]] = []
        self._walk(alphabet)
        self.width = len(self._slots)
        self.moduli = np.array(
            [m for _, m in self._slots], dtype=np.int64)

    def _walk(self, alphabet):
        if isinstance(alphabet, CyclicGroup):
            self._slots.append(("cyc", alphabet.modulus))
        elif isinstance(alphabet, CircleGroup):
            self._slots.append(("num", self.denominator))
            self._slots.append(("phi", 0))
        elif isinstance(alphabet, ProductGroup):
            for f in alphabet.factors:
                self._walk(f)
        elif isinstance(alphabet, ExtNatSpace):
            self._slots.append(("ext", 0))
        else:
            raise TypeError(alphabet)

    def __eq__(self, other):
        return (isinstance(other, Codec) and self.alphabet == other.alphabet
                and self.denominator == other.denominator)

    def __hash__(self):
        return hash((self.alphabet, self.denominator))

    @staticmethod
    def denominator_of(letters: Iterable[Letter]) -> int:
        dens = [1]

        def walk(a):
            if isinstance(a, Circle):
                dens.append(a.angle.q.denominator)
            elif isinstance(a, Product):
                for p in a.parts:
                    walk(p)

        for a in letters:
            walk(a)
        return reduce(math.lcm, dens)

    @classmethod
    def for_letters(cls, alphabet: Alphabet, letters: Iterable[Letter]) -> Codec:
        return cls(alphabet, cls.denominator_of(letters))

    def widened(self, letters: Iterable[Letter]) -> Codec:
        den = math.lcm(self.denominator, self.denominator_of(letters))
        return self if den == self.denominator else Codec(self.alphabet, den)

    def rescale(self, data: np.ndarray, source: Codec) -> np.ndarray:
        """Re-express rows encoded by ``source`` in this codec."""
        if source.denominator == self.denominator:
            return data
        factor = self.denominator // source.denominator
        out = data.copy()
        for i, (kind, _) in enumerate(self._slots):
            if kind == "num":
                out[:, i] *= factor
        return out

    def encode(self, a: Letter) -> tuple[int, ...]:
        if alphabet_of(a) != self.alphabet:
            raise AlphabetMismatch(f"{a} is not in {self.alphabet}")
        row: list[int] = []

        def walk(x):
            if isinstance(x, Cyclic):
                row.append(x.residue)
            elif isinstance(x, Circle):
                q = x.angle.q
                if self.denominator % q.denominator:
                    raise ValueError(f"denominator {self.denominator} cannot hold {q}")
                row.append(q.numerator * (self.denominator // q.denominator))
                row.append(x.angle.k)
            elif isinstance(x, Product):
                for p in x.parts:
                    walk(p)
            elif isinstance(x, ExtNat):
                row.append(-1 if x.value is None else x.value)

        walk(a)
        return tuple(row)

    def encode_many(self, letters: Sequence[Letter]) -> np.ndarray:
        if not letters:
            return np.zeros((0, self.width), dtype=np.int64)
        return np.array([self.encode(a) for a in letters], dtype=np.int64).reshape(-1, self.width)

    def decode(self, row) -> Letter:
        it = iter(int(v) for v in row)

        def walk(alphabet):
            if isinstance(alphabet, CyclicGroup):
                return Cyclic(alphabet.modulus, next(it))
            if isinstance(alphabet, CircleGroup):
                num = next(it)
                return Circle(Angle(Fraction(num, self.denominator), next(it)))
            if isinstance(alphabet, ProductGroup):
                return Product(tuple(walk(f) for f in alphabet.factors))
            v = next(it)
            return INF if v < 0 else ExtNat(v)

        return walk(self.alphabet)

    def reduce(self, data: np.ndarray) -> np.ndarray:
        """Normalise residues into range, in place."""
        for i, m in enumerate(self.moduli):
            if m:
                np.mod(data[..., i], m, out=data[..., i])
        return data

    def character_weights(self, chi: Character) -> tuple[int, list[int], list[int]]:
        """Integer form of chi: angle(row) = (row . num_w)/den + (row . phi_w)*phi."""
        terms: list[tuple[int, int, int]] = []  # (slot, multiplier, denominator)
        phi_w = [0] * self.width
        slot = 0

        def walk(alphabet, c):
            nonlocal slot
            if isinstance(alphabet, ExtNatSpace):
                raise AlphabetMismatch("characters are defined on group alphabets only")
            if isinstance(alphabet, ProductGroup):
                if isinstance(c, TrivialChar):
                    subs = [c] * len(alphabet.factors)
                elif isinstance(c, ProductChar) and len(c.parts) == len(alphabet.factors):
                    subs = c.parts
                else:
                    raise AlphabetMismatch(f"{c} on {alphabet}")
                for f, sc in zip(alphabet.factors, subs):
                    walk(f, sc)
                return
            if isinstance(alphabet, CyclicGroup):
                if isinstance(c, CyclicChar) and c.modulus == alphabet.modulus:
                    mult = c.index
                elif isinstance(c, TrivialChar):
                    mult = 0
                else:
                    raise AlphabetMismatch(f"{c} on {alphabet}")
                terms.append((slot, mult, alphabet.modulus))
                slot += 1
                return
            if isinstance(c, CircleChar):
                mult = c.n
            elif isinstance(c, TrivialChar):
                mult = 0
            else:
                raise AlphabetMismatch(f"{c} on {alphabet}")
            terms.append((slot, mult, self.denominator))
            phi_w[slot + 1] = mult
            slot += 2

        walk(self.alphabet, chi)
        den = reduce(math.lcm, (d for _, _, d in terms), 1)
        num_w = [0] * self.width
        for i, mult, d in terms:
            num_w[i] = mult * (den // d)
        return den, num_w, phi_w

    def unit_values(self, data: np.ndarray, chi: Character, ctx: PhiContext = GOLDEN) -> np.ndarray:
        """chi evaluated on every encoded row, as a complex array."""
        den, num_w, phi_w = self.character_weights(chi)
        num = (data @ np.array(num_w, dtype=np.int64)) if data.size else np.zeros(0, np.int64)
        kk = (data @ np.array(phi_w, dtype=np.int64)) if data.size else np.zeros(0, np.int64)
        if ctx.is_rational:
            a, b = ctx.exact.numerator, ctx.exact.denominator
            total = (num % den) * b + (kk % b) * a * den
            frac = (total % (den * b)) / float(den * b)
        else:
            frac = (np.mod(num, den) / float(den) + np.mod(kk * ctx.phi, 1.0)) % 1.0
        return np.exp(2j * np.pi * frac)
