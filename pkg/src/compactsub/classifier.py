"""Per-character spectral verdicts for bijective, coincidence and spin rules."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Any

from .alphabet import (
    GOLDEN, Angle, Circle, CircleChar, Cyclic, PhiContext, Product, SumVerdict, alphabet_of,
    character_angle, compose, exact_sum_is_zero,
)
from .autocorrelation import BijectiveRecurrenceSpec, eta1_closed_form
from .substitution import (
    Constant, ConstantLengthGroup, Spin, Translation, normalize_pseudo_fixed, primitivity_probe,
)

THM_DICHOTOMY = "bijective cyclic-periodic dichotomy"
THM_NO_AC = "bijective rules have no absolutely continuous diffraction"
THM_COINCIDENCE = "coincidence implies pure point diffraction"
THM_SPIN = "spin matrix: scaled-unitary gives Lebesgue, rank one reduces to a bijective factor"


class HypothesisViolation(ValueError):
    def __init__(self, theorem: str, detail: str):
        super().__init__(f"{theorem}: {detail}")
        self.theorem = theorem
        self.detail = detail


class Kind(str, Enum):
    PURE_POINT = "PurePoint"
    SINGULAR_CONTINUOUS = "PurelySingularContinuous"
    LEBESGUE = "Lebesgue"
    MIXED = "Mixed"
    UNKNOWN = "Unknown"


@dataclass(frozen=True)
class CyclicFactor:
    n: int
    g0: Angle
    g: Angle
    offset: int = 0  # g0 = g^offset

    def rule(self) -> ConstantLengthGroup:
        """[a] -> [a g0][a g0 g] ... [a g0 g^(n-1)][a g0] on C_n with g -> 1."""
        start = self.offset % self.n
        cols = [Translation(Cyclic(self.n, start + j)) for j in range(self.n)]
        cols.append(Translation(Cyclic(self.n, start)))
        return ConstantLengthGroup(tuple(cols))


@dataclass
class SpectralVerdict:
    kind: Kind
    ac_absent: bool
    evidence: dict = field(default_factory=dict)
    character: str = ""
    factor: CyclicFactor | None = None
    factor_rule: Any = None

    def record(self) -> dict:
        ev = dict(self.evidence)
        ev.setdefault("factor", None)
        ev.setdefault("eta1", None)
        return {"character": self.character, "kind": self.kind.value,
                "ac_absent": self.ac_absent, "evidence": ev}

    def to_json(self) -> str:
        return json.dumps(self.record(), sort_keys=True, ensure_ascii=False)


def _complex(z: complex) -> dict:
    return {"re": z.real, "im": z.imag, "abs": abs(z)}


def _finite_subgroup(gens, ctx: PhiContext):
    """Elements of the group generated by ``gens`` if it is finite (after resolving phi)."""
    def resolved(a):
        if isinstance(a, Circle):
            return Circle(ctx.resolve(a.angle))
        if isinstance(a, Product):
            return Product(tuple(resolved(p) for p in a.parts))
        return a

    def finite(a):
        if isinstance(a, Circle):
            return a.angle.order() is not None
        if isinstance(a, Product):
            return all(finite(p) for p in a.parts)
        return isinstance(a, Cyclic)

    gens = [resolved(a) for a in gens]
    if not all(finite(a) for a in gens):
        return None
    seen = {alphabet_of(gens[0]).identity()}
    frontier = list(seen)
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = compose(x, g)
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return sorted(seen, key=str)


def _primitive(rule: ConstantLengthGroup, ctx: PhiContext, epsilon: float, depth: int):
    net = _finite_subgroup(rule.letters(), ctx)
    return primitivity_probe(rule, epsilon, depth, ctx, net=net)


def classify_bijective(rule: ConstantLengthGroup, chi, ctx: PhiContext = GOLDEN,
                       probe_depth: int = 32, epsilon: float = 0.1) -> SpectralVerdict:
    if not isinstance(rule, ConstantLengthGroup) or not rule.is_bijective:
        raise HypothesisViolation(THM_DICHOTOMY, "every column must be a group translation")
    ev: dict = {"theorem": THM_DICHOTOMY}
    spec = BijectiveRecurrenceSpec.from_rule(rule, chi)
    eta1 = eta1_closed_form(spec, ctx)
    ev["eta1"] = _complex(eta1)
    probe = _primitive(rule, ctx, epsilon, probe_depth)
    ev["primitivity_probe"] = {"passed": probe.passed, "epsilon": epsilon, "depth": probe_depth,
                               "witness": None if probe.passed else str(probe.witness)}
    if not probe.passed:
        return SpectralVerdict(Kind.UNKNOWN, True, ev, str(chi))

    setup = normalize_pseudo_fixed(rule)
    base, s = setup.base, setup.s
    A = [ctx.resolve(character_angle(chi, col.letter)) for col in base.columns]
    L = base.length
    diffs = {A[j] - A[j + 1] for j in range(L - 1)}
    periodic = len(diffs) == 1 and A[0] == A[L - 1]
    ev["power"] = setup.power
    ev["s"] = s
    ev["abs_eta1_is_one"] = periodic
    if not periodic:
        ev["theorem"] = f"{THM_DICHOTOMY}; {THM_NO_AC}"
        return SpectralVerdict(Kind.SINGULAR_CONTINUOUS, True, ev, str(chi))

    g = A[s + 1] - A[s]
    n = g.order()
    g0 = g * (-s)
    factor = CyclicFactor(n, g0, g, -s)
    frule = factor.rule()
    from .builtins import format_rule
    ev["factor"] = {"n": n, "g0": str(g0), "g": str(g), "rule": format_rule(frule)}
    return SpectralVerdict(Kind.PURE_POINT, True, ev, str(chi), factor, frule)


def classify_coincidence(rule: ConstantLengthGroup, chi) -> SpectralVerdict:
    if not isinstance(rule, ConstantLengthGroup):
        raise HypothesisViolation(THM_COINCIDENCE, "needs a constant-length column rule")
    p = len(rule.coincidences)
    if p == 0:
        raise HypothesisViolation(THM_COINCIDENCE, "rule has no constant column")
    L = rule.length
    ev = {"theorem": THM_COINCIDENCE, "p": p, "L": L, "contraction": (L - p) / L,
          "eta1": None, "factor": None}
    return SpectralVerdict(Kind.PURE_POINT, True, ev, str(chi))


def _as_angle_matrix(W) -> list[list[Angle]]:
    return [[w if isinstance(w, Angle) else Angle.parse(str(w)) for w in row] for row in W]


def classify_spin(W, n: int, ctx: PhiContext = GOLDEN) -> SpectralVerdict:
    if isinstance(W, Spin):
        W = W.W
    W = _as_angle_matrix(W)
    q = len(W)
    if q < 2 or any(len(row) != q for row in W):
        raise ValueError("spin matrix must be square of size >= 2")
    chi = f"chi_{n}"
    ev: dict = {"theorem": THM_SPIN, "n": n, "eta1": None, "factor": None}
    if n == 0:
        ev["reason"] = "trivial character, comb is the lattice"
        return SpectralVerdict(Kind.PURE_POINT, True, ev, chi)
    nW = [[ctx.resolve(w * n) for w in row] for row in W]
    unitary = all(
        exact_sum_is_zero([a - b for a, b in zip(nW[i1], nW[i2])], ctx) is SumVerdict.ZERO
        for i1 in range(q) for i2 in range(i1 + 1, q))
    ev["unitary"] = unitary
    if unitary:
        ev["multiplicity"] = q
        return SpectralVerdict(Kind.LEBESGUE, False, ev, chi)
    rank1 = all(nW[i1][j1] + nW[i2][j2] == nW[i1][j2] + nW[i2][j1]
                for i1 in range(q) for i2 in range(q) for j1 in range(q) for j2 in range(q))
    ev["rank1"] = rank1
    if not rank1:
        return SpectralVerdict(Kind.UNKNOWN, False, ev, chi)
    r = [nW[i][0] - nW[0][0] for i in range(q)]
    c = [nW[0][j] for j in range(q)]
    factor = ConstantLengthGroup(tuple(Translation(Circle(c[j] + r[j])) for j in range(q)))
    inner = classify_bijective(factor, CircleChar(1), ctx)
    from .builtins import format_rule
    ev["factor"] = {"rule": format_rule(factor), "verdict": inner.record()}
    ev["eta1"] = inner.evidence.get("eta1")
    return SpectralVerdict(inner.kind, inner.ac_absent, ev, chi, inner.factor, factor)


def classify(rule, chi, ctx: PhiContext = GOLDEN, n: int | None = None) -> SpectralVerdict:
    """Dispatch on rule type; spin rules take the integer character index ``n``."""
    if isinstance(rule, Spin):
        if n is None:
            n = chi.n if isinstance(chi, CircleChar) else 1
        return classify_spin(rule, n, ctx)
    if isinstance(rule, ConstantLengthGroup):
        if rule.coincidences:
            if any(not isinstance(c, (Constant, Translation)) for c in rule.columns):
                raise HypothesisViolation(THM_COINCIDENCE, "unexpected column type")
            return classify_coincidence(rule, chi)
        return classify_bijective(rule, chi, ctx)
    raise HypothesisViolation(THM_DICHOTOMY, "only constant-length or spin rules are classified")
