"""Shipped example rules and a plain-text rule printer."""
from __future__ import annotations

import re
from fractions import Fraction

from .alphabet import (
    Angle, Circle, CircleGroup, Cyclic, CyclicGroup, ExtNat, Letter, Product, ProductGroup,
    ZERO, alphabet_of,
)
from .substitution import Constant, ConstantLengthGroup, NonConstantTable, Rule, Spin, Translation

ALPHA = Angle(Fraction(0), 1)
HALF = Angle(Fraction(1, 2), 0)


def rho1() -> ConstantLengthGroup:
    t = Translation
    return ConstantLengthGroup((t(Circle(ZERO)), t(Circle(ZERO)), t(Circle(ALPHA)), t(Circle(ZERO))))


def rho2() -> ConstantLengthGroup:
    t = Translation
    return ConstantLengthGroup((t(Circle(ZERO)), Constant(Circle(ZERO)), t(Circle(ALPHA)),
                                t(Circle(ZERO))))


def spin() -> Spin:
    return Spin(((ZERO, HALF), (ALPHA, ALPHA)))


def extnat(cap: int | None = None) -> NonConstantTable:
    return NonConstantTable(cap)


def cyclic(n: int) -> ConstantLengthGroup:
    """a -> [a][ag][ag^2]...[ag^(n-1)][a] on C_n."""
    if n < 2:
        raise ValueError("cyclic(n) needs n >= 2")
    cols = [Translation(Cyclic(n, j)) for j in range(n)] + [Translation(Cyclic(n, 0))]
    return ConstantLengthGroup(tuple(cols))


def c2xs1() -> ConstantLengthGroup:
    e = Product((Cyclic(2, 0), Circle(ZERO)))
    b1 = Product((Cyclic(2, 1), Circle(ALPHA)))
    return ConstantLengthGroup((Translation(e), Translation(b1), Translation(e)))


BUILTINS = {"rho1": rho1, "rho2": rho2, "spin": spin, "extnat": extnat, "c2xs1": c2xs1}

_CYCLIC = re.compile(r"^cyclic\((\d+)\)$|^cyclic(\d+)$")


def builtin(name: str) -> Rule:
    name = name.strip()
    m = _CYCLIC.match(name)
    if m:
        return cyclic(int(m.group(1) or m.group(2)))
    try:
        return BUILTINS[name]()
    except KeyError:
        raise KeyError(f"unknown builtin {name!r}") from None


# ---------------------------------------------------------------------------
# printing

_SUP = str.maketrans("0123456789-", "⁰¹²³⁴⁵⁶⁷⁸⁹⁻")


def _power(sym: str, k: int) -> str:
    if k == 0:
        return ""
    if k == 1:
        return sym
    return sym + str(k).translate(_SUP)


def _angle_times(var: str, t: Angle) -> str:
    """Multiplicative rendering of e^{2 pi i t} * var, e.g. θα, −θ, θα²."""
    body = var + _power("α", t.k)
    if t.q == 0:
        return body
    if t.q == Fraction(1, 2):
        return "−" + body
    return f"{body}·e({t.q})"


def _letter_times(var: str, b: Letter) -> str:
    if isinstance(b, Circle):
        return _angle_times(var, b.angle)
    if isinstance(b, Cyclic):
        return var + _power("g", b.residue)
    if isinstance(b, Product):
        return "(" + ",".join(_letter_times(v, p) for v, p in zip(_vars(b), b.parts)) + ")"
    raise TypeError(b)


def _vars(b: Product) -> list[str]:
    names = []
    for p in b.parts:
        names.append("θ" if isinstance(p, Circle) else "a")
    return names


def _constant(b: Letter) -> str:
    if isinstance(b, Circle):
        return _angle_times("", b.angle) or "1"
    if isinstance(b, Cyclic):
        return _power("g", b.residue) or "e"
    if isinstance(b, Product):
        return "(" + ",".join(_constant(p) for p in b.parts) + ")"
    return str(b)


def format_rule(rule: Rule) -> str:
    if isinstance(rule, NonConstantTable):
        return "[0] ↦ [0][1]\n[n] ↦ [0][n+1][n−1]\n[∞] ↦ [0][∞][∞]"
    if isinstance(rule, Spin):
        lines = []
        for i, row in enumerate(rule.W):
            img = "".join(f"({_angle_times('θ', w)},{j})" for j, w in enumerate(row))
            lines.append(f"(θ,{i}) ↦ {img}")
        return "\n".join(lines)
    alphabet = alphabet_of(rule.columns[0].letter)
    if isinstance(alphabet, CircleGroup):
        var = "θ"
    elif isinstance(alphabet, CyclicGroup):
        var = "a"
    elif isinstance(alphabet, ProductGroup):
        var = "(" + ",".join(_vars(alphabet.identity())) + ")"
    else:
        var = "x"
    cols = []
    for c in rule.columns:
        if isinstance(c, Constant):
            cols.append(f"[{_constant(c.letter)}]")
        else:
            cols.append(f"[{_letter_times(var, c.letter) if not isinstance(c.letter, Product) else _letter_times('', c.letter)}]")
    return f"[{var}] ↦ " + "".join(cols)
