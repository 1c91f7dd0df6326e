"""Line-oriented substitution config files.

Example (the four-column circle rule)::

    [alphabet]
    kind = circle
    phi = 0.618033988749895
    phi_kind = irrational

    [rule]
    translation 0
    translation 0
    translation phi
    translation 0

Other forms: ``kind = cyclic`` with ``modulus = n``; ``kind = product`` with
``factors = cyclic 2, circle`` and letters written ``(1, 1/2+phi)``;
``spin q`` followed by q lines ``row <angle> ... <angle>``; ``builtin <name>``.
Blank lines and ``#`` comments are ignored.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from . import builtins
from .alphabet import (
    INF, Alphabet, Angle, Circle, CircleGroup, Cyclic, CyclicGroup, ExtNat, ExtNatSpace,
    Letter, PhiContext, Product, ProductGroup,
)
from .substitution import Constant, ConstantLengthGroup, Rule, Spin, Translation


class ConfigError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


@dataclass
class ParsedConfig:
    rule: Rule
    ctx: PhiContext | None = None


_SECTION = re.compile(r"^\[(\w+)\]$")


def _parse_factor(text: str) -> Alphabet:
    bits = text.split()
    if bits == ["circle"]:
        return CircleGroup()
    if len(bits) == 2 and bits[0] == "cyclic":
        return CyclicGroup(int(bits[1]))
    raise ValueError(f"unknown factor {text!r}")


def parse_letter(text: str, alphabet: Alphabet) -> Letter:
    text = text.strip()
    if isinstance(alphabet, CyclicGroup):
        return Cyclic(alphabet.modulus, int(text))
    if isinstance(alphabet, CircleGroup):
        return Circle(Angle.parse(text))
    if isinstance(alphabet, ExtNatSpace):
        return INF if text in ("inf", "∞") else ExtNat(int(text))
    if isinstance(alphabet, ProductGroup):
        if not (text.startswith("(") and text.endswith(")")):
            raise ValueError("product letters are written (a, b, ...)")
        parts = text[1:-1].split(",")
        if len(parts) != len(alphabet.factors):
            raise ValueError(f"expected {len(alphabet.factors)} components")
        return Product(tuple(parse_letter(p, f) for p, f in zip(parts, alphabet.factors)))
    raise ValueError(f"unsupported alphabet {alphabet}")


def parse_config(text: str) -> ParsedConfig:
    section = None
    settings: dict[str, tuple[str, int, int]] = {}
    columns = []
    spin_rows: list[list[Angle]] = []
    spin_q = None
    builtin_name = None
    alphabet: Alphabet | None = None
    rule_lines: list[tuple[int, int, str, str, int]] = []

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        stripped = line.strip()
        if not stripped:
            continue
        col = len(line) - len(line.lstrip()) + 1
        m = _SECTION.match(stripped)
        if m:
            section = m.group(1)
            if section not in ("alphabet", "rule"):
                raise ConfigError(f"unknown section [{section}]", lineno, col)
            continue
        if section is None:
            raise ConfigError("content before any section", lineno, col)
        if section == "alphabet":
            if "=" not in stripped:
                raise ConfigError("expected key = value", lineno, col)
            key, value = (s.strip() for s in stripped.split("=", 1))
            if key not in ("kind", "modulus", "factors", "phi", "phi_kind"):
                raise ConfigError(f"unknown key {key!r}", lineno, col)
            after = line.split("=", 1)[1]
            vcol = line.index("=") + 2 + len(after) - len(after.lstrip())
            settings[key] = (value, lineno, vcol)
        else:
            word, _, rest = stripped.partition(" ")
            rcol = col + len(word) + 1 + (len(rest) - len(rest.lstrip()))
            rule_lines.append((lineno, col, word, rest.strip(), rcol))

    def setting(key, default=None):
        return settings.get(key, (default, 0, 0))

    # alphabet
    kind, kl, kc = setting("kind")
    if kind == "circle":
        alphabet = CircleGroup()
    elif kind == "cyclic":
        mod, ml, mc = setting("modulus")
        if mod is None:
            raise ConfigError("cyclic alphabet needs modulus", kl, kc)
        try:
            alphabet = CyclicGroup(int(mod))
        except ValueError:
            raise ConfigError(f"bad modulus {mod!r}", ml, mc) from None
    elif kind == "product":
        fac, fl, fc = setting("factors")
        if fac is None:
            raise ConfigError("product alphabet needs factors", kl, kc)
        try:
            alphabet = ProductGroup(tuple(_parse_factor(f) for f in fac.split(",")))
        except ValueError as e:
            raise ConfigError(str(e), fl, fc) from None
    elif kind == "extnat":
        alphabet = ExtNatSpace()
    elif kind is not None:
        raise ConfigError(f"unknown alphabet kind {kind!r}", kl, kc)

    ctx = None
    phi, pl, pc = setting("phi")
    pk, pkl, pkc = setting("phi_kind", "irrational")
    if pk not in ("rational", "irrational"):
        raise ConfigError(f"phi_kind must be rational or irrational, not {pk!r}", pkl, pkc)
    if phi is not None:
        try:
            if pk == "rational":
                ctx = PhiContext.rational(Fraction(phi))
            else:
                ctx = PhiContext.irrational(float(phi))
        except (ValueError, ZeroDivisionError):
            raise ConfigError(f"bad phi value {phi!r}", pl, pc) from None

    # rule
    if not rule_lines:
        raise ConfigError("missing [rule] section or empty rule", max(1, len(text.splitlines())), 1)
    for lineno, col, word, rest, rcol in rule_lines:
        try:
            if word == "builtin":
                if builtin_name or columns or spin_q:
                    raise ConfigError("builtin cannot be mixed with other rule lines", lineno, col)
                builtin_name = rest
            elif word in ("translation", "constant"):
                if alphabet is None:
                    raise ConfigError("columns need an [alphabet] kind", lineno, col)
                letter = parse_letter(rest, alphabet)
                columns.append(Translation(letter) if word == "translation" else Constant(letter))
            elif word == "spin":
                spin_q = int(rest)
                if spin_q < 2:
                    raise ConfigError("spin needs q >= 2", lineno, rcol)
            elif word == "row":
                if spin_q is None:
                    raise ConfigError("row before spin", lineno, col)
                spin_rows.append([Angle.parse(t) for t in rest.split()])
                if len(spin_rows[-1]) != spin_q:
                    raise ConfigError(f"row needs {spin_q} angles", lineno, rcol)
            else:
                raise ConfigError(f"unknown rule line {word!r}", lineno, col)
        except ConfigError:
            raise
        except (ValueError, ZeroDivisionError) as e:
            raise ConfigError(f"cannot read {rest!r} ({e})", lineno, rcol) from None

    last = rule_lines[-1][0]
    if builtin_name is not None:
        name = "extnat" if builtin_name == "extnat-example" else builtin_name
        try:
            return ParsedConfig(builtins.builtin(name), ctx)
        except KeyError as e:
            raise ConfigError(str(e.args[0]), rule_lines[0][0], rule_lines[0][4]) from None
    if spin_q is not None:
        if columns:
            raise ConfigError("spin rules take no columns", last, 1)
        if len(spin_rows) != spin_q:
            raise ConfigError(f"spin {spin_q} needs {spin_q} rows", last, 1)
        return ParsedConfig(Spin(tuple(tuple(r) for r in spin_rows)), ctx)
    return ParsedConfig(ConstantLengthGroup(tuple(columns)), ctx)
