"""Command-line front end."""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import builtins
from .alphabet import (
    Angle, CircleChar, CircleGroup, CyclicChar, CyclicGroup, PhiContext, ProductChar,
    ProductGroup, TrivialChar,
)
from .autocorrelation import BijectiveRecurrenceSpec, EtaTable
from .classifier import HypothesisViolation, classify
from .config import ConfigError, parse_config
from .diffraction import fejer_spectrum, riesz_partial, wiener_l2_mean
from .geometry import (
    NoConvergence, audit_delone, delone_build, frequency_estimate, power_iteration, render_dyadic,
)
from .substitution import (
    ConstantLengthGroup, NonConstantTable, Spin, legal_window, normalize_pseudo_fixed,
    pseudo_fixed_prefix,
)


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, ensure_ascii=False, indent=2) + "\n"


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _positive(kind=int):
    def conv(s):
        v = kind(s)
        if v <= 0:
            raise argparse.ArgumentTypeError(f"must be positive: {s}")
        return v
    return conv


def _load(args):
    """(rule, ctx) from --builtin or --config; CLI phi flags override the file."""
    ctx = None
    if args.config:
        parsed = parse_config(Path(args.config).read_text(encoding="utf-8"))
        rule, ctx = parsed.rule, parsed.ctx
    else:
        rule = builtins.builtin(args.builtin or "rho1")
    if args.phi is not None or ctx is None:
        text = args.phi or "0.618033988749895"
        ctx = PhiContext.rational(Fraction(text)) if args.rational else PhiContext.irrational(float(text))
    return rule, ctx


def parse_chi(text: str, rule):
    if isinstance(rule, Spin):
        return ProductChar((CircleChar(int(text)), TrivialChar()))
    alphabet = rule.alphabet

    def one(tok, a):
        tok = tok.strip()
        if tok in ("t", "trivial"):
            return TrivialChar()
        if isinstance(a, CyclicGroup):
            return CyclicChar(a.modulus, int(tok))
        if isinstance(a, CircleGroup):
            return CircleChar(int(tok))
        raise ValueError(f"no characters on {a}")

    if isinstance(alphabet, ProductGroup):
        toks = text.split(",")
        if len(toks) != len(alphabet.factors):
            raise ValueError(f"character needs {len(alphabet.factors)} comma-separated parts")
        return ProductChar(tuple(one(t, a) for t, a in zip(toks, alphabet.factors)))
    return one(text, alphabet)


def _word(rule, radius: int):
    if isinstance(rule, ConstantLengthGroup):
        return pseudo_fixed_prefix(normalize_pseudo_fixed(rule), radius)
    return legal_window(rule, radius)


def _eta_table(rule, chi, ctx, K: int, N: int, exact: bool):
    if exact and isinstance(rule, ConstantLengthGroup) and rule.is_bijective:
        return EtaTable.exact_bijective(BijectiveRecurrenceSpec.from_rule(rule, chi), ctx)
    if isinstance(rule, NonConstantTable):
        raise HypothesisViolation("autocorrelation", "non-constant-length rules have no lattice support")
    return EtaTable.empirical(_word(rule, N + K), chi, K, ctx, N=N)


# ---------------------------------------------------------------------------
# commands

def cmd_orbit(args) -> int:
    rule, _ = _load(args)
    if args.show_rule:
        _emit(builtins.format_rule(rule) + "\n", None)
        if args.radius is None:
            return 0
    w = _word(rule, args.radius or 8)
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(["coord", "letter"])
    for i, a in enumerate(w.letters()):
        wr.writerow([i - w.origin, str(a)])
    _emit(buf.getvalue(), args.out)
    return 0


def cmd_eta(args) -> int:
    rule, ctx = _load(args)
    chi = parse_chi(args.chi, rule)
    table = _eta_table(rule, chi, ctx, args.max_lag, args.N, args.exact)
    _emit(table.to_csv(range(-args.max_lag, args.max_lag + 1)), args.out)
    return 0


def cmd_classify(args) -> int:
    rule, ctx = _load(args)
    n = int(args.chi) if isinstance(rule, Spin) else None
    chi = parse_chi(args.chi, rule) if isinstance(rule, ConstantLengthGroup) else None
    v = classify(rule, chi, ctx, n=n)
    _emit(_dump(v.record()), args.out)
    return 0


def cmd_spectrum(args) -> int:
    rule, ctx = _load(args)
    chi = parse_chi(args.chi, rule)
    K, G = args.kernel_order, args.grid
    table = _eta_table(rule, chi, ctx, K, args.N, not args.empirical)
    grid = fejer_spectrum(table, K, G)
    _emit(grid.to_csv(), args.out)
    if args.wiener:
        sys.stderr.write(f"wiener_l2_mean={wiener_l2_mean(table, K)!r}\n")
    return 0


def cmd_riesz(args) -> int:
    _, ctx = _load(args)
    a = Angle.parse(args.angle) if args.angle else Angle(Fraction(0), int(args.chi or 1))
    grid = riesz_partial(a, args.riesz_depth, args.grid, ctx, workers=args.workers)
    _emit(grid.to_csv(), args.out)
    return 0


def cmd_geometry(args) -> int:
    if args.what == "eig":
        res = power_iteration(args.cap, args.tol, args.max_iter)
        report = {"lambda": res.eigenvalue, "iterations": res.iterations,
                  "bracket": list(res.bracket), "cap": args.cap,
                  "ell": [float(v) for v in res.ell.values], "ell_inf": float(res.ell.at_inf)}
    else:
        f = frequency_estimate(args.depth, args.report_cap)
        report = {"depth": args.depth,
                  "frequencies": {str(n): float(v) for n, v in enumerate(f.values)},
                  "inf": float(f.at_inf)}
    _emit(_dump(report), args.out)
    return 0


def cmd_delone(args) -> int:
    d = delone_build(args.iters, args.tiles)
    if args.points:
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(["num", "exp", "decimal", "label"])
        for x, a in zip(d.points, d.labels):
            r = render_dyadic(x)
            wr.writerow([r["num"], r["exp"], repr(r["decimal"]), str(a)])
        Path(args.points).write_text(buf.getvalue(), encoding="utf-8")
    report = {"tiles": len(d), "window": [render_dyadic(d.window[0]), render_dyadic(d.window[1])]}
    if args.audit:
        report["audit"] = audit_delone(d).record()
    _emit(_dump(report), args.out)
    return 0


def cmd_selftest(args) -> int:
    from .acceptance import run_all
    results = run_all(print)
    ok = sum(r.passed for r in results)
    print(f"{ok}/{len(results)} criteria passed")
    return 0 if ok == len(results) else 1


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    src = common.add_mutually_exclusive_group()
    src.add_argument("--builtin", help="rho1, rho2, spin, extnat, cyclic(n), c2xs1")
    src.add_argument("--config", help="substitution config file")
    common.add_argument("--phi", help="value of phi (decimal, or p/q with --rational)")
    kind = common.add_mutually_exclusive_group()
    kind.add_argument("--irrational", action="store_true", help="treat phi as irrational (default)")
    kind.add_argument("--rational", action="store_true", help="treat phi as the exact fraction given")
    common.add_argument("--chi", default="1", help="character: integer index, or comma list for products")
    common.add_argument("--out", help="output file (default stdout)")
    common.add_argument("--workers", type=_positive(), default=1)

    p = argparse.ArgumentParser(prog="compactsub", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    o = sub.add_parser("orbit", parents=[common], help="print the rule or a generated window")
    o.add_argument("--show-rule", action="store_true")
    o.add_argument("--radius", type=_positive())
    o.set_defaults(func=cmd_orbit)

    e = sub.add_parser("eta", parents=[common], help="autocorrelation coefficients as CSV")
    e.add_argument("--max-lag", type=_positive(), default=16)
    e.add_argument("--N", type=_positive(), default=4 ** 8)
    e.add_argument("--exact", action="store_true", help="use the exact recurrence (bijective rules)")
    e.set_defaults(func=cmd_eta)

    c = sub.add_parser("classify", parents=[common], help="spectral verdict as JSON")
    c.set_defaults(func=cmd_classify)

    s = sub.add_parser("spectrum", parents=[common], help="Fejer-smoothed spectrum as CSV")
    s.add_argument("--kernel-order", type=_positive(), default=2 ** 10)
    s.add_argument("--grid", type=_positive(), default=2 ** 12)
    s.add_argument("--N", type=_positive(), default=2 ** 18)
    s.add_argument("--empirical", action="store_true", help="empirical eta even for bijective rules")
    s.add_argument("--wiener", action="store_true", help="also report the Wiener mean on stderr")
    s.set_defaults(func=cmd_spectrum)

    r = sub.add_parser("riesz", parents=[common], help="Riesz partial product as CSV")
    r.add_argument("--angle", help="angle a, e.g. 2phi or 1/2")
    r.add_argument("--riesz-depth", type=_positive(), default=12)
    r.add_argument("--grid", type=_positive(), default=2 ** 13)
    r.set_defaults(func=cmd_riesz)

    g = sub.add_parser("geometry", parents=[common], help="eigendata and frequencies")
    g.add_argument("what", choices=["eig", "freq"])
    g.add_argument("--cap", type=_positive(), default=40)
    g.add_argument("--tol", type=_positive(float), default=1e-10)
    g.add_argument("--max-iter", type=_positive(), default=10_000)
    g.add_argument("--depth", type=_positive(), default=14)
    g.add_argument("--report-cap", type=_positive(), default=12)
    g.set_defaults(func=cmd_geometry)

    d = sub.add_parser("delone", parents=[common], help="Delone set and audits")
    d.add_argument("--iters", type=int, default=6)
    d.add_argument("--tiles", type=_positive())
    d.add_argument("--audit", action="store_true")
    d.add_argument("--points", help="write the point list as CSV")
    d.set_defaults(func=cmd_delone)

    t = sub.add_parser("selftest", help="run the acceptance suite")
    t.set_defaults(func=cmd_selftest)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as e:
        sys.stderr.write(f"config error: {e}\n")
        return 2
    except HypothesisViolation as e:
        sys.stderr.write(f"hypothesis violated ({e.theorem}): {e.detail}\n")
        return 1
    except KeyError as e:
        sys.stderr.write(f"error: {e.args[0]}\n")
        return 2
    except (ValueError, NoConvergence) as e:
        sys.stderr.write(f"error: {e}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
