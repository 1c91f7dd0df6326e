"""Acceptance criteria shared by the test suite and the ``selftest`` command.

Each criterion returns a CriterionResult whose ``checks`` map names to
booleans; a criterion passes when every check does.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from . import builtins
from .alphabet import (
    GOLDEN, Angle, Circle, CircleChar, Cyclic, CyclicChar, PhiContext, ProductChar, TrivialChar,
)
from .autocorrelation import (
    BijectiveRecurrenceSpec, EtaTable, almost_period_set, eta1_closed_form, eta_coincidence_scale,
    eta_empirical, eta_empirical_many, eta_exact_bijective,
)
from .classifier import Kind, classify_bijective, classify_coincidence, classify_spin
from .diffraction import fejer_spectrum, riesz_partial
from .geometry import (
    LAMBDA, audit_delone, delone_build, frequency_estimate, m_apply, natural_length,
    power_iteration,
)
from .substitution import (
    ConstantLengthGroup, Translation, detect_period, legal_window, normalize_pseudo_fixed,
    pseudo_fixed_prefix,
)

PHI = PhiContext.irrational(0.618033988749895)


@dataclass
class CriterionResult:
    number: int
    title: str
    checks: dict = field(default_factory=dict)
    details: dict = field(default_factory=dict)
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def line(self) -> str:
        failed = [k for k, v in self.checks.items() if not v]
        tail = "" if not failed else "  failed: " + ", ".join(failed)
        return (f"[{'PASS' if self.passed else 'FAIL'}] {self.number}. {self.title}"
                f" ({self.seconds:.1f}s){tail}")


def _timed(number: int, title: str, limit: float | None = None):
    def wrap(fn: Callable[[CriterionResult], None]):
        def run() -> CriterionResult:
            res = CriterionResult(number, title)
            t0 = time.perf_counter()
            fn(res)
            res.seconds = time.perf_counter() - t0
            if limit is not None:
                res.checks[f"runtime < {limit:g} s"] = res.seconds < limit
            return res
        run.__name__ = fn.__name__
        run.__doc__ = fn.__doc__
        return run
    return wrap


# ---------------------------------------------------------------------------
# random bijective rules on cyclic groups

def _generates(diffs: list[int], k: int) -> bool:
    g = 0
    for d in diffs:
        g = math.gcd(g, d % k)
    return math.gcd(g, k) == 1


def random_cyclic_rule(rng: np.random.Generator, k: int, L: int) -> ConstantLengthGroup:
    """Uniform translation columns on C_k, redrawn until the column differences generate C_k."""
    while True:
        b = rng.integers(0, k, size=L)
        if _generates([int(x - b[0]) for x in b[1:]], k):
            return ConstantLengthGroup(tuple(Translation(Cyclic(k, int(x))) for x in b))


# ---------------------------------------------------------------------------

@_timed(1, "eta(1) closed form for rho1", limit=30)
def criterion_1(res: CriterionResult) -> None:
    rule = builtins.rho1()
    prefix = pseudo_fixed_prefix(normalize_pseudo_fixed(rule), 4 ** 10 + 1)
    worst_closed = worst_emp = 0.0
    for n in (1, 2, 3):
        target = 1 / 3 + 2 / 3 * math.cos(2 * math.pi * n * PHI.phi)
        spec = BijectiveRecurrenceSpec.from_rule(rule, CircleChar(n))
        worst_closed = max(worst_closed, abs(eta1_closed_form(spec, PHI) - target))
        emp = eta_empirical(prefix, CircleChar(n), 1, PHI, N=4 ** 10)
        worst_emp = max(worst_emp, abs(emp - target))
    res.details.update(closed_err=worst_closed, empirical_err=worst_emp)
    res.checks["closed form within 1e-12"] = worst_closed <= 1e-12
    res.checks["empirical within 5e-3"] = worst_emp <= 5e-3


@_timed(2, "L-scaling of the exact bijective recurrence")
def criterion_2(res: CriterionResult, seed: int = 2024) -> None:
    rng = np.random.default_rng(seed)
    specs = [BijectiveRecurrenceSpec.from_rule(builtins.rho1(), CircleChar(1))]
    ctxs = [PHI]
    for _ in range(20):
        rule = random_cyclic_rule(rng, 6, int(rng.integers(2, 6)))
        specs.append(BijectiveRecurrenceSpec.from_rule(rule, CyclicChar(6, 1)))
        ctxs.append(PHI)
    worst = 0.0
    for spec, ctx in zip(specs, ctxs):
        for m in range(0, 65):
            base = eta_exact_bijective(spec, m, ctx)
            for r in range(1, 6):
                worst = max(worst, abs(eta_exact_bijective(spec, spec.L ** r * m, ctx) - base))
    res.details.update(max_err=worst, rules=len(specs))
    res.checks["eta(L^r m) = eta(m) within 1e-12"] = worst <= 1e-12


@_timed(3, "bijective dichotomy for rho1")
def criterion_3(res: CriterionResult) -> None:
    rule = builtins.rho1()
    kinds = [classify_bijective(rule, CircleChar(n), PHI).kind for n in (1, 2, 3)]
    res.checks["irrational phi gives sc"] = all(k is Kind.SINGULAR_CONTINUOUS for k in kinds)
    v = classify_bijective(rule, CircleChar(3), PhiContext.rational(Fraction(1, 3)))
    res.checks["phi=1/3, n=3 gives pp"] = v.kind is Kind.PURE_POINT
    period = None
    if v.factor_rule is not None:
        word = pseudo_fixed_prefix(normalize_pseudo_fixed(v.factor_rule), 2000)
        period = detect_period(word)
    res.details.update(period=period)
    res.checks["factor word period <= 12"] = period is not None and period <= 12


@_timed(4, "coincidence pure point for rho2")
def criterion_4(res: CriterionResult) -> None:
    rule = builtins.rho2()
    chi = CircleChar(1)
    res.checks["classify_coincidence is pp"] = classify_coincidence(rule, chi).kind is Kind.PURE_POINT
    prefix = pseudo_fixed_prefix(normalize_pseudo_fixed(rule), 4 ** 10 + 4 ** 6 + 1)
    eta = EtaTable.empirical(prefix, chi, 4 ** 6, PHI, N=4 ** 10)
    worst = 0.0
    for m in range(1, 17):
        x = eta(m)
        for ell in range(1, 5):
            x = eta_coincidence_scale(x, 1, 4)
            worst = max(worst, abs(eta(4 ** ell * m) - x))
    res.details["scaling_err"] = worst
    res.checks["scaling law within 5e-3"] = worst <= 5e-3
    ap = almost_period_set(eta, 0.2, 4 ** 6)
    res.details["rho2_members"] = len(ap.members)
    res.details["rho2_max_gap"] = ap.max_gap
    res.checks["rho2 P_0.2 has finite max_gap"] = ap.max_gap is not None
    exact = EtaTable.exact_bijective(BijectiveRecurrenceSpec.from_rule(builtins.rho1(), chi), PHI)
    ap1 = almost_period_set(exact, 0.05, 4 ** 6)
    res.checks["rho1 P_0.05 within [1, 4^6] empty"] = not [m for m in ap1.members if m >= 1]


@_timed(5, "spin trichotomy")
def criterion_5(res: CriterionResult) -> None:
    W = builtins.spin()
    expect = []
    got = []
    for n in range(21):
        got.append(classify_spin(W, n, PHI).kind)
        expect.append(Kind.PURE_POINT if n == 0 else
                      Kind.LEBESGUE if n % 2 else Kind.SINGULAR_CONTINUOUS)
    res.checks["verdicts n=0..20"] = got == expect
    N = 2 ** 20
    word = legal_window(W, N + 100)
    chi1 = ProductChar((CircleChar(1), TrivialChar()))
    vals = eta_empirical_many(word, chi1, range(1, 101), PHI, N=N)
    res.details["spin_n1_max_abs_eta"] = float(np.abs(vals).max())
    res.checks["n=1 |eta(m)| <= 0.02"] = float(np.abs(vals).max()) <= 0.02
    K, G = 2 ** 12, 2 ** 13
    factor = ConstantLengthGroup((Translation(Circle(Angle())), Translation(Circle(Angle(0, 2)))))
    prefix = pseudo_fixed_prefix(normalize_pseudo_fixed(factor), N + K + 1)
    fej = fejer_spectrum(EtaTable.empirical(prefix, CircleChar(1), K, PHI, N=N), K, G)
    rz = riesz_partial(Angle(Fraction(0), 2), 12, G, PHI)
    dist = rz.relative_l1(fej)
    res.details["riesz_fejer_rel_l1"] = dist
    # weak agreement: distance between the two cumulative distributions
    cdf = np.abs(np.cumsum(rz.values) - np.cumsum(fej.values)).max() / G
    res.details["riesz_fejer_cdf_sup"] = float(cdf)
    res.checks["n=2 Riesz vs Fejer relative L1 <= 0.1"] = dist <= 0.1


@_timed(6, "geometry eigendata", limit=10)
def criterion_6(res: CriterionResult) -> None:
    N = 40
    ell = natural_length(N)
    Ml = m_apply(ell)
    exact = all(Ml.values[n] == LAMBDA * ell.values[n] for n in range(N)) and \
        Ml.at_inf == LAMBDA * ell.at_inf
    res.checks["M l* = (5/2) l* below cap"] = exact
    pi = power_iteration(N, 1e-10, 10_000)
    lam_err = abs(pi.eigenvalue - 2.5)
    ell_err = max(abs(float(pi.ell.values[n]) - (2 - 2.0 ** -n)) for n in range(21))
    res.details.update(lambda_err=lam_err, ell_err=ell_err)
    res.checks["|lambda - 5/2| <= 1e-6"] = lam_err <= 1e-6
    res.checks["|l(n) - (2 - 2^-n)| <= 1e-6"] = ell_err <= 1e-6
    f = frequency_estimate(14)
    ferr = max(abs(float(f.values[n]) - 2.0 ** -(n + 1)) for n in range(7))
    res.details["freq_err"] = ferr
    res.checks["frequencies within 1e-3 at depth 14"] = ferr <= 1e-3


@_timed(7, "Delone audits")
def criterion_7(res: CriterionResult) -> None:
    a = audit_delone(delone_build(0, tiles=10 ** 4))
    res.details.update(a.record())
    res.checks["min gap exactly 1"] = a.min_gap == 1
    res.checks["gaps in {2-2^-n} u {2}"] = a.gaps_in_length_set
    res.checks["(5/2) Lambda in Lambda"] = a.inflation_ok and a.inflation_checked > 0
    res.checks["distinct gaps >= 10"] = a.distinct_gaps >= 10


@_timed(8, "oracle equivalence on random cyclic rules", limit=300)
def criterion_8(res: CriterionResult, seed: int = 7, count: int = 100) -> None:
    rng = np.random.default_rng(seed)
    N = 10 ** 6
    worst = 0.0
    disagreements = 0
    pure_point = 0
    ms = list(range(-32, 33))
    for _ in range(count):
        k = int(rng.integers(2, 7))
        L = int(rng.integers(2, 6))
        rule = random_cyclic_rule(rng, k, L)
        chi = CyclicChar(k, 1)
        spec = BijectiveRecurrenceSpec.from_rule(rule, chi)
        exact = np.array([eta_exact_bijective(spec, m, GOLDEN) for m in ms])
        prefix = pseudo_fixed_prefix(normalize_pseudo_fixed(rule), N + 33)
        emp = eta_empirical_many(prefix, chi, ms, GOLDEN, N=N)
        worst = max(worst, float(np.abs(exact - emp).max()))
        verdict = classify_bijective(rule, chi, GOLDEN)
        period = detect_period(prefix.window(-2000, 2000))
        pure_point += verdict.kind is Kind.PURE_POINT
        if (verdict.kind is Kind.PURE_POINT) != (period is not None):
            disagreements += 1
    res.details.update(max_err=worst, disagreements=disagreements, rules=count,
                       pure_point=pure_point)
    res.checks["exact vs empirical within 5e-3"] = worst <= 5e-3
    res.checks["verdicts agree with periodicity"] = disagreements == 0


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6,
            criterion_7, criterion_8]


def run_all(echo: Callable[[str], None] | None = print) -> list[CriterionResult]:
    out = []
    for crit in CRITERIA:
        r = crit()
        if echo:
            echo(r.line())
        out.append(r)
    return out
