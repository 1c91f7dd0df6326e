import json
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from compactsub import builtins
from compactsub.alphabet import Angle, Circle, CircleChar, Cyclic, CyclicChar, PhiContext
from compactsub.autocorrelation import BijectiveRecurrenceSpec, eta_exact_bijective
from compactsub.classifier import (
    HypothesisViolation, Kind, classify, classify_bijective, classify_coincidence, classify_spin,
)
from compactsub.substitution import (
    ConstantLengthGroup, NonConstantTable, Translation, detect_period, normalize_pseudo_fixed,
    pseudo_fixed_prefix,
)

PHI = PhiContext.irrational(0.618033988749895)


def test_rho1_is_singular_continuous():
    v = classify(builtins.rho1(), CircleChar(1), PHI)
    assert v.kind is Kind.SINGULAR_CONTINUOUS and v.ac_absent
    assert abs(v.evidence["eta1"]["abs"]) < 1


def test_rho1_rational_phi_factor():
    v = classify_bijective(builtins.rho1(), CircleChar(3), PhiContext.rational(Fraction(1, 3)))
    assert v.kind is Kind.PURE_POINT
    word = pseudo_fixed_prefix(normalize_pseudo_fixed(v.factor_rule), 500)
    assert detect_period(word) is not None


@pytest.mark.parametrize("n", [2, 3, 5])
def test_cyclic_builtin_is_pure_point(n):
    v = classify(builtins.cyclic(n), CyclicChar(n, 1), PHI)
    assert v.kind is Kind.PURE_POINT
    assert v.factor.n == n
    assert v.evidence["eta1"]["abs"] == pytest.approx(1)


def test_rho2_coincidence():
    v = classify(builtins.rho2(), CircleChar(1), PHI)
    assert v.kind is Kind.PURE_POINT
    assert v.evidence["p"] == 1 and v.evidence["contraction"] == 0.75


def test_coincidence_needs_constant_column():
    with pytest.raises(HypothesisViolation) as e:
        classify_coincidence(builtins.rho1(), CircleChar(1))
    assert "constant column" in e.value.detail


def test_extnat_rejected():
    with pytest.raises(HypothesisViolation):
        classify(NonConstantTable(), None, PHI)


def test_identity_rule_is_pure_point():
    rule = ConstantLengthGroup((Translation(Circle(Angle())),) * 3)
    v = classify_bijective(rule, CircleChar(1), PHI)
    assert v.kind is Kind.PURE_POINT and v.factor.n == 1


@st.composite
def cyclic_rules(draw):
    k = draw(st.integers(2, 6))
    L = draw(st.integers(2, 5))
    return k, ConstantLengthGroup(tuple(Translation(Cyclic(k, draw(st.integers(0, k - 1))))
                                        for _ in range(L)))


@settings(max_examples=40, deadline=None)
@given(cyclic_rules())
def test_bijective_never_lebesgue(kr):
    k, rule = kr
    v = classify_bijective(rule, CyclicChar(k, 1), PHI)
    assert v.kind is not Kind.LEBESGUE and v.ac_absent
    if v.kind is Kind.PURE_POINT:
        spec = BijectiveRecurrenceSpec.from_rule(rule, CyclicChar(k, 1))
        assert abs(eta_exact_bijective(spec, 1, PHI)) == pytest.approx(1)


@pytest.mark.parametrize("n", range(0, 9))
def test_spin_parity(n):
    kind = classify_spin(builtins.spin(), n, PHI).kind
    want = Kind.PURE_POINT if n == 0 else Kind.LEBESGUE if n % 2 else Kind.SINGULAR_CONTINUOUS
    assert kind is want


def test_spin_fourier_matrix_is_lebesgue():
    third = Fraction(1, 3)
    W = [[Angle(), Angle(), Angle()],
         [Angle(), Angle(third), Angle(2 * third)],
         [Angle(), Angle(2 * third), Angle(third)]]
    v = classify_spin(W, 1, PHI)
    assert v.kind is Kind.LEBESGUE and v.evidence["multiplicity"] == 3


def test_spin_generic_is_unknown():
    W = [[Angle(), Angle(Fraction(1, 3)), Angle(0, 1)],
         [Angle(), Angle(), Angle()],
         [Angle(Fraction(1, 2)), Angle(), Angle(Fraction(1, 5))]]
    v = classify_spin(W, 1, PHI)
    assert v.kind is Kind.UNKNOWN and v.evidence["rank1"] is False


def test_spin_bad_shape():
    with pytest.raises(ValueError):
        classify_spin([[Angle(), Angle()]], 1, PHI)


def test_record_json():
    rec = json.loads(classify(builtins.rho1(), CircleChar(1), PHI).to_json())
    assert {"character", "kind", "ac_absent", "evidence"} <= set(rec)
    assert rec["kind"] == Kind.SINGULAR_CONTINUOUS.value
    assert "eta1" in rec["evidence"] and "factor" in rec["evidence"]


def test_eta1_evidence_matches_numeric():
    v = classify(builtins.rho1(), CircleChar(2), PHI)
    spec = BijectiveRecurrenceSpec.from_rule(builtins.rho1(), CircleChar(2))
    z = eta_exact_bijective(spec, 1, PHI)
    assert np.isclose(v.evidence["eta1"]["re"], z.real)
    assert np.isclose(v.evidence["eta1"]["im"], z.imag)
