from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from compactsub import builtins
from compactsub.alphabet import (
    Angle, AlphabetMismatch, Circle, Cyclic, ExtNat, INF, Product, compose,
)
from compactsub.substitution import (
    Constant, ConstantLengthGroup, NoInternalColumn, NonConstantTable, Translation, TwoSidedWord,
    apply, detect_period, legal_window, normalize_pseudo_fixed, primitivity_probe,
    pseudo_fixed_prefix, shift,
)

ZERO = Angle()
ALPHA = Angle(0, 1)


def circ(q=0, k=0):
    return Circle(Angle(Fraction(q), k))


def recursion_window(setup, radius):
    """Oracle: w_{Lm+k-s} = column_k(w_m), w_0 = seed, evaluated letter by letter."""
    L, s = setup.base.length, setup.s
    memo = {0: setup.seed}

    def w(c):
        if c not in memo:
            m, k = divmod(c + s, L)
            col = setup.base.columns[k]
            memo[c] = col.letter if isinstance(col, Constant) else compose(w(m), col.letter)
        return memo[c]

    return [w(c) for c in range(-radius, radius + 1)]


def test_apply_examples():
    w = TwoSidedWord.from_letters([circ()])
    assert apply(builtins.rho1(), w).letters() == [circ(), circ(), circ(0, 1), circ()]
    spin = apply(builtins.spin(), TwoSidedWord.from_letters([Product((circ(), Cyclic(2, 0)))]))
    assert spin.letters() == [Product((circ(), Cyclic(2, 0))),
                              Product((circ(Fraction(1, 2)), Cyclic(2, 1)))]
    ext = apply(NonConstantTable(), TwoSidedWord.from_letters([ExtNat(1)]))
    assert ext.letters() == [ExtNat(0), ExtNat(2), ExtNat(0)]


def test_apply_origin_moves_by_left_image_lengths():
    w = TwoSidedWord.from_letters([ExtNat(0), INF, ExtNat(2)], origin=2)
    out = apply(NonConstantTable(), w)
    assert out.origin == 2 + 3
    assert out.letter_at(0) == ExtNat(0)


def test_apply_mismatch():
    w = TwoSidedWord.from_letters([Cyclic(3, 1)])
    with pytest.raises(AlphabetMismatch):
        apply(builtins.rho1(), w)


def test_nonconstant_cap():
    assert NonConstantTable(cap=3).image(ExtNat(3)) == [ExtNat(0), INF, ExtNat(2)]
    assert NonConstantTable().image(INF) == [ExtNat(0), INF, INF]


def test_normalize_three_column_example():
    a, b, g = circ(0, 1), circ(Fraction(1, 3)), circ(Fraction(1, 5), 2)
    rule = ConstantLengthGroup((Translation(a), Translation(b), Translation(g)))
    setup = normalize_pseudo_fixed(rule)
    binv = circ(Fraction(-1, 3))
    assert setup.s == 1 and setup.power == 1
    assert setup.base.letters() == [compose(a, binv), circ(), compose(g, binv)]


def test_normalize_builtins():
    s1 = normalize_pseudo_fixed(builtins.rho1())
    assert s1.base == builtins.rho1() and s1.s == 1
    s2 = normalize_pseudo_fixed(builtins.rho2())
    assert s2.s == 1 and s2.seed == circ()
    # length two needs the square to get an internal column
    two = ConstantLengthGroup((Translation(circ()), Translation(circ(0, 2))))
    assert normalize_pseudo_fixed(two).power == 2


def test_normalize_rejects_short_rules():
    with pytest.raises(NoInternalColumn):
        normalize_pseudo_fixed(ConstantLengthGroup((Translation(circ()),)))


def test_rho1_window_matches_recursion():
    setup = normalize_pseudo_fixed(builtins.rho1())
    w = pseudo_fixed_prefix(setup, 2)
    assert w.letters() == [circ(), circ(), circ(), circ(0, 1), circ()]
    assert w.letters() == recursion_window(setup, 2)


def test_rho2_window_is_anchored_by_coincidence():
    setup = normalize_pseudo_fixed(builtins.rho2())
    w = pseudo_fixed_prefix(setup, 40)
    assert w.letter_at(0) == circ()
    assert w.letters() == recursion_window(setup, 40)
    # every position hit by the constant column carries 1
    for m in range(-10, 10):
        assert w.letter_at(4 * m + 1 - setup.s) == circ()


def test_radius_zero_is_seed():
    setup = normalize_pseudo_fixed(builtins.rho1(), seed=circ(Fraction(1, 7)))
    assert pseudo_fixed_prefix(setup, 0).letters() == [circ(Fraction(1, 7))]


@st.composite
def cyclic_rules(draw):
    k = draw(st.integers(2, 6))
    L = draw(st.integers(2, 5))
    cols = [Translation(Cyclic(k, draw(st.integers(0, k - 1)))) for _ in range(L)]
    if draw(st.booleans()):
        j = draw(st.integers(0, L - 1))
        cols[j] = Constant(Cyclic(k, draw(st.integers(0, k - 1))))
    return ConstantLengthGroup(tuple(cols))


@settings(max_examples=40, deadline=None)
@given(cyclic_rules(), st.integers(1, 60))
def test_supertile_relation_and_nesting(rule, radius):
    setup = normalize_pseudo_fixed(rule)
    big = pseudo_fixed_prefix(setup, radius + 1)
    small = pseudo_fixed_prefix(setup, radius)
    assert small.letters() == big.letters()[1:-1]
    assert big.letters() == recursion_window(setup, radius + 1)
    L, s = setup.base.length, setup.s
    for m in range(-radius, radius + 1):
        for k, col in enumerate(setup.base.columns):
            c = L * m + k - s
            if -radius - 1 <= c <= radius + 1:
                want = col.letter if isinstance(col, Constant) else compose(big.letter_at(m), col.letter)
                assert big.letter_at(c) == want


def test_spin_digits_independent_of_matrix():
    w1 = legal_window(builtins.spin(), 200)
    other = builtins.Spin(((Angle(Fraction(1, 3)), ALPHA), (ZERO, Angle(0, 2))))
    w2 = legal_window(other, 200)
    assert np.array_equal(w1.data[:, 2], w2.data[:, 2])
    assert np.array_equal(w1.data[:, 2], np.arange(401) % 2)


def test_primitivity_probe_examples():
    assert primitivity_probe(builtins.rho1(), 0.1, 8)
    stuck = ConstantLengthGroup((Translation(circ()), Translation(circ())))
    res = primitivity_probe(stuck, 0.1, 8)
    assert not res and res.witness is not None
    assert primitivity_probe(NonConstantTable(), 0.1, 12)


def test_detect_period_examples():
    w = pseudo_fixed_prefix(normalize_pseudo_fixed(builtins.cyclic(2)), 3 ** 6)
    assert detect_period(w) is not None
    rho1 = pseudo_fixed_prefix(normalize_pseudo_fixed(builtins.rho1()), 4 ** 6)
    assert detect_period(rho1) is None
    const = TwoSidedWord.from_letters([Cyclic(3, 2)] * 40)
    assert detect_period(const) == 1


def test_shift_moves_coordinates():
    w = TwoSidedWord.from_letters([Cyclic(5, i) for i in range(5)], origin=2)
    assert shift(w, 1).letter_at(0) == w.letter_at(1)


def test_window_and_bounds():
    w = TwoSidedWord.from_letters([Cyclic(5, i) for i in range(5)], origin=2)
    assert w.window(-1, 1).letters() == [Cyclic(5, 1), Cyclic(5, 2), Cyclic(5, 3)]
    with pytest.raises(IndexError):
        w.letter_at(3)
