from fractions import Fraction

import pytest

from compactsub.alphabet import ExtNat, INF
from compactsub.geometry import (
    LAMBDA, NoConvergence, TruncatedFunction, audit_delone, delone_build, frequency_estimate,
    m_apply, natural_length, power_iteration, render_dyadic, tile_length,
)


def test_natural_length_values():
    ell = natural_length(5)
    assert ell.values[:3] == [1, Fraction(3, 2), Fraction(7, 4)]
    assert ell(INF) == 2 and ell(ExtNat(2)) == Fraction(7, 4)
    assert tile_length(INF) == 2 and tile_length(ExtNat(0)) == 1


def test_m_apply_small():
    f = TruncatedFunction([1, 10, 100, 1000], 5)
    g = m_apply(f)
    assert g.values == [11, 1 + 100 + 1, 1 + 1000 + 10, 1 + 5 + 100]
    assert g.at_inf == 11
    with pytest.raises(ValueError):
        m_apply(TruncatedFunction([1, 2], 3))


@pytest.mark.parametrize("N", [10, 25, 40])
def test_eigen_identity_is_exact_below_cap(N):
    ell = natural_length(N)
    Ml = m_apply(ell)
    for n in range(N):
        assert Ml.values[n] == LAMBDA * ell.values[n]
    assert Ml.at_inf == LAMBDA * ell.at_inf
    # the capped entry reads inf in place of N+1
    assert Ml.values[N] - LAMBDA * ell.values[N] == Fraction(1, 2 ** (N + 1))


def test_power_iteration_converges():
    r = power_iteration(40, 1e-12, 10_000)
    assert r.eigenvalue == pytest.approx(2.5, abs=1e-9)
    for n in range(21):
        assert float(r.ell.values[n]) == pytest.approx(2 - 2.0 ** -n, abs=1e-8)
    lo, hi = r.bracket
    assert lo <= 2.5 + 1e-9 and hi >= 2.5 - 1e-9


def test_bracket_monotone():
    h = power_iteration(30, 1e-10, 10_000).history
    for (a0, b0), (a1, b1) in zip(h, h[1:]):
        assert a1 >= a0 - 1e-12 and b1 <= b0 + 1e-12


def test_cap_independence():
    small = power_iteration(10, 1e-12).ell
    big = power_iteration(40, 1e-12).ell
    for n in range(6):
        assert float(small.values[n]) == pytest.approx(float(big.values[n]), abs=1e-3)


def test_power_iteration_errors():
    with pytest.raises(ValueError):
        power_iteration(9)
    with pytest.raises(NoConvergence):
        power_iteration(40, 1e-15, 3)


def test_frequencies_exact_sum():
    for depth in (8, 10, 12):
        f = frequency_estimate(depth)
        assert sum(f.values) + f.at_inf == 1
        assert f.at_inf <= Fraction(1, 1000)
        assert all(a >= b for a, b in zip(f.values, f.values[1:]))


def test_frequency_error_shrinks_with_depth():
    def err(d):
        f = frequency_estimate(d)
        return max(abs(float(f.values[n]) - 2.0 ** -(n + 1)) for n in range(7))
    errs = [err(d) for d in (8, 10, 12, 14)]
    assert all(b < a for a, b in zip(errs, errs[1:]))


def test_frequency_report_cap_lumps():
    f = frequency_estimate(10, report_cap=3)
    assert f.cap == 3 and sum(f.values) + f.at_inf == 1
    with pytest.raises(ValueError):
        frequency_estimate(7)


def test_delone_zero_and_one_iteration():
    d0 = delone_build(0)
    assert d0.points == [-2, 0] and d0.labels == [INF, ExtNat(0)]
    d1 = delone_build(1)
    assert d1.labels == [ExtNat(0), INF, INF, ExtNat(0), ExtNat(1)]
    assert d1.points == [-5, -4, -2, 0, 1]
    assert d1.window == (-5, Fraction(5, 2))


def test_delone_tiles_exact_count():
    d = delone_build(0, tiles=101)
    assert len(d) == 101
    assert sum(1 for x in d.points if x < 0) == 50


def test_audit_small():
    a = audit_delone(delone_build(6))
    assert a.min_gap == 1 and a.max_gap == 2
    assert a.gap_two_only_at_inf and a.gaps_in_length_set
    assert a.inflation_ok and a.inflation_checked > 0
    assert a.max_finite_gap < 2


def test_audit_detects_broken_inflation():
    d = delone_build(4)
    d.points[len(d.points) // 2 + 3] += Fraction(1, 1024)
    assert not audit_delone(d).inflation_ok


def test_render_dyadic():
    assert render_dyadic(Fraction(-5, 4)) == {"num": -5, "exp": 2, "decimal": -1.25}
    with pytest.raises(ValueError):
        render_dyadic(Fraction(1, 3))
