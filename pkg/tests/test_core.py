import math

import mpmath
import pytest
from hypothesis import assume, given, settings, strategies as st

from specgrad import (DegenerateSum, DerivativeMode, OneSidedPair, OutOfDomain, Side,
                      a_formula, absolute_value, builtin_huber, builtin_kink_counterexample,
                      one_sided_fd, pair_at, specular_from_pair, specular_sign,
                      symmetric_derivative, symmetric_from_pair)
from specgrad.objectives import Objective, builtin_power_p

mpmath.mp.dps = 60


def a_highprec(alpha, beta):
    """Oracle: textbook closed form evaluated at 60 digits."""
    a, b = mpmath.mpf(alpha), mpmath.mpf(beta)
    return (a * b - 1 + mpmath.sqrt((a * a + 1) * (b * b + 1))) / (a + b)


def a_bisector(alpha, beta):
    """Second oracle: slope of the bisector of the two one-sided tangents."""
    return mpmath.tan((mpmath.atan(alpha) + mpmath.atan(beta)) / 2)


reals = st.floats(min_value=-1e6, max_value=1e6, allow_nan=False, allow_infinity=False)


@pytest.mark.parametrize("alpha, beta, expected", [
    (1.0, 0.0, math.sqrt(2) - 1),
    (2.0, 2.0, 2.0),
    (2.0, 1.0, (1 + math.sqrt(10)) / 3),
    (-1.0, -3.0, float(a_highprec(-1, -3))),
])
def test_a_formula_examples(alpha, beta, expected):
    assert a_formula(alpha, beta) == pytest.approx(expected, rel=1e-15, abs=1e-16)


def test_a_formula_matches_both_oracles():
    assert float(a_highprec(2, 1)) == pytest.approx(1.3874258867227931, rel=1e-15)
    assert float(a_bisector(2, 1)) == pytest.approx(1.3874258867227931, rel=1e-15)


def test_a_formula_degenerate():
    with pytest.raises(DegenerateSum):
        a_formula(1.5, -1.5)
    with pytest.raises(DegenerateSum):
        a_formula(0.0, 0.0)


@given(reals, reals)
@settings(max_examples=500)
def test_a_formula_agrees_with_high_precision(alpha, beta):
    assume(abs(alpha + beta) >= 1e-9)
    exact = a_highprec(alpha, beta)
    assert abs(a_formula(alpha, beta) - float(exact)) <= 1e-13 * max(1.0, abs(float(exact)))


@given(reals, reals)
@settings(max_examples=500)
def test_bounds(alpha, beta):
    alpha, beta = max(alpha, beta), min(alpha, beta)
    assume(abs(alpha + beta) >= 1e-9)
    a = a_formula(alpha, beta)
    scale = max(abs(alpha), abs(beta))
    assert beta - 1e-12 * scale <= a <= alpha + 1e-12 * scale


@given(reals, reals)
def test_symmetric_and_odd(alpha, beta):
    assume(alpha + beta != 0)
    assert a_formula(alpha, beta) == a_formula(beta, alpha)
    assert a_formula(-beta, -alpha) == pytest.approx(-a_formula(alpha, beta), rel=1e-12, abs=0)


@given(reals)
def test_differentiable_collapse(alpha):
    pair = OneSidedPair(alpha, alpha)
    assert abs(specular_from_pair(pair) - alpha) <= 1e-12
    assert abs(symmetric_from_pair(pair) - specular_from_pair(pair)) <= 1e-12


@given(reals, reals)
@settings(max_examples=1000)
def test_sign_and_magnitude(alpha, beta):
    pair = OneSidedPair(alpha, beta)
    spd = specular_from_pair(pair)
    assert specular_sign(pair) == (spd > 0) - (spd < 0)
    assert 2 * abs(spd) <= abs(alpha + beta) + 1e-12


@pytest.mark.parametrize("pair, expected", [
    (OneSidedPair(1.0, -1.0), 0.0),
    (OneSidedPair(0.0, 0.0), 0.0),
    (OneSidedPair(1.0, 0.0), math.sqrt(2) - 1),
])
def test_specular_from_pair_examples(pair, expected):
    assert specular_from_pair(pair) == pytest.approx(expected, abs=1e-15)


def test_zero_branch_is_tolerant():
    # sum below 1e-12 relative is treated as exactly cancelling
    assert specular_from_pair(OneSidedPair(1.0, -1.0 + 1e-13)) == 0.0
    assert specular_sign(OneSidedPair(1.0, -1.0 + 1e-13)) == 0
    assert specular_from_pair(OneSidedPair(1.0, -1.0 + 1e-9)) > 0


@pytest.mark.parametrize("pair, expected", [
    (OneSidedPair(1.0, -1.0), 0.0),
    (OneSidedPair(1.0, 0.0), 0.5),
    (OneSidedPair(3.0, 3.0), 3.0),
])
def test_symmetric_from_pair(pair, expected):
    assert symmetric_from_pair(pair) == expected


@pytest.mark.parametrize("pair, expected", [
    (OneSidedPair(1.0, 0.0), 1),
    (OneSidedPair(1.0, -1.0), 0),
    (OneSidedPair(-1.0, -3.0), -1),
])
def test_specular_sign_examples(pair, expected):
    assert specular_sign(pair) == expected


def test_pair_rejects_nonfinite():
    with pytest.raises(ValueError):
        OneSidedPair(math.nan, 0.0)
    with pytest.raises(ValueError):
        OneSidedPair(0.0, math.inf)


def test_one_sided_fd_examples():
    f = absolute_value(-2, 2)
    assert one_sided_fd(f, 1.0, 1e-6, Side.RIGHT).value == 1.0
    assert one_sided_fd(f, 0.0, 1e-6, Side.LEFT).value == -1.0
    sq = Objective("sq", -2, 2, lambda x: x * x)
    est = one_sided_fd(sq, 1.0, 1e-6, Side.RIGHT)
    assert est.method is DerivativeMode.FD and est.mesh == pytest.approx(1e-6, rel=1e-9)
    assert abs(est.value - 2.0) <= 2e-6


def test_one_sided_fd_shrinks_near_boundary():
    f = absolute_value(-1, 1)
    est = one_sided_fd(f, 1 - 1e-7, 1e-6, Side.RIGHT)
    assert est.mesh < 1e-7
    assert est.value == pytest.approx(1.0, abs=1e-6)


def test_one_sided_fd_out_of_domain():
    f = absolute_value(-1, 1)
    with pytest.raises(OutOfDomain):
        one_sided_fd(f, 1.5, 1e-6, Side.RIGHT)
    # no representable probe fits between x and the boundary
    with pytest.raises(OutOfDomain):
        one_sided_fd(f, math.nextafter(1.0, 0.0), 1e-6, Side.RIGHT)


def test_nonfinite_values_are_out_of_domain():
    f = Objective("blowup", -1, 1, lambda x: math.inf if x > 0.5 else x)
    with pytest.raises(OutOfDomain):
        one_sided_fd(f, 0.5, 1e-3, Side.RIGHT)


def test_pair_at_examples():
    assert pair_at(absolute_value(), 0.0) == OneSidedPair(1.0, -1.0)
    assert pair_at(builtin_kink_counterexample(), 0.0) == OneSidedPair(1.0, 0.0)
    assert pair_at(builtin_huber(0.5), 2 - 1e-9) == OneSidedPair(0.5, 0.5)


def test_pair_at_fd_mode():
    p = pair_at(absolute_value(), 0.0, 1e-6, DerivativeMode.FD)
    assert p == OneSidedPair(1.0, -1.0)


def test_pair_at_falls_back_to_fd():
    f = Objective("abs_no_pair", -1, 1, abs)
    assert pair_at(f, 0.0) == OneSidedPair(1.0, -1.0)


def test_symmetric_derivative_central_difference():
    f = builtin_power_p(2.0)
    assert symmetric_derivative(f, 1.0, 1e-6, DerivativeMode.FD) == pytest.approx(1.0, abs=1e-9)
    assert symmetric_derivative(f, 1.0) == 1.0
