#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
ore 测试：算子乘法与除法、p-曲率、微分方程与递推的转换
"""

import numpy as np
import pytest

from exactarith import QQ, DensePoly, parse_poly
from ore import (OperatorError, OreOperator, PRecurrence, algeq_to_diffeq, apply_operator, diffeq_to_rec,
                 format_operator, gcrd, gcrd_many, global_nilpotency_check, p_curvature_matrix, p_curvature_zero,
                 parse_operator, power_remainder, power_remainder_binary, right_divide)
from series import TruncSeries

# √(1 − 4t) 的前几项
SQRT_SERIES = [1, -2, -2, -4, -10, -28, -84, -264]

t = DensePoly([0, 1], QQ, 't')
n = DensePoly([0, 1], QQ, 'n')


def test_commutation_rule():
    Dt = OreOperator.Dt()
    assert Dt * OreOperator([t]) == OreOperator([1, t])


def test_right_division():
    M = OreOperator([t, 1])           # Dt + t
    Q = OreOperator([-1, 1])          # Dt − 1
    quotient, remainder = right_divide(Q * M, M)
    assert quotient == Q
    assert remainder.is_zero()
    with pytest.raises(OperatorError):
        right_divide(M, OreOperator([]))


def _random_operator(rng, order, degree):
    coeffs = [DensePoly([int(c) for c in rng.integers(-3, 4, degree + 1)], QQ, 't') for _ in range(order + 1)]
    if coeffs[-1].is_zero():
        coeffs[-1] = DensePoly([1, 1], QQ, 't')
    return OreOperator(coeffs)


def test_right_division_random_pairs():
    rng = np.random.default_rng(5)
    for _ in range(100):
        A = _random_operator(rng, int(rng.integers(0, 4)), int(rng.integers(0, 3)))
        M = _random_operator(rng, int(rng.integers(1, 3)), int(rng.integers(0, 3)))
        Q, R = right_divide(A, M)
        assert R.is_zero() or R.order < M.order
        assert Q * M + R == A
        Q2, R2 = right_divide(Q * M, M)
        assert Q2 == Q and R2.is_zero()


def test_gcrd_recovers_common_right_factor():
    M = OreOperator([t, 1])
    L1 = OreOperator([-1, 1]) * M
    L2 = OreOperator([t * t, 1]) * M
    assert gcrd(L1, L2) == M.monic()


def test_parse_and_format_operator():
    L = parse_operator("(1-4*t)*Dt+2")
    assert L == OreOperator([2, DensePoly([1, -4], QQ, 't')])
    assert parse_operator(format_operator(L)).primitive() == L.primitive()
    with pytest.raises(OperatorError):
        parse_operator("Dt+y")


def test_apply_operator_annihilates_square_root():
    L = parse_operator("(1-4*t)*Dt+2")
    f = TruncSeries.from_coefficients(SQRT_SERIES)
    out = apply_operator(L, f)
    assert out.order == len(SQRT_SERIES) - 1
    assert out.is_zero()


@pytest.mark.parametrize('p', [3, 5, 7])
def test_p_curvature_of_algebraic_operator_vanishes(p):
    assert p_curvature_zero(parse_operator("(1-4*t)*Dt+2"), p)


@pytest.mark.parametrize('p', [3, 5, 7])
def test_p_curvature_of_exponential_is_nonzero(p):
    assert not p_curvature_zero(parse_operator("Dt-1"), p)


def test_p_curvature_matrix_and_nilpotency():
    zero = p_curvature_matrix(parse_operator("(1-4*t)*Dt+2"), 5)
    assert all(entry.is_zero() for row in zero for entry in row)
    unit = p_curvature_matrix(parse_operator("Dt-1"), 5)
    assert len(unit) == 1 and not unit[0][0].is_zero()
    assert global_nilpotency_check(parse_operator("(1-4*t)*Dt+2"), 5)
    assert not global_nilpotency_check(parse_operator("Dt-1"), 5)


def test_power_remainder():
    # Dt^n − 1 = (Dt^(n−1) + … + 1)(Dt − 1)
    R = power_remainder(parse_operator("Dt-1"), 4)
    assert R.order == 0
    assert R == OreOperator([1])
    M = OreOperator([t, 1])
    assert power_remainder(M, 1) == OreOperator([-t])


POWERING_OPERATORS = [
    "(1-4*t)*Dt+2",
    "Dt-1",
    "t*Dt^2+Dt-t",
    "4*t*(1-t)*Dt^2+4*(1-2*t)*Dt-1",
    "(1-t)*Dt^3+t*Dt-2",
]


@pytest.mark.parametrize('text', POWERING_OPERATORS)
def test_binary_powering_matches_iterated(text):
    L = parse_operator(text)
    for k in range(0, 13):
        assert power_remainder_binary(L, k) == power_remainder(L, k)
    for p in (3, 5, 7, 11):
        Lp = L.reduce_mod(p)
        direct = power_remainder(Lp, p).is_zero()
        assert power_remainder_binary(Lp, p).is_zero() == direct
        assert p_curvature_zero(L, p) == direct
        assert p_curvature_zero(L, p, method='iterated') == direct


def test_binary_powering_guards():
    with pytest.raises(OperatorError):
        power_remainder_binary(parse_operator("Dt-1"), -1)
    with pytest.raises(OperatorError):
        p_curvature_zero(parse_operator("Dt-1"), 5, method='fast')


def test_gcrd_many():
    M = OreOperator([t, 1])
    ops = [OreOperator([-1, 1]) * M, OreOperator([t * t, 1]) * M, OreOperator([1, 0, 1]) * M]
    assert gcrd_many(ops) == M.monic()
    with pytest.raises(OperatorError):
        gcrd_many([])


def test_diffeq_to_rec():
    rec = diffeq_to_rec(parse_operator("(1-4*t)*Dt+2"))
    expected = PRecurrence([DensePoly([2, -4], QQ, 'n'), n + 1])
    assert rec.equivalent(expected)
    assert rec.check(SQRT_SERIES)
    assert not rec.check([1, 1, 1, 1])


def test_recurrence_equivalence_under_shift():
    rec = PRecurrence([(n + 1) * (-2), n + 2])
    shifted = rec.shift(3)
    assert rec.equivalent(shifted)
    assert not rec.equivalent(PRecurrence([n * (-2), n + 2]))


def test_recurrence_format():
    rec = PRecurrence([n * 0 - 1, n * 0 + 1])
    assert rec.format() == "u_{n + 1} - u_n = 0"


def test_algeq_to_diffeq():
    P = parse_poly("T^2-1+4*t", ('T', 't'))
    L = algeq_to_diffeq(P)
    assert L.order == 1
    assert apply_operator(L, TruncSeries.from_coefficients(SQRT_SERIES)).is_zero()


def test_algeq_to_diffeq_rejects_extra_variables():
    with pytest.raises(OperatorError):
        algeq_to_diffeq(parse_poly("T^2-x*t", ('T', 't', 'x')))
