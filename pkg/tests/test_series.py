#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
series 测试：截断级数算术、Newton 提升、核根、代换与参数化
"""

from fractions import Fraction

import pytest

from exactarith import QQ, PrimeField, parse_poly
from series import (AlgebraicSeriesSpec, SeriesError, TruncSeries, compose, fixed_point_solve,
                    fixed_point_solve_pair, kernel_root_X, kernel_root_Y, newton_lift, parameter_series,
                    poly_eval, series_from_parameterization, verify_parameterization)
from walk_models import get_model
from walks import SectionSpec, section_series

CATALAN = [1, 1, 2, 5, 14, 42, 132, 429]

_TEXTS = get_model('kreweras').known_texts()
_R1, _R2, _H = _TEXTS['R1'], _TEXTS['R2'], _TEXTS['h']


def test_inverse_of_geometric_series():
    s = TruncSeries.from_coefficients([1, -1, 0, 0, 0, 0])
    assert s.inverse().coefficient_list() == [1] * 6
    F = PrimeField(101)
    sp = TruncSeries.from_coefficients([1, -1, 0, 0], F)
    assert sp.inverse().coefficient_list() == [1, 1, 1, 1]


def test_bivariate_product_and_shifts():
    a = TruncSeries.from_rows([{0: 1}, {1: 1}, {}, {}])          # 1 + t·x
    b = TruncSeries.from_rows([{0: 1}, {-1: 1}, {}, {}])         # 1 + t/x
    prod = a * b
    assert prod.coeff(1) == {1: 1, -1: 1}
    assert prod.coeff(2) == {0: 1}
    assert prod.project_nonnegative().coeff(1) == {1: 1}
    assert a.mul_t(2).div_t(2).coeff(1) == {1: 1}
    with pytest.raises(SeriesError):
        a.div_t(1)
    assert a.evaluate_x(3).coefficient_list() == [1, 3, 0, 0]


def test_newton_lift_catalan():
    P = parse_poly("t*T^2-T+1", ('T', 't'))
    f = newton_lift(AlgebraicSeriesSpec(P, 1), len(CATALAN))
    assert f.coefficient_list() == CATALAN


def test_newton_lift_mod_p():
    F = PrimeField(1000003)
    P = parse_poly("t*T^2-T+1", ('T', 't'))
    f = newton_lift(AlgebraicSeriesSpec(P, 1, ring=F), len(CATALAN))
    assert f.coefficient_list() == CATALAN


def test_newton_lift_rejects_singular_seed():
    P = parse_poly("T^2-t", ('T', 't'))
    with pytest.raises(SeriesError):
        newton_lift(AlgebraicSeriesSpec(P, 0), 5)


def test_poly_eval():
    P = parse_poly("T^2-t", ('T', 't'))
    f = TruncSeries.from_coefficients([1, 1, 0, 0])
    assert poly_eval(P, f).coefficient_list() == [1, 1, 1, 0]


def test_kreweras_kernel_root(kreweras):
    Y = kernel_root_Y(kreweras, 5)
    assert Y.coeff(0) == {}
    assert Y.coeff(1) == {0: 1}
    assert Y.coeff(2) == {-1: 1}
    assert Y.coeff(3) == {-2: 1, 1: 1}


def test_gessel_kernel_roots(gessel):
    Y = kernel_root_Y(gessel, 4)
    assert Y.coeff(1) == {-1: 1}
    assert Y.coeff(2) == {-2: 1, 0: 1}
    X = kernel_root_X(gessel, 4)
    assert X.var == 'y'
    assert X.coeff(1) == {0: 1, -1: 1}
    assert X.coeff(2) == {}
    assert X.coeff(3) == {1: 1, 0: 3, -1: 3, -2: 1}


def test_compose_substitutes_inner_series():
    outer = TruncSeries.from_rows([{0: 1}, {1: 1}, {2: 1}, {}, {}])   # 1 + t·x + t²·x²
    inner = TruncSeries.monomial(QQ, 5, 1, 0)                          # t
    assert compose(outer, inner).coefficient_list() == [1, 0, 1, 0, 1]


def test_compose_reports_needed_precision():
    outer = TruncSeries.monomial(QQ, 3, 0, -1)
    inner = TruncSeries.monomial(QQ, 3, 1, 0)
    with pytest.raises(SeriesError, match="N=5"):
        compose(outer, inner)


def test_fixed_point_reproduces_counts(kreweras):
    N = 12
    model = get_model('kreweras')
    eq, = model.reduced_system(N)
    U = fixed_point_solve(eq.A, eq.B, eq.Y, N)
    counted = section_series(kreweras, SectionSpec('x0', N))
    assert U.first_difference(counted) is None


def test_fixed_point_pair_reproduces_gessel_unknowns():
    N = 10
    model = get_model('gessel')
    first, second = model.reduced_system(N)
    U, V = fixed_point_solve_pair(first.A, first.B, first.Y, second.A, second.B, second.Y, N)
    expected = model.unknown_series(N)
    assert U.first_difference(expected['U']) is None
    assert V.first_difference(expected['V']) is None
    with pytest.raises(SeriesError):
        fixed_point_solve(first.A, TruncSeries.constant(1, QQ, N), first.Y, N)


def test_kreweras_parameter_series():
    U0 = parameter_series(_R1, 5, _H)
    assert U0.coeff(1) == {0: 1}
    assert U0.coeff(2) == {0: 1}
    assert U0.coeff(3) == {0: 1, 1: 1}
    assert U0.coeff(4) == {0: 5, 1: 2}


def test_parameterization_matches_counts(kreweras):
    N = 10
    F = series_from_parameterization(_R1, _R2, N, _H)
    counted = section_series(kreweras, SectionSpec('x0', N))
    assert F.first_difference(counted) is None


def test_verify_parameterization_exact():
    P = get_model('kreweras').known_polynomials()['U']
    assert verify_parameterization(_R1, _R2, _H, P)
    wrong = P + parse_poly("t^11", ('T', 't', 'x'))
    assert not verify_parameterization(_R1, _R2, _H, wrong)


def test_fractions_survive_arithmetic():
    s = TruncSeries.from_coefficients([Fraction(1, 2), 0, 0])
    assert (s * s).coefficient_list() == [Fraction(1, 4), 0, 0]
