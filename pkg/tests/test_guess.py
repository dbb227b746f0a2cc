#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
guess 测试：ansatz 网格、Hermite-Padé、单素数猜测与模块化重构
"""

from math import comb

import pytest

from sympy import primerange

from exactarith import PrimeField, ntt_prime_pool, parse_poly
from guess import (AnsatzGrid, GuessError, guess_algeq, guess_at_point, guess_diffeq, guess_over_rationals,
                   guess_point_over_rationals, hermite_pade, modular_guess_pipeline, precision_doubling)
from ore import OperatorError, apply_operator, p_curvature_zero, right_divide
from series import TruncSeries, poly_eval
from walks import SectionSpec
from walk_models import KrewerasModel


def catalan(N):
    return [comb(2 * n, n) // (n + 1) for n in range(N)]


def sqrt_series(N):
    """√(1 − 4t)"""
    return [1] + [-2 * c for c in catalan(N - 1)]


def test_grid_validation():
    with pytest.raises(GuessError):
        AnsatzGrid(kind='rational')
    with pytest.raises(GuessError):
        AnsatzGrid(margin_ratio=0.5)
    with pytest.raises(GuessError):
        AnsatzGrid(N=1)


def test_staircase_respects_margin():
    grid = AnsatzGrid(max_main_degree=6, N=80, margin_ratio=1.0)
    shapes = dict(grid.staircase())
    assert shapes[6] == 10
    for r, d in AnsatzGrid(N=100).staircase():
        assert 1.2 * (r + 1) * (d + 1) <= 100


def test_hermite_pade_finds_rational_relation(prime):
    F = PrimeField(prime)
    one = TruncSeries.constant(1, F, 10)
    geometric = TruncSeries.from_coefficients([1] * 10, F)
    rels = hermite_pade([one, geometric], [1, 1], 10)
    assert rels
    c_one, c_geo = rels[0]
    residual = TruncSeries.from_coefficients(c_one.coeffs.tolist() + [0] * 10, F).truncate(10) \
        + TruncSeries.from_coefficients(c_geo.coeffs.tolist() + [0] * 10, F).truncate(10) * geometric
    assert residual.is_zero()
    with pytest.raises(GuessError):
        hermite_pade([one], [1, 1], 10)


def test_guess_algeq_catalan_mod_p(prime):
    F = PrimeField(prime)
    f = TruncSeries.from_coefficients(catalan(30), F)
    report = guess_algeq(f, AnsatzGrid(max_main_degree=3, N=30))
    assert report.found
    assert report.degrees() == {'T': 2, 't': 1}
    assert report.summary() == 'degT=2 degt=1'
    assert poly_eval(report.candidate, f).is_zero()
    assert report.to_dict()['degrees'] == {'T': 2, 't': 1}


def test_guess_algeq_zero_series_is_degenerate(prime):
    F = PrimeField(prime)
    report = guess_algeq(TruncSeries.zero(F, 10), AnsatzGrid(N=10))
    assert report.degenerate


def test_guess_requires_prime_field():
    with pytest.raises(GuessError):
        guess_algeq(TruncSeries.from_coefficients(catalan(10)), AnsatzGrid(N=10))


def test_guess_diffeq_square_root(prime):
    F = PrimeField(prime)
    f = TruncSeries.from_coefficients(sqrt_series(30), F)
    report = guess_diffeq(f, AnsatzGrid(kind='differential', max_main_degree=3, N=30))
    assert report.found
    L = report.candidate
    assert L.order == 1
    assert L.degree() == 1
    assert apply_operator(L, f).is_zero()


def test_guess_diffeq_reduces_solution_basis(prime):
    # 阶 2 的 ansatz 里全是 (1−4t)·Dt + 2 的左倍式，取 GCRD 后回到 1 阶
    F = PrimeField(prime)
    f = TruncSeries.from_coefficients(sqrt_series(40), F)
    grid = AnsatzGrid(kind='differential', min_main_degree=2, max_main_degree=2, N=40)
    report = guess_diffeq(f, grid)
    assert report.ansatz[0] == 2
    assert len(report.relations) > 1
    L = report.candidate
    assert (L.order, L.degree()) == (1, 1)
    for rel in report.relations:
        assert right_divide(rel, L)[1].is_zero()
    assert report.to_dict()['relations'] == len(report.relations)


def test_guess_over_rationals_catalan(primes):
    f = TruncSeries.from_coefficients(catalan(30))
    report = guess_over_rationals(f, 'algebraic', AnsatzGrid(max_main_degree=3, N=30), primes)
    assert report.candidate.is_canonical_equal(parse_poly("t*T^2-T+1", ('T', 't')))
    assert set(report.primes) <= set(primes)


def test_precision_doubling_stabilizes(prime):
    F = PrimeField(prime)
    report = precision_doubling(lambda N: TruncSeries.from_coefficients(catalan(N), F),
                                AnsatzGrid(max_main_degree=3, N=8), 64)
    assert report.found
    assert report.stabilized_at is not None
    assert report.degrees() == {'T': 2, 't': 1}


def test_precision_doubling_gives_up():
    F = PrimeField(101)
    report = precision_doubling(TruncSeries.from_coefficients(list(range(1, 17)), F),
                                AnsatzGrid(kind='algebraic', max_main_degree=1, max_t_degree=0, N=8), 16)
    assert not report.found


def test_modular_pipeline_kreweras_excursions(kreweras, primes):
    grid = AnsatzGrid(max_main_degree=4, N=60)
    report = modular_guess_pipeline(kreweras, SectionSpec('00', 60), grid, primes)
    cubic = KrewerasModel().known_polynomials()['excursion']
    assert report.candidate.is_canonical_equal(cubic)


def test_guess_at_point_kreweras(kreweras, prime):
    grid = AnsatzGrid(max_main_degree=6, N=100)
    report = guess_at_point(kreweras, SectionSpec('x0', 100), grid, prime, x0=2)
    assert report is not None
    assert report.degrees() == {'T': 6, 't': 10}
    assert report.points == [2]


def test_modular_pipeline_kreweras_section(kreweras, primes):
    grid = AnsatzGrid(max_main_degree=6, N=100)
    report = modular_guess_pipeline(kreweras, SectionSpec('x0', 100), grid, primes, points=range(2, 22))
    P = KrewerasModel().known_polynomials()['U']
    assert report.candidate.is_canonical_equal(P)
    assert report.points == list(range(2, 22))


def test_pipeline_needs_points_for_x_sections(kreweras, primes):
    with pytest.raises(GuessError):
        modular_guess_pipeline(kreweras, SectionSpec('x0', 20), AnsatzGrid(N=20), primes)
    with pytest.raises(GuessError):
        modular_guess_pipeline(kreweras, SectionSpec('xy', 20), AnsatzGrid(N=20), primes)


GESSEL_POINT_GRID = dict(kind='differential', min_main_degree=14, max_main_degree=14, max_t_degree=43, N=1000)


@pytest.mark.slow
def test_gessel_point_operators_mod_p(gessel, prime):
    # G(t;1,0) 模 p：阶 14、次数 ≤ 43 的一族算子，GCRD 为阶 11、次数 ≤ 96
    grid = AnsatzGrid(**GESSEL_POINT_GRID)
    report = guess_at_point(gessel, SectionSpec('x0', 1000), grid, prime, x0=1)
    assert report is not None
    assert report.ansatz == (14, 43)
    assert len(report.relations) > 1
    assert all(op.order <= 14 and op.degree() <= 43 for op in report.relations)
    L = report.candidate
    assert L.order == 11
    assert L.degree() <= 96
    for rel in report.relations:
        assert right_divide(rel, L)[1].is_zero()


@pytest.mark.slow
def test_gessel_point_operator_has_zero_p_curvature(gessel):
    grid = AnsatzGrid(**GESSEL_POINT_GRID)
    report = guess_point_over_rationals(gessel, SectionSpec('x0', 1000), grid, ntt_prime_pool(size=40), x0=1)
    L = report.candidate
    assert L.order == 11
    checked = []
    for p in primerange(2, 30):
        try:
            zero = p_curvature_zero(L, p)
        except OperatorError:
            continue
        assert zero, p
        checked.append(p)
    assert len(checked) >= 5
