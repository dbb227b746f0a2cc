#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
walk_models 测试：已登记模型的闭式、递推与已知多项式和计数一致
"""

import pytest

from exactarith import QQ
from series import poly_eval
from walks import SectionSpec, StepSet, build_walk_table, complete_series, section_series, unroll_sequence
from walk_models import DiagonalModel, GesselModel, KrewerasModel, get_model, model_for_steps

GESSEL_EXCURSIONS = [1, 0, 2, 0, 11, 0, 85, 0, 782, 0, 8004, 0, 88044, 0, 1020162]


def test_lookup_by_name_and_steps(simple_walk):
    assert isinstance(get_model('K'), KrewerasModel)
    assert isinstance(get_model('gessel'), GesselModel)
    assert isinstance(get_model('ne'), DiagonalModel)
    with pytest.raises(KeyError):
        get_model('bogus')
    assert isinstance(model_for_steps(StepSet.parse('SW,NE,W,E')), GesselModel)
    assert model_for_steps(simple_walk) is None


@pytest.mark.parametrize('name', ['kreweras', 'gessel', 'diagonal'])
def test_closed_form_matches_counts(name):
    model = get_model(name)
    N = 31
    table = build_walk_table(model.steps, N)
    assert [model.excursion_closed_form(n) for n in range(N)] == [int(v) for v in table.excursions]


@pytest.mark.parametrize('name', ['kreweras', 'gessel'])
def test_recurrence_reproduces_excursions(name):
    model = get_model(name)
    rec, initial, stride = model.excursion_recurrence()
    values = unroll_sequence(rec, initial, 12)
    assert values == [model.excursion_closed_form(stride * m) for m in range(12)]


def test_gessel_first_excursions():
    model = GesselModel()
    assert [model.excursion_closed_form(n) for n in range(len(GESSEL_EXCURSIONS))] == GESSEL_EXCURSIONS
    assert model.excursion_from_octic(len(GESSEL_EXCURSIONS)).coefficient_list() == GESSEL_EXCURSIONS


def test_gessel_octic_degrees():
    octic = GesselModel().known_polynomials()['excursion_half']
    assert octic.degree('T') == 8
    assert octic.degree('t') == 7


def test_kreweras_polynomial_annihilates_counted_section(kreweras):
    N = 30
    P = KrewerasModel().known_polynomials()['U']
    assert P.degree('T') == 6
    U = section_series(kreweras, SectionSpec('x0', N))
    assert poly_eval(P, U).is_zero()


def test_kreweras_cubic_annihilates_excursions(kreweras):
    N = 40
    cubic = KrewerasModel().known_polynomials()['excursion']
    g = section_series(kreweras, SectionSpec('00', N))
    assert poly_eval(cubic, g).is_zero()


def test_diagonal_complete_generating_function(diagonal):
    P = DiagonalModel().known_polynomials()['complete']
    G = complete_series(diagonal, 6)
    residual = (P.coefficients_in('T')[1] * G + P.coefficients_in('T')[0]).with_gens(('t', 'x', 'y'))
    assert all(m[0] >= 6 for m in residual.terms)


def test_gessel_unknowns_from_sections(gessel):
    N = 8
    unknowns = GesselModel().unknown_series(N)
    x0 = section_series(gessel, SectionSpec('x0', N))
    g00 = x0.evaluate_x(0)
    # G(t;x,0) = G00 + x·U
    rebuilt = g00 + unknowns['U'].shift_x(1)
    assert rebuilt.first_difference(x0) is None
    assert unknowns['V'].var == 'x'


def test_profiles():
    k = KrewerasModel().profile()
    assert k.unknowns == ('U',)
    assert k.excursion_stride == 3
    g = GesselModel().profile()
    assert g.unknowns == ('U', 'V')
    assert g.section_degrees['U'] == (24, 44, 32)
    assert g.guess_precision == 200


def test_reduced_system_shapes():
    N = 10
    eqs = GesselModel().reduced_system(N, QQ)
    assert [(e.target, e.source) for e in eqs] == [('U', 'V'), ('V', 'U')]
    for e in eqs:
        assert e.B.valuation() > 0
        assert e.Y.valuation() > 0
