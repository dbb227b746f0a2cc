#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
walks 测试：步集解析、计数表、截面与递推展开，用暴力枚举作对照
"""

from fractions import Fraction
from itertools import product
from math import comb

import pytest

from exactarith import QQ, DensePoly, MultiPoly, PrimeField
from ore import PRecurrence
from walks import (SectionSpec, StepSet, StepSetError, WalkError, build_walk_table, complete_series, count,
                   coefficient_by_recurrence, excursion_closed_form, recurrence_unroll, section_series,
                   specialize_section, unroll_sequence)
from walk_models import get_model

GESSEL_EXCURSIONS = [1, 0, 2, 0, 11, 0, 85, 0, 782, 0, 8004, 0, 88044, 0, 1020162]


def brute_force(steps: StepSet, n: int):
    """逐条枚举长度为 n 的格路，返回 {(i, j): 条数}"""
    ends = {}
    moves = sorted(steps.steps)
    for path in product(moves, repeat=n):
        i = j = 0
        for dx, dy in path:
            i, j = i + dx, j + dy
            if i < 0 or j < 0:
                break
        else:
            ends[(i, j)] = ends.get((i, j), 0) + 1
    return ends


def test_parse_step_set():
    steps = StepSet.parse('ne, w s')
    assert steps.steps == frozenset({(1, 1), (-1, 0), (0, -1)})
    assert str(steps) == 'S,W,NE'
    assert len(steps) == 3
    assert steps.has('NE') and not steps.has('N')


@pytest.mark.parametrize('text', ['', 'X', 'N,N', 'N,,NN'])
def test_parse_step_set_rejects(text):
    with pytest.raises(StepSetError):
        StepSet.parse(text)


def test_step_set_rejects_long_steps():
    with pytest.raises(StepSetError):
        StepSet.of((2, 0))
    with pytest.raises(StepSetError):
        StepSet.of((0, 0))


def test_section_spec():
    assert SectionSpec('G(t;x,0)', 5).which == 'x0'
    with pytest.raises(WalkError):
        SectionSpec('zz', 5)
    with pytest.raises(WalkError):
        SectionSpec('x0', 0)


@pytest.mark.parametrize('text', ['W,S,NE', 'E,W,NE,SW', 'N,S,E,W', 'N,SE,W'])
def test_table_matches_brute_force(text):
    steps = StepSet.parse(text)
    N = 8
    table = build_walk_table(steps, N, keep_layers=True)
    for n in range(N):
        ends = brute_force(steps, n)
        assert int(table.totals[n]) == sum(ends.values())
        for (i, j), c in ends.items():
            assert int(table.count(n, i, j)) == c
        assert int(table.excursions[n]) == ends.get((0, 0), 0)


def test_count_single_entries(kreweras):
    assert count(kreweras, 9, 0, 0) == 192
    assert count(kreweras, 3, 1, 1) == brute_force(kreweras, 3).get((1, 1), 0)
    assert count(kreweras, 2, 5, 0) == 0
    with pytest.raises(WalkError):
        count(kreweras, -1, 0, 0)


def test_simple_walk_counts_switch_to_big_integers(simple_walk):
    N = 40
    table = build_walk_table(simple_walk, N)
    for n in range(N):
        assert table.totals[n] == comb(n, n // 2) * comb(n + 1, (n + 1) // 2)
    catalan = [comb(2 * m, m) // (m + 1) for m in range(N)]
    for m in range(N // 2):
        assert table.excursions[2 * m] == catalan[m] * catalan[m + 1]


def test_modular_table_agrees(gessel):
    F = PrimeField(97)
    exact = build_walk_table(gessel, 20)
    modular = build_walk_table(gessel, 20, F)
    assert modular.ring == F
    assert [int(v) % 97 for v in exact.excursions] == [int(v) for v in modular.excursions]


def test_sections(gessel):
    s = section_series(gessel, SectionSpec('00', len(GESSEL_EXCURSIONS)))
    assert s.coefficient_list() == GESSEL_EXCURSIONS
    x0 = section_series(gessel, SectionSpec('x0', 6))
    assert x0.coeff(2) == {0: 2, 2: 1}
    y0 = section_series(gessel, SectionSpec('0y', 6))
    assert y0.var == 'y'
    totals = section_series(gessel, SectionSpec('11', 6))
    assert totals.coefficient_list() == [sum(brute_force(gessel, n).values()) for n in range(6)]
    ones = section_series(gessel, SectionSpec('10', 6))
    assert ones.coefficient_list() == x0.evaluate_x(1).coefficient_list()


def test_complete_series_of_diagonal(diagonal):
    G = complete_series(diagonal, 4)
    xyt = MultiPoly(('t', 'x', 'y'), {(1, 1, 1): 1})
    expected = MultiPoly.const(1, ('t', 'x', 'y')) + xyt + xyt ** 2 + xyt ** 3
    assert G == expected


def test_unroll_kreweras_recurrence():
    rec, initial, stride = get_model('kreweras').excursion_recurrence()
    assert stride == 1
    assert unroll_sequence(rec, initial, 10) == [1, 0, 0, 2, 0, 0, 16, 0, 0, 192]
    assert coefficient_by_recurrence(rec, initial, 9) == 192
    assert recurrence_unroll(rec, initial, 6) == 16
    with pytest.raises(WalkError):
        unroll_sequence(rec, initial[:1], 5)


def test_unroll_uses_supplied_term_at_singular_index():
    # n·u_{n+1} = u_n：首系数在 n=0 处为零，u_1 由初值给出
    n = DensePoly([0, 1], QQ, 'n')
    rec = PRecurrence([n * 0 - 1, n])
    assert unroll_sequence(rec, [0, 1], 5) == [0, 1, 1, Fraction(1, 2), Fraction(1, 6)]
    with pytest.raises(WalkError):
        unroll_sequence(rec, [0], 3)


def test_excursion_closed_form_lookup(kreweras, simple_walk):
    assert excursion_closed_form(kreweras, 9) == 192
    with pytest.raises(WalkError):
        excursion_closed_form(simple_walk, 4)


def test_specialize_section_matches_fixed_sections(kreweras):
    N = 10
    x0 = section_series(kreweras, SectionSpec('x0', N))
    at_one = specialize_section(x0, 1)
    assert at_one.coefficient_list() == section_series(kreweras, SectionSpec('10', N)).coefficient_list()
    assert specialize_section(x0, 0).coefficient_list() == section_series(kreweras, SectionSpec('00', N)).coefficient_list()
