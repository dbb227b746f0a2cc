#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
kernelproof 测试：核方程、代数闭包、级数验证、唯一性与端到端流水线
"""

from math import comb

import numpy as np
import pytest

import kernelproof
from exactarith import QQ, BudgetExceeded, MultiPoly, format_poly, parse_poly
from kernelproof import (Certificate, KernelError, ProofConfig, annihilator_closure, build_kernel,
                         closure_degree_bounds, identity_by_annihilator, kernel_residual, lift_candidate,
                         power_factor, recheck_certificate, run_proof_pipeline, section_rhs,
                         uniqueness_witness, verify_reduced_kernel_series)
from series import TruncSeries, poly_eval
from walks import SectionSpec, section_series
from walk_models import GesselModel, KrewerasModel

KREWERAS_TEXT = format_poly(KrewerasModel().known_polynomials()['U'])

GENS = ('T', 't')


def _fast_config(**kwargs):
    settings = dict(candidate=KREWERAS_TEXT, verify_N=30, kernel_N=20, uniqueness_N=20,
                    pcurv_primes=[5, 7, 11])
    settings.update(kwargs)
    return ProofConfig(**settings)


# ---- 核方程 ----

def test_build_kernel_kreweras():
    eq = build_kernel('W,S,NE')
    assert eq.x_boundary == MultiPoly.var('x')
    assert eq.y_boundary == MultiPoly.var('y')
    assert eq.corner == 0
    assert eq.symmetric
    assert eq.kernel == parse_poly("t*y+t*x+t*x^2*y^2-x*y", ('t', 'x', 'y'))


def test_build_kernel_gessel():
    eq = build_kernel([(1, 0), (-1, 0), (1, 1), (-1, -1)])
    assert eq.x_boundary == MultiPoly.const(1, ('x',))
    assert eq.y_boundary == parse_poly("1+y", ('y',))
    assert eq.corner == 1
    assert not eq.symmetric


def test_build_kernel_rejects_bad_steps():
    with pytest.raises(KernelError):
        build_kernel('N,XX')
    with pytest.raises(KernelError):
        build_kernel([(2, 1)])


@pytest.mark.parametrize('text', ['W,S,NE', 'E,W,NE,SW', 'N,S,E,W', 'NE'])
def test_kernel_equation_holds_on_counts(text):
    assert kernel_residual(build_kernel(text), 12) == 12


# ---- 代数闭包 ----

def test_closure_add():
    P = parse_poly("T^2-1+4*t", GENS)         # √(1 − 4t)
    Q = parse_poly("T-t", GENS)               # t
    R = annihilator_closure('add', [P, Q])
    assert R.is_canonical_equal(parse_poly("(T-t)^2-1+4*t", GENS))


def test_closure_mul_and_scale():
    P = parse_poly("T^2-1+4*t", GENS)
    R = annihilator_closure('mul', [P, parse_poly("T-t", GENS)])
    assert R.is_canonical_equal(parse_poly("T^2-t^2+4*t^3", GENS))
    S = annihilator_closure('scale', [P], aux=MultiPoly.const(2))
    assert S.is_canonical_equal(parse_poly("T^2-4+16*t", GENS))


def test_closure_substitute():
    P = parse_poly("(1-x)*T-1", ('T', 'x'))          # 1/(1 − x)
    Q = parse_poly("T-t*x", ('T', 't', 'x'))         # t·x
    R = annihilator_closure('substitute', [P, Q])
    assert R.is_canonical_equal(parse_poly("(1-t*x)*T-1", ('T', 't', 'x')))


def test_closure_annihilates_series():
    P = parse_poly("T^2-1+4*t", GENS)
    R = annihilator_closure('add', [P, parse_poly("T-t", GENS)])
    f = TruncSeries.from_coefficients([1, -2 + 1, -2, -4, -10, -28, -84])
    assert poly_eval(R, f).is_zero()


def _series(coeffs, N):
    return TruncSeries.from_coefficients(list(coeffs)[:N] + [0] * max(0, N - len(coeffs)))


def _catalan(N):
    return [comb(2 * n, n) // (n + 1) for n in range(N)]


CLOSURE_N = 16
SQRT = ("T^2-1+4*t", [1] + [-2 * c for c in _catalan(CLOSURE_N - 1)])      # √(1 − 4t)
CATALAN = ("t*T^2-T+1", _catalan(CLOSURE_N))


@pytest.mark.parametrize('seed', [1, 2, 3])
def test_every_closure_annihilates_its_series(seed):
    rng = np.random.default_rng(seed)
    N = CLOSURE_N
    P, Q = parse_poly(SQRT[0], GENS), parse_poly(CATALAN[0], GENS)
    f, g = _series(SQRT[1], N), _series(CATALAN[1], N)
    a, b, c = (int(v) for v in rng.choice([-3, -2, -1, 1, 2, 3], size=3))
    t = MultiPoly.var('t', ('t',))
    one = MultiPoly.const(1, ('t',))
    cases = {
        'add': (annihilator_closure('add', [P, Q]), f + g),
        'sub': (annihilator_closure('sub', [P, Q]), f - g),
        'mul': (annihilator_closure('mul', [P, Q]), f * g),
        'scale': (annihilator_closure('scale', [P], aux=one * a + t * b),
                  f * _series([a, b], N)),
        'affine': (annihilator_closure('affine', [Q], aux=(t * b, MultiPoly.const(c), one + t * a)),
                   (g * c + _series([0, b], N)) * _series([1, a], N).inverse()),
    }
    for op, (R, series) in cases.items():
        assert not R.is_zero(), op
        assert poly_eval(R, series).is_zero(), op


def test_substitute_closure_annihilates_composed_series():
    # 1/(1 − x) 在 x = t·C(t) 处等于 C(t)
    P = parse_poly("(1-x)*T-1", ('T', 'x'))
    Q = parse_poly("T^2-T+t", GENS)
    R = annihilator_closure('substitute', [P, Q])
    assert 'x' not in R.free_gens()
    assert poly_eval(R, _series(CATALAN[1], CLOSURE_N)).is_zero()


def test_closure_guards():
    P = parse_poly("T^2-1+4*t", GENS)
    with pytest.raises(KernelError):
        annihilator_closure('divide', [P, P])
    with pytest.raises(KernelError):
        annihilator_closure('add', [P, parse_poly("T-z", ('T', 'z'))])
    with pytest.raises(BudgetExceeded):
        annihilator_closure('add', [P, parse_poly("T-t", GENS)], budget=1)


def test_closure_degree_bounds():
    bounds = closure_degree_bounds('add', [{'T': 2, 't': 1}, {'T': 1, 't': 1}])
    assert bounds['T'] >= 2
    assert bounds['t'] >= 1
    with pytest.raises(KernelError):
        closure_degree_bounds('divide', [{}])


# ---- 判零与因子 ----

def test_identity_by_annihilator():
    R = parse_poly("(1-t)*T-t^2", GENS)
    zero = TruncSeries.zero(QQ, 5)
    assert identity_by_annihilator(R, zero) == (True, 3)
    nonzero = TruncSeries.monomial(QQ, 5, 1)
    assert identity_by_annihilator(R, nonzero) == (False, 3)
    with pytest.raises(KernelError):
        identity_by_annihilator(R, TruncSeries.zero(QQ, 2))


def test_power_factor():
    P = parse_poly("T-t", GENS)
    k, rest = power_factor(P, P * P * parse_poly("t+1", ('t',)))
    assert k == 2
    assert rest == parse_poly("t+1", ('t',))
    k, rest = power_factor(P, P * parse_poly("T+1", ('T',)))
    assert k == 1
    assert rest == parse_poly("T+1", ('T',))


def test_lift_candidate_from_counts():
    catalan = [comb(2 * n, n) // (n + 1) for n in range(20)]
    counted = TruncSeries.from_coefficients(catalan[:5])
    f, k = lift_candidate(parse_poly("t*T^2-T+1", GENS), counted, 20)
    assert k == 1
    assert f.coefficient_list() == catalan


# ---- 约化核方程与唯一性 ----

def test_reduced_kernel_series_kreweras(kreweras):
    N = 15
    U = section_series(kreweras, SectionSpec('x0', N))
    model = KrewerasModel()
    assert verify_reduced_kernel_series(model, {'U': U}, None, N) == N
    bumped = U + TruncSeries.monomial(QQ, N, 6, 1)
    assert verify_reduced_kernel_series(model, {'U': bumped}, None, N) < N


def test_reduced_kernel_series_gessel():
    N = 10
    model = GesselModel()
    assert verify_reduced_kernel_series(model, model.unknown_series(N), None, N) == N


def test_section_rhs_reproduces_counts(kreweras):
    N = 10
    counted = section_series(kreweras, SectionSpec('x0', N + 1))
    S = section_rhs(build_kernel(kreweras), 'x0', counted.rename('y'), None, N)
    assert S.first_difference(counted.truncate(N)) is None


def test_uniqueness_witness():
    N = 20
    eq, = KrewerasModel().reduced_system(N)
    assert uniqueness_witness([eq.B], [eq.Y], N)
    pair = GesselModel().reduced_system(N)
    assert uniqueness_witness([e.B for e in pair], [e.Y for e in pair], N)
    with pytest.raises(KernelError, match=r"B\[0\]"):
        uniqueness_witness([TruncSeries.constant(1, QQ, N)], [eq.Y], N)
    with pytest.raises(KernelError, match=r"Y\[0\]"):
        uniqueness_witness([eq.B], [TruncSeries.constant(1, QQ, N)], N)


# ---- 证书与配置 ----

def test_certificate_round_trip():
    cert = Certificate(steps='S,W,NE', model='kreweras')
    cert.add_candidate('x0', KrewerasModel().known_polynomials()['U'])
    cert.record_error('guess', ValueError('boom'))
    again = Certificate.from_dict(dict(cert.to_dict(), unknown_field=1))
    assert again.candidate('x0').is_canonical_equal(KrewerasModel().known_polynomials()['U'])
    assert again.errors == [{'stage': 'guess', 'error': 'ValueError: boom'}]
    assert not again.passed('guess')


def test_proof_config():
    with pytest.raises(KernelError):
        ProofConfig(mode='fast')
    cfg = ProofConfig.from_dict({'mode': 'exact', 'verify_N': 40, 'bogus': 1, 'threads': None})
    assert cfg.mode == 'exact'
    assert cfg.verify_N == 40
    assert ProofConfig(primes=[7, 11]).prime_list() == [7, 11]
    assert len(ProofConfig(prime_count=2).prime_list()) == 2


# ---- 流水线 ----

def test_pipeline_kreweras_series_mode(tmp_path):
    path = tmp_path / 'certificate.json'
    cert = run_proof_pipeline('W,S,NE', _fast_config(certificate_file=str(path)))
    assert cert.model == 'kreweras'
    assert cert.verified
    assert cert.mode == 'series'
    assert cert.evidence['guess']['published_match']
    assert cert.evidence['side_checks']['specialization_match']
    assert path.exists()
    assert any('低于按次数估计的 170' in c for c in cert.caveats)

    report = recheck_certificate(str(path))
    assert report.ok
    assert report.checks['series'] == {'stored': True, 'rechecked': True}


def test_pipeline_rejects_wrong_candidate():
    wrong = KREWERAS_TEXT + "+t^11"
    cert = run_proof_pipeline('W,S,NE', _fast_config(candidate=wrong))
    assert not cert.verified
    assert not cert.passed('lift') or not cert.passed('series')


def test_pipeline_verify_order_over_cap_is_an_error():
    # Kreweras 的 x0 截面次数 (6, 10)：需要 N = 2·6·10 + 50 = 170
    assert ProofConfig().max_verify_N == 0
    cert = run_proof_pipeline('W,S,NE', _fast_config(verify_N=0, max_verify_N=100))
    assert not cert.passed('lift')
    assert any(e['stage'] == 'lift' and e['error'].startswith('BudgetExceeded') for e in cert.errors)
    assert not cert.verified


def test_pipeline_requires_side_checks(monkeypatch):
    monkeypatch.setattr(kernelproof, 'p_curvature_zero', lambda L, p: False)
    cert = run_proof_pipeline('W,S,NE', _fast_config())
    assert cert.passed('series')
    assert not cert.passed('side_checks')
    assert cert.evidence['side_checks']['pcurvature_zero_all'] is False
    assert any('p-曲率非零' in c for c in cert.caveats)
    assert not cert.verified


def test_pipeline_diagonal_exact():
    cert = run_proof_pipeline('NE', ProofConfig(mode='exact', verify_N=10, kernel_N=10, uniqueness_N=10))
    assert cert.verified
    assert cert.mode == 'exact'
    assert cert.passed('exact')


def test_pipeline_unknown_model():
    cert = run_proof_pipeline('N,S,E,W', ProofConfig(guess_N=40, kernel_N=10))
    assert cert.model is None
    assert not cert.verified
    assert any(e['stage'] == 'model' for e in cert.errors)
    assert cert.passed('kernel')


@pytest.mark.slow
def test_pipeline_kreweras_exact_mode():
    cert = run_proof_pipeline('W,S,NE', _fast_config(mode='exact'))
    assert cert.verified
    assert cert.mode == 'exact'
    chain = cert.evidence['exact']['chains'][0]
    assert chain['factorization'] == "resultant = P^2 · unit"
    assert chain['identity']


@pytest.mark.slow
def test_pipeline_kreweras_guesses_section():
    cert = run_proof_pipeline('W,S,NE', ProofConfig(verify_N=30, kernel_N=20, uniqueness_N=20))
    assert cert.evidence['guess']['published_match']
    assert cert.verified


@pytest.mark.slow
def test_pipeline_gessel_needs_unknown_candidates():
    cert = run_proof_pipeline('E,W,NE,SW', ProofConfig(verify_N=40, kernel_N=30, uniqueness_N=20,
                                                       section_image=False, pcurv_primes=[5, 7]))
    assert cert.model == 'gessel'
    assert cert.evidence['guess']['published_match']
    assert cert.evidence['side_checks']['specialization_match']
    lift = cert.evidence['lift']
    assert lift['counted_agreement']
    assert lift['missing_candidates'] == ['U', 'V']
    assert not lift['passed']
    assert not cert.passed('series')
    assert not cert.verified
    assert cert.caveats


@pytest.mark.slow
def test_pipeline_gessel_rejects_wrong_unknown_candidates():
    cfg = ProofConfig(verify_N=40, kernel_N=30, uniqueness_N=20, section_image=False, pcurv_primes=[5],
                      unknown_candidates={'U': 'T', 'V': 'T'})
    cert = run_proof_pipeline('E,W,NE,SW', cfg)
    assert set(cert.candidates) >= {'00_half', 'U', 'V'}
    assert cert.evidence['lift']['unknown_agreement'] == {'U': False, 'V': False}
    assert not cert.passed('lift')
    assert not cert.verified
