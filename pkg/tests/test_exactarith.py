#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
exactarith 测试：模乘法、中国剩余定理、有理重构、插值、多元多项式与结式
"""

from fractions import Fraction

import numpy as np
import pytest
import sympy

from exactarith import (QQ, ArithmeticDomainError, BudgetExceeded, DensePoly, MultiPoly, PrimeField,
                        RatRecon, ReconstructionError, convolve_mod, crt_combine, divides, format_poly,
                        interpolate_poly, load_primes, ntt_prime_pool, parse_poly, poly_gcd, poly_mul, poly_xgcd,
                        rat_interp, rational_reconstruct, resultant, symmetric_lift)


def _schoolbook(a, b, p):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] = (out[i + j] + x * y) % p
    return out


def test_prime_pool_is_ntt_friendly():
    pool = ntt_prime_pool(size=8)
    assert len(pool) == 8
    assert list(pool) == sorted(pool, reverse=True)
    for p in pool:
        assert sympy.isprime(p)
        assert p < 2 ** 31
        assert (p - 1) % (1 << 20) == 0


def test_load_primes_from_env_file(tmp_path, monkeypatch):
    path = tmp_path / 'primes.txt'
    path.write_text("1000003\n# 注释\n998244353  # 行尾注释\n", encoding='utf-8')
    monkeypatch.setenv('WALKPROVE_PRIMES', str(path))
    assert load_primes() == [1000003, 998244353]
    assert load_primes(count=1) == [1000003]
    with pytest.raises(ArithmeticDomainError):
        load_primes(count=3)


def test_load_primes_rejects_bad_input(tmp_path):
    with pytest.raises(ArithmeticDomainError):
        load_primes(str(tmp_path / 'missing.txt'))
    bad = tmp_path / 'bad.txt'
    bad.write_text("12\n", encoding='utf-8')
    with pytest.raises(ArithmeticDomainError):
        load_primes(str(bad))


def test_prime_field_rejects_composite():
    with pytest.raises(ArithmeticDomainError):
        PrimeField(4)
    F = PrimeField(7)
    assert F(Fraction(1, 3)) == 5
    with pytest.raises(ArithmeticDomainError):
        F(Fraction(1, 7))


@pytest.mark.parametrize('n', [1, 17, 64, 300])
def test_convolve_mod_matches_schoolbook(n, prime):
    rng = np.random.default_rng(n)
    a = rng.integers(0, prime, n, dtype=np.int64)
    b = rng.integers(0, prime, n + 3, dtype=np.int64)
    assert convolve_mod(a, b, prime).tolist() == _schoolbook(a.tolist(), b.tolist(), prime)


def test_dense_poly_rational_arithmetic():
    x = DensePoly([0, 1], QQ, 'x')
    f = (x + 1) ** 5
    assert f.coeffs.tolist() == [1, 5, 10, 10, 5, 1]
    q, r = f.divmod(x + 1)
    assert r.is_zero()
    assert q == (x + 1) ** 4
    half = DensePoly([Fraction(1, 2), 1], QQ, 'x')
    assert (half * half).coeffs.tolist() == [Fraction(1, 4), 1, 1]
    assert f.derivative() == (x + 1) ** 4 * 5


def test_poly_mul_over_both_rings():
    x = DensePoly([0, 1], QQ, 'x')
    assert poly_mul(x + 1, x - 1) == x * x - 1
    F = PrimeField(7)
    prod = poly_mul(DensePoly([3, 1], F, 'x'), DensePoly([4, 1], F, 'x'))
    assert prod.coeffs.tolist() == [5, 0, 1]
    assert poly_mul(DensePoly.zero(F, 'x'), prod).is_zero()


def test_poly_mul_random_pairs_match_schoolbook(prime):
    F = PrimeField(prime)
    rng = np.random.default_rng(7)
    for i in range(200):
        top = 400 if i % 25 == 0 else 60
        a = rng.integers(0, prime, int(rng.integers(1, top)), dtype=np.int64).tolist()
        b = rng.integers(0, prime, int(rng.integers(1, top)), dtype=np.int64).tolist()
        assert poly_mul(DensePoly(a, F, 'x'), DensePoly(b, F, 'x')) == DensePoly(_schoolbook(a, b, prime), F, 'x')


def test_poly_mul_random_rational_pairs():
    rng = np.random.default_rng(11)
    for _ in range(100):
        a = [int(v) for v in rng.integers(-9, 10, int(rng.integers(1, 20)))]
        b = [int(v) for v in rng.integers(-9, 10, int(rng.integers(1, 20)))]
        out = [0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            for j, y in enumerate(b):
                out[i + j] += x * y
        assert poly_mul(DensePoly(a, QQ, 'x'), DensePoly(b, QQ, 'x')) == DensePoly(out, QQ, 'x')


def test_gcd_and_xgcd():
    x = DensePoly([0, 1], QQ, 'x')
    a = (x - 1) * (x + 2)
    b = (x - 1) * (x + 3) * 2
    assert poly_gcd(a, b) == x - 1
    g, s, u = poly_xgcd(a, b)
    assert g == x - 1
    assert s * a + u * b == g


def test_crt_combine():
    assert crt_combine([(2, 3), (3, 5), (2, 7)]) == (23, 105)
    with pytest.raises(ArithmeticDomainError):
        crt_combine([(1, 6), (1, 4)])
    assert symmetric_lift(104, 105) == -1


def test_rational_reconstruction_round_trip():
    p, q = load_primes(count=2)
    m = p * q
    for value in (Fraction(-7, 13), Fraction(123456, 789), Fraction(0), Fraction(5)):
        residue = value.numerator * pow(value.denominator, -1, m) % m
        assert rational_reconstruct(RatRecon(residue, m)) == value


def test_rational_reconstruction_out_of_bounds():
    with pytest.raises(ReconstructionError):
        rational_reconstruct(RatRecon(5, 101, bound=1, den_bound=1))


def test_rational_reconstruction_rejects_small_modulus():
    # 2·N·D ≥ M 时界内可能有两个解
    with pytest.raises(ReconstructionError):
        rational_reconstruct(RatRecon(3, 101, bound=10, den_bound=10))
    with pytest.raises(ReconstructionError):
        rational_reconstruct(RatRecon(3, 200, bound=10, den_bound=10))
    assert rational_reconstruct(RatRecon(3, 201, bound=10, den_bound=10)) == 3


def test_interpolate_poly():
    F = PrimeField(101)
    points = [(x, (3 * x * x + 2) % 101) for x in range(3)]
    assert interpolate_poly(points, F) == DensePoly([2, 0, 3], F, 'x')


def test_rat_interp_recovers_fraction(prime):
    F = PrimeField(prime)
    points = [(x, (x + 1) * pow(x - 3, -1, prime) % prime) for x in range(4, 10)]
    f = rat_interp(points, (1, 1), F)
    assert f.num == DensePoly([1, 1], F, 'x')
    assert f.den == DensePoly([-3, 1], F, 'x')


def test_rat_interp_needs_enough_points(prime):
    F = PrimeField(prime)
    with pytest.raises(ReconstructionError):
        rat_interp([(1, 1), (2, 5)], (1, 1), F)


def test_parse_and_format_poly():
    P = parse_poly("x^2*t+3*t-1/2")
    assert P.gens == ('t', 'x')
    assert format_poly(P) == "t*x^2+3*t-1/2"
    assert parse_poly(format_poly(P), P.gens) == P
    with pytest.raises(ArithmeticDomainError):
        parse_poly("1/x", ('x',))


def test_multipoly_structure():
    P = parse_poly("T^2*t+x", ('T', 't', 'x'))
    assert P.derivative('T') == parse_poly("2*T*t", ('T', 't', 'x'))
    assert P.degree('T') == 2
    assert P.free_gens() == ('T', 't', 'x')
    coeffs = P.coefficients_in('T')
    assert set(coeffs) == {0, 2}
    assert P.substitute({'x': 0}) == parse_poly("T^2*t", ('T', 't'))
    assert P.compose({'x': parse_poly("t+1")}) == parse_poly("T^2*t+t+1", ('T', 't'))
    assert parse_poly("-2*x+4").canonical() == parse_poly("x-2")


def test_resultant_matches_sympy():
    gens = ('z', 't', 'x')
    P = parse_poly("z^3+t*z+x", gens)
    Q = parse_poly("z^2-x*t*z+1", gens)
    R = resultant(P, Q, 'z')
    z, t, x = sympy.symbols('z t x')
    expected = sympy.resultant(P.to_sympy(), Q.to_sympy(), z)
    assert R.canonical() == parse_poly(str(sympy.expand(expected)), ('t', 'x')).canonical()


def _random_poly(rng, gens, max_total):
    """首变量首项系数为 1 的随机多项式，总次数 ≤ max_total"""
    terms = {}
    dz = int(rng.integers(1, max_total + 1))
    terms[(dz,) + (0,) * (len(gens) - 1)] = 1
    for _ in range(int(rng.integers(1, 5))):
        e = [int(v) for v in rng.integers(0, max_total + 1, len(gens))]
        e[0] = min(e[0], dz - 1)
        while sum(e) > max_total:
            e[int(np.argmax(e))] -= 1
        terms[tuple(e)] = terms.get(tuple(e), 0) + int(rng.choice([-3, -2, -1, 1, 2, 3]))
    return MultiPoly(gens, {m: c for m, c in terms.items() if c}, QQ)


@pytest.mark.parametrize('seed', range(20))
def test_random_resultants_match_sympy(seed):
    rng = np.random.default_rng(seed)
    gens = ('z', 't', 'x')
    P = _random_poly(rng, gens, 4)
    Q = _random_poly(rng, gens, 4)
    z = sympy.Symbol('z')
    expected = sympy.expand(sympy.resultant(P.to_sympy(), Q.to_sympy(), z))
    if expected == 0:
        pytest.skip('输入有公因子')
    R = resultant(P, Q, 'z')
    assert R.with_gens(('t', 'x')).canonical() == parse_poly(str(expected), ('t', 'x')).canonical()


def test_resultant_rational_coefficients():
    R = resultant(parse_poly("z^2-x/2", ('z', 'x')), parse_poly("z-t", ('z', 't')), 'z')
    assert R.canonical() == parse_poly("2*t^2-x", ('t', 'x'))


def test_resultant_guards():
    P = parse_poly("z^2-x", ('z', 'x'))
    with pytest.raises(ArithmeticDomainError):
        resultant(P, parse_poly("x+1", ('x',)), 'z')
    with pytest.raises(BudgetExceeded):
        resultant(P, parse_poly("z-x", ('z', 'x')), 'z', budget=1)


def test_divides():
    a = parse_poly("x+y")
    ok, q = divides(a, a * parse_poly("x-2*y+3"))
    assert ok
    assert q == parse_poly("x-2*y+3")
    ok, q = divides(a, parse_poly("x^2+1"))
    assert not ok and q is None
