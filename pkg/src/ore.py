#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Ore 微分算子模块
系数为 t 的有理函数的算子 Σ a_i(t)·Dt^i：乘法、右除、GCRD、p-曲率，
以及 代数方程 -> 微分方程 -> P-递推 的转换链。
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from math import gcd, lcm
from typing import Dict, List, Optional, Sequence, Tuple

import sympy

from exactarith import (QQ, DensePoly, MultiPoly, PrimeField, RatFunc, Ring, WalkProveError,
                        ArithmeticDomainError, format_dense, poly_gcd, same_ring)
from series import TruncSeries

logger = logging.getLogger(__name__)


class OperatorError(WalkProveError):
    """算子解析失败、输入不是无平方因子、坏素数等"""


# ---------------------------------------------------------------------------
# 多项式系数表上的辅助运算（列表下标即 Dt 的幂次）
# ---------------------------------------------------------------------------

def _trim_ops(cs: List[DensePoly]) -> List[DensePoly]:
    while cs and cs[-1].is_zero():
        cs = cs[:-1]
    return cs


def _apply_d(cs: List[DensePoly]) -> List[DensePoly]:
    """Dt · Σ c_j Dt^j = Σ (c_j' Dt^j + c_j Dt^(j+1))"""
    if not cs:
        return []
    ring, var = cs[0].ring, cs[0].var
    out = [DensePoly.zero(ring, var) for _ in range(len(cs) + 1)]
    for j, c in enumerate(cs):
        out[j] = out[j] + c.derivative()
        out[j + 1] = out[j + 1] + c
    return _trim_ops(out)


def _primitive_polys(cs: List[DensePoly]) -> List[DensePoly]:
    """去掉系数的多项式公因式与整数容量，最高阶系数的首项为正（素数域上为 1）"""
    cs = _trim_ops(list(cs))
    if not cs:
        return cs
    g = reduce(poly_gcd, [c for c in cs if not c.is_zero()])
    if g.degree() > 0:
        cs = [c.exact_div(g) for c in cs]
    ring = cs[0].ring
    if ring.characteristic:
        inv = ring.inv(cs[-1].lc())
        return [c * inv for c in cs]
    fracs = [Fraction(v) for c in cs for v in c.coeffs.tolist()]
    num = reduce(gcd, (f.numerator for f in fracs), 0)
    den = reduce(lcm, (f.denominator for f in fracs), 1)
    scale = Fraction(den, num)
    if Fraction(cs[-1].lc()) < 0:
        scale = -scale
    return [c * scale for c in cs]


def _prem(a: List[DensePoly], b: List[DensePoly]) -> List[DensePoly]:
    """伪右余式：左乘 lc(b) 消去首项，结果取本原"""
    powers = {0: b}
    ob = len(b) - 1
    lb = b[-1]
    while len(a) - 1 >= ob and a:
        k = len(a) - 1 - ob
        while k not in powers:
            top = max(powers)
            powers[top + 1] = _apply_d(powers[top])
        dkb = powers[k]
        la = a[-1]
        out = [c * lb for c in a]
        for j, c in enumerate(dkb):
            out[j] = out[j] - la * c
        a = _primitive_polys(out[:-1])
    return a


# ---------------------------------------------------------------------------
# 算子
# ---------------------------------------------------------------------------

class OreOperator:
    """
    微分算子 Σ a_i(t)·Dt^i，a_i 为 RatFunc

    乘法遵守 Dt·t = t·Dt + 1。
    """

    __slots__ = ('coeffs', 'ring', 'var')

    def __init__(self, coeffs: Sequence, ring: Ring = QQ, var: str = 't'):
        converted = []
        for c in coeffs:
            if isinstance(c, RatFunc):
                converted.append(c)
            elif isinstance(c, DensePoly):
                converted.append(RatFunc(c))
            else:
                converted.append(RatFunc.const(c, ring, var))
        while converted and converted[-1].is_zero():
            converted.pop()
        if converted:
            ring, var = converted[0].ring, converted[0].var
        self.coeffs: List[RatFunc] = converted
        self.ring = ring
        self.var = var

    @classmethod
    def Dt(cls, ring: Ring = QQ, var: str = 't') -> 'OreOperator':
        return cls([0, 1], ring, var)

    @classmethod
    def from_polys(cls, polys: Sequence[DensePoly]) -> 'OreOperator':
        polys = list(polys)
        if not polys:
            return cls([])
        return cls([RatFunc(p) for p in polys], polys[0].ring, polys[0].var)

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def leading(self) -> RatFunc:
        return self.coeffs[-1]

    def _zero_coeff(self) -> RatFunc:
        return RatFunc.const(0, self.ring, self.var)

    def _coerce(self, other) -> 'OreOperator':
        if isinstance(other, OreOperator):
            same_ring(self.ring, other.ring)
            return other
        return OreOperator([other], self.ring, self.var)

    def __add__(self, other) -> 'OreOperator':
        other = self._coerce(other)
        n = max(len(self.coeffs), len(other.coeffs))
        zero = self._zero_coeff()
        out = [(self.coeffs[i] if i < len(self.coeffs) else zero)
               + (other.coeffs[i] if i < len(other.coeffs) else zero) for i in range(n)]
        return OreOperator(out, self.ring, self.var)

    __radd__ = __add__

    def __neg__(self) -> 'OreOperator':
        return OreOperator([-c for c in self.coeffs], self.ring, self.var)

    def __sub__(self, other) -> 'OreOperator':
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> 'OreOperator':
        return self._coerce(other) - self

    def __mul__(self, other) -> 'OreOperator':
        if isinstance(other, OreOperator):
            return ore_mul(self, other)
        return ore_mul(self, OreOperator([other], self.ring, self.var))

    def __rmul__(self, other) -> 'OreOperator':
        return ore_mul(OreOperator([other], self.ring, self.var), self)

    def __pow__(self, k: int) -> 'OreOperator':
        result = OreOperator([1], self.ring, self.var)
        for _ in range(k):
            result = result * self
        return result

    def __eq__(self, other) -> bool:
        if not isinstance(other, OreOperator):
            other = OreOperator([other], self.ring, self.var)
        return len(self.coeffs) == len(other.coeffs) and all(
            a == b for a, b in zip(self.coeffs, other.coeffs))

    def __hash__(self) -> int:
        return hash(tuple(self.coeffs))

    def lmul(self, c) -> 'OreOperator':
        """左乘系数（交换地作用在每个系数上）"""
        return OreOperator([a * c for a in self.coeffs], self.ring, self.var)

    def apply_d(self) -> 'OreOperator':
        """Dt · self"""
        zero = self._zero_coeff()
        out = [zero] * (len(self.coeffs) + 1)
        for j, c in enumerate(self.coeffs):
            out[j] = out[j] + c.derivative()
            out[j + 1] = out[j + 1] + c
        return OreOperator(out, self.ring, self.var)

    def monic(self) -> 'OreOperator':
        if self.is_zero():
            return self
        inv = RatFunc.const(1, self.ring, self.var) / self.leading()
        return self.lmul(inv)

    def to_polys(self) -> List[DensePoly]:
        """清分母后的本原多项式系数"""
        if self.is_zero():
            return []
        den = reduce(lambda a, b: (a * b).exact_div(poly_gcd(a, b)), [c.den for c in self.coeffs])
        polys = [c.num * den.exact_div(c.den) for c in self.coeffs]
        return _primitive_polys(polys)

    def primitive(self) -> 'OreOperator':
        return OreOperator.from_polys(self.to_polys())

    def degree(self) -> int:
        """本原形式下系数的最高次数"""
        return max((c.degree() for c in self.to_polys()), default=-1)

    def reduce_mod(self, p: int) -> 'OreOperator':
        """QQ 上的算子模 p；首系数模 p 消失时报坏素数"""
        if self.ring.characteristic:
            if self.ring.p != p:
                raise OperatorError(f"算子定义在 GF({self.ring.p}) 上，不能再模 {p}")
            return self
        ring = PrimeField(p)
        polys = self.to_polys()
        reduced = []
        for c in polys:
            try:
                reduced.append(DensePoly([ring(v) for v in c.coeffs.tolist()], ring, c.var))
            except ArithmeticDomainError as e:
                raise OperatorError(f"算子不能模 {p} 约化: {e}")
        if reduced[-1].is_zero():
            raise OperatorError(f"首系数模 {p} 为零（坏素数）")
        return OreOperator.from_polys(reduced)

    def __repr__(self) -> str:
        return f"OreOperator({format_operator(self)})"


def ore_mul(L1: OreOperator, L2: OreOperator) -> OreOperator:
    """
    算子乘法 L1·L2 = Σ a_i·(Dt^i·L2)

    Args:
        L1, L2: 同环同变量的算子

    Returns:
        乘积算子
    """
    same_ring(L1.ring, L2.ring)
    if L1.is_zero() or L2.is_zero():
        return OreOperator([], L1.ring, L1.var)
    result = OreOperator([], L1.ring, L1.var)
    power = L2
    for i, a in enumerate(L1.coeffs):
        if i:
            power = power.apply_d()
        if not a.is_zero():
            result = result + power.lmul(a)
    return result


def right_divide(L: OreOperator, M: OreOperator) -> Tuple[OreOperator, OreOperator]:
    """
    右除 L = Q·M + R，ord R < ord M

    Raises:
        OperatorError: M 为零
    """
    if M.is_zero():
        raise OperatorError("不能右除零算子")
    same_ring(L.ring, M.ring)
    ring, var = L.ring, L.var
    powers = {0: M}
    q_coeffs: Dict[int, RatFunc] = {}
    R = L
    while not R.is_zero() and R.order >= M.order:
        k = R.order - M.order
        while k not in powers:
            top = max(powers)
            powers[top + 1] = powers[top].apply_d()
        c = R.leading() / M.leading()
        q_coeffs[k] = q_coeffs.get(k, RatFunc.const(0, ring, var)) + c
        R = R - powers[k].lmul(c)
    zero = RatFunc.const(0, ring, var)
    Q = OreOperator([q_coeffs.get(i, zero) for i in range(max(q_coeffs, default=-1) + 1)], ring, var)
    return Q, R


def gcrd(L1: OreOperator, L2: OreOperator) -> OreOperator:
    """
    最大公右因子（首一）

    用本原伪余式序列在多项式系数上计算，避免有理函数系数膨胀。
    """
    same_ring(L1.ring, L2.ring)
    a, b = L1.to_polys(), L2.to_polys()
    if not b:
        return OreOperator.from_polys(a).monic()
    if not a:
        return OreOperator.from_polys(b).monic()
    if len(a) < len(b):
        a, b = b, a
    while b:
        r = _prem(a, b)
        a, b = b, r
        logger.debug(f"GCRD 余式阶数 {len(b) - 1}")
    return OreOperator.from_polys(a).monic()


def gcrd_many(ops: Sequence[OreOperator]) -> OreOperator:
    """依次求 GCRD，直到结果稳定"""
    ops = [op for op in ops if not op.is_zero()]
    if not ops:
        raise OperatorError("没有可求 GCRD 的算子")
    result = ops[0].monic()
    for op in ops[1:]:
        nxt = gcrd(result, op)
        if nxt == result:
            continue
        result = nxt
    return result


# ---------------------------------------------------------------------------
# p-曲率
# ---------------------------------------------------------------------------

def _modular_polys(L: OreOperator, p: int) -> List[DensePoly]:
    if L.ring.characteristic:
        if L.ring.p != p:
            raise OperatorError(f"算子定义在 GF({L.ring.p}) 上，不是 GF({p})")
        return L.to_polys()
    return L.reduce_mod(p).to_polys()


def _dt_power_numerators(polys: List[DensePoly], count: int):
    """
    逐个生成 Dt^k 在商模基 1, Dt, …, Dt^(r-1) 下的坐标分子 W_k（Dt^k ≡ W_k / l^k）

    W_{k+1,i} = l·W_i' − k·l'·W_i + l·W_{i−1} − l_i·W_{r−1}
    """
    r = len(polys) - 1
    l = polys[-1]
    dl = l.derivative()
    ring, var = l.ring, l.var
    zero = DensePoly.zero(ring, var)
    W = [DensePoly.one(ring, var) if i == 0 else zero for i in range(r)]
    for k in range(count):
        yield k, W
        top = W[r - 1]
        nxt = []
        for i in range(r):
            v = l * W[i].derivative() - dl * W[i] * k
            if i:
                v = v + l * W[i - 1]
            if not top.is_zero():
                v = v - polys[i] * top
            nxt.append(v)
        W = nxt


def p_curvature_zero(L: OreOperator, p: int, method: str = 'binary') -> bool:
    """
    Dt^p 能否被 L 右整除（模 p）

    Args:
        method: binary 按 p 的二进制位平方求余式；iterated 用坐标分子逐次递推
    """
    if method not in ('binary', 'iterated'):
        raise OperatorError(f"未知的 p-曲率算法 {method!r}")
    polys = _modular_polys(L, p)
    if len(polys) <= 1:
        return True
    if method == 'binary':
        return power_remainder_binary(OreOperator.from_polys(polys), p).is_zero()
    for k, W in _dt_power_numerators(polys, p + 1):
        if k == p:
            return all(w.is_zero() for w in W)
    return False


def p_curvature_matrix(L: OreOperator, p: int) -> List[List[RatFunc]]:
    """
    p-曲率矩阵：第 i 列为 Dt^(p+i) 在基 1, …, Dt^(r-1) 下的坐标

    Returns:
        r×r 的 RatFunc 矩阵（按行存储）
    """
    polys = _modular_polys(L, p)
    r = len(polys) - 1
    l = polys[-1]
    columns = []
    for k, W in _dt_power_numerators(polys, p + r):
        if k >= p:
            den = l ** k
            columns.append([RatFunc(w, den) for w in W])
    return [[columns[j][i] for j in range(r)] for i in range(r)]


def global_nilpotency_check(L: OreOperator, p: int) -> bool:
    """
    p-曲率是否幂零

    p-曲率与 Dt 交换，商模由 1 生成，因此只需检查 A^r·e_0 = 0。
    """
    polys = _modular_polys(L, p)
    r = len(polys) - 1
    if r <= 0:
        return True
    if p_curvature_zero(L, p):
        return True
    l = polys[-1]
    columns = []
    for k, W in _dt_power_numerators(polys, p + r):
        if k >= p:
            # 通分到 l^(p+r-1)
            scale = l ** (p + r - 1 - k)
            columns.append([w * scale for w in W])
    vec = [DensePoly.one(l.ring, l.var) if i == 0 else DensePoly.zero(l.ring, l.var) for i in range(r)]
    for _ in range(r):
        nxt = [DensePoly.zero(l.ring, l.var) for _ in range(r)]
        for j in range(r):
            if vec[j].is_zero():
                continue
            for i in range(r):
                nxt[i] = nxt[i] + columns[j][i] * vec[j]
        vec = nxt
        if all(v.is_zero() for v in vec):
            return True
    return all(v.is_zero() for v in vec)


def power_remainder(L: OreOperator, n: int) -> OreOperator:
    """Dt^n 右除以 L 的余式（逐次乘法）"""
    ring, var = L.ring, L.var
    Dn = OreOperator([0] * n + [1], ring, var)
    return right_divide(Dn, L)[1]


def power_remainder_binary(L: OreOperator, n: int) -> OreOperator:
    """
    Dt^n 右除以 L 的余式（平方-乘）

    Dt^b = Q·L + R_b 时 Dt^(a+b) ≡ Dt^a·R_b，因此 R_2k = rem(Dt^k·R_k)，R_(k+1) = rem(Dt·R_k)。
    """
    if n < 0:
        raise OperatorError(f"幂次不能为负: {n}")
    ring, var = L.ring, L.var
    R = OreOperator([1], ring, var)
    if n == 0:
        return right_divide(R, L)[1]
    k = 0
    for bit in bin(n)[2:]:
        if k:
            R = right_divide(OreOperator([0] * k + [1], ring, var) * R, L)[1]
            k *= 2
        if bit == '1':
            R = right_divide(R.apply_d(), L)[1]
            k += 1
    logger.debug(f"Dt^{n} 的余式: 阶 {R.order}")
    return R


# ---------------------------------------------------------------------------
# 作用、文本格式
# ---------------------------------------------------------------------------

def apply_operator(L: OreOperator, f: TruncSeries) -> TruncSeries:
    """
    算子作用在不含 x 的截断级数上，结果截断阶降低 ord L

    Raises:
        OperatorError: 某系数的分母在 t = 0 处为零
    """
    ring = f.ring
    order = f.order - L.order
    if order <= 0:
        raise OperatorError(f"级数精度 {f.order} 不足以作用 {L.order} 阶算子")
    result = TruncSeries.zero(ring, order, f.var)
    deriv = f
    for i, c in enumerate(L.coeffs):
        if i:
            deriv = deriv.derivative()
        if c.is_zero():
            continue
        num = TruncSeries.from_coefficients(_poly_values(c.num, order, ring), ring, f.var)
        term = num * deriv.truncate(order)
        if c.den.degree() > 0:
            den = TruncSeries.from_coefficients(_poly_values(c.den, order, ring), ring, f.var)
            if not den.coeff(0):
                raise OperatorError("系数分母在 t = 0 处为零，无法作用在幂级数上")
            term = term * den.inverse()
        result = result + term
    return result


def _poly_values(poly: DensePoly, order: int, ring: Ring) -> list:
    values = [ring(v) for v in poly.coeffs.tolist()[:order]]
    return values + [ring(0)] * (order - len(values))


def parse_operator(text: str, ring: Ring = QQ, var: str = 't') -> OreOperator:
    """
    解析 "a0(t) + a1(t)*Dt + ... + ar(t)*Dt^r"，系数写在 Dt 幂的左边

    Raises:
        OperatorError: 无法解析
    """
    t, dt = sympy.Symbol(var), sympy.Symbol('Dt')
    try:
        expr = sympy.expand(sympy.sympify(text.replace('^', '**'), locals={var: t, 'Dt': dt}))
        poly = sympy.Poly(expr, dt)
    except (sympy.SympifyError, SyntaxError, TypeError, sympy.PolynomialError) as e:
        raise OperatorError(f"无法解析算子 {text!r}: {e}")
    extra = expr.free_symbols - {t, dt}
    if extra:
        raise OperatorError(f"算子含未知符号: {sorted(map(str, extra))}")
    coeffs = [RatFunc.const(0, ring, var)] * (poly.degree() + 1)
    for (k,), c in poly.terms():
        num, den = sympy.fraction(sympy.together(c))
        coeffs[k] = RatFunc(_sympy_dense(num, t, ring, var), _sympy_dense(den, t, ring, var))
    return OreOperator(coeffs, ring, var)


def _sympy_dense(expr, t, ring: Ring, var: str) -> DensePoly:
    try:
        coeffs = sympy.Poly(expr, t).all_coeffs()[::-1]
    except sympy.PolynomialError as e:
        raise OperatorError(f"系数不是 {var} 的多项式: {expr}: {e}")
    return DensePoly([Fraction(int(c.p), int(c.q)) for c in coeffs], ring, var)


def format_operator(L: OreOperator) -> str:
    """规范文本：本原多项式系数，按 Dt 幂次升序"""
    parts = []
    for k, c in enumerate(L.to_polys()):
        if c.is_zero():
            continue
        coeff = format_dense(c)
        if k == 0:
            parts.append(f"({coeff})")
        elif k == 1:
            parts.append(f"({coeff})*Dt")
        else:
            parts.append(f"({coeff})*Dt^{k}")
    return ' + '.join(parts) if parts else '0'


def operator_to_multipoly(L: OreOperator) -> MultiPoly:
    terms = {}
    for k, c in enumerate(L.to_polys()):
        for e, v in enumerate(c.coeffs.tolist()):
            if v:
                terms[(k, e)] = v
    return MultiPoly(('Dt', L.var), terms, L.ring)


def operator_from_multipoly(poly: MultiPoly, var: str = 't') -> OreOperator:
    """(Dt, t) 上的多项式转为算子；其它变量须已代入"""
    extra = [g for g in poly.free_gens() if g not in ('Dt', var)]
    if extra:
        raise OperatorError(f"算子多项式含多余变量 {extra}")
    poly = poly.with_gens(('Dt', var))
    order = max((m[0] for m in poly.terms), default=-1)
    rows: List[Dict[int, object]] = [{} for _ in range(order + 1)]
    for (k, e), c in poly.terms.items():
        rows[k][e] = c
    polys = []
    for row in rows:
        deg = max(row, default=-1)
        polys.append(DensePoly([row.get(e, 0) for e in range(deg + 1)], poly.ring, var))
    return OreOperator.from_polys(polys)


# ---------------------------------------------------------------------------
# P-递推
# ---------------------------------------------------------------------------

def _falling(n_poly: DensePoly, i: int) -> DensePoly:
    """(n+j)(n+j−1)…(n+j−i+1)，n_poly = n + j"""
    out = DensePoly.one(n_poly.ring, n_poly.var)
    for s in range(i):
        out = out * (n_poly - s)
    return out


def _shift_poly(poly: DensePoly, k: int) -> DensePoly:
    """c(n) -> c(n + k)"""
    out = DensePoly.zero(poly.ring, poly.var)
    step = DensePoly([k, 1], poly.ring, poly.var)
    for c in reversed(poly.coeffs.tolist()):
        out = out * step + c
    return out


@dataclass
class PRecurrence:
    """Σ_j c_j(n)·u_{n+j} = 0"""
    coeffs: List[DensePoly]
    initial: List[Fraction] = field(default_factory=list)

    def __post_init__(self):
        self.coeffs = _trim_ops(list(self.coeffs))
        if not self.coeffs:
            raise OperatorError("递推的系数全为零")

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def normalized(self) -> 'PRecurrence':
        lo = 0
        while self.coeffs[lo].is_zero():
            lo += 1
        return PRecurrence(_primitive_polys(self.coeffs[lo:]), list(self.initial))

    def shift(self, k: int) -> 'PRecurrence':
        """n -> n + k"""
        return PRecurrence([_shift_poly(c, k) for c in self.coeffs], list(self.initial))

    def evaluate(self, values: Sequence, n: int):
        """Σ c_j(n)·u_{n+j}"""
        return sum(Fraction(c(n)) * values[n + j] for j, c in enumerate(self.coeffs))

    def check(self, values: Sequence, start: int = 0) -> bool:
        """递推在给定序列的所有可用下标上成立"""
        return all(self.evaluate(values, n) == 0 for n in range(start, len(values) - self.order))

    def equivalent(self, other: 'PRecurrence', max_shift: int = 20) -> bool:
        """相差非零常数因子与下标平移时视为等价"""
        a = self.normalized()
        b = other.normalized()
        if a.order != b.order:
            return False
        for k in range(-max_shift, max_shift + 1):
            if a.shift(k).normalized().coeffs == b.coeffs:
                return True
        return False

    def format(self, name: str = 'u') -> str:
        n = sympy.Symbol('n')
        parts = []
        for j, c in enumerate(self.normalized().coeffs):
            if c.is_zero():
                continue
            expr = sympy.factor(MultiPoly.from_dense(c, 'n').to_sympy())
            idx = f"{name}_n" if j == 0 else f"{name}_{{n + {j}}}"
            text = str(expr).replace('**', '^').replace('*', ' ')
            parts.append((j, text, idx))
        out = ''
        for j, text, idx in sorted(parts, key=lambda x: -x[0]):
            if text.startswith('-'):
                sign, body = ' - ', text[1:]
            else:
                sign, body = ' + ', text
            body = '' if body == '1' else body + ' '
            out += f"{sign}{body}{idx}"
        out = out[3:] if out.startswith(' + ') else '-' + out[3:]
        return f"{out} = 0"

    def __str__(self) -> str:
        return self.format()


def diffeq_to_rec(L: OreOperator) -> PRecurrence:
    """
    微分算子 -> 系数序列的递推

    t^a·Dt^i 作用在 Σ u_n t^n 上，对 u_{n+j}（j = i − a − s_min）贡献 c·(n+j)^{(i)}（下降阶乘）。
    """
    polys = L.to_polys()
    if not polys:
        raise OperatorError("零算子没有递推")
    ring = polys[0].ring
    shifts = [i - a for i, c in enumerate(polys) for a, v in enumerate(c.coeffs.tolist()) if v]
    smin, smax = min(shifts), max(shifts)
    out = [DensePoly.zero(ring, 'n') for _ in range(smax - smin + 1)]
    for i, c in enumerate(polys):
        for a, v in enumerate(c.coeffs.tolist()):
            if not v:
                continue
            j = i - a - smin
            out[j] = out[j] + _falling(DensePoly([j, 1], ring, 'n'), i) * v
    rec = PRecurrence(out).normalized()
    logger.debug(f"递推阶数 {rec.order}")
    return rec


# ---------------------------------------------------------------------------
# 代数方程 -> 微分方程
# ---------------------------------------------------------------------------

_RPoly = List[RatFunc]


def _rp_trim(a: _RPoly) -> _RPoly:
    while a and a[-1].is_zero():
        a = a[:-1]
    return a


def _rp_sub(a: _RPoly, b: _RPoly) -> _RPoly:
    if not a and not b:
        return []
    n = max(len(a), len(b))
    zero = (a or b)[0] * 0
    return _rp_trim([(a[i] if i < len(a) else zero) - (b[i] if i < len(b) else zero) for i in range(n)])


def _rp_mul(a: _RPoly, b: _RPoly) -> _RPoly:
    if not a or not b:
        return []
    zero = a[0] * 0
    out = [zero] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x.is_zero():
            continue
        for j, y in enumerate(b):
            if not y.is_zero():
                out[i + j] = out[i + j] + x * y
    return _rp_trim(out)


def _rp_divmod(a: _RPoly, b: _RPoly) -> Tuple[_RPoly, _RPoly]:
    a = list(a)
    zero = b[0] * 0
    q = [zero] * max(len(a) - len(b) + 1, 0)
    while len(a) >= len(b) and a:
        k = len(a) - len(b)
        c = a[-1] / b[-1]
        q[k] = c
        for j, y in enumerate(b):
            a[k + j] = a[k + j] - c * y
        a = _rp_trim(a[:-1])
    return _rp_trim(q), a


def _rp_inverse_mod(a: _RPoly, m: _RPoly) -> _RPoly:
    """a 在 K(t)[T]/(m) 中的逆（扩展欧几里得）"""
    one = m[0] * 0 + 1
    r0, r1 = m, a
    s0, s1 = [], [one]
    while len(r1) > 1:
        q, r = _rp_divmod(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, _rp_sub(s0, _rp_mul(q, s1))
    if not r1:
        raise OperatorError("∂P/∂T 与 P 不互素：P 不是无平方因子")
    inv = one / r1[0]
    return _rp_divmod([c * inv for c in s1], m)[1]


def _univariate_at(P: MultiPoly, main: str, var: str, t0: Fraction) -> DensePoly:
    coeffs: Dict[int, Fraction] = {}
    i, j = P.gens.index(main), P.gens.index(var)
    for m, c in P.terms.items():
        coeffs[m[i]] = coeffs.get(m[i], 0) + Fraction(c) * t0 ** m[j]
    return DensePoly([coeffs.get(k, 0) for k in range(max(coeffs, default=-1) + 1)], QQ, main)


def _check_squarefree(P: MultiPoly, main: str, var: str) -> None:
    """在两个 t 值处检查 gcd(P, ∂P/∂T)"""
    dP = P.derivative(main)
    bad = 0
    for t0 in (Fraction(3, 7), Fraction(11, 5)):
        da, db = _univariate_at(P, main, var, t0), _univariate_at(dP, main, var, t0)
        if not da.is_zero() and not db.is_zero() and poly_gcd(da, db).degree() > 0:
            bad += 1
    if bad == 2:
        raise OperatorError("P 不是无平方因子，请先取其无平方部分")


def algeq_to_diffeq(P: MultiPoly, main: str = 'T', var: str = 't') -> OreOperator:
    """
    代数方程 P(f, t) = 0 -> f 满足的最小阶线性微分算子

    在 K(t)[T]/(P) 中用 f' = −P_t(f)/P_T(f) 反复求导，找 f, f', f'', … 的第一个线性相关。

    Raises:
        OperatorError: P 不是无平方因子或含多余变量
    """
    extra = [g for g in P.free_gens() if g not in (main, var)]
    if extra:
        raise OperatorError(f"代数方程含多余变量 {extra}，请先代入")
    P = P.with_gens((main, var))
    if P.degree(main) <= 0:
        raise OperatorError(f"P 关于 {main} 的次数必须为正")
    _check_squarefree(P, main, var)

    def to_rpoly(poly: MultiPoly) -> _RPoly:
        poly = poly.with_gens((main, var))
        d = max(poly.degree(main), 0)
        rows: List[Dict[int, object]] = [{} for _ in range(d + 1)]
        for (k, e), c in poly.terms.items():
            rows[k][e] = c
        out = []
        for row in rows:
            deg = max(row, default=-1)
            out.append(RatFunc(DensePoly([row.get(e, 0) for e in range(deg + 1)], QQ, var)))
        return _rp_trim(out)

    m = to_rpoly(P)
    d = len(m) - 1
    f_prime = _rp_divmod(_rp_mul([-c for c in to_rpoly(P.derivative(var))],
                                 _rp_inverse_mod(to_rpoly(P.derivative(main)), m)), m)[1]
    zero = RatFunc.const(0, QQ, var)

    def dt(v: _RPoly) -> _RPoly:
        # d/dt Σ v_i f^i = Σ v_i' f^i + (Σ i·v_i f^(i-1))·f'
        part = [c.derivative() for c in v]
        inner = [v[i] * i for i in range(1, len(v))]
        return _rp_divmod(_rp_sub(part, [-c for c in _rp_mul(inner, f_prime)]), m)[1]

    def dense(v: _RPoly) -> List[RatFunc]:
        return [v[i] if i < len(v) else zero for i in range(d)]

    current = _rp_divmod([zero, zero + 1], m)[1]
    chain = [dense(current)]
    for k in range(1, d + 2):
        current = dt(current)
        chain.append(dense(current))
        relation = _rational_kernel_vector(chain)
        if relation is not None:
            L = OreOperator(relation, QQ, var).primitive()
            logger.info(f"代数方程转微分方程：阶 {L.order}，系数次数 {L.degree()}")
            return L
    raise OperatorError("未找到线性相关（不应发生）")


def _rational_kernel_vector(columns: List[List[RatFunc]]) -> Optional[List[RatFunc]]:
    """列向量组若线性相关，返回以最后一列系数为 1 的相关系数"""
    k = len(columns)
    rows = len(columns[0])
    zero = columns[0][0] * 0
    # 增广矩阵：行 = 坐标，列 = 向量
    mat = [[columns[j][i] for j in range(k)] for i in range(rows)]
    pivots = []
    r = 0
    for c in range(k):
        pivot = next((i for i in range(r, rows) if not mat[i][c].is_zero()), None)
        if pivot is None:
            continue
        mat[r], mat[pivot] = mat[pivot], mat[r]
        inv = (zero + 1) / mat[r][c]
        mat[r] = [v * inv for v in mat[r]]
        for i in range(rows):
            if i != r and not mat[i][c].is_zero():
                f = mat[i][c]
                mat[i] = [a - f * b for a, b in zip(mat[i], mat[r])]
        pivots.append(c)
        r += 1
    if len(pivots) == k:
        return None
    free = next(c for c in range(k) if c not in pivots)
    if free != k - 1:
        # 更短的相关已在之前的步骤中出现
        return None
    sol = [zero] * k
    sol[free] = zero + 1
    for row, c in enumerate(pivots):
        sol[c] = -mat[row][free]
    return sol
