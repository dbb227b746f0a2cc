#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
截断级数模块
t 的幂级数，系数为 x 的 Laurent 多项式（有理数或素数域）。
提供乘法、求逆、代换、Newton 求根、核根 Y/X、不动点求解与参数化验证。
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from math import lcm
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
import sympy

from exactarith import (QQ, DensePoly, MultiPoly, PrimeField, Ring, WalkProveError,
                        ArithmeticDomainError, convolve_mod, crt_arrays, ntt_prime_pool,
                        parse_poly, same_ring, symmetric_lift, sort_gens)

logger = logging.getLogger(__name__)

# 超过这个规模的有理数乘法改走多模数路线
_DIRECT_RATIONAL_LIMIT = 200_000


class SeriesError(WalkProveError):
    """非法代换、根非单根、精度不足等"""


def _as_fraction_array(values: np.ndarray) -> np.ndarray:
    out = np.empty(values.shape, dtype=object)
    flat_in, flat_out = values.reshape(-1), out.reshape(-1)
    for i, v in enumerate(flat_in.tolist()):
        flat_out[i] = QQ(v)
    return out


def _integer_scaled(data: np.ndarray) -> Tuple[np.ndarray, int]:
    den = reduce(lcm, (Fraction(v).denominator for v in data.flat), 1)
    scaled = np.empty(data.shape, dtype=object)
    flat = scaled.reshape(-1)
    for i, v in enumerate(data.flat):
        flat[i] = int(Fraction(v) * den)
    return scaled, den


def _kronecker_mul_mod(a: np.ndarray, b: np.ndarray, order: int, p: int) -> np.ndarray:
    na, wa = a.shape
    nb, wb = b.shape
    width = wa + wb - 1
    fa = np.zeros((na, width), dtype=np.int64)
    fb = np.zeros((nb, width), dtype=np.int64)
    fa[:, :wa] = a
    fb[:, :wb] = b
    c = convolve_mod(fa.reshape(-1), fb.reshape(-1), p)
    out = np.zeros(order * width, dtype=np.int64)
    take = min(len(c), order * width)
    out[:take] = c[:take]
    return out.reshape(order, width)


def _mul_rational(a: np.ndarray, b: np.ndarray, order: int) -> np.ndarray:
    ia, da = _integer_scaled(a)
    ib, db = _integer_scaled(b)
    na, wa = ia.shape
    nb, wb = ib.shape
    width = wa + wb - 1
    if na * wa * nb * wb <= _DIRECT_RATIONAL_LIMIT:
        out = np.zeros((order, width), dtype=object)
        for i in range(min(na, order)):
            rows = min(nb, order - i)
            for k in np.flatnonzero(ia[i] != 0):
                out[i:i + rows, k:k + wb] += ia[i, k] * ib[:rows]
    else:
        max_a = max(abs(v) for v in ia.flat)
        max_b = max(abs(v) for v in ib.flat)
        bound = 2 * max_a * max_b * min(na * wa, nb * wb) + 1
        images, used, modulus = [], [], 1
        for p in ntt_prime_pool():
            ra = np.array([v % p for v in ia.flat], dtype=np.int64).reshape(ia.shape)
            rb = np.array([v % p for v in ib.flat], dtype=np.int64).reshape(ib.shape)
            images.append(_kronecker_mul_mod(ra, rb, order, p))
            used.append(p)
            modulus *= p
            if modulus > bound:
                break
        else:
            raise ArithmeticDomainError("素数池不足以完成有理数级数乘法")
        combined, modulus = crt_arrays(images, used)
        out = symmetric_lift(combined, modulus)
    scale = da * db
    result = np.empty(out.shape, dtype=object)
    flat = result.reshape(-1)
    for i, v in enumerate(out.flat):
        flat[i] = Fraction(int(v), scale)
    return result


@dataclass(eq=False)
class TruncSeries:
    """
    截断级数 Σ_{n<order} t^n · (Σ_k data[n, k] x^(k + xval))

    data 的行数即截断阶：t^0 … t^(order-1) 的系数已知。
    """
    ring: Ring
    data: np.ndarray
    xval: int = 0
    var: str = 'x'

    def __post_init__(self):
        data = np.asarray(self.data)
        if data.ndim == 1:
            data = data.reshape(-1, 1)
        if data.shape[1] == 0:
            data = np.zeros((data.shape[0], 1), dtype=self.ring.dtype)
        if self.ring.characteristic:
            data = data.astype(np.int64) % self.ring.p
        elif data.dtype != object:
            data = _as_fraction_array(data.astype(object))
        self.data = data

    # ---- 构造 ----

    @classmethod
    def zero(cls, ring: Ring, order: int, var: str = 'x') -> 'TruncSeries':
        return cls(ring, ring.zeros((order, 1)), 0, var)

    @classmethod
    def monomial(cls, ring: Ring, order: int, t_exp: int = 0, x_exp: int = 0, c=1,
                 var: str = 'x') -> 'TruncSeries':
        data = ring.zeros((order, 1))
        if t_exp < order:
            data[t_exp, 0] = ring(c)
        return cls(ring, data, x_exp, var)

    @classmethod
    def constant(cls, c, ring: Ring, order: int, var: str = 'x') -> 'TruncSeries':
        return cls.monomial(ring, order, 0, 0, c, var)

    @classmethod
    def from_coefficients(cls, coeffs: Sequence, ring: Ring = QQ, var: str = 'x') -> 'TruncSeries':
        """不含 x 的级数：coeffs[n] 为 t^n 的系数"""
        arr = ring.array(list(coeffs)).reshape(-1, 1)
        return cls(ring, arr, 0, var)

    @classmethod
    def from_rows(cls, rows: Sequence[Dict[int, object]], ring: Ring = QQ, var: str = 'x') -> 'TruncSeries':
        """rows[n] = {x 指数: 系数}"""
        exps = [e for row in rows for e in row]
        lo = min(exps, default=0)
        hi = max(exps, default=0)
        data = ring.zeros((len(rows), hi - lo + 1))
        for n, row in enumerate(rows):
            for e, c in row.items():
                data[n, e - lo] = ring(c)
        return cls(ring, data, lo, var)

    @classmethod
    def from_multipoly(cls, poly: MultiPoly, order: int, ring: Optional[Ring] = None,
                       t: str = 't', var: str = 'x') -> 'TruncSeries':
        """把 (t, var) 上的多项式截断成级数，其余变量不允许出现"""
        ring = ring or poly.ring
        extra = [g for g in poly.free_gens() if g not in (t, var)]
        if extra:
            raise SeriesError(f"多项式含有多余变量 {extra}")
        poly = poly.with_gens((t, var))
        hi = max((m[1] for m in poly.terms), default=0)
        data = ring.zeros((order, hi + 1))
        for (n, k), c in poly.terms.items():
            if n < order:
                data[n, k] = ring(c)
        return cls(ring, data, 0, var)

    # ---- 基本属性 ----

    @property
    def order(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]

    def _nonzero_mask(self) -> np.ndarray:
        return np.asarray(self.data != 0, dtype=bool)

    def is_zero(self) -> bool:
        return not self._nonzero_mask().any()

    def valuation(self) -> int:
        """t 赋值；在已知精度内为零时返回 order"""
        rows = np.flatnonzero(self._nonzero_mask().any(axis=1))
        return int(rows[0]) if rows.size else self.order

    def x_valuation(self) -> Optional[int]:
        cols = np.flatnonzero(self._nonzero_mask().any(axis=0))
        return int(cols[0]) + self.xval if cols.size else None

    def x_degree(self) -> Optional[int]:
        cols = np.flatnonzero(self._nonzero_mask().any(axis=0))
        return int(cols[-1]) + self.xval if cols.size else None

    def coeff(self, n: int) -> Dict[int, object]:
        """t^n 的系数 {x 指数: 系数}"""
        if n >= self.order:
            raise SeriesError(f"t^{n} 超出截断阶 {self.order}")
        row = self.data[n]
        return {int(k) + self.xval: row[k] for k in np.flatnonzero(np.asarray(row != 0, dtype=bool))}

    def coefficient_list(self) -> list:
        """不含 x 的级数的系数列表"""
        if self.width != 1 or self.xval != 0:
            s = self.normalized()
            if s.width != 1 or s.xval != 0:
                raise SeriesError("级数依赖 x，不能转成系数列表")
            return s.data[:, 0].tolist()
        return self.data[:, 0].tolist()

    def normalized(self) -> 'TruncSeries':
        cols = np.flatnonzero(self._nonzero_mask().any(axis=0))
        if cols.size == 0:
            return TruncSeries(self.ring, self.ring.zeros((self.order, 1)), 0, self.var)
        lo, hi = int(cols[0]), int(cols[-1])
        if lo == 0 and hi == self.width - 1:
            return self
        return TruncSeries(self.ring, self.data[:, lo:hi + 1].copy(), self.xval + lo, self.var)

    def truncate(self, order: int) -> 'TruncSeries':
        if order > self.order:
            raise SeriesError(f"无法把阶 {self.order} 的级数提升到 {order}")
        if order == self.order:
            return self
        return TruncSeries(self.ring, self.data[:order].copy(), self.xval, self.var)

    def padded(self, order: int) -> 'TruncSeries':
        """补零行到指定阶（仅用于迭代中待修正的高阶项）"""
        if order <= self.order:
            return self.truncate(order)
        data = self.ring.zeros((order, self.width))
        data[:self.order] = self.data
        return TruncSeries(self.ring, data, self.xval, self.var)

    def _aligned(self, other: 'TruncSeries') -> Tuple[np.ndarray, np.ndarray, int, int]:
        same_ring(self.ring, other.ring)
        order = min(self.order, other.order)
        lo = min(self.xval, other.xval)
        hi = max(self.xval + self.width, other.xval + other.width)
        a = self.ring.zeros((order, hi - lo))
        b = self.ring.zeros((order, hi - lo))
        a[:, self.xval - lo:self.xval - lo + self.width] = self.data[:order]
        b[:, other.xval - lo:other.xval - lo + other.width] = other.data[:order]
        return a, b, lo, order

    def _coerce(self, other) -> 'TruncSeries':
        if isinstance(other, TruncSeries):
            return other
        return TruncSeries.constant(other, self.ring, self.order, self.var)

    # ---- 算术 ----

    def __add__(self, other) -> 'TruncSeries':
        a, b, lo, _ = self._aligned(self._coerce(other))
        return TruncSeries(self.ring, self.ring.reduce(a + b), lo, self.var)

    __radd__ = __add__

    def __neg__(self) -> 'TruncSeries':
        return TruncSeries(self.ring, self.ring.reduce(-self.data), self.xval, self.var)

    def __sub__(self, other) -> 'TruncSeries':
        a, b, lo, _ = self._aligned(self._coerce(other))
        return TruncSeries(self.ring, self.ring.reduce(a - b), lo, self.var)

    def __rsub__(self, other) -> 'TruncSeries':
        return self._coerce(other) - self

    def scale(self, c) -> 'TruncSeries':
        c = self.ring(c)
        return TruncSeries(self.ring, self.ring.reduce(self.data * c), self.xval, self.var)

    def __mul__(self, other) -> 'TruncSeries':
        if not isinstance(other, TruncSeries):
            return self.scale(other)
        same_ring(self.ring, other.ring)
        order = min(self.order, other.order)
        a = self.truncate(order).normalized()
        b = other.truncate(order).normalized()
        if a.is_zero() or b.is_zero():
            return TruncSeries.zero(self.ring, order, self.var)
        if self.ring.characteristic:
            data = _kronecker_mul_mod(a.data, b.data, order, self.ring.p)
        else:
            data = _mul_rational(a.data, b.data, order)
        return TruncSeries(self.ring, data, a.xval + b.xval, self.var)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> 'TruncSeries':
        if k < 0:
            return self.inverse() ** (-k)
        result = TruncSeries.constant(1, self.ring, self.order, self.var)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def shift_x(self, k: int) -> 'TruncSeries':
        """乘以 x^k"""
        return TruncSeries(self.ring, self.data, self.xval + k, self.var)

    def mul_t(self, k: int) -> 'TruncSeries':
        """乘以 t^k，已知精度随之提高 k"""
        if k == 0:
            return self
        data = self.ring.zeros((self.order + k, self.width))
        data[k:] = self.data
        return TruncSeries(self.ring, data, self.xval, self.var)

    def div_t(self, k: int) -> 'TruncSeries':
        """精确除以 t^k，前 k 行必须为零"""
        if k == 0:
            return self
        if k > self.order or self._nonzero_mask()[:k].any():
            raise SeriesError(f"级数不能被 t^{k} 整除")
        return TruncSeries(self.ring, self.data[k:].copy(), self.xval, self.var)

    def project_nonnegative(self) -> 'TruncSeries':
        """去掉 x 的负幂项"""
        if self.xval >= 0:
            return self
        cut = -self.xval
        if cut >= self.width:
            return TruncSeries.zero(self.ring, self.order, self.var)
        return TruncSeries(self.ring, self.data[:, cut:].copy(), 0, self.var)

    def inverse(self) -> 'TruncSeries':
        """乘法逆；t^0 系数必须是 x 的单项式"""
        s = self.normalized()
        head = s.coeff(0)
        if len(head) != 1:
            raise SeriesError(f"t^0 系数不是 x 的单项式 ({len(head)} 项)，无法在 Laurent 多项式中求逆")
        (e, c), = head.items()
        g = TruncSeries.monomial(self.ring, 1, 0, -e, self.ring.inv(c), self.var)
        m = 1
        while m < self.order:
            m2 = min(2 * m, self.order)
            a = s.truncate(m2)
            g = g.padded(m2)
            g = g * (2 - a * g)
            m = m2
        return g

    def exact_div_poly(self, poly: DensePoly) -> 'TruncSeries':
        """每个系数精确除以 x 的多项式"""
        rows = []
        for n in range(self.order):
            row = DensePoly(self.data[n], self.ring, self.var)
            q, r = row.divmod(poly)
            if not r.is_zero():
                raise SeriesError(f"t^{n} 系数不能被 {poly} 整除")
            rows.append({k + self.xval: c for k, c in enumerate(q.coeffs.tolist()) if c})
        out = TruncSeries.from_rows(rows, self.ring, self.var)
        return out

    def evaluate_x(self, value) -> 'TruncSeries':
        """x -> value，得到不含 x 的级数"""
        ring = self.ring
        value = ring(value)
        if self.xval < 0 and not value:
            raise SeriesError("含负幂的级数不能在 x = 0 处取值")
        powers = []
        for k in range(self.width):
            e = k + self.xval
            if ring.characteristic:
                powers.append(pow(int(value), e, ring.p) if e >= 0 else pow(ring.inv(value), -e, ring.p))
            else:
                powers.append(value ** e)
        if ring.characteristic:
            vec = np.array(powers, dtype=np.int64)
            col = (self.data * vec[None, :] % ring.p).sum(axis=1) % ring.p
        else:
            vec = np.array(powers, dtype=object)
            col = (self.data * vec[None, :]).sum(axis=1)
        return TruncSeries(ring, np.asarray(col).reshape(-1, 1), 0, self.var)

    def derivative(self) -> 'TruncSeries':
        """d/dt，阶降低 1"""
        if self.order <= 1:
            return TruncSeries.zero(self.ring, 0, self.var)
        n = np.arange(1, self.order)
        if self.ring.characteristic:
            data = self.data[1:] * (n % self.ring.p)[:, None] % self.ring.p
        else:
            data = self.data[1:] * n.astype(object)[:, None]
        return TruncSeries(self.ring, data, self.xval, self.var)

    def reduce_mod(self, p: int) -> 'TruncSeries':
        ring = PrimeField(p)
        data = np.array([ring(v) for v in self.data.flat], dtype=np.int64).reshape(self.data.shape)
        return TruncSeries(ring, data, self.xval, self.var)

    def rename(self, var: str) -> 'TruncSeries':
        return TruncSeries(self.ring, self.data, self.xval, var)

    def first_difference(self, other: 'TruncSeries') -> Optional[int]:
        """第一个不相等的 t 幂次；在公共精度内相等时返回 None"""
        diff = self - other
        v = diff.valuation()
        return None if v >= diff.order else v

    def to_multipoly(self, t: str = 't') -> MultiPoly:
        if self.x_valuation() is not None and self.x_valuation() < 0:
            raise SeriesError("含 x 负幂的级数不能转成多项式")
        terms = {}
        for n in range(self.order):
            for e, c in self.coeff(n).items():
                terms[(n, e)] = c
        return MultiPoly((t, self.var), terms, self.ring).with_gens(sort_gens((t, self.var)))

    def __repr__(self) -> str:
        shown = []
        for n in range(min(self.order, 4)):
            row = self.coeff(n)
            if row:
                shown.append(f"t^{n}:{dict(sorted(row.items()))}")
        return f"TruncSeries({self.ring}, order={self.order}, {'; '.join(shown)} ...)"


def poly_to_series(poly: MultiPoly, order: int, ring: Optional[Ring] = None, var: str = 'x',
                   t: str = 't') -> TruncSeries:
    return TruncSeries.from_multipoly(poly, order, ring, t=t, var=var)


def _coefficient_series(P: MultiPoly, main: str, order: int, ring: Ring, var: str) -> Dict[int, TruncSeries]:
    coeffs = P.coefficients_in(main)
    return {k: TruncSeries.from_multipoly(c, order, ring, var=var) for k, c in coeffs.items()}


def _horner_with_derivative(coeffs: Dict[int, TruncSeries], f: TruncSeries,
                            order: int) -> Tuple[TruncSeries, TruncSeries]:
    ring, var = f.ring, f.var
    d = max(coeffs)
    value = coeffs[d].truncate(order)
    deriv = TruncSeries.zero(ring, order, var)
    f = f.truncate(order)
    for k in range(d - 1, -1, -1):
        deriv = deriv * f + value
        value = value * f
        if k in coeffs:
            value = value + coeffs[k].truncate(order)
    return value, deriv


def poly_eval(P: MultiPoly, f: TruncSeries, order: Optional[int] = None, main: str = 'T') -> TruncSeries:
    """计算 P(f, t, x)，截断到 order"""
    order = order or f.order
    coeffs = _coefficient_series(P, main, order, f.ring, f.var)
    if not coeffs:
        return TruncSeries.zero(f.ring, order, f.var)
    value, _ = _horner_with_derivative(coeffs, f, order)
    return value


# ---------------------------------------------------------------------------
# Newton 求根
# ---------------------------------------------------------------------------

@dataclass
class AlgebraicSeriesSpec:
    """代数级数：多项式 P(T, t, x) 与确定分支的种子（t 的前若干项）"""
    poly: MultiPoly
    seed: Union[TruncSeries, int, Fraction] = 0
    main: str = 'T'
    var: str = 'x'
    ring: Optional[Ring] = None

    def seed_series(self) -> TruncSeries:
        ring = self.ring or self.poly.ring
        if isinstance(self.seed, TruncSeries):
            return self.seed
        return TruncSeries.constant(self.seed, ring, 1, self.var)


def newton_lift(spec: AlgebraicSeriesSpec, N: int) -> TruncSeries:
    """
    Newton 迭代求代数级数根，精度每步近似翻倍

    种子处 ∂P/∂T 的 t 赋值 v 可以为正（此时种子至少要给出 v+1 项），
    其最低次系数必须是 x 的单项式。

    Args:
        spec: 多项式与种子
        N: 目标截断阶

    Returns:
        阶为 N 的级数根

    Raises:
        SeriesError: ∂P/∂T 在种子处为零、种子不是根的前缀
    """
    ring = spec.ring or spec.poly.ring
    seed = spec.seed_series()
    k0 = seed.order
    deg = spec.poly.degree(spec.main)
    if deg <= 0:
        raise SeriesError(f"多项式关于 {spec.main} 的次数必须为正")
    coeffs = _coefficient_series(spec.poly, spec.main, max(N, k0) * 2 + 2, ring, spec.var)

    value, deriv = _horner_with_derivative(coeffs, seed, k0)
    v = deriv.valuation()
    if v >= k0:
        raise SeriesError("∂P/∂T 在种子处为零：请提供更多种子项、参数化或先做约化")
    check_order = k0 + v
    value, _ = _horner_with_derivative(coeffs, seed.padded(check_order), check_order)
    if value.valuation() < check_order:
        raise SeriesError(f"种子不是根的前缀（t^{value.valuation()} 处残差非零）")

    f, m = seed, k0
    while m < N:
        target = min(2 * m - v, N)
        prec = target + v
        fp = f.padded(prec)
        q, d = _horner_with_derivative(coeffs, fp, prec)
        delta = q.div_t(v) * d.div_t(v).inverse()
        f = fp.truncate(target) - delta.truncate(target)
        m = target
        logger.debug(f"Newton 提升到阶 {m}")
    return f.truncate(N) if f.order > N else f


# ---------------------------------------------------------------------------
# 核根
# ---------------------------------------------------------------------------

def kernel_polynomial(steps, root: str = 'y') -> MultiPoly:
    """
    核多项式 t·Σ x^(1+dx) y^(1+dy) − x·y，把 root 指定的变量换成 T

    Args:
        steps: 带 steps 属性（(dx, dy) 集合）的步集
        root: 'y' 得到 Y(t,x) 的方程，'x' 得到 X(t,y) 的方程
    """
    other = 'x' if root == 'y' else 'y'
    gens = ('T', 't', other)
    terms: Dict[Tuple[int, int, int], int] = {}
    for dx, dy in steps.steps:
        e_root, e_other = (1 + dy, 1 + dx) if root == 'y' else (1 + dx, 1 + dy)
        key = (e_root, 1, e_other)
        terms[key] = terms.get(key, 0) + 1
    key = (1, 0, 1)
    terms[key] = terms.get(key, 0) - 1
    return MultiPoly(gens, terms, QQ)


def kernel_root_Y(steps, N: int, ring: Ring = QQ) -> TruncSeries:
    """核方程关于 y 的正赋值根 Y(t, x)"""
    spec = AlgebraicSeriesSpec(kernel_polynomial(steps, 'y'), TruncSeries.zero(ring, 1, 'x'),
                               var='x', ring=ring)
    return newton_lift(spec, N)


def kernel_root_X(steps, N: int, ring: Ring = QQ) -> TruncSeries:
    """核方程关于 x 的正赋值根 X(t, y)"""
    spec = AlgebraicSeriesSpec(kernel_polynomial(steps, 'x'), TruncSeries.zero(ring, 1, 'y'),
                               var='y', ring=ring)
    return newton_lift(spec, N)


# ---------------------------------------------------------------------------
# 代换
# ---------------------------------------------------------------------------

def compose(outer: TruncSeries, inner: TruncSeries, N: Optional[int] = None) -> TruncSeries:
    """
    x -> inner 代换（inner 的 t 赋值必须为正）

    outer 含 x 的负幂 x^(-m) 时，需要 inner^(-m)，结果须再除以 t^(v·m)，
    因此输入精度至少为 N + v·(m+1)，不足时报错并给出所需精度。

    Args:
        outer: 关于 (t, x) 的级数
        inner: 代入 x 的级数，变量名决定结果的变量
        N: 目标截断阶，缺省为两者精度的较小值

    Returns:
        outer(t, inner(t, ·)) 截断到 N
    """
    same_ring(outer.ring, inner.ring)
    ring = outer.ring
    v = inner.valuation()
    if v == 0:
        raise SeriesError("内层级数的 t 赋值为 0，代换不合法")
    available = min(outer.order, inner.order)
    N = available if N is None else N
    outer = outer.normalized()
    m = max(0, -outer.xval)
    need = N + v * m
    if m:
        need_inner = N + v * (m + 1)
        if outer.order < need or inner.order < need_inner:
            raise SeriesError(f"外层级数含 x^-{m}，代换到阶 {N} 需要输入精度 N={need_inner}")
    elif N > available:
        raise SeriesError(f"代换到阶 {N} 需要输入精度 N={N}")
    if v >= need:
        return outer.evaluate_x(0).truncate(N).rename(inner.var) if m == 0 else \
            TruncSeries.zero(ring, N, inner.var)

    shifted = outer.truncate(need).shift_x(m)  # 非负指数部分
    w = inner.div_t(v)
    acc: Optional[TruncSeries] = None
    for k in range(shifted.xval + shifted.width - 1, -1, -1):
        prec = need - k * v
        col_idx = k - shifted.xval
        if prec <= 0:
            continue
        if 0 <= col_idx < shifted.width:
            col = TruncSeries(ring, shifted.data[:prec, col_idx:col_idx + 1].copy(), 0, inner.var)
        else:
            col = TruncSeries.zero(ring, prec, inner.var)
        if acc is None:
            if col.is_zero():
                continue
            acc = col
        else:
            acc = (acc * w.truncate(prec - v)).mul_t(v).truncate(prec) + col
    if acc is None:
        return TruncSeries.zero(ring, N, inner.var)
    if m:
        acc = (acc * (w.inverse() ** m)).div_t(v * m)
    return acc.truncate(N)


def fixed_point_solve(A: TruncSeries, B: TruncSeries, Y: TruncSeries, N: int,
                      start: Optional[TruncSeries] = None) -> TruncSeries:
    """
    求 U = A + B·U(t, Y) 在 Q[[x, t]] 中的唯一解

    每步投影掉 x 的负幂；ord_t B > 0 保证每步至少多确定一阶。
    """
    if B.valuation() == 0 or Y.valuation() == 0:
        raise SeriesError("不动点迭代要求 ord_t B > 0 且 ord_t Y > 0")
    U = start.truncate(1) if start is not None else TruncSeries.zero(A.ring, 1, A.var)
    for prec in range(1, N + 1):
        comp = compose(U.padded(prec), Y.truncate(prec), prec).rename(A.var)
        U = (A.truncate(prec) + B.truncate(prec) * comp).project_nonnegative()
    return U


def fixed_point_solve_pair(A1: TruncSeries, B1: TruncSeries, Y1: TruncSeries,
                           A2: TruncSeries, B2: TruncSeries, Y2: TruncSeries, N: int
                           ) -> Tuple[TruncSeries, TruncSeries]:
    """联立不动点：U1 = A1 + B1·U2(t, Y1)，U2 = A2 + B2·U1(t, Y2)"""
    for name, s in (('B1', B1), ('B2', B2), ('Y1', Y1), ('Y2', Y2)):
        if s.valuation() == 0:
            raise SeriesError(f"不动点迭代要求 ord_t {name} > 0")
    U1 = TruncSeries.zero(A1.ring, 1, A1.var)
    U2 = TruncSeries.zero(A2.ring, 1, A2.var)
    for prec in range(1, N + 1):
        c1 = compose(U2.padded(prec), Y1.truncate(prec), prec).rename(A1.var)
        c2 = compose(U1.padded(prec), Y2.truncate(prec), prec).rename(A2.var)
        U1, U2 = ((A1.truncate(prec) + B1.truncate(prec) * c1).project_nonnegative(),
                  (A2.truncate(prec) + B2.truncate(prec) * c2).project_nonnegative())
    return U1, U2


# ---------------------------------------------------------------------------
# 参数化
# ---------------------------------------------------------------------------

RationalExpr = Tuple[MultiPoly, MultiPoly]


def parse_rational(text: str, gens: Sequence[str] = ('U', 'x'),
                   substitutions: Optional[Dict[str, str]] = None) -> RationalExpr:
    """解析有理式为 (分子, 分母)，substitutions 中的符号先被替换"""
    expr = sympy.sympify(text.replace('^', '**'))
    for name, value in (substitutions or {}).items():
        expr = expr.subs(sympy.Symbol(name), sympy.sympify(value.replace('^', '**')))
    num, den = sympy.fraction(sympy.together(expr))
    return (parse_poly(str(sympy.expand(num)), gens), parse_poly(str(sympy.expand(den)), gens))


def _as_rational(value, gens: Sequence[str], h: Optional[str]) -> RationalExpr:
    if isinstance(value, tuple):
        return value
    if isinstance(value, MultiPoly):
        return value, MultiPoly.const(1, value.gens)
    return parse_rational(value, gens, {'h': h} if h else None)


def _integer_terms(poly: MultiPoly, gens: Sequence[str]) -> Tuple[List[Tuple[Tuple[int, ...], int]], int]:
    poly = poly.with_gens(sort_gens(tuple(gens) + poly.gens))
    den = reduce(lcm, (Fraction(c).denominator for c in poly.terms.values()), 1)
    idx = [poly.gens.index(g) for g in gens]
    terms = [(tuple(m[i] for i in idx), int(Fraction(c) * den)) for m, c in poly.terms.items()]
    return terms, den


def _eval_terms(terms, point: Sequence[int]) -> int:
    total = 0
    for exps, c in terms:
        v = c
        for base, e in zip(point, exps):
            if e:
                v *= base ** e
        total += v
    return total


def verify_parameterization(R1, R2, h: Optional[str], P: MultiPoly,
                            gens: Sequence[str] = ('U', 'x')) -> bool:
    """
    精确验证 P(R2(U,x), R1(U,x), x) = 0

    清分母后的分子是 (U, x) 的多项式；在大于其次数界的整数网格上逐点精确求值，
    全部为零即恒为零。

    Args:
        R1, R2: 有理式文本（可含符号 h）或 (分子, 分母)
        h: h 的多项式文本
        P: 关于 (T, t, x) 的多项式
    """
    n1, d1 = _as_rational(R1, gens, h)
    n2, d2 = _as_rational(R2, gens, h)
    u_name, x_name = gens
    P = P.with_gens(sort_gens(('T', 't', x_name) + P.gens))
    dT, dt = max(P.degree('T'), 0), max(P.degree('t'), 0)

    def degs(poly: MultiPoly) -> Tuple[int, int]:
        return max(poly.degree(u_name), 0), max(poly.degree(x_name), 0)

    bound_u = dT * max(degs(n2)[0], degs(d2)[0]) + dt * max(degs(n1)[0], degs(d1)[0])
    bound_x = dT * max(degs(n2)[1], degs(d2)[1]) + dt * max(degs(n1)[1], degs(d1)[1]) + max(P.degree(x_name), 0)
    polys = [_integer_terms(q, gens)[0] for q in (n1, d1, n2, d2)]
    p_terms, _ = _integer_terms(P, ('T', 't', x_name))
    logger.info(f"参数化验证网格 {bound_u + 1} × {bound_x + 1}")
    for u in range(1, bound_u + 2):
        for x in range(1, bound_x + 2):
            a1, b1, a2, b2 = (_eval_terms(q, (u, x)) for q in polys)
            pw = {
                'n2': [a2 ** k for k in range(dT + 1)], 'd2': [b2 ** k for k in range(dT + 1)],
                'n1': [a1 ** k for k in range(dt + 1)], 'd1': [b1 ** k for k in range(dt + 1)],
            }
            total = 0
            for (eT, et, ex), c in p_terms:
                total += c * pw['n2'][eT] * pw['d2'][dT - eT] * pw['n1'][et] * pw['d1'][dt - et] * x ** ex
            if total:
                logger.debug(f"参数化在 (U={u}, x={x}) 处不为零")
                return False
    return True


def _poly_in_series(poly: MultiPoly, main: str, s: TruncSeries) -> TruncSeries:
    coeffs = _coefficient_series(poly, main, s.order, s.ring, s.var)
    if not coeffs:
        return TruncSeries.zero(s.ring, s.order, s.var)
    value, _ = _horner_with_derivative(coeffs, s, s.order)
    return value


def parameter_series(R1, N: int, h: Optional[str] = None, ring: Ring = QQ,
                     gens: Sequence[str] = ('U', 'x')) -> TruncSeries:
    """由 R1(U, x) = t 求 U0(t, x)，U0(0) = 0"""
    n1, d1 = _as_rational(R1, gens, h)
    u_name, x_name = gens
    # n1(T, x) - t·d1(T, x)
    rel = n1.rename({u_name: 'T'}) - MultiPoly.var('t') * d1.rename({u_name: 'T'})
    spec = AlgebraicSeriesSpec(rel, TruncSeries.zero(ring, 1, x_name), var=x_name, ring=ring)
    return newton_lift(spec, N)


def series_from_parameterization(R1, R2, N: int, h: Optional[str] = None, ring: Ring = QQ,
                                 gens: Sequence[str] = ('U', 'x')) -> TruncSeries:
    """由参数化 (R1, R2) 给出级数 R2(U0(t,x), x)"""
    U0 = parameter_series(R1, N, h, ring, gens)
    n2, d2 = _as_rational(R2, gens, h)
    num = _poly_in_series(n2, gens[0], U0)
    den = _poly_in_series(d2, gens[0], U0)
    return num * den.inverse()
