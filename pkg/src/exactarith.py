#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
精确算术基础模块
功能：素数域与有理数域、稠密一元多项式（NTT 快速乘法）、中国剩余定理、
有理数重构、有理函数插值、稀疏多元多项式、结式（模素数求值插值）与整除判定
"""

import logging
import os
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache, reduce
from math import gcd, isqrt, lcm
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import heapq
import numpy as np
import sympy
from sympy.ntheory import isprime, primitive_root

logger = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# 异常
# ---------------------------------------------------------------------------

class WalkProveError(Exception):
    """所有本工具异常的基类"""


class ArithmeticDomainError(WalkProveError):
    """环不匹配、模数不互素、结式变量次数为零等"""


class ReconstructionError(WalkProveError):
    """有理数重构或有理函数插值失败（需要更多素数或插值点）"""


class BudgetExceeded(WalkProveError):
    """计算规模超出预算"""


# ---------------------------------------------------------------------------
# 系数环
# ---------------------------------------------------------------------------

class RationalField:
    """有理数域 QQ，元素为 Fraction，数组使用 object dtype"""

    characteristic = 0
    dtype = object

    def __call__(self, value) -> Fraction:
        if isinstance(value, Fraction):
            return value
        if isinstance(value, (int, np.integer)):
            return Fraction(int(value))
        if hasattr(value, 'p') and hasattr(value, 'q'):  # sympy Rational
            return Fraction(int(value.p), int(value.q))
        return Fraction(value)

    def array(self, values) -> np.ndarray:
        values = list(values)
        arr = np.empty(len(values), dtype=object)
        for i, v in enumerate(values):
            arr[i] = self(v)
        return arr

    def zeros(self, shape) -> np.ndarray:
        return np.full(shape, Fraction(0), dtype=object)

    def reduce(self, arr: np.ndarray) -> np.ndarray:
        return arr

    def inv(self, value) -> Fraction:
        value = self(value)
        if value == 0:
            raise ArithmeticDomainError("有理数域中零不可逆")
        return 1 / value

    def convolve(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return _convolve_rational(a, b)

    def lift(self, value) -> Fraction:
        return self(value)

    def __eq__(self, other) -> bool:
        return isinstance(other, RationalField)

    def __hash__(self) -> int:
        return hash('QQ')

    def __repr__(self) -> str:
        return 'QQ'


QQ = RationalField()


class PrimeField:
    """素数域 GF(p)，p < 2^31 使得两个元素之积不溢出 int64"""

    dtype = np.int64

    def __init__(self, p: int):
        p = int(p)
        if p < 2 or p >= 2 ** 31 or not isprime(p):
            raise ArithmeticDomainError(f"模数必须是小于 2^31 的素数: {p}")
        self.p = p

    @property
    def characteristic(self) -> int:
        return self.p

    def __call__(self, value) -> int:
        if isinstance(value, Fraction):
            num, den = value.numerator, value.denominator
        elif isinstance(value, (int, np.integer)):
            return int(value) % self.p
        elif hasattr(value, 'p') and hasattr(value, 'q'):  # sympy Rational
            num, den = int(value.p), int(value.q)
        else:
            return int(value) % self.p
        if den % self.p == 0:
            raise ArithmeticDomainError(f"分母 {den} 在 GF({self.p}) 中为零")
        return num * pow(den, -1, self.p) % self.p

    def array(self, values) -> np.ndarray:
        return np.array([self(v) for v in values], dtype=np.int64).reshape(-1)

    def zeros(self, shape) -> np.ndarray:
        return np.zeros(shape, dtype=np.int64)

    def reduce(self, arr: np.ndarray) -> np.ndarray:
        return arr % self.p

    def inv(self, value) -> int:
        value = int(value) % self.p
        if value == 0:
            raise ArithmeticDomainError(f"GF({self.p}) 中零不可逆")
        return pow(value, self.p - 2, self.p)

    def inv_array(self, arr: np.ndarray) -> np.ndarray:
        return inv_mod_array(arr, self.p)

    def convolve(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return convolve_mod(a, b, self.p)

    def lift(self, value) -> int:
        """对称代表元"""
        value = int(value) % self.p
        return value - self.p if value > self.p // 2 else value

    def __eq__(self, other) -> bool:
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self) -> int:
        return hash(('GF', self.p))

    def __repr__(self) -> str:
        return f'GF({self.p})'


Ring = Union[RationalField, PrimeField]


def same_ring(*rings: Ring) -> Ring:
    first = rings[0]
    for r in rings[1:]:
        if r != first:
            raise ArithmeticDomainError(f"系数环不一致: {first} 与 {r}")
    return first


# ---------------------------------------------------------------------------
# 素数池
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def ntt_prime_pool(bits: int = 31, min_two_adicity: int = 23, size: int = 64) -> Tuple[int, ...]:
    """
    生成 NTT 友好素数池 p = c·2^k + 1，按从大到小排列

    Args:
        bits: 素数位数上限（p < 2^bits）
        min_two_adicity: p-1 中 2 的最小幂次
        size: 池大小

    Returns:
        素数元组
    """
    upper = 2 ** bits
    lower = 2 ** (bits - 2)
    found: List[int] = []
    # 先取 2-adic 阶足够高的素数，不够时放宽到 2^20（卷积长度仍远超所需）
    for k in (min_two_adicity, min(min_two_adicity, 20)):
        c = (upper - 1) >> k
        while c > 0 and len(found) < size:
            p = c * (1 << k) + 1
            if lower < p < upper and p not in found and isprime(p):
                found.append(p)
            c -= 1
    found.sort(reverse=True)
    return tuple(found)


def load_primes(path: Optional[str] = None, count: Optional[int] = None, bits: int = 31) -> List[int]:
    """
    读取素数列表；环境变量 WALKPROVE_PRIMES 覆盖文件路径，无文件时使用 NTT 素数池

    Args:
        path: 每行一个素数的文本文件
        count: 需要的素数个数
        bits: 素数池位数
    """
    path = os.environ.get('WALKPROVE_PRIMES') or path
    if path:
        file_path = Path(path)
        if not file_path.exists():
            raise ArithmeticDomainError(f"素数文件不存在: {file_path}")
        primes = []
        for line in file_path.read_text(encoding='utf-8').splitlines():
            line = line.split('#')[0].strip()
            if line:
                p = int(line)
                if not isprime(p) or p >= 2 ** 31:
                    raise ArithmeticDomainError(f"素数文件中存在非法模数: {p}")
                primes.append(p)
        logger.info(f"从 {file_path} 读取 {len(primes)} 个素数")
    else:
        primes = list(ntt_prime_pool(bits))
    if count is not None:
        if count > len(primes):
            raise ArithmeticDomainError(f"素数不足: 需要 {count}, 仅有 {len(primes)}")
        primes = primes[:count]
    return primes


# ---------------------------------------------------------------------------
# 模运算向量工具
# ---------------------------------------------------------------------------

def inv_mod_array(arr: np.ndarray, p: int) -> np.ndarray:
    """费马小定理逐元素求逆（零映射为零）"""
    base = np.asarray(arr, dtype=np.int64) % p
    result = np.ones_like(base)
    e = p - 2
    while e:
        if e & 1:
            result = result * base % p
        base = base * base % p
        e >>= 1
    return result


def _powers_mod(w: int, m: int, p: int) -> np.ndarray:
    out = np.ones(m, dtype=np.int64)
    filled, wf = 1, w % p
    while filled < m:
        take = min(filled, m - filled)
        out[filled:filled + take] = out[:take] * wf % p
        filled += take
        wf = wf * wf % p
    return out


@lru_cache(maxsize=64)
def _bit_reverse(n: int) -> np.ndarray:
    logn = n.bit_length() - 1
    idx = np.arange(n)
    rev = np.zeros(n, dtype=np.int64)
    for bit in range(logn):
        rev |= ((idx >> bit) & 1) << (logn - 1 - bit)
    return rev


@lru_cache(maxsize=None)
def _ntt_root(p: int) -> Tuple[int, int]:
    two_adicity = ((p - 1) & -(p - 1)).bit_length() - 1
    return int(primitive_root(p)), two_adicity


def _ntt(a: np.ndarray, p: int, invert: bool = False) -> np.ndarray:
    n = a.shape[0]
    g, _ = _ntt_root(p)
    a = a[_bit_reverse(n)].copy()
    length = 2
    while length <= n:
        half = length // 2
        w = pow(g, (p - 1) // length, p)
        if invert:
            w = pow(w, p - 2, p)
        ws = _powers_mod(w, half, p)
        blocks = a.reshape(-1, length)
        u = blocks[:, :half].copy()
        v = blocks[:, half:] * ws % p
        blocks[:, :half] = (u + v) % p
        blocks[:, half:] = (u - v) % p
        length <<= 1
    if invert:
        a = a * pow(n, p - 2, p) % p
    return a


def _schoolbook_mod(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    if len(a) > len(b):
        a, b = b, a
    out = np.zeros(len(a) + len(b) - 1, dtype=np.int64)
    for i, ai in enumerate(a.tolist()):
        if ai:
            out[i:i + len(b)] = (out[i:i + len(b)] + ai * b) % p
    return out


def convolve_mod(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    """
    模 p 卷积：小模数直接 np.convolve，短向量用逐行累加，
    NTT 友好素数用数论变换，其余素数拆成 16 位分量

    Args:
        a, b: 取值于 [0, p) 的 int64 数组
        p: 素数

    Returns:
        长度 len(a)+len(b)-1 的卷积
    """
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    if a.size == 0 or b.size == 0:
        return np.zeros(0, dtype=np.int64)
    n = a.size + b.size - 1
    if min(a.size, b.size) * (p - 1) ** 2 < 2 ** 62:
        return np.convolve(a, b) % p
    if min(a.size, b.size) <= 32:
        return _schoolbook_mod(a, b, p)
    size = 1 << (n - 1).bit_length()
    _, two_adicity = _ntt_root(p)
    if size <= (1 << two_adicity):
        fa = np.zeros(size, dtype=np.int64)
        fb = np.zeros(size, dtype=np.int64)
        fa[:a.size] = a
        fb[:b.size] = b
        fc = _ntt(fa, p) * _ntt(fb, p) % p
        return _ntt(fc, p, invert=True)[:n]
    # 16 位拆分，每段乘积 < 2^32，累加长度受限于 2^31
    mask = (1 << 16) - 1
    a0, a1 = a & mask, a >> 16
    b0, b1 = b & mask, b >> 16
    low = np.convolve(a0, b0) % p
    mid = (np.convolve(a0, b1) % p + np.convolve(a1, b0) % p) % p
    high = np.convolve(a1, b1) % p
    shift = (1 << 16) % p
    return (low + mid * shift % p + high * (shift * shift % p) % p) % p


def _convolve_rational(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if len(a) == 0 or len(b) == 0:
        return np.zeros(0, dtype=object)
    da = reduce(lcm, (Fraction(v).denominator for v in a), 1)
    db = reduce(lcm, (Fraction(v).denominator for v in b), 1)
    ia = np.array([int(Fraction(v) * da) for v in a], dtype=object)
    ib = np.array([int(Fraction(v) * db) for v in b], dtype=object)
    if len(ia) > len(ib):
        ia, ib = ib, ia
    out = np.zeros(len(ia) + len(ib) - 1, dtype=object)
    for i, ai in enumerate(ia):
        if ai:
            out[i:i + len(ib)] += ai * ib
    scale = da * db
    result = np.empty(len(out), dtype=object)
    for i, v in enumerate(out):
        result[i] = Fraction(int(v), scale)
    return result


def matrix_inverse_mod(mat: np.ndarray, p: int) -> np.ndarray:
    """模 p 方阵求逆（Gauss-Jordan）"""
    n = mat.shape[0]
    a = np.concatenate([np.asarray(mat, dtype=np.int64) % p, np.eye(n, dtype=np.int64)], axis=1)
    for c in range(n):
        nz = np.flatnonzero(a[c:, c])
        if nz.size == 0:
            raise ArithmeticDomainError("矩阵模 p 奇异")
        piv = c + nz[0]
        if piv != c:
            a[[c, piv]] = a[[piv, c]]
        a[c] = a[c] * pow(int(a[c, c]), p - 2, p) % p
        col = a[:, c].copy()
        col[c] = 0
        rows = np.flatnonzero(col)
        if rows.size:
            a[rows] = (a[rows] - col[rows, None] * a[c][None, :] % p) % p
    return a[:, n:]


def nullspace_mod(mat: np.ndarray, p: int) -> np.ndarray:
    """
    模 p 零空间基（简化行阶梯形）

    Returns:
        形状 (k, cols) 的数组，每行一个基向量
    """
    a = np.array(mat, dtype=np.int64) % p
    rows, cols = a.shape
    pivots: List[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(a[r:, c])
        if nz.size == 0:
            continue
        piv = r + nz[0]
        if piv != r:
            a[[r, piv]] = a[[piv, r]]
        a[r] = a[r] * pow(int(a[r, c]), p - 2, p) % p
        col = a[:, c].copy()
        col[r] = 0
        others = np.flatnonzero(col)
        if others.size:
            a[others] = (a[others] - col[others, None] * a[r][None, :] % p) % p
        pivots.append(c)
        r += 1
    pivot_set = set(pivots)
    basis = []
    for f in range(cols):
        if f in pivot_set:
            continue
        v = np.zeros(cols, dtype=np.int64)
        v[f] = 1
        for i, pc in enumerate(pivots):
            v[pc] = (-a[i, f]) % p
        basis.append(v)
    if not basis:
        return np.zeros((0, cols), dtype=np.int64)
    return np.array(basis, dtype=np.int64)


def batched_det_mod(mats: np.ndarray, p: int) -> np.ndarray:
    """批量模 p 行列式，逐批主元选取的高斯消元"""
    a = np.array(mats, dtype=np.int64) % p
    batch, n, _ = a.shape
    det = np.ones(batch, dtype=np.int64)
    for k in range(n):
        nz = a[:, k:, k] != 0
        piv = np.argmax(nz, axis=1) + k
        swap = np.flatnonzero(piv != k)
        if swap.size:
            rows_k = a[swap, k, :].copy()
            a[swap, k, :] = a[swap, piv[swap], :]
            a[swap, piv[swap], :] = rows_k
            det[swap] = (-det[swap]) % p
        pivval = a[:, k, k]
        det = det * pivval % p
        if k + 1 < n:
            inv = inv_mod_array(pivval, p)
            f = a[:, k + 1:, k] * inv[:, None] % p
            a[:, k + 1:, k:] = (a[:, k + 1:, k:] - f[:, :, None] * a[:, None, k, k:] % p) % p
    return det


# ---------------------------------------------------------------------------
# 稠密一元多项式
# ---------------------------------------------------------------------------

def _trim(arr: np.ndarray) -> np.ndarray:
    nz = np.flatnonzero(arr)
    if nz.size == 0:
        return arr[:0]
    return arr[:nz[-1] + 1]


class DensePoly:
    """稠密一元多项式；零多项式的次数记为 -1（代表 −∞）"""

    __slots__ = ('ring', 'coeffs', 'var')

    def __init__(self, coeffs, ring: Ring = QQ, var: str = 't'):
        if isinstance(coeffs, np.ndarray) and coeffs.dtype == ring.dtype:
            arr = ring.reduce(coeffs.copy()) if ring.characteristic else coeffs.copy()
        else:
            arr = ring.array(list(coeffs))
        self.ring = ring
        self.coeffs = _trim(arr)
        self.var = var

    @classmethod
    def zero(cls, ring: Ring = QQ, var: str = 't') -> 'DensePoly':
        return cls([], ring, var)

    @classmethod
    def one(cls, ring: Ring = QQ, var: str = 't') -> 'DensePoly':
        return cls([1], ring, var)

    @classmethod
    def monomial(cls, k: int, ring: Ring = QQ, var: str = 't', c=1) -> 'DensePoly':
        return cls([0] * k + [c], ring, var)

    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return len(self.coeffs) == 0

    def lc(self):
        return self.coeffs[-1] if len(self.coeffs) else self.ring(0)

    def __getitem__(self, k: int):
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else self.ring(0)

    def _check(self, other: 'DensePoly') -> None:
        same_ring(self.ring, other.ring)
        if self.var != other.var:
            raise ArithmeticDomainError(f"变量不一致: {self.var} 与 {other.var}")

    def _coerce(self, other) -> 'DensePoly':
        if isinstance(other, DensePoly):
            self._check(other)
            return other
        return DensePoly([other], self.ring, self.var)

    def __add__(self, other) -> 'DensePoly':
        other = self._coerce(other)
        n = max(len(self.coeffs), len(other.coeffs))
        out = self.ring.zeros(n)
        out[:len(self.coeffs)] += self.coeffs
        out[:len(other.coeffs)] += other.coeffs
        return DensePoly(out, self.ring, self.var)

    __radd__ = __add__

    def __neg__(self) -> 'DensePoly':
        return DensePoly(-self.coeffs, self.ring, self.var)

    def __sub__(self, other) -> 'DensePoly':
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> 'DensePoly':
        return self._coerce(other) - self

    def __mul__(self, other) -> 'DensePoly':
        if isinstance(other, DensePoly):
            return poly_mul(self, other)
        c = self.ring(other)
        return DensePoly(self.coeffs * c, self.ring, self.var)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> 'DensePoly':
        result = DensePoly.one(self.ring, self.var)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other) -> bool:
        if not isinstance(other, DensePoly):
            other = DensePoly([other], self.ring, self.var)
        return (self.ring == other.ring and len(self.coeffs) == len(other.coeffs)
                and all(a == b for a, b in zip(self.coeffs.tolist(), other.coeffs.tolist())))

    def __hash__(self) -> int:
        return hash((self.ring, tuple(self.coeffs.tolist())))

    def __call__(self, x):
        acc = self.ring(0)
        for c in reversed(self.coeffs.tolist()):
            acc = acc * x + c
            if self.ring.characteristic:
                acc %= self.ring.p
        return acc

    def derivative(self) -> 'DensePoly':
        if len(self.coeffs) <= 1:
            return DensePoly.zero(self.ring, self.var)
        k = np.arange(1, len(self.coeffs), dtype=np.int64)
        if self.ring.characteristic:
            return DensePoly(self.coeffs[1:] * (k % self.ring.p), self.ring, self.var)
        return DensePoly(self.coeffs[1:] * k.astype(object), self.ring, self.var)

    def shift(self, k: int) -> 'DensePoly':
        """乘以 var^k"""
        if self.is_zero():
            return self
        return DensePoly(np.concatenate([self.ring.zeros(k), self.coeffs]), self.ring, self.var)

    def monic(self) -> 'DensePoly':
        if self.is_zero():
            return self
        return self * self.ring.inv(self.lc())

    def divmod(self, other: 'DensePoly') -> Tuple['DensePoly', 'DensePoly']:
        other = self._coerce(other)
        if other.is_zero():
            raise ZeroDivisionError("多项式除以零")
        ring = self.ring
        r = self.coeffs.copy()
        db = len(other.coeffs) - 1
        if len(r) - 1 < db:
            return DensePoly.zero(ring, self.var), self
        q = ring.zeros(len(r) - db)
        inv_lc = ring.inv(other.lc())
        b = other.coeffs
        for i in range(len(r) - 1 - db, -1, -1):
            c = r[i + db]
            if not c:
                continue
            c = c * inv_lc
            if ring.characteristic:
                c %= ring.p
            q[i] = c
            r[i:i + db + 1] = r[i:i + db + 1] - c * b
            if ring.characteristic:
                r[i:i + db + 1] %= ring.p
        return DensePoly(q, ring, self.var), DensePoly(r[:db] if db > 0 else r[:0], ring, self.var)

    def __floordiv__(self, other) -> 'DensePoly':
        return self.divmod(other)[0]

    def __mod__(self, other) -> 'DensePoly':
        return self.divmod(other)[1]

    def exact_div(self, other: 'DensePoly') -> 'DensePoly':
        q, r = self.divmod(other)
        if not r.is_zero():
            raise ArithmeticDomainError("多项式不能整除")
        return q

    def content(self):
        """有理系数：分子 gcd / 分母 lcm；素数域：首项系数"""
        if self.is_zero():
            return self.ring(0)
        if self.ring.characteristic:
            return self.lc()
        fracs = [Fraction(c) for c in self.coeffs]
        num = reduce(gcd, (f.numerator for f in fracs), 0)
        den = reduce(lcm, (f.denominator for f in fracs), 1)
        c = Fraction(num, den)
        return -c if fracs[-1] < 0 else c

    def primitive(self) -> 'DensePoly':
        if self.is_zero():
            return self
        return self * self.ring.inv(self.content())

    def to_list(self) -> list:
        return self.coeffs.tolist()

    def __repr__(self) -> str:
        return f"DensePoly({format_dense(self)}, {self.ring})"


def poly_mul(a: DensePoly, b: DensePoly) -> DensePoly:
    """
    精确多项式乘法：素数域走 NTT / 分段卷积，有理数域走整数化逐行累加

    Args:
        a, b: 同环同变量的多项式

    Returns:
        乘积
    """
    a._check(b)
    if a.is_zero() or b.is_zero():
        return DensePoly.zero(a.ring, a.var)
    return DensePoly(a.ring.convolve(a.coeffs, b.coeffs), a.ring, a.var)


def poly_gcd(a: DensePoly, b: DensePoly) -> DensePoly:
    """首一最大公因式"""
    a._check(b)
    while not b.is_zero():
        a, b = b, a % b
    return a.monic()


def poly_xgcd(a: DensePoly, b: DensePoly) -> Tuple[DensePoly, DensePoly, DensePoly]:
    """扩展欧几里得：返回 (g, s, u) 使 s·a + u·b = g 且 g 首一"""
    a._check(b)
    r0, r1 = a, b
    s0, s1 = DensePoly.one(a.ring, a.var), DensePoly.zero(a.ring, a.var)
    u0, u1 = DensePoly.zero(a.ring, a.var), DensePoly.one(a.ring, a.var)
    while not r1.is_zero():
        q, r = r0.divmod(r1)
        r0, r1 = r1, r
        s0, s1 = s1, s0 - q * s1
        u0, u1 = u1, u0 - q * u1
    if r0.is_zero():
        return r0, s0, u0
    inv = r0.ring.inv(r0.lc())
    return r0 * inv, s0 * inv, u0 * inv


def format_dense(poly: DensePoly, var: Optional[str] = None) -> str:
    var = var or poly.var
    parts = []
    for k in range(poly.degree(), -1, -1):
        c = poly.coeffs[k]
        if not c:
            continue
        if poly.ring.characteristic:
            c = poly.ring.lift(c)
        parts.append(_format_term(c, [(var, k)]))
    return _join_terms(parts)


# ---------------------------------------------------------------------------
# 有理函数
# ---------------------------------------------------------------------------

class RatFunc:
    """一元有理函数 num/den，约分且分母首一"""

    __slots__ = ('num', 'den')

    def __init__(self, num: DensePoly, den: Optional[DensePoly] = None, normalize: bool = True):
        if den is None:
            den = DensePoly.one(num.ring, num.var)
        num._check(den)
        if den.is_zero():
            raise ZeroDivisionError("有理函数分母为零")
        if normalize:
            if num.is_zero():
                den = DensePoly.one(num.ring, num.var)
            else:
                g = poly_gcd(num, den)
                if g.degree() > 0:
                    num, den = num // g, den // g
                inv = num.ring.inv(den.lc())
                num, den = num * inv, den * inv
        self.num = num
        self.den = den

    @property
    def ring(self) -> Ring:
        return self.num.ring

    @property
    def var(self) -> str:
        return self.num.var

    @classmethod
    def const(cls, c, ring: Ring = QQ, var: str = 't') -> 'RatFunc':
        return cls(DensePoly([c], ring, var))

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def _coerce(self, other) -> 'RatFunc':
        if isinstance(other, RatFunc):
            return other
        if isinstance(other, DensePoly):
            return RatFunc(other)
        return RatFunc.const(other, self.ring, self.var)

    def __add__(self, other) -> 'RatFunc':
        other = self._coerce(other)
        if self.den == other.den:
            return RatFunc(self.num + other.num, self.den)
        return RatFunc(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self) -> 'RatFunc':
        return RatFunc(-self.num, self.den, normalize=False)

    def __sub__(self, other) -> 'RatFunc':
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> 'RatFunc':
        return self._coerce(other) - self

    def __mul__(self, other) -> 'RatFunc':
        other = self._coerce(other)
        return RatFunc(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other) -> 'RatFunc':
        other = self._coerce(other)
        if other.is_zero():
            raise ZeroDivisionError("有理函数除以零")
        return RatFunc(self.num * other.den, self.den * other.num)

    def __eq__(self, other) -> bool:
        other = self._coerce(other)
        return self.num == other.num and self.den == other.den

    def __hash__(self) -> int:
        return hash((self.num, self.den))

    def derivative(self) -> 'RatFunc':
        return RatFunc(self.num.derivative() * self.den - self.num * self.den.derivative(),
                       self.den * self.den)

    def __call__(self, x):
        d = self.den(x)
        return self.num(x) * self.ring.inv(d) % self.ring.p if self.ring.characteristic \
            else self.num(x) / d

    def __repr__(self) -> str:
        if self.den.degree() == 0:
            return format_dense(self.num)
        return f"({format_dense(self.num)})/({format_dense(self.den)})"


# ---------------------------------------------------------------------------
# 中国剩余定理与有理数重构
# ---------------------------------------------------------------------------

def crt_combine(residues: Sequence[Tuple[int, int]]) -> Tuple[int, int]:
    """
    合并同余式 (value, modulus)

    Args:
        residues: [(r_i, m_i)]，模数两两互素

    Returns:
        (x, M)，0 ≤ x < M = ∏m_i
    """
    x, m = 0, 1
    for r, p in residues:
        p = int(p)
        if gcd(m, p) != 1:
            raise ArithmeticDomainError(f"模数不互素: {m} 与 {p}")
        k = (int(r) - x) * pow(m, -1, p) % p
        x += m * k
        m *= p
    return x % m, m


def crt_arrays(images: Sequence[np.ndarray], primes: Sequence[int]) -> Tuple[np.ndarray, int]:
    """逐元素合并多个模素数数组，返回 object 数组与总模数"""
    x = np.zeros(images[0].shape, dtype=object)
    m = 1
    for img, p in zip(images, primes):
        if gcd(m, p) != 1:
            raise ArithmeticDomainError(f"模数不互素: {m} 与 {p}")
        inv = pow(m % p, -1, p)
        r = np.asarray(img).astype(object)
        k = ((r - x) % p) * inv % p
        x = x + m * k
        m *= p
    return np.asarray(x, dtype=object).reshape(images[0].shape), m


def symmetric_lift(x, m: int):
    """[0, M) 到 (-M/2, M/2] 的对称代表元（支持 object 数组）"""
    if isinstance(x, np.ndarray):
        out = np.array(x, dtype=object)
        mask = np.array(out > m // 2, dtype=bool)
        out[mask] = out[mask] - m
        return out
    x %= m
    return x - m if x > m // 2 else x


@dataclass(frozen=True)
class RatRecon:
    """有理数重构问题：residue mod modulus，分子/分母界"""
    residue: int
    modulus: int
    bound: Optional[int] = None
    den_bound: Optional[int] = None

    @property
    def num_bound(self) -> int:
        return self.bound if self.bound is not None else isqrt((self.modulus - 1) // 2)

    @property
    def denominator_bound(self) -> int:
        return self.den_bound if self.den_bound is not None else self.num_bound


def rational_reconstruct(r: RatRecon) -> Fraction:
    """
    有理数重构（半扩展欧几里得）

    Returns:
        满足 n ≡ d·residue (mod M)、|n| ≤ N、0 < d ≤ D 的 n/d

    Raises:
        ReconstructionError: 界内无解，或 2·N·D ≥ M 时解不唯一
    """
    m = r.modulus
    nb, db = r.num_bound, r.denominator_bound
    if 2 * nb * db >= m:
        raise ReconstructionError(f"模数过小：2·{nb}·{db} ≥ {m}，重构结果不唯一")
    r0, r1 = m, r.residue % m
    t0, t1 = 0, 1
    while r1 > nb:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        t0, t1 = t1, t0 - q * t1
    if t1 == 0 or abs(t1) > db or gcd(abs(t1), m) != 1:
        raise ReconstructionError(f"模 {m.bit_length()} 位模数下无界内有理数")
    if t1 < 0:
        r1, t1 = -r1, -t1
    return Fraction(r1, t1)


def reconstruct_array(values: np.ndarray, m: int) -> List[Fraction]:
    return [rational_reconstruct(RatRecon(int(v), m)) for v in values.tolist()]


# ---------------------------------------------------------------------------
# 有理函数插值
# ---------------------------------------------------------------------------

def interpolate_poly(points: Sequence[Tuple[int, int]], ring: PrimeField, var: str = 'x') -> DensePoly:
    """牛顿差商插值（模 p）"""
    p = ring.p
    xs = [int(x) % p for x, _ in points]
    coef = [int(v) % p for _, v in points]
    n = len(xs)
    if len(set(xs)) != n:
        raise ArithmeticDomainError("插值点重复")
    for j in range(1, n):
        for i in range(n - 1, j - 1, -1):
            coef[i] = (coef[i] - coef[i - 1]) * pow(xs[i] - xs[i - j], p - 2, p) % p
    result = DensePoly([coef[-1]], ring, var)
    for i in range(n - 2, -1, -1):
        result = result * DensePoly([-xs[i], 1], ring, var) + coef[i]
    return result


def rat_interp(points: Sequence[Tuple[int, int]], deg_bounds: Tuple[int, int],
               ring: PrimeField, var: str = 'x') -> RatFunc:
    """
    有理函数插值（Cauchy 插值，扩展欧几里得截断）

    Args:
        points: [(x_i, v_i)]，x_i 互异
        deg_bounds: (分子次数界, 分母次数界)
        ring: 素数域

    Returns:
        RatFunc，分母首一

    Raises:
        ReconstructionError: 数据与次数界不相容
    """
    n_bound, d_bound = deg_bounds
    if len(points) < n_bound + d_bound + 1:
        raise ReconstructionError(f"插值点不足: {len(points)} < {n_bound + d_bound + 1}")
    u = interpolate_poly(points, ring, var)
    modulus = DensePoly.one(ring, var)
    for x, _ in points:
        modulus = modulus * DensePoly([-int(x), 1], ring, var)
    r0, r1 = modulus, u
    s0, s1 = DensePoly.zero(ring, var), DensePoly.one(ring, var)
    while r1.degree() > n_bound:
        q, r = r0.divmod(r1)
        r0, r1 = r1, r
        s0, s1 = s1, s0 - q * s1
    if s1.is_zero() or s1.degree() > d_bound:
        raise ReconstructionError("有理函数插值失败：分母超出次数界")
    for x, v in points:
        dx = s1(int(x))
        if dx == 0 or (r1(int(x)) - dx * int(v)) % ring.p:
            raise ReconstructionError("有理函数插值失败：与插值点不一致")
    return RatFunc(r1, s1)


# ---------------------------------------------------------------------------
# 稀疏多元多项式
# ---------------------------------------------------------------------------

GEN_ORDER = ('T', 'Dt', 'z', 't', 'x', 'y', 'U', 'n')

Monomial = Tuple[int, ...]


def _gen_key(name: str):
    return (GEN_ORDER.index(name), '') if name in GEN_ORDER else (len(GEN_ORDER), name)


def sort_gens(names: Iterable[str]) -> Tuple[str, ...]:
    return tuple(sorted(set(names), key=_gen_key))


class MultiPoly:
    """
    稀疏多元多项式：指数元组 -> 非零系数

    变量按 T > Dt > z > t > x > y > U > n 的字典序排列，首项即该序下最大单项式。
    """

    __slots__ = ('gens', 'terms', 'ring')

    def __init__(self, gens: Sequence[str], terms: Dict[Monomial, object], ring: Ring = QQ,
                 normalize: bool = True):
        self.gens = tuple(gens)
        self.ring = ring
        if normalize:
            clean = {}
            for m, c in terms.items():
                c = ring(c)
                if c:
                    clean[tuple(int(e) for e in m)] = c
            self.terms = clean
        else:
            self.terms = terms

    # ---- 构造 ----

    @classmethod
    def const(cls, c, gens: Sequence[str] = (), ring: Ring = QQ) -> 'MultiPoly':
        return cls(gens, {tuple(0 for _ in gens): c}, ring)

    @classmethod
    def var(cls, name: str, gens: Optional[Sequence[str]] = None, ring: Ring = QQ) -> 'MultiPoly':
        gens = tuple(gens) if gens else (name,)
        return cls(gens, {tuple(1 if g == name else 0 for g in gens): 1}, ring)

    @classmethod
    def from_dense(cls, poly: DensePoly, var: Optional[str] = None) -> 'MultiPoly':
        var = var or poly.var
        return cls((var,), {(k,): c for k, c in enumerate(poly.coeffs.tolist()) if c}, poly.ring)

    # ---- 基本属性 ----

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self, var: str) -> int:
        if var not in self.gens:
            return 0 if self.terms else -1
        i = self.gens.index(var)
        return max((m[i] for m in self.terms), default=-1)

    def degrees(self) -> Dict[str, int]:
        return {g: self.degree(g) for g in self.gens}

    def total_degree(self) -> int:
        return max((sum(m) for m in self.terms), default=-1)

    def free_gens(self) -> Tuple[str, ...]:
        """实际出现的变量"""
        used = [g for i, g in enumerate(self.gens) if any(m[i] for m in self.terms)]
        return sort_gens(used)

    def leading_term(self) -> Tuple[Monomial, object]:
        m = max(self.terms)
        return m, self.terms[m]

    # ---- 变量管理 ----

    def with_gens(self, gens: Sequence[str]) -> 'MultiPoly':
        gens = tuple(gens)
        if gens == self.gens:
            return self
        idx = []
        for g in self.gens:
            if g in gens:
                idx.append(gens.index(g))
            else:
                idx.append(None)
        out = {}
        for m, c in self.terms.items():
            new = [0] * len(gens)
            for e, j in zip(m, idx):
                if e:
                    if j is None:
                        raise ArithmeticDomainError(f"变量 {self.gens} 不能嵌入 {gens}")
                    new[j] = e
            out[tuple(new)] = c
        return MultiPoly(gens, out, self.ring, normalize=False)

    def compact(self) -> 'MultiPoly':
        return self.with_gens(self.free_gens())

    def rename(self, mapping: Dict[str, str]) -> 'MultiPoly':
        new_names = [mapping.get(g, g) for g in self.gens]
        if len(set(new_names)) != len(new_names):
            raise ArithmeticDomainError(f"重命名产生重复变量: {new_names}")
        renamed = MultiPoly(new_names, self.terms, self.ring, normalize=False)
        return renamed.with_gens(sort_gens(new_names))

    def _unify(self, other: 'MultiPoly') -> Tuple['MultiPoly', 'MultiPoly']:
        same_ring(self.ring, other.ring)
        if self.gens == other.gens:
            return self, other
        gens = sort_gens(self.gens + other.gens)
        return self.with_gens(gens), other.with_gens(gens)

    def _coerce(self, other) -> 'MultiPoly':
        if isinstance(other, MultiPoly):
            return other
        return MultiPoly.const(other, self.gens, self.ring)

    # ---- 算术 ----

    def __add__(self, other) -> 'MultiPoly':
        a, b = self._unify(self._coerce(other))
        out = dict(a.terms)
        p = a.ring.characteristic
        for m, c in b.terms.items():
            v = out.get(m, 0) + c
            if p:
                v %= p
            if v:
                out[m] = v
            else:
                out.pop(m, None)
        return MultiPoly(a.gens, out, a.ring, normalize=False)

    __radd__ = __add__

    def __neg__(self) -> 'MultiPoly':
        p = self.ring.characteristic
        return MultiPoly(self.gens, {m: (-c) % p if p else -c for m, c in self.terms.items()},
                         self.ring, normalize=False)

    def __sub__(self, other) -> 'MultiPoly':
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> 'MultiPoly':
        return self._coerce(other) - self

    def __mul__(self, other) -> 'MultiPoly':
        if not isinstance(other, MultiPoly):
            c = self.ring(other)
            if not c:
                return MultiPoly(self.gens, {}, self.ring, normalize=False)
            p = self.ring.characteristic
            return MultiPoly(self.gens, {m: (v * c) % p if p else v * c for m, v in self.terms.items()},
                             self.ring, normalize=False)
        a, b = self._unify(other)
        p = a.ring.characteristic
        out: Dict[Monomial, object] = {}
        for m1, c1 in a.terms.items():
            for m2, c2 in b.terms.items():
                m = tuple(e1 + e2 for e1, e2 in zip(m1, m2))
                out[m] = out.get(m, 0) + c1 * c2
        if p:
            out = {m: c % p for m, c in out.items()}
        return MultiPoly(a.gens, {m: c for m, c in out.items() if c}, a.ring, normalize=False)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> 'MultiPoly':
        result = MultiPoly.const(1, self.gens, self.ring)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __eq__(self, other) -> bool:
        if not isinstance(other, MultiPoly):
            other = MultiPoly.const(other, self.gens, self.ring)
        a, b = self._unify(other)
        return a.terms == b.terms

    def __hash__(self) -> int:
        c = self.compact()
        return hash((c.gens, frozenset(c.terms.items())))

    # ---- 结构操作 ----

    def coefficients_in(self, var: str) -> Dict[int, 'MultiPoly']:
        """按 var 的幂次拆分，系数多项式不含 var"""
        if var not in self.gens:
            return {0: self} if self.terms else {}
        i = self.gens.index(var)
        rest = self.gens[:i] + self.gens[i + 1:]
        parts: Dict[int, Dict[Monomial, object]] = {}
        for m, c in self.terms.items():
            parts.setdefault(m[i], {})[m[:i] + m[i + 1:]] = c
        return {k: MultiPoly(rest, d, self.ring, normalize=False) for k, d in parts.items()}

    @classmethod
    def from_coefficients(cls, var: str, coeffs: Dict[int, 'MultiPoly'], ring: Ring = QQ) -> 'MultiPoly':
        result = MultiPoly((var,), {}, ring)
        x = MultiPoly.var(var, ring=ring)
        for k, c in coeffs.items():
            result = result + c * (x ** k)
        return result

    def derivative(self, var: str) -> 'MultiPoly':
        if var not in self.gens:
            return MultiPoly(self.gens, {}, self.ring)
        i = self.gens.index(var)
        out = {}
        for m, c in self.terms.items():
            if m[i]:
                new = list(m)
                new[i] -= 1
                out[tuple(new)] = c * m[i]
        return MultiPoly(self.gens, out, self.ring)

    def substitute(self, values: Dict[str, object]) -> 'MultiPoly':
        """把若干变量代入为常数"""
        idx = [(self.gens.index(v), self.ring(val)) for v, val in values.items() if v in self.gens]
        if not idx:
            return self
        out: Dict[Monomial, object] = {}
        p = self.ring.characteristic
        for m, c in self.terms.items():
            new = list(m)
            for i, val in idx:
                if new[i]:
                    c = c * (pow(val, new[i], p) if p else val ** new[i])
                    new[i] = 0
            key = tuple(new)
            out[key] = out.get(key, 0) + c
        if p:
            out = {m: c % p for m, c in out.items()}
        return MultiPoly(self.gens, out, self.ring)

    def compose(self, mapping: Dict[str, 'MultiPoly']) -> 'MultiPoly':
        """把变量替换为多项式"""
        targets = [g for g in self.gens if g in mapping]
        if not targets:
            return self
        keep = [g for g in self.gens if g not in mapping]
        gens_all = sort_gens(keep + [g for v in mapping.values() for g in v.gens])
        power_cache: Dict[Tuple[str, int], MultiPoly] = {}

        def power(name: str, k: int) -> MultiPoly:
            key = (name, k)
            if key not in power_cache:
                if k == 0:
                    power_cache[key] = MultiPoly.const(1, gens_all, self.ring)
                elif k == 1:
                    power_cache[key] = mapping[name].with_gens(gens_all)
                else:
                    power_cache[key] = power(name, k // 2) * power(name, k - k // 2)
            return power_cache[key]

        groups: Dict[Tuple[int, ...], Dict[Monomial, object]] = {}
        t_idx = [self.gens.index(g) for g in targets]
        k_idx = [self.gens.index(g) for g in keep]
        for m, c in self.terms.items():
            tkey = tuple(m[i] for i in t_idx)
            groups.setdefault(tkey, {})[tuple(m[i] for i in k_idx)] = c
        result = MultiPoly(gens_all, {}, self.ring)
        for tkey, rest in groups.items():
            factor = MultiPoly.const(1, gens_all, self.ring)
            for name, k in zip(targets, tkey):
                if k:
                    factor = factor * power(name, k)
            result = result + factor * MultiPoly(keep, rest, self.ring, normalize=False).with_gens(gens_all)
        return result

    def homogenize_substitution(self, var: str, num: 'MultiPoly', den: 'MultiPoly') -> 'MultiPoly':
        """den^d · P(var = num/den)，d = deg_var P"""
        coeffs = self.coefficients_in(var)
        d = max(coeffs)
        result = MultiPoly((), {}, self.ring)
        for k, c in coeffs.items():
            result = result + c * (num ** k) * (den ** (d - k))
        return result

    def evaluate(self, point: Dict[str, object]):
        value = self.substitute(point)
        if value.free_gens():
            raise ArithmeticDomainError(f"未代入的变量: {value.free_gens()}")
        return next(iter(value.terms.values()), self.ring(0))

    def reduce_mod(self, p: int) -> 'MultiPoly':
        ring = PrimeField(p)
        return MultiPoly(self.gens, {m: ring(c) for m, c in self.terms.items()}, ring)

    def monomial_content(self) -> Monomial:
        return tuple(min(m[i] for m in self.terms) for i in range(len(self.gens))) if self.terms \
            else tuple(0 for _ in self.gens)

    def strip_monomial_content(self) -> 'MultiPoly':
        low = self.monomial_content()
        if not any(low):
            return self
        return MultiPoly(self.gens, {tuple(e - l for e, l in zip(m, low)): c for m, c in self.terms.items()},
                         self.ring, normalize=False)

    def integer_content(self) -> Fraction:
        if not self.terms or self.ring.characteristic:
            return self.ring(1)
        fracs = [Fraction(c) for c in self.terms.values()]
        num = reduce(gcd, (f.numerator for f in fracs), 0)
        den = reduce(lcm, (f.denominator for f in fracs), 1)
        return Fraction(num, den)

    def canonical(self) -> 'MultiPoly':
        """整数本原且首项（字典序）系数为正；素数域上首一"""
        if not self.terms:
            return self.compact()
        poly = self.compact()
        _, lc = poly.leading_term()
        if poly.ring.characteristic:
            return poly * poly.ring.inv(lc)
        c = poly.integer_content()
        if lc < 0:
            c = -c
        return poly * (1 / c)

    def is_canonical_equal(self, other: 'MultiPoly') -> bool:
        return self.canonical() == other.canonical()

    # ---- 输出 ----

    def sorted_terms(self) -> List[Tuple[Monomial, object]]:
        return sorted(self.terms.items(), key=lambda kv: kv[0], reverse=True)

    def to_sympy(self):
        symbols = sympy.symbols(self.gens) if self.gens else ()
        if len(self.gens) == 1:
            symbols = (symbols,) if not isinstance(symbols, tuple) else symbols
        expr = sympy.Integer(0)
        for m, c in self.terms.items():
            c = self.ring.lift(c) if self.ring.characteristic else c
            term = sympy.Rational(c.numerator, c.denominator) if isinstance(c, Fraction) else sympy.Integer(c)
            for s, e in zip(symbols, m):
                term *= s ** e
            expr += term
        return expr

    def __str__(self) -> str:
        return format_poly(self)

    def __repr__(self) -> str:
        return f"MultiPoly({format_poly(self)}, {self.ring})"


def _format_coeff(c) -> str:
    if isinstance(c, Fraction):
        return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"
    return str(c)


def _format_term(c, powers: List[Tuple[str, int]]) -> str:
    factors = [name if e == 1 else f"{name}^{e}" for name, e in powers if e]
    neg = c < 0
    mag = -c if neg else c
    if factors:
        body = '*'.join(factors) if mag == 1 else _format_coeff(mag) + '*' + '*'.join(factors)
    else:
        body = _format_coeff(mag)
    return ('-' if neg else '+') + body


def _join_terms(parts: List[str]) -> str:
    if not parts:
        return '0'
    text = ''.join(parts)
    return text[1:] if text.startswith('+') else text


def format_poly(poly: MultiPoly) -> str:
    """规范文本：按字典序降序排列，系数在前，幂写成 ^"""
    poly = poly.compact()
    parts = []
    for m, c in poly.sorted_terms():
        if poly.ring.characteristic:
            c = poly.ring.lift(c)
        parts.append(_format_term(c, list(zip(poly.gens, m))))
    return _join_terms(parts)


def parse_poly(text: str, gens: Optional[Sequence[str]] = None, ring: Ring = QQ) -> MultiPoly:
    """
    解析多项式文本（支持 ^ 与 **），借助 sympy

    Args:
        text: 如 "16*x^3*t^4+108*t^4-2*t+x"
        gens: 变量名；缺省取表达式中出现的符号
        ring: 系数环
    """
    try:
        expr = sympy.sympify(text.replace('^', '**'))
    except (sympy.SympifyError, SyntaxError, TypeError) as e:
        raise ArithmeticDomainError(f"无法解析多项式: {text!r}: {e}")
    names = sort_gens(gens) if gens else sort_gens(str(s) for s in expr.free_symbols)
    if not names:
        value = sympy.Rational(expr)
        return MultiPoly.const(Fraction(int(value.p), int(value.q)), (), ring)
    symbols = [sympy.Symbol(n) for n in names]
    try:
        poly = sympy.Poly(sympy.expand(expr), *symbols)
    except sympy.PolynomialError as e:
        raise ArithmeticDomainError(f"不是多项式: {text!r}: {e}")
    terms = {}
    for monom, coeff in poly.terms():
        if not coeff.is_Rational:
            raise ArithmeticDomainError(f"系数不是有理数: {coeff}")
        terms[monom] = Fraction(int(coeff.p), int(coeff.q))
    return MultiPoly(names, terms, ring)


# ---------------------------------------------------------------------------
# 结式与整除
# ---------------------------------------------------------------------------

def resultant_degree_bounds(P: MultiPoly, Q: MultiPoly, var: str) -> Dict[str, int]:
    """Bézout 型次数界：deg_v res ≤ deg_v P·deg_z Q + deg_z P·deg_v Q"""
    m, n = P.degree(var), Q.degree(var)
    rest = [g for g in sort_gens(P.gens + Q.gens) if g != var]
    return {v: max(P.degree(v), 0) * n + m * max(Q.degree(v), 0) for v in rest}


def _grid_values(poly: MultiPoly, rest: Sequence[str], axes: Sequence[np.ndarray], p: int) -> np.ndarray:
    shape = tuple(len(a) for a in axes)
    out = np.zeros(shape, dtype=np.int64)
    if not poly.terms:
        return out
    poly = poly.with_gens(rest)
    max_e = [max((m[i] for m in poly.terms), default=0) for i in range(len(rest))]
    tables = []
    for i, axis in enumerate(axes):
        tab = np.ones((max_e[i] + 1, len(axis)), dtype=np.int64)
        for e in range(1, max_e[i] + 1):
            tab[e] = tab[e - 1] * axis % p
        tables.append(tab)
    ring = PrimeField(p)
    for m, c in poly.terms.items():
        val = np.full(shape, ring(c), dtype=np.int64)
        for i, e in enumerate(m):
            if e:
                view = [1] * len(rest)
                view[i] = -1
                val = val * tables[i][e].reshape(view) % p
        out = (out + val) % p
    return out


def _apply_axis_mod(mat: np.ndarray, tensor: np.ndarray, axis: int, p: int) -> np.ndarray:
    moved = np.moveaxis(tensor, axis, 0)
    flat = moved.reshape(moved.shape[0], -1)
    out = np.zeros((mat.shape[0], flat.shape[1]), dtype=np.int64)
    for j in range(mat.shape[1]):
        out = (out + mat[:, j, None] * flat[j][None, :]) % p
    return np.moveaxis(out.reshape((mat.shape[0],) + moved.shape[1:]), 0, axis)


def _resultant_mod(P: MultiPoly, Q: MultiPoly, var: str, rest: Sequence[str],
                   bounds: Dict[str, int], p: int, budget: int) -> np.ndarray:
    m, n = P.degree(var), Q.degree(var)
    size = m + n
    axes = [np.arange(1, bounds[v] + 3, dtype=np.int64) % p for v in rest]
    grid_shape = tuple(len(a) for a in axes)
    count = int(np.prod(grid_shape)) if grid_shape else 1
    if count * size * size > budget:
        raise BudgetExceeded(f"结式求值网格 {grid_shape}×{size}² 超出预算 {budget}")
    pc, qc = P.coefficients_in(var), Q.coefficients_in(var)
    zero = MultiPoly(rest, {}, QQ)
    p_vals = [_grid_values(pc.get(k, zero), rest, axes, p).reshape(-1) for k in range(m + 1)]
    q_vals = [_grid_values(qc.get(k, zero), rest, axes, p).reshape(-1) for k in range(n + 1)]
    syl = np.zeros((count, size, size), dtype=np.int64)
    for i in range(n):
        for k in range(m + 1):
            syl[:, i, i + m - k] = p_vals[k]
    for i in range(m):
        for k in range(n + 1):
            syl[:, n + i, i + n - k] = q_vals[k]
    coeffs = batched_det_mod(syl, p).reshape(grid_shape)
    for axis, v in enumerate(rest):
        vander = np.ones((len(axes[axis]), len(axes[axis])), dtype=np.int64)
        for e in range(1, len(axes[axis])):
            vander[:, e] = vander[:, e - 1] * axes[axis] % p
        coeffs = _apply_axis_mod(matrix_inverse_mod(vander, p), coeffs, axis, p)
        top = np.take(coeffs, [len(axes[axis]) - 1], axis=axis)
        if np.any(top):
            raise ArithmeticDomainError(f"结式在变量 {v} 上超出次数界，检查点不一致")
    return coeffs


def resultant(P: MultiPoly, Q: MultiPoly, var: str, primes: Optional[Sequence[int]] = None,
              budget: int = 60_000_000) -> MultiPoly:
    """
    消去变量 var 的结式，模素数求值插值，有理系数时用中国剩余定理稳定化

    Args:
        P, Q: 关于 var 次数为正的多项式
        var: 被消去的变量
        primes: 使用的素数序列（缺省为 NTT 素数池）
        budget: 求值网格规模上限（批量 Sylvester 矩阵元素数）

    Returns:
        结式（与输入同环）
    """
    ring = same_ring(P.ring, Q.ring)
    gens = sort_gens(P.gens + Q.gens)
    P, Q = P.with_gens(gens), Q.with_gens(gens)
    m, n = P.degree(var), Q.degree(var)
    if m <= 0 or n <= 0:
        raise ArithmeticDomainError(f"结式要求两个多项式关于 {var} 次数为正 (得到 {m}, {n})")
    rest = [g for g in gens if g != var]
    bounds = resultant_degree_bounds(P, Q, var)
    logger.debug(f"结式次数界: {bounds}, Sylvester 阶数 {m + n}")

    def to_dict(tensor: np.ndarray) -> Dict[Monomial, object]:
        out = {}
        tensor = np.asarray(tensor, dtype=object)
        if tensor.ndim == 0:
            return {(): tensor.item()} if tensor.item() else {}
        for idx in zip(*np.nonzero(tensor)):
            out[tuple(int(i) for i in idx)] = tensor[idx]
        return out

    if ring.characteristic:
        tensor = _resultant_mod(P, Q, var, rest, bounds, ring.p, budget)
        return MultiPoly(rest, {k: int(v) for k, v in to_dict(tensor).items()}, ring)

    # 有理系数：先整数化
    cp = reduce(lcm, (Fraction(c).denominator for c in P.terms.values()), 1)
    cq = reduce(lcm, (Fraction(c).denominator for c in Q.terms.values()), 1)
    p_int, q_int = P * cp, Q * cq
    scale = Fraction(1, cp ** n * cq ** m)
    primes = list(primes) if primes else list(ntt_prime_pool())
    images: List[np.ndarray] = []
    used: List[int] = []
    previous = None
    for p in primes:
        images.append(_resultant_mod(p_int, q_int, var, rest, bounds, p, budget))
        used.append(p)
        combined, modulus = crt_arrays(images, used)
        lifted = symmetric_lift(combined, modulus)
        if previous is not None and np.array_equal(lifted, previous):
            logger.debug(f"结式在 {len(used)} 个素数后稳定")
            terms = {k: Fraction(int(v)) * scale for k, v in to_dict(lifted).items()}
            return MultiPoly(rest, terms, QQ)
        previous = lifted
    raise ReconstructionError(f"结式在 {len(used)} 个素数后仍未稳定")


def divides(P: MultiPoly, Q: MultiPoly) -> Tuple[bool, Optional[MultiPoly]]:
    """
    精确整除判定：字典序（主变量优先）长除法，余项非零即不整除

    Returns:
        (是否整除, 商)
    """
    if P.is_zero():
        raise ArithmeticDomainError("除数为零")
    a, b = P._unify(Q)
    if b.is_zero():
        return True, MultiPoly(a.gens, {}, a.ring)
    ring = a.ring
    p = ring.characteristic
    lead, lc = a.leading_term()
    inv_lc = ring.inv(lc)
    remainder: Dict[Monomial, object] = dict(b.terms)
    heap = [tuple(-e for e in m) for m in remainder]
    heapq.heapify(heap)
    quotient: Dict[Monomial, object] = {}
    divisor_terms = list(a.terms.items())
    while heap:
        m = tuple(-e for e in heapq.heappop(heap))
        c = remainder.get(m)
        if not c:
            continue
        if any(e < l for e, l in zip(m, lead)):
            return False, None
        shift = tuple(e - l for e, l in zip(m, lead))
        q = c * inv_lc
        if p:
            q %= p
        quotient[shift] = q
        for dm, dc in divisor_terms:
            key = tuple(e + s for e, s in zip(dm, shift))
            v = remainder.get(key, 0) - q * dc
            if p:
                v %= p
            if v:
                if key not in remainder or not remainder[key]:
                    heapq.heappush(heap, tuple(-e for e in key))
                remainder[key] = v
            else:
                remainder.pop(key, None)
    return True, MultiPoly(a.gens, quotient, ring, normalize=False)
