#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
四分之一平面格路计数
步集解析、动态规划计数、生成函数截面，以及 P-递推展开。
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple, Union

import numpy as np

from exactarith import QQ, MultiPoly, PrimeField, Ring, WalkProveError
from ore import PRecurrence
from series import TruncSeries

logger = logging.getLogger(__name__)


class WalkError(WalkProveError):
    """计数或递推展开失败"""


class StepSetError(WalkError):
    """步集文本无法解析"""


# 罗盘记号 -> (dx, dy)
STEP_NAMES: Dict[str, Tuple[int, int]] = {
    'N': (0, 1),
    'S': (0, -1),
    'E': (1, 0),
    'W': (-1, 0),
    'NE': (1, 1),
    'NW': (-1, 1),
    'SE': (1, -1),
    'SW': (-1, -1),
}
_CANONICAL_ORDER = ['N', 'S', 'E', 'W', 'NE', 'NW', 'SE', 'SW']

# 整数计数在 int64 下安全的上界
_INT64_SAFE = 2 ** 62


@dataclass(frozen=True)
class StepSet:
    """小步集：(dx, dy) ∈ {−1,0,1}²，不含 (0,0)"""
    steps: FrozenSet[Tuple[int, int]]

    def __post_init__(self):
        if not self.steps:
            raise StepSetError("步集不能为空")
        for dx, dy in self.steps:
            if (dx, dy) == (0, 0) or abs(dx) > 1 or abs(dy) > 1:
                raise StepSetError(f"非法步 ({dx}, {dy})：只允许单位小步")

    @classmethod
    def parse(cls, text: str) -> 'StepSet':
        """
        解析 "E,W,NE,SW" 形式的步集

        Raises:
            StepSetError: 未知记号或重复步
        """
        tokens = [tok.strip().upper() for tok in text.replace(' ', ',').split(',') if tok.strip()]
        if not tokens:
            raise StepSetError(f"步集为空: {text!r}")
        seen = []
        for tok in tokens:
            if tok not in STEP_NAMES:
                raise StepSetError(f"未知步 {tok!r}，可用: {', '.join(_CANONICAL_ORDER)}")
            if STEP_NAMES[tok] in seen:
                raise StepSetError(f"步 {tok} 重复")
            seen.append(STEP_NAMES[tok])
        return cls(frozenset(seen))

    @classmethod
    def of(cls, *steps: Tuple[int, int]) -> 'StepSet':
        return cls(frozenset(steps))

    def __len__(self) -> int:
        return len(self.steps)

    def __iter__(self):
        return iter(sorted(self.steps))

    def has(self, name: str) -> bool:
        return STEP_NAMES[name] in self.steps

    def __str__(self) -> str:
        return ','.join(name for name in _CANONICAL_ORDER if STEP_NAMES[name] in self.steps)


# 截面别名
SECTION_ALIASES = {
    'G(t;x,0)': 'x0', 'G(t;0,y)': '0y', 'G(t;0,0)': '00', 'G(t;1,1)': '11',
    'G(t;1,0)': '10', 'G(t;0,1)': '01', 'G(t;x,y)': 'xy',
}
SECTIONS = ('x0', '0y', '00', '11', '10', '01', 'xy')


@dataclass(frozen=True)
class SectionSpec:
    """生成函数截面与截断阶"""
    which: str
    N: int

    def __post_init__(self):
        which = SECTION_ALIASES.get(self.which, self.which)
        if which not in SECTIONS:
            raise WalkError(f"未知截面 {self.which!r}，可用: {', '.join(SECTIONS)}")
        object.__setattr__(self, 'which', which)
        if self.N < 1:
            raise WalkError(f"截断阶必须 ≥ 1: {self.N}")


@dataclass
class WalkTable:
    """
    计数表：f(n; i, j)，0 ≤ n < N

    x_section[n, i] = f(n; i, 0)，y_section[n, j] = f(n; 0, j)。
    layers 仅在小 N 时保留完整的 (i, j) 切片。
    """
    steps: StepSet
    N: int
    ring: Optional[Ring]
    x_section: np.ndarray
    y_section: np.ndarray
    totals: np.ndarray
    layers: List[np.ndarray] = field(default_factory=list)

    @property
    def excursions(self) -> np.ndarray:
        return self.x_section[:, 0]

    def count(self, n: int, i: int, j: int):
        if not self.layers:
            if j == 0:
                return self.x_section[n, i] if i <= n else 0
            if i == 0:
                return self.y_section[n, j] if j <= n else 0
            raise WalkError("该计数表未保留完整切片")
        layer = self.layers[n]
        if i >= layer.shape[0] or j >= layer.shape[1]:
            return 0
        return layer[i, j]


def _shift_slices(d: int, size: int) -> Tuple[slice, slice]:
    """(目标, 来源) 切片：目标下标 = 来源下标 + d"""
    if d == 1:
        return slice(1, size), slice(0, size - 1)
    if d == -1:
        return slice(0, size - 1), slice(1, size)
    return slice(0, size), slice(0, size)


def build_walk_table(steps: StepSet, N: int, ring: Optional[Ring] = None,
                     keep_layers: bool = False) -> WalkTable:
    """
    动态规划计数 n < N 的所有格路

    滚动两层；第 n 层只在 [0, n]² 内非零，每步只处理 (n+2)² 的子方阵。
    整数计数先用 int64，超过安全界后转成 Python 整数。

    Args:
        steps: 步集
        N: 计数长度上界（不含）
        ring: None 表示整数，PrimeField 表示模 p
        keep_layers: 是否保留每一层
    """
    if N < 1:
        raise WalkError(f"N 必须 ≥ 1: {N}")
    size = N
    modulus = ring.p if ring is not None and ring.characteristic else None
    if ring is not None and not ring.characteristic:
        ring = None
    dtype = np.int64
    layer = np.zeros((size, size), dtype=dtype)
    layer[0, 0] = 1
    x_section = np.zeros((N, size), dtype=dtype)
    y_section = np.zeros((N, size), dtype=dtype)
    totals = np.zeros(N, dtype=dtype)
    layers = []
    moves = sorted(steps.steps)
    s = len(steps)

    for n in range(N):
        x_section[n] = layer[:, 0]
        y_section[n] = layer[0, :]
        totals[n] = layer.sum() % modulus if modulus else layer.sum()
        if keep_layers:
            layers.append(layer[:n + 1, :n + 1].copy())
        if n == N - 1:
            break
        if modulus is None and layer.dtype != object and s ** (n + 1) >= _INT64_SAFE:
            logger.debug(f"n={n}：计数超过 int64 安全范围，改用 Python 整数")
            layer = layer.astype(object)
            x_section = x_section.astype(object)
            y_section = y_section.astype(object)
            totals = totals.astype(object)
        m = min(n + 2, size)
        sub = layer[:m, :m]
        new = np.zeros((size, size), dtype=layer.dtype)
        target = new[:m, :m]
        for dx, dy in moves:
            ti, si = _shift_slices(dx, m)
            tj, sj = _shift_slices(dy, m)
            target[ti, tj] += sub[si, sj]
        if modulus:
            target %= modulus
        layer = new
    logger.debug(f"计数表完成: 步集 {steps}, N={N}")
    return WalkTable(steps, N, PrimeField(modulus) if modulus else None,
                     x_section, y_section, totals, layers)


def count(steps: StepSet, n: int, i: int, j: int) -> int:
    """长度为 n、从原点走到 (i, j) 的格路数"""
    if min(n, i, j) < 0:
        raise WalkError("n, i, j 必须非负")
    if max(i, j) > n:
        return 0
    table = build_walk_table(steps, n + 1, keep_layers=bool(i and j))
    return int(table.count(n, i, j))


def _to_ring_array(values: np.ndarray, ring: Ring) -> np.ndarray:
    if ring.characteristic:
        return np.asarray(values, dtype=np.int64) % ring.p
    out = np.empty(values.shape, dtype=object)
    flat = out.reshape(-1)
    for k, v in enumerate(values.reshape(-1).tolist()):
        flat[k] = Fraction(int(v))
    return out


def section_series(steps: StepSet, spec: SectionSpec, ring: Ring = QQ) -> Union[TruncSeries, MultiPoly]:
    """
    生成函数截面截断到 t^N

    'xy' 返回 (t, x, y) 上的截断多项式，其余返回 TruncSeries。
    """
    table_ring = ring if ring.characteristic else None
    if spec.which == 'xy':
        return complete_series(steps, spec.N, ring)
    table = build_walk_table(steps, spec.N, table_ring)
    if spec.which == 'x0':
        return TruncSeries(ring, _to_ring_array(table.x_section, ring), 0, 'x')
    if spec.which == '0y':
        return TruncSeries(ring, _to_ring_array(table.y_section, ring), 0, 'y')
    if spec.which == '00':
        column = table.excursions
    elif spec.which == '11':
        column = table.totals
    elif spec.which == '10':
        column = _row_sums(table.x_section, table_ring)
    else:
        column = _row_sums(table.y_section, table_ring)
    return TruncSeries(ring, _to_ring_array(np.asarray(column).reshape(-1, 1), ring), 0, 'x')


def _row_sums(section: np.ndarray, ring: Optional[Ring]) -> np.ndarray:
    sums = section.sum(axis=1)
    return sums % ring.p if ring is not None else sums


def complete_series(steps: StepSet, N: int, ring: Ring = QQ) -> MultiPoly:
    """完整生成函数 Σ f(n;i,j) x^i y^j t^n 截断到 t^N"""
    table = build_walk_table(steps, N, ring if ring.characteristic else None, keep_layers=True)
    terms = {}
    for n, layer in enumerate(table.layers):
        for i, j in zip(*np.nonzero(layer)):
            terms[(n, int(i), int(j))] = int(layer[i, j])
    return MultiPoly(('t', 'x', 'y'), terms, ring)


def specialize_section(series: TruncSeries, value) -> TruncSeries:
    """截面在 x（或 y）取定值，例如 G(t;1,0)"""
    return series.evaluate_x(value)


# ---------------------------------------------------------------------------
# 递推
# ---------------------------------------------------------------------------

def _as_number(v: Fraction):
    return int(v) if v.denominator == 1 else v


def unroll_sequence(rec: PRecurrence, initial: Sequence, count: int) -> List:
    """
    由递推与初值算出前 count 项

    Raises:
        WalkError: 首系数在某下标处为零，或初值不足
    """
    s = rec.order
    if len(initial) < s:
        raise WalkError(f"{s} 阶递推需要 {s} 个初值，只给了 {len(initial)} 个")
    values = [Fraction(v) for v in initial]
    lead = rec.coeffs[-1]
    m = 0
    while len(values) < count:
        if m + s < len(values):
            m += 1
            continue
        c = Fraction(lead(m))
        if c == 0:
            raise WalkError(f"递推首系数在 n={m} 处为零，需要额外给出 u_{m + s}")
        acc = sum(Fraction(rec.coeffs[i](m)) * values[m + i] for i in range(s))
        values.append(-acc / c)
        m += 1
    return [_as_number(v) for v in values[:count]]


def recurrence_unroll(rec: PRecurrence, initial: Sequence, n: int):
    """递推展开到第 n 项"""
    return unroll_sequence(rec, initial, n + 1)[n]


def coefficient_by_recurrence(rec: PRecurrence, initial: Sequence, n: int):
    """O(n) 计算第 n 项（例如原点回归数）"""
    return recurrence_unroll(rec, initial, n)


def excursion_closed_form(steps: StepSet, n: int):
    """已知模型的原点回归闭式；没有闭式时报错"""
    from walk_models import model_for_steps

    model = model_for_steps(steps)
    if model is None:
        raise WalkError(f"步集 {steps} 没有已登记的闭式")
    return model.excursion_closed_form(n)
