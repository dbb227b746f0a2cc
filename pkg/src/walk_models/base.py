#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
格路模型基础类
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from exactarith import QQ, MultiPoly, Ring, parse_poly
from ore import PRecurrence
from series import TruncSeries
from walks import SectionSpec, StepSet, section_series


@dataclass
class ModelProfile:
    """模型的已知结果，用作对照"""

    name: str
    steps: str                                   # 步集记号，如 "W,S,NE"
    excursion_stride: int = 1                    # 原点回归只在该步长的倍数处非零
    unknowns: Tuple[str, ...] = ()               # 约化核方程中的未知级数
    section_degrees: Dict[str, Tuple[int, int, int]] = field(default_factory=dict)  # (deg_T, deg_t, deg_x)
    operator_shapes: Dict[str, Tuple[int, int]] = field(default_factory=dict)       # (阶, 系数次数)
    guess_precision: int = 100                   # 流水线猜测截面时的缺省精度
    image_precision: int = 0                     # 单点模像检查的精度，0 表示不做
    notes: List[str] = field(default_factory=list)


@dataclass
class ReducedEquation:
    """约化核方程 target = A + B · source(t, Y(t, x))"""

    target: str
    source: str
    A: TruncSeries
    B: TruncSeries
    Y: TruncSeries


class WalkModel(ABC):
    """格路模型抽象基类"""

    name: str = ''
    step_text: str = ''
    aliases: Tuple[str, ...] = ()

    def __init__(self, config: Dict = None):
        self.config = config or {}
        self.model_name = self.__class__.__name__

    @property
    def steps(self) -> StepSet:
        return StepSet.parse(self.step_text)

    @abstractmethod
    def profile(self) -> ModelProfile:
        """模型概况"""
        pass

    @abstractmethod
    def excursion_closed_form(self, n: int) -> int:
        """
        长度为 n 的原点回归数

        Args:
            n: 长度

        Returns:
            精确整数
        """
        pass

    @abstractmethod
    def excursion_recurrence(self) -> Tuple[PRecurrence, List[int], int]:
        """
        原点回归子序列的递推

        Returns:
            (递推, 初值, 步长)；递推作用在 u_m = g(stride·m; 0, 0) 上
        """
        pass

    def known_polynomials(self) -> Dict[str, MultiPoly]:
        """已发表的多项式（解析后的 MultiPoly）"""
        return {}

    def known_texts(self) -> Dict[str, str]:
        """已发表的有理式文本（参数化等）"""
        return {}

    def unknown_series(self, N: int, ring: Ring = QQ) -> Dict[str, TruncSeries]:
        """由计数得到的约化核方程未知级数，截断到 t^N"""
        return {}

    def unknown_transform(self, name: str):
        """
        从截面到未知级数的变换

        Returns:
            (截面名, 变换函数或 None)
        """
        return 'x0', None

    def reduced_system(self, N: int, ring: Ring = QQ,
                       g00: Optional[TruncSeries] = None) -> List[ReducedEquation]:
        """约化核方程组，各级数截断到 t^N"""
        return []

    def excursion_series(self, N: int, ring: Ring = QQ) -> TruncSeries:
        return section_series(self.steps, SectionSpec('00', N), ring)

    def matches(self, steps: StepSet) -> bool:
        return steps == self.steps

    def is_available(self) -> bool:
        """模型数据是否完整"""
        return True


def parse_known(text: str, gens: Sequence[str]) -> MultiPoly:
    return parse_poly(text, gens, QQ)
