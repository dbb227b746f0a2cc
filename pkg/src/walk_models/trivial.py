#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
对角格路：单步集 {NE}，不受边界约束
"""

from typing import Dict, List, Tuple

from exactarith import QQ, DensePoly, MultiPoly
from ore import PRecurrence
from .base import ModelProfile, WalkModel, parse_known


class DiagonalModel(WalkModel):
    """G(t;x,y) = 1/(1 − x·y·t)，所有边界项为零"""

    name = 'diagonal'
    step_text = 'NE'
    aliases = ('ne', 'diagonal')

    def profile(self) -> ModelProfile:
        return ModelProfile(name=self.name, steps=self.step_text, unknowns=(),
                            notes=['核方程的边界项全部消失，生成函数为有理函数'])

    def excursion_closed_form(self, n: int) -> int:
        return 1 if n == 0 else 0

    def excursion_recurrence(self) -> Tuple[PRecurrence, List[int], int]:
        # u_{n+1} = 0
        return PRecurrence([DensePoly.zero(QQ, 'n'), DensePoly.one(QQ, 'n')]), [1], 1

    def known_polynomials(self) -> Dict[str, MultiPoly]:
        return {
            'complete': parse_known('(1-x*y*t)*T-1', ('T', 't', 'x', 'y')),
            'excursion': parse_known('T-1', ('T', 't')),
        }
