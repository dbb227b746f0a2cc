#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Kreweras 格路：步集 {W, S, NE}
"""

import logging
from math import comb
from typing import Dict, List, Optional, Tuple

from exactarith import QQ, DensePoly, MultiPoly, Ring
from ore import PRecurrence
from series import TruncSeries, kernel_root_Y
from walks import SectionSpec, section_series
from .base import ModelProfile, ReducedEquation, WalkModel, parse_known

logger = logging.getLogger(__name__)

# F(t;x,0) 的极小多项式，按 T 的幂次给出系数
_P_BY_T_POWER = [
    "16*x^3*t^4+108*t^4-72*x*t^3+8*x^2*t^2-2*t+x",
    "96*x^2*t^5-48*x^3*t^4-144*t^4+104*x*t^3-16*x^2*t^2+2*t-x",
    "48*x^4*t^6+192*x*t^6-264*x^2*t^5+64*x^3*t^4+32*t^4-32*x*t^3+9*x^2*t^2",
    "192*x^3*t^7+128*t^7-96*x^4*t^6-192*x*t^6+128*x^2*t^5-32*x^3*t^4",
    "48*x^5*t^8+192*x^2*t^8-192*x^3*t^7+56*x^4*t^6",
    "96*x^4*t^9-48*x^5*t^8",
    "16*x^6*t^10",
]

# 有理参数化：t = R1(U, x)，F(t;x,0) = R2(U, x)
_H = ("U^6*x^3+3*U^4*(U+1)^2*x^2+3*U^2*(U+1)^4*x"
      "+1+6*U+15*U^2+24*U^3+27*U^4+18*U^5+5*U^6")
_R1 = "U*(1+U)*(1+2*U+U^2+U^2*x)^2/h"
_R2 = ("(U^4*x^2+2*U^2*(U+1)^2*x+1+4*U+6*U^2+2*U^3-U^4)*h"
       "/((1+U)^2*(1+2*U+U^2+U^2*x)^4)")

# F(t;0,0) 的极小多项式
_EXCURSION = "64*t^6*T^3+16*t^3*T^2+T-72*t^3*T+54*t^3-1"


class KrewerasModel(WalkModel):
    """Kreweras 模型：截面代数，原点回归有超几何闭式"""

    name = 'kreweras'
    step_text = 'W,S,NE'
    aliases = ('k', 'kreweras')

    def profile(self) -> ModelProfile:
        return ModelProfile(
            name=self.name,
            steps=self.step_text,
            excursion_stride=3,
            unknowns=('U',),
            section_degrees={'U': (6, 10, 6)},
            guess_precision=100,
            notes=['F(t;0,y) = F(t;y,0)（x, y 对称）'],
        )

    def excursion_closed_form(self, n: int) -> int:
        if n < 0 or n % 3:
            return 0
        m = n // 3
        return 4 ** m * comb(3 * m, m) // ((m + 1) * (2 * m + 1))

    def excursion_recurrence(self) -> Tuple[PRecurrence, List[int], int]:
        # (n+6)(2n+9)·a_{n+3} − 54(n+2)(n+1)·a_n = 0
        n = DensePoly([0, 1], QQ, 'n')
        lead = (n + 6) * (n * 2 + 9)
        trail = (n + 2) * (n + 1) * (-54)
        zero = DensePoly.zero(QQ, 'n')
        return PRecurrence([trail, zero, zero, lead]), [1, 0, 0], 1

    def known_polynomials(self) -> Dict[str, MultiPoly]:
        T = MultiPoly.var('T', ('T', 't', 'x'))
        P = MultiPoly(('T', 't', 'x'), {}, QQ)
        for k, text in enumerate(_P_BY_T_POWER):
            P = P + parse_known(text, ('t', 'x')) * T ** k
        return {
            'U': P,
            'excursion': parse_known(_EXCURSION, ('T', 't')),
        }

    def known_texts(self) -> Dict[str, str]:
        return {'R1': _R1, 'R2': _R2, 'h': _H}

    def unknown_series(self, N: int, ring: Ring = QQ) -> Dict[str, TruncSeries]:
        return {'U': section_series(self.steps, SectionSpec('x0', N), ring)}

    def reduced_system(self, N: int, ring: Ring = QQ,
                       g00: Optional[TruncSeries] = None) -> List[ReducedEquation]:
        # U(t,x) = Y/t − (Y/x)·U(t, Y)
        Y = kernel_root_Y(self.steps, N + 1, ring)
        A = Y.div_t(1)
        B = (-Y).shift_x(-1).truncate(N)
        return [ReducedEquation('U', 'U', A, B, Y.truncate(N))]
