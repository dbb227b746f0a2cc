#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Gessel 格路：步集 {E, W, NE, SW}
"""

import logging
from typing import Dict, List, Optional, Tuple

import sympy

from exactarith import QQ, DensePoly, MultiPoly, Ring
from ore import PRecurrence
from series import AlgebraicSeriesSpec, TruncSeries, kernel_root_X, kernel_root_Y, newton_lift
from walks import SectionSpec, section_series
from .base import ModelProfile, ReducedEquation, WalkModel, parse_known

logger = logging.getLogger(__name__)

# g(t) 的八次极小多项式，G(t;0,0) = g(t^2)
_OCTIC = ("-1+48*t-576*t^2-256*t^3"
          "+(1-60*t+912*t^2-512*t^3)*T"
          "+(10*t-312*t^2+624*t^3-512*t^4)*T^2"
          "+(45*t^2-504*t^3-576*t^4)*T^3"
          "+(117*t^3-252*t^4-288*t^5)*T^4"
          "+189*t^4*T^5+189*t^5*T^6+108*t^6*T^7+27*t^7*T^8")


def _unknown_from_x_section(s: TruncSeries) -> TruncSeries:
    """(S(t,x) − S(t,0)) / x"""
    return (s - s.evaluate_x(0)).shift_x(-1).normalized()


def _unknown_from_y_section(s: TruncSeries) -> TruncSeries:
    return _unknown_from_x_section(s.rename('x'))


class GesselModel(WalkModel):
    """Gessel 模型：G(t;x,0) = G00 + x·U，G(t;0,x) = G00 + x·V"""

    name = 'gessel'
    step_text = 'E,W,NE,SW'
    aliases = ('g', 'gessel')

    def profile(self) -> ModelProfile:
        return ModelProfile(
            name=self.name,
            steps=self.step_text,
            excursion_stride=2,
            unknowns=('U', 'V'),
            section_degrees={'U': (24, 44, 32), 'V': (24, 46, 56)},
            operator_shapes={'x0': (11, 96), 'x0@point': (14, 43)},
            guess_precision=200,
            image_precision=1200,
            notes=['G(t;0,0) 由八次多项式给出，作为已知级数处理'],
        )

    def excursion_closed_form(self, n: int) -> int:
        if n < 0 or n % 2:
            return 0
        m = n // 2
        value = (sympy.Integer(16) ** m * sympy.rf(sympy.Rational(5, 6), m) * sympy.rf(sympy.Rational(1, 2), m)
                 / (sympy.rf(sympy.Rational(5, 3), m) * sympy.rf(2, m)))
        return int(value)

    def excursion_recurrence(self) -> Tuple[PRecurrence, List[int], int]:
        # (n+2)(3n+5)·g_{n+1} − 4(6n+5)(2n+1)·g_n = 0，g_n = g(2n; 0, 0)
        n = DensePoly([0, 1], QQ, 'n')
        lead = (n + 2) * (n * 3 + 5)
        trail = (n * 6 + 5) * (n * 2 + 1) * (-4)
        return PRecurrence([trail, lead]), [1], 2

    def known_polynomials(self) -> Dict[str, MultiPoly]:
        octic = parse_known(_OCTIC, ('T', 't'))
        t = MultiPoly.var('t', ('T', 't'))
        return {
            'excursion_half': octic,
            'excursion': octic.compose({'t': t * t}),
        }

    def half_excursion_series(self, N: int, ring: Ring = QQ) -> TruncSeries:
        """g(t)，八次多项式在 T(0) = 1 处的根"""
        octic = self.known_polynomials()['excursion_half']
        return newton_lift(AlgebraicSeriesSpec(octic, 1, ring=ring), N)

    def excursion_from_octic(self, N: int, ring: Ring = QQ) -> TruncSeries:
        """G(t;0,0) = g(t^2)"""
        g = self.half_excursion_series((N + 1) // 2, ring)
        data = ring.zeros((N, 1))
        data[0::2, 0] = g.data[:, 0]
        return TruncSeries(ring, data, 0, 'x')

    def unknown_transform(self, name: str):
        if name == 'V':
            return '0y', _unknown_from_y_section
        return 'x0', _unknown_from_x_section

    def unknown_series(self, N: int, ring: Ring = QQ) -> Dict[str, TruncSeries]:
        x0 = section_series(self.steps, SectionSpec('x0', N), ring)
        y0 = section_series(self.steps, SectionSpec('0y', N), ring)
        return {'U': _unknown_from_x_section(x0), 'V': _unknown_from_y_section(y0)}

    def reduced_system(self, N: int, ring: Ring = QQ,
                       g00: Optional[TruncSeries] = None) -> List[ReducedEquation]:
        # U = Y/t − (1+Y)·G00/x − (Y(1+Y)/x)·V(t,Y)
        # V = X/((1+x)t) − G00/x − (X/((1+x)x))·U(t,X)
        if g00 is None:
            g00 = self.excursion_series(N, ring)
        g00 = g00.truncate(N).rename('x')
        Y = kernel_root_Y(self.steps, N + 1, ring)
        X = kernel_root_X(self.steps, N + 1, ring).rename('x')
        one_plus_Y = Y.truncate(N) + 1
        A1 = Y.div_t(1) - (one_plus_Y * g00).shift_x(-1)
        B1 = -(Y.truncate(N) * one_plus_Y).shift_x(-1)
        Xq = X.exact_div_poly(DensePoly([1, 1], ring, 'x'))
        A2 = Xq.div_t(1) - g00.shift_x(-1)
        B2 = -Xq.truncate(N).shift_x(-1)
        return [
            ReducedEquation('U', 'V', A1, B1, Y.truncate(N)),
            ReducedEquation('V', 'U', A2, B2, X.truncate(N)),
        ]
