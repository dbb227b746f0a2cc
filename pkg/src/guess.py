#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
猜测模块
由级数前缀猜测代数方程与线性微分算子：素数域上的 Hermite-Padé 逼近、ansatz 扫描、
(素数, 取值点) 模像的有理函数插值，以及中国剩余定理 + 有理数重构。
"""

import logging
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Dict, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np

from exactarith import (QQ, DensePoly, MultiPoly, PrimeField, RatRecon, Ring, WalkProveError,
                        ArithmeticDomainError, ReconstructionError, convolve_mod, crt_arrays,
                        format_poly, poly_gcd, rat_interp, rational_reconstruct)
from ore import (OreOperator, apply_operator, format_operator, gcrd_many, operator_from_multipoly,
                 operator_to_multipoly)
from series import TruncSeries
from walks import SectionSpec, StepSet, section_series

logger = logging.getLogger(__name__)

Candidate = Union[MultiPoly, OreOperator]

KINDS = ('algebraic', 'differential')


class GuessError(WalkProveError):
    """模像形状不一致、重构需要更多素数或取值点"""


@dataclass
class AnsatzGrid:
    """
    ansatz 网格

    kind 为 algebraic 时主次数是 deg_T，为 differential 时是算子阶数。
    每个主次数取满足 margin_ratio·未知数个数 ≤ 可用方程数 的最大 t 次数。
    """
    kind: str = 'algebraic'
    max_main_degree: int = 8
    max_t_degree: Optional[int] = None
    N: int = 100
    margin_ratio: float = 1.2
    min_main_degree: int = 1

    def __post_init__(self):
        if self.kind not in KINDS:
            raise GuessError(f"未知的猜测类型 {self.kind!r}，可用: {', '.join(KINDS)}")
        if self.N < 2:
            raise GuessError(f"精度 N 必须 ≥ 2: {self.N}")
        if self.margin_ratio < 1:
            raise GuessError(f"margin_ratio 不能小于 1: {self.margin_ratio}")

    def equations(self, r: int) -> int:
        """主次数 r 时可用的方程数（求导每次损失一阶）"""
        return self.N - r if self.kind == 'differential' else self.N

    def staircase(self) -> Iterator[Tuple[int, int]]:
        """按主次数递增给出 (主次数, t 次数)"""
        for r in range(self.min_main_degree, self.max_main_degree + 1):
            eqs = self.equations(r)
            d = int(eqs // (self.margin_ratio * (r + 1))) - 1
            if (r + 1) * (d + 1) >= eqs:
                d -= 1
            if self.max_t_degree is not None:
                d = min(d, self.max_t_degree)
            if d < 0:
                logger.debug(f"主次数 {r}：精度 {self.N} 不足以容纳 ansatz")
                break
            yield r, d


@dataclass
class GuessReport:
    """猜测结果"""
    candidate: Optional[Candidate]
    kind: str
    precision: int
    primes: List[int] = field(default_factory=list)
    points: List[int] = field(default_factory=list)
    margin: int = 0                                   # 多匹配的系数个数
    ansatz: Optional[Tuple[int, int]] = None          # (主次数, t 次数)
    degenerate: bool = False
    relations: List[Candidate] = field(default_factory=list)
    stabilized_at: Optional[int] = None

    @property
    def found(self) -> bool:
        return self.candidate is not None

    def degrees(self) -> Dict[str, int]:
        c = self.candidate
        if c is None:
            return {}
        if isinstance(c, OreOperator):
            return {'order': c.order, 't': c.degree()}
        if 'Dt' in c.gens:
            return {'order': c.degree('Dt'), **{g: c.degree(g) for g in c.free_gens() if g != 'Dt'}}
        return {g: c.degree(g) for g in c.free_gens()}

    def summary(self) -> str:
        if self.candidate is None:
            return f"未找到关系（最大精度 {self.precision}）"
        degs = self.degrees()
        if 'order' in degs:
            parts = [f"order={degs['order']}", f"degt={degs.get('t', 0)}"]
            if 'x' in degs:
                parts.append(f"degx={degs['x']}")
        else:
            parts = [f"deg{g}={d}" for g, d in degs.items()]
        return ' '.join(parts)

    def candidate_text(self) -> Optional[str]:
        if self.candidate is None:
            return None
        if isinstance(self.candidate, OreOperator):
            return format_operator(self.candidate)
        return format_poly(self.candidate)

    def to_dict(self) -> Dict:
        return {
            'kind': self.kind,
            'candidate': self.candidate_text(),
            'ring': repr(self.candidate.ring) if self.candidate is not None else None,
            'degrees': self.degrees(),
            'precision': self.precision,
            'primes': list(self.primes),
            'points': [p for p in self.points if p is not None],
            'margin': self.margin,
            'ansatz': list(self.ansatz) if self.ansatz else None,
            'degenerate': self.degenerate,
            'relations': len(self.relations),
            'stabilized_at': self.stabilized_at,
        }


# ---------------------------------------------------------------------------
# Hermite-Padé
# ---------------------------------------------------------------------------

def _column(v: TruncSeries, N: int, p: int) -> np.ndarray:
    return np.asarray(v.truncate(N).coefficient_list(), dtype=np.int64) % p


def _relation_residual_zero(rel: List[DensePoly], columns: List[np.ndarray], N: int, p: int) -> bool:
    total = np.zeros(N, dtype=np.int64)
    for c, col in zip(rel, columns):
        if c.is_zero():
            continue
        prod = convolve_mod(np.asarray(c.coeffs, dtype=np.int64), col, p)[:N]
        total[:len(prod)] = (total[:len(prod)] + prod) % p
    return not total.any()


def hermite_pade(vectors: Sequence[TruncSeries], degrees: Sequence[int], N: int) -> List[List[DensePoly]]:
    """
    Hermite-Padé 逼近：所有 Σ c_i(t)·v_i ≡ 0 mod t^N、deg c_i ≤ d_i 的关系

    逐阶构造移位 -d 下的序基：每阶在残差非零的行中选移位次数最小者为主元，
    消去其余行后把主元行乘以 t。结束时移位次数 ≤ 0 的行生成界内的全部关系。

    Args:
        vectors: 素数域上不含 x 的截断级数
        degrees: 各系数的次数上界
        N: 匹配阶

    Returns:
        关系列表，每个关系为 DensePoly 列表；可能为空
    """
    if not vectors:
        raise GuessError("Hermite-Padé 需要至少一个级数")
    ring = vectors[0].ring
    if not ring.characteristic:
        raise GuessError("Hermite-Padé 只在素数域上计算")
    if len(degrees) != len(vectors):
        raise GuessError(f"次数界个数 {len(degrees)} 与级数个数 {len(vectors)} 不一致")
    p = ring.p
    m = len(vectors)
    for v in vectors:
        if v.order < N:
            raise GuessError(f"级数精度 {v.order} 小于匹配阶 {N}")
    columns = [_column(v, N, p) for v in vectors]
    R = np.array(columns, dtype=np.int64).reshape(m, N)
    degs = np.asarray(degrees, dtype=np.int64)
    sdeg = -degs.copy()
    top = int(degs.max())
    P = np.zeros((m, m, top + 2), dtype=np.int64)
    for i in range(m):
        P[i, i, 0] = 1

    for k in range(N):
        e = R[:, k].copy()
        active = np.flatnonzero(e)
        if active.size == 0:
            continue
        piv = int(active[np.argmin(sdeg[active])])
        inv = pow(int(e[piv]), p - 2, p)
        others = active[active != piv]
        if others.size:
            f = e[others] * inv % p
            R[others] = (R[others] - f[:, None] * R[piv][None, :] % p) % p
            P[others] = (P[others] - f[:, None, None] * P[piv][None, :, :] % p) % p
        need = int(sdeg.max()) + top + 3
        if P.shape[2] < need:
            P = np.concatenate([P, np.zeros((m, m, need - P.shape[2]), dtype=np.int64)], axis=2)
        P[piv, :, 1:] = P[piv, :, :-1].copy()
        P[piv, :, 0] = 0
        R[piv, 1:] = R[piv, :-1].copy()
        R[piv, 0] = 0
        sdeg[piv] += 1

    relations = []
    for j in range(m):
        polys = [DensePoly(P[j, i], ring, 't') for i in range(m)]
        actual = max((c.degree() - int(degs[i]) for i, c in enumerate(polys) if not c.is_zero()), default=None)
        if actual is None or actual > 0:
            continue
        if not _relation_residual_zero(polys, columns, N, p):
            logger.error(f"Hermite-Padé 关系复核失败（行 {j}），已丢弃")
            continue
        relations.append((actual, j, polys))
    relations.sort(key=lambda item: (item[0], item[1]))
    logger.debug(f"Hermite-Padé: {m} 个级数, N={N}, 界 {list(degrees)} -> {len(relations)} 个关系")
    return [polys for _, _, polys in relations]


# ---------------------------------------------------------------------------
# 单个模像上的猜测
# ---------------------------------------------------------------------------

def _require_prime_field(f: TruncSeries) -> PrimeField:
    if not f.ring.characteristic:
        raise GuessError("guess_algeq / guess_diffeq 需要素数域上的级数；有理数级数请用 guess_over_rationals")
    return f.ring


def _algebraic_candidate(rel: List[DensePoly], ring: Ring) -> MultiPoly:
    terms = {}
    for i, c in enumerate(rel):
        for a, v in enumerate(c.coeffs.tolist()):
            if v:
                terms[(i, a)] = v
    return MultiPoly(('T', 't'), terms, ring).canonical().with_gens(('T', 't'))


def _differential_candidate(rel: List[DensePoly]) -> OreOperator:
    return OreOperator.from_polys(rel).primitive()


def _candidate_key(c: Candidate) -> Tuple[int, int, int]:
    if isinstance(c, OreOperator):
        polys = c.to_polys()
        return c.order, c.degree(), sum(int(np.count_nonzero(p.coeffs)) for p in polys)
    main = 'Dt' if 'Dt' in c.gens else 'T'
    return c.degree(main), c.degree('t'), len(c.terms)


def same_candidate(a: Optional[Candidate], b: Optional[Candidate]) -> bool:
    """规范化后相同"""
    if a is None or b is None:
        return False
    if isinstance(a, OreOperator) and isinstance(b, OreOperator):
        return a.ring == b.ring and format_operator(a) == format_operator(b)
    if isinstance(a, MultiPoly) and isinstance(b, MultiPoly):
        return a.ring == b.ring and a.is_canonical_equal(b)
    return False


def guess_algeq(f: TruncSeries, grid: AnsatzGrid) -> Optional[GuessReport]:
    """
    猜测 P(f, t) ≡ 0 mod t^N

    Args:
        f: 素数域上不含 x 的级数，精度 ≥ grid.N
        grid: ansatz 网格（kind 应为 algebraic）

    Returns:
        GuessReport；网格内无关系时返回 None
    """
    ring = _require_prime_field(f)
    N = grid.N
    if f.order < N:
        raise GuessError(f"级数精度 {f.order} 小于 N={N}")
    f = f.truncate(N)
    if f.is_zero():
        T = MultiPoly.var('T', ('T', 't'), ring)
        return GuessReport(T, 'algebraic', N, [ring.p], margin=N, ansatz=(1, 0),
                           degenerate=True, relations=[T])
    powers = [TruncSeries.constant(1, ring, N, f.var)]
    for r, d in grid.staircase():
        while len(powers) <= r:
            powers.append(powers[-1] * f)
        rels = hermite_pade(powers[:r + 1], [d] * (r + 1), N)
        if not rels:
            continue
        cands = sorted((_algebraic_candidate(rel, ring) for rel in rels), key=_candidate_key)
        margin = N - (r + 1) * (d + 1)
        logger.debug(f"代数方程: deg_T ≤ {r}, deg_t ≤ {d} 处找到 {len(cands)} 个关系")
        return GuessReport(cands[0], 'algebraic', N, [ring.p], margin=margin, ansatz=(r, d),
                           relations=cands)
    return None


def guess_diffeq(f: TruncSeries, grid: AnsatzGrid) -> Optional[GuessReport]:
    """
    猜测线性微分算子 L 使 L(f) ≡ 0 mod t^(N−r)，r 为 ansatz 阶数

    Args:
        f: 素数域上不含 x 的级数，精度 ≥ grid.N
        grid: ansatz 网格（kind 应为 differential）

    Returns:
        GuessReport；网格内无关系时返回 None
    """
    ring = _require_prime_field(f)
    N = grid.N
    if f.order < N:
        raise GuessError(f"级数精度 {f.order} 小于 N={N}")
    f = f.truncate(N)
    if f.is_zero():
        one = OreOperator([1], ring, 't')
        return GuessReport(one, 'differential', N, [ring.p], margin=N, ansatz=(0, 0),
                           degenerate=True, relations=[one])
    derivs = [f]
    for r, d in grid.staircase():
        while len(derivs) <= r:
            derivs.append(derivs[-1].derivative())
        eqs = grid.equations(r)
        rels = hermite_pade([derivs[i].truncate(eqs) for i in range(r + 1)], [d] * (r + 1), eqs)
        if not rels:
            continue
        cands = sorted((_differential_candidate(rel) for rel in rels), key=_candidate_key)
        margin = eqs - (r + 1) * (d + 1)
        logger.debug(f"微分算子: 阶 ≤ {r}, 次数 ≤ {d} 处找到 {len(cands)} 个算子")
        return GuessReport(_minimal_operator(cands, f), 'differential', N, [ring.p], margin=margin,
                           ansatz=(r, d), relations=cands)
    return None


def _minimal_operator(cands: List[OreOperator], f: TruncSeries) -> OreOperator:
    """解空间基的 GCRD；它不再零化 f 时退回最简的基元素"""
    if len(cands) == 1:
        return cands[0]
    minimal = gcrd_many(cands).primitive()
    if minimal.order < 1 or minimal.order >= f.order or not apply_operator(minimal, f).is_zero():
        logger.warning(f"{len(cands)} 个算子的 GCRD 不零化级数，保留最简的一个")
        return cands[0]
    logger.info(f"{len(cands)} 个算子的 GCRD: 阶 {minimal.order}, 次数 {minimal.degree()}")
    return minimal


def _guess(f: TruncSeries, grid: AnsatzGrid) -> Optional[GuessReport]:
    return guess_algeq(f, grid) if grid.kind == 'algebraic' else guess_diffeq(f, grid)


def _image_poly(report: Optional[GuessReport]) -> Optional[MultiPoly]:
    """模像的规范多项式形式（算子写成 (Dt, t) 上的多项式）"""
    if report is None or report.candidate is None:
        return None
    c = report.candidate
    if isinstance(c, OreOperator):
        return operator_to_multipoly(c).canonical()
    return c.canonical()


# ---------------------------------------------------------------------------
# 模像合并
# ---------------------------------------------------------------------------

def _poly_lcm(a: DensePoly, b: DensePoly) -> DensePoly:
    return (a * b).exact_div(poly_gcd(a, b)).monic()


def _rational_lift(images: Sequence[Tuple[int, MultiPoly]]) -> Tuple[MultiPoly, List[int]]:
    """
    多个素数上的首一模像 -> 有理系数多项式

    逐个加入素数做中国剩余定理与有理数重构，连续两次结果相同即停止。
    """
    gens = images[0][1].gens
    support = sorted(images[0][1].terms)
    for p, img in images[1:]:
        img = img.with_gens(gens)
        if sorted(img.terms) != support:
            raise GuessError(f"素数 {p} 上的模像支撑与其它素数不一致（坏素数？）")
    used: List[int] = []
    residues: List[np.ndarray] = []
    previous = None
    for p, img in images:
        img = img.with_gens(gens)
        used.append(p)
        residues.append(np.array([img.terms[m] for m in support], dtype=np.int64))
        combined, modulus = crt_arrays(residues, used)
        try:
            values = [rational_reconstruct(RatRecon(int(v), modulus)) for v in combined.tolist()]
        except ReconstructionError:
            logger.debug(f"{len(used)} 个素数时有理数重构失败，继续加入素数")
            previous = None
            continue
        if previous is not None and values == previous:
            logger.info(f"有理系数在 {len(used)} 个素数后稳定")
            return MultiPoly(gens, dict(zip(support, values)), QQ), used
        previous = values
    if previous is not None and len(used) == 1:
        logger.warning("只用一个素数完成重构，结果未经第二个素数确认")
        return MultiPoly(gens, dict(zip(support, previous)), QQ), used
    raise GuessError(f"{len(used)} 个素数不足以重构有理系数，请增加素数")


def _majority_shape(results: Dict[Tuple[int, Optional[int]], Optional[MultiPoly]]):
    shapes = Counter(frozenset(img.terms) for img in results.values() if img is not None)
    if not shapes:
        raise GuessError("所有 (素数, 取值点) 上都没有找到关系，请提高精度或放宽 ansatz")
    shape, _ = shapes.most_common(1)[0]
    bad = [key for key, img in results.items() if img is None or frozenset(img.terms) != shape]
    if len(bad) > 0.1 * len(results):
        raise GuessError(f"模像形状不一致，问题 (素数, 取值点): {bad}")
    if bad:
        logger.warning(f"丢弃 {len(bad)} 个形状不一致的模像: {bad}")
    return shape, bad


def _interpolate_prime(p: int, images: List[Tuple[int, MultiPoly]], shape) -> MultiPoly:
    """同一素数上各取值点的模像 -> x 的多项式系数（清分母后首一）"""
    ring = PrimeField(p)
    K = len(images)
    bounds = ((K - 1) // 2, (K - 1) // 2)
    funcs = {}
    for mono in sorted(shape):
        pts = [(x0, img.terms[mono]) for x0, img in images]
        try:
            funcs[mono] = rat_interp(pts, bounds, ring, 'x')
        except ReconstructionError as e:
            raise GuessError(f"素数 {p} 上有理函数插值失败（{K} 个取值点不足？）: {e}")
    den = DensePoly.one(ring, 'x')
    for rf in funcs.values():
        den = _poly_lcm(den, rf.den)
    gens = images[0][1].gens + ('x',)
    terms = {}
    for mono, rf in funcs.items():
        num = rf.num * den.exact_div(rf.den)
        for e, c in enumerate(num.coeffs.tolist()):
            if c:
                terms[mono + (e,)] = c
    return MultiPoly(gens, terms, ring).canonical()


def _finish_candidate(poly: MultiPoly, kind: str) -> Candidate:
    poly = poly.canonical()
    if kind == 'differential' and 'x' not in poly.free_gens():
        return operator_from_multipoly(poly.with_gens(('Dt', 't'))).primitive()
    return poly


def modular_guess_pipeline(steps: StepSet, section: SectionSpec, grid: AnsatzGrid,
                           primes: Sequence[int], points: Sequence[int] = (),
                           transform: Optional[Callable[[TruncSeries], TruncSeries]] = None,
                           threads: Optional[int] = None) -> GuessReport:
    """
    模块化猜测：对每个 (p, x0) 猜测模像，按 x 做有理函数插值，再跨素数重构有理系数

    Args:
        steps: 步集
        section: 截面（'xy' 除外）
        grid: ansatz 网格
        primes: 素数列表
        points: x 的取值点；截面不含 x 时忽略
        transform: 截面级数到目标级数的变换（例如 (S − S(0))/x）
        threads: 并行线程数

    Returns:
        候选定义在 Q 上的 GuessReport；含 x 时候选为 (T|Dt, t, x) 上的多项式

    Raises:
        GuessError: 形状不一致、插值或重构失败
    """
    if section.which == 'xy':
        raise GuessError("完整生成函数不能直接猜测，请选择截面")
    if not primes:
        raise GuessError("至少需要一个素数")
    jobs = []
    x_free = None
    for p in primes:
        ring = PrimeField(p)
        s = section_series(steps, SectionSpec(section.which, grid.N), ring)
        if transform is not None:
            s = transform(s)
        s = s.normalized()
        free = s.width == 1 and s.xval == 0
        if x_free is None:
            x_free = free
        if x_free:
            jobs.append((p, None, s))
        else:
            if not points:
                raise GuessError("截面依赖 x，需要给出取值点")
            jobs.extend((p, int(x0), s) for x0 in points)
        logger.info(f"素数 {p}: 截面 {section.which} 计数完成，{len(jobs)} 个任务待猜测")

    def run(job):
        p, x0, s = job
        f = s if x0 is None else s.evaluate_x(x0)
        return (p, x0), _guess(f, grid)

    with ThreadPoolExecutor(max_workers=threads) as pool:
        reports = dict(pool.map(run, jobs))
    images = {key: _image_poly(rep) for key, rep in reports.items()}
    shape, bad = _majority_shape(images)
    good = [key for key in images if key not in bad]

    per_prime: List[Tuple[int, MultiPoly]] = []
    for p in primes:
        keys = [key for key in good if key[0] == p]
        if not keys:
            logger.warning(f"素数 {p} 上没有可用模像，跳过")
            continue
        if x_free:
            per_prime.append((p, images[keys[0]]))
        else:
            pts = sorted((key[1], images[key]) for key in keys)
            per_prime.append((p, _interpolate_prime(p, pts, shape)))
            logger.info(f"素数 {p}: {len(pts)} 个取值点插值完成")
    poly, used = _rational_lift(per_prime)
    candidate = _finish_candidate(poly, grid.kind)
    first = reports[good[0]]
    margin = min(reports[key].margin for key in good)
    report = GuessReport(candidate, grid.kind, grid.N, used,
                         [] if x_free else sorted({key[1] for key in good}),
                         margin=margin, ansatz=first.ansatz, relations=[candidate])
    logger.info(f"模块化猜测完成: {report.summary()}")
    return report


def guess_at_point(steps: StepSet, section: SectionSpec, grid: AnsatzGrid, p: int,
                   x0: Optional[int] = None,
                   transform: Optional[Callable[[TruncSeries], TruncSeries]] = None) -> Optional[GuessReport]:
    """单个 (p, x0) 上的模猜测，候选保持在 GF(p) 上"""
    ring = PrimeField(p)
    s = section_series(steps, SectionSpec(section.which, grid.N), ring)
    if transform is not None:
        s = transform(s)
    s = s.normalized()
    if x0 is not None:
        s = s.evaluate_x(x0)
    report = _guess(s, grid)
    if report is not None:
        report.points = [x0] if x0 is not None else []
    return report


def guess_point_over_rationals(steps: StepSet, section: SectionSpec, grid: AnsatzGrid, primes: Sequence[int],
                               x0: int, transform: Optional[Callable[[TruncSeries], TruncSeries]] = None
                               ) -> GuessReport:
    """
    截面在 x = x0 处特化后的级数，逐素数计数与猜测，再重构有理系数

    素数逐个加入，重构结果连续两次相同即停止，不必对所有素数计数。

    Raises:
        GuessError: 素数用尽仍未稳定，或模像形状不一致
    """
    images: List[Tuple[int, MultiPoly]] = []
    first: Optional[GuessReport] = None
    for p in primes:
        rep = guess_at_point(steps, section, grid, p, x0=x0, transform=transform)
        img = _image_poly(rep)
        if img is None:
            logger.warning(f"素数 {p}、x0 = {x0} 上未找到关系，跳过")
            continue
        if images and sorted(img.terms) != sorted(images[0][1].terms):
            logger.warning(f"素数 {p} 上的模像形状与其它素数不同，跳过")
            continue
        first = first or rep
        images.append((p, img))
        if len(images) < 2:
            continue
        try:
            poly, used = _rational_lift(images)
        except GuessError:
            continue
        if len(used) >= 2:
            candidate = _finish_candidate(poly, grid.kind)
            report = GuessReport(candidate, grid.kind, grid.N, used, [x0], margin=first.margin,
                                 ansatz=first.ansatz, relations=[candidate])
            logger.info(f"x0 = {x0} 处的有理数猜测完成: {report.summary()}")
            return report
    raise GuessError(f"{len(images)} 个素数上的模像不足以重构 x0 = {x0} 处的有理系数")


def guess_over_rationals(f: TruncSeries, kind: str, grid: AnsatzGrid,
                         primes: Sequence[int]) -> GuessReport:
    """
    有理系数、不含 x 的级数：逐素数猜测后重构

    Raises:
        GuessError: 所有素数上都未找到关系或重构失败
    """
    grid = replace(grid, kind=kind)
    images: Dict[Tuple[int, Optional[int]], Optional[MultiPoly]] = {}
    reports = {}
    for p in primes:
        try:
            fp = f.truncate(grid.N).reduce_mod(p)
        except ArithmeticDomainError as e:
            logger.warning(f"素数 {p} 整除级数系数的分母，跳过: {e}")
            continue
        rep = _guess(fp, grid)
        images[(p, None)] = _image_poly(rep)
        reports[(p, None)] = rep
        if rep is not None and rep.degenerate:
            zero = MultiPoly.var('T', ('T', 't'), QQ) if kind == 'algebraic' else OreOperator([1], QQ, 't')
            return GuessReport(zero, kind, grid.N, [p], margin=grid.N, ansatz=rep.ansatz,
                               degenerate=True, relations=[zero])
    if not images:
        raise GuessError("没有可用的素数")
    shape, bad = _majority_shape(images)
    per_prime = [(key[0], images[key]) for key in images if key not in bad]
    poly, used = _rational_lift(per_prime)
    candidate = _finish_candidate(poly, kind)
    first = reports[(used[0], None)]
    report = GuessReport(candidate, kind, grid.N, used, margin=first.margin, ansatz=first.ansatz,
                         relations=[candidate])
    logger.info(f"有理数猜测完成: {report.summary()}")
    return report


def precision_doubling(source: Union[TruncSeries, Callable[[int], TruncSeries]], grid: AnsatzGrid,
                       max_precision: int, primes: Sequence[int] = ()) -> GuessReport:
    """
    精度加倍：N, 2N, … 直到连续两次得到相同的规范候选

    Args:
        source: 级数（按精度截断）或 N -> 级数 的函数
        grid: 初始 ansatz 网格
        max_precision: 最大精度
        primes: 有理数级数使用的素数

    Returns:
        稳定的 GuessReport（stabilized_at 为稳定时的精度）；预算用尽时候选为 None
    """
    N = grid.N
    previous: Optional[GuessReport] = None
    tried = N
    while N <= max_precision:
        f = source(N) if callable(source) else source.truncate(N)
        g = replace(grid, N=N)
        if f.ring.characteristic:
            report = _guess(f, g)
        else:
            try:
                report = guess_over_rationals(f, grid.kind, g, primes)
            except GuessError as e:
                logger.debug(f"N={N}: {e}")
                report = None
        tried = N
        logger.info(f"精度加倍: N={N} -> {report.summary() if report else '无关系'}")
        if report is not None and previous is not None and same_candidate(report.candidate, previous.candidate):
            report.stabilized_at = N
            return report
        previous = report
        N *= 2
    logger.warning(f"精度加倍在 N={tried} 内未稳定")
    return GuessReport(None, grid.kind, tried)
