#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
格路猜测与证明工具
功能：计数、猜测代数方程或微分算子、核方法验证、p-曲率检查、证书复核

步集记号：N, S, E, W, NE, NW, SE, SW，用逗号分隔，
例如 Gessel = "E,W,NE,SW"，Kreweras = "W,S,NE"。

退出码：0 成功；1 数学上的失败（没有找到关系、验证未通过）；2 用法错误。
"""

import argparse
import json
import logging
import os
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from sympy import primerange

from certificate_store import CertificateStore
from exactarith import QQ, MultiPoly, PrimeField, WalkProveError, load_primes
from guess import (AnsatzGrid, GuessError, GuessReport, guess_at_point, guess_point_over_rationals,
                   modular_guess_pipeline, precision_doubling)
from kernelproof import DEFAULT_BUDGET, ProofConfig, recheck_certificate, run_proof_pipeline
from ore import OperatorError, OreOperator, p_curvature_zero, parse_operator
from walks import SectionSpec, StepSet, WalkError, build_walk_table, count, section_series
from walk_models import model_for_steps

logger = logging.getLogger(__name__)

EXIT_OK, EXIT_FAILED, EXIT_USAGE = 0, 1, 2

DEFAULT_CONFIG: Dict[str, Dict[str, Any]] = {
    "paths": {
        "output_dir": "output",
        "certificate_file": "output/certificate.json",
        "log_file": "walkprove.log",
        "primes_file": None,
    },
    "arith": {
        "prime_count": 3,
        "prime_bits": 31,
        "resultant_budget": DEFAULT_BUDGET,
    },
    "walks": {
        "steps": "W,S,NE",
        "N": 100,
    },
    "guess": {
        "kind": "algebraic",
        "section": "x0",
        "N": 0,
        "min_main_degree": 1,
        "max_main_degree": 8,
        "max_t_degree": None,
        "points": list(range(2, 22)),
        "margin_ratio": 1.2,
        "max_precision": 0,
    },
    "verify": {
        "mode": "series",
        "N": 0,
        "exact_N": 12,
        "max_N": 0,
        "kernel_N": 60,
        "uniqueness_N": 30,
        "pcurv_primes": [int(p) for p in primerange(5, 30)],
    },
    "runtime": {
        "threads": None,
    },
    "logging": {
        "level": "INFO",
        "console_output": True,
        "file_output": True,
        "encoding": "utf-8",
    },
}

# (节, 键) -> RunConfig 字段
_CONFIG_FIELDS = {
    ("paths", "output_dir"): "output_dir",
    ("paths", "certificate_file"): "certificate_file",
    ("paths", "log_file"): "log_file",
    ("paths", "primes_file"): "primes_file",
    ("arith", "prime_count"): "prime_count",
    ("arith", "prime_bits"): "prime_bits",
    ("arith", "resultant_budget"): "budget",
    ("walks", "steps"): "steps",
    ("walks", "N"): "N",
    ("guess", "kind"): "kind",
    ("guess", "section"): "section",
    ("guess", "N"): "guess_N",
    ("guess", "min_main_degree"): "min_main_degree",
    ("guess", "max_main_degree"): "max_main_degree",
    ("guess", "max_t_degree"): "max_t_degree",
    ("guess", "points"): "points",
    ("guess", "margin_ratio"): "margin_ratio",
    ("guess", "max_precision"): "max_precision",
    ("verify", "mode"): "mode",
    ("verify", "N"): "verify_N",
    ("verify", "max_N"): "max_verify_N",
    ("verify", "kernel_N"): "kernel_N",
    ("verify", "uniqueness_N"): "uniqueness_N",
    ("verify", "exact_N"): "exact_N",
    ("verify", "pcurv_primes"): "pcurv_primes",
    ("runtime", "threads"): "threads",
    ("logging", "level"): "log_level",
    ("logging", "console_output"): "console_output",
    ("logging", "file_output"): "file_output",
    ("logging", "encoding"): "encoding",
}


@dataclass
class RunConfig:
    """一次命令运行的全部参数（命令行选项覆盖配置文件）"""
    steps: str = "W,S,NE"
    N: int = 100
    section: str = "x0"
    kind: str = "algebraic"
    guess_N: int = 0
    min_main_degree: int = 1
    max_main_degree: int = 8
    max_t_degree: Optional[int] = None
    points: List[int] = field(default_factory=lambda: list(range(2, 22)))
    margin_ratio: float = 1.2
    max_precision: int = 0
    mode: str = "series"
    verify_N: int = 0
    max_verify_N: int = 0
    kernel_N: int = 60
    uniqueness_N: int = 30
    exact_N: int = 12
    pcurv_primes: List[int] = field(default_factory=lambda: [int(p) for p in primerange(5, 30)])
    prime_count: int = 3
    prime_bits: int = 31
    budget: int = DEFAULT_BUDGET
    threads: Optional[int] = None
    output_dir: str = "output"
    certificate_file: str = "output/certificate.json"
    log_file: str = "walkprove.log"
    primes_file: Optional[str] = None
    log_level: str = "INFO"
    console_output: bool = True
    file_output: bool = True
    encoding: str = "utf-8"

    @classmethod
    def from_dict(cls, config: Dict[str, Dict[str, Any]]) -> 'RunConfig':
        """由嵌套配置构造，未知的键忽略"""
        values = {}
        for (section, key), name in _CONFIG_FIELDS.items():
            if key in config.get(section, {}):
                values[name] = config[section][key]
        return cls(**values)

    def primes(self) -> List[int]:
        return load_primes(self.primes_file, self.prime_count, self.prime_bits)

    def grid(self, N: int, kind: Optional[str] = None) -> AnsatzGrid:
        return AnsatzGrid(kind or self.kind, max_main_degree=self.max_main_degree,
                          max_t_degree=self.max_t_degree, N=N, margin_ratio=self.margin_ratio,
                          min_main_degree=self.min_main_degree)

    def proof_config(self) -> ProofConfig:
        return ProofConfig(
            mode=self.mode,
            guess_N=self.guess_N,
            verify_N=self.verify_N,
            max_verify_N=self.max_verify_N,
            kernel_N=self.kernel_N,
            uniqueness_N=self.uniqueness_N,
            exact_N=self.exact_N,
            primes=self.primes(),
            points=list(self.points),
            margin_ratio=self.margin_ratio,
            max_main_degree=self.max_main_degree,
            pcurv_primes=list(self.pcurv_primes),
            budget=self.budget,
            threads=self.threads,
            certificate_file=self.certificate_file,
        )


def load_config(path: Optional[str]) -> Dict[str, Dict[str, Any]]:
    """
    读取配置文件并与缺省值合并

    Raises:
        FileNotFoundError: 显式给出的配置文件不存在
    """
    config = {section: dict(values) for section, values in DEFAULT_CONFIG.items()}
    if path is None:
        if not Path('config.json').exists():
            return config
        path = 'config.json'
    config_path = Path(path)
    if not config_path.exists():
        raise FileNotFoundError(f"配置文件不存在: {config_path}")
    with open(config_path, 'r', encoding='utf-8') as f:
        loaded = json.load(f)
    for section, values in loaded.items():
        if isinstance(values, dict):
            config.setdefault(section, {}).update(values)
    return config


def dump_config(config: Dict[str, Dict[str, Any]]) -> List[str]:
    """展开为 section.key=value 行"""
    lines = []
    for section, values in config.items():
        if not isinstance(values, dict):
            continue
        for key, value in values.items():
            text = ','.join(str(v) for v in value) if isinstance(value, list) else value
            lines.append(f"{section}.{key}={'' if text is None else text}")
    return lines


def setup_logging(cfg: RunConfig) -> None:
    """配置日志（只在入口调用一次）"""
    handlers: List[logging.Handler] = []
    if cfg.file_output:
        handlers.append(logging.FileHandler(cfg.log_file, encoding=cfg.encoding))
    if cfg.console_output:
        handlers.append(logging.StreamHandler())
    if not handlers:
        handlers.append(logging.NullHandler())
    logging.basicConfig(
        level=getattr(logging, str(cfg.log_level).upper(), logging.INFO),
        format='%(asctime)s - %(levelname)s - %(message)s',
        handlers=handlers,
    )


def _parse_pair(text: str) -> tuple:
    parts = [int(v) for v in text.split(',')]
    if len(parts) != 2:
        raise ValueError(f"需要 i,j 形式: {text!r}")
    return parts[0], parts[1]


def _parse_primes(text: Optional[str], fallback: List[int]) -> List[int]:
    """"3,5,7" 或区间 "3:30"（左闭右开）"""
    if text is None:
        return list(fallback)
    text = text.strip()
    if not text:
        return []
    if ':' in text:
        lo, hi = (int(v) for v in text.split(':'))
        return [int(p) for p in primerange(lo, hi)]
    return [int(v) for v in text.split(',') if v.strip()]


def _max_digits(candidate) -> int:
    if isinstance(candidate, OreOperator):
        values = [c for poly in candidate.to_polys() for c in poly.coeffs.tolist()]
    elif isinstance(candidate, MultiPoly):
        values = list(candidate.terms.values())
    else:
        return 0
    digits = 0
    for v in values:
        v = Fraction(v)
        digits = max(digits, len(str(abs(v.numerator))), len(str(v.denominator)))
    return digits


def _tag(steps: StepSet) -> str:
    return str(steps).replace(',', '_')


# ---------------------------------------------------------------------------
# 子命令
# ---------------------------------------------------------------------------

def cmd_count(args, cfg: RunConfig) -> int:
    """长度为 n 的格路计数"""
    steps = StepSet.parse(args.steps or cfg.steps)
    n = args.n
    if n < 0:
        print("n 必须非负", file=sys.stderr)
        return EXIT_USAGE
    if args.sequence:
        table = build_walk_table(steps, n + 1)
        print(','.join(str(int(v)) for v in table.excursions.tolist()))
        return EXIT_OK
    if args.end:
        i, j = _parse_pair(args.end)
        print(count(steps, n, i, j))
        return EXIT_OK
    table = build_walk_table(steps, n + 1, keep_layers=True)
    layer = table.layers[n]
    print(f"步集 {steps}，长度 {n}（行为 j 自上而下递减，列为 i）")
    for j in range(layer.shape[1] - 1, -1, -1):
        print(' '.join(f"{int(layer[i, j]):>8d}" for i in range(layer.shape[0])))
    return EXIT_OK


def _guess_report(args, cfg: RunConfig, steps: StepSet) -> GuessReport:
    N = args.N or cfg.guess_N or cfg.N
    kind = args.kind or cfg.kind
    which = args.section or cfg.section
    transform = None
    if args.unknown:
        model = model_for_steps(steps)
        if model is None:
            raise GuessError(f"步集 {steps} 没有已登记的模型，不能使用 --unknown")
        which, transform = model.unknown_transform(args.unknown)
    section = SectionSpec(which, N)
    grid = cfg.grid(N, kind)
    primes = cfg.primes()
    max_precision = args.max_precision or cfg.max_precision

    if max_precision:
        ring = PrimeField(primes[0]) if args.point is not None else QQ

        def source(n: int):
            s = section_series(steps, SectionSpec(which, n), ring)
            if transform is not None:
                s = transform(s)
            s = s.normalized()
            return s.evaluate_x(args.point) if args.point is not None else s

        return precision_doubling(source, grid, max_precision, primes)
    if args.point is not None:
        if args.rational:
            return guess_point_over_rationals(steps, section, grid, primes, args.point, transform=transform)
        report = guess_at_point(steps, section, grid, primes[0], x0=args.point, transform=transform)
        return report if report is not None else GuessReport(None, kind, N)
    return modular_guess_pipeline(steps, section, grid, primes, cfg.points, transform=transform,
                                  threads=cfg.threads)


def cmd_guess(args, cfg: RunConfig) -> int:
    """猜测并写出 GuessReport"""
    steps = StepSet.parse(args.steps or cfg.steps)
    start = time.time()
    try:
        report = _guess_report(args, cfg, steps)
    except GuessError as e:
        logger.error(f"猜测失败: {e}")
        print(f"未找到关系: {e}")
        return EXIT_FAILED
    elapsed = time.time() - start
    if not report.found:
        print(report.summary())
        return EXIT_FAILED

    out_dir = Path(cfg.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    name = args.output or str(out_dir / f"guess_{_tag(steps)}_{args.unknown or args.section or cfg.section}.json")
    data = report.to_dict()
    data.update(steps=str(steps), digits=_max_digits(report.candidate), wall_time=round(elapsed, 3))
    with open(name, 'w', encoding='utf-8') as f:
        json.dump(data, f, ensure_ascii=False, indent=2)

    print("=" * 60)
    print(f"猜测结果: {report.summary()}")
    print("=" * 60)
    print(f"系数最大位数: {data['digits']}")
    print(f"使用素数: {', '.join(str(p) for p in report.primes)}")
    if report.points:
        print(f"取值点: {len(report.points)} 个")
    print(f"耗时: {elapsed:.2f} 秒")
    print(f"输出文件: {name}")
    return EXIT_OK


def cmd_prove(args, cfg: RunConfig) -> int:
    """完整流水线，验证通过（在请求的模式下）时退出码为 0"""
    steps = StepSet.parse(args.steps or cfg.steps)
    if args.mode:
        cfg.mode = args.mode
    if args.N:
        cfg.verify_N = args.N
    if args.guess_N:
        cfg.guess_N = args.guess_N
    if args.certificate:
        cfg.certificate_file = args.certificate
    pcfg = cfg.proof_config()
    if args.candidate:
        pcfg.candidate = Path(args.candidate).read_text(encoding='utf-8').strip()
    for item in args.unknown_candidate or []:
        name, sep, path = item.partition('=')
        if not sep or not name or not path:
            raise ValueError(f"--unknown-candidate 需要 名称=文件 的形式: {item!r}")
        pcfg.unknown_candidates[name.strip()] = Path(path).read_text(encoding='utf-8').strip()
    store = CertificateStore(cfg.certificate_file)
    cert = run_proof_pipeline(steps, pcfg, store)
    store.print_summary()
    summary_file = Path(cfg.output_dir) / "certificate_summary.txt"
    summary_file.parent.mkdir(parents=True, exist_ok=True)
    store.export_summary(str(summary_file))
    for name, entry in cert.candidates.items():
        logger.info(f"候选 {name}: {entry['poly'][:200]}")
    return EXIT_OK if cert.verified and cert.mode == cfg.mode else EXIT_FAILED


def cmd_pcurv(args, cfg: RunConfig) -> int:
    """逐素数检查算子的 p-曲率是否为零"""
    text = args.operator_text
    if args.operator:
        text = Path(args.operator).read_text(encoding='utf-8')
    if not text:
        print("需要 --operator 文件或 --operator-text", file=sys.stderr)
        return EXIT_USAGE
    L = parse_operator(text.strip())
    primes = _parse_primes(args.primes, cfg.pcurv_primes)
    print(f"算子阶数 {L.order}，检查 {len(primes)} 个素数")
    for p in primes:
        try:
            status = "零" if p_curvature_zero(L, p) else "非零"
        except OperatorError as e:
            logger.warning(f"p = {p}: {e}")
            status = "坏素数"
        print(f"  p = {p:>5d}: {status}")
    return EXIT_OK


def cmd_recheck(args, cfg: RunConfig) -> int:
    """只用证书中的数据复核"""
    path = args.certificate or cfg.certificate_file
    if not Path(path).exists():
        print(f"证书文件不存在: {path}", file=sys.stderr)
        return EXIT_USAGE
    report = recheck_certificate(path)
    print("=" * 60)
    print(f"证书复核: {path}")
    print("=" * 60)
    for stage, check in report.checks.items():
        mark = "✓" if check['rechecked'] or not check['stored'] else "✗"
        print(f"{mark} {stage:15s} 存储: {check['stored']}  复核: {check['rechecked']}")
    for message in report.messages:
        print(f"  {message}")
    print("结论:", "通过" if report.ok else "失败")
    return EXIT_OK if report.ok else EXIT_FAILED


def cmd_env(args, cfg: RunConfig) -> int:
    import check_environment
    return EXIT_OK if check_environment.main() else EXIT_FAILED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description='象限格路：计数、猜测与核方法证明')
    parser.add_argument('--config', '-c', help='配置文件路径（缺省读取当前目录的 config.json）')
    parser.add_argument('--dump-config', action='store_true', help='打印所有配置项（section.key=value）')
    parser.add_argument('--threads', type=int, help='并行线程数')
    parser.add_argument('--log-level', help='日志级别')
    sub = parser.add_subparsers(dest='command')

    p = sub.add_parser('count', help='格路计数')
    p.add_argument('--steps', '-s', help='步集，如 E,W,NE,SW')
    p.add_argument('--n', '-n', type=int, required=True, help='长度')
    p.add_argument('--end', '-e', help='终点 i,j（不给出时打印整个切片）')
    p.add_argument('--sequence', action='store_true', help='打印长度 0..n 的原点回归数')

    p = sub.add_parser('guess', help='猜测代数方程或微分算子')
    p.add_argument('--steps', '-s', help='步集')
    p.add_argument('--section', help='截面: x0, 0y, 00, 11, 10, 01')
    p.add_argument('--unknown', help='约化核方程中的未知级数（如 U、V），由模型给出截面变换')
    p.add_argument('--kind', choices=['algebraic', 'differential'], help='猜测类型')
    p.add_argument('--N', type=int, help='精度')
    p.add_argument('--point', type=int, help='只在一个素数、一个取值点 x0 上猜测')
    p.add_argument('--rational', action='store_true', help='与 --point 合用：逐素数猜测后重构有理系数')
    p.add_argument('--max-precision', type=int, help='精度加倍的上限')
    p.add_argument('--output', '-o', help='输出文件')

    p = sub.add_parser('prove', help='猜测并验证，写出证书')
    p.add_argument('--steps', '-s', help='步集')
    p.add_argument('--mode', choices=['series', 'exact'], help='验证模式')
    p.add_argument('--N', type=int, help='级数验证的阶')
    p.add_argument('--guess-N', type=int, help='猜测精度')
    p.add_argument('--candidate', help='候选多项式文件（跳过猜测）')
    p.add_argument('--unknown-candidate', action='append', metavar='NAME=FILE',
                   help='未知截面（U、V）的零化多项式文件，可重复')
    p.add_argument('--certificate', help='证书文件')

    p = sub.add_parser('pcurv', help='p-曲率检查')
    p.add_argument('--operator', help='算子文件')
    p.add_argument('--operator-text', help='算子文本')
    p.add_argument('--primes', help='素数列表 "3,5,7" 或区间 "3:30"')

    p = sub.add_parser('recheck', help='复核证书')
    p.add_argument('--certificate', help='证书文件')

    sub.add_parser('env', help='环境检查')
    return parser


COMMANDS = {
    'count': cmd_count,
    'guess': cmd_guess,
    'prove': cmd_prove,
    'pcurv': cmd_pcurv,
    'recheck': cmd_recheck,
    'env': cmd_env,
}


def main(argv: Optional[List[str]] = None) -> int:
    """命令行入口，返回退出码"""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK

    try:
        config = load_config(args.config)
    except (FileNotFoundError, json.JSONDecodeError) as e:
        print(f"配置错误: {e}", file=sys.stderr)
        return EXIT_USAGE
    if args.dump_config:
        for line in dump_config(config):
            print(line)
        return EXIT_OK
    if not args.command:
        parser.print_help()
        return EXIT_USAGE

    cfg = RunConfig.from_dict(config)
    if args.threads:
        cfg.threads = args.threads
    if args.log_level:
        cfg.log_level = args.log_level
    setup_logging(cfg)

    try:
        return COMMANDS[args.command](args, cfg)
    except (WalkError, OperatorError, ValueError) as e:
        print(f"用法错误: {e}", file=sys.stderr)
        return EXIT_USAGE
    except WalkProveError as e:
        logger.error(f"{args.command} 失败: {e}")
        return EXIT_FAILED


if __name__ == '__main__':
    sys.exit(main())
