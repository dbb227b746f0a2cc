#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
证书存储模块
功能：保存证明流水线的证书与各阶段状态
使用JSON格式，易于阅读和比对
"""

import json
from dataclasses import asdict, dataclass
from datetime import datetime
from pathlib import Path
from typing import Dict, List, Optional
import logging

logger = logging.getLogger(__name__)

STAGE_STATUSES = ('pending', 'running', 'completed', 'failed', 'skipped')


@dataclass
class StageProgress:
    """单个阶段的状态"""
    name: str
    status: str = 'pending'
    started_at: Optional[str] = None
    completed_at: Optional[str] = None
    error: Optional[str] = None
    details: Optional[Dict] = None


class CertificateStore:
    """证书与阶段状态的持久化"""

    def __init__(self, certificate_file: str = "output/certificate.json"):
        """
        初始化证书存储

        Args:
            certificate_file: 证书文件路径
        """
        self.certificate_file = Path(certificate_file)
        self.certificate_file.parent.mkdir(parents=True, exist_ok=True)
        self.run_id = datetime.now().strftime("%Y%m%d_%H%M%S")
        self.data = self._create()

    def _create(self) -> Dict:
        return {
            "version": "1.0",
            "run_id": self.run_id,
            "created_at": datetime.now().isoformat(),
            "last_updated": datetime.now().isoformat(),
            "run": None,
            "stages": {},
            "certificate": None,
            "statistics": {status: 0 for status in STAGE_STATUSES},
        }

    @classmethod
    def load(cls, certificate_file: str) -> 'CertificateStore':
        """
        读取已有证书文件

        Raises:
            FileNotFoundError: 文件不存在
            ValueError: 文件不是证书
        """
        path = Path(certificate_file)
        with open(path, 'r', encoding='utf-8') as f:
            data = json.load(f)
        if 'certificate' not in data or 'stages' not in data:
            raise ValueError(f"不是证书文件: {path}")
        store = cls.__new__(cls)
        store.certificate_file = path
        store.run_id = data.get('run_id', '')
        store.data = data
        logger.info(f"加载证书文件: {path}")
        return store

    # ---- 运行与阶段 ----

    def start_run(self, steps: str, model: Optional[str], stages: List[str]) -> str:
        """
        开始一次流水线运行

        Args:
            steps: 步集文本
            model: 模型名
            stages: 计划执行的阶段
        """
        self.data["run"] = {
            "steps": steps,
            "model": model,
            "started_at": datetime.now().isoformat(),
            "completed_at": None,
            "status": "running",
        }
        for name in stages:
            self.data["stages"][name] = asdict(StageProgress(name))
        self._recount()
        self.save()
        logger.info(f"开始证明运行: 步集 {steps} (ID: {self.run_id})")
        return self.run_id

    def _stage(self, name: str) -> Dict:
        if name not in self.data["stages"]:
            self.data["stages"][name] = asdict(StageProgress(name))
        return self.data["stages"][name]

    def start_stage(self, name: str) -> None:
        stage = self._stage(name)
        stage["status"] = "running"
        stage["started_at"] = datetime.now().isoformat()
        stage["error"] = None
        self._recount()

    def mark_completed(self, name: str, details: Optional[Dict] = None) -> None:
        stage = self._stage(name)
        stage["status"] = "completed"
        stage["completed_at"] = datetime.now().isoformat()
        stage["details"] = details
        self._recount()
        self.save()

    def mark_failed(self, name: str, error: str) -> None:
        stage = self._stage(name)
        stage["status"] = "failed"
        stage["completed_at"] = datetime.now().isoformat()
        stage["error"] = error
        self._recount()
        self.save()

    def mark_skipped(self, name: str, reason: str) -> None:
        stage = self._stage(name)
        stage["status"] = "skipped"
        stage["details"] = {"reason": reason}
        self._recount()

    def end_run(self, status: str = "completed") -> None:
        """
        结束当前运行

        Args:
            status: completed, failed, interrupted
        """
        if self.data["run"]:
            self.data["run"]["completed_at"] = datetime.now().isoformat()
            self.data["run"]["status"] = status
        self.save()
        logger.info(f"证明运行结束 (状态: {status})")

    def _recount(self) -> None:
        stats = {status: 0 for status in STAGE_STATUSES}
        for stage in self.data["stages"].values():
            stats[stage["status"]] = stats.get(stage["status"], 0) + 1
        self.data["statistics"] = stats

    def failed_stages(self) -> List[str]:
        return [name for name, s in self.data["stages"].items() if s["status"] == "failed"]

    # ---- 证书 ----

    def set_certificate(self, certificate: Dict) -> None:
        self.data["certificate"] = certificate
        self.save()

    def get_certificate(self) -> Optional[Dict]:
        return self.data.get("certificate")

    def save(self) -> None:
        """原子写入证书文件"""
        self.data["last_updated"] = datetime.now().isoformat()
        try:
            temp_file = self.certificate_file.with_suffix('.tmp')
            with open(temp_file, 'w', encoding='utf-8') as f:
                json.dump(self.data, f, ensure_ascii=False, indent=2)
            temp_file.replace(self.certificate_file)
        except Exception as e:
            logger.error(f"保存证书文件失败: {e}")

    def print_summary(self) -> None:
        """打印运行摘要"""
        stats = self.data["statistics"]
        cert = self.data.get("certificate") or {}

        print("\n" + "=" * 60)
        print("证明运行摘要")
        print("=" * 60)
        run = self.data.get("run") or {}
        print(f"步集: {run.get('steps')}  模型: {run.get('model') or '-'}")
        print(f"已完成阶段: {stats.get('completed', 0)}")
        print(f"失败阶段: {stats.get('failed', 0)}")
        print(f"跳过阶段: {stats.get('skipped', 0)}")
        if cert:
            print(f"验证模式: {cert.get('mode')} (请求: {cert.get('mode_requested')})")
            print(f"结论: {'已验证' if cert.get('verified') else '未验证'}")
            for caveat in cert.get('caveats', []):
                print(f"  注意: {caveat}")
        print("=" * 60)

    def export_summary(self, output_file: str) -> None:
        """
        导出可读的证书报告

        Args:
            output_file: 输出文件路径
        """
        cert = self.data.get("certificate") or {}

        with open(output_file, 'w', encoding='utf-8') as f:
            f.write("=" * 80 + "\n")
            f.write("证明证书报告\n")
            f.write("=" * 80 + "\n\n")

            f.write(f"生成时间: {datetime.now().strftime('%Y-%m-%d %H:%M:%S')}\n")
            f.write(f"证书文件: {self.certificate_file}\n\n")

            run = self.data.get("run") or {}
            f.write(f"步集: {run.get('steps')}\n")
            f.write(f"模型: {run.get('model') or '-'}\n")
            f.write(f"验证模式: {cert.get('mode')} (请求: {cert.get('mode_requested')})\n")
            f.write(f"结论: {'已验证' if cert.get('verified') else '未验证'}\n\n")

            f.write("阶段:\n")
            for name, stage in self.data["stages"].items():
                line = f"  {name:20s} {stage['status']}"
                if stage.get("error"):
                    line += f"  错误: {stage['error']}"
                f.write(line + "\n")

            if cert.get("candidates"):
                f.write("\n候选:\n")
                for name, text in cert["candidates"].items():
                    f.write(f"  {name}: {text}\n")

            if cert.get("evidence"):
                f.write("\n证据:\n")
                for key, value in cert["evidence"].items():
                    f.write(f"  {key}: {json.dumps(value, ensure_ascii=False)}\n")

            if cert.get("caveats"):
                f.write("\n注意事项:\n")
                for caveat in cert["caveats"]:
                    f.write(f"  - {caveat}\n")

            f.write("\n" + "=" * 80 + "\n")

        logger.info(f"证书报告已导出: {output_file}")
