#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
格路模型模块
已登记的步集及其已知结果
"""

from typing import Dict, Optional

from .base import ModelProfile, ReducedEquation, WalkModel
from .kreweras import KrewerasModel
from .gessel import GesselModel
from .trivial import DiagonalModel

MODELS = (KrewerasModel, GesselModel, DiagonalModel)


def get_model(name: str, config: Dict = None) -> WalkModel:
    """按名称或别名取模型"""
    key = name.strip().lower()
    for cls in MODELS:
        if key == cls.name or key in cls.aliases:
            return cls(config)
    raise KeyError(f"未知模型: {name}")


def model_for_steps(steps, config: Dict = None) -> Optional[WalkModel]:
    """步集对应的已登记模型，没有时返回 None"""
    for cls in MODELS:
        model = cls(config)
        if model.matches(steps):
            return model
    return None


__all__ = [
    'ModelProfile',
    'ReducedEquation',
    'WalkModel',
    'KrewerasModel',
    'GesselModel',
    'DiagonalModel',
    'MODELS',
    'get_model',
    'model_for_steps',
]
