#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
测试公共配置：把 src 加入导入路径，提供常用步集与素数
"""

import os
import sys

import pytest

sys.path.insert(0, os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), 'src'))

from exactarith import load_primes  # noqa: E402
from walks import StepSet  # noqa: E402


def pytest_addoption(parser):
    parser.addoption('--runslow', action='store_true', default=False,
                     help='运行耗时的 Gessel 相关测试')


def pytest_configure(config):
    config.addinivalue_line('markers', 'slow: 耗时测试，需要 --runslow')


def pytest_collection_modifyitems(config, items):
    if config.getoption('--runslow'):
        return
    skip_slow = pytest.mark.skip(reason='需要 --runslow')
    for item in items:
        if 'slow' in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture(autouse=True)
def _no_prime_file(monkeypatch):
    monkeypatch.delenv('WALKPROVE_PRIMES', raising=False)


@pytest.fixture
def primes():
    return load_primes(count=3)


@pytest.fixture
def prime():
    return load_primes(count=1)[0]


@pytest.fixture
def kreweras():
    return StepSet.parse('W,S,NE')


@pytest.fixture
def gessel():
    return StepSet.parse('E,W,NE,SW')


@pytest.fixture
def diagonal():
    return StepSet.parse('NE')


@pytest.fixture
def simple_walk():
    """{N, S, E, W}"""
    return StepSet.parse('N,S,E,W')
