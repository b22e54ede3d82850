# -*- coding: utf-8 -*-
"""共享夹具：10 状态示例网络与随机对称模式生成器"""

from pathlib import Path

import numpy as np
import pytest

from stc_graph import StructuredPattern, TargetSet

FIXTURE_DIR = Path(__file__).resolve().parent.parent / "fixtures"

EXAMPLE_EDGES = [[1, 2], [1, 4], [1, 5], [2, 3], [3, 4], [5, 7], [6, 6], [6, 7],
                 [7, 9], [8, 9], [9, 10]]
EXAMPLE_INPUTS = [[2, 1], [1, 2], [5, 2]]
EXAMPLE_TARGETS = [2, 6, 8]


def random_symmetric_pattern(rng, n, m=0, density=0.3, input_density=0.3):
    """每个无向对（含自环）以 density 概率为 ★，每个 (状态, 输入) 以 input_density 概率为 ★"""
    pairs = [(i, j) for i in range(n) for j in range(i, n) if rng.random() < density]
    inputs = [(i, j) for i in range(n) for j in range(m) if rng.random() < input_density]
    return StructuredPattern.from_pairs(n, m, pairs, inputs)


def random_targets(rng, n, k=None):
    if k is None:
        k = int(rng.integers(1, n + 1))
    return TargetSet(tuple(int(t) for t in rng.choice(n, size=k, replace=False)))


@pytest.fixture
def example_pattern():
    return StructuredPattern.from_one_based(10, 2, EXAMPLE_EDGES, EXAMPLE_INPUTS)


@pytest.fixture
def example_targets():
    return TargetSet.from_one_based(EXAMPLE_TARGETS, 10)


@pytest.fixture
def example_file():
    return FIXTURE_DIR / "example_ten_states.json"


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def make_pattern():
    return random_symmetric_pattern


@pytest.fixture
def make_targets():
    return random_targets
