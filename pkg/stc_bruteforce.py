#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
穷举/随机的慢速对照实现，只供测试与交叉验证使用

子集按 (大小, 字典序) 枚举，"最小违反集合" 因而唯一且可复现。
"""

from itertools import combinations

import numpy as np

from stc_graph import TargetSet, target_selector
from stc_numeric import child_seed, controllability_matrix, numeric_rank, sample_realization

HALL_MAX_RIGHT = 20
MATCHING_MAX_EDGES = 24
TERM_RANK_MAX_N = 10


def hall_bruteforce(view):
    """枚举右侧全部子集，返回 (是否满足, 字典序最小的最小违反集合或 None)"""
    right = sorted(view.right)
    if len(right) > HALL_MAX_RIGHT:
        raise ValueError(f"右侧顶点数 {len(right)} 超过穷举上限 {HALL_MAX_RIGHT}")
    for size in range(1, len(right) + 1):
        for subset in combinations(right, size):
            if len(view.neighbors(subset)) < size:
                return False, frozenset(subset)
    return True, None


def matching_bruteforce(view):
    """逐条边取/不取的穷举最大匹配数"""
    edges = sorted(view.edges)
    if len(edges) > MATCHING_MAX_EDGES:
        raise ValueError(f"边数 {len(edges)} 超过穷举上限 {MATCHING_MAX_EDGES}")

    def best(idx, used_left, used_right):
        if idx == len(edges):
            return 0
        result = best(idx + 1, used_left, used_right)
        l, r = edges[idx]
        if l not in used_left and r not in used_right:
            result = max(result, 1 + best(idx + 1, used_left | {l}, used_right | {r}))
        return result

    return best(0, frozenset(), frozenset())


def term_rank_bruteforce(pattern, which='A'):
    """逐行选择互不相同的 ★ 列（或跳过该行）的穷举项秩"""
    if pattern.n > TERM_RANK_MAX_N:
        raise ValueError(f"n = {pattern.n} 超过穷举上限 {TERM_RANK_MAX_N}")
    mask = pattern.a_mask()
    if which == 'AB':
        mask = np.hstack([mask, pattern.b_mask()])
    elif which != 'A':
        raise ValueError(f"which 只能为 'A' 或 'AB'，当前为 {which!r}")
    rows = [tuple(np.nonzero(mask[i])[0]) for i in range(pattern.n)]

    memo = {}

    def best(i, used):
        if i == len(rows):
            return 0
        if (i, used) in memo:
            return memo[(i, used)]
        result = best(i + 1, used)
        for j in rows[i]:
            if j not in used:
                result = max(result, 1 + best(i + 1, used | {j}))
        memo[(i, used)] = result
        return result

    return best(0, frozenset())


def generic_rank_mc(pattern, trials=20, seed=0, tol=None, targets=None, which='A'):
    """
    随机实现上观察到的最大数值秩（generic rank 的下界，试验越多越接近）

    which='A' 用 Ã，'AB' 用 [Ã, B̃]；给定 targets 时先左乘 C_T。
    """
    if trials < 1:
        raise ValueError(f"试验次数必须 ≥ 1，当前为 {trials}")
    if which not in ('A', 'AB'):
        raise ValueError(f"which 只能为 'A' 或 'AB'，当前为 {which!r}")
    selector = target_selector(targets, pattern.n) if targets is not None else None
    observed = 0
    for i in range(trials):
        r = sample_realization(pattern, child_seed(seed, i))
        M = r.A if which == 'A' else np.hstack([r.A, r.B])
        if selector is not None:
            M = selector @ M
        observed = max(observed, numeric_rank(M, tol))
    return observed


def target_rank_mc(pattern, targets=None, trials=25, seed=0, tol=None):
    """
    是否存在一次随机实现使 C_T·Q（或 Q）行满秩

    返回 (是否达到满秩, 观察到的最大秩)。
    """
    if trials < 1:
        raise ValueError(f"试验次数必须 ≥ 1，当前为 {trials}")
    if targets is None:
        targets = TargetSet.full(pattern.n)
    selector = target_selector(targets, pattern.n)
    observed = 0
    for i in range(trials):
        r = sample_realization(pattern, child_seed(seed, i))
        rank = numeric_rank(selector @ controllability_matrix(r), tol)
        observed = max(observed, rank)
        if observed == targets.k:
            return True, observed
    return False, observed
