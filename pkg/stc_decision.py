#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
判定引擎
功能：
1. 结构可控性：全部状态输入可达，且右侧为 X 的二部图满足 Hall 条件
2. 结构目标可控性：X_T 输入可达，且右侧为 X_T 的二部图满足 Hall 条件
3. Monte-Carlo 数值复核（子种子确定，可多核并行）
4. 贪心输入补充建议

非对称结构化的 Ā 只能检验必要性：条件失败给出确定的否定结论，
条件通过时 decision 为 None（不作充分性断言）。
"""

import time
from dataclasses import dataclass, field, replace

import networkx as nx

from cli.tools import MultiCoreProcessor, process_single_trial
from log_manager import log_info, log_performance, log_warning
from stc_graph import (NetworkInputError, StructuredPattern, TargetSet, bipartite_view,
                       build_system_digraph)
from stc_numeric import child_seed, make_sampler, make_tolerances
from stc_structural import hall_check, input_reachable, max_matching, reachability_forest

# 超过该维数时 Monte-Carlo 使用逐列单位化的可控性矩阵
NORMALIZE_ABOVE = 20

QUESTION_FULL = 'controllability'
QUESTION_TARGET = 'target-controllability'


@dataclass(frozen=True)
class MonteCarloSummary:
    """数值复核结果；agreement 在仅必要性判定时为 None"""
    trials: int
    seed: int
    ranks: tuple
    rows: int
    rank_bound: int
    agree_count: object
    agreement: object
    retried: tuple = ()
    anomalies: tuple = ()
    normalized: bool = False
    pruned: tuple = ()

    @property
    def full_rank_count(self):
        return sum(1 for r in self.ranks if r == self.rows)


@dataclass(frozen=True)
class Verdict:
    """
    判定结果与证书

    unreachable: 相关状态中输入不可达者（0起编号）；forest: BFS 森林 {状态: 父顶点}；
    hall: 对 X 或 X_T 的 Hall 证书。两个条件都失败时优先报告可达性。
    """
    question: str
    targets: object
    decision: object
    necessity_only: bool
    unreachable: tuple
    forest: dict
    hall: object
    numeric_agreement: object = None
    rank_bound: int = 0

    @property
    def reachability_ok(self):
        return not self.unreachable

    @property
    def failure(self):
        if self.unreachable:
            return 'reachability'
        if not self.hall.satisfied:
            return 'hall'
        return None

    @property
    def conditions_hold(self):
        return self.reachability_ok and self.hall.satisfied


def _decide(pattern, question, right, targets):
    digraph = build_system_digraph(pattern)
    forest = reachability_forest(digraph)
    reachable = frozenset(forest)
    unreachable = tuple(v for v in right if v not in reachable)
    hall = hall_check(bipartite_view(digraph, right))

    holds = not unreachable and hall.satisfied
    if pattern.symmetric:
        decision = holds
    else:
        decision = None if holds else False

    verdict = Verdict(question, targets, decision, not pattern.symmetric, unreachable,
                      forest, hall, rank_bound=len(digraph.in_neighbors(right)))
    log_info(f"判定 {question}: decision = {decision}, 不可达 {len(unreachable)} 个, "
             f"Hall {'满足' if hall.satisfied else '不满足'}")
    return verdict


def is_structurally_controllable(pattern):
    """全部状态输入可达，且 |N(S)| ≥ |S| 对所有 S ⊆ X 成立"""
    return _decide(pattern, QUESTION_FULL, tuple(range(pattern.n)), None)


def is_structurally_target_controllable(pattern, targets):
    """X_T 全部输入可达，且 |N(S)| ≥ |S| 对所有 S ⊆ X_T 成立"""
    targets.check_range(pattern.n)
    if targets.k == 0:
        raise NetworkInputError("目标集合不能为空")
    return _decide(pattern, QUESTION_TARGET, targets.indices, targets)


def decide(pattern, targets=None):
    if targets is None:
        return is_structurally_controllable(pattern)
    return is_structurally_target_controllable(pattern, targets)


def prune_for_targets(pattern, targets):
    """
    删去与目标无关的不可达状态（仅用于数值复核）

    保留输入可达状态以及与某个目标弱连通的状态；返回
    (约简后的模式, 重新编号的目标集合, 被删去的原状态编号)。
    """
    digraph = build_system_digraph(pattern)
    reachable = input_reachable(digraph)
    graph = digraph.state_graph()
    target_set = set(targets.indices)
    keep = set(reachable)
    for component in nx.connected_components(graph):
        if component & target_set:
            keep.update(component)

    kept = sorted(keep)
    removed = tuple(v for v in range(pattern.n) if v not in keep)
    if not removed:
        return pattern, targets, ()

    index = {old: new for new, old in enumerate(kept)}
    arcs = frozenset((index[i], index[j]) for i, j in pattern.a_arcs if i in index and j in index)
    b = frozenset((index[i], j) for i, j in pattern.b_entries if i in index)
    reduced = StructuredPattern(len(kept), pattern.m, arcs, b, pattern.symmetric)
    reduced_targets = TargetSet(tuple(index[t] for t in targets.indices))
    log_info(f"数值复核前删去 {len(removed)} 个与目标无关的不可达状态")
    return reduced, reduced_targets, removed


def monte_carlo_verify(pattern, targets=None, trials=20, seed=0, tol=None, sampler=None,
                       workers=1, verdict=None):
    """
    随机实现上检验 Q 或 C_T·Q 是否行满秩，并与结构判定比较

    结构判定为真而某次试验秩亏时，以 rel_tol×retry_factor 复核一次；
    仍不一致的试验记为 anomalies，不会被丢弃。
    """
    if trials < 1:
        raise ValueError(f"试验次数必须 ≥ 1，当前为 {trials}")
    tol = make_tolerances(tol)
    sampler = make_sampler(sampler)
    if verdict is None:
        verdict = decide(pattern, targets)

    start = time.time()
    if targets is not None:
        work_pattern, work_targets, removed = prune_for_targets(pattern, targets)
        target_indices = work_targets.indices
    else:
        work_pattern, removed, target_indices = pattern, (), None

    normalized = work_pattern.n > NORMALIZE_ABOVE
    expect_full = verdict.decision is True
    tasks = [(i, work_pattern, target_indices, child_seed(seed, i), tol, sampler,
              normalized, expect_full) for i in range(trials)]
    results = MultiCoreProcessor().process_trials_parallel(tasks, process_single_trial,
                                                            max_workers=workers)

    ranks = tuple(res['rank'] for res in results)
    rows = results[0]['rows']
    retried = tuple(res['index'] for res in results if res['retried'])
    if verdict.decision is None:
        agree_count, agreement, anomalies = None, None, ()
    else:
        agrees = [(rank == rows) == verdict.decision for rank in ranks]
        agree_count = sum(agrees)
        agreement = agree_count / trials
        anomalies = tuple(i for i, ok in enumerate(agrees) if not ok)
        for i in anomalies:
            log_warning(f"Monte-Carlo 试验 {i} (种子 {results[i]['seed']}) 与结构判定不一致: "
                        f"秩 {ranks[i]} / {rows}")

    summary = MonteCarloSummary(trials, seed, ranks, rows, verdict.rank_bound, agree_count, agreement,
                                retried, anomalies, normalized, removed)
    log_performance("Monte-Carlo 复核", time.time() - start,
                    f"{trials} 次试验, 一致率 {agreement}")
    return summary


def verify_verdict(pattern, targets=None, trials=20, seed=0, tol=None, workers=1):
    """判定并附上数值复核结果"""
    verdict = decide(pattern, targets)
    summary = monte_carlo_verify(pattern, targets, trials, seed, tol, workers=workers,
                                 verdict=verdict)
    return replace(verdict, numeric_agreement=summary)


@dataclass(frozen=True)
class AugmentationPlan:
    """输入补充建议：attachments 中每个状态各连一个新输入"""
    attachments: tuple
    lower_bound: int
    targets: object = field(default=None, compare=False)

    @property
    def size(self):
        return len(self.attachments)


def apply_augmentation(pattern, attachments):
    """为每个补充位置新增一个输入列"""
    b = set(pattern.b_entries)
    for offset, state in enumerate(attachments):
        if not 0 <= state < pattern.n:
            raise NetworkInputError(f"补充位置 x{state + 1} 超出范围 1..{pattern.n}")
        b.add((state, pattern.m + offset))
    return StructuredPattern(pattern.n, pattern.m + len(attachments), pattern.a_arcs,
                             frozenset(b), pattern.symmetric)


def _matching_deficiency(pattern, targets):
    digraph = build_system_digraph(pattern)
    matching = max_matching(bipartite_view(digraph, targets.indices))
    return matching, targets.k - matching.size


def suggest_input_augmentation(pattern, targets):
    """
    贪心补充输入，使结构目标可控

    先为含不可达目标的每个分量连一个输入（优先选当前最大匹配中未匹配的目标），
    再为最大匹配中仍未匹配的目标各连一个输入。结果不保证最小，
    lower_bound 为 max(匹配缺口, 含不可达目标的分量数)。
    """
    if targets is None or targets.k == 0:
        return AugmentationPlan((), 0, targets)
    targets.check_range(pattern.n)

    digraph = build_system_digraph(pattern)
    reachable = input_reachable(digraph)
    unreachable_targets = [t for t in targets.indices if t not in reachable]
    graph = digraph.state_graph()
    components = {frozenset(c) for c in nx.connected_components(graph)
                  if any(t in c for t in unreachable_targets)}
    _, deficiency = _matching_deficiency(pattern, targets)
    lower_bound = max(deficiency, len(components))

    attachments = []
    current = pattern
    while True:
        reachable = input_reachable(build_system_digraph(current))
        pending = [t for t in targets.indices if t not in reachable]
        if not pending:
            break
        matching, _ = _matching_deficiency(current, targets)
        unmatched = [t for t in pending if t not in matching.by_right]
        choice = unmatched[0] if unmatched else pending[0]
        attachments.append(choice)
        current = apply_augmentation(pattern, attachments)

    matching, _ = _matching_deficiency(current, targets)
    attachments.extend(matching.right_unmatched)

    plan = AugmentationPlan(tuple(attachments), lower_bound, targets)
    if plan.size:
        log_info(f"输入补充建议: {['x%d' % (t + 1) for t in plan.attachments]} "
                 f"(下界 {lower_bound})")
    return plan
