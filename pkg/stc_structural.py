#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
纯组合部分：输入可达性、二部图最大匹配、Hall 条件证书、项秩与圈覆盖

所有函数只依赖不可变输入，可并发调用；图一律按顶点编号升序构建，
因此匹配与证书在相同输入下逐字节可复现。
"""

from collections import deque
from dataclasses import dataclass
from functools import cached_property

import networkx as nx

from log_manager import log_debug
from stc_graph import BipartiteView, NetworkInputError

# 多源 BFS 的虚拟源点
SUPER_SOURCE = -1


class NoCycleCoverError(ValueError):
    """所选状态集合不存在不相交圈覆盖；violating_set 为违反 Hall 条件的行集合"""

    def __init__(self, message, violating_set):
        super().__init__(message)
        self.violating_set = frozenset(violating_set)


def hopcroft_karp(adjacency):
    """
    Hopcroft–Karp 最大基数匹配，返回 {u: v}

    adjacency: 待饱和一侧顶点 u -> 另一侧邻居。两侧分别编码为 2u 与 2v+1
    的整数节点并按升序插入，networkx 的遍历顺序因此与进程无关。
    """
    top = [2 * u for u in sorted(adjacency)]
    bottom = sorted({2 * v + 1 for vs in adjacency.values() for v in vs})
    graph = nx.Graph()
    graph.add_nodes_from(top, bipartite=0)
    graph.add_nodes_from(bottom, bipartite=1)
    graph.add_edges_from((2 * u, 2 * v + 1) for u in sorted(adjacency) for v in sorted(adjacency[u]))
    mate = nx.bipartite.hopcroft_karp_matching(graph, top_nodes=top)
    return {a // 2: (b - 1) // 2 for a, b in sorted(mate.items()) if a % 2 == 0}


@dataclass(frozen=True)
class Matching:
    """二部图匹配：pairs 为 (左顶点, 右顶点)"""
    pairs: frozenset
    right: tuple

    @property
    def size(self):
        return len(self.pairs)

    @cached_property
    def by_right(self):
        return {r: l for l, r in self.pairs}

    @cached_property
    def by_left(self):
        return {l: r for l, r in self.pairs}

    @property
    def right_unmatched(self):
        return tuple(r for r in self.right if r not in self.by_right)

    def saturates(self, vertices):
        return all(v in self.by_right for v in vertices)


@dataclass(frozen=True)
class HallCertificate:
    """Hall 条件结果：满足时附饱和匹配，不满足时附 S 与 N(S)"""
    satisfied: bool
    matching: Matching
    violating_set: frozenset = None
    neighborhood: frozenset = None

    @property
    def saturating_matching(self):
        return self.matching if self.satisfied else None

    @property
    def deficiency(self):
        return len(self.matching.right) - self.matching.size


@dataclass(frozen=True)
class CycleCover:
    """
    不相交圈覆盖

    每个圈存为开放的顶点序列 (v0, v1, ..., v_{L-1})，依次沿 v_t → v_{t+1}
    的边并由 v_{L-1} → v0 闭合；长度 1 表示自环，长度 2 表示对称边对。
    """
    cycles: tuple

    @property
    def covered(self):
        return frozenset(v for cycle in self.cycles for v in cycle)

    @property
    def self_loops(self):
        return tuple(c for c in self.cycles if len(c) == 1)

    @property
    def two_cycles(self):
        return tuple(c for c in self.cycles if len(c) == 2)

    @property
    def odd_cycles(self):
        """长度 ≥ 3 的奇圈"""
        return tuple(c for c in self.cycles if len(c) >= 3 and len(c) % 2 == 1)

    @staticmethod
    def closing_edges(cycle):
        """圈中全部有向边 (起点, 终点)"""
        return [(cycle[t], cycle[(t + 1) % len(cycle)]) for t in range(len(cycle))]

    def check(self, pattern):
        """检查圈两两不相交且每条边都是 D(Ā) 的边，不合法时抛出 ValueError"""
        seen = set()
        for cycle in self.cycles:
            if not cycle:
                raise ValueError("圈覆盖中含空圈")
            for v in cycle:
                if v in seen:
                    raise ValueError(f"x{v + 1} 被多个圈覆盖")
                seen.add(v)
            for src, dst in self.closing_edges(cycle):
                # 边 x_src → x_dst 对应 [Ā]_{dst, src} = ★
                if (dst, src) not in pattern.a_arcs:
                    raise ValueError(f"圈中的边 x{src + 1} → x{dst + 1} 不在 D(Ā) 中")
        return self


def reachability_forest(digraph):
    """从全部输入顶点出发的多源 BFS，返回 {可达状态: 父顶点}"""
    graph = digraph.to_networkx()
    graph.add_edges_from((SUPER_SOURCE, u) for u in digraph.input_vertices)
    return {v: p for v, p in nx.bfs_predecessors(graph, SUPER_SOURCE) if p != SUPER_SOURCE}


def input_reachable(digraph):
    """所有存在输入有向路径的状态顶点"""
    return frozenset(reachability_forest(digraph))


def reachability_path(forest, v):
    """沿 BFS 森林回溯得到 输入 → ... → v 的路径"""
    path = [v]
    while path[-1] in forest:
        path.append(forest[path[-1]])
    return tuple(reversed(path))


def max_matching(view):
    """二部图最大匹配（饱和目标为右侧）"""
    mate = hopcroft_karp(view.adjacency)
    matching = Matching(frozenset((l, r) for r, l in mate.items()), view.right)
    log_debug(f"最大匹配: 右侧 {len(view.right)} 个顶点, 匹配数 {matching.size}")
    return matching


def hall_check(view):
    """
    检查 |N(S)| ≥ |S| 对右侧所有子集成立

    满足时返回饱和匹配；否则从编号最小的未匹配右顶点出发做交错路 BFS
    (右→左走任意边，左→右走匹配边)，到达的右顶点构成 S、左顶点构成 N(S)，
    返回前重新计算邻域加以验证。
    """
    matching = max_matching(view)
    if matching.size == len(view.right):
        return HallCertificate(True, matching)

    root = min(matching.right_unmatched)
    S = {root}
    NS = set()
    queue = deque([root])
    while queue:
        r = queue.popleft()
        for l in view.adjacency[r]:
            if l in NS:
                continue
            NS.add(l)
            mate = matching.by_left.get(l)
            if mate is None:
                raise RuntimeError("交错路到达未匹配左顶点：匹配不是最大匹配")
            if mate not in S:
                S.add(mate)
                queue.append(mate)

    violating = frozenset(S)
    neighborhood = view.neighbors(violating)
    if neighborhood != NS or len(neighborhood) >= len(violating):
        raise RuntimeError("Hall 违反集合验证失败")
    log_debug(f"Hall 条件不满足: |S| = {len(violating)}, |N(S)| = {len(neighborhood)}")
    return HallCertificate(False, matching, violating, neighborhood)


def term_rank(pattern, which='A'):
    """
    项秩：行-列二部图的最大匹配数

    which='A' 只用 Ā；which='AB' 时 B̄ 的列作为额外的左顶点 (n + j)。
    """
    if which not in ('A', 'AB'):
        raise ValueError(f"which 只能为 'A' 或 'AB'，当前为 {which!r}")
    adjacency = {i: [] for i in range(pattern.n)}
    for i, j in pattern.a_arcs:
        adjacency[i].append(j)
    if which == 'AB':
        for i, j in pattern.b_entries:
            adjacency[i].append(pattern.n + j)
    return len(hopcroft_karp(adjacency))


def _split_cycle(pattern, cycle):
    """偶圈拆成 2-圈；含自环顶点的奇圈拆成自环加 2-圈，否则保留整圈"""
    length = len(cycle)
    if length <= 2:
        return [cycle]
    if length % 2 == 0:
        return [cycle[t:t + 2] for t in range(0, length, 2)]
    for t, v in enumerate(cycle):
        if v in pattern.self_loops:
            rest = cycle[t + 1:] + cycle[:t]
            return [(v,)] + [rest[s:s + 2] for s in range(0, len(rest), 2)]
    return [cycle]


def _permutation_cycles(S, sigma):
    """行→列完美匹配 σ 的圈分解；沿 σ⁻¹ 走即沿 D(Ā) 的有向边走"""
    inverse = {j: i for i, j in sigma.items()}
    visited = set()
    cycles = []
    for start in S:
        if start in visited:
            continue
        cycle = [start]
        visited.add(start)
        v = inverse[start]
        while v != start:
            cycle.append(v)
            visited.add(v)
            v = inverse[v]
        cycles.append(tuple(cycle))
    return cycles


def _pair_cycles(pattern, S):
    """
    只用自环与 2-圈覆盖尽可能多的 S 中顶点

    自环顶点 v 接一个虚拟顶点 n + v（权 1），对称边 {i, j} 权 2，
    最大权匹配的权即被覆盖的顶点数。
    """
    members = set(S)
    graph = nx.Graph()
    graph.add_nodes_from(S)
    graph.add_edges_from(((v, pattern.n + v) for v in S if v in pattern.self_loops), weight=1)
    graph.add_edges_from(((i, j) for i, j in sorted(pattern.a_entries)
                          if i != j and i in members and j in members), weight=2)
    cycles = []
    for a, b in nx.max_weight_matching(graph):
        a, b = min(a, b), max(a, b)
        cycles.append((a,) if b >= pattern.n else (a, b))
    return sorted(cycles)


def cycle_cover(pattern, S, split_even=True):
    """
    在 D(Ā) 限制到 S 上构造不相交圈覆盖

    行 S 到列 S 的完美匹配看成置换 σ，其圈分解即一个覆盖。
    split_even=True 且模式对称时优先用自环与 2-圈（最大权匹配）覆盖，
    剩余顶点再按置换取圈，偶圈拆成 2-圈；剩余部分没有完美匹配时
    改用整个 S 的置换。只有无法避免时才保留奇圈。
    """
    S = sorted(set(int(v) for v in S))
    for v in S:
        if not 0 <= v < pattern.n:
            raise NetworkInputError(f"状态 {v + 1} 超出范围 1..{pattern.n}")

    members = set(S)
    adjacency = {i: [j for j in S if (i, j) in pattern.a_arcs] for i in S}
    sigma = hopcroft_karp(adjacency)
    if len(sigma) < len(S):
        view = BipartiteView(tuple(S), tuple(S),
                             frozenset((j, i) for i in S for j in adjacency[i]))
        certificate = hall_check(view)
        labels = ", ".join(f"x{v + 1}" for v in sorted(certificate.violating_set))
        raise NoCycleCoverError(f"行集合 {{{labels}}} 无法匹配到不同列，不存在圈覆盖",
                                certificate.violating_set)

    if not (split_even and pattern.symmetric):
        cycles = _permutation_cycles(S, sigma)
    else:
        cycles = _pair_cycles(pattern, S)
        paired = {v for cycle in cycles for v in cycle}
        rest = [v for v in S if v not in paired]
        if rest:
            rest_sigma = hopcroft_karp({i: [j for j in rest if (i, j) in pattern.a_arcs]
                                        for i in rest})
            if len(rest_sigma) == len(rest):
                cycles += _permutation_cycles(rest, rest_sigma)
            else:
                cycles = _permutation_cycles(S, sigma)
        cycles = [part for cycle in cycles for part in _split_cycle(pattern, cycle)]

    cover = CycleCover(tuple(cycles))
    assert cover.covered == members
    log_debug(f"圈覆盖: {len(cover.cycles)} 个圈, 其中奇圈 {len(cover.odd_cycles)} 个")
    return cover
