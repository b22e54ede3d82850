#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
结构对 (Ā, B̄) 的图表示
功能：
1. StructuredPattern：对称结构化 Ā 与自由参数 B̄ 的 ★ 模式
2. SystemDigraph：系统有向图 D(Ā, B̄)，含入邻域 N(S)
3. TargetSet / target_selector：目标集合与选择矩阵 C_T、对角选择矩阵 Î
4. BipartiteView：由有向边诱导的二部图 B(S₁, S₂)

顶点编号：状态 0..n-1，输入 n..n+m-1（内部从0开始）；
对外一律使用 x1.. / u1.. 的1起编号，只在边界处转换。
"""

from dataclasses import dataclass
from functools import cached_property

import numpy as np
import networkx as nx

from log_manager import log_debug


class NetworkInputError(ValueError):
    """网络描述、模式或目标集合不合法"""


@dataclass(frozen=True)
class StructuredPattern:
    """
    结构对的 ★ 模式

    a_arcs 保存 Ā 中所有 ★ 的有序位置 (i, j)；对称模式下 (i, j) 与 (j, i)
    同时出现并共用一个参数。b_entries 保存 B̄ 的 (状态 i, 输入 j)。
    symmetric=False 仅用于一般（非对称结构化）模式，每个 ★ 各自一个参数。
    """
    n: int
    m: int
    a_arcs: frozenset
    b_entries: frozenset
    symmetric: bool = True

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or self.n < 1:
            raise NetworkInputError(f"状态维数 n 必须为正整数，当前为 {self.n!r}")
        if not isinstance(self.m, (int, np.integer)) or self.m < 0:
            raise NetworkInputError(f"输入数 m 必须为非负整数，当前为 {self.m!r}")
        object.__setattr__(self, 'a_arcs', frozenset((int(i), int(j)) for i, j in self.a_arcs))
        object.__setattr__(self, 'b_entries', frozenset((int(i), int(j)) for i, j in self.b_entries))

        for i, j in self.a_arcs:
            if not (0 <= i < self.n and 0 <= j < self.n):
                raise NetworkInputError(f"Ā 的位置 ({i + 1}, {j + 1}) 超出范围 1..{self.n}")
            if self.symmetric and (j, i) not in self.a_arcs:
                raise NetworkInputError(
                    f"对称结构化 Ā 中 ({i + 1}, {j + 1}) 为 ★ 但 ({j + 1}, {i + 1}) 不是"
                )
        for i, j in self.b_entries:
            if not (0 <= i < self.n and 0 <= j < self.m):
                raise NetworkInputError(
                    f"B̄ 的位置 (x{i + 1}, u{j + 1}) 超出范围 (n={self.n}, m={self.m})"
                )

    @classmethod
    def from_pairs(cls, n, m, a_pairs, b_entries):
        """由0起编号的无向对与输入连接构造对称模式（重复项自动合并）"""
        arcs = set()
        for i, j in a_pairs:
            arcs.add((i, j))
            arcs.add((j, i))
        return cls(n, m, frozenset(arcs), frozenset(b_entries), True)

    @classmethod
    def from_one_based(cls, n, m, edges, inputs):
        """由1起编号的无向边 [i, j] 与输入连接 [状态 i, 输入 j] 构造对称模式"""
        pairs = []
        for entry in edges:
            i, j = entry
            if not (1 <= i <= n and 1 <= j <= n):
                raise NetworkInputError(f"边 [{i}, {j}] 超出范围 1..{n}")
            pairs.append((i - 1, j - 1))
        b = []
        for entry in inputs:
            i, j = entry
            if not (1 <= i <= n and 1 <= j <= m):
                raise NetworkInputError(f"输入连接 [{i}, {j}] 超出范围 (n={n}, m={m})")
            b.append((i - 1, j - 1))
        return cls.from_pairs(n, m, pairs, b)

    @cached_property
    def a_entries(self):
        """Ā 的独立参数位置：对称模式下为 i ≤ j 的无向对，否则为全部有序位置"""
        if self.symmetric:
            return frozenset((min(i, j), max(i, j)) for i, j in self.a_arcs)
        return self.a_arcs

    @property
    def n_params_A(self):
        return len(self.a_entries)

    @property
    def n_params_B(self):
        return len(self.b_entries)

    @cached_property
    def a_param_order(self):
        """参数向量 p 中 A 部分的顺序"""
        return tuple(sorted(self.a_entries))

    @cached_property
    def b_param_order(self):
        return tuple(sorted(self.b_entries))

    @cached_property
    def self_loops(self):
        return frozenset(i for i, j in self.a_arcs if i == j)

    def a_mask(self):
        """Ā 的布尔矩阵"""
        mask = np.zeros((self.n, self.n), dtype=bool)
        for i, j in self.a_arcs:
            mask[i, j] = True
        return mask

    def b_mask(self):
        """B̄ 的布尔矩阵"""
        mask = np.zeros((self.n, self.m), dtype=bool)
        for i, j in self.b_entries:
            mask[i, j] = True
        return mask


def pattern_from_matrices(a_bar, b_bar, symmetric=None):
    """
    由 0/非零 矩阵构造模式

    symmetric=None 时按 Ā 的零模式是否对称自动判断；
    显式 symmetric=True 而零模式不对称时报错。
    """
    a_bar = np.asarray(a_bar)
    b_bar = np.asarray(b_bar)
    if a_bar.ndim != 2 or a_bar.shape[0] != a_bar.shape[1]:
        raise NetworkInputError(f"Ā 必须为方阵，当前形状 {a_bar.shape}")
    n = a_bar.shape[0]
    if b_bar.size == 0:
        b_bar = np.zeros((n, 0))
    if b_bar.ndim != 2 or b_bar.shape[0] != n:
        raise NetworkInputError(f"B̄ 的行数必须为 {n}，当前形状 {b_bar.shape}")

    a_nz = a_bar != 0
    pattern_symmetric = bool(np.array_equal(a_nz, a_nz.T))
    if symmetric is None:
        symmetric = pattern_symmetric
    elif symmetric and not pattern_symmetric:
        raise NetworkInputError("Ā 的零模式不对称，无法视为对称结构化矩阵")

    arcs = frozenset(zip(*np.nonzero(a_nz)))
    b = frozenset(zip(*np.nonzero(b_bar != 0)))
    return StructuredPattern(n, b_bar.shape[1], arcs, b, bool(symmetric))


@dataclass(frozen=True)
class SystemDigraph:
    """系统有向图 D(Ā, B̄)；state_edges/input_edges 均为 (起点, 终点)"""
    n: int
    m: int
    state_edges: tuple
    input_edges: tuple

    @property
    def state_vertices(self):
        return tuple(range(self.n))

    @property
    def input_vertices(self):
        return tuple(range(self.n, self.n + self.m))

    @property
    def edges(self):
        return self.state_edges + self.input_edges

    def is_state(self, v):
        return 0 <= v < self.n

    @cached_property
    def predecessors(self):
        """终点 -> 起点列表（升序）"""
        pred = {v: [] for v in range(self.n + self.m)}
        for src, dst in self.edges:
            pred[dst].append(src)
        return {v: tuple(sorted(p)) for v, p in pred.items()}

    def in_neighbors(self, S):
        """N(S) = {v : (v → s) ∈ E, s ∈ S}；自环使顶点属于自己的入邻域"""
        result = set()
        for s in S:
            result.update(self.predecessors[s])
        return frozenset(result)

    def vertex_label(self, v):
        """x1.. / u1.. 标记"""
        if 0 <= v < self.n:
            return f"x{v + 1}"
        if self.n <= v < self.n + self.m:
            return f"u{v - self.n + 1}"
        raise NetworkInputError(f"顶点编号 {v} 不存在")

    def to_networkx(self):
        """转换为 networkx.DiGraph（节点属性 kind = state/input）"""
        graph = nx.DiGraph()
        graph.add_nodes_from(self.state_vertices, kind='state')
        graph.add_nodes_from(self.input_vertices, kind='input')
        graph.add_edges_from(self.edges)
        return graph

    def state_graph(self):
        """仅含状态顶点的无向图，用于连通分量计算"""
        graph = nx.Graph()
        graph.add_nodes_from(self.state_vertices)
        graph.add_edges_from((a, b) for a, b in self.state_edges if a != b)
        return graph


def build_system_digraph(pattern):
    """[Ā]_ij = ★ 给出边 x_j → x_i，[B̄]_ij = ★ 给出边 u_j → x_i"""
    state_edges = tuple(sorted((j, i) for i, j in pattern.a_arcs))
    input_edges = tuple(sorted((pattern.n + j, i) for i, j in pattern.b_entries))
    digraph = SystemDigraph(pattern.n, pattern.m, state_edges, input_edges)
    log_debug(f"构建系统有向图: {pattern.n} 个状态, {pattern.m} 个输入, "
              f"{len(state_edges)} 条状态边, {len(input_edges)} 条输入边")
    return digraph


def pattern_from_digraph(digraph, symmetric=True):
    """build_system_digraph 的逆运算"""
    arcs = frozenset((dst, src) for src, dst in digraph.state_edges)
    b = frozenset((dst, src - digraph.n) for src, dst in digraph.input_edges)
    return StructuredPattern(digraph.n, digraph.m, arcs, b, symmetric)


@dataclass(frozen=True)
class TargetSet:
    """目标集合 T（0起编号，升序无重复）"""
    indices: tuple

    def __post_init__(self):
        values = tuple(int(i) for i in self.indices)
        if len(set(values)) != len(values):
            raise NetworkInputError(f"目标集合含重复项: {[i + 1 for i in values]}")
        if any(i < 0 for i in values):
            raise NetworkInputError(f"目标编号必须为非负整数: {list(values)}")
        object.__setattr__(self, 'indices', tuple(sorted(values)))

    @classmethod
    def from_one_based(cls, indices, n):
        """由1起编号构造（重复项合并），同时检查范围"""
        values = sorted(set(int(i) for i in indices))
        for i in values:
            if not 1 <= i <= n:
                raise NetworkInputError(f"目标 {i} 超出范围 1..{n}")
        return cls(tuple(i - 1 for i in values))

    @classmethod
    def full(cls, n):
        return cls(tuple(range(n)))

    @property
    def k(self):
        return len(self.indices)

    def check_range(self, n):
        for i in self.indices:
            if i >= n:
                raise NetworkInputError(f"目标 x{i + 1} 超出范围 1..{n}")
        return self

    def one_based(self):
        return [i + 1 for i in self.indices]


def target_selector(targets, n):
    """C_T：k×n 的 0/1 矩阵，第 ℓ 行只在第 i_ℓ 列为 1"""
    targets.check_range(n)
    selector = np.zeros((targets.k, n))
    for row, col in enumerate(targets.indices):
        selector[row, col] = 1.0
    return selector


def identity_selector(targets, n):
    """Î：对角线上目标位置为 1 的 n×n 矩阵（由 C_T 导出，Î = C_Tᵀ C_T）"""
    selector = target_selector(targets, n)
    return selector.T @ selector


@dataclass(frozen=True)
class BipartiteView:
    """二部图 B(S₁, S₂)：edges 为 (左顶点, 右顶点)"""
    left: tuple
    right: tuple
    edges: frozenset

    @cached_property
    def adjacency(self):
        """右顶点 -> 左邻居（升序）"""
        adj = {r: [] for r in self.right}
        for l, r in self.edges:
            adj[r].append(l)
        return {r: tuple(sorted(ls)) for r, ls in adj.items()}

    def neighbors(self, S):
        """N_B(S)"""
        result = set()
        for r in S:
            result.update(self.adjacency[r])
        return frozenset(result)


def bipartite_view(digraph, right):
    """左侧 X ∪ U，右侧为给定状态集合；边 {v, x} 对应有向边 v → x 且 x ∈ right"""
    right = tuple(sorted(set(int(v) for v in right)))
    for v in right:
        if not digraph.is_state(v):
            raise NetworkInputError(f"二部图右侧只能包含状态顶点，收到编号 {v}")
    right_set = set(right)
    edges = frozenset((src, dst) for src, dst in digraph.edges if dst in right_set)
    left = tuple(range(digraph.n + digraph.m))
    return BipartiteView(left, right, edges)


def neighborhood_bound(digraph, targets):
    """|N(X_T)|：C_T·Q 秩的上界"""
    return len(digraph.in_neighbors(targets.indices))
