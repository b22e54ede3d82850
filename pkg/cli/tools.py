# -*- coding: utf-8 -*-
"""
工具类模块：
- MultiCoreProcessor: 多核处理器（Monte-Carlo 试验并行）
- process_single_trial: 单次试验处理函数
- NetworkDocument / parse_network / load_network_file: 网络描述读取与校验

试验 i 的随机数只由子种子决定，串行与并行结果逐项一致。
"""

import json
import multiprocessing
from dataclasses import dataclass, field
from pathlib import Path

from log_manager import log_debug, log_info, log_warning
from stc_graph import NetworkInputError, StructuredPattern, TargetSet, target_selector
from stc_numeric import controllability_matrix, numeric_rank, sample_realization


class MultiCoreProcessor:
    """多核处理器"""

    def __init__(self):
        self.cpu_count = multiprocessing.cpu_count()
        log_debug(f"检测到 {self.cpu_count} 个CPU核心")

    def process_trials_parallel(self, task_list, process_func, max_workers=None):
        """并行处理试验任务，结果顺序与任务顺序一致"""
        if max_workers is None:
            max_workers = min(self.cpu_count, len(task_list))
        max_workers = min(max_workers, self.cpu_count, len(task_list))
        if max_workers <= 1 or len(task_list) <= 1:
            return [process_func(task) for task in task_list]
        try:
            from concurrent.futures import ProcessPoolExecutor
            with ProcessPoolExecutor(max_workers=max_workers) as executor:
                results = list(executor.map(process_func, task_list))
            return results
        except (OSError, RuntimeError) as e:
            log_warning(f"多核处理失败，回退到单核: {e}")
            return [process_func(task) for task in task_list]


def process_single_trial(task):
    """处理单次 Monte-Carlo 试验（用于多核处理）"""
    index, pattern, target_indices, seed, tolerances, sampler, normalized, expect_full = task

    realization = sample_realization(pattern, seed, sampler)
    Q = controllability_matrix(realization, normalized=normalized)
    if target_indices is not None:
        Q = target_selector(TargetSet(target_indices), pattern.n) @ Q
    rows = Q.shape[0]
    rank = numeric_rank(Q, tolerances)

    retried = False
    if expect_full and rank < rows:
        tight = dict(tolerances)
        tight['rel_tol'] = tolerances['rel_tol'] * tolerances.get('retry_factor', 1e-2)
        rank = numeric_rank(Q, tight)
        retried = True

    return {
        'index': index,
        'seed': seed,
        'rank': rank,
        'rows': rows,
        'retried': retried,
    }


@dataclass(frozen=True)
class NetworkDocument:
    """JSON 网络描述（1起编号，边已规范为 i ≤ j）"""
    n: int
    m: int
    edges: tuple
    inputs: tuple
    targets: tuple = None
    metadata: dict = field(default_factory=dict, compare=False)

    @property
    def name(self):
        return str(self.metadata.get('name') or 'network')

    def to_pattern(self):
        return StructuredPattern.from_one_based(self.n, self.m, self.edges, self.inputs)

    def target_set(self, override=None):
        """命令行覆盖优先，其次为文档中的 targets；都没有时返回 None"""
        indices = override if override is not None else self.targets
        if indices is None:
            return None
        if not indices:
            raise NetworkInputError("目标集合不能为空")
        return TargetSet.from_one_based(indices, self.n)


def _require_int(value, name, minimum):
    if isinstance(value, bool) or not isinstance(value, int):
        raise NetworkInputError(f"{name} 必须为整数，当前为 {value!r}")
    if value < minimum:
        raise NetworkInputError(f"{name} 不能小于 {minimum}，当前为 {value}")
    return value


def _index_pairs(entries, key):
    if not isinstance(entries, list):
        raise NetworkInputError(f"'{key}' 必须为列表")
    pairs = []
    for position, entry in enumerate(entries, start=1):
        if isinstance(entry, list) and len(entry) == 3 and entry[2] in ('->', 'directed'):
            raise NetworkInputError(
                f"'{key}' 第 {position} 项 {entry} 声明了有向边；状态边必须是无向的"
            )
        if not isinstance(entry, list) or len(entry) != 2 or \
                any(isinstance(v, bool) or not isinstance(v, int) for v in entry):
            raise NetworkInputError(f"'{key}' 第 {position} 项 {entry!r} 应为两个整数组成的列表")
        pairs.append((position, entry[0], entry[1]))
    return pairs


def parse_network(text):
    """解析并校验 JSON 网络描述：合并重复项、规范排序"""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise NetworkInputError(f"JSON 格式错误: 第 {e.lineno} 行第 {e.colno} 列: {e.msg}") from e
    if not isinstance(data, dict):
        raise NetworkInputError("网络描述的顶层必须是 JSON 对象")
    if data.get('directed'):
        raise NetworkInputError("不支持有向状态网络 (directed = true)")
    if 'arcs' in data:
        raise NetworkInputError("'arcs' 声明了有向状态边；状态边必须在 'edges' 中以无向对给出")

    for key in ('n', 'm'):
        if key not in data:
            raise NetworkInputError(f"缺少字段 '{key}'")
    n = _require_int(data['n'], 'n', 1)
    m = _require_int(data['m'], 'm', 0)

    edges = set()
    for position, i, j in _index_pairs(data.get('edges', []), 'edges'):
        if not (1 <= i <= n and 1 <= j <= n):
            raise NetworkInputError(f"'edges' 第 {position} 项 [{i}, {j}] 超出范围 1..{n}")
        edges.add((min(i, j), max(i, j)))

    inputs = set()
    for position, i, j in _index_pairs(data.get('inputs', []), 'inputs'):
        if not 1 <= i <= n:
            raise NetworkInputError(f"'inputs' 第 {position} 项 [{i}, {j}] 的状态超出范围 1..{n}")
        if not 1 <= j <= m:
            raise NetworkInputError(f"'inputs' 第 {position} 项 [{i}, {j}] 的输入超出范围 1..{m}")
        inputs.add((i, j))

    targets = data.get('targets')
    if targets is not None:
        if not isinstance(targets, list):
            raise NetworkInputError("'targets' 必须为列表")
        for position, t in enumerate(targets, start=1):
            if isinstance(t, bool) or not isinstance(t, int) or not 1 <= t <= n:
                raise NetworkInputError(f"'targets' 第 {position} 项 {t!r} 超出范围 1..{n}")
        targets = tuple(sorted(set(targets)))

    metadata = data.get('metadata', {})
    if not isinstance(metadata, dict):
        raise NetworkInputError("'metadata' 必须为 JSON 对象")

    doc = NetworkDocument(n, m, tuple(sorted(edges)), tuple(sorted(inputs)), targets, dict(metadata))
    log_info(f"网络描述: n = {n}, m = {m}, {len(doc.edges)} 条无向边, {len(doc.inputs)} 个输入连接")
    return doc


def load_network_file(path):
    """读取 UTF-8 编码的 JSON 网络文件"""
    path = Path(path)
    try:
        text = path.read_text(encoding='utf-8')
    except FileNotFoundError as e:
        raise NetworkInputError(f"找不到网络文件: {path}") from e
    except (OSError, UnicodeDecodeError) as e:
        raise NetworkInputError(f"读取网络文件失败: {path}: {e}") from e
    doc = parse_network(text)
    if 'name' not in doc.metadata:
        doc.metadata['name'] = path.stem
    return doc
