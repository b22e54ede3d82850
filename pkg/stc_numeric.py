#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
数值部分：随机对称实现、秩与特征分解、PBH 模态检验、
特征/伴随/φ/ψ 多项式、Sylvester 结式与 Hoffman–Wielandt 检验

多项式系数一律按最高次在前存放（numpy.polyval 的顺序）。
容差集中在 DEFAULT_TOLERANCES，调用方用字典覆盖个别键。
"""

from dataclasses import dataclass, field

import numpy as np
from scipy import linalg

from log_manager import log_debug, log_warning
from stc_graph import pattern_from_matrices


class NumericOracleError(RuntimeError):
    """数值计算失败：非有限输入、特征值求解失败或构造实现重试耗尽"""


DEFAULT_TOLERANCES = {
    'rel_tol': 1e-9,        # 秩阈值 τ = rel_tol·σ_max·max(行, 列)
    'abs_tol': 1e-12,       # σ_max = 0 时的绝对阈值
    'zero_tol': 1e-8,       # |λ| > zero_tol·‖A‖_F 视为非零特征值
    'simple_tol': 1e-7,     # 相邻特征值间隔 > simple_tol·‖A‖_F 视为单重
    'pbh_tol': 1e-8,        # σ_min(Vᵀ B) > pbh_tol·‖B‖₂ 视为可控
    'hw_tol': 1e-10,        # Hoffman–Wielandt 松弛量的舍入容差
    'retry_factor': 1e-2,   # Monte-Carlo 复核时 rel_tol 的缩放
}

DEFAULT_SAMPLER = {
    'w_min': 0.05,
    'w_max': 1.0,
}

CONSTRUCTIVE_RETRIES = 16


def make_tolerances(overrides=None, **kwargs):
    """在默认容差上合并覆盖项，未知键报错"""
    tol = dict(DEFAULT_TOLERANCES)
    for source in (overrides or {}, kwargs):
        for key, value in source.items():
            if key not in DEFAULT_TOLERANCES:
                raise ValueError(f"未知的容差项: {key}")
            if value is None:
                continue
            if not np.isfinite(value) or value < 0:
                raise ValueError(f"容差 {key} 必须为非负有限数，当前为 {value!r}")
            tol[key] = float(value)
    return tol


def make_sampler(overrides=None):
    sampler = dict(DEFAULT_SAMPLER)
    sampler.update(overrides or {})
    if not 0 < sampler['w_min'] <= sampler['w_max']:
        raise ValueError(f"采样区间不合法: [{sampler['w_min']}, {sampler['w_max']}]")
    return sampler


def child_seed(master_seed, index):
    """第 index 次试验的子种子，与执行顺序和并行度无关"""
    return int(np.random.SeedSequence([int(master_seed), int(index)]).generate_state(1)[0])


@dataclass(frozen=True, eq=False)
class NumericRealization:
    """结构对的数值实现；params 按 pattern 的参数顺序排列（先 A 后 B）"""
    A: np.ndarray
    B: np.ndarray
    params: np.ndarray
    seed: object = None

    @property
    def n(self):
        return self.A.shape[0]

    @property
    def m(self):
        return self.B.shape[1]

    @classmethod
    def from_arrays(cls, A, B, seed=None):
        """由具体矩阵构造（参数向量按其零模式读取）"""
        A = np.array(A, dtype=float)
        B = np.array(B, dtype=float)
        if B.ndim == 1:
            B = B.reshape(-1, 1)
        pattern = pattern_from_matrices(A, B)
        params = [A[i, j] for i, j in pattern.a_param_order] + \
                 [B[i, j] for i, j in pattern.b_param_order]
        return cls(A, B, np.array(params, dtype=float), seed)


def realize(pattern, params, seed=None):
    """把参数向量写入 ★ 位置；对称模式下 (i, j) 与 (j, i) 写入同一个值"""
    params = np.asarray(params, dtype=float)
    expected = pattern.n_params_A + pattern.n_params_B
    if params.shape != (expected,):
        raise ValueError(f"参数向量长度应为 {expected}，当前为 {params.shape}")
    A = np.zeros((pattern.n, pattern.n))
    B = np.zeros((pattern.n, pattern.m))
    for value, (i, j) in zip(params, pattern.a_param_order):
        A[i, j] = value
        if pattern.symmetric:
            A[j, i] = value
    for value, (i, j) in zip(params[pattern.n_params_A:], pattern.b_param_order):
        B[i, j] = value
    return NumericRealization(A, B, params, seed)


def sample_weights(rng, size, sampler=None):
    """幅值均匀取自 [w_min, w_max]，符号随机"""
    sampler = make_sampler(sampler)
    magnitudes = rng.uniform(sampler['w_min'], sampler['w_max'], size=size)
    signs = rng.choice([-1.0, 1.0], size=size)
    return magnitudes * signs


def sample_realization(pattern, seed=0, sampler=None):
    """为每个独立参数独立采样，得到确定性的随机实现"""
    rng = np.random.default_rng(seed)
    params = sample_weights(rng, pattern.n_params_A + pattern.n_params_B, sampler)
    return realize(pattern, params, seed)


def ctrb(A, B, normalized=False):
    """[B, AB, ..., A^{n-1}B]；normalized=True 时每个列块内逐列单位化"""
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    n = A.shape[0]
    blocks = []
    block = B
    for _ in range(n):
        if normalized:
            norms = np.linalg.norm(block, axis=0)
            scaled = np.divide(block, norms, out=np.zeros_like(block), where=norms > 0)
            blocks.append(scaled)
            # 继续迭代单位化后的块，避免 A^k 的幅值溢出
            block = A @ scaled
        else:
            blocks.append(block)
            block = A @ block
    if not blocks:
        return np.zeros((0, 0))
    return np.hstack(blocks)


def controllability_matrix(r, normalized=False):
    """可控性矩阵 Q(Ã, B̃)"""
    return ctrb(r.A, r.B, normalized)


def _svdvals(M):
    try:
        return linalg.svdvals(M)
    except (np.linalg.LinAlgError, linalg.LinAlgError) as e:
        raise NumericOracleError(f"奇异值分解失败: {e}") from e


def numeric_rank(M, tol=None):
    """奇异值超过 τ = rel_tol·σ_max·max(行, 列) 的个数；σ_max = 0 时阈值为 abs_tol"""
    tol = make_tolerances(tol)
    M = np.asarray(M, dtype=float)
    if not np.all(np.isfinite(M)):
        raise NumericOracleError("矩阵含非有限元素，无法计算数值秩")
    if M.size == 0:
        return 0
    sv = _svdvals(M)
    sigma_max = sv[0]
    if sigma_max == 0:
        threshold = tol['abs_tol']
    else:
        threshold = tol['rel_tol'] * sigma_max * max(M.shape)
    return int(np.sum(sv > threshold))


def _symmetric_matrix(r):
    A = r.A if isinstance(r, NumericRealization) else np.asarray(r, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"A 必须为方阵，当前形状 {A.shape}")
    if not np.all(np.isfinite(A)):
        raise NumericOracleError("A 含非有限元素")
    if not np.allclose(A, A.T, rtol=0.0, atol=1e-12 * max(1.0, np.abs(A).max(initial=0.0))):
        raise ValueError("A 不是对称矩阵")
    return A


def symmetric_eigh(A):
    """对称特征分解，失败时转为 NumericOracleError"""
    try:
        return linalg.eigh(A)
    except (np.linalg.LinAlgError, linalg.LinAlgError, ValueError) as e:
        raise NumericOracleError(f"特征值求解失败: {e}") from e


def _clusters(eigenvalues, gap):
    """按相邻间隔 ≤ gap 聚类（特征值已升序）"""
    groups = []
    for idx, lam in enumerate(eigenvalues):
        if groups and lam - eigenvalues[groups[-1][-1]] <= gap:
            groups[-1].append(idx)
        else:
            groups.append([idx])
    return groups


@dataclass(frozen=True)
class ModeReport:
    """PBH 模态报告；各元组与升序特征值一一对应"""
    eigenvalues: tuple
    multiplicities: tuple
    controllable: tuple
    nonzero: tuple
    nonzero_simple_count: int
    min_singular: tuple = field(default=(), repr=False)

    @property
    def uncontrollable_modes(self):
        return tuple(lam for lam, ok in zip(self.eigenvalues, self.controllable) if not ok)

    @property
    def all_controllable(self):
        return all(self.controllable)

    @property
    def zero_mode_controllable(self):
        """零特征值（若存在）对应的模态是否可控"""
        flags = [ok for ok, nz in zip(self.controllable, self.nonzero) if not nz]
        return all(flags)

    @property
    def controllable_nonzero_simple(self):
        return sum(1 for ok, nz, mult in zip(self.controllable, self.nonzero, self.multiplicities)
                   if ok and nz and mult == 1)


def pbh_modes(r, tol=None):
    """
    实对称特征分解上的 PBH 检验

    特征值按间隔 ≤ simple_tol·‖A‖_F 聚类；对每个簇取特征基 V，
    σ_min(Vᵀ B) ≤ pbh_tol·‖B‖₂ 即存在 e 使 eᵀB ≈ 0，该模态不可控。
    簇大小超过输入数时 σ_min 必为 0。
    """
    tol = make_tolerances(tol)
    A = _symmetric_matrix(r)
    B = np.asarray(r.B, dtype=float)
    n, m = B.shape
    scale = np.linalg.norm(A, 'fro')
    b_norm = np.linalg.norm(B, 2) if B.size else 0.0

    eigenvalues, vectors = symmetric_eigh(A)
    multiplicities = [0] * n
    controllable = [False] * n
    min_singular = [0.0] * n
    for group in _clusters(eigenvalues, tol['simple_tol'] * scale):
        basis = vectors[:, group]
        if len(group) > m or m == 0:
            smin = 0.0
        else:
            smin = float(_svdvals(basis.T @ B).min())
        ok = smin > tol['pbh_tol'] * b_norm
        for idx in group:
            multiplicities[idx] = len(group)
            controllable[idx] = ok
            min_singular[idx] = smin

    nonzero = [abs(lam) > tol['zero_tol'] * scale for lam in eigenvalues]
    count = sum(1 for nz, mult in zip(nonzero, multiplicities) if nz and mult == 1)
    report = ModeReport(tuple(float(x) for x in eigenvalues), tuple(multiplicities),
                        tuple(controllable), tuple(nonzero), count, tuple(min_singular))
    if report.uncontrollable_modes:
        log_debug(f"PBH: 不可控模态 {list(report.uncontrollable_modes)}")
    return report


def count_nonzero_simple(r, tol=None):
    """|λ| > zero_tol·‖A‖_F 且与最近邻间隔 > simple_tol·‖A‖_F 的特征值个数"""
    tol = make_tolerances(tol)
    A = _symmetric_matrix(r)
    scale = np.linalg.norm(A, 'fro')
    try:
        eigenvalues = linalg.eigvalsh(A)
    except (np.linalg.LinAlgError, linalg.LinAlgError) as e:
        raise NumericOracleError(f"特征值求解失败: {e}") from e
    gaps = np.diff(eigenvalues)
    count = 0
    for idx, lam in enumerate(eigenvalues):
        if abs(lam) <= tol['zero_tol'] * scale:
            continue
        left = gaps[idx - 1] if idx > 0 else np.inf
        right = gaps[idx] if idx < len(gaps) else np.inf
        if min(left, right) > tol['simple_tol'] * scale:
            count += 1
    return count


def _faddeev_leverrier(A):
    """
    Faddeev–LeVerrier 递推

    M_1 = I, c_{n-k} = -tr(A M_k)/k, M_{k+1} = A M_k + c_{n-k} I。
    返回 ([1, c_{n-1}, ..., c_0], [M_1, ..., M_n])，
    其中 adj(sI - A) = Σ M_k s^{n-k}。
    """
    A = np.asarray(A, dtype=float)
    n = A.shape[0]
    coeffs = [1.0]
    mats = np.zeros((n, n, n))
    M = np.eye(n)
    for k in range(1, n + 1):
        mats[k - 1] = M
        AM = A @ M
        c = -np.trace(AM) / k
        coeffs.append(c)
        M = AM + c * np.eye(n)
    return np.array(coeffs), mats


def char_poly(r):
    """det(sI - A) 的首一系数 [1, a_{n-1}, ..., a_0]"""
    A = r.A if isinstance(r, NumericRealization) else np.asarray(r, dtype=float)
    return _faddeev_leverrier(A)[0]


def adjugate_poly(r):
    """adj(sI - A) 的系数矩阵，形状 (n, n, n)，第 0 个对应 s^{n-1}"""
    A = r.A if isinstance(r, NumericRealization) else np.asarray(r, dtype=float)
    return _faddeev_leverrier(A)[1]


def phi_poly(char_coeffs, k):
    """φ(s) = s^k + a_{n-1}s^{k-1} + ... + a_{n-k}：保留前 k+1 个特征系数"""
    if isinstance(char_coeffs, PolySuite):
        char_coeffs = char_coeffs.char_coeffs
    char_coeffs = np.asarray(char_coeffs, dtype=float)
    n = len(char_coeffs) - 1
    if not 0 <= k <= n:
        raise ValueError(f"截断次数 k = {k} 超出 0..{n}")
    return char_coeffs[:k + 1].copy()


def psi_poly(r, adjugate=None):
    """
    ψ(s) = ‖adj(sI - A) B‖_F²

    由 G_a = M_a B 的两两内积卷积得到，次数 2n-2，首项系数为 ‖B‖_F²。
    """
    if adjugate is None:
        adjugate = adjugate_poly(r)
    B = np.asarray(r.B, dtype=float)
    n = adjugate.shape[0]
    G = np.einsum('kij,jl->kil', adjugate, B)
    psi = np.zeros(max(2 * n - 1, 1))
    for a in range(n):
        for b in range(n):
            psi[a + b] += np.sum(G[a] * G[b])
    return psi


def poly_matrix_eval(coeff_mats, s):
    """按 Horner 计算矩阵多项式在 s 处的值"""
    result = np.zeros(coeff_mats.shape[1:])
    for mat in coeff_mats:
        result = result * s + mat
    return result


def sylvester_matrix(p, q):
    """
    Sylvester 矩阵：p 的 n2 行为右移阶梯，q 的 n1 行为反向阶梯
    （最上一行右移最多，最下一行从第一列开始）
    """
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    n1 = len(p) - 1
    n2 = len(q) - 1
    size = n1 + n2
    if size == 0:
        return np.zeros((0, 0))
    rows = []
    if n2 > 0:
        first = np.zeros(size)
        first[:n1 + 1] = p
        column = np.zeros(n2)
        column[0] = p[0]
        rows.append(linalg.toeplitz(column, first))
    if n1 > 0:
        first = np.zeros(size)
        first[:n2 + 1] = q
        column = np.zeros(n1)
        column[0] = q[0]
        rows.append(np.flipud(linalg.toeplitz(column, first)))
    return np.vstack(rows)


def sylvester_resultant(p, q):
    """R(p, q) = det(Sylvester 矩阵)；两个首项系数都必须非零"""
    p = np.atleast_1d(np.asarray(p, dtype=float))
    q = np.atleast_1d(np.asarray(q, dtype=float))
    if p.size == 0 or q.size == 0:
        raise ValueError("多项式系数不能为空")
    if p[0] == 0 or q[0] == 0:
        raise ValueError("结式要求两个多项式的首项系数非零")
    S = sylvester_matrix(p, q)
    if S.size == 0:
        return 1.0
    try:
        return float(linalg.det(S))
    except (np.linalg.LinAlgError, linalg.LinAlgError) as e:
        raise NumericOracleError(f"Sylvester 行列式计算失败: {e}") from e


@dataclass(frozen=True, eq=False)
class PolySuite:
    """特征系数、φ、伴随矩阵多项式、ψ 与结式"""
    char_coeffs: np.ndarray
    k: int
    phi: np.ndarray
    adjugate: np.ndarray
    psi: np.ndarray
    resultants: dict = field(default_factory=dict)


def build_poly_suite(r, k=None):
    """一次性计算全部多项式；k 缺省为 n"""
    coeffs, mats = _faddeev_leverrier(r.A)
    n = r.A.shape[0]
    k = n if k is None else int(k)
    phi = phi_poly(coeffs, k)
    psi = psi_poly(r, mats)
    resultants = {
        'phi_dphi': sylvester_resultant(phi, np.polyder(phi)) if k >= 1 else 1.0,
    }
    trimmed = np.trim_zeros(psi, 'f')
    resultants['phi_psi'] = sylvester_resultant(phi, trimmed) if trimmed.size else 0.0
    return PolySuite(coeffs, k, phi, mats, psi, resultants)


def hoffman_wielandt_holds(A, E, tol=None):
    """
    Σ(λ̂_i - λ_i)² ≤ ‖E‖_F²，两组谱都按升序配对

    返回 (是否成立, 松弛量 ‖E‖_F² - Σ(λ̂_i - λ_i)²)。
    """
    tol = make_tolerances(tol)
    A = np.asarray(A, dtype=float)
    E = np.asarray(E, dtype=float)
    if A.shape != E.shape:
        raise ValueError(f"维数不一致: A {A.shape}, E {E.shape}")
    A = _symmetric_matrix(A)
    E = _symmetric_matrix(E)
    lam = linalg.eigvalsh(A)
    lam_hat = linalg.eigvalsh(A + E)
    slack = float(np.sum(E * E) - np.sum((lam_hat - lam) ** 2))
    return slack >= -tol['hw_tol'] * max(1.0, float(np.sum(E * E))), slack


def constructive_realization(pattern, cover, perturb=0.01, seed=0, sampler=None, tol=None):
    """
    按圈覆盖构造实现

    自环与 2-圈依次赋予互不相同的幅值 1, 2, 3, ...（块特征值 ±w 或 w），
    其余 ★ 置零；奇圈中未被配对的圈边（含首尾闭合边）加上
    幅值在 [perturb/2, perturb] 的对称扰动，使该奇圈全部特征值非零。
    扰动后非零单重特征值不足 |覆盖| 时重抽，最多重试 16 次。
    """
    cover.check(pattern)
    if not pattern.symmetric:
        raise ValueError("构造实现只适用于对称结构化模式")
    tol = make_tolerances(tol)
    rng = np.random.default_rng(seed)

    n = pattern.n
    base = np.zeros((n, n))
    perturb_edges = []
    magnitude = 1.0
    for cycle in cover.cycles:
        if len(cycle) == 1:
            v = cycle[0]
            base[v, v] = magnitude
            magnitude += 1.0
            continue
        for t in range(0, len(cycle) - 1, 2):
            a, b = cycle[t], cycle[t + 1]
            base[a, b] = base[b, a] = magnitude
            magnitude += 1.0
        if len(cycle) % 2 == 1:
            perturb_edges.extend((cycle[t], cycle[t + 1]) for t in range(1, len(cycle) - 1, 2))
            perturb_edges.append((cycle[-1], cycle[0]))

    target = len(cover.covered)
    for attempt in range(CONSTRUCTIVE_RETRIES + 1):
        A = base.copy()
        for a, b in perturb_edges:
            delta = rng.uniform(perturb / 2, perturb) * rng.choice([-1.0, 1.0])
            A[a, b] += delta
            A[b, a] = A[a, b]
        if count_nonzero_simple(A, tol) >= target:
            break
        log_debug(f"构造实现第 {attempt + 1} 次扰动未得到 {target} 个非零单重特征值，重抽")
    else:
        log_warning(f"构造实现重试 {CONSTRUCTIVE_RETRIES} 次后仍失败")
        raise NumericOracleError(f"构造实现在 {CONSTRUCTIVE_RETRIES} 次重试后仍未得到 "
                                 f"{target} 个非零单重特征值")

    b_weights = sample_weights(rng, pattern.n_params_B, sampler)
    params = np.concatenate([[A[i, j] for i, j in pattern.a_param_order], b_weights])
    return realize(pattern, params, seed)


@dataclass(frozen=True)
class VarietyProbe:
    """
    真子簇成员探测：V₁ 为 a_{n-k}=0 或 R(φ,φ′)=0，V₂ 为 R(φ,ψ)=0

    系数与结式按归一化实现记录；成员判定用等价的谱条件：
    φ 有零根或重根即非零单重特征值少于 k，
    φ 与 ψ 有公共根即存在不可控的非零单重模态。
    """
    k: int
    a_nk: float
    r_phi_dphi: float
    r_phi_psi: float
    in_v1: bool
    in_v2: bool

    @property
    def generic(self):
        return not (self.in_v1 or self.in_v2)


def probe_varieties(r, k, tol=None):
    """在 A/‖A‖_F、B/‖B‖_F 归一化后的实现上计算 a_{n-k}、R(φ,φ′)、R(φ,ψ)"""
    tol = make_tolerances(tol)
    A = np.asarray(r.A, dtype=float)
    B = np.asarray(r.B, dtype=float)
    a_norm = np.linalg.norm(A, 'fro')
    b_norm = np.linalg.norm(B, 'fro')
    scaled = NumericRealization(A / a_norm if a_norm > 0 else A,
                                B / b_norm if b_norm > 0 else B,
                                r.params, r.seed)
    if k == 0:
        return VarietyProbe(0, 1.0, 1.0, 1.0, False, False)

    suite = build_poly_suite(scaled, k)
    modes = pbh_modes(scaled, tol)
    a_nk = float(suite.phi[-1])
    r1 = float(suite.resultants['phi_dphi'])
    r2 = float(suite.resultants['phi_psi'])
    probe = VarietyProbe(k, a_nk, r1, r2,
                         modes.nonzero_simple_count < k,
                         modes.controllable_nonzero_simple < modes.nonzero_simple_count)
    log_debug(f"簇探测: a_(n-k) = {a_nk:.3e}, R(φ,φ′) = {r1:.3e}, R(φ,ψ) = {r2:.3e}")
    return probe
