# -*- coding: utf-8 -*-
import numpy as np
import pytest
from scipy import linalg

from stc_graph import StructuredPattern
from stc_numeric import (DEFAULT_TOLERANCES, NumericOracleError, NumericRealization,
                         adjugate_poly, build_poly_suite, char_poly, child_seed,
                         constructive_realization, controllability_matrix,
                         count_nonzero_simple, ctrb, hoffman_wielandt_holds, make_tolerances,
                         numeric_rank, pbh_modes, phi_poly, poly_matrix_eval,
                         probe_varieties, psi_poly, sample_realization, sylvester_resultant)
from stc_structural import CycleCover, cycle_cover, term_rank


def random_symmetric(rng, n):
    M = rng.standard_normal((n, n))
    return (M + M.T) / 2


# ---------- 随机实现 ----------

def test_example_realization_pattern(example_pattern):
    r = sample_realization(example_pattern, seed=3)
    assert np.count_nonzero(r.A) == 21
    assert np.count_nonzero(r.B) == 3
    assert np.array_equal(r.A, r.A.T)
    assert np.all(np.abs(r.params) >= 0.05)
    assert np.all(np.abs(r.params) <= 1.0)
    assert len(r.params) == example_pattern.n_params_A + example_pattern.n_params_B


def test_zero_pattern_realization():
    r = sample_realization(StructuredPattern.from_pairs(3, 2, [], []), seed=1)
    assert not r.A.any()
    assert not r.B.any()


def test_realization_deterministic(example_pattern):
    a = sample_realization(example_pattern, seed=11)
    b = sample_realization(example_pattern, seed=11)
    np.testing.assert_array_equal(a.params, b.params)
    c = sample_realization(example_pattern, seed=12)
    assert not np.array_equal(a.params, c.params)


def test_realization_respects_zero_pattern(make_pattern, rng):
    for seed in range(20):
        pattern = make_pattern(rng, int(rng.integers(1, 8)), 2)
        r = sample_realization(pattern, seed)
        np.testing.assert_array_equal(r.A != 0, pattern.a_mask())
        np.testing.assert_array_equal(r.B != 0, pattern.b_mask())
        assert np.array_equal(r.A, r.A.T)


def test_child_seed_stable():
    assert child_seed(7, 3) == child_seed(7, 3)
    assert child_seed(7, 3) != child_seed(7, 4)
    assert child_seed(7, 3) != child_seed(8, 3)


# ---------- 可控性矩阵与秩 ----------

def test_controllability_matrix_simple_cases():
    b = np.array([[1.0], [2.0]])
    Q = ctrb(np.zeros((2, 2)), b)
    np.testing.assert_array_equal(Q, [[1, 0], [2, 0]])
    Q = ctrb(np.eye(2), b)
    np.testing.assert_array_equal(Q, [[1, 1], [2, 2]])
    r = NumericRealization.from_arrays([[0, 1], [1, 0]], [[1], [0]])
    np.testing.assert_array_equal(controllability_matrix(r), [[1, 0], [0, 1]])


def test_controllability_matrix_block_order(make_pattern, rng):
    pattern = make_pattern(rng, 5, 2, density=0.5)
    r = sample_realization(pattern, seed=4)
    Q = controllability_matrix(r)
    assert Q.shape == (5, 10)
    for j in range(5):
        np.testing.assert_allclose(Q[:, 2 * j:2 * j + 2],
                                   np.linalg.matrix_power(r.A, j) @ r.B)


def test_normalized_controllability_matrix_keeps_rank(example_pattern):
    r = sample_realization(example_pattern, seed=2)
    assert numeric_rank(controllability_matrix(r, normalized=True)) == \
        numeric_rank(controllability_matrix(r))


@pytest.mark.parametrize("matrix, expected", [
    (np.zeros((3, 4)), 0),
    (np.eye(5), 5),
    (np.array([[1.0, 1.0], [1.0, 1.0]]), 1),
])
def test_numeric_rank(matrix, expected):
    assert numeric_rank(matrix) == expected


def test_numeric_rank_rejects_non_finite():
    with pytest.raises(NumericOracleError):
        numeric_rank(np.array([[1.0, np.nan]]))


def test_numeric_rank_wraps_svd_failure(monkeypatch):
    def diverged(*args, **kwargs):
        raise np.linalg.LinAlgError("SVD did not converge")

    monkeypatch.setattr(linalg, "svdvals", diverged)
    with pytest.raises(NumericOracleError):
        numeric_rank(np.eye(2))


def test_tolerance_overrides():
    tol = make_tolerances({'rel_tol': 1e-6})
    assert tol['rel_tol'] == 1e-6
    assert tol['pbh_tol'] == DEFAULT_TOLERANCES['pbh_tol']
    with pytest.raises(ValueError):
        make_tolerances({'bogus': 1.0})


# ---------- PBH 与特征值 ----------

def test_pbh_repeated_eigenvalue_uncontrollable():
    report = pbh_modes(NumericRealization.from_arrays(np.eye(2), [[1.0], [1.0]]))
    assert report.multiplicities == (2, 2)
    assert report.controllable == (False, False)
    assert report.nonzero_simple_count == 0


def test_pbh_swap_matrix_controllable():
    report = pbh_modes(NumericRealization.from_arrays([[0, 1], [1, 0]], [[1], [0]]))
    np.testing.assert_allclose(report.eigenvalues, [-1.0, 1.0])
    assert report.controllable == (True, True)
    assert report.all_controllable
    assert report.nonzero_simple_count == 2


def test_pbh_isolated_vertex_zero_mode():
    A = np.zeros((3, 3))
    A[0, 1] = A[1, 0] = 0.7
    B = np.array([[1.0], [0.0], [0.0]])
    report = pbh_modes(NumericRealization.from_arrays(A, B))
    assert any(abs(lam) < 1e-12 for lam in report.uncontrollable_modes)
    assert not report.zero_mode_controllable


def test_pbh_rejects_non_symmetric():
    r = NumericRealization(np.array([[0.0, 1.0], [0.0, 0.0]]), np.ones((2, 1)), np.array([]))
    with pytest.raises(ValueError):
        pbh_modes(r)


def test_pbh_agrees_with_kalman_rank(make_pattern, rng):
    for seed in range(30):
        pattern = make_pattern(rng, int(rng.integers(1, 7)), 1, density=0.4)
        r = sample_realization(pattern, seed)
        kalman = numeric_rank(controllability_matrix(r)) == pattern.n
        if kalman:
            assert pbh_modes(r).all_controllable


@pytest.mark.parametrize("A, expected", [
    (np.diag([1.0, 2.0, 0.0]), 2),
    (np.zeros((3, 3)), 0),
    (np.eye(3), 0),
])
def test_count_nonzero_simple(A, expected):
    assert count_nonzero_simple(A) == expected


def test_example_nonzero_simple_matches_term_rank(example_pattern):
    k = term_rank(example_pattern)
    hits = sum(count_nonzero_simple(sample_realization(example_pattern, seed)) == k
               for seed in range(100))
    assert hits >= 99


# ---------- 特征多项式、伴随矩阵、φ、ψ ----------

@pytest.mark.parametrize("A, expected", [
    (np.diag([2.0, 3.0]), [1.0, -5.0, 6.0]),
    (np.array([[0.0, 1.0], [1.0, 0.0]]), [1.0, 0.0, -1.0]),
])
def test_char_poly_small(A, expected):
    np.testing.assert_allclose(char_poly(A), expected, atol=1e-12)


def test_char_poly_matches_eigenvalue_product(rng):
    A = random_symmetric(rng, 4)
    expected = np.poly(linalg.eigvalsh(A))
    np.testing.assert_allclose(char_poly(A), expected, rtol=1e-8, atol=1e-10)


def test_phi_truncation():
    a = 1.7
    coeffs = char_poly(np.array([[a, 0.0], [0.0, 0.0]]))
    np.testing.assert_allclose(phi_poly(coeffs, 1), [1.0, -a])
    np.testing.assert_allclose(phi_poly(coeffs, 2), coeffs)
    with pytest.raises(ValueError):
        phi_poly(coeffs, 3)


def test_phi_vanishes_at_nonzero_eigenvalues(example_pattern):
    r = sample_realization(example_pattern, seed=5)
    k = term_rank(example_pattern)
    phi = phi_poly(char_poly(r), k)
    for lam in linalg.eigvalsh(r.A):
        if abs(lam) > 1e-6:
            scale = np.sum(np.abs(phi) * np.abs(lam) ** np.arange(k, -1, -1))
            assert abs(np.polyval(phi, lam)) <= 1e-8 * scale


def test_adjugate_small_cases():
    adj = adjugate_poly(np.array([[2.5]]))
    np.testing.assert_array_equal(adj, [[[1.0]]])
    adj = adjugate_poly(np.array([[0.0, 1.0], [1.0, 0.0]]))
    # adj(sI - A) = [[s, 1], [1, s]]
    np.testing.assert_allclose(adj[0], np.eye(2))
    np.testing.assert_allclose(adj[1], [[0.0, 1.0], [1.0, 0.0]])


def test_adjugate_identity_at_sample_points(rng):
    A = random_symmetric(rng, 3)
    s = 2.5
    adj = poly_matrix_eval(adjugate_poly(A), s)
    det = np.polyval(char_poly(A), s)
    lhs = (s * np.eye(3) - A) @ adj
    np.testing.assert_allclose(lhs, det * np.eye(3), rtol=1e-8, atol=1e-8 * abs(det))


def test_psi_small_cases():
    r = NumericRealization(np.array([[0.4]]), np.array([[-0.3]]), np.array([0.4, -0.3]))
    np.testing.assert_allclose(psi_poly(r), [0.09])
    r = NumericRealization(np.diag([1.0, 2.0]), np.zeros((2, 1)), np.array([1.0, 2.0]))
    assert not psi_poly(r).any()


def test_psi_matches_direct_evaluation(rng):
    A = random_symmetric(rng, 3)
    B = rng.standard_normal((3, 2))
    r = NumericRealization(A, B, np.array([]))
    s = 1.7
    direct = np.linalg.norm(poly_matrix_eval(adjugate_poly(A), s) @ B, 'fro') ** 2
    assert np.polyval(psi_poly(r), s) == pytest.approx(direct, rel=1e-8)
    assert psi_poly(r)[0] == pytest.approx(np.sum(B * B))


def test_poly_suite_fields(example_pattern):
    r = sample_realization(example_pattern, seed=8)
    suite = build_poly_suite(r, 9)
    assert suite.char_coeffs[0] == 1.0
    assert len(suite.phi) == 10
    assert suite.adjugate.shape == (10, 10, 10)
    assert len(suite.psi) == 19
    assert np.all(np.isfinite(suite.psi))
    assert set(suite.resultants) == {'phi_dphi', 'phi_psi'}


# ---------- Sylvester 结式 ----------

def test_resultant_common_root():
    assert sylvester_resultant([1.0, 0.0, -1.0], [1.0, -1.0]) == pytest.approx(0.0, abs=1e-12)


def test_resultant_layout_sign():
    assert sylvester_resultant([1.0, -1.0], [1.0, -2.0]) == pytest.approx(-1.0)


def test_resultant_zero_leading_coefficient():
    with pytest.raises(ValueError):
        sylvester_resultant([0.0, 1.0], [1.0, 2.0])
    with pytest.raises(ValueError):
        sylvester_resultant([1.0, 2.0], [0.0, 1.0])


def test_resultant_wraps_determinant_failure(monkeypatch):
    def singular(*args, **kwargs):
        raise linalg.LinAlgError("illegal value")

    monkeypatch.setattr(linalg, "det", singular)
    with pytest.raises(NumericOracleError):
        sylvester_resultant([1.0, -1.0], [1.0, -2.0])


def test_resultant_distinct_roots_nonzero():
    pattern = StructuredPattern.from_pairs(4, 1, [(0, 1), (2, 3)], [(0, 0)])
    cover = cycle_cover(pattern, range(4))
    r = constructive_realization(pattern, cover, seed=1)
    phi = phi_poly(char_poly(r), 4)
    assert abs(sylvester_resultant(phi, np.polyder(phi))) > 1e-6


# ---------- Hoffman–Wielandt ----------

def test_hoffman_wielandt_trivial_cases(rng):
    A = random_symmetric(rng, 4)
    holds, slack = hoffman_wielandt_holds(A, np.zeros((4, 4)))
    assert holds
    assert slack == pytest.approx(0.0, abs=1e-12)
    holds, slack = hoffman_wielandt_holds(np.zeros((1, 1)), np.array([[3.0]]))
    assert holds
    assert slack == pytest.approx(0.0, abs=1e-12)


def test_hoffman_wielandt_random_pair(rng):
    holds, slack = hoffman_wielandt_holds(random_symmetric(rng, 5), random_symmetric(rng, 5))
    assert holds
    assert slack >= -1e-8


def test_hoffman_wielandt_dimension_mismatch():
    with pytest.raises(ValueError):
        hoffman_wielandt_holds(np.eye(2), np.eye(3))


# ---------- 构造实现与簇探测 ----------

def test_constructive_two_cycle():
    pattern = StructuredPattern.from_pairs(2, 1, [(0, 1)], [(0, 0)])
    r = constructive_realization(pattern, cycle_cover(pattern, [0, 1]))
    eigenvalues = linalg.eigvalsh(r.A)
    np.testing.assert_allclose(np.abs(eigenvalues), [1.0, 1.0])
    assert count_nonzero_simple(r) == 2


def test_constructive_self_loop():
    pattern = StructuredPattern.from_pairs(1, 1, [(0, 0)], [(0, 0)])
    r = constructive_realization(pattern, cycle_cover(pattern, [0]))
    assert count_nonzero_simple(r) == 1


def test_constructive_triangle_perturbed():
    triangle = StructuredPattern.from_pairs(3, 1, [(0, 1), (1, 2), (0, 2)], [(0, 0)])
    cover = cycle_cover(triangle, range(3))
    r = constructive_realization(triangle, cover, perturb=0.01, seed=0)
    assert count_nonzero_simple(r) == 3
    assert np.array_equal(r.A, r.A.T)
    assert np.max(np.abs(r.A - np.round(r.A))) <= 0.01 + 1e-12


def test_constructive_count_before_and_after_perturbation(make_pattern, rng):
    for _ in range(30):
        n = int(rng.integers(2, 8))
        pattern = make_pattern(rng, n, 1, density=0.5)
        k = term_rank(pattern)
        if k < n:
            continue
        cover = cycle_cover(pattern, range(n))
        if cover.odd_cycles:
            with pytest.raises(NumericOracleError):
                constructive_realization(pattern, cover, perturb=0.0)
        else:
            assert count_nonzero_simple(constructive_realization(pattern, cover, perturb=0.0)) == n
        r = constructive_realization(pattern, cover, perturb=0.1, seed=3)
        assert count_nonzero_simple(r) == n


def test_constructive_rejects_invalid_cover():
    pattern = StructuredPattern.from_pairs(3, 0, [(0, 1)], [])
    with pytest.raises(ValueError):
        constructive_realization(pattern, CycleCover(((0, 2),)))


def test_probe_varieties_generic_realization(example_pattern, example_targets):
    r = sample_realization(example_pattern, seed=9)
    probe = probe_varieties(r, term_rank(example_pattern))
    assert not probe.in_v1
    assert probe.a_nk != 0


def test_probe_varieties_repeated_eigenvalue():
    r = NumericRealization.from_arrays(np.eye(2), [[1.0], [1.0]])
    probe = probe_varieties(r, 2)
    assert probe.in_v1
    assert not probe.generic


def test_probe_varieties_zero_input():
    r = NumericRealization.from_arrays([[0.0, 0.5], [0.5, 0.0]], np.zeros((2, 1)))
    assert probe_varieties(r, 2).in_v2
