"""Phase-1 simplex: feasibility decisions and Farkas certificates."""

from __future__ import annotations

import numpy as np
import pytest

from bellsim.simplex import FEASIBILITY_TOL, solve_equality_feasibility


def assert_valid_solution(A, b, result, tol=1e-9):
    assert result.feasible
    assert np.all(result.x >= 0.0)
    assert np.max(np.abs(A @ result.x - b)) <= tol


def assert_valid_certificate(A, b, result, slack=1e-7):
    assert not result.feasible
    y = result.certificate
    assert float(np.max(y @ A)) <= slack
    assert float(y @ b) > FEASIBILITY_TOL


class TestElementary:
    def test_identity_system(self):
        A = np.eye(3)
        b = np.array([0.2, 0.3, 0.5])
        assert_valid_solution(A, b, solve_equality_feasibility(A, b))

    def test_single_infeasible_row(self):
        # x1 + x2 = -1 has no nonnegative solution
        A = np.array([[1.0, 1.0]])
        b = np.array([-1.0])
        result = solve_equality_feasibility(A, b)
        assert_valid_certificate(A, b, result)

    def test_conflicting_equalities(self):
        A = np.array([[1.0, 0.0], [1.0, 0.0]])
        b = np.array([1.0, 2.0])
        result = solve_equality_feasibility(A, b)
        assert_valid_certificate(A, b, result)

    def test_redundant_rows_accepted(self):
        A = np.array([[1.0, 1.0], [1.0, 1.0], [1.0, 0.0]])
        b = np.array([1.0, 1.0, 0.25])
        assert_valid_solution(A, b, solve_equality_feasibility(A, b))

    def test_zero_rhs(self):
        A = np.array([[1.0, -1.0], [2.0, 1.0]])
        b = np.zeros(2)
        result = solve_equality_feasibility(A, b)
        assert_valid_solution(A, b, result)
        assert result.objective <= FEASIBILITY_TOL

    def test_negative_rhs_handled_by_row_flip(self):
        A = np.array([[-1.0, 0.0], [0.0, 1.0]])
        b = np.array([-0.7, 0.3])
        result = solve_equality_feasibility(A, b)
        assert_valid_solution(A, b, result)
        np.testing.assert_allclose(result.x, [0.7, 0.3], atol=1e-9)


class TestRandomized:
    def test_constructed_feasible_systems(self):
        rng = np.random.default_rng(31)
        for _ in range(40):
            m = int(rng.integers(1, 8))
            n = int(rng.integers(m, 14))
            A = rng.normal(size=(m, n))
            x0 = rng.random(n)
            b = A @ x0
            result = solve_equality_feasibility(A, b)
            assert_valid_solution(A, b, result, tol=1e-7)

    def test_certificates_always_verify(self):
        rng = np.random.default_rng(32)
        infeasible_seen = 0
        for _ in range(60):
            m = int(rng.integers(2, 7))
            n = int(rng.integers(1, 6))
            A = rng.normal(size=(m, n))
            b = rng.normal(size=m)
            result = solve_equality_feasibility(A, b)
            if result.feasible:
                assert_valid_solution(A, b, result, tol=1e-7)
            else:
                infeasible_seen += 1
                assert_valid_certificate(A, b, result)
        assert infeasible_seen > 0

    def test_deterministic(self):
        rng = np.random.default_rng(33)
        A = rng.normal(size=(4, 6))
        b = rng.normal(size=4)
        r1 = solve_equality_feasibility(A, b)
        r2 = solve_equality_feasibility(A, b)
        assert r1.feasible == r2.feasible
        assert r1.iterations == r2.iterations
        if r1.feasible:
            assert np.array_equal(r1.x, r2.x)
        else:
            assert np.array_equal(r1.certificate, r2.certificate)


class TestDegenerate:
    def test_highly_degenerate_vertex(self):
        # many ties in the ratio test; Bland's rule must still terminate
        A = np.array([
            [1.0, 1.0, 1.0, 1.0],
            [1.0, 0.0, 1.0, 0.0],
            [0.0, 1.0, 0.0, 1.0],
        ])
        b = np.array([1.0, 0.5, 0.5])
        result = solve_equality_feasibility(A, b)
        assert_valid_solution(A, b, result)

    def test_all_zero_column(self):
        A = np.array([[0.0, 1.0], [0.0, 1.0]])
        b = np.array([0.5, 0.5])
        assert_valid_solution(A, b, solve_equality_feasibility(A, b))
