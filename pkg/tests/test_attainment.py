import numpy as np
import pytest

from cone_pathology.attainment import (DualFormProblem, NotStronglyFeasible, direct_solve, near_optimal_path,
                                       objective_kernel, regularize, solve_regularized)
from cone_pathology.cone_algebra import ExtendedCone, contains
from cone_pathology.conic_solver import OracleStatus

K3 = ExtendedCone.socs(3)
GOLDEN = DualFormProblem(np.array([[-1.0, 0.0], [0.0, -1.0], [0.0, 0.0]]), [-1.0, 1.0], [0.0, 0.0, 1.0], K3)


def test_golden_regularisation():
    reg = regularize(GOLDEN)
    assert reg.sequence.gamma == 2
    for a, y in zip(reg.directions, reg.preimages):
        assert abs(GOLDEN.b @ y) <= 1e-9
        assert np.allclose(-GOLDEN.At @ y, a, atol=1e-9)
    value, y_star = solve_regularized(reg)
    assert abs(value) <= 1e-8 and np.linalg.norm(y_star) <= 1e-6


def test_golden_path_closed_form():
    reg = regularize(GOLDEN)
    _, y_star = solve_regularized(reg)
    y_hat = np.array([2.0, 0.0])
    path = near_optimal_path(reg, y_star, (0.5, 0.9, 0.99), y_hat=y_hat)
    for p in path:
        # b.y^i = 0, so only the convex combination contributes to the value
        assert abs(p.value - (1 - p.beta) * (GOLDEN.b @ y_hat)) <= 1e-8
        assert contains(K3, GOLDEN.slack(p.y), 1e-9)
        assert p.margin >= -1e-8


def test_golden_direct_solve_diverges():
    r = direct_solve(GOLDEN)
    assert r.status is OracleStatus.DIVERGING
    values = [v for _, v, _ in r.info["probe"]]
    assert values[-1] > values[0] and values[-1] <= 0


def test_attained_problem_is_unchanged():
    # sup y subject to (1, -y, 0) in Q^3: attained at y = 1, no relaxation needed
    prob = DualFormProblem(np.array([[0.0], [1.0], [0.0]]), [1.0], [1.0, 0.0, 0.0], K3)
    reg = regularize(prob)
    assert reg.sequence.gamma == 1
    value, y = solve_regularized(reg)
    assert abs(value - 1.0) <= 1e-7 and np.allclose(y, [1.0], atol=1e-6)


def test_objective_kernel():
    L = objective_kernel(GOLDEN)
    # b = (-1, 1): the kernel is A^T (1, 1) = (-1, -1, 0)
    assert L.dim == 1 and L.contains(np.array([1.0, 1.0, 0.0]))


def test_needs_strong_feasibility():
    prob = DualFormProblem(np.array([[0.0], [1.0], [0.0]]), [1.0], [-1.0, 0.0, 0.0], K3)
    with pytest.raises(NotStronglyFeasible):
        regularize(prob)


def test_beta_range():
    reg = regularize(GOLDEN)
    with pytest.raises(ValueError):
        near_optimal_path(reg, np.zeros(2), (1.0,), y_hat=np.array([2.0, 0.0]))


def test_dict_round_trip():
    again = DualFormProblem.from_dict(GOLDEN.to_dict())
    assert np.array_equal(again.At, GOLDEN.At) and again.K.same_set(GOLDEN.K)
