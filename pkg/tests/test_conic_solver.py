import numpy as np
from hypothesis import given, settings, strategies as st

from cone_pathology.cone_algebra import ExtendedCone, contains, in_dual
from cone_pathology.conic_solver import (OracleStatus, dual_witness, find_cone_line_point, max_linear,
                                         max_margin, min_norm_point)
from cone_pathology.linear_geometry import AffineSet, LinearSubspace


def line(point, *span):
    return AffineSet.from_span(np.array(point, dtype=float), np.array(span, dtype=float).reshape(-1, len(point)))


def test_margin_strict():
    K = ExtendedCone.socs(3)
    aff = line([2.0, 0.0, 0.0], [0.0, 1.0, 0.0])
    r = max_margin(K, aff)
    assert r.status is OracleStatus.STRICT
    assert aff.contains(r.primal) and contains(K, r.primal)


def test_margin_touching():
    # {(1, 1, s)} touches Q^3 only at s = 0
    K = ExtendedCone.socs(3)
    r = max_margin(K, line([1.0, 1.0, 0.0], [0.0, 0.0, 1.0]))
    assert r.status is OracleStatus.TOUCHING


def test_margin_infeasible():
    K = ExtendedCone.socs(3)
    r = max_margin(K, line([-1.0, 0.0, 0.0], [0.0, 1.0, 0.0]))
    assert r.status is OracleStatus.INFEASIBLE


def test_separation():
    K = ExtendedCone.socs(3)
    aff = line([-1.0, 0.0, 0.0], [0.0, 1.0, 0.0])
    r = dual_witness(K, aff, "separate")
    assert r.status is OracleStatus.INFEASIBLE
    w = r.dual
    assert in_dual(K, w, 1e-9)
    assert abs(w @ np.array([0.0, 1.0, 0.0])) <= 1e-9
    assert w @ aff.point < 0


def test_support_for_weakly_feasible():
    K = ExtendedCone.socs(3)
    aff = line([1.0, 1.0, 0.0], [0.0, 0.0, 1.0])
    r = dual_witness(K, aff, "support")
    assert r.status is OracleStatus.OPTIMAL
    w = r.dual / np.linalg.norm(r.dual)
    assert np.allclose(w, np.array([1.0, -1.0, 0.0]) / np.sqrt(2), atol=1e-8)
    assert dual_witness(K, aff, "separate").status is OracleStatus.OPTIMAL


def test_cone_line_point():
    K = ExtendedCone.socs(3, 3)
    L = LinearSubspace.span([[1.0, 1.0, 0.0, 0.0, 0.0, 0.0], [0.0, 0.0, 1.0, 1.0, 1.0, 0.0]], 6)
    pt = find_cone_line_point(K, L)
    assert pt is not None
    a = pt.vector
    assert contains(K, a, 1e-10) and L.contains(a)
    # the only cone direction in L is (1, 1, 0) in the first block
    assert np.allclose(np.abs(a), np.array([1.0, 1.0, 0.0, 0.0, 0.0, 0.0]) / np.sqrt(2), atol=1e-8)


def test_cone_line_point_absent():
    K = ExtendedCone.socs(3)
    assert find_cone_line_point(K, LinearSubspace.span([[0.0, 1.0, 0.0]], 3)) is None
    assert find_cone_line_point(K, LinearSubspace.zero(3)) is None


def test_min_norm_point():
    K = ExtendedCone.socs(3)
    x = min_norm_point(K, line([1.0, 0.0, 2.0], [0.0, 1.0, 0.0], [1.0, 0.0, 0.0]))
    # closest point of {x2 = 2} ∩ Q^3 is (2, 0, 2)
    assert np.allclose(x, [2.0, 0.0, 2.0], atol=1e-7)
    assert min_norm_point(K, line([-1.0, 0.0, 0.0], [0.0, 1.0, 0.0])) is None


def test_max_linear_attained_and_unbounded():
    K = ExtendedCone.socs(3)
    # sup y subject to (1, -y, 0) in Q^3, attained at y = 1
    r = max_linear(np.array([[0.0], [1.0], [0.0]]), [1.0], [1.0, 0.0, 0.0], K)
    assert r.status is OracleStatus.OPTIMAL and abs(r.value - 1.0) <= 1e-7
    r = max_linear(np.array([[-1.0], [0.0], [0.0]]), [1.0], [0.0, 0.0, 0.0], K)
    assert r.status is OracleStatus.UNBOUNDED


@settings(max_examples=20)
@given(st.integers(0, 10_000))
def test_margin_on_interior_lines(seed):
    # a line through a strictly interior point always has a positive margin
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 6))
    g = rng.standard_normal(n - 1)
    p = np.concatenate([[np.linalg.norm(g) + 0.1], g])
    d = rng.standard_normal(n)
    r = max_margin(ExtendedCone.socs(n), line(p, d))
    assert r.status is OracleStatus.STRICT

