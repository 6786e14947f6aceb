import numpy as np
import pytest
from hypothesis import given, strategies as st

from cone_pathology.cone_algebra import ExtendedCone, HalfSpace, Lorentz
from cone_pathology.polish import BOUNDARY, INTERIOR, LOOSE, TIGHT, ZERO, PolishFailed, polish, read_pattern


def test_read_pattern():
    K = ExtendedCone.of(Lorentz(3), Lorentz(3), Lorentz(3), HalfSpace([1.0, 0.0]))
    x = np.array([1e-12, 0.0, 0.0, 1.0, 1.0, 0.0, 2.0, 0.0, 0.0, 1e-12, 3.0])
    assert read_pattern(K, x, 1.0, 1e-8) == [ZERO, BOUNDARY, INTERIOR, TIGHT]
    assert read_pattern(K, x + np.eye(11)[9], 1.0, 1e-8)[3] == LOOSE


@given(st.floats(-1e-7, 1e-7), st.floats(0.1, 10.0), st.floats(0.0, 6.28))
def test_snaps_perturbed_boundary_points(eps, r, th):
    # (r + eps, r cos th, r sin th) lands exactly on the boundary of Q^3
    K = ExtendedCone.socs(3)
    x0 = np.array([r + eps, r * np.cos(th), r * np.sin(th)])
    res = polish(K, np.eye(3), None, x0)
    assert res.pattern == (BOUNDARY,)
    assert abs(Lorentz(3).margin(res.x)) <= 1e-14 * r
    assert np.linalg.norm(res.x - x0) <= 2 * abs(eps) + 1e-14


def test_respects_the_parametrisation():
    # x = M u must stay in the range of M while reaching the boundary
    K = ExtendedCone.socs(3)
    M = np.array([[1.0, 0.0], [0.0, 1.0], [1.0, 0.0]])
    u0 = np.array([1.0, 1e-9])
    res = polish(K, M, None, u0)
    assert np.allclose(res.x, M @ res.u)
    assert abs(Lorentz(3).margin(res.x)) <= 1e-14


def test_zero_vector_fails():
    with pytest.raises(PolishFailed):
        polish(ExtendedCone.socs(3), np.eye(3), None, np.zeros(3))
