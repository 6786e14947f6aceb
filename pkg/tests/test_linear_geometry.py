import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from cone_pathology.linear_geometry import (AffineSet, InconsistentSystem, LinearSubspace, NoSolution,
                                            affine_from_equations, intersect, orthogonal_complement,
                                            solve_preimage)
from oracles import consistent


@st.composite
def integer_matrices(draw, max_rows=4, max_cols=6):
    r = draw(st.integers(1, max_rows))
    c = draw(st.integers(1, max_cols))
    return draw(arrays(np.int64, (r, c), elements=st.integers(-3, 3))).astype(float)


@given(integer_matrices())
def test_span_basis_is_orthonormal(V):
    S = LinearSubspace.span(V, V.shape[1])
    assert np.allclose(S.basis.T @ S.basis, np.eye(S.dim), atol=1e-12)
    assert S.dim == np.linalg.matrix_rank(V)
    for v in V:
        assert S.contains(v)


@given(integer_matrices())
def test_complement_splits_the_space(V):
    n = V.shape[1]
    S = LinearSubspace.span(V, n)
    C = orthogonal_complement(S)
    assert S.dim + C.dim == n
    assert np.allclose(S.basis.T @ C.basis, 0.0, atol=1e-12)
    assert C.complement().same_as(S)


@given(integer_matrices(), integer_matrices())
def test_intersection_lies_in_both(V, W):
    n = min(V.shape[1], W.shape[1])
    S1 = LinearSubspace.span(V[:, :n], n)
    S2 = LinearSubspace.span(W[:, :n], n)
    I = intersect(S1, S2)
    for v in I.basis.T:
        assert S1.contains(v) and S2.contains(v)
    # dim(S1 ∩ S2) = dim S1 + dim S2 - dim(S1 + S2)
    both = np.linalg.matrix_rank(np.hstack([S1.basis, S2.basis])) if S1.dim + S2.dim else 0
    assert I.dim == S1.dim + S2.dim - both


@given(integer_matrices(), st.data())
def test_affine_from_equations_agrees_with_exact_consistency(A, data):
    b = data.draw(arrays(np.int64, A.shape[0], elements=st.integers(-3, 3))).astype(float)
    if consistent(A, b):
        aff = affine_from_equations(A, b)
        assert np.allclose(A @ aff.point, b, atol=1e-10)
        assert np.allclose(A @ aff.basis, 0.0, atol=1e-10)
        assert aff.L.dim == A.shape[1] - np.linalg.matrix_rank(A)
        z = np.arange(aff.L.dim, dtype=float)
        assert aff.contains(aff.at(z))
        assert np.allclose(aff.coordinates(aff.at(z)), z)
    else:
        with pytest.raises(InconsistentSystem):
            affine_from_equations(A, b)


def test_normal_point_is_closest():
    aff = AffineSet.from_span([1.0, 1.0, 0.0], [[1.0, 0.0, 0.0]])
    assert np.allclose(aff.normal_point(), [0.0, 1.0, 0.0])
    assert aff.residual([5.0, 1.0, 0.0]) <= 1e-15
    assert not aff.contains([5.0, 1.0, 1.0])
    assert np.array_equal(aff.exact_generators(), [[1.0, 0.0, 0.0]])


def test_solve_preimage():
    At = np.array([[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])
    y = solve_preimage(At, [1.0, 2.0, 3.0])
    assert np.allclose(y, [1.0, 2.0])
    with pytest.raises(NoSolution):
        solve_preimage(At, [1.0, 2.0, 4.0])
    # the extra equation b.y = 0 selects the preimage orthogonal to b
    y = solve_preimage(np.array([[1.0, 1.0]]), [2.0], b=[1.0, -1.0])
    assert np.allclose(y, [1.0, 1.0])
