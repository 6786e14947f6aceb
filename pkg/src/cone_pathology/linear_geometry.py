"""Subspaces and affine sets with SVD-based rank decisions."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cone_algebra import complement_columns, orthonormal_columns
from .config import DEFAULT


class NoSolution(ValueError):
    """Least-squares residual of a preimage solve exceeds tolerance."""


class InconsistentSystem(ValueError):
    """``Ax = b`` has no solution, so the affine set is empty."""


@dataclass(frozen=True, eq=False)
class LinearSubspace:
    """A subspace of R^n stored as an orthonormal basis (columns)."""

    basis: np.ndarray

    def __post_init__(self):
        b = np.array(self.basis, dtype=float)
        if b.ndim != 2:
            raise ValueError("basis must be a 2-d array of columns")
        b.setflags(write=False)
        object.__setattr__(self, "basis", b)

    @classmethod
    def span(cls, vectors, ambient_dim: int, eps_rank: float = DEFAULT.eps_rank) -> "LinearSubspace":
        """Span of row vectors (an empty list gives the zero subspace)."""
        vecs = np.asarray(vectors, dtype=float).reshape(-1, ambient_dim)
        return cls(orthonormal_columns(vecs.T, ambient_dim, eps_rank))

    @classmethod
    def zero(cls, n: int) -> "LinearSubspace":
        return cls(np.zeros((n, 0)))

    @classmethod
    def full(cls, n: int) -> "LinearSubspace":
        return cls(np.eye(n))

    @property
    def ambient_dim(self) -> int:
        return self.basis.shape[0]

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    def project(self, v) -> np.ndarray:
        return self.basis @ (self.basis.T @ np.asarray(v, dtype=float))

    def residual(self, v) -> float:
        v = np.asarray(v, dtype=float)
        return float(np.linalg.norm(v - self.project(v)))

    def contains(self, v, tol: float = DEFAULT.eps_lin) -> bool:
        v = np.asarray(v, dtype=float)
        return self.residual(v) <= tol * (1.0 + float(np.linalg.norm(v)))

    def complement(self) -> "LinearSubspace":
        return orthogonal_complement(self)

    def same_as(self, other: "LinearSubspace", tol: float = DEFAULT.eps_lin) -> bool:
        if self.ambient_dim != other.ambient_dim or self.dim != other.dim:
            return False
        return float(np.linalg.norm(other.basis - self.project(other.basis))) <= tol * max(1, self.dim)


def orthogonal_complement(S: LinearSubspace) -> LinearSubspace:
    return LinearSubspace(complement_columns(S.basis, S.ambient_dim))


def intersect(S1: LinearSubspace, S2: LinearSubspace, eps_rank: float = DEFAULT.eps_rank) -> LinearSubspace:
    """``S1 ∩ S2`` as the complement of the sum of the two complements."""
    if S1.ambient_dim != S2.ambient_dim:
        raise ValueError("subspaces live in different ambient spaces")
    n = S1.ambient_dim
    stacked = np.hstack([orthogonal_complement(S1).basis, orthogonal_complement(S2).basis])
    return LinearSubspace(complement_columns(orthonormal_columns(stacked, n, eps_rank), n))


def solve_preimage(At, target, b=None, eps_lin: float = DEFAULT.eps_lin) -> np.ndarray:
    """Minimal-norm ``y`` with ``At @ y = target`` (and ``b @ y = 0`` when ``b`` is given)."""
    At = np.atleast_2d(np.asarray(At, dtype=float))
    target = np.asarray(target, dtype=float).reshape(-1)
    lhs, rhs = At, target
    if b is not None:
        lhs = np.vstack([At, np.asarray(b, dtype=float).reshape(1, -1)])
        rhs = np.concatenate([target, [0.0]])
    y, *_ = np.linalg.lstsq(lhs, rhs, rcond=None)
    resid = float(np.linalg.norm(lhs @ y - rhs))
    if resid > eps_lin * (1.0 + float(np.linalg.norm(target))):
        raise NoSolution(f"preimage residual {resid:.3e}")
    return y


@dataclass(frozen=True, eq=False)
class AffineSet:
    """The affine set ``L + c``."""

    subspace: LinearSubspace
    point: np.ndarray
    source_form: str = "span"
    equations: tuple | None = None
    # the span vectors exactly as supplied (rows); kept for high-precision work
    generators: np.ndarray | None = None

    def __post_init__(self):
        p = np.array(self.point, dtype=float).reshape(-1)
        if p.shape[0] != self.subspace.ambient_dim:
            raise ValueError("point and subspace dimensions differ")
        p.setflags(write=False)
        object.__setattr__(self, "point", p)

    @classmethod
    def from_span(cls, point, span_vectors=(), eps_rank: float = DEFAULT.eps_rank) -> "AffineSet":
        point = np.asarray(point, dtype=float).reshape(-1)
        gens = np.asarray(span_vectors, dtype=float).reshape(-1, point.shape[0])
        return cls(LinearSubspace.span(gens, point.shape[0], eps_rank), point, "span", None, gens.copy())

    @property
    def dim(self) -> int:
        return self.subspace.ambient_dim

    @property
    def L(self) -> LinearSubspace:
        return self.subspace

    @property
    def basis(self) -> np.ndarray:
        return self.subspace.basis

    def normal_point(self) -> np.ndarray:
        """The point of the set closest to the origin."""
        return self.point - self.subspace.project(self.point)

    def at(self, z) -> np.ndarray:
        return self.subspace.basis @ np.asarray(z, dtype=float) + self.point

    def coordinates(self, x) -> np.ndarray:
        return self.subspace.basis.T @ (np.asarray(x, dtype=float) - self.point)

    def residual(self, x) -> float:
        return self.subspace.residual(np.asarray(x, dtype=float) - self.point)

    def contains(self, x, tol: float = DEFAULT.eps_lin) -> bool:
        x = np.asarray(x, dtype=float)
        scale = 1.0 + float(np.linalg.norm(x)) + float(np.linalg.norm(self.point))
        return self.residual(x) <= tol * scale

    def scaled(self, alpha: float) -> "AffineSet":
        return AffineSet(self.subspace, alpha * self.point, self.source_form, None, self.generators)

    def exact_generators(self) -> np.ndarray:
        """Span vectors as rows: the supplied ones if any, else the orthonormal basis."""
        if self.generators is not None:
            return self.generators
        return self.subspace.basis.T


def affine_from_equations(A, b, eps_lin: float = DEFAULT.eps_lin, eps_rank: float = DEFAULT.eps_rank) -> AffineSet:
    """``{x : Ax = b}`` with ``L = null(A)`` and the minimal-norm solution as point."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    b = np.asarray(b, dtype=float).reshape(-1)
    n = A.shape[1]
    row_space = orthonormal_columns(A.T, n, eps_rank)
    null = complement_columns(row_space, n)
    c, *_ = np.linalg.lstsq(A, b, rcond=None)
    resid = float(np.linalg.norm(A @ c - b))
    if resid > eps_lin * (1.0 + float(np.linalg.norm(b))):
        raise InconsistentSystem(f"Ax = b is inconsistent (residual {resid:.3e})")
    return AffineSet(LinearSubspace(null), c, "equations", (A.copy(), b.copy()))
