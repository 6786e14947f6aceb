"""Extended second-order cones: products of Lorentz cones, half-spaces, rays and subspaces.

Every block kind is an immutable value object exposing membership margins,
its dual, Euclidean projection and the face exposed by a dual vector.  The
family is closed under duals and faces, which is what lets the relaxation
and facial-reduction loops stay inside it.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from .config import DEFAULT


class DimensionError(ValueError):
    """Vector length does not match the cone."""


class NotInDualCone(ValueError):
    """An exposing vector does not lie in the dual of the block it exposes."""


class Membership(enum.Enum):
    INSIDE = "inside"
    BOUNDARY = "boundary"
    OUTSIDE = "outside"


def _as_vector(x, dim: int | None = None) -> np.ndarray:
    v = np.asarray(x, dtype=float).reshape(-1)
    if dim is not None and v.shape[0] != dim:
        raise DimensionError(f"expected a vector of length {dim}, got {v.shape[0]}")
    return v


def _unit(v) -> np.ndarray:
    v = _as_vector(v)
    nrm = np.linalg.norm(v)
    if nrm == 0.0:
        raise ValueError("direction must be nonzero")
    out = v / nrm
    out.setflags(write=False)
    return out


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


def orthonormal_columns(mat: np.ndarray, dim: int, eps_rank: float = DEFAULT.eps_rank) -> np.ndarray:
    """Orthonormal basis (as columns) of the column span of ``mat``."""
    mat = np.asarray(mat, dtype=float).reshape(dim, -1)
    if mat.shape[1] == 0:
        return np.zeros((dim, 0))
    u, s, _ = np.linalg.svd(mat, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        return np.zeros((dim, 0))
    rank = int(np.sum(s > s[0] * max(mat.shape) * eps_rank))
    return u[:, :rank]


def complement_columns(basis: np.ndarray, dim: int) -> np.ndarray:
    """Orthonormal basis of the orthogonal complement of an orthonormal ``basis``."""
    basis = np.asarray(basis, dtype=float).reshape(dim, -1)
    k = basis.shape[1]
    if k == 0:
        return np.eye(dim)
    if k == dim:
        return np.zeros((dim, 0))
    u, _, _ = np.linalg.svd(basis, full_matrices=True)
    return u[:, k:]


# ---------------------------------------------------------------------------
# blocks


@dataclass(frozen=True, eq=False)
class Lorentz:
    """Second-order cone ``{x : x0 >= ||x[1:]||}``; ``dim == 1`` is the half-line."""

    dim: int
    kind = "soc"

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("Lorentz cone needs dim >= 1")

    @property
    def is_second_order(self) -> bool:
        # Q^1 is polyhedral and never takes part in the relaxation index sets.
        return self.dim >= 2

    def margin(self, x: np.ndarray) -> float:
        return float(x[0] - np.linalg.norm(x[1:]))

    def classify(self, x: np.ndarray, eps: float) -> Membership:
        m = self.margin(x)
        if m > eps:
            return Membership.INSIDE
        if m < -eps:
            return Membership.OUTSIDE
        return Membership.BOUNDARY

    def project(self, x: np.ndarray) -> np.ndarray:
        x0, xb = x[0], x[1:]
        r = np.linalg.norm(xb)
        if x0 >= r:
            return x.copy()
        if x0 <= -r:
            return np.zeros_like(x)
        a = 0.5 * (x0 + r)
        return np.concatenate([[a], a * xb / r])

    def dual(self) -> "Lorentz":
        return self

    def interior_direction(self) -> np.ndarray:
        e = np.zeros(self.dim)
        e[0] = 1.0
        return e

    def in_dual(self, s: np.ndarray, tol: float) -> bool:
        return self.margin(s) >= -tol

    def face(self, s: np.ndarray, tol: float) -> "Block":
        if not self.in_dual(s, tol):
            raise NotInDualCone(f"exposing vector has Lorentz margin {self.margin(s):.3e}")
        if np.linalg.norm(s) <= tol:
            return self
        if self.dim == 1 or self.margin(s) > tol:
            return Subspace.zero(self.dim)
        return Ray(reflect(s))

    def to_dict(self) -> dict:
        return {"type": "soc", "dim": self.dim}

    def same_set(self, other: "Block", tol: float = 1e-9) -> bool:
        return isinstance(other, Lorentz) and other.dim == self.dim

    def __repr__(self) -> str:
        return f"Lorentz({self.dim})"


@dataclass(frozen=True, eq=False)
class HalfSpace:
    """Closed half-space ``{x : d.x >= 0}`` with a unit normal ``d``."""

    normal: np.ndarray
    kind = "halfspace"

    def __post_init__(self):
        object.__setattr__(self, "normal", _unit(self.normal))

    @property
    def dim(self) -> int:
        return self.normal.shape[0]

    is_second_order = False

    def margin(self, x: np.ndarray) -> float:
        return float(self.normal @ x)

    def classify(self, x: np.ndarray, eps: float) -> Membership:
        m = self.margin(x)
        if m > eps:
            return Membership.INSIDE
        if m < -eps:
            return Membership.OUTSIDE
        return Membership.BOUNDARY

    def project(self, x: np.ndarray) -> np.ndarray:
        return x - min(0.0, float(self.normal @ x)) * self.normal

    def dual(self) -> "Ray":
        return Ray(self.normal)

    def interior_direction(self) -> np.ndarray:
        return np.array(self.normal)

    def in_dual(self, s: np.ndarray, tol: float) -> bool:
        lam = float(self.normal @ s)
        return lam >= -tol and np.linalg.norm(s - lam * self.normal) <= tol

    def face(self, s: np.ndarray, tol: float) -> "Block":
        if not self.in_dual(s, tol):
            raise NotInDualCone("exposing vector is not a nonnegative multiple of the normal")
        if float(self.normal @ s) <= tol:
            return self
        return Subspace(complement_columns(self.normal[:, None], self.dim))

    def to_dict(self) -> dict:
        return {"type": "halfspace", "dim": self.dim, "d": self.normal.tolist()}

    def same_set(self, other: "Block", tol: float = 1e-9) -> bool:
        return (isinstance(other, HalfSpace) and other.dim == self.dim
                and np.linalg.norm(other.normal - self.normal) <= tol)

    def __repr__(self) -> str:
        return f"HalfSpace({np.array2string(self.normal, precision=4)})"


@dataclass(frozen=True, eq=False)
class Ray:
    """Half-line ``{a g : a >= 0}`` with a unit generator ``g``."""

    generator: np.ndarray
    kind = "ray"

    def __post_init__(self):
        object.__setattr__(self, "generator", _unit(self.generator))

    @property
    def dim(self) -> int:
        return self.generator.shape[0]

    is_second_order = False

    def margin(self, x: np.ndarray) -> float:
        return -float(np.linalg.norm(x - self.project(x)))

    def classify(self, x: np.ndarray, eps: float) -> Membership:
        if self.margin(x) < -eps:
            return Membership.OUTSIDE
        if float(self.generator @ x) > eps:
            return Membership.INSIDE
        return Membership.BOUNDARY

    def project(self, x: np.ndarray) -> np.ndarray:
        return max(0.0, float(self.generator @ x)) * self.generator

    def dual(self) -> HalfSpace:
        return HalfSpace(self.generator)

    def interior_direction(self) -> np.ndarray:
        return np.array(self.generator)

    def in_dual(self, s: np.ndarray, tol: float) -> bool:
        return float(self.generator @ s) >= -tol

    def face(self, s: np.ndarray, tol: float) -> "Block":
        if not self.in_dual(s, tol):
            raise NotInDualCone("exposing vector has negative inner product with the generator")
        if float(self.generator @ s) <= tol:
            return self
        return Subspace.zero(self.dim)

    def to_dict(self) -> dict:
        return {"type": "ray", "dim": self.dim, "d": self.generator.tolist()}

    def same_set(self, other: "Block", tol: float = 1e-9) -> bool:
        return (isinstance(other, Ray) and other.dim == self.dim
                and np.linalg.norm(other.generator - self.generator) <= tol)

    def __repr__(self) -> str:
        return f"Ray({np.array2string(self.generator, precision=4)})"


@dataclass(frozen=True, eq=False)
class Subspace:
    """Linear subspace block; the zero cone and the full space are special cases."""

    basis: np.ndarray
    ambient: int | None = None
    kind = "subspace"
    _complement: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        basis = np.asarray(self.basis, dtype=float)
        n = self.ambient if self.ambient is not None else basis.shape[0]
        basis = orthonormal_columns(basis.reshape(n, -1), n)
        object.__setattr__(self, "basis", _frozen(basis))
        object.__setattr__(self, "ambient", n)
        object.__setattr__(self, "_complement", _frozen(complement_columns(basis, n)))

    @classmethod
    def zero(cls, n: int) -> "Subspace":
        return cls(np.zeros((n, 0)), ambient=n)

    @classmethod
    def full(cls, n: int) -> "Subspace":
        return cls(np.eye(n), ambient=n)

    @property
    def dim(self) -> int:
        return self.ambient

    @property
    def rank(self) -> int:
        return self.basis.shape[1]

    @property
    def complement(self) -> np.ndarray:
        return self._complement

    is_second_order = False

    def margin(self, x: np.ndarray) -> float:
        return -float(np.linalg.norm(self._complement.T @ x))

    def classify(self, x: np.ndarray, eps: float) -> Membership:
        return Membership.OUTSIDE if self.margin(x) < -eps else Membership.INSIDE

    def project(self, x: np.ndarray) -> np.ndarray:
        return self.basis @ (self.basis.T @ x)

    def dual(self) -> "Subspace":
        return Subspace(self._complement, ambient=self.dim)

    def interior_direction(self) -> np.ndarray:
        return np.zeros(self.dim)

    def in_dual(self, s: np.ndarray, tol: float) -> bool:
        return float(np.linalg.norm(self.basis.T @ s)) <= tol

    def face(self, s: np.ndarray, tol: float) -> "Subspace":
        if not self.in_dual(s, tol):
            raise NotInDualCone("exposing vector is not orthogonal to the subspace")
        return self

    def to_dict(self) -> dict:
        return {"type": "subspace", "dim": self.dim, "basis": self.basis.T.tolist()}

    def same_set(self, other: "Block", tol: float = 1e-9) -> bool:
        if not isinstance(other, Subspace) or other.dim != self.dim or other.rank != self.rank:
            return False
        return float(np.linalg.norm(self._complement.T @ other.basis)) <= tol * max(1, self.rank)

    def __repr__(self) -> str:
        if self.rank == 0:
            return f"Zero({self.dim})"
        if self.rank == self.dim:
            return f"Full({self.dim})"
        return f"Subspace(dim={self.dim}, rank={self.rank})"


Block = Union[Lorentz, HalfSpace, Ray, Subspace]


def block_from_dict(rec: dict) -> Block:
    kind = rec["type"].lower()
    n = int(rec["dim"])
    if kind in ("soc", "lorentz", "q"):
        return Lorentz(n)
    if kind == "halfspace":
        return HalfSpace(_as_vector(rec["d"], n))
    if kind == "ray":
        return Ray(_as_vector(rec["d"], n))
    if kind == "subspace":
        vecs = np.asarray(rec.get("basis", []), dtype=float).reshape(-1, n)
        return Subspace(vecs.T, ambient=n)
    if kind == "zero":
        return Subspace.zero(n)
    if kind in ("free", "full"):
        return Subspace.full(n)
    raise ValueError(f"unknown block type {rec['type']!r}")


# ---------------------------------------------------------------------------
# product cones


@dataclass(frozen=True)
class Margin:
    per_block: tuple[float, ...]

    @property
    def overall(self) -> float:
        return min(self.per_block) if self.per_block else 0.0


@dataclass(frozen=True)
class MembershipReport:
    per_block: tuple[Membership, ...]
    margins: Margin
    eps: float

    @property
    def overall(self) -> Membership:
        if any(m is Membership.OUTSIDE for m in self.per_block):
            return Membership.OUTSIDE
        if all(m is Membership.INSIDE for m in self.per_block):
            return Membership.INSIDE
        return Membership.BOUNDARY


@dataclass(frozen=True, eq=False)
class ExtendedCone:
    """Ordered product of blocks; the block offsets partition the coordinates."""

    blocks: tuple
    offsets: tuple = field(init=False)

    def __post_init__(self):
        blocks = tuple(self.blocks)
        object.__setattr__(self, "blocks", blocks)
        offs, pos = [], 0
        for b in blocks:
            offs.append(pos)
            pos += b.dim
        object.__setattr__(self, "offsets", tuple(offs))

    @classmethod
    def of(cls, *blocks: Block) -> "ExtendedCone":
        return cls(tuple(blocks))

    @classmethod
    def socs(cls, *dims: int) -> "ExtendedCone":
        return cls(tuple(Lorentz(n) for n in dims))

    @classmethod
    def from_list(cls, recs: Sequence[dict]) -> "ExtendedCone":
        return cls(tuple(block_from_dict(r) for r in recs))

    def to_list(self) -> list[dict]:
        return [b.to_dict() for b in self.blocks]

    @property
    def total_dim(self) -> int:
        return sum(b.dim for b in self.blocks)

    def __len__(self) -> int:
        return len(self.blocks)

    def __iter__(self):
        return iter(self.blocks)

    def __getitem__(self, i: int) -> Block:
        return self.blocks[i]

    def slice(self, i: int) -> slice:
        return slice(self.offsets[i], self.offsets[i] + self.blocks[i].dim)

    def parts(self, x) -> list[np.ndarray]:
        x = self.check(x)
        return [x[self.slice(i)] for i in range(len(self.blocks))]

    def check(self, x) -> np.ndarray:
        return _as_vector(x, self.total_dim)

    def lorentz_indices(self) -> list[int]:
        return [i for i, b in enumerate(self.blocks) if isinstance(b, Lorentz) and b.is_second_order]

    def lorentz_count(self) -> int:
        return len(self.lorentz_indices())

    def with_block(self, i: int, block: Block) -> "ExtendedCone":
        if block.dim != self.blocks[i].dim:
            raise DimensionError("replacement block has the wrong dimension")
        blocks = list(self.blocks)
        blocks[i] = block
        return ExtendedCone(tuple(blocks))

    def dual(self) -> "ExtendedCone":
        return ExtendedCone(tuple(b.dual() for b in self.blocks))

    def interior_direction(self) -> np.ndarray:
        return np.concatenate([b.interior_direction() for b in self.blocks]) if self.blocks else np.zeros(0)

    def span_complement(self) -> np.ndarray:
        """Orthonormal basis of ``K^perp``, the complement of the linear span of the cone."""
        n = self.total_dim
        cols = []
        for i, b in enumerate(self.blocks):
            if isinstance(b, Ray):
                loc = complement_columns(b.generator[:, None], b.dim)
            elif isinstance(b, Subspace):
                loc = b.complement
            else:
                continue
            emb = np.zeros((n, loc.shape[1]))
            emb[self.slice(i)] = loc
            cols.append(emb)
        return np.hstack(cols) if cols else np.zeros((n, 0))

    def same_set(self, other: "ExtendedCone", tol: float = 1e-9) -> bool:
        return len(self) == len(other) and all(a.same_set(b, tol) for a, b in zip(self, other))

    def __repr__(self) -> str:
        return " x ".join(repr(b) for b in self.blocks) or "ExtendedCone()"


# ---------------------------------------------------------------------------
# operations


def margin(K: ExtendedCone, x) -> Margin:
    return Margin(tuple(b.margin(p) for b, p in zip(K.blocks, K.parts(x))))


def membership(K: ExtendedCone, x, eps_feas: float = DEFAULT.eps_feas) -> MembershipReport:
    """Inside / Boundary / Outside per block with the band ``eps_feas * (1 + ||x||)``."""
    x = K.check(x)
    eps = eps_feas * (1.0 + float(np.linalg.norm(x)))
    parts = K.parts(x)
    return MembershipReport(
        per_block=tuple(b.classify(p, eps) for b, p in zip(K.blocks, parts)),
        margins=Margin(tuple(b.margin(p) for b, p in zip(K.blocks, parts))),
        eps=eps,
    )


def contains(K: ExtendedCone, x, eps_feas: float = DEFAULT.eps_feas) -> bool:
    return membership(K, x, eps_feas).overall is not Membership.OUTSIDE


def in_relative_interior(K: ExtendedCone, x, eps_feas: float = DEFAULT.eps_feas) -> bool:
    return membership(K, x, eps_feas).overall is Membership.INSIDE


def reflect(x) -> np.ndarray:
    """``(x0, -x[1:])``, the reflection with respect to a Lorentz cone."""
    x = _as_vector(x)
    out = -x
    out[0] = x[0]
    return out


def reflect_block(K: ExtendedCone, i: int, x) -> np.ndarray:
    if not isinstance(K[i], Lorentz):
        raise TypeError(f"block {i} is {K[i]!r}, reflection needs a Lorentz block")
    return reflect(_as_vector(x, K[i].dim))


def dual(K: ExtendedCone) -> ExtendedCone:
    return K.dual()


def project(K: ExtendedCone, x) -> tuple[np.ndarray, float]:
    """Euclidean projection onto ``K`` computed blockwise, with the distance."""
    x = K.check(x)
    p = np.concatenate([b.project(part) for b, part in zip(K.blocks, K.parts(x))]) if len(K) else x
    return p, float(np.linalg.norm(x - p))


def distance(K: ExtendedCone, x) -> float:
    return project(K, x)[1]


def faces_step(K: ExtendedCone, block_index: int, exposing_vector, tol: float = 1e-9,
               scale: float | None = None) -> Block:
    """Face of block ``block_index`` exposed by a vector from its dual.

    ``tol`` is relative to ``scale`` (default: norm of the exposing vector), so
    a block component that is negligible against the whole witness is read
    as zero.
    """
    block = K[block_index]
    s = _as_vector(exposing_vector, block.dim)
    if scale is None:
        scale = float(np.linalg.norm(s))
    return block.face(s, tol * max(scale, 1e-300))


def face_of(K: ExtendedCone, s, tol: float = 1e-9) -> ExtendedCone:
    """``K ∩ {s}^perp`` for ``s`` in the dual cone, block by block."""
    s = K.check(s)
    scale = float(np.linalg.norm(s))
    return ExtendedCone(tuple(faces_step(K, i, p, tol, scale) for i, p in enumerate(K.parts(s))))


def in_dual(K: ExtendedCone, s, eps_feas: float = DEFAULT.eps_feas) -> bool:
    s = K.check(s)
    return contains(K.dual(), s, eps_feas)
