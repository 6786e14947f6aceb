"""Relaxation of Lorentz blocks along directions in ``K ∩ L``.

A direction ``a`` in ``K ∩ L`` with a nonzero second-order part splits the
Lorentz blocks it touches into two groups: blocks where ``a`` is interior
are replaced by the whole space, blocks where ``a`` is a nonzero boundary
point are replaced by the supporting half-space with normal ``a'``.
Repeating until no such direction exists gives a maximal relaxation
sequence ``K_1 ⊊ ... ⊊ K_gamma``; the last problem ``(K_gamma, L, c)`` is never
weakly infeasible and decides between strong and weak status.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .cone_algebra import ExtendedCone, HalfSpace, Lorentz, Subspace, contains, reflect
from .conic_solver import (InternalInconsistency, OracleStatus, Undecided, dual_witness,
                           find_cone_line_point, max_margin, min_norm_point)
from .config import DEFAULT, Tolerances
from .linear_geometry import AffineSet, LinearSubspace
from .status import Status

log = logging.getLogger("cone_pathology.relaxation")


class EmptyIndexSets(ValueError):
    """The direction touches no second-order block, so it relaxes nothing."""


@dataclass(frozen=True)
class ReducingDirection:
    vector: np.ndarray
    interior_blocks: tuple[int, ...]   # relaxed to the full space
    boundary_blocks: tuple[int, ...]   # relaxed to a supporting half-space
    preimage: np.ndarray | None = None

    def to_dict(self) -> dict:
        out = {"direction": self.vector.tolist(), "H1": list(self.interior_blocks),
               "H2": list(self.boundary_blocks)}
        if self.preimage is not None:
            out["preimage"] = self.preimage.tolist()
        return out


@dataclass(frozen=True)
class RelaxationSequence:
    cones: tuple[ExtendedCone, ...]
    directions: tuple[ReducingDirection, ...]
    maximal: bool = True
    warnings: tuple[str, ...] = ()

    @property
    def gamma(self) -> int:
        return len(self.cones)

    @property
    def first(self) -> ExtendedCone:
        return self.cones[0]

    @property
    def last(self) -> ExtendedCone:
        return self.cones[-1]

    def to_list(self) -> list[dict]:
        recs = []
        for d, K in zip(self.directions, self.cones[1:]):
            rec = d.to_dict()
            rec["cone"] = K.to_list()
            recs.append(rec)
        return recs


def classify_direction(K: ExtendedCone, a, tol: Tolerances = DEFAULT) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Indices of second-order blocks where ``a`` is interior, and where it is nonzero boundary."""
    a = K.check(a)
    if not contains(K, a, tol.eps_feas):
        raise ValueError("direction is not in the cone")
    scale = float(np.linalg.norm(a))
    if scale == 0.0:
        return (), ()
    h1, h2 = [], []
    for i in K.lorentz_indices():
        p = a[K.slice(i)]
        if np.linalg.norm(p) <= tol.delta_dir * scale:
            continue
        if K[i].margin(p) > tol.eps_feas * scale:
            h1.append(i)
        else:
            h2.append(i)
    return tuple(h1), tuple(h2)


def relax_step(K: ExtendedCone, a, tol: Tolerances = DEFAULT) -> tuple[ExtendedCone, ReducingDirection]:
    """Relax the blocks touched by ``a``; returns the larger cone and the annotated direction."""
    a = K.check(a)
    h1, h2 = classify_direction(K, a, tol)
    if not h1 and not h2:
        raise EmptyIndexSets("direction has no nonzero second-order block")
    blocks = list(K.blocks)
    for i in h1:
        blocks[i] = Subspace.full(K[i].dim)
    for i in h2:
        blocks[i] = HalfSpace(reflect(a[K.slice(i)]))
    nrm = float(np.linalg.norm(a))
    return ExtendedCone(tuple(blocks)), ReducingDirection(a / nrm, h1, h2)


def build_maximal_sequence(K: ExtendedCone, L: LinearSubspace, tol: Tolerances = DEFAULT) -> RelaxationSequence:
    """Relax along cone-line points of ``K_i ∩ L`` until none is left."""
    m = K.lorentz_count()
    cones = [K]
    dirs: list[ReducingDirection] = []
    while True:
        try:
            pt = find_cone_line_point(cones[-1], L, tol)
        except Undecided as exc:
            log.info("relaxation sequence stopped early: %s", exc)
            return RelaxationSequence(tuple(cones), tuple(dirs), False, (str(exc),))
        if pt is None:
            break
        nxt, d = relax_step(cones[-1], pt.vector, tol)
        cones.append(nxt)
        dirs.append(d)
        # each step relaxes at least one of the m Lorentz blocks for good
        assert len(cones) <= m + 1, "relaxation sequence longer than m + 1"
    return RelaxationSequence(tuple(cones), tuple(dirs), True)


@dataclass
class LastProblemStatus:
    """Status of the last problem with its evidence (``x`` feasible, ``w`` dual)."""

    status: Status
    x: np.ndarray | None = None
    w: np.ndarray | None = None
    info: dict = field(default_factory=dict)


def last_problem_status(K_last: ExtendedCone, aff: AffineSet, tol: Tolerances = DEFAULT) -> LastProblemStatus:
    """Strongly feasible, weakly feasible or strongly infeasible for ``(K_last, L, c)``.

    A maximal sequence ends in a problem that cannot be weakly infeasible, so
    an infeasible margin without a separating ``w`` is an inconsistency.
    """
    mm = max_margin(K_last, aff, tol=tol)
    if mm.status is OracleStatus.STRICT:
        return LastProblemStatus(Status.STRONGLY_FEASIBLE, x=mm.primal, info={"margin": mm.value})
    if mm.status is OracleStatus.UNDECIDED:
        raise Undecided("last problem: margin in the undecided band", margin=mm.value)
    sep = dual_witness(K_last, aff, "separate", tol)
    if sep.status is OracleStatus.INFEASIBLE:
        if mm.status is OracleStatus.TOUCHING:
            raise InternalInconsistency("last problem: zero margin but a strict separator",
                                        margin=mm.value, separation=sep.value)
        w = sep.dual / -float(sep.dual @ aff.point)
        return LastProblemStatus(Status.STRONGLY_INFEASIBLE, w=w, info={"margin": mm.value})
    if mm.status is OracleStatus.INFEASIBLE:
        raise InternalInconsistency("last problem: negative margin without a separator",
                                    margin=mm.value, separation=sep.value)
    # zero margin and no separator: weakly feasible, since the last problem of a
    # maximal sequence is never weakly infeasible; the supporting witness is
    # only a cross-check here
    info = {"margin": mm.value}
    try:
        sup = dual_witness(K_last, aff, "support", tol)
        w = sup.dual if sup.status is OracleStatus.OPTIMAL else None
        if w is None:
            info["note"] = f"support search returned {sup.status.name}"
    except Undecided as exc:
        w = None
        info["note"] = f"support search undecided: {exc}"
    x = min_norm_point(K_last, aff, tol)
    if x is None or not contains(K_last, x, tol.eps_feas):
        x = mm.primal
    return LastProblemStatus(Status.WEAKLY_FEASIBLE, x=x, w=w, info=info)


def lorentz_recession(x, a, t_max: float = 1e9, t0: float = 1.0) -> float | None:
    """Smallest power-of-two multiple ``t`` of ``t0`` with ``x + t a`` strictly inside ``Q^n``.

    ``a`` is a nonzero point of the Lorentz cone.  When ``x . a' > 0`` such a
    ``t`` exists; when ``x . a' < 0`` and ``a`` is on the boundary it does not.
    Returns ``None`` if ``t_max`` is passed first.
    """
    x = np.asarray(x, dtype=float)
    a = np.asarray(a, dtype=float)
    Q = Lorentz(x.shape[0])
    return doubling_search(lambda t: Q.margin(x + t * a) > 0.0, t0, t_max)


def doubling_search(accept, t0: float = 1.0, t_max: float = 1e12) -> float | None:
    """First ``t = t0 * 2^k <= t_max`` with ``accept(t)``; ``None`` if there is none."""
    t = t0
    while t <= t_max:
        if accept(t):
            return t
        t *= 2.0
    return None
