"""Facial reduction on ``(K, L, c)``.

Each step looks for ``d`` in ``F* ∩ L^perp`` outside ``F^perp`` with ``d.c <= 0``
and replaces ``F`` by ``F ∩ {d}^perp``.  The run ends either with a witness
whose product with ``c`` is strictly negative (the problem is infeasible)
or with a face ``F`` that ``L + c`` meets in its relative interior.

Supporting witnesses (``d.c = 0``) are taken first and a strict separator is
only looked for once none is left.  On that last face the feasibility
question is well posed, while a separator searched for on a face where the
problem is weakly infeasible would only be an artefact of solver accuracy.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .cone_algebra import ExtendedCone, face_of
from .conic_solver import OracleStatus, Undecided, dual_witness, max_margin
from .config import DEFAULT, Tolerances
from .linear_geometry import AffineSet

log = logging.getLogger("cone_pathology.fra")


@dataclass(frozen=True)
class InfeasibleAt:
    step: int          # 1-based index of the separating witness
    value: float       # d.c / ||d|| at that step


@dataclass(frozen=True)
class MinimalFace:
    face: ExtendedCone
    point: np.ndarray  # point of L + c in the relative interior of the face


@dataclass
class FacialReductionTrace:
    faces: list[ExtendedCone]
    witnesses: list[np.ndarray]
    outcome: InfeasibleAt | MinimalFace | None = None
    notes: list[str] = field(default_factory=list)

    @property
    def infeasible(self) -> bool:
        return isinstance(self.outcome, InfeasibleAt)

    def to_dict(self) -> dict:
        out = {"witnesses": [w.tolist() for w in self.witnesses],
               "faces": [F.to_list() for F in self.faces]}
        if isinstance(self.outcome, InfeasibleAt):
            out["outcome"] = {"infeasible_at": self.outcome.step, "value": self.outcome.value}
        elif isinstance(self.outcome, MinimalFace):
            out["outcome"] = {"minimal_face": self.outcome.face.to_list(),
                              "point": self.outcome.point.tolist()}
        return out


@dataclass(frozen=True)
class StepResult:
    witness: np.ndarray | None
    separating: bool


def fra_step(F: ExtendedCone, aff: AffineSet, tol: Tolerances = DEFAULT) -> StepResult:
    """One reduction step: a supporting witness, else a separating one, else nothing.

    A supporting witness that does not shrink ``F`` (numerically in ``F^perp``)
    or an undecided support search defers to the separation search; without
    a clear separator the support failure stands.
    """
    failure = None
    try:
        sup = dual_witness(F, aff, "support", tol)
        if sup.status is OracleStatus.OPTIMAL:
            if not face_of(F, sup.dual).same_set(F):
                return StepResult(sup.dual, False)
            failure = Undecided("facial reduction made no progress")
    except Undecided as exc:
        failure = exc
    if failure is not None:
        log.debug("support step failed (%s), trying separation", failure)
    sep = dual_witness(F, aff, "separate", tol)
    if sep.status is OracleStatus.INFEASIBLE:
        return StepResult(sep.dual, True)
    if failure is not None:
        raise failure
    return StepResult(None, False)


def run_fra(K: ExtendedCone, aff: AffineSet, tol: Tolerances = DEFAULT) -> FacialReductionTrace:
    trace = FacialReductionTrace([K], [])
    F = K
    for step in range(1, 2 * len(K) + 2):
        res = fra_step(F, aff, tol)
        if res.witness is None:
            mm = max_margin(F, aff, tol=tol)
            if mm.status is not OracleStatus.STRICT:
                raise Undecided("facial reduction: no witness left but no relative-interior point",
                                margin=mm.value, step=step)
            trace.outcome = MinimalFace(F, mm.primal)
            return trace
        d = res.witness
        trace.witnesses.append(d)
        if res.separating:
            value = float(d @ aff.point) / float(np.linalg.norm(d))
            trace.outcome = InfeasibleAt(step, value)
            return trace
        G = face_of(F, d)
        log.debug("fra step %d: %r -> %r", step, F, G)
        trace.faces.append(G)
        F = G
    raise Undecided("facial reduction exceeded its step bound")
