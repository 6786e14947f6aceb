"""Four-status classification of ``x in K ∩ (L + c)`` with verifiable certificates.

``classify`` builds a maximal relaxation sequence, decides the last problem
and maps its status back: strong statuses carry over unchanged, a weakly
feasible last problem means weak status, and facial reduction on the
original problem tells weak feasibility from weak infeasibility.

``verify`` never calls a solver.  It checks memberships, orthogonality and
inner products of the evidence with ``10 * eps_feas`` slack; for weak
infeasibility it replays the relaxation sequence and the facial-reduction
chain and drives the weakly infeasible sequence down to distance ``1e-6``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .cone_algebra import (ExtendedCone, HalfSpace, NotInDualCone, Subspace, contains, face_of,
                           in_dual, in_relative_interior, reflect)
from .conic_solver import InternalInconsistency, OracleStatus, Undecided, max_margin
from .config import DEFAULT, Tolerances
from .facial_reduction import FacialReductionTrace, InfeasibleAt, run_fra
from .linear_geometry import AffineSet
from .relaxation import (RelaxationSequence, build_maximal_sequence, classify_direction,
                         doubling_search, last_problem_status)
from .status import Status

log = logging.getLogger("cone_pathology.classifier")

VERIFY_TARGETS = (1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6)
VECTOR_FIELDS = ("x", "w", "c_prime")
LIST_FIELDS = ("directions", "fra_witnesses")


@dataclass
class StatusCertificate:
    """Claimed status plus the evidence that proves it.

    ``evidence`` keys by status: ``x`` (strongly feasible); ``x``, ``w``
    (weakly feasible); ``w`` with ``w.c = -1`` (strongly infeasible);
    ``directions``, ``H1``, ``H2``, ``c_prime``, ``fra_witnesses``,
    ``infeasible_at`` (weakly infeasible).
    """

    status: Status
    evidence: dict = field(default_factory=dict)
    trace: dict = field(default_factory=dict)
    tolerances: Tolerances = DEFAULT
    diagnostics: list = field(default_factory=list)

    def to_dict(self) -> dict:
        ev = {}
        for key, val in self.evidence.items():
            if key in VECTOR_FIELDS:
                ev[key] = np.asarray(val, dtype=float).tolist()
            elif key in LIST_FIELDS:
                ev[key] = [np.asarray(v, dtype=float).tolist() for v in val]
            elif key in ("H1", "H2"):
                ev[key] = [list(map(int, s)) for s in val]
            else:
                ev[key] = val
        return {"status": self.status.value, "evidence": ev, "tolerances": self.tolerances.to_dict(),
                "trace": self.trace, "diagnostics": list(self.diagnostics)}

    @classmethod
    def from_dict(cls, data: dict) -> "StatusCertificate":
        ev = {}
        for key, val in data.get("evidence", {}).items():
            if key in VECTOR_FIELDS:
                ev[key] = np.asarray(val, dtype=float)
            elif key in LIST_FIELDS:
                ev[key] = [np.asarray(v, dtype=float) for v in val]
            elif key in ("H1", "H2"):
                ev[key] = [tuple(int(i) for i in s) for s in val]
            else:
                ev[key] = val
        return cls(Status.parse(data["status"]), ev, dict(data.get("trace", {})),
                   Tolerances.from_dict(data.get("tolerances", {})), list(data.get("diagnostics", [])))


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class VerificationReport:
    status: Status
    checks: list[Check] = field(default_factory=list)
    distances: list[dict] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return bool(self.checks) and all(c.passed for c in self.checks)

    @property
    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    def add(self, name: str, passed: bool, detail: str = "") -> bool:
        self.checks.append(Check(name, bool(passed), detail))
        return bool(passed)

    def to_dict(self) -> dict:
        return {"status": self.status.value, "passed": self.passed,
                "checks": [{"name": c.name, "passed": c.passed, "detail": c.detail} for c in self.checks],
                "distances": self.distances}

    def summary(self) -> str:
        if self.passed:
            return f"certificate for {self.status.value}: pass ({len(self.checks)} checks)"
        bad = "; ".join(f"{c.name} ({c.detail})" if c.detail else c.name for c in self.failures)
        return f"certificate for {self.status.value}: FAIL: {bad}"


# ---------------------------------------------------------------------------
# classification


def _lift_interior(seq: RelaxationSequence, x, tol: Tolerances):
    """Move a relative-interior point of ``K_gamma`` back into ``ri K_1`` along the directions."""
    for i in range(len(seq.directions) - 1, -1, -1):
        d = seq.directions[i].vector
        Ki = seq.cones[i]
        if in_relative_interior(Ki, x, 100 * tol.eps_feas):
            continue
        t = doubling_search(lambda t: in_relative_interior(Ki, x + t * d, 100 * tol.eps_feas), 1e-3, 1e12)
        if t is None:
            return None
        x = x + t * d
    return x


def _unit(v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    return v / float(np.linalg.norm(v))


def classify(K: ExtendedCone, aff: AffineSet, tol: Tolerances = DEFAULT, self_verify: bool = True,
             targets=VERIFY_TARGETS) -> StatusCertificate:
    """Status of ``(K, L, c)`` with a certificate; ``Undecided`` rather than a guess."""
    trace: dict = {}
    try:
        cert = _classify(K, aff, tol, trace)
    except Undecided as exc:
        log.info("undecided: %s", exc)
        diag = [str(exc)] + [f"{k}={v}" for k, v in exc.diagnostic.items()]
        return StatusCertificate(Status.UNDECIDED, {}, trace, tol, diag)
    if self_verify:
        report = verify(K, aff, cert, tol, targets)
        if not report.passed:
            log.warning("self-verification failed: %s", report.summary())
            return StatusCertificate(Status.UNDECIDED, {}, trace, tol,
                                     [f"claimed {cert.status.value} but {report.summary()}"])
        cert.trace["distances"] = report.distances
    return cert


def _classify(K: ExtendedCone, aff: AffineSet, tol: Tolerances, trace: dict) -> StatusCertificate:
    seq = build_maximal_sequence(K, aff.L, tol)
    trace["relaxation"] = seq.to_list()
    trace["gamma"] = seq.gamma
    if not seq.maximal:
        raise Undecided("relaxation sequence not certified maximal", warnings=list(seq.warnings))
    last = last_problem_status(seq.last, aff, tol)
    trace["last_problem"] = {"status": last.status.value, **{k: (v if isinstance(v, str) else float(v)) for k, v in last.info.items()}}

    if last.status is Status.STRONGLY_FEASIBLE:
        x = _lift_interior(seq, last.x, tol)
        if x is None:
            mm = max_margin(K, aff, tol=tol)
            if mm.status is not OracleStatus.STRICT:
                raise InternalInconsistency("interior point of the last problem does not lift",
                                            margin=mm.value)
            x = mm.primal
        return StatusCertificate(Status.STRONGLY_FEASIBLE, {"x": x}, trace, tol)

    if last.status is Status.STRONGLY_INFEASIBLE:
        w = last.w / -float(last.w @ aff.point)
        return StatusCertificate(Status.STRONGLY_INFEASIBLE, {"w": w}, trace, tol)

    fra = run_fra(K, aff, tol)
    trace["fra"] = fra.to_dict()
    if isinstance(fra.outcome, InfeasibleAt):
        if fra.outcome.step == 1:
            raise InternalInconsistency("facial reduction separates at once but the last problem is feasible")
        evidence = {
            "directions": [d.vector for d in seq.directions],
            "H1": [d.interior_blocks for d in seq.directions],
            "H2": [d.boundary_blocks for d in seq.directions],
            "c_prime": last.x,
            "fra_witnesses": list(fra.witnesses),
            "infeasible_at": fra.outcome.step,
        }
        return StatusCertificate(Status.WEAKLY_INFEASIBLE, evidence, trace, tol)
    if not fra.witnesses:
        raise InternalInconsistency("weak status but facial reduction found no witness")
    return StatusCertificate(Status.WEAKLY_FEASIBLE,
                             {"x": fra.outcome.point, "w": _unit(fra.witnesses[0])}, trace, tol)


# ---------------------------------------------------------------------------
# verification (no solver calls)


def _vec(evidence: dict, key: str, n: int):
    v = evidence.get(key)
    if v is None:
        return None
    v = np.asarray(v, dtype=float).reshape(-1)
    return v if v.shape[0] == n and np.all(np.isfinite(v)) else None


def _orth_to_L(aff: AffineSet, w, slack: float) -> tuple[bool, float]:
    r = float(np.linalg.norm(aff.L.project(w)))
    return r <= slack * float(np.linalg.norm(w)), r


def _outside_perp(F: ExtendedCone, w, tol: Tolerances) -> tuple[bool, float]:
    """Share of ``w`` outside ``F^perp``; a dual witness must not vanish on all of ``F``."""
    C = F.span_complement()
    rest = w - C @ (C.T @ w) if C.shape[1] else w
    r = float(np.linalg.norm(rest))
    return r >= tol.delta_dir * float(np.linalg.norm(w)), r


def _check_sf(K, aff, ev, tol, rep: VerificationReport) -> bool:
    slack = 10 * tol.eps_feas
    x = _vec(ev, "x", K.total_dim)
    if not rep.add("x present", x is not None):
        return False
    ok1 = rep.add("x in L + c", aff.contains(x, slack), f"residual {aff.residual(x):.2e}")
    ok2 = rep.add("x in ri K", in_relative_interior(K, x, slack))
    return ok1 and ok2


def _check_wf(K, aff, ev, tol, rep: VerificationReport) -> bool:
    slack = 10 * tol.eps_feas
    n = K.total_dim
    x, w = _vec(ev, "x", n), _vec(ev, "w", n)
    if not rep.add("x and w present", x is not None and w is not None and np.linalg.norm(w) > 0):
        return False
    c = aff.point
    wn = float(np.linalg.norm(w))
    ok = [rep.add("x in L + c", aff.contains(x, slack), f"residual {aff.residual(x):.2e}"),
          rep.add("x in K", contains(K, x, slack)),
          rep.add("w in K*", in_dual(K, w, slack))]
    good, r = _orth_to_L(aff, w, slack)
    ok.append(rep.add("w orthogonal to L", good, f"|P_L w| = {r:.2e}"))
    wc = float(w @ c)
    ok.append(rep.add("w.c = 0", abs(wc) <= slack * wn * (1 + float(np.linalg.norm(c))), f"w.c = {wc:.2e}"))
    good, r = _outside_perp(K, w, tol)
    ok.append(rep.add("w not in K^perp", good, f"|w outside K^perp| = {r:.2e}"))
    return all(ok)


def _check_si(K, aff, ev, tol, rep: VerificationReport, w=None) -> bool:
    slack = 10 * tol.eps_feas
    if w is None:
        w = _vec(ev, "w", K.total_dim)
    if not rep.add("w present", w is not None and np.linalg.norm(w) > 0):
        return False
    c = aff.point
    wn = float(np.linalg.norm(w))
    wc = float(w @ c)
    ok = [rep.add("w in K*", in_dual(K, w, slack))]
    good, r = _orth_to_L(aff, w, slack)
    ok.append(rep.add("w orthogonal to L", good, f"|P_L w| = {r:.2e}"))
    ok.append(rep.add("w.c = -1", abs(wc + 1.0) <= slack * (1 + wn * float(np.linalg.norm(c))), f"w.c = {wc:.6g}"))
    ok.append(rep.add("w.c clearly negative", wc <= -tol.eps_cert * wn * (1 + float(np.linalg.norm(c)))))
    return all(ok)


def _replay_relaxation(K, aff, ev, tol, rep: VerificationReport):
    """Rebuild ``K_1 ⊊ ... ⊊ K_gamma`` from the stored directions; ``None`` on failure."""
    slack = 10 * tol.eps_feas
    n = K.total_dim
    dirs = ev.get("directions")
    H1, H2 = ev.get("H1"), ev.get("H2")
    if not rep.add("relaxation data present", dirs is not None and H1 is not None and H2 is not None
                   and len(dirs) == len(H1) == len(H2)):
        return None
    m = K.lorentz_count()
    if not rep.add("at most m directions", len(dirs) <= m, f"{len(dirs)} directions, m = {m}"):
        return None
    cones = [K]
    for i, (d, h1, h2) in enumerate(zip(dirs, H1, H2), start=1):
        d = np.asarray(d, dtype=float).reshape(-1)
        Ki = cones[-1]
        if not rep.add(f"direction {i} shape", d.shape[0] == n and np.linalg.norm(d) > 0):
            return None
        good, r = True, aff.L.residual(d)
        if not rep.add(f"direction {i} in L", r <= slack * float(np.linalg.norm(d)), f"residual {r:.2e}"):
            return None
        if not rep.add(f"direction {i} in K_{i}", contains(Ki, d, slack)):
            return None
        try:
            got = classify_direction(Ki, d, tol)
        except ValueError as exc:
            rep.add(f"direction {i} index sets", False, str(exc))
            return None
        want = (tuple(sorted(h1)), tuple(sorted(h2)))
        if not rep.add(f"direction {i} index sets", got == want and (got[0] or got[1]),
                       f"stored {want}, found {got}"):
            return None
        blocks = list(Ki.blocks)
        for j in got[0]:
            blocks[j] = Subspace.full(Ki[j].dim)
        for j in got[1]:
            blocks[j] = HalfSpace(reflect(d[Ki.slice(j)]))
        cones.append(ExtendedCone(tuple(blocks)))
    return cones


def _replay_fra(K, aff, ev, tol, rep: VerificationReport) -> bool:
    slack = 10 * tol.eps_feas
    n = K.total_dim
    wits = ev.get("fra_witnesses") or []
    step = ev.get("infeasible_at")
    if not rep.add("facial reduction chain present", wits and step == len(wits)):
        return False
    c = aff.point
    cn = float(np.linalg.norm(c))
    F = K
    for j, d in enumerate(wits, start=1):
        d = np.asarray(d, dtype=float).reshape(-1)
        if not rep.add(f"witness {j} shape", d.shape[0] == n and np.linalg.norm(d) > 0):
            return False
        dn = float(np.linalg.norm(d))
        if not rep.add(f"witness {j} in F_{j - 1}*", in_dual(F, d, slack)):
            return False
        good, r = _orth_to_L(aff, d, slack)
        if not rep.add(f"witness {j} orthogonal to L", good, f"|P_L d| = {r:.2e}"):
            return False
        dc = float(d @ c)
        if j < len(wits):
            good, r = _outside_perp(F, d, tol)
            if not rep.add(f"witness {j} not in F_{j - 1}^perp", good, f"{r:.2e}"):
                return False
            if not rep.add(f"witness {j} supports L + c", abs(dc) <= slack * dn * (1 + cn), f"d.c = {dc:.2e}"):
                return False
            try:
                F = face_of(F, d, slack * (1 + dn) / dn)
            except NotInDualCone:
                return rep.add(f"witness {j} exposes a face of F_{j - 1}", False)
        else:
            return rep.add(f"witness {j} separates", dc <= -tol.eps_cert * dn * (1 + cn), f"d.c = {dc:.3e}")
    return False


def _check_wi(K, aff, ev, tol, rep: VerificationReport, targets=VERIFY_TARGETS) -> bool:
    from .wi_sequence import (RefinementFailed, ScheduleStall, WitnessSubspace, generate_sequence,
                              point_in_affine)
    slack = 10 * tol.eps_feas
    cones = _replay_relaxation(K, aff, ev, tol, rep)
    if cones is None:
        return False
    cp = _vec(ev, "c_prime", K.total_dim)
    if not rep.add("c' present", cp is not None):
        return False
    ok = [rep.add("c' in L + c", aff.contains(cp, slack), f"residual {aff.residual(cp):.2e}"),
          rep.add("c' in K_gamma", contains(cones[-1], cp, slack))]
    if not all(ok):
        return False
    if not _replay_fra(K, aff, ev, tol, rep):
        return False
    if not targets:
        return True
    wit = WitnessSubspace(tuple(np.asarray(d, dtype=float) for d in ev["directions"]), cp,
                          tuple(tuple(h) for h in ev["H1"]), tuple(tuple(h) for h in ev["H2"]))
    try:
        pts = generate_sequence(K, aff, wit, targets)
    except (ScheduleStall, RefinementFailed) as exc:
        detail = str(exc)
        if isinstance(exc, ScheduleStall):
            detail += f" (best distance {exc.best_distance:.3e})"
        return rep.add("distance sequence", False, detail)
    rep.distances = [p.to_dict() for p in pts]
    finite = [p for p in pts if math.isfinite(p.target)]
    ok = [rep.add("distances reach targets", all(p.distance <= p.target for p in finite),
                  ", ".join(f"{p.distance:.2e}" for p in finite)),
          rep.add("distances strictly decrease", all(b.distance < a.distance for a, b in zip(finite, finite[1:]))),
          rep.add("sequence stays in L + c", all(point_in_affine(aff, p.u, slack) for p in pts)),
          rep.add("sequence stays outside K", all(p.distance > 0 for p in pts))]
    return all(ok)


_CHECKERS = {
    Status.STRONGLY_FEASIBLE: _check_sf,
    Status.WEAKLY_FEASIBLE: _check_wf,
    Status.STRONGLY_INFEASIBLE: _check_si,
}


def supported_statuses(K: ExtendedCone, aff: AffineSet, evidence: dict, tol: Tolerances = DEFAULT) -> list[Status]:
    """Statuses (other than weak infeasibility) that the evidence vectors would prove on their own."""
    out = []
    for status, fn in _CHECKERS.items():
        if fn(K, aff, evidence, tol, VerificationReport(status)):
            out.append(status)
    c = aff.point
    for d in evidence.get("fra_witnesses") or []:
        d = np.asarray(d, dtype=float).reshape(-1)
        dc = float(d @ c) if d.shape[0] == K.total_dim else 0.0
        if dc < 0 and _check_si(K, aff, {}, tol, VerificationReport(Status.STRONGLY_INFEASIBLE), d / -dc):
            out.append(Status.STRONGLY_INFEASIBLE)
            break
    return out


def verify(K: ExtendedCone, aff: AffineSet, cert: StatusCertificate, tol: Tolerances | None = None,
           targets=VERIFY_TARGETS) -> VerificationReport:
    """Check the evidence of ``cert`` on ``(K, L, c)`` without solving anything."""
    tol = tol or cert.tolerances
    rep = VerificationReport(cert.status)
    if cert.status is Status.UNDECIDED:
        rep.add("decided status", False, "an undecided certificate makes no claim")
        return rep
    if aff.dim != K.total_dim:
        rep.add("dimensions agree", False, f"cone {K.total_dim}, affine set {aff.dim}")
        return rep
    if cert.status is Status.WEAKLY_INFEASIBLE:
        ok = _check_wi(K, aff, cert.evidence, tol, rep, targets)
    else:
        ok = _CHECKERS[cert.status](K, aff, cert.evidence, tol, rep)
    if ok:
        others = [s for s in supported_statuses(K, aff, cert.evidence, tol) if s is not cert.status]
        rep.add("evidence is exclusive", not others,
                "also proves " + ", ".join(s.value for s in others) if others else "")
    return rep
