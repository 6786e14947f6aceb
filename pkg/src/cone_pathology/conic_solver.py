"""Conic subproblems behind the classifier, solved with Clarabel.

Every oracle here is a small, well-posed conic program: margins are capped,
searches are normalised by caps or a ball, and tiny norm penalties keep the
interior-point method from drifting to huge points along flat optimal
faces.  Degenerate answers (zero blocks, boundary blocks) are read off the
solution with a coarse threshold and then snapped exactly by
:func:`polish.polish`, so downstream code works with points that satisfy
their face equations to machine precision.

Ambiguous numerics are reported as :class:`Undecided` rather than guessed.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field

import clarabel
import numpy as np
import scipy.sparse as sp

from .cone_algebra import (ExtendedCone, HalfSpace, Lorentz, Ray, Subspace, complement_columns,
                           contains, distance, in_dual, in_relative_interior)
from .config import DEFAULT, Tolerances
from .linear_geometry import AffineSet, LinearSubspace
from .polish import PolishFailed, polish

log = logging.getLogger("cone_pathology.solver")

# loose tolerances of the divergence probe in max_linear
PROBE_TOLS = (1e-2, 1e-4, 1e-6)
# ball radii for the support search, tried in turn; the witness is rescaled to unit norm afterwards
SUPPORT_RADII = (1e4, 1e6)


class Undecided(RuntimeError):
    """Numerics too close to a decision boundary to commit to an answer."""

    def __init__(self, message: str, **diagnostic):
        super().__init__(message)
        self.diagnostic = diagnostic


class MaxIterations(Undecided):
    """The interior-point solver stopped without reaching its tolerances."""


class InternalInconsistency(Undecided):
    """Two oracles gave answers that cannot both be true."""


class OracleStatus(enum.Enum):
    STRICT = "strict"            # positive margin: relative-interior point found
    TOUCHING = "touching"        # margin zero: feasible, no interior point
    INFEASIBLE = "infeasible"
    OPTIMAL = "optimal"
    UNBOUNDED = "unbounded"
    DIVERGING = "diverging"      # value converges, iterates run off to infinity
    UNDECIDED = "undecided"


@dataclass
class OracleResult:
    status: OracleStatus
    value: float
    primal: np.ndarray | None = None
    dual: np.ndarray | None = None
    info: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# program assembly


@dataclass
class _Piece:
    block: int          # index of the owning cone block, -1 for auxiliary rows
    T: np.ndarray       # block-local rows
    rows: slice


@dataclass
class _Solution:
    status: str
    x: np.ndarray
    z: np.ndarray
    iterations: int

    @property
    def solved(self) -> bool:
        return self.status in ("Solved", "AlmostSolved")

    @property
    def infeasible(self) -> bool:
        return self.status in ("PrimalInfeasible", "AlmostPrimalInfeasible")

    @property
    def unbounded(self) -> bool:
        return self.status in ("DualInfeasible", "AlmostDualInfeasible")


class _Program:
    """``min q.v`` subject to ``b - A v`` in a product of Clarabel cones."""

    def __init__(self, nvar: int):
        self.nvar = nvar
        self.q = np.zeros(nvar)
        self.A: list[np.ndarray] = []
        self.b: list[np.ndarray] = []
        self.cones: list = []
        self.pieces: list[_Piece] = []
        self.nrows = 0

    def _add(self, A, b, cone, block=-1, T=None):
        A = np.atleast_2d(A)
        start = self.nrows
        self.A.append(A)
        self.b.append(np.asarray(b, dtype=float).reshape(-1))
        self.cones.append(cone)
        self.nrows += A.shape[0]
        if T is not None:
            self.pieces.append(_Piece(block, T, slice(start, self.nrows)))

    def add_zero(self, A, b, block=-1, T=None):
        if np.atleast_2d(A).shape[0]:
            self._add(A, b, clarabel.ZeroConeT(np.atleast_2d(A).shape[0]), block, T)

    def add_nonneg(self, A, b, block=-1, T=None):
        if np.atleast_2d(A).shape[0]:
            self._add(A, b, clarabel.NonnegativeConeT(np.atleast_2d(A).shape[0]), block, T)

    def add_soc(self, A, b, block=-1, T=None):
        self._add(A, b, clarabel.SecondOrderConeT(np.atleast_2d(A).shape[0]), block, T)

    def add_block(self, index: int, blk, M, m0, e=None, tcol: int | None = None):
        """Require ``M v + m0 - t e`` to lie in ``blk`` (``t`` is column ``tcol``)."""
        M = np.asarray(M, dtype=float)
        m0 = np.asarray(m0, dtype=float)

        def emit(T, kind):
            A = -(T @ M)
            if tcol is not None and e is not None:
                A[:, tcol] += T @ e
            getattr(self, kind)(A, T @ m0, index, T)

        if isinstance(blk, Lorentz):
            emit(np.eye(blk.dim), "add_soc" if blk.dim >= 2 else "add_nonneg")
        elif isinstance(blk, HalfSpace):
            emit(blk.normal[None, :], "add_nonneg")
        elif isinstance(blk, Ray):
            emit(complement_columns(blk.generator[:, None], blk.dim).T, "add_zero")
            emit(blk.generator[None, :], "add_nonneg")
        elif isinstance(blk, Subspace):
            if blk.complement.shape[1]:
                emit(blk.complement.T, "add_zero")
        else:
            raise TypeError(f"unsupported block {blk!r}")

    def add_cone(self, K: ExtendedCone, M, m0, e_blocks=None, tcol=None):
        for i, blk in enumerate(K.blocks):
            sl = K.slice(i)
            e = None if e_blocks is None else e_blocks[i]
            self.add_block(i, blk, M[sl], m0[sl], e, tcol)

    def add_norm_bound(self, G, radius: float | None = None, rcol: int | None = None):
        """``||G v|| <= radius`` or ``||G v|| <= v[rcol]``."""
        G = np.atleast_2d(G)
        head = np.zeros((1, self.nvar))
        if rcol is not None:
            head[0, rcol] = -1.0
            rhs = 0.0
        else:
            rhs = float(radius)
        self.add_soc(np.vstack([head, -G]), np.concatenate([[rhs], np.zeros(G.shape[0])]))

    def solve(self, tol: float, max_iter: int, fallback: bool = True) -> _Solution:
        """Solve at ``tol``; on stalls retry at looser tolerances (degenerate programs)."""
        A = sp.csc_matrix(np.vstack(self.A)) if self.A else sp.csc_matrix((0, self.nvar))
        b = np.concatenate(self.b) if self.b else np.zeros(0)
        P = sp.csc_matrix((self.nvar, self.nvar))
        tols = [tol] + ([t for t in (1e-8, 1e-7) if t > tol] if fallback else [])
        for t in tols:
            settings = clarabel.DefaultSettings()
            settings.verbose = False
            settings.max_iter = int(max_iter)
            settings.tol_gap_abs = t
            settings.tol_gap_rel = t
            settings.tol_feas = t
            settings.tol_ktratio = max(t, 1e-10)
            res = clarabel.DefaultSolver(P, self.q, A, b, self.cones, settings).solve()
            sol = _Solution(str(res.status), np.array(res.x), np.array(res.z), int(res.iterations))
            log.debug("clarabel at tol %.0e: %s after %d iterations", t, sol.status, sol.iterations)
            if sol.solved or sol.infeasible or sol.unbounded:
                break
        return sol

    def block_duals(self, K: ExtendedCone, z: np.ndarray) -> np.ndarray:
        """Assemble ``w`` in ``K*`` from the multipliers of the block rows."""
        w = np.zeros(K.total_dim)
        for pc in self.pieces:
            if pc.block >= 0:
                w[K.slice(pc.block)] += pc.T.T @ z[pc.rows]
        return w


def _raise_failure(sol: _Solution, what: str):
    if sol.status == "MaxIterations":
        raise MaxIterations(f"{what}: solver hit its iteration limit", status=sol.status)
    raise Undecided(f"{what}: solver returned {sol.status}", status=sol.status)


def _normalised_point(aff: AffineSet, tol: Tolerances) -> tuple[np.ndarray, float]:
    """Unit representative of ``c`` orthogonal to ``L`` and its original length."""
    cp = aff.normal_point()
    s = float(np.linalg.norm(cp))
    if s <= tol.eps_lin * (1.0 + float(np.linalg.norm(aff.point))):
        return np.zeros_like(cp), 0.0
    return cp / s, s


def _least_norm_normalised(K: ExtendedCone, M: np.ndarray, functional: np.ndarray, tol: Tolerances,
                           zero_rows: np.ndarray | None = None) -> np.ndarray | None:
    """Least-norm ``u`` with ``M u`` in ``K``, ``functional . u = 1`` and ``zero_rows @ u = 0``.

    A search that maximises a capped functional leaves the solution free
    along flat directions of the optimal face; this second solve pins down a
    canonical representative.  Returns ``None`` if the solver does not finish.
    """
    k = M.shape[1]
    nv = k + 1
    Mx = np.zeros((M.shape[0], nv))
    Mx[:, :k] = M
    prog = _Program(nv)
    prog.q[k] = 1.0
    prog.add_cone(K, Mx, np.zeros(M.shape[0]))
    row = np.zeros((1, nv))
    row[0, :k] = functional
    prog.add_zero(row, [1.0])
    if zero_rows is not None and len(zero_rows):
        Z = np.zeros((zero_rows.shape[0], nv))
        Z[:, :k] = zero_rows
        prog.add_zero(Z, np.zeros(zero_rows.shape[0]))
    G = np.zeros((k, nv))
    G[:, :k] = np.eye(k)
    prog.add_norm_bound(G, rcol=k)
    sol = prog.solve(tol.solver_tol, tol.max_iter)
    if not sol.solved:
        log.debug("least-norm representative: solver returned %s", sol.status)
        return None
    return sol.x[:k]


# ---------------------------------------------------------------------------
# oracles


def max_margin(K: ExtendedCone, aff: AffineSet, blocks=None, tol: Tolerances = DEFAULT) -> OracleResult:
    """Largest ``t <= 1`` such that some ``x`` in ``L + c`` has every selected block margin ``>= t``.

    The margin of a block is measured along its interior direction (``e0`` for
    Lorentz cones, the normal or generator otherwise); unselected blocks only
    need closed membership.  ``c`` is replaced by its unit representative
    orthogonal to ``L``, so the returned point is rescaled back.

    Status: STRICT (point in the relative interior of the selected blocks),
    TOUCHING (margin zero within solver accuracy), INFEASIBLE (margin negative),
    UNDECIDED otherwise.
    """
    B = aff.basis
    k = B.shape[1]
    chat, scale = _normalised_point(aff, tol)
    sel = set(range(len(K))) if blocks is None else set(blocks)
    nv = k + 2
    tcol, rcol = k, k + 1
    prog = _Program(nv)
    prog.q[tcol] = -1.0
    # a margin that only grows slower than delta_dir per unit of norm is not
    # trusted: relaxed normals carry errors of that kind
    prog.q[rcol] = tol.delta_dir
    M = np.zeros((K.total_dim, nv))
    M[:, :k] = B
    e_blocks = [blk.interior_direction() if i in sel else None for i, blk in enumerate(K.blocks)]
    prog.add_cone(K, M, chat, e_blocks, tcol)
    cap = np.zeros((1, nv))
    cap[0, tcol] = 1.0
    prog.add_nonneg(cap, [1.0])
    G = np.zeros((k, nv))
    G[:, :k] = np.eye(k)
    prog.add_norm_bound(G, rcol=rcol)
    R = np.zeros((1, nv))
    R[0, rcol] = 1.0
    prog.add_nonneg(R, [tol.radius])
    sol = prog.solve(tol.solver_tol, tol.max_iter)
    if sol.infeasible:
        w = prog.block_duals(K, sol.z)
        return OracleResult(OracleStatus.INFEASIBLE, -np.inf, None, w, {"solver": sol.status})
    t = float(sol.x[tcol]) if np.all(np.isfinite(sol.x)) else -np.inf
    xhat = B @ sol.x[:k] + chat
    x = xhat * scale if scale > 0 else xhat
    Ksel = ExtendedCone(tuple(K.blocks[i] for i in sorted(sel)))
    xsel = np.concatenate([xhat[K.slice(i)] for i in sorted(sel)]) if sel else np.zeros(0)
    interior = t > tol.delta_dir and (not sel or in_relative_interior(Ksel, xsel, tol.eps_feas))
    if not sol.solved:
        # a stalled iterate still settles the strict case when it checks out on its own
        if interior and contains(K, xhat, tol.eps_feas):
            return OracleResult(OracleStatus.STRICT, t, x, None, {"solver": sol.status, "scale": scale})
        _raise_failure(sol, "margin problem")
    w = prog.block_duals(K, sol.z)
    info = {"solver": sol.status, "iterations": sol.iterations, "scale": scale}
    zero_band = tol.eps_cert
    if t > tol.delta_dir:
        if interior:
            return OracleResult(OracleStatus.STRICT, t, x, w, info)
        return OracleResult(OracleStatus.UNDECIDED, t, x, w, info)
    if abs(t) <= zero_band:
        return OracleResult(OracleStatus.TOUCHING, t, x, w, info)
    if t < -zero_band:
        return OracleResult(OracleStatus.INFEASIBLE, t, x, w, info)
    return OracleResult(OracleStatus.UNDECIDED, t, x, w, info)


@dataclass(frozen=True)
class ConeLinePoint:
    """A unit vector in ``K ∩ L`` with a nonzero second-order block, and its face pattern."""

    vector: np.ndarray
    pattern: tuple[str, ...]


def find_cone_line_point(K: ExtendedCone, L: LinearSubspace, tol: Tolerances = DEFAULT) -> ConeLinePoint | None:
    """Nonzero ``a`` in ``K ∩ L`` whose second-order part is nonzero, or ``None``.

    Maximises the sum of the leading coordinates of the second-order blocks
    (each capped at 1).  The optimum is 0 when no such ``a`` exists and at
    least 1 otherwise, so the threshold between the two is wide.
    """
    lor = K.lorentz_indices()
    B = L.basis
    k = B.shape[1]
    if k == 0 or not lor:
        return None
    nv = k + 1
    rcol = k
    prog = _Program(nv)
    M = np.zeros((K.total_dim, nv))
    M[:, :k] = B
    heads = np.zeros((len(lor), nv))
    for j, i in enumerate(lor):
        heads[j] = M[K.offsets[i]]
    prog.q = -heads.sum(axis=0)
    prog.q[rcol] += 1e-6
    prog.add_cone(K, M, np.zeros(K.total_dim))
    prog.add_nonneg(heads, np.ones(len(lor)))
    G = np.zeros((k, nv))
    G[:, :k] = np.eye(k)
    prog.add_norm_bound(G, rcol=rcol)
    R = np.zeros((1, nv))
    R[0, rcol] = 1.0
    prog.add_nonneg(R, [1e8])
    sol = prog.solve(tol.solver_tol, tol.max_iter)
    value = float(heads.sum(axis=0) @ sol.x) if sol.x.size else 0.0
    if not sol.solved:
        # with K ∩ L = {0} the program has no interior; decide from the dual side
        if _no_direction_certificate(K, L, tol):
            return None
        # a stalled iterate clearly above the threshold is kept; polish decides
        a0 = B @ sol.x[:k] if sol.x.size else None
        if (a0 is None or value < 0.5 or not np.all(np.isfinite(a0))
                or distance(K, a0) > 1e-3 * max(1.0, float(np.linalg.norm(a0)))):
            _raise_failure(sol, "direction search")
    log.debug("direction search value %.3e", value)
    if value <= 1e-4:
        return None
    if value < 0.5:
        raise Undecided("direction search value between thresholds", value=value)
    u = _least_norm_normalised(K, B, heads.sum(axis=0)[:k], tol)
    if u is None:
        u = sol.x[:k]
    try:
        pr = polish(K, B, None, u, tol=tol)
    except PolishFailed as exc:
        raise Undecided(f"direction search: {exc}", value=value) from exc
    a = pr.x
    nrm = float(np.linalg.norm(a))
    if nrm <= tol.eps_rank:
        raise Undecided("polished direction collapsed to zero", value=value)
    a = a / nrm
    if not any(np.linalg.norm(a[K.slice(i)]) > tol.delta_dir for i in lor):
        raise Undecided("polished direction lost its second-order part", value=value)
    return ConeLinePoint(a, pr.pattern)


def _no_direction_certificate(K: ExtendedCone, L: LinearSubspace, tol: Tolerances) -> bool:
    """``w`` in ``K* ∩ L^perp`` strictly inside every second-order block.

    Such a ``w`` has ``w.a > 0`` for any ``a`` in ``K`` with a nonzero
    second-order block, while ``w.a = 0`` on ``L``; so ``K ∩ L`` has no
    reducing direction.
    """
    C = L.complement().basis
    q = C.shape[1]
    lor = set(K.lorentz_indices())
    if q == 0:
        return False
    Kd = K.dual()
    nv = q + 1
    tcol = q
    M = np.zeros((K.total_dim, nv))
    M[:, :q] = C
    prog = _Program(nv)
    prog.q[tcol] = -1.0
    e_blocks = [blk.interior_direction() if i in lor else None for i, blk in enumerate(Kd.blocks)]
    prog.add_cone(Kd, M, np.zeros(K.total_dim), e_blocks, tcol)
    cap = np.zeros((1, nv))
    cap[0, tcol] = 1.0
    prog.add_nonneg(cap, [1.0])
    G = np.zeros((q, nv))
    G[:, :q] = np.eye(q)
    prog.add_norm_bound(G, radius=1.0)
    sol = prog.solve(tol.solver_tol, tol.max_iter)
    if not sol.solved or sol.x[tcol] <= tol.delta_dir:
        return False
    w = C @ sol.x[:q]
    return all(Kd[i].margin(w[Kd.slice(i)]) > tol.delta_dir / 2 for i in lor) and in_dual(K, w, tol.eps_feas)


def _dual_phi(Kd: ExtendedCone) -> list[np.ndarray]:
    return [blk.interior_direction() for blk in Kd.blocks]


def dual_witness(K: ExtendedCone, aff: AffineSet, mode: str, tol: Tolerances = DEFAULT) -> OracleResult:
    """Search ``w = C u`` in ``K* ∩ L^perp`` (``C`` a basis of ``L^perp``).

    ``mode="separate"``: minimise ``w.c`` over ``||w|| <= 1``.  Status
    INFEASIBLE with ``w`` when the minimum is clearly negative, OPTIMAL
    (no separator) otherwise.

    ``mode="support"``: find ``w`` with ``w.c = 0`` that is not in ``K^perp``,
    by maximising the capped sum of its interior-direction components.
    Status OPTIMAL with ``w`` when found, ``INFEASIBLE`` (nothing of the
    kind exists) when the value is zero; ``w`` is polished onto its face.
    """
    C = aff.L.complement().basis
    q = C.shape[1]
    chat, _ = _normalised_point(aff, tol)
    Kd = K.dual()
    if q == 0:
        status = OracleStatus.OPTIMAL if mode == "separate" else OracleStatus.INFEASIBLE
        return OracleResult(status, 0.0, None, None, {"empty": True})
    if mode == "separate":
        prog = _Program(q)
        prog.q = C.T @ chat
        prog.add_cone(Kd, C, np.zeros(K.total_dim))
        prog.add_norm_bound(np.eye(q), radius=1.0)
        sol = prog.solve(tol.solver_tol, tol.max_iter)
        if not sol.solved:
            _raise_failure(sol, "separation search")
        value = float(prog.q @ sol.x)
        w = C @ sol.x
        thr = tol.eps_cert * (1.0 + float(np.linalg.norm(chat)))
        if value < -thr:
            # On degenerate instances the solver can report a spurious negative
            # value with a witness slightly outside K*.  Snapping the witness onto
            # its face decides: a genuine separator keeps its sign.
            try:
                pr = polish(Kd, C, None, sol.x, tol=tol)
            except PolishFailed as exc:
                raise Undecided(f"separation search: {exc}", value=value) from exc
            if np.linalg.norm(pr.x) <= tol.eps_rank:
                raise Undecided("separation witness collapsed to zero", value=value)
            w = pr.x / np.linalg.norm(pr.x)
            value = float(chat @ w)
            if value < -thr:
                return OracleResult(OracleStatus.INFEASIBLE, value, None, w,
                                    {"solver": sol.status, "pattern": pr.pattern})
        return OracleResult(OracleStatus.OPTIMAL, value, None, w, {"solver": sol.status})
    if mode != "support":
        raise ValueError(f"unknown mode {mode!r}")
    phis = _dual_phi(Kd)
    caps = []
    for i, phi in enumerate(phis):
        if np.any(phi):
            caps.append(phi @ C[Kd.slice(i)])
    if not caps:
        return OracleResult(OracleStatus.INFEASIBLE, 0.0, None, None, {"no_support": True})
    caps = np.array(caps)[:, :q]
    nv = q
    M = C
    # the capped functional is bounded on the cap set, but the cap set itself can be
    # unbounded; a fixed ball keeps the program well scaled
    for radius in SUPPORT_RADII:
        prog = _Program(nv)
        prog.q = -caps.sum(axis=0)
        prog.add_cone(Kd, M, np.zeros(K.total_dim))
        prog.add_nonneg(caps, np.ones(len(caps)))
        if np.any(chat):
            prog.add_zero((chat @ C)[None, :], [0.0])
        prog.add_norm_bound(np.eye(q), radius=radius)
        sol = prog.solve(tol.solver_tol, tol.max_iter)
        if not sol.solved:
            _raise_failure(sol, "support search")
        value = float(caps.sum(axis=0) @ sol.x)
        if value <= 1e-4 and radius == SUPPORT_RADII[0]:
            return OracleResult(OracleStatus.INFEASIBLE, value, None, None, {"solver": sol.status})
        if value >= 0.5:
            break
        # a witness exists but only far out: retry in a larger ball
    else:
        raise Undecided("support search value between thresholds", value=value)
    extra = chat[None, :] if np.any(chat) else None
    u = _least_norm_normalised(Kd, C, caps.sum(axis=0), tol,
                               None if extra is None else extra @ C)
    if u is None:
        u = sol.x
    try:
        pr = polish(Kd, C, None, u, extra_rows=extra, tol=tol)
    except PolishFailed as exc:
        raise Undecided(f"support search: {exc}", value=value) from exc
    if np.linalg.norm(pr.x) <= tol.eps_rank:
        raise Undecided("support witness collapsed to zero", value=value)
    w = pr.x / np.linalg.norm(pr.x)
    return OracleResult(OracleStatus.OPTIMAL, value, None, w, {"solver": sol.status, "pattern": pr.pattern})


def min_norm_point(K: ExtendedCone, aff: AffineSet, tol: Tolerances = DEFAULT,
                   polish_point: bool = True) -> np.ndarray | None:
    """Point of ``K ∩ (L + c)`` of least norm, or ``None`` when the set is empty."""
    B = aff.basis
    k = B.shape[1]
    c = np.array(aff.point)
    nv = k + 1
    rcol = k
    M = np.zeros((K.total_dim, nv))
    M[:, :k] = B
    prog = _Program(nv)
    prog.q[rcol] = 1.0
    prog.add_cone(K, M, c)
    head = np.zeros((1, nv))
    head[0, rcol] = -1.0
    prog.add_soc(np.vstack([head, -M]), np.concatenate([[0.0], c]))
    sol = prog.solve(tol.solver_tol, tol.max_iter)
    if sol.infeasible:
        return None
    if not sol.solved:
        _raise_failure(sol, "least-norm point")
    x = M @ sol.x + c
    if polish_point and k:
        try:
            x = polish(K, B, c, sol.x[:k], tol=tol).x
        except PolishFailed:
            log.debug("least-norm point left unpolished")
    return x


def max_linear(At, b, c, K: ExtendedCone, tol: Tolerances = DEFAULT, probe: bool = True) -> OracleResult:
    """``sup b.y`` subject to ``c - At y`` in ``K``.

    Besides OPTIMAL / UNBOUNDED / INFEASIBLE the result can be DIVERGING:
    the objective converges while the iterates grow as the solver tolerance
    tightens, the signature of a finite supremum that is not attained.
    """
    At = np.atleast_2d(np.asarray(At, dtype=float))
    b = np.asarray(b, dtype=float).reshape(-1)
    c = np.asarray(c, dtype=float).reshape(-1)
    p = At.shape[1]

    def run(stol):
        prog = _Program(p)
        prog.q = -b
        prog.add_cone(K, -At, c)
        return prog, prog.solve(stol, tol.max_iter)

    prog, sol = run(tol.solver_tol)
    if sol.infeasible:
        return OracleResult(OracleStatus.INFEASIBLE, -np.inf, None, prog.block_duals(K, sol.z),
                            {"solver": sol.status})
    if sol.unbounded:
        return OracleResult(OracleStatus.UNBOUNDED, np.inf, sol.x, None, {"solver": sol.status})
    if not sol.solved:
        _raise_failure(sol, "linear objective")
    y = sol.x
    value = float(b @ y)
    info = {"solver": sol.status, "iterations": sol.iterations}
    status = OracleStatus.OPTIMAL
    if probe:
        # (tolerance, value, |y|) as the tolerance tightens
        sweep = []
        for stol in PROBE_TOLS:
            _, s = run(stol)
            if s.solved:
                sweep.append((stol, float(b @ s.x), float(np.linalg.norm(s.x))))
        sweep.append((tol.solver_tol, value, float(np.linalg.norm(y))))
        info["probe"] = sweep
        if len(sweep) > 1 and sweep[-1][2] > 20.0 * (1.0 + sweep[0][2]):
            status = OracleStatus.DIVERGING
    return OracleResult(status, value, y, prog.block_duals(K, sol.z), info)
