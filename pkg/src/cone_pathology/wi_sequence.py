"""Points of ``L + c`` arbitrarily close to ``K`` for weakly infeasible problems.

The reducing directions ``d^1..d^k`` of a maximal relaxation sequence and a
feasible point ``c'`` of the last problem span an affine set of dimension at
most ``m`` (the number of Lorentz blocks) that already carries the weak
infeasibility: ``u = c' + sum_i alpha_i d^i`` approaches ``K`` when the
coefficients grow at rates

    alpha_k = t,    alpha_i = t (1 + sum_{j>i} alpha_j)^2,

because every boundary block only tolerates the square of the next
coefficient divided by its own.  ``dist(u, K)`` then behaves like ``C / t``,
but ``alpha_1`` is of order ``t^(2^k - 1)``.  The directions therefore have to
be exact far beyond double precision: they are re-solved in ``mpmath``
against the instance data (read as exact binary numbers) before any
coefficient is applied, and distances are evaluated at the same precision.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import mpmath
import numpy as np

from .cone_algebra import ExtendedCone, HalfSpace, Lorentz, Ray, Subspace, complement_columns
from .config import DEFAULT, Tolerances
from .linear_geometry import AffineSet, LinearSubspace
from .relaxation import RelaxationSequence

log = logging.getLogger("cone_pathology.wi_sequence")

DEFAULT_TARGETS = (1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6)


class ScheduleStall(RuntimeError):
    """A target distance was not reached within the growth cap."""

    def __init__(self, message: str, best_distance: float, target: float):
        super().__init__(message)
        self.best_distance = best_distance
        self.target = target


class RefinementFailed(RuntimeError):
    """The directions could not be made exact in high precision."""


@dataclass(frozen=True)
class WitnessSubspace:
    """Directions ``d^i`` and base point ``c'``; ``u = c' + sum alpha_i d^i`` stays in ``L + c``."""

    directions: tuple[np.ndarray, ...]
    base_point: np.ndarray
    interior_blocks: tuple[tuple[int, ...], ...]
    boundary_blocks: tuple[tuple[int, ...], ...]

    @property
    def k(self) -> int:
        return len(self.directions)

    @property
    def L_prime(self) -> LinearSubspace:
        return LinearSubspace.span(list(self.directions), self.base_point.shape[0])

    @property
    def dim(self) -> int:
        """Dimension of the affine set ``L' + c'``."""
        return self.L_prime.dim

    @classmethod
    def from_sequence(cls, seq: RelaxationSequence, c_prime) -> "WitnessSubspace":
        return cls(tuple(np.asarray(d.vector, dtype=float) for d in seq.directions),
                   np.asarray(c_prime, dtype=float),
                   tuple(d.interior_blocks for d in seq.directions),
                   tuple(d.boundary_blocks for d in seq.directions))


@dataclass(frozen=True)
class SequencePoint:
    target: float
    distance: float
    log10_norm: float
    t: float
    coefficients: tuple[str, ...]    # decimal strings: they overflow doubles for long chains
    u: tuple = field(repr=False, default=())

    def to_dict(self) -> dict:
        return {"target": self.target, "distance": self.distance, "log10_norm": self.log10_norm,
                "t": self.t, "coefficients": list(self.coefficients)}


def extract_witness(K: ExtendedCone, aff: AffineSet, seq: RelaxationSequence,
                    c_prime=None, tol: Tolerances = DEFAULT, self_check: bool = False) -> WitnessSubspace:
    """Witness subspace from a maximal relaxation sequence of a weakly infeasible problem.

    ``c_prime`` defaults to the least-norm feasible point of the last problem.
    With ``self_check`` the reduced problem ``(K, L', c')`` is classified and
    must come out weakly infeasible as well.
    """
    from .conic_solver import min_norm_point
    if not seq.maximal:
        raise ValueError("relaxation sequence is not maximal")
    if c_prime is None:
        c_prime = min_norm_point(seq.last, aff, tol)
        if c_prime is None:
            raise ValueError("last problem has no feasible point")
    wit = WitnessSubspace.from_sequence(seq, c_prime)
    m = K.lorentz_count()
    assert wit.k <= m, "more reducing directions than Lorentz blocks"
    if self_check:
        from .classifier import classify
        from .status import Status
        reduced = AffineSet(wit.L_prime, wit.base_point, "span", None, np.array(wit.directions))
        cert = classify(K, reduced, tol, self_verify=False)
        if cert.status is not Status.WEAKLY_INFEASIBLE:
            raise ValueError(f"reduced problem classified {cert.status.value}, expected weakly infeasible")
    return wit


# ---------------------------------------------------------------------------
# high-precision data


def _mpv(v) -> list:
    return [mpmath.mpf(float(x)) for x in np.asarray(v, dtype=float).reshape(-1)]


def _dot(a, b):
    return mpmath.fsum(x * y for x, y in zip(a, b))


def _norm(a):
    return mpmath.sqrt(_dot(a, a))


def _reflect(p):
    return [p[0]] + [-x for x in p[1:]]


def _independent_rows(J: np.ndarray, rtol: float = 1e-10) -> list[int]:
    """Greedy choice of numerically independent rows (Gram-Schmidt on the rows)."""
    keep, basis = [], []
    scale = max(1.0, float(np.max(np.abs(J)))) if J.size else 1.0
    for i, row in enumerate(J):
        r = row.astype(float).copy()
        for q in basis:
            r -= (q @ r) * q
        nr = np.linalg.norm(r)
        if nr > rtol * scale * max(1.0, np.linalg.norm(row)):
            keep.append(i)
            basis.append(r / nr)
    return keep


@dataclass
class _MpBlock:
    kind: str            # soc, half, ray, sub, free
    sl: slice
    vec: list | None = None       # half-space normal or ray generator
    comp: list | None = None      # complement columns of a subspace block


def _mp_blocks(K: ExtendedCone) -> list[_MpBlock]:
    out = []
    for i, blk in enumerate(K.blocks):
        sl = K.slice(i)
        if isinstance(blk, Lorentz):
            out.append(_MpBlock("soc" if blk.dim >= 2 else "nonneg", sl))
        elif isinstance(blk, HalfSpace):
            out.append(_MpBlock("half", sl, _mpv(blk.normal)))
        elif isinstance(blk, Ray):
            out.append(_MpBlock("ray", sl, _mpv(blk.generator)))
        elif blk.rank == blk.dim:
            out.append(_MpBlock("free", sl))
        else:
            out.append(_MpBlock("sub", sl, None, [_mpv(c) for c in blk.complement.T]))
    return out


def _block_distance(b: _MpBlock, p):
    if b.kind == "soc":
        x0, r = p[0], _norm(p[1:])
        if x0 >= r:
            return mpmath.mpf(0)
        if x0 <= -r:
            return _norm(p)
        return (r - x0) / mpmath.sqrt(2)
    if b.kind == "nonneg":
        return max(mpmath.mpf(0), -p[0])
    if b.kind == "half":
        return max(mpmath.mpf(0), -_dot(b.vec, p)) / _norm(b.vec)
    if b.kind == "ray":
        g2 = _dot(b.vec, b.vec)
        s = _dot(b.vec, p)
        if s <= 0:
            return _norm(p)
        return mpmath.sqrt(max(mpmath.mpf(0), _dot(p, p) - s * s / g2))
    if b.kind == "free":
        return mpmath.mpf(0)
    C = mpmath.matrix([list(c) for c in b.comp]).T
    y = mpmath.lu_solve(C.T * C, C.T * mpmath.matrix(p))
    return mpmath.norm(C * y)


def mp_distance(blocks: list[_MpBlock], u) -> "mpmath.mpf":
    return mpmath.sqrt(mpmath.fsum(_block_distance(b, u[b.sl]) ** 2 for b in blocks))


class ExactData:
    """Reducing directions and ``c'`` re-solved at a chosen decimal precision.

    The affine set is parametrised exactly (``x = c + N z`` with ``N`` the
    supplied generators, or the null space of the supplied equations refined
    to full precision).  Each direction is then forced onto its face pattern
    in the relaxed cone it belongs to, whose half-space normals come from the
    already refined earlier directions; ``c'`` is treated the same way in the
    last cone.
    """

    def __init__(self, K: ExtendedCone, aff: AffineSet, wit: WitnessSubspace, read_tol: float = 1e-9):
        self.K = K
        self.aff = aff
        self.wit = wit
        self.read_tol = read_tol
        self.dps = 0
        self.directions: list[list] = []
        self.base: list = []
        self.blocks = _mp_blocks(K)
        self._float_cones = self._relaxed_float_cones()

    def _relaxed_float_cones(self) -> list[ExtendedCone]:
        cones = [self.K]
        for d, h1, h2 in zip(self.wit.directions, self.wit.interior_blocks, self.wit.boundary_blocks):
            Kc = cones[-1]
            blocks = list(Kc.blocks)
            for i in h1:
                blocks[i] = Subspace.full(Kc[i].dim)
            for i in h2:
                p = d[Kc.slice(i)]
                blocks[i] = HalfSpace(np.concatenate([[p[0]], -p[1:]]))
            cones.append(ExtendedCone(tuple(blocks)))
        return cones

    # -- affine parametrisation --------------------------------------------

    def _parametrisation(self):
        n = self.aff.dim
        if self.aff.source_form == "equations" and self.aff.equations is not None:
            A, b = self.aff.equations
            rows = _independent_rows(np.asarray(A, dtype=float))
            Am = mpmath.matrix([_mpv(A[i]) for i in rows]) if rows else mpmath.zeros(0, n)
            bm = mpmath.matrix([mpmath.mpf(float(b[i])) for i in rows]) if rows else None
            N0 = self.aff.basis
            if rows:
                G = Am * Am.T
                cols = []
                for j in range(N0.shape[1]):
                    v = mpmath.matrix(_mpv(N0[:, j]))
                    v = v - Am.T * mpmath.lu_solve(G, Am * v)
                    cols.append([v[i] for i in range(n)])
                c = Am.T * mpmath.lu_solve(G, bm)
                c = [c[i] for i in range(n)]
            else:
                cols = [_mpv(N0[:, j]) for j in range(N0.shape[1])]
                c = [mpmath.mpf(0)] * n
            return cols, c
        gens = self.aff.exact_generators()
        keep = _independent_rows(gens) if gens.size else []
        return [_mpv(gens[i]) for i in keep], _mpv(self.aff.point)

    # -- pattern equations ------------------------------------------------

    def _equations(self, Kf: ExtendedCone, mpblocks: list[_MpBlock], xf: np.ndarray, affine: bool):
        scale = float(np.linalg.norm(xf)) + (1.0 if affine else 0.0)
        thr = self.read_tol * scale
        n = Kf.total_dim
        lin, bnd = [], []

        def row(sl, loc):
            r = [mpmath.mpf(0)] * n
            for off, val in enumerate(loc):
                r[sl.start + off] = val
            return r

        for blk, mb, p in zip(Kf.blocks, mpblocks, Kf.parts(xf)):
            sl = mb.sl
            dim = sl.stop - sl.start
            if mb.kind in ("soc", "nonneg"):
                if np.linalg.norm(p) <= thr:
                    for j in range(dim):
                        e = [mpmath.mpf(0)] * dim
                        e[j] = mpmath.mpf(1)
                        lin.append(row(sl, e))
                elif mb.kind == "soc" and blk.margin(p) <= thr:
                    bnd.append(sl)
            elif mb.kind == "half":
                if float(blk.normal @ p) <= thr:
                    lin.append(row(sl, mb.vec))
            elif mb.kind == "ray":
                g = mb.vec
                for a in range(dim):
                    for b in range(a + 1, dim):
                        e = [mpmath.mpf(0)] * dim
                        e[a], e[b] = g[b], -g[a]
                        lin.append(row(sl, e))
                if float(blk.generator @ p) <= thr:
                    lin.append(row(sl, g))
            elif mb.kind == "sub":
                for cvec in mb.comp:
                    lin.append(row(sl, cvec))
        return lin, bnd

    def _newton(self, cols, base, lin, bnd, xf):
        n = len(base)
        k = len(cols)
        N = mpmath.matrix(n, k)
        for j, col in enumerate(cols):
            for i in range(n):
                N[i, j] = col[i]
        # starting coefficients: least squares fit of the float point
        xm = mpmath.matrix(_mpv(xf)) - mpmath.matrix(base)
        z = mpmath.lu_solve(N.T * N, N.T * xm) if k else mpmath.matrix(0, 1)
        R = mpmath.matrix(lin) if lin else None
        eps = mpmath.mpf(10) ** (-(mpmath.mp.dps - 12))

        def residual(z):
            x = N * z + mpmath.matrix(base) if k else mpmath.matrix(base)
            F, J = [], []
            if R is not None:
                Fl = R * x
                Jl = R * N
                for i in range(R.rows):
                    F.append(Fl[i])
                    J.append([Jl[i, j] for j in range(k)])
            for sl in bnd:
                p = [x[i] for i in range(sl.start, sl.stop)]
                r = _norm(p[1:])
                F.append(p[0] - r)
                g = [mpmath.mpf(0)] * n
                g[sl.start] = mpmath.mpf(1)
                if r > 0:
                    for off in range(1, len(p)):
                        g[sl.start + off] = -p[off] / r
                gm = mpmath.matrix([g]) * N
                J.append([gm[0, j] for j in range(k)])
            return x, F, J

        x, F, J = residual(z)
        if not F or k == 0:
            return [x[i] for i in range(n)]
        rows = _independent_rows(np.array([[float(v) for v in r] for r in J]))
        for _ in range(60):
            xs = 1 + _norm([x[i] for i in range(n)])
            if max(abs(f) for f in F) <= eps * xs:
                break
            if not rows:
                break
            Js = mpmath.matrix([J[i] for i in rows])
            Fs = mpmath.matrix([F[i] for i in rows])
            dz = Js.T * mpmath.lu_solve(Js * Js.T, Fs)
            z = z - dz
            x, F, J = residual(z)
        xs = 1 + _norm([x[i] for i in range(n)])
        worst = max(abs(f) for f in F)
        if worst > eps * xs * 1e6:
            raise RefinementFailed(f"pattern residual {mpmath.nstr(worst, 5)} at {mpmath.mp.dps} digits")
        return [x[i] for i in range(n)]

    def refine(self, dps: int) -> None:
        if dps <= self.dps:
            return
        with mpmath.workdps(dps):
            cols, c = self._parametrisation()
            zero = [mpmath.mpf(0)] * len(c)
            mpblocks = list(self.blocks)
            dirs = []
            for i, d in enumerate(self.wit.directions):
                Kf = self._float_cones[i]
                lin, bnd = self._equations(Kf, mpblocks, d, affine=False)
                dm = self._newton(cols, zero, lin, bnd, d)
                nrm = _norm(dm)
                dm = [v / nrm for v in dm]
                dirs.append(dm)
                mpblocks = list(mpblocks)
                for j in self.wit.interior_blocks[i]:
                    mpblocks[j] = _MpBlock("free", mpblocks[j].sl)
                for j in self.wit.boundary_blocks[i]:
                    sl = mpblocks[j].sl
                    mpblocks[j] = _MpBlock("half", sl, _reflect(dm[sl]))
            lin, bnd = self._equations(self._float_cones[-1], mpblocks, self.wit.base_point, affine=True)
            self.base = self._newton(cols, c, lin, bnd, self.wit.base_point)
            self.directions = dirs
            self.last_blocks = mpblocks
            self.dps = dps

    def point(self, alphas) -> list:
        u = list(self.base)
        for a, d in zip(alphas, self.directions):
            u = [ui + a * di for ui, di in zip(u, d)]
        return u

    def distance(self, u):
        return mp_distance(self.blocks, u)


# ---------------------------------------------------------------------------
# coefficient schedule


def schedule(t, k: int) -> list:
    """``alpha_k = t`` and ``alpha_i = t (1 + sum_{j>i} alpha_j)^2`` (as mpf)."""
    t = mpmath.mpf(t)
    alphas = [mpmath.mpf(0)] * k
    tail = mpmath.mpf(0)
    for i in range(k - 1, -1, -1):
        alphas[i] = t * (1 + tail) ** 2
        tail += alphas[i]
    return alphas


def _needed_dps(t: float, k: int, target: float) -> int:
    digits_alpha = (2 ** k - 1) * math.log10(max(t, 2.0) * (k + 2) ** 2) if k else 0.0
    return int(digits_alpha + max(0.0, -math.log10(target)) + 40)


def _coordinate_descent(data: ExactData, alphas: list, rounds: int = 3):
    best = data.distance(data.point(alphas))
    for _ in range(rounds):
        improved = False
        for i in range(len(alphas)):
            for factor in (2, mpmath.mpf(1) / 2):
                while True:
                    trial = list(alphas)
                    trial[i] = trial[i] * factor
                    dist = data.distance(data.point(trial))
                    if dist < best:
                        alphas, best, improved = trial, dist, True
                    else:
                        break
        if not improved:
            break
    return alphas, best


def generate_sequence(K: ExtendedCone, aff: AffineSet, wit: WitnessSubspace, targets=DEFAULT_TARGETS,
                      growth_cap: float = 1e12, data: ExactData | None = None) -> list[SequencePoint]:
    """Points ``u`` of ``L' + c'`` with ``dist(u, K) <= eps`` for each target ``eps``.

    Targets must be decreasing; ``math.inf`` yields ``c'`` itself.  The
    parameter ``t`` is doubled from one target to the next, so the distances
    strictly decrease along the list.
    """
    targets = [float(e) for e in targets]
    if any(b >= a for a, b in zip(targets, targets[1:])):
        raise ValueError("targets must be strictly decreasing")
    k = wit.k
    data = data or ExactData(K, aff, wit)
    finite = [e for e in targets if math.isfinite(e)]
    data.refine(_needed_dps(64.0 / min(finite), k, min(finite)) if finite else 40)
    out: list[SequencePoint] = []
    t = 0.5
    for eps in targets:
        with mpmath.workdps(data.dps):
            if not math.isfinite(eps):
                u = list(data.base)
                dist = data.distance(u)
                out.append(SequencePoint(eps, float(dist), float(mpmath.log10(_norm(u) or 1)), 0.0,
                                         tuple("0" for _ in range(k)), tuple(u)))
                continue
            if k == 0:
                raise ScheduleStall("no directions to move along", float(data.distance(data.base)), eps)
            best = None
            t *= 2.0
            while True:
                need = _needed_dps(t, k, eps)
                if need > data.dps:
                    data.refine(need + 20)
                with mpmath.workdps(data.dps):
                    alphas = schedule(t, k)
                    u = data.point(alphas)
                    dist = data.distance(u)
                    if best is None or dist < best[0]:
                        best = (dist, t, alphas, u)
                    if dist <= eps:
                        break
                if t > growth_cap:
                    with mpmath.workdps(data.dps):
                        alphas, dist = _coordinate_descent(data, best[2])
                        if dist <= eps:
                            best = (dist, best[1], alphas, data.point(alphas))
                            break
                    raise ScheduleStall(f"target {eps:g} not reached up to t = {growth_cap:g}",
                                        float(best[0]), eps)
                t *= 2.0
            dist, t_used, alphas, u = best if best[0] <= eps else (dist, t, alphas, u)
            if out and math.isfinite(out[-1].target) and not dist < out[-1].distance:
                raise ScheduleStall("distances stopped decreasing", float(dist), eps)
            out.append(SequencePoint(eps, float(dist), float(mpmath.log10(_norm(u))), float(t_used),
                                     tuple(mpmath.nstr(a, 17) for a in alphas), tuple(u)))
    return out


def point_in_affine(aff: AffineSet, u, tol: float = DEFAULT.eps_lin) -> bool:
    """``u`` (high precision) lies in ``L + c`` up to a relative residual ``tol``."""
    with mpmath.workdps(max(mpmath.mp.dps, 30)):
        diff = [ui - mpmath.mpf(float(ci)) for ui, ci in zip(u, aff.point)]
        C = aff.L.complement().basis
        if C.shape[1] == 0:
            return True
        res = _norm([_dot(_mpv(C[:, j]), diff) for j in range(C.shape[1])])
        return res <= tol * (1 + _norm(list(u)))
