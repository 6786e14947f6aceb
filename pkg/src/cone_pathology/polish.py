"""Snap an approximate conic point onto the face it appears to lie on.

Interior-point solutions of degenerate problems sit a little off the face
that contains the true optimum: blocks that should vanish come out at 1e-8,
boundary blocks carry a margin of the same size.  Given a parametrisation
``x = M u + m0`` we read the face pattern of ``x`` with a coarse threshold and
then solve the pattern equations (linear ones plus ``x0 = ||x[1:]||`` for
boundary Lorentz blocks) by Gauss-Newton with minimal-norm steps, which moves
``u`` as little as possible.  The result satisfies the pattern to
``RESIDUAL_TOL`` (usually to machine precision), or ``PolishFailed`` is raised.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cone_algebra import ExtendedCone, HalfSpace, Lorentz, Ray, Subspace, complement_columns
from .config import DEFAULT, Tolerances

ZERO = "zero"
BOUNDARY = "boundary"
INTERIOR = "interior"
TIGHT = "tight"
LOOSE = "loose"
FIXED = "fixed"

# accepted pattern-equation residual, relative to the point and the parametrisation;
# double roots on tangent blocks leave Gauss-Newton a little short of machine precision
RESIDUAL_TOL = 1e-10


class PolishFailed(RuntimeError):
    """The pattern equations could not be solved near the starting point."""


@dataclass(frozen=True)
class PolishResult:
    u: np.ndarray
    x: np.ndarray
    pattern: tuple[str, ...]
    residual: float


def read_pattern(K: ExtendedCone, x: np.ndarray, scale: float, ptol: float) -> list[str]:
    """Per-block face labels of ``x`` using the threshold ``ptol * scale``."""
    thr = ptol * scale
    out = []
    for blk, p in zip(K.blocks, K.parts(x)):
        if isinstance(blk, Lorentz):
            if np.linalg.norm(p) <= thr:
                out.append(ZERO)
            elif blk.dim == 1:
                out.append(INTERIOR)
            elif blk.margin(p) <= thr:
                out.append(BOUNDARY)
            else:
                out.append(INTERIOR)
        elif isinstance(blk, HalfSpace):
            out.append(TIGHT if blk.margin(p) <= thr else LOOSE)
        elif isinstance(blk, Ray):
            out.append(ZERO if float(blk.generator @ p) <= thr else INTERIOR)
        else:
            out.append(FIXED)
    return out


def _linear_rows(K: ExtendedCone, pattern) -> np.ndarray:
    n = K.total_dim
    rows = []
    for i, (blk, lab) in enumerate(zip(K.blocks, pattern)):
        sl = K.slice(i)
        loc = None
        if isinstance(blk, Lorentz) and lab == ZERO:
            loc = np.eye(blk.dim)
        elif isinstance(blk, HalfSpace) and lab == TIGHT:
            loc = blk.normal[None, :]
        elif isinstance(blk, Ray):
            loc = complement_columns(blk.generator[:, None], blk.dim).T
            if lab == ZERO:
                loc = np.vstack([loc, blk.generator[None, :]])
        elif isinstance(blk, Subspace):
            loc = blk.complement.T
        if loc is not None and loc.shape[0]:
            r = np.zeros((loc.shape[0], n))
            r[:, sl] = loc
            rows.append(r)
    return np.vstack(rows) if rows else np.zeros((0, n))


def _min_norm_step(J: np.ndarray, F: np.ndarray, cutoff: float) -> np.ndarray:
    """Least-squares step ignoring singular values below an absolute ``cutoff``.

    A relative cutoff would let a Jacobian made only of rounding noise
    (equations that hold identically on the parametrised set) throw ``u``
    far off.
    """
    U, s, Vt = np.linalg.svd(J, full_matrices=False)
    keep = s > cutoff
    return Vt[keep].T @ ((U[:, keep].T @ F) / s[keep])


def _boundary_grad(K: ExtendedCone, i: int, x: np.ndarray) -> tuple[float, np.ndarray, np.ndarray]:
    """Value, gradient and Hessian of ``x0 - ||x_bar||`` on block ``i`` (embedded in R^n)."""
    sl = K.slice(i)
    p = x[sl]
    r = float(np.linalg.norm(p[1:]))
    n = K.total_dim
    g = np.zeros(n)
    g[sl.start] = 1.0
    H = np.zeros((n, n))
    if r > 0:
        q = p[1:] / r
        g[sl.start + 1:sl.stop] = -q
        H[sl.start + 1:sl.stop, sl.start + 1:sl.stop] = -(np.eye(q.shape[0]) - np.outer(q, q)) / r
    return p[0] - r, g, H


def _solve_pattern(K, M, m0, u0, pattern, extra, iters=40, tangent_tol=1e-3, tangent_check=1e-10):
    """Gauss-Newton on the pattern equations.

    A boundary block whose gradient is (nearly) orthogonal to every direction
    the linear equations leave free is tangent to the parametrised set: its
    boundary equation has a double root there and only pins ``u`` down to the
    square root of machine precision.  For such blocks the boundary equation
    is replaced by stationarity of ``x0 - ||x_bar||`` along the free
    directions, a simple root.  The boundary value is then only checked, at
    ``tangent_check``; other constraints can make the small gradient a
    coincidence, and the caller falls back to the plain equations when the
    check fails (``tangent_tol=0`` disables the substitution).
    """
    lin = _linear_rows(K, pattern)
    if extra is not None and len(extra):
        lin = np.vstack([lin, extra])
    bnd = [i for i, lab in enumerate(pattern) if lab == BOUNDARY]
    JL = lin @ M
    mscale = max(1.0, float(np.linalg.norm(M, 2)) if M.size else 1.0)
    cutoff = 1e-9 * mscale
    # free directions of the linear equations
    if JL.shape[0]:
        _, sv, Vt = np.linalg.svd(JL, full_matrices=True)
        P = Vt[int(np.sum(sv > cutoff)):].T
    else:
        P = np.eye(M.shape[1])
    u = np.array(u0, dtype=float)
    x = M @ u + m0
    tangent = set()
    for i in bnd:
        _, g, _ = _boundary_grad(K, i, x)
        if tangent_tol > 0 and P.shape[1] and np.linalg.norm(g @ M @ P) <= tangent_tol * mscale:
            tangent.add(i)
    res = np.inf
    best = (np.inf, u)
    for _ in range(iters):
        x = M @ u + m0
        F = [lin @ x]
        J = [JL]
        for i in bnd:
            val, g, H = _boundary_grad(K, i, x)
            if i in tangent:
                F.append(g @ M @ P)
                J.append(P.T @ M.T @ H @ M)
            else:
                F.append(np.array([val]))
                J.append((g @ M)[None, :])
        F = np.concatenate(F)
        res = float(np.linalg.norm(F)) if F.size else 0.0
        if res < best[0]:
            best = (res, u)
        scale = max(1.0, float(np.linalg.norm(x)))
        if res <= 4e-16 * scale:
            break
        du = _min_norm_step(np.vstack(J), F, cutoff)
        u = u - du
    # near a double root the iterates chatter; keep the best one
    res, u = best
    x = M @ u + m0
    scale = max(1.0, float(np.linalg.norm(x)))
    for i in tangent:
        if abs(_boundary_grad(K, i, x)[0]) > tangent_check * scale * mscale:
            return u, x, np.inf
    return u, x, res


def polish(K: ExtendedCone, M, m0, u0, extra_rows=None, tol: Tolerances = DEFAULT,
           pattern=None) -> PolishResult:
    """Project ``M u0 + m0`` onto its apparent face of ``K`` (see module docstring).

    ``extra_rows`` are additional homogeneous linear equations ``R x = 0``
    imposed on the polished point.  If a block labelled nonzero collapses or
    an interior block drifts onto the boundary, the label is demoted and the
    solve repeated.
    """
    M = np.asarray(M, dtype=float).reshape(K.total_dim, -1)
    m0 = np.zeros(K.total_dim) if m0 is None else np.asarray(m0, dtype=float)
    u0 = np.asarray(u0, dtype=float)
    x0 = M @ u0 + m0
    scale = float(np.linalg.norm(x0)) if not np.any(m0) else 1.0 + float(np.linalg.norm(x0))
    if scale == 0.0:
        raise PolishFailed("cannot polish the zero vector")
    pat = list(pattern) if pattern is not None else read_pattern(K, x0, scale, tol.pattern_tol)
    extra = None if extra_rows is None else np.atleast_2d(np.asarray(extra_rows, dtype=float))
    # equation rows scale with the parametrisation
    mscale = max(1.0, float(np.linalg.norm(M, 2)) if M.size else 1.0)
    for _ in range(2 * len(K) + 2):
        u, x, res = _solve_pattern(K, M, m0, u0, pat, extra)
        if not np.isfinite(res) or res > 1e-12 * max(1.0, float(np.linalg.norm(x))) * mscale:
            alt = _solve_pattern(K, M, m0, u0, pat, extra, tangent_tol=0.0)
            if not alt[2] >= res:
                u, x, res = alt
        xs = max(1.0, float(np.linalg.norm(x))) if np.any(m0) else float(np.linalg.norm(x))
        if not np.isfinite(res) or res > RESIDUAL_TOL * max(xs, 1.0) * mscale:
            raise PolishFailed(f"pattern equations residual {res:.3e}")
        changed = False
        small = tol.delta_dir * xs
        for i, (blk, p) in enumerate(zip(K.blocks, K.parts(x))):
            lab = pat[i]
            if isinstance(blk, Lorentz) and lab in (BOUNDARY, INTERIOR):
                if np.linalg.norm(p) <= small or p[0] <= 0:
                    pat[i], changed = ZERO, True
                elif lab == INTERIOR and blk.margin(p) <= 1e-12 * xs:
                    pat[i], changed = (BOUNDARY if blk.dim > 1 else ZERO), True
            elif isinstance(blk, HalfSpace) and lab == LOOSE and blk.margin(p) <= 1e-12 * xs:
                pat[i], changed = TIGHT, True
            elif isinstance(blk, Ray) and lab == INTERIOR and float(blk.generator @ p) <= 1e-12 * xs:
                pat[i], changed = ZERO, True
        if not changed:
            return PolishResult(u, x, tuple(pat), res)
    raise PolishFailed("face pattern did not stabilise")
