"""Attainment regularisation of dual-form problems ``sup b.y  s.t.  c - A^T y in K``.

When the problem is strongly feasible, relaxing ``K`` along a maximal
relaxation sequence built from ``L = range A^T ∩ {A^T y : b.y = 0}`` keeps the
optimal value and makes it attained.  Points of the original problem that
come arbitrarily close to the optimum are rebuilt from a maximiser of the
relaxed problem by adding the preimages ``y^i`` of the reducing directions,
which never change the objective because ``b.y^i = 0``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .cone_algebra import ExtendedCone, contains, in_relative_interior, margin
from .conic_solver import OracleResult, OracleStatus, Undecided, _Program, max_linear, max_margin
from .config import DEFAULT, Tolerances
from .linear_geometry import AffineSet, LinearSubspace, intersect, solve_preimage
from .relaxation import RelaxationSequence, build_maximal_sequence, doubling_search

log = logging.getLogger("cone_pathology.attainment")


class NotStronglyFeasible(ValueError):
    """The dual-form problem has no slack in the relative interior of ``K``."""


class Unbounded(ValueError):
    """``sup b.y`` is ``+inf`` (for the relaxed and hence the original problem)."""


class AlphaSearchFail(RuntimeError):
    """A correction coefficient did not bring the slack inside the cone below the cap."""


@dataclass(frozen=True, eq=False)
class DualFormProblem:
    """``sup b.y`` subject to ``c - At y in K``; ``At`` is the ``n x p`` matrix of ``A^T``."""

    At: np.ndarray
    b: np.ndarray
    c: np.ndarray
    K: ExtendedCone

    def __post_init__(self):
        At = np.atleast_2d(np.asarray(self.At, dtype=float))
        b = np.asarray(self.b, dtype=float).reshape(-1)
        c = np.asarray(self.c, dtype=float).reshape(-1)
        if At.shape != (self.K.total_dim, b.shape[0]) or c.shape[0] != self.K.total_dim:
            raise ValueError(f"inconsistent dimensions: At {At.shape}, b {b.shape}, c {c.shape}, "
                             f"cone {self.K.total_dim}")
        object.__setattr__(self, "At", At)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)

    @property
    def p(self) -> int:
        return self.b.shape[0]

    def slack(self, y) -> np.ndarray:
        return self.c - self.At @ np.asarray(y, dtype=float)

    def value(self, y) -> float:
        return float(self.b @ np.asarray(y, dtype=float))

    def slack_set(self) -> AffineSet:
        """``range A^T + c``, the set the slacks range over."""
        return AffineSet.from_span(self.c, self.At.T)

    def to_dict(self) -> dict:
        return {"A": self.At.T.tolist(), "b": self.b.tolist(), "c": self.c.tolist(), "cone": self.K.to_list()}

    @classmethod
    def from_dict(cls, data: dict) -> "DualFormProblem":
        K = ExtendedCone.from_list(data["cone"])
        A = np.atleast_2d(np.asarray(data["A"], dtype=float))
        return cls(A.T, data["b"], data["c"], K)


@dataclass(eq=False)
class RegularizedProblem:
    """``sup b.y`` subject to ``c - At y in K_gamma``, with the data needed to return to ``K``."""

    original: DualFormProblem
    K_gamma: ExtendedCone
    sequence: RelaxationSequence
    L: LinearSubspace
    directions: list[np.ndarray]       # a^i = -A^T y^i
    preimages: list[np.ndarray]        # y^i with b.y^i = 0
    y_hat: np.ndarray                  # slack in ri K_gamma
    notes: list[str] = field(default_factory=list)

    @property
    def problem(self) -> DualFormProblem:
        return DualFormProblem(self.original.At, self.original.b, self.original.c, self.K_gamma)

    def to_dict(self) -> dict:
        return {"cone": self.K_gamma.to_list(),
                "directions": [a.tolist() for a in self.directions],
                "preimages": [y.tolist() for y in self.preimages],
                "y_hat": self.y_hat.tolist(),
                "relaxation": self.sequence.to_list()}


@dataclass(frozen=True)
class PathPoint:
    beta: float
    y: np.ndarray
    value: float
    margin: float
    alphas: tuple[float, ...]

    def to_dict(self) -> dict:
        return {"beta": self.beta, "y": self.y.tolist(), "value": self.value, "margin": self.margin,
                "alphas": list(self.alphas)}


def _slack_preimage(prob: DualFormProblem, x, tol: Tolerances) -> np.ndarray:
    """``y`` with ``c - At y = x`` for a slack ``x`` in ``range A^T + c``."""
    return solve_preimage(prob.At, prob.c - np.asarray(x, dtype=float), eps_lin=10 * tol.eps_feas)


def objective_kernel(prob: DualFormProblem) -> LinearSubspace:
    """``range A^T ∩ {A^T y : b.y = 0}``."""
    n, p = prob.At.shape
    rng = LinearSubspace.span(prob.At.T, n)
    bn = np.linalg.norm(prob.b)
    if bn == 0.0:
        return rng
    # A^T applied to a basis of {y : b.y = 0}
    null_b = LinearSubspace.span([prob.b], p).complement().basis
    return intersect(rng, LinearSubspace.span((prob.At @ null_b).T, n))


def interior_slack_point(prob: DualFormProblem, tol: Tolerances = DEFAULT) -> np.ndarray | None:
    """``y`` with ``c - At y`` in ``ri K``, or ``None`` if the margin is not positive."""
    mm = max_margin(prob.K, prob.slack_set(), tol=tol)
    if mm.status is OracleStatus.UNDECIDED:
        raise Undecided("strong feasibility of the dual-form problem is undecided", margin=mm.value)
    if mm.status is not OracleStatus.STRICT:
        return None
    return _slack_preimage(prob, mm.primal, tol)


def regularize(prob: DualFormProblem, tol: Tolerances = DEFAULT) -> RegularizedProblem:
    """Relax ``K`` along a maximal sequence for ``(K, L, c)`` with ``L`` the objective kernel."""
    if interior_slack_point(prob, tol) is None:
        raise NotStronglyFeasible("no slack in the relative interior of K")
    L = objective_kernel(prob)
    seq = build_maximal_sequence(prob.K, L, tol)
    if not seq.maximal:
        raise Undecided("relaxation sequence not certified maximal", warnings=list(seq.warnings))
    dirs, pre = [], []
    for d in seq.directions:
        y = solve_preimage(prob.At, -d.vector, prob.b, eps_lin=10 * tol.eps_feas)
        dirs.append(d.vector)
        pre.append(y)
    relaxed = DualFormProblem(prob.At, prob.b, prob.c, seq.last)
    y_hat = interior_slack_point(relaxed, tol)
    if y_hat is None:
        raise Undecided("relaxed problem has no relative-interior slack")
    return RegularizedProblem(prob, seq.last, seq, L, dirs, pre, y_hat)


def _least_norm_maximiser(prob: DualFormProblem, value: float, tol: Tolerances) -> np.ndarray | None:
    """Least-norm ``y`` with ``b.y >= value - slack`` and ``c - At y in K``."""
    n, p = prob.At.shape
    nv = p + 1
    prog = _Program(nv)
    prog.q[p] = 1.0
    M = np.zeros((n, nv))
    M[:, :p] = -prob.At
    prog.add_cone(prob.K, M, prob.c)
    row = np.zeros((1, nv))
    row[0, :p] = -prob.b
    prog.add_nonneg(row, [-(value - tol.eps_lin * (1.0 + abs(value)))])
    G = np.zeros((p, nv))
    G[:, :p] = np.eye(p)
    prog.add_norm_bound(G, rcol=p)
    sol = prog.solve(tol.solver_tol, tol.max_iter)
    return sol.x[:p] if sol.solved else None


def solve_regularized(reg: RegularizedProblem, tol: Tolerances = DEFAULT) -> tuple[float, np.ndarray]:
    """Optimal value and an attaining ``y*`` of the relaxed problem.

    The relaxed problem attains its value, but its optimal set may be
    unbounded; the least-norm maximiser is returned.
    """
    prob = reg.problem
    res = max_linear(prob.At, prob.b, prob.c, prob.K, tol, probe=False)
    if res.status is OracleStatus.UNBOUNDED:
        raise Unbounded("relaxed problem is unbounded, so is the original")
    if res.status is OracleStatus.INFEASIBLE:
        raise Undecided("relaxed problem reported infeasible")
    y = _least_norm_maximiser(prob, res.value, tol)
    if y is None or not contains(prob.K, prob.slack(y), 10 * tol.eps_feas):
        y = res.primal
    return res.value, y


def direct_solve(prob: DualFormProblem, tol: Tolerances = DEFAULT) -> OracleResult:
    """Solve the unregularised problem; DIVERGING flags a supremum that is not attained."""
    return max_linear(prob.At, prob.b, prob.c, prob.K, tol, probe=True)


def near_optimal_path(reg: RegularizedProblem, y_star, betas, y_hat=None, tol: Tolerances = DEFAULT,
                      alpha_cap: float = 1e12) -> list[PathPoint]:
    """Feasible points of the original problem with values ``b.((1-beta) y_hat + beta y*)``.

    The slack of ``(1-beta) y_hat + beta y*`` lies in ``ri K_gamma``.  Walking
    the relaxation sequence backwards, each preimage ``y^i`` is added with the
    first doubling coefficient that puts the slack in ``ri K_i``.
    """
    prob = reg.original
    y_star = np.asarray(y_star, dtype=float)
    y_hat = reg.y_hat if y_hat is None else np.asarray(y_hat, dtype=float)
    if not in_relative_interior(reg.K_gamma, prob.slack(y_hat), tol.eps_feas):
        raise ValueError("y_hat does not give a relative-interior slack of the relaxed cone")
    cones = reg.sequence.cones
    out = []
    for beta in betas:
        beta = float(beta)
        if not 0.0 <= beta < 1.0:
            raise ValueError("beta must lie in [0, 1)")
        y = (1.0 - beta) * y_hat + beta * y_star
        alphas = [0.0] * len(reg.preimages)
        for i in range(len(reg.preimages) - 1, -1, -1):
            Ki, yi = cones[i], reg.preimages[i]
            cur = y

            def inside(t, cur=cur, Ki=Ki, yi=yi):
                return in_relative_interior(Ki, prob.slack(cur + t * yi), tol.eps_feas)

            t = 0.0 if inside(0.0) else doubling_search(inside, 1.0, alpha_cap)
            if t is None:
                raise AlphaSearchFail(f"beta = {beta}: coefficient {i + 1} exceeds {alpha_cap:g}")
            alphas[i] = t
            y = y + t * yi
        s = prob.slack(y)
        out.append(PathPoint(beta, y, prob.value(y), margin(prob.K, s).overall, tuple(alphas)))
    return out
