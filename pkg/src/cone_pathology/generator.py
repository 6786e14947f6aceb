"""Instances with a known feasibility status.

All data are integers.  Each Lorentz block is moved by its own automorphism
``x -> D (x0, R x_bar)`` with ``R`` a rational rotation from the Cayley
transform of a small integer skew matrix and ``D`` the common denominator,
so the rotated data stay integral, exactly representable, and the status is
unchanged.  Dual vectors follow the inverse transpose map.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .classifier import StatusCertificate, verify
from .cone_algebra import ExtendedCone
from .io import Instance
from .linear_geometry import AffineSet
from .status import Status

log = logging.getLogger("cone_pathology.generator")

DEFAULT_DIM = 3


@dataclass
class PlantedInstance:
    instance: Instance
    status: Status
    evidence: dict
    m: int
    dims: tuple[int, ...]
    seed: int | None = None
    notes: list = field(default_factory=list)

    @property
    def K(self) -> ExtendedCone:
        return self.instance.K

    @property
    def aff(self) -> AffineSet:
        return self.instance.aff


# ---------------------------------------------------------------------------
# rational rotations


def _frac_inverse(M: list[list[Fraction]]) -> list[list[Fraction]]:
    n = len(M)
    aug = [row[:] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(M)]
    for col in range(n):
        piv = next(r for r in range(col, n) if aug[r][col] != 0)
        aug[col], aug[piv] = aug[piv], aug[col]
        p = aug[col][col]
        aug[col] = [v / p for v in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [a - f * b for a, b in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]


def cayley_rotation(k: int, rng: np.random.Generator, spread: int = 1) -> tuple[np.ndarray, int]:
    """Integer matrix ``Q`` and integer ``D > 0`` with ``Q / D`` orthogonal (size ``k``)."""
    if k == 0:
        return np.zeros((0, 0), dtype=np.int64), 1
    S = np.zeros((k, k), dtype=np.int64)
    for i in range(k):
        for j in range(i + 1, k):
            S[i, j] = int(rng.integers(-spread, spread + 1))
            S[j, i] = -S[i, j]
    I = np.eye(k, dtype=np.int64)
    inv = _frac_inverse([[Fraction(int(v)) for v in row] for row in (I + S)])
    R = [[sum(Fraction(int((I - S)[i, t])) * inv[t][j] for t in range(k)) for j in range(k)] for i in range(k)]
    D = 1
    for row in R:
        for v in row:
            D = D * v.denominator // math.gcd(D, v.denominator)
    Q = np.array([[int(v * D) for v in row] for row in R], dtype=np.int64)
    return Q, D


@dataclass(frozen=True)
class BlockMap:
    """``x -> (D x0, Q x_bar)`` on each Lorentz block; ``Q / D`` is orthogonal."""

    dims: tuple[int, ...]
    Q: tuple[np.ndarray, ...]
    D: tuple[int, ...]

    @classmethod
    def identity(cls, dims) -> "BlockMap":
        return cls(tuple(dims), tuple(np.eye(n - 1, dtype=np.int64) for n in dims), tuple(1 for _ in dims))

    @classmethod
    def random(cls, dims, rng: np.random.Generator) -> "BlockMap":
        Qs, Ds = [], []
        for n in dims:
            Q, D = cayley_rotation(n - 1, rng)
            Qs.append(Q)
            Ds.append(D)
        return cls(tuple(dims), tuple(Qs), tuple(Ds))

    def _split(self, x):
        x = np.asarray(x)
        out, pos = [], 0
        for n in self.dims:
            out.append(x[pos:pos + n])
            pos += n
        return out

    def primal(self, x) -> np.ndarray:
        parts = [np.concatenate([[D * p[0]], Q @ p[1:]]) for p, Q, D in zip(self._split(x), self.Q, self.D)]
        return np.concatenate(parts)

    def dual(self, w) -> np.ndarray:
        """Inverse transpose of ``primal``: keeps ``w . x`` unchanged."""
        # (Q/D) is orthogonal, so the inverse transpose of x_bar -> Q x_bar is w_bar -> Q w_bar / D^2
        parts = [np.concatenate([[p[0] / D], (Q @ p[1:]) / D ** 2])
                 for p, Q, D in zip(self._split(np.asarray(w, dtype=float)), self.Q, self.D)]
        return np.concatenate(parts)


# ---------------------------------------------------------------------------
# planting


def _integer_perp(w: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Integer vector ``(w.w) v - (w.v) w``, orthogonal to ``w``."""
    return int(w @ w) * v - int(w @ v) * w


def _interior_point(n: int, rng: np.random.Generator, spread: int = 3) -> np.ndarray:
    tail = rng.integers(-spread, spread + 1, size=n - 1)
    head = math.isqrt(int(tail @ tail)) + 1 + int(rng.integers(0, spread))
    return np.concatenate([[head], tail]).astype(np.int64)


def _random_span(n: int, k: int, rng: np.random.Generator, spread: int = 2) -> np.ndarray:
    return rng.integers(-spread, spread + 1, size=(k, n)).astype(np.int64)


def _strongly_feasible(dims, rng):
    n = sum(dims)
    x = np.concatenate([_interior_point(d, rng) for d in dims])
    k = int(rng.integers(0, n))
    gens = _random_span(n, k, rng)
    shift = gens.T @ rng.integers(-2, 3, size=k) if k else np.zeros(n, dtype=np.int64)
    return gens, x - shift, {"x": x.astype(float)}


def _strongly_infeasible(dims, rng):
    n = sum(dims)
    w = np.concatenate([_interior_point(d, rng) for d in dims])
    k = int(rng.integers(0, n))
    gens = np.array([_integer_perp(w, v) for v in _random_span(n, k, rng)]).reshape(k, n)
    u = _integer_perp(w, rng.integers(-2, 3, size=n))
    c = -w + u
    return gens, c, {"w": w / float(w @ w)}


def _weakly_feasible(dims, rng):
    n = sum(dims)
    # boundary point (1, e1) on the first block, interior points elsewhere
    first = np.zeros(dims[0], dtype=np.int64)
    first[0] = first[1] = 1
    x = np.concatenate([first] + [_interior_point(d, rng) for d in dims[1:]])
    w = np.zeros(n, dtype=np.int64)
    w[0], w[1] = 1, -1
    k = int(rng.integers(1, n))
    gens = np.array([_integer_perp(w, v) for v in _random_span(n, k, rng)]).reshape(k, n)
    return gens, x, {"x": x.astype(float), "w": w / math.sqrt(2.0)}


def chain_data(dims) -> tuple[np.ndarray, np.ndarray]:
    """Span generators and point of ``{(s1, s1, s2, 0..) x ... x (sm, sm, 1, 0..)}``."""
    m = len(dims)
    n = sum(dims)
    offs = np.concatenate([[0], np.cumsum(dims)[:-1]]).astype(int)
    gens = np.zeros((m, n), dtype=np.int64)
    for i in range(m):
        gens[i, offs[i]] = gens[i, offs[i] + 1] = 1
        if i > 0:
            gens[i, offs[i - 1] + 2] = 1
    c = np.zeros(n, dtype=np.int64)
    c[offs[m - 1] + 2] = 1
    return gens, c


def chain_evidence(dims) -> dict:
    """Relaxation directions, ``c'`` and facial-reduction chain of the unrotated chain instance."""
    m = len(dims)
    n = sum(dims)
    offs = np.concatenate([[0], np.cumsum(dims)[:-1]]).astype(int)
    gens, c = chain_data(dims)
    wits = []
    w = np.zeros(n)
    for o in offs:
        w[o], w[o + 1] = 1.0, -1.0
    wits.append(w)
    for j in range(m - 1):
        w = np.zeros(n)
        w[offs[j] + 2] = -2.0
        w[offs[j + 1]] = w[offs[j + 1] + 1] = 1.0
        wits.append(w)
    w = np.zeros(n)
    w[offs[m - 1] + 2] = -1.0
    wits.append(w)
    return {"directions": [g.astype(float) for g in gens], "H1": [() for _ in range(m)],
            "H2": [(i,) for i in range(m)], "c_prime": c.astype(float), "fra_witnesses": wits,
            "infeasible_at": m + 1}


def _weakly_infeasible(dims, rng):
    gens, c = chain_data(dims)
    return gens, c, chain_evidence(dims)


_PLANTERS = {
    Status.STRONGLY_FEASIBLE: _strongly_feasible,
    Status.STRONGLY_INFEASIBLE: _strongly_infeasible,
    Status.WEAKLY_FEASIBLE: _weakly_feasible,
    Status.WEAKLY_INFEASIBLE: _weakly_infeasible,
}


def _map_evidence(ev: dict, bm: BlockMap) -> dict:
    out = dict(ev)
    if "x" in ev:
        out["x"] = bm.primal(ev["x"]).astype(float)
    if "c_prime" in ev:
        out["c_prime"] = bm.primal(ev["c_prime"]).astype(float)
    if "directions" in ev:
        out["directions"] = [_unit(bm.primal(d).astype(float)) for d in ev["directions"]]
    if "w" in ev:
        w = bm.dual(ev["w"])
        # weak feasibility wants a unit w, strong infeasibility keeps w.c = -1
        out["w"] = _unit(w) if "x" in ev else w
    if "fra_witnesses" in ev:
        out["fra_witnesses"] = [_unit(bm.dual(d)) for d in ev["fra_witnesses"]]
    return out


def _unit(v: np.ndarray) -> np.ndarray:
    return v / float(np.linalg.norm(v))


def condition_number(gens: np.ndarray) -> float:
    """2-norm condition number of the span generators (1 for an empty span)."""
    if gens.size == 0:
        return 1.0
    s = np.linalg.svd(np.asarray(gens, dtype=float), compute_uv=False)
    return float(s[0] / s[-1]) if s[-1] > 0 else math.inf


def generate(status, m: int = 2, dims=None, seed: int | None = 0, rotate: bool = True,
             condition_cap: float = 1e6, max_tries: int = 100, check: bool = True) -> PlantedInstance:
    """Instance with planted status ``status`` and ``m`` Lorentz blocks.

    ``dims`` defaults to ``3`` per block; weakly infeasible chains need every
    block of dimension at least 3, the other statuses at least 2.  With
    ``rotate=False`` (or ``seed=None``) no block rotation is applied, so the
    weakly infeasible instance with ``m = 2`` is ``{(t,t,s) x (s,s,1)}``.
    With ``check`` the planted evidence is verified before the instance is
    returned; a draw whose evidence fails is discarded.
    """
    status = Status.parse(status) if isinstance(status, str) else status
    if status not in _PLANTERS:
        raise ValueError(f"cannot plant status {status}")
    if m < 1:
        raise ValueError("need at least one Lorentz block")
    dims = tuple(int(d) for d in (dims or (DEFAULT_DIM,) * m))
    if len(dims) != m:
        raise ValueError("dims must list one dimension per block")
    lo = 3 if status is Status.WEAKLY_INFEASIBLE else 2
    if min(dims) < lo:
        raise ValueError(f"blocks need dimension at least {lo} for {status.value}")
    rng = np.random.default_rng(seed)
    for _ in range(max_tries):
        gens, c, ev = _PLANTERS[status](dims, rng)
        bm = BlockMap.random(dims, rng) if rotate and seed is not None else BlockMap.identity(dims)
        gens_r = np.array([bm.primal(g) for g in gens], dtype=np.int64).reshape(len(gens), sum(dims))
        c_r = bm.primal(c).astype(np.int64)
        # drop dependent generators, keep the integer rows as supplied
        if len(gens_r):
            keep = []
            for i in range(len(gens_r)):
                if np.linalg.matrix_rank(gens_r[keep + [i]].astype(float)) == len(keep) + 1:
                    keep.append(i)
            gens_r = gens_r[keep]
        if condition_number(gens_r) > condition_cap:
            continue
        K = ExtendedCone.socs(*dims)
        aff = AffineSet.from_span(c_r.astype(float), gens_r.astype(float))
        evidence = _map_evidence(ev, bm)
        if check:
            report = verify(K, aff, StatusCertificate(status, evidence))
            if not report.passed:
                log.info("planted evidence rejected: %s", report.summary())
                continue
        meta = {"planted_status": status.value, "m": m, "dims": list(dims), "seed": seed, "rotated": bool(rotate)}
        return PlantedInstance(Instance(K, aff, None, meta), status, evidence, m, dims, seed)
    raise RuntimeError(f"no verified instance under condition cap {condition_cap:g} after {max_tries} tries")
