"""Acceptance criteria at full size; each test reports one PASS/FAIL line.

The planted corpora are built once per module and shared: the recovery
run (500 instances per status), the direction-bound run (500 weakly
infeasible chains with up to six blocks) and the polyhedral sweep are also
the instances on which the sequence-length bound, status preservation and
certificate checks are evaluated.
"""

from __future__ import annotations

import collections
import itertools
import math
import time

import numpy as np
import pytest

from cone_pathology import DEFAULT, ExtendedCone, Status, StatusCertificate, classify, generate, verify
from cone_pathology.attainment import (DualFormProblem, direct_solve, near_optimal_path, regularize,
                                       solve_regularized)
from cone_pathology.cli import main as cli_main
from cone_pathology.cone_algebra import Lorentz, contains, in_relative_interior, margin
from cone_pathology.conic_solver import OracleStatus
from cone_pathology.io import write_certificate, write_instance
from cone_pathology.linear_geometry import AffineSet, LinearSubspace, affine_from_equations
from cone_pathology.relaxation import lorentz_recession
from cone_pathology.wi_sequence import WitnessSubspace, generate_sequence
from oracles import brute_lorentz_distance, consistent, orthant_status

pytestmark = pytest.mark.acceptance

N_RECOVERY = 500
N_DIRECTIONS = 500
N_POLY = 1000
N_TAMPER = 50          # certificates per status put through the tampering run
STATUSES = (Status.STRONGLY_FEASIBLE, Status.WEAKLY_FEASIBLE, Status.WEAKLY_INFEASIBLE,
            Status.STRONGLY_INFEASIBLE)


def line(n: int, ok: bool, text: str) -> str:
    return f"criterion {n}: {'PASS' if ok else 'FAIL'}  {text}"


def golden():
    K = ExtendedCone.socs(3, 3)
    aff = AffineSet.from_span([0, 0, 0, 0, 0, 1], [[1, 1, 0, 0, 0, 0], [0, 0, 1, 1, 1, 0]])
    return K, aff


def _dims(status: Status, m: int, rng) -> tuple[int, ...]:
    lo = 3 if status is Status.WEAKLY_INFEASIBLE else 2
    return tuple(int(d) for d in rng.integers(lo, 5, size=m))


class Run:
    """One classified instance with what the criteria need to know about it."""

    def __init__(self, K, aff, cert, planted=None, m=None, seconds=0.0):
        self.K, self.aff, self.cert, self.planted = K, aff, cert, planted
        self.m = m if m is not None else K.lorentz_count()
        self.seconds = seconds


def _classify(K, aff, planted=None, m=None) -> Run:
    t0 = time.perf_counter()
    cert = classify(K, aff)
    return Run(K, aff, cert, planted, m, time.perf_counter() - t0)


@pytest.fixture(scope="module")
def recovery_runs():
    runs = []
    for status in STATUSES:
        for seed in range(N_RECOVERY):
            m = 1 + seed % 4
            dims = _dims(status, m, np.random.default_rng(10_000 + seed))
            p = generate(status, m=m, dims=dims, seed=seed)
            runs.append(_classify(p.K, p.aff, p.status, m))
    return runs


@pytest.fixture(scope="module")
def direction_runs():
    runs = []
    for i in range(N_DIRECTIONS):
        m = 1 + i % 6
        p = generate(Status.WEAKLY_INFEASIBLE, m=m, seed=20_000 + i)
        runs.append(_classify(p.K, p.aff, p.status, m))
    return runs


def _poly_instances():
    rng = np.random.default_rng(7)
    out = []
    # every single equation a.x = b with n <= 2 and entries in {-2..2}, then random systems up to n = 6
    for n in (1, 2):
        for row in itertools.product(range(-2, 3), repeat=n):
            for b in range(-2, 3):
                if consistent([list(row)], [b]):
                    out.append((np.array([row]), np.array([b])))
    while len(out) < N_POLY:
        n = int(rng.integers(1, 7))
        k = int(rng.integers(1, n + 1))
        A = rng.integers(-2, 3, size=(k, n))
        b = rng.integers(-2, 3, size=k)
        if consistent(A.tolist(), b.tolist()):
            out.append((A, b))
    return out


@pytest.fixture(scope="module")
def poly_runs():
    runs = []
    for A, b in _poly_instances():
        K = ExtendedCone.socs(*([1] * A.shape[1]))
        run = _classify(K, affine_from_equations(A, b))
        run.oracle = orthant_status(A.tolist(), b.tolist())
        runs.append(run)
    return runs


# ---------------------------------------------------------------------------


def test_criterion_1_golden_example(report):
    K, aff = golden()
    t0 = time.perf_counter()
    cert = classify(K, aff)
    ev = cert.evidence
    wit = WitnessSubspace(tuple(np.asarray(d) for d in ev["directions"]), np.asarray(ev["c_prime"]),
                          tuple(ev["H1"]), tuple(ev["H2"]))
    pts = generate_sequence(K, aff, wit, (1e-2, 1e-4, 1e-6))
    seconds = time.perf_counter() - t0
    dirs = [np.asarray(d) / np.linalg.norm(d) for d in ev["directions"]]
    want = [np.array([1, 1, 0, 0, 0, 0]) / math.sqrt(2), np.array([0, 0, 1, 1, 1, 0]) / math.sqrt(3)]
    gamma = cert.trace["gamma"]
    ok = (cert.status is Status.WEAKLY_INFEASIBLE and gamma == 3 and len(dirs) == 2
          and all(abs(abs(float(d @ w)) - 1.0) <= 1e-9 for d, w in zip(dirs, want))
          and wit.k == 2 and pts[-1].distance <= 1e-6 and seconds < 1.0)
    report(line(1, ok, f"golden: {cert.status.value}, gamma = {gamma}, {wit.k} directions, "
                       f"final distance {pts[-1].distance:.2e}, {seconds:.2f} s"))
    assert ok


def test_criterion_2_direction_bound(report, direction_runs):
    decided = [r for r in direction_runs if r.cert.status is Status.WEAKLY_INFEASIBLE]
    wrong = [r for r in direction_runs if r.cert.status.decided and r.cert.status is not Status.WEAKLY_INFEASIBLE]
    bad = []
    for r in decided:
        dirs = r.cert.evidence["directions"]
        k = len(dirs)
        dim = LinearSubspace.span(list(dirs), r.K.total_dim).dim
        if k > r.m or dim > r.m:
            bad.append((r.m, k, dim))
    per_m = collections.Counter(r.m for r in decided)
    total_m = collections.Counter(r.m for r in direction_runs)
    rates = ", ".join(f"m={m}: {per_m[m]}/{total_m[m]}" for m in sorted(total_m))
    ok = not bad and not wrong and len(decided) > 0
    report(line(2, ok, f"{len(decided)}/{len(direction_runs)} decided weakly infeasible "
                       f"({rates}); k <= m and dim(L'+c') <= m violated {len(bad)} times"))
    assert ok


def test_criterion_3_sequence_length(report, recovery_runs, direction_runs, poly_runs):
    runs = recovery_runs + direction_runs + poly_runs
    bad = [r for r in runs if "gamma" in r.cert.trace and r.cert.trace["gamma"] > r.K.lorentz_count() + 1]
    missing = [r for r in runs if "gamma" not in r.cert.trace]
    ok = not bad and not missing
    report(line(3, ok, f"gamma <= m + 1 on {len(runs)} instances: {len(bad)} violations, "
                       f"{len(missing)} without a sequence"))
    assert ok


def test_criterion_4_planted_recovery(report, recovery_runs):
    parts, ok = [], True
    for status in STATUSES:
        runs = [r for r in recovery_runs if r.planted is status]
        hit = sum(r.cert.status is status for r in runs)
        wrong = sum(r.cert.status.decided and r.cert.status is not status for r in runs)
        rate = hit / len(runs)
        ok = ok and rate >= 0.99 and wrong == 0
        parts.append(f"{status.short} {hit}/{len(runs)} ({wrong} wrong)")
    report(line(4, ok, "planted status recovered: " + ", ".join(parts)))
    assert ok


CORRESPONDENCE = {
    "strongly_feasible": {Status.STRONGLY_FEASIBLE},
    "strongly_infeasible": {Status.STRONGLY_INFEASIBLE},
    "weakly_feasible": {Status.WEAKLY_FEASIBLE, Status.WEAKLY_INFEASIBLE},
}


def test_criterion_5_status_preservation(report, recovery_runs, direction_runs, poly_runs):
    runs = [r for r in recovery_runs + direction_runs + poly_runs if r.cert.status.decided]
    bad = [r for r in runs if r.cert.status not in CORRESPONDENCE.get(r.cert.trace["last_problem"]["status"], ())]
    table = collections.Counter((r.cert.trace["last_problem"]["status"], r.cert.status.value) for r in runs)
    ok = not bad
    report(line(5, ok, f"{len(runs)} decided instances, {len(bad)} break the correspondence; "
                       + ", ".join(f"{a}->{b}: {n}" for (a, b), n in sorted(table.items()))))
    assert ok


def test_criterion_6_projection_oracle(report):
    rng = np.random.default_rng(6)
    worst = 0.0
    for n in (3, 5):
        for _ in range(100):
            x = 2.0 * rng.standard_normal(n)
            closed = float(np.linalg.norm(x - Lorentz(n).project(x)))
            worst = max(worst, abs(closed - brute_lorentz_distance(x, 10_000)))
    ok = worst <= 1e-4
    report(line(6, ok, f"closed-form vs brute-force distance on 200 points in R^3, R^5: max error {worst:.2e}"))
    assert ok


def _boundary_point(rng, n):
    v = rng.standard_normal(n - 1)
    return np.concatenate([[1.0], v / np.linalg.norm(v)]) * rng.uniform(0.5, 2.0)


def test_criterion_7_recession_lemma(report):
    rng = np.random.default_rng(7)
    pos = neg = 0
    pos_ok = neg_ok = 0
    while pos < 200 or neg < 200:
        n = int(rng.integers(2, 6))
        a = _boundary_point(rng, n)
        x = 2.0 * rng.standard_normal(n)
        s = float(x @ np.concatenate([[a[0]], -a[1:]]))
        if s > 0.01 and pos < 200:
            pos += 1
            t = lorentz_recession(x, a)
            pos_ok += t is not None and in_relative_interior(ExtendedCone((Lorentz(n),)), x + t * a)
        elif s < -0.01 and neg < 200:
            neg += 1
            neg_ok += lorentz_recession(x, a, t_max=1e9) is None
    ok = pos_ok == 200 and neg_ok == 200
    report(line(7, ok, f"x.a' > 0.01: finite t found {pos_ok}/200; x.a' < -0.01 with a on the boundary: "
                       f"no t <= 1e9 in {neg_ok}/200"))
    assert ok


def test_criterion_8_attainment(report):
    K = ExtendedCone.socs(3)
    prob = DualFormProblem(np.array([[-1.0, 0.0], [0.0, -1.0], [0.0, 0.0]]), [-1.0, 1.0], [0.0, 0.0, 1.0], K)
    direct = direct_solve(prob)
    reg = regularize(prob)
    value, y_star = solve_regularized(reg)
    y_hat = np.array([2.0, 0.0])
    path = near_optimal_path(reg, y_star, (0.9, 0.99, 0.999), y_hat=y_hat)
    scale = float(prob.b @ y_hat)
    errs = [abs(p.value - (1 - p.beta) * scale) for p in path]
    margins = [p.margin for p in path]
    # the direct value tends to 0 while the iterates grow: |value| shrinks, |y| grows,
    # and |value| * |y| stays bounded along the tolerance sweep
    sweep = direct.info["probe"]
    vals = [abs(v) for _, v, _ in sweep]
    norms = [n for _, _, n in sweep]
    tends_to_zero = (all(v2 <= v1 * (1 + 1e-9) for v1, v2 in zip(vals, vals[1:]))
                     and all(n2 >= n1 * (1 - 1e-9) for n1, n2 in zip(norms, norms[1:]))
                     and vals[-1] < vals[0] and norms[-1] > norms[0]
                     and max(v * n for v, n in zip(vals, norms)) <= 10.0
                     and all(v <= 0 for _, v, _ in sweep))
    ok = (direct.status is OracleStatus.DIVERGING and tends_to_zero
          and abs(value) <= 1e-8 and np.linalg.norm(y_star) <= 1e-6
          and max(errs) <= 1e-8 and min(margins) >= -1e-8
          and all(contains(K, prob.slack(p.y), 1e-8) for p in path))
    report(line(8, ok, f"direct solve {direct.status.name} (values "
                       + ", ".join(f"{v:.1e}" for _, v, _ in sweep) + " at |y| "
                       + ", ".join(f"{n:.1e}" for _, _, n in sweep) + "); regularised value "
                       f"{value:.1e} at |y*| = {np.linalg.norm(y_star):.1e}; path values "
                       + ", ".join(f"{p.value:.6f}" for p in path)
                       + f" (max error {max(errs):.1e}, min margin {min(margins):.1e})"))
    assert ok


def test_criterion_9_polyhedral_oracle(report, poly_runs):
    agree = sum(r.cert.status.short.lower() == r.oracle for r in poly_runs)
    table = collections.Counter((r.oracle, r.cert.status.short.lower()) for r in poly_runs)
    ok = agree == len(poly_runs) and len(poly_runs) >= N_POLY
    report(line(9, ok, f"exact LP oracle agrees on {agree}/{len(poly_runs)} polyhedral instances "
                       f"({dict(sorted(table.items()))})"))
    assert ok


# ---------------------------------------------------------------------------
# criterion 10


def _swap_blocks(K: ExtendedCone, v: np.ndarray):
    """Copies of ``v`` with two equal-size Lorentz blocks exchanged.

    Only swaps that move ``v`` by more than ten times the verification slack
    count; a swap of two nearly equal blocks leaves the certificate unchanged
    at the tolerance it is checked to.
    """
    idx = K.lorentz_indices()
    for i, j in itertools.combinations(idx, 2):
        if K[i].dim != K[j].dim:
            continue
        w = v.copy()
        si, sj = K.slice(i), K.slice(j)
        w[si], w[sj] = v[sj], v[si]
        if np.linalg.norm(w - v) > 100 * DEFAULT.eps_feas * np.linalg.norm(v):
            yield w
        return


def tamperings(K: ExtendedCone, cert: StatusCertificate):
    """Certificates that differ from ``cert`` in one field: sign flips, block swaps, status swaps."""
    ev = cert.evidence
    for key in ("x", "w", "c_prime"):
        if key in ev:
            v = np.asarray(ev[key], dtype=float)
            if np.any(v):
                yield f"{key} sign", StatusCertificate(cert.status, {**ev, key: -v}, tolerances=cert.tolerances)
            for w in _swap_blocks(K, v):
                yield f"{key} swap", StatusCertificate(cert.status, {**ev, key: w}, tolerances=cert.tolerances)
    for key in ("directions", "fra_witnesses"):
        for i, v in enumerate(ev.get(key, [])):
            v = np.asarray(v, dtype=float)
            lst = list(ev[key])
            lst[i] = -v
            yield f"{key}[{i}] sign", StatusCertificate(cert.status, {**ev, key: lst}, tolerances=cert.tolerances)
            for w in _swap_blocks(K, v):
                lst = list(ev[key])
                lst[i] = w
                yield f"{key}[{i}] swap", StatusCertificate(cert.status, {**ev, key: lst},
                                                            tolerances=cert.tolerances)
    for key in ("H1", "H2"):
        for i, h in enumerate(ev.get(key, [])):
            if h:
                moved = tuple(sorted({(b + 1) % len(K) for b in h}))
                if moved != tuple(h):
                    lst = list(ev[key])
                    lst[i] = moved
                    yield f"{key}[{i}] swap", StatusCertificate(cert.status, {**ev, key: lst},
                                                                tolerances=cert.tolerances)
    if "infeasible_at" in ev:
        yield "infeasible_at sign", StatusCertificate(cert.status, {**ev, "infeasible_at": -ev["infeasible_at"]},
                                                      tolerances=cert.tolerances)
    for other in STATUSES:
        if other is not cert.status:
            yield f"status {other.short}", StatusCertificate(other, ev, tolerances=cert.tolerances)


def test_criterion_10_closed_loop(report, recovery_runs, tmp_path):
    emitted = [r for r in recovery_runs if r.cert.status.decided]
    # every emitted certificate, through its file form
    failed = [r for r in emitted
              if not verify(r.K, r.aff, StatusCertificate.from_dict(r.cert.to_dict())).passed]
    # the command itself on a few of them
    cli_fail = 0
    for status in STATUSES:
        r = next(r for r in emitted if r.cert.status is status)
        inst, cert = tmp_path / f"{status.short}.json", tmp_path / f"{status.short}.cert.json"
        from cone_pathology.io import Instance
        write_instance(inst, Instance(r.K, r.aff))
        write_certificate(cert, r.cert)
        cli_fail += cli_main(["verify", str(inst), str(cert)]) != 0
    accepted, total = [], 0
    for status in STATUSES:
        sample = [r for r in emitted if r.cert.status is status][:N_TAMPER]
        for r in sample:
            for name, bad in tamperings(r.K, r.cert):
                total += 1
                if verify(r.K, r.aff, bad).passed:
                    accepted.append((status.short, r.m, name))
    ok = not failed and cli_fail == 0 and not accepted and total > 0
    report(line(10, ok, f"{len(emitted) - len(failed)}/{len(emitted)} certificates verify after a file round "
                        f"trip, {4 - cli_fail}/4 via the verify command; {len(accepted)}/{total} tamperings "
                        f"accepted" + (f" e.g. {accepted[:3]}" if accepted else "")))
    assert ok
