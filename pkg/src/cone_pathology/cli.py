"""Command-line interface.

    cone-pathology classify inst.json [more.json ...] [-o DIR] [--jobs N]
    cone-pathology sequence inst.json [--eps 1e-2,1e-4,1e-6]
    cone-pathology regularize dual.json [--betas 0.9,0.99,0.999]
    cone-pathology verify inst.json inst.cert.json
    cone-pathology generate wi --m 3 --seed 7 -o inst.json [--evidence ev.json]
    cone-pathology project 1 2 0.5 [--instance inst.json]

Exit codes: 0 decided / passed, 1 verification failed or precondition not
met, 2 input or output error, 3 undecided.  ``CONE_PATHOLOGY_LOG`` sets the
log level (default WARNING).
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from .attainment import (AlphaSearchFail, NotStronglyFeasible, Unbounded, direct_solve, near_optimal_path,
                         regularize, solve_regularized)
from .classifier import StatusCertificate, classify, verify
from .cone_algebra import ExtendedCone, Lorentz, project
from .config import DEFAULT, Tolerances, configure_logging
from .conic_solver import Undecided
from .generator import generate
from .io import (InstanceError, dumps, read_certificate, read_instance, write_atomic,
                 write_certificate, write_instance)
from .status import Status
from .wi_sequence import DEFAULT_TARGETS, RefinementFailed, ScheduleStall, WitnessSubspace, generate_sequence

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_IO = 2
EXIT_UNDECIDED = 3


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.replace(" ", "").split(",") if v]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def _ints(text: str) -> list[int]:
    try:
        return [int(v) for v in text.replace(" ", "").split(",") if v]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def _tolerances(args) -> Tolerances:
    changes = {}
    if args.eps_feas is not None:
        changes["eps_feas"] = args.eps_feas
    if args.eps_cert is not None:
        changes["eps_cert"] = args.eps_cert
    if args.max_iter is not None:
        changes["max_iter"] = args.max_iter
    return DEFAULT.replace(**changes)


def _emit(args, record: dict, lines: list[str]) -> None:
    if args.json:
        sys.stdout.write(dumps(record))
    else:
        for line in lines:
            print(line)


def _cert_path(path: Path, outdir: Path | None) -> Path:
    name = (path.name[:-5] if path.name.endswith(".json") else path.name) + ".cert.json"
    return (outdir or path.parent) / name


# ---------------------------------------------------------------------------
# classify


def _classify_file(path: str, outdir: str | None, tol: dict) -> dict:
    """Worker: classify one file and write its certificate; never raises."""
    p = Path(path)
    try:
        inst = read_instance(p)
        if inst.K is None or inst.aff is None:
            raise InstanceError(f"{p}: no cone / affine set to classify")
        tolerances = Tolerances.from_dict(tol)
        cert = classify(inst.K, inst.aff, tolerances)
        out = _cert_path(p, Path(outdir) if outdir else None)
        write_certificate(out, cert)
    except (OSError, InstanceError, json.JSONDecodeError) as exc:
        return {"path": str(p), "error": str(exc)}
    return {"path": str(p), "status": cert.status.value, "certificate": str(out),
            "gamma": cert.trace.get("gamma"), "diagnostics": cert.diagnostics}


def cmd_classify(args) -> int:
    tol = _tolerances(args).to_dict()
    if args.out_dir:
        Path(args.out_dir).mkdir(parents=True, exist_ok=True)
    if args.jobs > 1 and len(args.paths) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_classify_file, args.paths, [args.out_dir] * len(args.paths),
                                    [tol] * len(args.paths)))
    else:
        results = [_classify_file(p, args.out_dir, tol) for p in args.paths]
    lines = []
    for r in results:
        if "error" in r:
            lines.append(f"{r['path']}: error: {r['error']}")
        else:
            extra = f" ({'; '.join(r['diagnostics'])})" if r["diagnostics"] else ""
            lines.append(f"{r['path']}: {r['status']} -> {r['certificate']}{extra}")
    _emit(args, {"results": results}, lines)
    if any("error" in r for r in results):
        return EXIT_IO
    if any(r["status"] == Status.UNDECIDED.value for r in results):
        return EXIT_UNDECIDED
    return EXIT_OK


# ---------------------------------------------------------------------------
# sequence


def cmd_sequence(args) -> int:
    tol = _tolerances(args)
    inst = read_instance(args.path)
    if args.cert:
        cert = read_certificate(args.cert)
        report = verify(inst.K, inst.aff, cert, tol, targets=())
        if not report.passed:
            print(report.summary(), file=sys.stderr)
            return EXIT_FAIL
    else:
        cert = classify(inst.K, inst.aff, tol, targets=())
    if cert.status is Status.UNDECIDED:
        print("undecided: " + "; ".join(cert.diagnostics), file=sys.stderr)
        return EXIT_UNDECIDED
    if cert.status is not Status.WEAKLY_INFEASIBLE:
        print(f"instance is {cert.status.value}, not weakly infeasible", file=sys.stderr)
        return EXIT_FAIL
    ev = cert.evidence
    wit = WitnessSubspace(tuple(np.asarray(d, dtype=float) for d in ev["directions"]),
                          np.asarray(ev["c_prime"], dtype=float),
                          tuple(tuple(h) for h in ev["H1"]), tuple(tuple(h) for h in ev["H2"]))
    targets = sorted(args.eps, reverse=True) if args.eps else list(DEFAULT_TARGETS)
    try:
        pts = generate_sequence(inst.K, inst.aff, wit, targets)
    except (ScheduleStall, RefinementFailed) as exc:
        print(f"sequence failed: {exc}", file=sys.stderr)
        return EXIT_UNDECIDED
    lines = [f"directions: {wit.k}   dim(L' + c') = {wit.dim}   m = {inst.K.lorentz_count()}",
             f"{'target':>10} {'distance':>12} {'log10|u|':>10} {'t':>10}"]
    lines += [f"{p.target:>10.1e} {p.distance:>12.3e} {p.log10_norm:>10.2f} {p.t:>10.3g}" for p in pts]
    _emit(args, {"k": wit.k, "dim": wit.dim, "points": [p.to_dict() for p in pts]}, lines)
    return EXIT_OK


# ---------------------------------------------------------------------------
# regularize


def cmd_regularize(args) -> int:
    tol = _tolerances(args)
    inst = read_instance(args.path)
    prob = inst.dual_form
    if prob is None:
        raise InstanceError(f"{args.path}: no dual-form problem (keys A, b, c, cone)")
    direct = direct_solve(prob, tol)
    try:
        reg = regularize(prob, tol)
        value, y_star = solve_regularized(reg, tol)
    except NotStronglyFeasible as exc:
        print(f"not strongly feasible: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except Unbounded as exc:
        _emit(args, {"value": math.inf, "direct": direct.status.name}, [f"unbounded: {exc}"])
        return EXIT_OK
    except Undecided as exc:
        print(f"undecided: {exc}", file=sys.stderr)
        return EXIT_UNDECIDED
    y_hat = np.asarray(args.y_hat, dtype=float) if args.y_hat else None
    try:
        path = near_optimal_path(reg, y_star, args.betas, y_hat=y_hat, tol=tol)
    except (AlphaSearchFail, ValueError) as exc:
        print(f"path failed: {exc}", file=sys.stderr)
        return EXIT_UNDECIDED
    record = {"regularized": reg.to_dict(), "value": value, "y_star": y_star.tolist(),
              "direct": {"status": direct.status.name, "value": direct.value},
              "path": [p.to_dict() for p in path]}
    if args.out:
        write_atomic(args.out, dumps(record))
    lines = [f"direct solve: {direct.status.name}, value {direct.value:.6g}",
             f"relaxation length {reg.sequence.gamma}, relaxed cone {reg.K_gamma!r}",
             f"optimal value {value:.10g} attained at y* = {np.array2string(y_star, precision=6)}",
             f"{'beta':>8} {'value':>14} {'margin':>12}  alphas"]
    lines += [f"{p.beta:>8.4g} {p.value:>14.8g} {p.margin:>12.3e}  {list(p.alphas)}" for p in path]
    _emit(args, record, lines)
    return EXIT_OK


# ---------------------------------------------------------------------------
# verify, generate, project


def cmd_verify(args) -> int:
    inst = read_instance(args.instance)
    cert = read_certificate(args.certificate)
    tol = _tolerances(args) if any(v is not None for v in (args.eps_feas, args.eps_cert)) else None
    report = verify(inst.K, inst.aff, cert, tol)
    _emit(args, report.to_dict(), [report.summary()])
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_generate(args) -> int:
    seed = None if args.no_rotate else args.seed
    planted = generate(args.status, m=args.m, dims=args.dims, seed=seed, rotate=not args.no_rotate,
                       condition_cap=args.condition_cap)
    write_instance(args.out, planted.instance)
    if args.evidence:
        write_certificate(args.evidence, StatusCertificate(planted.status, planted.evidence))
    _emit(args, {"instance": str(args.out), "status": planted.status.value, "m": planted.m,
                 "dims": list(planted.dims), "seed": planted.seed},
          [f"{planted.status.value} instance with m = {planted.m}, dims {list(planted.dims)} -> {args.out}"])
    return EXIT_OK


def cmd_project(args) -> int:
    x = np.asarray(args.point, dtype=float)
    if args.instance:
        K = read_instance(args.instance).K
        if K is None:
            raise InstanceError(f"{args.instance}: no cone")
    else:
        K = ExtendedCone((Lorentz(x.shape[0]),))
    p, dist = project(K, x)
    _emit(args, {"projection": p.tolist(), "distance": dist},
          [f"projection {np.array2string(p, precision=8)}", f"distance   {dist:.10g}"])
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--eps-feas", type=float, default=None, help="membership tolerance")
    common.add_argument("--eps-cert", type=float, default=None, help="certificate sign threshold")
    common.add_argument("--max-iter", type=int, default=None, help="solver iteration limit")
    common.add_argument("--seed", type=int, default=0, help="random seed (generate)")
    common.add_argument("--json", action="store_true", help="machine-readable output on stdout")

    # the shared flags go after the command name
    parser = argparse.ArgumentParser(prog="cone-pathology", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", parents=[common], help="classify instance files")
    p.add_argument("paths", nargs="+")
    p.add_argument("-o", "--out-dir", default=None, help="directory for certificates (default: beside input)")
    p.add_argument("-j", "--jobs", type=int, default=1, help="parallel workers")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("sequence", parents=[common], help="distance sequence of a weakly infeasible instance")
    p.add_argument("path")
    p.add_argument("--eps", type=_floats, default=None, help="target distances, e.g. 1e-2,1e-4")
    p.add_argument("--cert", default=None, help="use this certificate instead of classifying")
    p.set_defaults(func=cmd_sequence)

    p = sub.add_parser("regularize", parents=[common], help="attainment regularisation of a dual-form problem")
    p.add_argument("path")
    p.add_argument("--betas", type=_floats, default=[0.9, 0.99, 0.999])
    p.add_argument("--y-hat", type=_floats, default=None, help="relative-interior point of the relaxed problem")
    p.add_argument("-o", "--out", default=None)
    p.set_defaults(func=cmd_regularize)

    p = sub.add_parser("verify", parents=[common], help="check a certificate against an instance")
    p.add_argument("instance")
    p.add_argument("certificate")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("generate", parents=[common], help="planted instance with a known status")
    p.add_argument("status", help="sf, wf, wi, si or the full status name")
    p.add_argument("--m", type=int, default=2, help="number of Lorentz blocks")
    p.add_argument("--dims", type=_ints, default=None, help="block dimensions, e.g. 3,4")
    p.add_argument("--no-rotate", action="store_true", help="skip the random block rotations")
    p.add_argument("--condition-cap", type=float, default=1e6)
    p.add_argument("-o", "--out", required=True)
    p.add_argument("--evidence", default=None, help="also write the planted evidence as a certificate")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("project", parents=[common], help="Euclidean projection onto a cone")
    p.add_argument("point", type=float, nargs="+")
    p.add_argument("--instance", default=None, help="project onto this instance's cone (default: Lorentz)")
    p.set_defaults(func=cmd_project)
    return parser


def main(argv=None) -> int:
    configure_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (OSError, InstanceError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
