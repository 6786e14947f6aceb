"""Classify planted instances and tabulate recovered status against planted status.

    python scripts/planted_recovery.py --count 50 --m 1,2,3,4
"""

from __future__ import annotations

import argparse
import collections
import time
from dataclasses import dataclass

from cone_pathology import Status, classify, generate


@dataclass
class RecoveryConfig:
    count: int = 50                      # instances per (status, m)
    ms: tuple[int, ...] = (1, 2, 3, 4)
    seed: int = 0


def run(cfg: RecoveryConfig) -> dict:
    table: dict = collections.defaultdict(collections.Counter)
    times: dict = collections.defaultdict(list)
    for status in ("sf", "wf", "wi", "si"):
        for m in cfg.ms:
            for i in range(cfg.count):
                p = generate(status, m=m, seed=cfg.seed + i)
                t0 = time.perf_counter()
                cert = classify(p.K, p.aff)
                times[p.status].append(time.perf_counter() - t0)
                table[(p.status, m)][cert.status] += 1
    return {"table": table, "times": times}


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--count", type=int, default=RecoveryConfig.count)
    ap.add_argument("--m", default="1,2,3,4", help="comma-separated block counts")
    ap.add_argument("--seed", type=int, default=RecoveryConfig.seed)
    args = ap.parse_args()
    cfg = RecoveryConfig(args.count, tuple(int(v) for v in args.m.split(",")), args.seed)
    out = run(cfg)
    cols = [Status.STRONGLY_FEASIBLE, Status.WEAKLY_FEASIBLE, Status.WEAKLY_INFEASIBLE,
            Status.STRONGLY_INFEASIBLE, Status.UNDECIDED]
    print(f"{'planted':>8} {'m':>3} " + " ".join(f"{s.short:>5}" for s in cols))
    for (status, m), counts in sorted(out["table"].items(), key=lambda kv: (kv[0][0].value, kv[0][1])):
        print(f"{status.short:>8} {m:>3} " + " ".join(f"{counts[s]:>5}" for s in cols))
    for status, ts in out["times"].items():
        print(f"{status.short}: mean {sum(ts) / len(ts):.3f} s, max {max(ts):.3f} s")


if __name__ == "__main__":
    main()
