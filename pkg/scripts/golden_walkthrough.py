"""Step through the two-block weakly infeasible instance {(t, t, s) x (s, s, 1)}.

Prints the relaxation sequence, the facial reduction chain, the certificate
checks and the distance sequence along the reducing directions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from cone_pathology import (ExtendedCone, WitnessSubspace, build_maximal_sequence, classify, generate_sequence,
                            run_fra, verify)
from cone_pathology.linear_geometry import AffineSet


@dataclass
class WalkthroughConfig:
    targets: tuple[float, ...] = (1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-8, 1e-10)


def main(cfg: WalkthroughConfig = WalkthroughConfig()) -> None:
    np.set_printoptions(precision=4, suppress=True)
    K = ExtendedCone.socs(3, 3)
    aff = AffineSet.from_span([0, 0, 0, 0, 0, 1.0], [[1, 1, 0, 0, 0, 0], [0, 0, 1, 1, 1, 0]])
    print(f"cone {K!r}")

    seq = build_maximal_sequence(K, aff.L)
    print(f"\nrelaxation sequence, gamma = {seq.gamma}")
    for i, (d, Ki) in enumerate(zip(seq.directions, seq.cones[1:]), start=1):
        print(f"  a^{i} = {d.vector}  H1 = {d.interior_blocks}  H2 = {d.boundary_blocks}  ->  {Ki!r}")

    trace = run_fra(K, aff)
    print("\nfacial reduction")
    for i, d in enumerate(trace.witnesses, start=1):
        print(f"  d^{i} = {d / np.abs(d).max()}   d.c = {d @ aff.point:+.3f}")
    print(f"  outcome: {trace.outcome}")

    cert = classify(K, aff)
    rep = verify(K, aff, cert)
    print(f"\n{rep.summary()}")
    for c in rep.checks:
        print(f"  [{'ok' if c.passed else 'FAIL'}] {c.name} {c.detail}")

    ev = cert.evidence
    wit = WitnessSubspace(tuple(ev["directions"]), ev["c_prime"],
                          tuple(tuple(h) for h in ev["H1"]), tuple(tuple(h) for h in ev["H2"]))
    print(f"\ndistance sequence along {wit.k} directions")
    print(f"{'target':>10} {'distance':>12} {'log10|u|':>10} {'t':>8}")
    for p in generate_sequence(K, aff, wit, cfg.targets):
        print(f"{p.target:>10.0e} {p.distance:>12.3e} {p.log10_norm:>10.2f} {p.t:>8.3g}")


if __name__ == "__main__":
    main()
