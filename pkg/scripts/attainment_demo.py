"""Regularise sup -y1 + y2 s.t. (y1, y2, 1) in Q^3, whose value 0 is not attained.

The direct solve returns values that approach 0 only as the iterates grow;
after relaxation the value is attained, and points of the original problem
with values (1 - beta) b.y_hat are rebuilt from the relaxed maximiser.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from cone_pathology import (DualFormProblem, ExtendedCone, direct_solve, near_optimal_path, regularize,
                            solve_regularized)


@dataclass
class AttainmentConfig:
    betas: tuple[float, ...] = (0.9, 0.99, 0.999, 0.9999)
    y_hat: tuple[float, ...] = (2.0, 0.0)


def main(cfg: AttainmentConfig = AttainmentConfig()) -> None:
    K = ExtendedCone.socs(3)
    prob = DualFormProblem(np.array([[-1.0, 0.0], [0.0, -1.0], [0.0, 0.0]]), [-1.0, 1.0], [0.0, 0.0, 1.0], K)

    direct = direct_solve(prob)
    print(f"direct solve: {direct.status.name}")
    print(f"{'solver tol':>10} {'value':>12} {'|y|':>10}")
    for stol, value, norm in direct.info["probe"]:
        print(f"{stol:>10.0e} {value:>12.3e} {norm:>10.3e}")

    reg = regularize(prob)
    value, y_star = solve_regularized(reg)
    print(f"\nrelaxed cone {reg.K_gamma!r}")
    print(f"regularised value {value:.3e} attained at y* = {y_star}")

    y_hat = np.asarray(cfg.y_hat)
    print(f"\n{'beta':>8} {'value':>12} {'closed form':>12} {'margin':>10}  y")
    for p in near_optimal_path(reg, y_star, cfg.betas, y_hat=y_hat):
        exact = (1 - p.beta) * prob.value(y_hat)
        print(f"{p.beta:>8} {p.value:>12.6f} {exact:>12.6f} {p.margin:>10.2e}  {p.y}")


if __name__ == "__main__":
    main()
