"""Numerical tolerances and logging setup shared by every module."""

from __future__ import annotations

import dataclasses
import logging
import os
from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    """Tolerance record threaded through the solver, classifier and verifier.

    Membership decisions use the relative band ``eps_feas * (1 + ||x||)``.
    ``pattern_tol`` is the threshold used when reading a face pattern
    (zero / boundary / interior blocks) off an interior-point solution
    before it is polished; it has to sit well above solver accuracy and
    well below the scale of genuinely nonzero blocks.
    """

    eps_feas: float = 1e-8
    eps_cert: float = 1e-7
    eps_lin: float = 1e-9
    eps_rank: float = 1e-12
    eps_orth: float = 1e-10
    eps_gap: float = 1e-7
    delta_dir: float = 1e-6
    pattern_tol: float = 1e-5
    max_iter: int = 200
    radius: float = 1e6
    solver_tol: float = 1e-10

    def replace(self, **changes) -> "Tolerances":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "Tolerances":
        known = {f.name for f in dataclasses.fields(cls)}
        return cls(**{k: v for k, v in data.items() if k in known})


DEFAULT = Tolerances()

LOG_ENV = "CONE_PATHOLOGY_LOG"


def configure_logging(level: str | int | None = None) -> None:
    """Set the package log level from ``level`` or ``$CONE_PATHOLOGY_LOG``."""
    if level is None:
        level = os.environ.get(LOG_ENV, "WARNING")
    if isinstance(level, str):
        level = level.upper()
        level = int(level) if level.isdigit() else getattr(logging, level, logging.WARNING)
    logger = logging.getLogger("cone_pathology")
    if not logger.handlers:
        handler = logging.StreamHandler()
        handler.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
        logger.addHandler(handler)
    logger.setLevel(level)
