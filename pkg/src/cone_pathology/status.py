"""The four feasibility statuses of ``x in K ∩ (L + c)`` plus the undecided outcome."""

from __future__ import annotations

import enum


class Status(enum.Enum):
    STRONGLY_FEASIBLE = "strongly_feasible"
    WEAKLY_FEASIBLE = "weakly_feasible"
    WEAKLY_INFEASIBLE = "weakly_infeasible"
    STRONGLY_INFEASIBLE = "strongly_infeasible"
    UNDECIDED = "undecided"

    @property
    def decided(self) -> bool:
        return self is not Status.UNDECIDED

    @property
    def weak(self) -> bool:
        return self in (Status.WEAKLY_FEASIBLE, Status.WEAKLY_INFEASIBLE)

    @classmethod
    def parse(cls, text: str) -> "Status":
        key = text.strip().lower().replace("-", "_").replace(" ", "_")
        aliases = {"sf": "strongly_feasible", "wf": "weakly_feasible",
                   "wi": "weakly_infeasible", "si": "strongly_infeasible"}
        return cls(aliases.get(key, key))

    @property
    def short(self) -> str:
        return {"strongly_feasible": "SF", "weakly_feasible": "WF", "weakly_infeasible": "WI",
                "strongly_infeasible": "SI", "undecided": "UD"}[self.value]
