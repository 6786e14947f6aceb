"""Feasibility status of second-order cone problems ``x in K ∩ (L + c)``.

Classification into strongly / weakly feasible and weakly / strongly
infeasible with solver-free verifiable certificates, maximal relaxation
sequences, weakly infeasible distance sequences along few directions,
attainment regularisation and facial reduction.
"""

from .attainment import (DualFormProblem, RegularizedProblem, direct_solve, near_optimal_path, regularize,
                         solve_regularized)
from .classifier import StatusCertificate, VerificationReport, classify, verify
from .cone_algebra import ExtendedCone, HalfSpace, Lorentz, Ray, Subspace, contains, project
from .config import DEFAULT, Tolerances
from .conic_solver import Undecided
from .facial_reduction import run_fra
from .generator import PlantedInstance, generate
from .linear_geometry import AffineSet, LinearSubspace
from .relaxation import RelaxationSequence, build_maximal_sequence, last_problem_status
from .status import Status
from .wi_sequence import WitnessSubspace, extract_witness, generate_sequence

__version__ = "0.1.0"

__all__ = [
    "AffineSet", "DEFAULT", "DualFormProblem", "ExtendedCone", "HalfSpace", "LinearSubspace", "Lorentz",
    "PlantedInstance", "Ray", "RegularizedProblem", "RelaxationSequence", "Status", "StatusCertificate",
    "Subspace", "Tolerances", "Undecided", "VerificationReport", "WitnessSubspace", "build_maximal_sequence",
    "classify", "contains", "direct_solve", "extract_witness", "generate", "generate_sequence",
    "last_problem_status", "near_optimal_path", "project", "regularize", "run_fra", "solve_regularized",
    "verify",
]
