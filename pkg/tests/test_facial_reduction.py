import numpy as np
import pytest

from cone_pathology.cone_algebra import ExtendedCone, in_dual, in_relative_interior
from cone_pathology.facial_reduction import InfeasibleAt, MinimalFace, run_fra
from cone_pathology.generator import generate
from cone_pathology.linear_geometry import AffineSet

GOLDEN = AffineSet.from_span([0.0, 0.0, 0.0, 0.0, 0.0, 1.0],
                             [[1.0, 1.0, 0.0, 0.0, 0.0, 0.0], [0.0, 0.0, 1.0, 1.0, 1.0, 0.0]])


def _check_chain(K, aff, trace):
    """Every witness lies in the dual of its face, is orthogonal to L and supports L + c."""
    for F, d in zip(trace.faces, trace.witnesses):
        assert in_dual(F, d, 1e-7)
        assert np.linalg.norm(aff.L.project(d)) <= 1e-7 * np.linalg.norm(d)


def test_golden_chain():
    K = ExtendedCone.socs(3, 3)
    trace = run_fra(K, GOLDEN)
    assert isinstance(trace.outcome, InfeasibleAt)
    assert trace.outcome.step == 3 and trace.outcome.value < 0
    _check_chain(K, GOLDEN, trace)
    # the two supporting witnesses have d.c = 0
    for d in trace.witnesses[:-1]:
        assert abs(d @ GOLDEN.point) <= 1e-9


def test_interior_problem_needs_no_reduction():
    K = ExtendedCone.socs(3)
    aff = AffineSet.from_span([2.0, 0.0, 0.0], [[0.0, 1.0, 0.0]])
    trace = run_fra(K, aff)
    assert isinstance(trace.outcome, MinimalFace)
    assert trace.witnesses == []


def test_weakly_feasible_reduces_to_a_ray():
    K = ExtendedCone.socs(3)
    aff = AffineSet.from_span([1.0, 1.0, 0.0], [[0.0, 0.0, 1.0]])
    trace = run_fra(K, aff)
    assert isinstance(trace.outcome, MinimalFace)
    assert len(trace.witnesses) == 1
    F, x = trace.outcome.face, trace.outcome.point
    assert in_relative_interior(F, x)
    assert np.allclose(x, [1.0, 1.0, 0.0], atol=1e-7)


@pytest.mark.parametrize("status,infeasible", [("sf", False), ("wf", False), ("si", True), ("wi", True)])
def test_outcome_matches_planted_status(status, infeasible):
    for seed in range(4):
        p = generate(status, m=2, seed=seed)
        trace = run_fra(p.K, p.aff)
        assert trace.infeasible is infeasible
        _check_chain(p.K, p.aff, trace)
        if not infeasible:
            assert in_relative_interior(trace.outcome.face, trace.outcome.point, 1e-7)
            assert p.aff.contains(trace.outcome.point, 1e-7)
        rec = trace.to_dict()
        assert len(rec["witnesses"]) == len(trace.witnesses)
