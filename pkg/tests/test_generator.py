from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cone_pathology.classifier import StatusCertificate, verify
from cone_pathology.generator import BlockMap, cayley_rotation, chain_data, generate
from cone_pathology.status import Status


def test_golden_instance():
    p = generate("wi", m=2, rotate=False)
    assert np.array_equal(p.aff.exact_generators(), [[1, 1, 0, 0, 0, 0], [0, 0, 1, 1, 1, 0]])
    assert np.array_equal(p.aff.point, [0, 0, 0, 0, 0, 1])


def test_chain_data_shape():
    gens, c = chain_data((3, 4, 3))
    assert gens.shape == (3, 10)
    # block i of the chain is (s_i, s_i, s_{i+1}, 0..); the last one has the constant 1
    assert c.tolist() == [0, 0, 0, 0, 0, 0, 0, 0, 0, 1]
    assert gens[1].tolist() == [0, 0, 1, 1, 1, 0, 0, 0, 0, 0]


@given(st.integers(1, 6), st.integers(0, 10 ** 6))
def test_cayley_rotation_is_exactly_orthogonal(k, seed):
    Q, D = cayley_rotation(k, np.random.default_rng(seed))
    assert Q.dtype.kind == "i" and D > 0
    # Q Q^T = D^2 I in integer arithmetic
    QQ = [[sum(Fraction(int(Q[i, t])) * int(Q[j, t]) for t in range(k)) for j in range(k)] for i in range(k)]
    assert all(QQ[i][j] == (D * D if i == j else 0) for i in range(k) for j in range(k))


@given(st.integers(0, 10 ** 6))
def test_block_map_keeps_pairings(seed):
    rng = np.random.default_rng(seed)
    bm = BlockMap.random((3, 4), rng)
    x, w = rng.standard_normal(7), rng.standard_normal(7)
    assert np.isclose(bm.primal(x) @ bm.dual(w), x @ w)


@settings(max_examples=25)
@given(st.sampled_from(["sf", "wf", "si", "wi"]), st.integers(1, 4), st.integers(0, 10 ** 5))
def test_planted_evidence_is_sound(status, m, seed):
    p = generate(status, m=m, seed=seed)
    assert p.K.lorentz_count() == m
    gens = p.aff.exact_generators()
    # integer data
    assert np.array_equal(gens, np.round(gens)) and np.array_equal(p.aff.point, np.round(p.aff.point))
    assert verify(p.K, p.aff, StatusCertificate(p.status, p.evidence)).passed


def test_same_seed_same_instance():
    a, b = generate("wf", m=3, seed=11), generate("wf", m=3, seed=11)
    assert np.array_equal(a.aff.exact_generators(), b.aff.exact_generators())
    assert np.array_equal(a.aff.point, b.aff.point)


def test_argument_checks():
    with pytest.raises(ValueError):
        generate("wi", m=2, dims=(2, 3))
    with pytest.raises(ValueError):
        generate("wf", m=2, dims=(3,))
    with pytest.raises(ValueError):
        generate("undecided", m=2)
    assert generate("strongly_feasible", m=1).status is Status.STRONGLY_FEASIBLE
