import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ncfa.algebra import (DirectSumAlgebra, NestSubalgebra, PatternSubalgebra, TracialState,
                          descriptor_from_json, descriptor_to_json, support_projection, zcalc_check)
from ncfa.errors import DimensionMismatch, NotInAlgebra

seeds = st.integers(0, 2 ** 32 - 1)


def test_trace_examples():
    m2 = DirectSumAlgebra((2,))
    assert TracialState.uniform(m2)(np.diag([2.0, 4.0])) == pytest.approx(3.0)
    alg = DirectSumAlgebra((2, 2))
    tau = TracialState(alg, (1.0, 0.0))
    a, b = np.array([[1.0, 5.0], [2.0, 3.0]]), np.diag([100.0, 7.0])
    assert tau(alg.assemble([a, b])) == pytest.approx(2.0)
    with pytest.raises(DimensionMismatch):
        tau(np.eye(3))


def test_trace_rejects_off_block_entries():
    alg = DirectSumAlgebra((1, 1))
    with pytest.raises(NotInAlgebra):
        alg.check(np.ones((2, 2)))


def test_support_projection_examples():
    red = support_projection(TracialState(DirectSumAlgebra((2, 3)), (0.4, 0.6)))
    assert np.allclose(red.z, np.eye(5))
    red = support_projection(TracialState(DirectSumAlgebra((2, 3)), (1.0, 0.0)))
    assert np.allclose(red.z, np.diag([1, 1, 0, 0, 0]))
    assert red.reduced_algebra.block_sizes == (2,)
    one = support_projection(TracialState(DirectSumAlgebra((3,)), (1.0,)))
    assert np.allclose(one.z, np.eye(3))


def test_zcalc_examples(rng):
    assert zcalc_check(np.e * np.eye(2), np.eye(2), np.log, (0.0, np.inf), True) == pytest.approx(0.0, abs=1e-14)
    z = np.diag([1.0, 1.0, 0.0])
    assert zcalc_check(np.diag([1.0, 4.0, 9.0]), z, lambda s: s ** 0.3, (0.0, np.inf)) <= 1e-10
    g = DirectSumAlgebra((2, 1)).random_element(rng)
    assert zcalc_check(g @ g.conj().T + np.eye(3), z, np.sqrt, (0.0, np.inf)) <= 1e-10


def test_membership_examples():
    A = NestSubalgebra(DirectSumAlgebra((2,)), [(1, 1)])
    assert A.contains(np.array([[0.0, 1.0], [0.0, 0.0]]))
    m = A.membership(np.array([[0.0, 0.0], [1.0, 0.0]]))
    assert not m.member and m.diagnostic == pytest.approx(1.0)


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_nest_and_diagonal_properties(seed):
    rng = np.random.default_rng(seed)
    blocks = tuple(int(b) for b in rng.integers(1, 4, int(rng.integers(1, 4))))
    alg = DirectSumAlgebra(blocks)
    from ncfa.algebra import random_flag
    nest = NestSubalgebra(alg, [random_flag(b, rng) for b in blocks])
    a, b = nest.random_element(rng), nest.random_element(rng)
    assert nest.contains(a @ b)
    D = nest.diagonal()
    assert D.contains(a * D.mask)
    d = D.random_element(rng)
    assert nest.contains(d) and nest.contains(d.conj().T)
    x = alg.random_element(rng)
    assert D.contains(x) == (nest.contains(x) and nest.contains(x.conj().T))


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_trace_and_support_properties(seed):
    rng = np.random.default_rng(seed)
    alg = DirectSumAlgebra((2, 1, 3))
    w = rng.dirichlet(np.ones(3))
    w[int(rng.integers(3))] = 0.0
    tau = TracialState(alg, tuple(w / w.sum()))
    x, y = alg.random_element(rng), alg.random_element(rng)
    assert abs(tau(x @ y) - tau(y @ x)) <= 1e-12
    z = support_projection(tau).z
    assert np.allclose(z @ z, z) and np.allclose(z @ x, x @ z)
    assert abs(tau(z @ x) - tau(x)) <= 1e-12 and tau(z) == pytest.approx(1.0)


def test_pattern_basis_round_trip(rng):
    nest = NestSubalgebra(DirectSumAlgebra((3,)), [(1, 2)])
    a = nest.random_element(rng)
    assert np.allclose(nest.element(nest.coords(a)), a)
    assert isinstance(nest, PatternSubalgebra)


def test_descriptor_round_trip():
    alg = DirectSumAlgebra((2, 3))
    nest = NestSubalgebra(alg, [(2,), (1, 2)])
    d = descriptor_from_json(descriptor_to_json(TracialState(alg, (0.5, 0.5)), nest))
    assert d.algebra.block_sizes == (2, 3)
    assert [tuple(f) for f in d.nest.flags] == [(2,), (1, 2)]
