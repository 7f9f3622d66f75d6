import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ncfa import suites
from ncfa.algebra import DirectSumAlgebra, NestSubalgebra, TracialState
from ncfa.errors import DiskConditionViolated, NotFaithfulOnD, NotInSubalgebra, NotModuleMap, PreconditionViolated
from ncfa.expectations import (FALSIFIED, NO_VIOLATION, DCharacter, ball_jensen_check, bis_falsifier,
                               construct_expectation, eval_quadratic, expectation_uniqueness, jensen_check,
                               jensen_equality_disk, perturbed_unipotent_map, quadratic_l2_check,
                               trace_average_map, weighted_diagonal_map)
from ncfa.maps import LinearMapOnAlgebra

seeds = st.integers(0, 2 ** 32 - 1)
UT2 = NestSubalgebra(DirectSumAlgebra((2,)), [(1, 1)])
TAU2 = TracialState.uniform(UT2.algebra)


def test_character_examples():
    phi = DCharacter(UT2)
    a = np.array([[2.0, 5.0], [0.0, -1.0]])
    assert np.array_equal(phi(a), np.diag([2.0, -1.0]))
    d = np.diag([3.0, 4j])
    assert np.array_equal(phi(d), d)
    with pytest.raises(NotInSubalgebra):
        phi(np.array([[0.0, 0.0], [1.0, 0.0]]))


def test_expectation_examples(rng):
    m = np.arange(4.0).reshape(2, 2) + 1
    assert np.array_equal(construct_expectation(TAU2, UT2.diagonal())(m), np.diag([1.0, 4.0]))
    nest = NestSubalgebra(DirectSumAlgebra((2, 2)), [(1, 1), (1, 1)])
    E = construct_expectation(TracialState(nest.algebra, (0.5, 0.5)), nest.diagonal())
    x = nest.algebra.random_element(rng)
    assert np.array_equal(E(x), np.diag(np.diag(x)))
    with pytest.raises(NotFaithfulOnD):
        construct_expectation(TracialState(nest.algebra, (1.0, 0.0)), nest.diagonal())
    R = construct_expectation(TracialState(nest.algebra, (1.0, 0.0)), nest.diagonal(), reduce=True)
    assert np.array_equal(R(x), np.diag(np.r_[np.diag(x)[:2], 0, 0]))


def test_expectation_is_unique(rng):
    k, dev = expectation_uniqueness(TAU2, UT2.diagonal(), rng=rng)
    assert k == 0 and dev <= 1e-8


def test_jensen_examples():
    phi = DCharacter(UT2)
    l, r = jensen_check(TAU2, phi, np.array([[2.0, 1.0], [0.0, 3.0]]))
    assert l == pytest.approx(np.sqrt(6)) and r == pytest.approx(np.sqrt(6))
    assert jensen_check(TAU2, phi, np.eye(2)) == pytest.approx((1.0, 1.0))
    assert jensen_check(TAU2, phi, np.array([[0.0, 1.0], [0.0, 0.0]])) == (0.0, 0.0)


def test_ball_jensen_examples(rng):
    phi = DCharacter(UT2)
    assert ball_jensen_check(TAU2, phi, np.array([[0.0, 1.0], [0.0, 0.0]])) == pytest.approx(1.0)
    big = NestSubalgebra(DirectSumAlgebra((5,)), [(1,) * 5])
    x = DCharacter(big).random_kernel_element(rng)
    x *= 10.0 / np.linalg.norm(x, 2)
    assert ball_jensen_check(TracialState.uniform(big.algebra), DCharacter(big), x) == pytest.approx(1.0, abs=1e-8)
    with pytest.raises(PreconditionViolated):
        ball_jensen_check(TAU2, phi, np.array([[0.5, 1.0], [0.0, 0.0]]))


def test_disk_jensen_examples():
    phi = DCharacter(UT2)
    assert jensen_equality_disk(TAU2, phi, np.eye(2) + 0.5 * np.array([[0.0, 1.0], [0.0, 0.0]])) == \
        pytest.approx((1.0, 1.0))
    with pytest.raises(DiskConditionViolated):
        jensen_equality_disk(TAU2, phi, np.array([[2.0, 10.0], [0.0, 1.0]]))


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_character_properties(seed):
    rng = np.random.default_rng(seed)
    tau, nest = suites.random_nest_model(rng, 6, faithful=True)
    phi = DCharacter(nest)
    a, b = nest.random_element(rng), nest.random_element(rng)
    d = phi.D.random_element(rng)
    assert np.allclose(phi(a @ b), phi(a) @ phi(b), atol=1e-12)
    assert np.allclose(phi(d @ a), d @ phi(a), atol=1e-12)
    assert abs(tau(phi(a)) - tau(a)) <= 1e-12
    E = construct_expectation(tau, phi.D)
    m = nest.algebra.random_element(rng)
    assert np.linalg.eigvalsh(E(m @ m.conj().T)).min() >= -1e-12


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_ball_jensen_property(seed):
    rng = np.random.default_rng(seed)
    tau, nest = suites.random_nest_model(rng, 8)
    phi = DCharacter(nest)
    x = phi.random_kernel_element(rng)
    assert ball_jensen_check(tau, phi, x) == pytest.approx(1.0, abs=1e-8)


def test_bis_on_compression_and_constructed_maps():
    tau, nest = suites.random_nest_model(np.random.default_rng(4), 4, faithful=True)
    T = DCharacter(nest).as_linear_map()
    assert bis_falsifier(tau, T, trials=200).verdict == NO_VIOLATION
    assert quadratic_l2_check(tau, T, trials=200).verdict == NO_VIOLATION
    assert bis_falsifier(tau, trace_average_map(tau, nest), trials=200).verdict == FALSIFIED
    u = perturbed_unipotent_map(3, 0.5, np.random.default_rng(1))
    tau3 = TracialState.uniform(DirectSumAlgebra((3,)))
    assert quadratic_l2_check(tau3, u, trials=500).verdict == FALSIFIED


def test_weighted_map_reports_trace_failure():
    nest = NestSubalgebra(DirectSumAlgebra((3,)))
    T = weighted_diagonal_map(nest, [0.6, 0.3, 0.1])
    tau = TracialState.uniform(nest.algebra)
    assert T.trace_preservation_residual(tau) > 0.1


def test_non_module_map_rejected():
    junk = LinearMapOnAlgebra.from_function(UT2, lambda e: 2 * e, d_basis=UT2.basis())
    with pytest.raises(NotModuleMap):
        bis_falsifier(TAU2, junk, trials=5)


def test_quadratic_constant_and_square():
    d, a = np.diag([1.0, 2.0]), np.array([[0.0, 3.0], [0.0, 0.0]])
    assert np.allclose(eval_quadratic([2, 0, 0, 0, 0, 0, 0], d, a), 2 * np.eye(2))
    assert np.allclose(eval_quadratic([0, 0, 0, 0, 0, 0, 1], d, a), a @ a)
