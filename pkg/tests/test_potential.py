import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ncfa.algebra import DirectSumAlgebra, TracialState
from ncfa.errors import AtomOnOrOutsideCircle, PreconditionViolated
from ncfa.fk import AtomicMeasure
from ncfa.potential import (CircleMeasure, balayage_to_circle, jensen_via_potentials, log_potential, moments,
                            uniform_circle, unit_log_integral)

seeds = st.integers(0, 2 ** 32 - 1)


def test_moment_examples():
    assert np.all(moments(AtomicMeasure([0.0], [1.0]), 5) == 0)
    assert np.abs(moments(uniform_circle(1024), 8)).max() <= 1e-13
    m = moments(AtomicMeasure([0.5, -0.5], [0.5, 0.5]), 6)
    assert np.allclose(m, [0, 0.25, 0, 0.0625, 0, 0.015625])


def test_potential_examples():
    assert log_potential(AtomicMeasure([0.0], [1.0]), np.e) == pytest.approx(-1.0)
    assert log_potential(uniform_circle(8192), 2.0) == pytest.approx(-np.log(2.0), abs=1e-12)
    assert log_potential(uniform_circle(8192), 0.0) == pytest.approx(0.0, abs=1e-15)
    assert log_potential(AtomicMeasure([0.3], [1.0]), 0.3) == np.inf


def test_unit_log_integral_examples():
    assert unit_log_integral(0.5) == pytest.approx(0.0, abs=1e-12)
    assert unit_log_integral(2.0) == pytest.approx(1.3862943611198906, rel=1e-12)
    assert unit_log_integral(1.0) == pytest.approx(0.0, abs=1e-3)


def test_balayage_examples():
    d = balayage_to_circle(AtomicMeasure([0.0], [1.0]), 256)
    assert np.allclose(d.density, 1.0)
    with pytest.raises(AtomOnOrOutsideCircle):
        balayage_to_circle(AtomicMeasure([1.0], [1.0]))


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_balayage_preserves_moments_and_exterior_potential(seed):
    rng = np.random.default_rng(seed)
    k = int(rng.integers(1, 6))
    atoms = 0.9 * np.sqrt(rng.random(k)) * np.exp(2j * np.pi * rng.random(k))
    mu = AtomicMeasure(atoms, rng.dirichlet(np.ones(k)))
    nu = balayage_to_circle(mu, 4096)
    assert np.abs(moments(nu, 20) - moments(mu, 20)).max() <= 1e-7
    assert nu.total_mass == pytest.approx(1.0, abs=1e-12)
    z = 1.5 * np.exp(2j * np.pi * rng.random())
    assert log_potential(nu, z) == pytest.approx(log_potential(mu, z), abs=1e-6)


def test_circle_measure_json_round_trip():
    nu = uniform_circle(16).plus_point_masses([0.1], [0.25])
    back = CircleMeasure.from_json(nu.to_json())
    assert np.array_equal(back.density, nu.density) and np.array_equal(back.pm_theta, nu.pm_theta)


def test_jensen_pipeline_examples(rng):
    tau = TracialState.uniform(DirectSumAlgebra((4,)))
    x = np.triu(rng.standard_normal((4, 4)), 1)
    r = jensen_via_potentials(tau, x)
    assert r.ok and r.det == pytest.approx(1.0)
    S = np.roll(np.eye(5), 1, axis=0)
    r = jensen_via_potentials(TracialState.uniform(DirectSumAlgebra((5,))), S, m_max=4)
    assert r.ok and r.det == pytest.approx(2 ** 0.2, rel=1e-10)
    with pytest.raises(PreconditionViolated):
        jensen_via_potentials(tau, np.eye(4) * 0.5)


def test_even_cyclic_shift_has_atom_at_minus_one():
    S = np.roll(np.eye(6), 1, axis=0)
    r = jensen_via_potentials(TracialState.uniform(DirectSumAlgebra((6,))), S, m_max=5)
    assert r.det == pytest.approx(0.0, abs=1e-12) and r.det_from_brown == 0.0
