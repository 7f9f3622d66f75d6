import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ncfa.errors import DomainViolation, NonHermitian
from ncfa.matrix_core import (char_poly_residual, from_json, func_calc, general_eigenvalues, herm_eig,
                              jacobi_eigh, modulus, operator_norm, random_hermitian, random_unitary,
                              sort_eigenvalues, spectral_radius, to_json)

seeds = st.integers(0, 2 ** 32 - 1)


@pytest.mark.parametrize("method", ["lapack", "jacobi"])
def test_herm_eig_examples(method):
    e = herm_eig(np.eye(2), method=method)
    assert np.allclose(e.eigenvalues, [1, 1])
    assert np.allclose(herm_eig(np.diag([3.0, 1.0]), method=method).eigenvalues, [1, 3])
    assert np.allclose(herm_eig(np.array([[2.0, 1.0], [1.0, 2.0]]), method=method).eigenvalues, [1, 3])


def test_herm_eig_rejects_non_hermitian():
    with pytest.raises(NonHermitian):
        herm_eig(np.array([[0.0, 1.0], [0.0, 0.0]]))


@pytest.mark.parametrize("method", ["lapack", "qr"])
def test_general_eigenvalue_examples(method):
    e12 = np.array([[0.0, 1.0], [0.0, 0.0]])
    assert np.allclose(general_eigenvalues(e12, method=method), [0, 0])
    assert np.allclose(general_eigenvalues(np.array([[2.0, 1.0], [0.0, 3.0]]), method=method), [2, 3])
    ev = general_eigenvalues(np.array([[0.0, -1.0], [1.0, 0.0]]), method=method)
    assert np.allclose(ev, [-1j, 1j])


def test_sort_ignores_rounding_in_real_part():
    w = sort_eigenvalues([1j, 3e-17 - 1j])
    assert w[0].imag < 0


def test_func_calc_examples():
    h = random_hermitian(4, np.random.default_rng(1))
    assert np.allclose(func_calc(lambda t: t, h), h)
    assert np.allclose(func_calc(np.log, np.diag([np.e, np.e ** 2])), np.diag([1.0, 2.0]))
    a = np.array([[2.0, 1.0], [1.0, 2.0]])
    r = func_calc(np.sqrt, a)
    assert np.allclose(r @ r, a)
    assert np.allclose(np.linalg.eigvalsh(r), [1.0, np.sqrt(3.0)])


def test_func_calc_domain_violation():
    with pytest.raises(DomainViolation):
        func_calc(np.log, np.diag([0.0, 1.0]), domain=(0.0, np.inf), open_left=True)


def test_modulus_examples():
    u = random_unitary(3, np.random.default_rng(2))
    assert np.allclose(modulus(u), np.eye(3))
    assert np.allclose(modulus(np.diag([-2.0, 3j])), np.diag([2.0, 3.0]))
    assert np.allclose(modulus(np.array([[0.0, 1.0], [0.0, 0.0]])), np.diag([0.0, 1.0]))


def test_norm_and_radius_examples():
    e12 = np.array([[0.0, 1.0], [0.0, 0.0]])
    assert operator_norm(e12) == pytest.approx(1.0) and spectral_radius(e12) == 0.0
    d = np.diag([2.0, -3.0])
    assert operator_norm(d) == pytest.approx(3.0) and spectral_radius(d) == pytest.approx(3.0)
    m = np.array([[0.0, 2.0], [0.5, 0.0]])
    assert operator_norm(m) == pytest.approx(2.0) and spectral_radius(m) == pytest.approx(1.0)


@settings(max_examples=40, deadline=None)
@given(seeds, st.integers(1, 8))
def test_jacobi_matches_lapack(seed, n):
    h = random_hermitian(n, np.random.default_rng(seed))
    w, v = jacobi_eigh(h)
    assert np.allclose(np.sort(w), np.linalg.eigvalsh(h), atol=1e-10)
    assert np.allclose((v * w) @ v.conj().T, h, atol=1e-10)


@settings(max_examples=40, deadline=None)
@given(seeds, st.integers(2, 8))
def test_qr_eigenvalues_are_roots(seed, n):
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    ev = general_eigenvalues(a, method="qr")
    assert np.allclose(ev, general_eigenvalues(a), atol=1e-8)
    assert char_poly_residual(a, ev) < 1e-8


@settings(max_examples=40, deadline=None)
@given(seeds, st.integers(1, 6))
def test_func_calc_composition_and_modulus_invariance(seed, n):
    rng = np.random.default_rng(seed)
    h = random_hermitian(n, rng)
    assert np.allclose(func_calc(lambda t: np.exp(np.sin(t)), h), func_calc(np.exp, func_calc(np.sin, h)),
                       atol=1e-10)
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    u = random_unitary(n, rng)
    assert np.allclose(modulus(u @ a), modulus(a), atol=1e-10)


def test_gelfand_formula():
    rng = np.random.default_rng(3)
    a = rng.standard_normal((5, 5))
    g = np.linalg.norm(np.linalg.matrix_power(a, 64), 2) ** (1 / 64)
    assert g == pytest.approx(spectral_radius(a), rel=0.05)


@settings(max_examples=30, deadline=None)
@given(seeds, st.integers(1, 5), st.integers(1, 5))
def test_json_round_trip(seed, r, c):
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((r, c)) + 1j * rng.standard_normal((r, c))
    assert np.array_equal(from_json(to_json(a)), a)
