import numpy as np

from ncfa import suites
from ncfa.algebra import DirectSumAlgebra, NestSubalgebra
from ncfa.expectations import DCharacter
from ncfa.jordan import (counterexample_fixture, fixture_contractivity, is_hom, is_jordan_hom,
                         is_star_closed, jordan_triple_residual, random_star_config, shear_twist,
                         square_zero_check, unit)
from ncfa.maps import LinearMapOnAlgebra

FX = counterexample_fixture()


def test_fixture_acts_as_defined(rng):
    for _ in range(20):
        al, xa, xb, be = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        a = FX.element(al, xa, xb, be)
        assert np.allclose(FX.P(a), al * np.eye(4) + be * unit(4, 1, 4))


def test_fixture_is_jordan_but_not_hom():
    assert is_jordan_hom(FX.P).ok
    h = is_hom(FX.P)
    assert not h.ok
    assert np.allclose(FX.P(FX.J1 @ FX.J2), -unit(4, 1, 4))
    assert np.allclose(FX.P(FX.J1) @ FX.P(FX.J2), 0)
    assert jordan_triple_residual(FX.P) <= 1e-12


def test_fixture_module_structure(rng):
    assert FX.P.bimodule_residual() <= 1e-12
    assert FX.P.idempotent_residual() <= 1e-12
    assert fixture_contractivity(FX, 300, rng) <= 1e-12
    assert not is_star_closed(FX.B)


def test_square_zero_examples(rng):
    assert square_zero_check(FX.P, FX.J1, FX.J2) == 0.0
    assert np.allclose(FX.P(FX.J1 @ FX.J2) @ FX.P(FX.J1 @ FX.J2), 0)
    assert square_zero_check(FX.P, 0 * FX.J1, FX.J2) == 0.0
    nest = NestSubalgebra(DirectSumAlgebra((4,)), [(1, 2, 1)])
    phi = DCharacter(nest)
    T = phi.as_linear_map()
    assert square_zero_check(T, phi.random_kernel_element(rng), nest.random_element(rng)) <= 1e-12


def test_compression_identity_and_twist():
    nest = NestSubalgebra(DirectSumAlgebra((2,)), [(1, 1)])
    T = DCharacter(nest).as_linear_map()
    assert is_jordan_hom(T).ok and is_hom(T).ok
    ident = LinearMapOnAlgebra.from_function(nest, lambda e: e, d_basis=nest.basis())
    assert is_hom(ident).ok
    tw = is_jordan_hom(shear_twist(nest))
    assert not tw.ok and tw.residual >= 0.1


def test_lfix_small_battery():
    c = suites.lfix_battery(np.random.default_rng(11), configs=8)
    assert c.status == suites.PASS, c.to_dict()


def test_random_star_config_has_star_closed_range(rng):
    for _ in range(5):
        cfg = random_star_config(rng)
        from ncfa.maps import MatrixSubspace
        assert is_star_closed(MatrixSubspace(cfg.d_basis))
