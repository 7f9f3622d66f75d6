import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ncfa import gleason as g
from ncfa import suites
from ncfa.errors import DomainMismatch, NotStrictContraction

seeds = st.integers(0, 2 ** 32 - 1)
LN3 = 1.0986122886681098
F16 = g.FunctionDomain(16)


def test_mobius_scalar_example():
    assert g.mobius_map(0.5, 0.25)[0, 0] == pytest.approx(2.0 / 3.0, rel=1e-14)


def test_distance_examples():
    assert g.hyperbolic_distance(0.5, -0.5) == pytest.approx(LN3, rel=1e-12)
    assert g.hyperbolic_distance(0.0, 0.5) == pytest.approx(np.arctanh(0.5), rel=1e-12)
    with pytest.raises(NotStrictContraction):
        g.hyperbolic_distance(1.0, 0.0)


def test_mobius_matrix_identities(rng):
    x = g.random_strict_contraction(3, rng, 0.9)
    assert np.allclose(g.mobius_map(x, -x), 0, atol=1e-12)
    assert np.allclose(g.mobius_map(np.zeros((3, 3)), x), x)


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_mobius_invariance_and_metric(seed):
    rng = np.random.default_rng(seed)
    w, x, y = (g.random_strict_contraction(2, rng, 0.9) for _ in range(3))
    d = g.hyperbolic_distance(x, y)
    assert g.hyperbolic_distance(g.mobius_map(w, x), g.mobius_map(w, y)) == pytest.approx(d, abs=1e-8)
    assert g.hyperbolic_distance(y, x) == pytest.approx(d, abs=1e-10)
    z = g.random_strict_contraction(2, rng, 0.9)
    assert g.hyperbolic_distance(x, z) <= d + g.hyperbolic_distance(y, z) + 1e-8


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_schwarz_pick(seed):
    rng = np.random.default_rng(seed)
    h = g.random_holomorphic_map(2, rng)
    x, y = g.random_strict_contraction(2, rng, 0.9), g.random_strict_contraction(2, rng, 0.9)
    assert g.schwarz_pick_margin(h, x, y) >= -1e-8


def test_schwarz_pick_examples(rng):
    x, y = g.random_strict_contraction(2, rng, 0.8), g.random_strict_contraction(2, rng, 0.8)
    w = g.random_strict_contraction(2, rng, 0.8)
    assert g.schwarz_pick_margin(lambda t: g.mobius_map(w, t), x, y) == pytest.approx(0.0, abs=1e-9)
    assert g.schwarz_pick_margin(lambda t: 0.5 * t, x, y) > 0
    assert g.schwarz_pick_margin(lambda t: t, x, y) == 0.0


def test_divergence_sequence():
    seq = suites.divergence_sequence(300)
    assert np.all(np.diff(seq) > 0)
    # closed form rho(0.5, 1 - 1/n) = ln((2n - 1) / 3) / 2
    n = np.arange(2, 301)
    assert np.allclose(seq, 0.5 * np.log((2 * n - 1) / 3.0), atol=1e-12)
    assert suites.divergence_first_above(5.0) == 33041
    assert np.all(g.harrt_divergence([0.3] * 5, [0.3] * 5) == 0)


def test_boundary_estimate_forms():
    b = g.boundary_estimate_check(0.0, 0.5)
    assert b.lhs == pytest.approx(0.75) and b.stated_rhs == pytest.approx(0.25)
    assert not b.stated_holds and b.corrected_holds


def test_corner_pair_separates():
    dom, (p1, p2) = g.corner_characters()
    gap = g.norm_gap(p1, p2)
    assert gap.value == pytest.approx(2.0, abs=1e-6)
    kn = g.kernel_norm(p1, p2)
    assert kn.value >= 1 - 1e-6
    assert g.norm_gap(p1, p1).value == 0.0
    assert g.kernel_norm(p1, p1).value == 0.0
    curve = g.rho_curve(p1, p2, (0.9, 0.99, 0.999), rng=np.random.default_rng(0))
    assert np.all(np.diff(curve) >= g.RHO_DIVERGENCE_STEP)
    h = g.harnack_falsifier(p1, p2)
    assert not h.certified and h.counterwitness is not None


def test_nearby_evaluations_are_close():
    a, b = g.evaluation_character(F16, 0.0), g.evaluation_character(F16, 0.01)
    gap = g.norm_gap(a, b, trials=8, ascent_steps=40)
    # exact disk-algebra value of ||delta_0 - delta_eps||
    eps = 0.01
    exact = 2 * (1 - np.sqrt(1 - eps ** 2)) / eps
    assert exact * np.cos(np.pi * 16 / 4096) - 1e-6 <= gap.value <= exact + 1e-12
    assert g.kernel_norm(a, b, trials=8, ascent_steps=40).value < 1


def test_identical_pair_verdict():
    _, (p1, _) = g.corner_characters()
    v = g.part_verdict(p1, p1, g.PartConfig(trials=4, ascent_steps=10))
    assert v.verdict == g.SAME_PART and v.harnack == {"c": 1.0, "d": 1.0}
    assert v.to_json() == g.part_verdict(p1, p1, g.PartConfig(trials=4, ascent_steps=10)).to_json()


def test_poisson_pair_same_part():
    a, b = g.evaluation_character(F16, 0.0), g.evaluation_character(F16, 0.3)
    v = g.part_verdict(a, b, g.PartConfig(trials=8, ascent_steps=40, harnack_trials=200))
    assert v.verdict == g.SAME_PART and v.consistent


def test_poisson_harnack_constants():
    h = suites.poisson_harnack(0.5, N=64, trials=400)
    assert h.certified
    # Fejer-bump ceiling for degree 64 and the exact continuous value 1/3
    assert 1 / 3 - 0.02 <= h.c <= 1 / 3 + 0.02 and 1 / 3 - 0.02 <= h.d <= 1 / 3 + 0.02


def test_c_grid_snaps_down():
    a, b = g.evaluation_character(F16, 0.0), g.evaluation_character(F16, 0.5)
    h = g.harnack_falsifier(a, b, c_grid=[0.1, 0.2, 0.3, 0.5], trials=100)
    assert h.c in (0.1, 0.2, 0.3) and h.d in (0.1, 0.2, 0.3)


def test_domain_mismatch():
    _, (p1, _) = g.corner_characters()
    with pytest.raises(DomainMismatch):
        g.norm_gap(p1, g.evaluation_character(F16, 0.0))


def test_function_domain_norm_is_sup_norm():
    c = np.zeros(F16.dim, dtype=complex)
    c[0], c[1] = 1.0, 1.0
    # certified upper bound, at most sec(pi N / G) above the true value
    assert 2.0 <= F16.norm(c) <= 2.0 / np.cos(np.pi * 16 / 4096) + 1e-9
    assert 1.0 <= F16.norm(F16.one()) <= 1.0 / np.cos(np.pi * 16 / 4096) + 1e-12
