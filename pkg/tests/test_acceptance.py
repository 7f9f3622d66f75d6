"""Acceptance criteria 1-8, one test each, at the stated tolerances."""
import time

import numpy as np
import pytest

from ncfa import cli, gleason, suites

pytestmark = pytest.mark.acceptance


def _summary(checks):
    return "; ".join(f"{c.name}: {c.status} ({float(c.residual):.3g})" for c in checks)


def _ok(checks):
    return all(c.status == suites.PASS for c in checks)


def test_criterion_1_fk_properties(record_criterion):
    ctx = suites.Context("acceptance-1", seed=1)
    t0 = time.perf_counter()
    checks = [f(ctx.rng(i), 200) for i, f in enumerate(suites.FK_PROPERTIES)]
    elapsed = time.perf_counter() - t0
    # the instance cycle covers n = 5 and n = 6 with faithful and non-faithful weights
    sizes = {suites.fk_config(i)[0].n for i in range(len(suites.FK_CONFIGS))}
    faithful = {suites.fk_config(i)[1].faithful for i in range(len(suites.FK_CONFIGS))}
    ok = _ok(checks) and len(checks) == 9 and elapsed < 60 and sizes == {5, 6} and faithful == {True, False}
    record_criterion(1, "FK determinant, nine properties x 200 instances", ok, f"{elapsed:.1f}s; " + _summary(checks))
    assert ok, _summary(checks)


def test_criterion_2_ball_jensen(record_criterion):
    ctx = suites.Context("acceptance-2", seed=2)
    checks = [suites.ball_jensen_battery(ctx.rng(0), 500), suites.disk_jensen_battery(ctx.rng(1), 100)]
    nonfaithful = checks[0].details["non_faithful_instances"]
    ok = _ok(checks) and nonfaithful > 0
    record_criterion(2, "ball-Jensen and disk Jensen equalities", ok,
                     f"non-faithful instances {nonfaithful}; " + _summary(checks))
    assert ok, _summary(checks)


def test_criterion_3_balayage(record_criterion):
    ctx = suites.Context("acceptance-3", seed=3)
    checks = [suites.balayage_battery(ctx.rng(0), 20, 4096), suites.unit_log_battery(8192),
              suites.fk_brown_moments(ctx.rng(1), 200)]
    ok = _ok(checks)
    record_criterion(3, "balayage pipeline and Brown moments", ok, _summary(checks))
    assert ok, _summary(checks)


def test_criterion_4_bis_battery(record_criterion):
    ctx = suites.Context("acceptance-4", seed=4)
    checks = suites.bis_battery(ctx.rng(0), trials=1000, seeds=20)
    ok = _ok(checks)
    record_criterion(4, "module-map battery", ok, _summary(checks))
    assert ok, _summary(checks)


def test_criterion_5_jordan_fixture(record_criterion):
    ctx = suites.Context("acceptance-5", seed=5)
    checks = suites.jordan_fixture_checks(ctx.rng(0)) + [suites.lfix_battery(ctx.rng(1), 50)]
    wit = next(c for c in checks if "-E14" in c.name).witness
    expect = np.zeros((4, 4))
    expect[0, 3] = -1.0
    ok = _ok(checks) and np.allclose(wit, expect)
    record_criterion(5, "Jordan fixture and lfix configurations", ok, _summary(checks))
    assert ok, _summary(checks)


def test_criterion_6_gleason_geometry(record_criterion):
    ctx = suites.Context("acceptance-6", seed=6)
    checks = [suites.mobius_invariance(ctx.rng(0), 200), suites.schwarz_pick_battery(ctx.rng(1), 500)]
    seq = suites.divergence_sequence(300)
    checks.append(suites.check("divergence sequence increasing and > 5 by n = 300",
                               bool(np.all(np.diff(seq) > 0) and seq[-1] > 5), float(seq[-1])))
    cv = suites.corner_verdict(gleason.PartConfig(seed=6))
    checks.append(suites.check("corner pair DIFFERENT_PART, kernel witness >= 1 - 1e-6",
                               cv.verdict == gleason.DIFFERENT_PART and cv.criteria["kernel_norm"] >= 1 - 1e-6,
                               cv.criteria["kernel_norm"]))
    _, (p1, _) = gleason.corner_characters()
    iv = gleason.part_verdict(p1, p1, gleason.PartConfig(seed=6))
    checks.append(suites.check("identical pair SAME_PART, c = d = 1",
                               iv.verdict == gleason.SAME_PART and iv.harnack == {"c": 1.0, "d": 1.0}, 0.0))
    h = suites.poisson_harnack(0.5, N=64, trials=400, seed=6)
    oracle = ((1 - 0.5) / (1 + 0.5)) ** 2
    err = abs(h.c * h.d - oracle) / oracle
    checks.append(suites.check("Poisson pair Harnack c d within 10%", h.certified and err <= 0.1, err))
    ok = _ok(checks)
    record_criterion(6, "Gleason geometry", ok, _summary(checks))
    assert ok, _summary(checks)


def test_criterion_7_wermer_hankel(record_criterion):
    checks = [suites.wermer_checks(0.5, 64)] + suites.hankel_profiles()
    checks = [c for c in checks if c.status != suites.INFO]
    ok = _ok(checks)
    record_criterion(7, "Wermer element and Hankel profiles", ok, _summary(checks))
    assert ok, _summary(checks)


def test_criterion_8_determinism(record_criterion):
    first, _ = cli.execute(cli.RunConfig("all", seed=8, jobs=4))
    second, _ = cli.execute(cli.RunConfig("all", seed=8, jobs=1))
    third, _ = cli.execute(cli.RunConfig("hankel", seed=8))
    fourth, _ = cli.execute(cli.RunConfig("hankel", seed=8))
    ok = first == second and third == fourth and len(first) > 0
    record_criterion(8, "byte-identical reports", ok, f"{len(first)} bytes for all suites")
    assert ok
