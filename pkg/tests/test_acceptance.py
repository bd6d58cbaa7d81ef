"""Acceptance suite: each test asserts one criterion at its stated tolerance
and prints one PASS line (run with `pytest tests/test_acceptance.py -v -s`)."""

import math
import time

import numpy as np
import pytest

from neckpinch.curvature import riemann_oracle, sectional_curvatures
from neckpinch.flow import (
    FlowConfig,
    evolve,
    homogeneous_ode_oracle,
)
from neckpinch.grid import PeriodicGrid, metric_state
from neckpinch.monitors import (
    DERIV_BOUND_A,
    DERIV_BOUND_B,
    DERIV_BOUND_C,
    concavity_check,
    constants,
    k0i_evolution_residual,
    run_monitors,
    tolerance,
    type1_classifier,
)
from neckpinch.presets import get_preset, sphere

from conftest import make_trajectory


def _report(criterion: int, message: str) -> None:
    print(f"\nACCEPTANCE {criterion}: PASS - {message}")


def _timed_run(preset_name, n, cfg):
    state = get_preset(preset_name).build(PeriodicGrid(n))
    start = time.perf_counter()
    traj, report = evolve(state, cfg)
    elapsed = time.perf_counter() - start
    return traj, report, elapsed


@pytest.fixture(scope="module")
def sphere_run_64():
    state = sphere(2.0).build(PeriodicGrid(64))
    start = time.perf_counter()
    traj, report = evolve(state, FlowConfig(cfl_safety=0.05, a_min_stop=1e-2))
    return traj, report, time.perf_counter() - start


@pytest.fixture(scope="module")
def fig_a_256():
    return _timed_run("fig-a", 256, FlowConfig())


@pytest.fixture(scope="module")
def fig_b_128():
    return _timed_run("fig-b", 128, FlowConfig(monitor_stride=2))


@pytest.fixture(scope="module")
def fig_c_128():
    return _timed_run("fig-c", 128, FlowConfig(monitor_stride=2))


@pytest.fixture(scope="module")
def mild_128():
    return _timed_run("mild", 128, FlowConfig())


def test_criterion_1_shrinking_sphere_exactness(sphere_run_64):
    traj, report, elapsed = sphere_run_64
    assert traj.stop_reason == "a_min_reached"
    ts = traj.ts
    am2 = traj.series("a_min") ** 2
    rel = np.abs(am2 - (4.0 - 4.0 * ts)) / (4.0 - 4.0 * ts)
    assert np.max(rel) <= 1e-6
    assert report is not None
    assert abs(report.t_estimate - 1.0) <= 1e-4
    assert elapsed <= 10.0
    _report(
        1,
        f"sphere(2) n=64: max rel err {np.max(rel):.2e} <= 1e-6, "
        f"|T-1| = {abs(report.t_estimate - 1.0):.2e} <= 1e-4, {elapsed:.1f}s <= 10s",
    )


def test_criterion_2_curvature_oracle_equivalence():
    start = time.perf_counter()
    worst_order = math.inf
    for name in ("fig-a", "fig-b", "fig-c"):
        preset = get_preset(name)
        errs = []
        for n in (32, 64, 128):
            state = preset.build(PeriodicGrid(n))
            cf = sectional_curvatures(state)
            orc = riemann_oracle(state)
            errs.append(
                max(
                    float(np.max(np.abs(a.values - b.values)))
                    for a, b in zip(cf.sectional(), orc.sectional())
                )
            )
        for e0, e1 in zip(errs, errs[1:]):
            worst_order = min(worst_order, math.log2(e0 / e1))
    elapsed = time.perf_counter() - start
    assert worst_order >= 3.5
    assert elapsed <= 5.0
    _report(
        2,
        f"closed form vs oracle on fig-a/b/c: min measured order "
        f"{worst_order:.2f} >= 3.5, {elapsed:.2f}s <= 5s",
    )


def test_criterion_3_pde_ode_equivalence():
    start = time.perf_counter()
    sol = homogeneous_ode_oracle(1.0, 2.0, 3.0, t_end=9.0 / 4.0)
    t_sing = float(sol.t[-1])
    assert min(sol.y[:, -1]) < 1e-6  # the oracle ran into the blow-down
    t_cut = 0.9 * t_sing

    state = metric_state(PeriodicGrid(32), 0.0, 1.0, 1.0, 2.0, 3.0)
    traj, _ = evolve(state, FlowConfig(cfl_safety=0.05, t_max=t_cut))
    ts = traj.ts
    ode = sol.sol(ts)
    worst = 0.0
    for series, row in (("a_min", 0), ("b_min", 1), ("c_max", 2)):
        rel = np.abs(traj.series(series) - ode[row]) / ode[row]
        worst = max(worst, float(np.max(rel)))
    elapsed = time.perf_counter() - start
    assert worst <= 1e-6
    assert elapsed <= 30.0
    _report(
        3,
        f"z-constant (1,2,3): PDE vs ODE oracle max rel err {worst:.2e} <= 1e-6 "
        f"up to 0.9 T_sing = {t_cut:.4f}, {elapsed:.1f}s <= 30s",
    )


def test_criterion_4_theorem_bound_suite(fig_a_256):
    traj, report, elapsed = fig_a_256
    assert traj.stop_reason == "a_min_reached"
    assert report is not None
    reports = run_monitors(
        traj,
        report,
        names=("ordering", "eccentricity", "ratio", "amin_bound", "cmax_bound"),
    )
    for name, rep in reports.items():
        assert rep.passed is True, f"{name}: {rep.notes}"

    tol = tolerance(traj)
    a0_sq = traj.samples[0].a_min ** 2
    c0_sq = traj.samples[0].c_max ** 2
    assert report.t_estimate >= a0_sq / 4.0 - tol
    assert report.t_estimate <= c0_sq / 4.0 + tol
    assert traj.samples[-1].t <= c0_sq / 4.0 + tol
    assert elapsed <= 300.0
    _report(
        4,
        f"fig-a n=256: ordering/eccentricity/ratio/amin/cmax pass, "
        f"{a0_sq / 4:.4f} <= T = {report.t_estimate:.4f} <= {c0_sq / 4:.4f}, "
        f"{elapsed:.0f}s <= 300s",
    )


def test_criterion_5_type1_classification(fig_a_256, mild_128):
    for label, (traj, report, _) in (("fig-a", fig_a_256), ("mild", mild_128)):
        rep = type1_classifier(traj, report)
        assert rep.classification == "TypeI", f"{label}: {rep}"
        assert abs(rep.trend_slope) <= 0.1, f"{label}: slope {rep.trend_slope}"

    u = np.logspace(0, -4, 400)
    synthetic = make_trajectory(1.0 - u, 2.0 * np.sqrt(u), rm_max=u**-1.5)
    from neckpinch.flow import estimate_singular_time

    rep2 = type1_classifier(synthetic, estimate_singular_time(synthetic))
    assert rep2.classification == "Inconclusive"
    _report(
        5,
        "fig-a and mild classify TypeI (|slope| <= 0.1); synthetic Type II "
        "series classifies Inconclusive",
    )


def test_criterion_6_lower_bound_regime(mild_128):
    traj, report, _ = mild_128
    assert report is not None
    lam = traj.samples[0].ratio_max
    assert lam == pytest.approx(1.2, abs=1e-12)
    assert traj.samples[0].s_min >= 0.0

    d_lower = constants(1.2).d_lower
    tol = tolerance(traj)
    ts = traj.ts
    margin = traj.series("a_min") ** 2 - d_lower * (report.t_estimate - ts)
    assert float(np.min(margin)) >= -tol
    _report(
        6,
        f"mild (lam=1.2, min S0 >= 0): a_min^2 >= D(T-t) with D = {d_lower:.4f}, "
        f"min margin {float(np.min(margin)):.2e} >= -{tol:.1e}",
    )


def test_criterion_7_concavity_evidence(fig_a_256, fig_b_128, fig_c_128):
    for label, (traj, _, _) in (
        ("fig-a", fig_a_256),
        ("fig-b", fig_b_128),
        ("fig-c", fig_c_128),
    ):
        rep = concavity_check(traj)
        assert rep.passed is True, f"{label}: {rep.notes}"
        # qualitative pinch shape: the concave arc ends at the threshold
        # (a_min may rise briefly first: at a deep neck the (b^2-c^2)^2
        # reaction term can exceed a^4, which concavity permits)
        a_min = traj.series("a_min")
        assert a_min[-1] < 0.01 * a_min[0], label
    _report(
        7,
        "a_min^2 concave (second differences <= tol) down to the pinch on "
        "fig-a, fig-b, fig-c",
    )


def test_criterion_8_evolution_residual_refinement():
    def residual(n, dt):
        state = get_preset("fig-a").build(PeriodicGrid(n))
        cfg = FlowConfig(fixed_dt=dt, t_max=2.4e-3, snapshot_stride=1)
        traj, _ = evolve(state, cfg)
        value, _, _ = k0i_evolution_residual(traj, "k01")
        return value

    coarse = residual(64, 2e-4)
    fine = residual(128, 1e-4)
    order = math.log2(coarse / fine)
    assert order >= 1.0
    _report(
        8,
        f"K01 residual {coarse:.3e} -> {fine:.3e} under (dt, dz) halving: "
        f"measured order {order:.2f} >= 1",
    )


def test_criterion_9_constants_unit_checks():
    c = constants(1.0)
    assert c.lambda0 == pytest.approx(3.0, abs=1e-14)
    assert c.d_lower == pytest.approx(2.0, abs=1e-14)
    assert c.frak_c == pytest.approx(math.sqrt(28.0 / 3.0), rel=1e-14)
    assert abs(DERIV_BOUND_A - 280.0 * math.sqrt(3.0) / 9.0) <= 1e-12
    assert abs(DERIV_BOUND_B - 4.0 * math.sqrt(57.0) / 3.0) <= 1e-12
    assert abs(DERIV_BOUND_C - 10.0 * math.sqrt(93.0) / 9.0) <= 1e-12
    _report(
        9,
        "constants(1) = (3, 2, sqrt(28/3)); derivative-bound constants match "
        "280sqrt(3)/9, 4sqrt(57)/3, 10sqrt(93)/9 to 12 digits",
    )
