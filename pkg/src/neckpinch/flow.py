"""Time evolution of the metric profiles under Ricci flow.

In the arclength gauge the radii satisfy the semilinear parabolic system

    dt a = a'' + a'(b'/b + c'/c) - 2a (a^4 - (b^2-c^2)^2) / (abc)^2

(and its b, c relabelings), while the gauge factor evolves by
dt log(phi) = a''/a + b''/b + c''/c. Primes are arclength derivatives taken
by the chain rule on the fixed z-grid. Stepping is classical explicit RK4 on
(a, b, c, log phi); evolving log phi keeps the gauge positive structurally.
The time step tracks both the explicit-diffusion limit on the arclength mesh
and the reaction timescale of the shrinking minimum radius, whose square
cannot decrease faster than rate 4.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from typing import Callable

import numpy as np
from scipy.integrate import solve_ivp

from .grid import (
    STENCIL_ORDER,
    DegenerateFiberError,
    GaugeDegeneracyError,
    MetricState,
    PeriodicGrid,
    ScalarField,
    dz_values,
    metric_state,
)
from .curvature import sectional_curvatures

STOP_AMIN = "a_min_reached"
STOP_TMAX = "t_max_reached"
STOP_NONFINITE = "nonfinite_detected"

#: Attempts to halve dt after a rejected step before giving up.
MAX_STEP_HALVINGS = 20


class StepRejected(RuntimeError):
    """A step left the positive cone; the caller should halve dt and retry."""


class NoSingularityDetected(RuntimeError):
    """The minimum-radius series does not extrapolate to a finite-time zero."""


class InsufficientSamplesError(RuntimeError):
    """Too few trajectory samples in the fitting window."""


@dataclass(frozen=True)
class FlowConfig:
    cfl_safety: float = 0.2
    a_min_stop: float = 1e-3
    t_max: float = math.inf
    snapshot_stride: int = 100
    monitor_stride: int = 1
    # Explicit step override for refinement studies; None means adaptive.
    fixed_dt: float | None = None

    def __post_init__(self):
        if not 0.0 < self.cfl_safety <= 1.0:
            raise ValueError("cfl_safety must lie in (0, 1]")
        if self.a_min_stop <= 0.0:
            raise ValueError("a_min_stop must be positive")
        if self.snapshot_stride < 1 or self.monitor_stride < 1:
            raise ValueError("strides must be >= 1")
        if self.fixed_dt is not None and self.fixed_dt <= 0.0:
            raise ValueError("fixed_dt must be positive when set")


@dataclass(frozen=True)
class SummarySample:
    """Scalar reductions of one state, with the grid index attaining each."""

    t: float
    dt: float
    a_min: float
    a_min_idx: int
    b_min: float
    c_max: float
    c_max_idx: int
    ord_ba_min: float
    ord_ba_idx: int
    ord_cb_min: float
    ord_cb_idx: int
    ratio_max: float
    ratio_max_idx: int
    ecc_bc: float
    ecc_bc_idx: int
    ecc_ac: float
    ecc_ac_idx: int
    s_min: float
    s_min_idx: int
    rm_max: float
    rm_max_idx: int
    sup_ap: float
    sup_ap_idx: int
    sup_bp: float
    sup_bp_idx: int
    sup_cp: float
    sup_cp_idx: int


@dataclass
class Trajectory:
    """Recorded summaries, sparse full snapshots, and the stop condition."""

    grid: PeriodicGrid
    stencil_order: int = STENCIL_ORDER
    samples: list[SummarySample] = dc_field(default_factory=list)
    snapshots: list[MetricState] = dc_field(default_factory=list)
    stop_reason: str = ""

    def series(self, name: str) -> np.ndarray:
        return np.array([getattr(s, name) for s in self.samples])

    @property
    def ts(self) -> np.ndarray:
        return self.series("t")

    @property
    def dt_mean(self) -> float:
        dts = self.series("dt")
        dts = dts[dts > 0.0]
        return float(np.mean(dts)) if dts.size else 0.0


@dataclass(frozen=True)
class SingularityReport:
    """Linear extrapolation of a_min^2 to its root."""

    t_estimate: float
    fit_window: tuple[float, float]
    fit_residual: float
    a_min_final: float


def _flow_rhs(
    phi: np.ndarray,
    a: np.ndarray,
    b: np.ndarray,
    c: np.ndarray,
    dz: float,
    order: int,
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    if min(a.min(), b.min(), c.min()) <= 0.0 or phi.min() <= 0.0:
        raise StepRejected("profiles left the positive cone")
    ap = dz_values(a, dz, order) / phi
    bp = dz_values(b, dz, order) / phi
    cp = dz_values(c, dz, order) / phi
    app = dz_values(ap, dz, order) / phi
    bpp = dz_values(bp, dz, order) / phi
    cpp = dz_values(cp, dz, order) / phi
    denom = (a * b * c) ** 2
    da = app + ap * (bp / b + cp / c) - 2.0 * a * (a**4 - (b * b - c * c) ** 2) / denom
    db = bpp + bp * (ap / a + cp / c) - 2.0 * b * (b**4 - (a * a - c * c) ** 2) / denom
    dc = cpp + cp * (ap / a + bp / b) - 2.0 * c * (c**4 - (a * a - b * b) ** 2) / denom
    dlogphi = app / a + bpp / b + cpp / c
    out = (da, db, dc, dlogphi)
    if not all(np.all(np.isfinite(v)) for v in out):
        raise StepRejected("non-finite flow derivatives")
    return out


def time_derivatives(
    state: MetricState, order: int = STENCIL_ORDER
) -> tuple[ScalarField, ScalarField, ScalarField, ScalarField]:
    """Pointwise right-hand sides (dt a, dt b, dt c, dt log phi)."""
    da, db, dc, dlogphi = _flow_rhs(
        state.phi.values,
        state.a.values,
        state.b.values,
        state.c.values,
        state.grid.dz,
        order,
    )
    grid = state.grid
    return (
        ScalarField(grid, da),
        ScalarField(grid, db),
        ScalarField(grid, dc),
        ScalarField(grid, dlogphi),
    )


RhsFunction = Callable[[MetricState], tuple[ScalarField, ScalarField, ScalarField, ScalarField]]


def rk4_step(
    state: MetricState,
    dt: float,
    rhs: RhsFunction | None = None,
    order: int = STENCIL_ORDER,
) -> MetricState:
    """One classical RK4 step; raises StepRejected if positivity is lost.

    phi advances through exp of the accumulated log-derivative increment, so
    the gauge cannot change sign no matter the step size.
    """
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    grid = state.grid
    dz = grid.dz
    if rhs is None:
        def eval_rhs(phi, a, b, c):
            return _flow_rhs(phi, a, b, c, dz, order)
    else:
        def eval_rhs(phi, a, b, c):
            out = rhs(metric_state(grid, state.t, phi, a, b, c))
            return tuple(f.values for f in out)

    a0, b0, c0 = state.a.values, state.b.values, state.c.values
    u0 = np.log(state.phi.values)

    def stage(a, b, c, u):
        return eval_rhs(np.exp(u), a, b, c)

    try:
        k1 = stage(a0, b0, c0, u0)
        k2 = stage(*(y + 0.5 * dt * k for y, k in zip((a0, b0, c0, u0), k1)))
        k3 = stage(*(y + 0.5 * dt * k for y, k in zip((a0, b0, c0, u0), k2)))
        k4 = stage(*(y + dt * k for y, k in zip((a0, b0, c0, u0), k3)))
    except (DegenerateFiberError, GaugeDegeneracyError, FloatingPointError) as exc:
        raise StepRejected(str(exc)) from exc

    new = [
        y + dt / 6.0 * (p + 2.0 * q + 2.0 * r + s)
        for y, p, q, r, s in zip((a0, b0, c0, u0), k1, k2, k3, k4)
    ]
    a1, b1, c1, u1 = new
    if not all(np.all(np.isfinite(v)) for v in new):
        raise StepRejected("non-finite state after step")
    if min(a1.min(), b1.min(), c1.min()) <= 0.0:
        raise StepRejected("positivity lost after step")
    return metric_state(grid, state.t + dt, np.exp(u1), a1, b1, c1)


def adaptive_dt(state: MetricState, cfg: FlowConfig) -> float:
    """cfl_safety * min(explicit-diffusion limit, reaction timescale).

    The diffusion limit is (min phi*dz)^2, the squared arclength mesh width;
    the reaction limit a_min^2 / 8 resolves d(a_min^2)/dt in [-4, 0) near the
    pinch.
    """
    mesh = np.min(state.phi.values) * state.grid.dz
    a_min = float(np.min(state.a.values))
    return cfg.cfl_safety * min(mesh * mesh, a_min * a_min / 8.0)


def _eccentricity(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    return np.abs(x - y) / np.minimum(x, y)


def summarize_state(state: MetricState, dt: float, order: int = STENCIL_ORDER) -> SummarySample:
    """All scalar reductions the monitors need, taken at one state."""
    dz = state.grid.dz
    phi = state.phi.values
    a, b, c = state.a.values, state.b.values, state.c.values

    curv = sectional_curvatures(state, order)
    rm = np.sqrt(curv.rm_norm_sq.values)
    scal = curv.scal.values

    ratio = c / a
    ecc_bc = _eccentricity(b, c)
    ecc_ac = _eccentricity(a, c)
    ord_ba = b - a
    ord_cb = c - b
    sup_ap = np.abs(dz_values(a, dz, order) / phi)
    sup_bp = np.abs(dz_values(b, dz, order) / phi)
    sup_cp = np.abs(dz_values(c, dz, order) / phi)

    def amin(v):
        i = int(np.argmin(v))
        return float(v[i]), i

    def amax(v):
        i = int(np.argmax(v))
        return float(v[i]), i

    a_min, a_min_idx = amin(a)
    c_max, c_max_idx = amax(c)
    ord_ba_min, ord_ba_idx = amin(ord_ba)
    ord_cb_min, ord_cb_idx = amin(ord_cb)
    ratio_max, ratio_max_idx = amax(ratio)
    ecc_bc_max, ecc_bc_idx = amax(ecc_bc)
    ecc_ac_max, ecc_ac_idx = amax(ecc_ac)
    s_min, s_min_idx = amin(scal)
    rm_max, rm_max_idx = amax(rm)
    sup_ap_max, sup_ap_idx = amax(sup_ap)
    sup_bp_max, sup_bp_idx = amax(sup_bp)
    sup_cp_max, sup_cp_idx = amax(sup_cp)

    return SummarySample(
        t=state.t,
        dt=dt,
        a_min=a_min,
        a_min_idx=a_min_idx,
        b_min=float(np.min(b)),
        c_max=c_max,
        c_max_idx=c_max_idx,
        ord_ba_min=ord_ba_min,
        ord_ba_idx=ord_ba_idx,
        ord_cb_min=ord_cb_min,
        ord_cb_idx=ord_cb_idx,
        ratio_max=ratio_max,
        ratio_max_idx=ratio_max_idx,
        ecc_bc=ecc_bc_max,
        ecc_bc_idx=ecc_bc_idx,
        ecc_ac=ecc_ac_max,
        ecc_ac_idx=ecc_ac_idx,
        s_min=s_min,
        s_min_idx=s_min_idx,
        rm_max=rm_max,
        rm_max_idx=rm_max_idx,
        sup_ap=sup_ap_max,
        sup_ap_idx=sup_ap_idx,
        sup_bp=sup_bp_max,
        sup_bp_idx=sup_bp_idx,
        sup_cp=sup_cp_max,
        sup_cp_idx=sup_cp_idx,
    )


def evolve(
    initial: MetricState, cfg: FlowConfig
) -> tuple[Trajectory, SingularityReport | None]:
    """Step until the pinch threshold, the time cap, or loss of finiteness.

    Summaries are recorded every monitor_stride steps (plus the first and last
    state); full snapshots every snapshot_stride steps. A rejected step is
    retried with halved dt up to MAX_STEP_HALVINGS times; exhaustion stops the
    run with the last good state preserved.
    """
    traj = Trajectory(grid=initial.grid)
    state = initial
    traj.samples.append(summarize_state(state, 0.0))
    traj.snapshots.append(state)

    step = 0
    last_dt = 0.0
    stop = None
    while True:
        a_min = float(np.min(state.a.values))
        if a_min < cfg.a_min_stop:
            stop = STOP_AMIN
            break
        if state.t >= cfg.t_max:
            stop = STOP_TMAX
            break

        dt = cfg.fixed_dt if cfg.fixed_dt is not None else adaptive_dt(state, cfg)
        dt = min(dt, cfg.t_max - state.t)
        advanced = None
        for _ in range(MAX_STEP_HALVINGS + 1):
            try:
                advanced = rk4_step(state, dt)
                break
            except StepRejected:
                dt *= 0.5
        if advanced is None:
            stop = STOP_NONFINITE
            break

        state = advanced
        step += 1
        last_dt = dt
        if step % cfg.monitor_stride == 0:
            traj.samples.append(summarize_state(state, dt))
        if step % cfg.snapshot_stride == 0:
            traj.snapshots.append(state)

    if traj.samples[-1].t < state.t:
        traj.samples.append(summarize_state(state, last_dt))
    if traj.snapshots[-1].t < state.t:
        traj.snapshots.append(state)
    traj.stop_reason = stop

    try:
        report = estimate_singular_time(traj)
    except (NoSingularityDetected, InsufficientSamplesError):
        report = None
    return traj, report


def estimate_singular_time(traj: Trajectory, min_samples: int = 10) -> SingularityReport:
    """Least-squares linear fit of a_min^2 over the final decade of a_min.

    The window is every sample with a_min <= 10 * (final a_min); the estimate
    is the root of the fitted line. A non-negative fitted slope means the
    series is not shrinking toward zero.
    """
    ts = traj.ts
    a_min = traj.series("a_min")
    window = a_min <= 10.0 * a_min[-1]
    if int(np.sum(window)) < min_samples:
        raise InsufficientSamplesError(
            f"need >= {min_samples} samples in the final decade, have {int(np.sum(window))}"
        )
    t_fit = ts[window]
    y_fit = a_min[window] ** 2
    slope, intercept = np.polyfit(t_fit, y_fit, 1)
    if slope >= 0.0:
        raise NoSingularityDetected("fitted slope of a_min^2 is non-negative")
    t_root = -intercept / slope
    residual = float(np.sqrt(np.mean((slope * t_fit + intercept - y_fit) ** 2)))
    return SingularityReport(
        t_estimate=float(t_root),
        fit_window=(float(t_fit[0]), float(t_fit[-1])),
        fit_residual=residual,
        a_min_final=float(a_min[-1]),
    )


def homogeneous_ode_oracle(
    a0: float,
    b0: float,
    c0: float,
    t_end: float,
    rtol: float = 1e-10,
    atol: float = 1e-12,
    radius_floor: float = 1e-8,
):
    """High-accuracy integration of the z-constant reduction of the flow.

    With all spatial derivatives zero the system collapses to the classical
    homogeneous ODE da/dt = -2a (a^4 - (b^2-c^2)^2)/(abc)^2 and relabelings.
    Returns the scipy solution object (dense output enabled); integration
    stops when any radius falls below radius_floor.
    """
    if min(a0, b0, c0) <= 0.0:
        raise DegenerateFiberError("initial radii must be positive")

    def rhs(_t, y):
        a, b, c = y
        denom = (a * b * c) ** 2
        return [
            -2.0 * a * (a**4 - (b * b - c * c) ** 2) / denom,
            -2.0 * b * (b**4 - (a * a - c * c) ** 2) / denom,
            -2.0 * c * (c**4 - (a * a - b * b) ** 2) / denom,
        ]

    def blow_down(_t, y):
        return min(y) - radius_floor

    blow_down.terminal = True
    blow_down.direction = -1

    sol = solve_ivp(
        rhs,
        (0.0, t_end),
        [a0, b0, c0],
        method="DOP853",
        rtol=rtol,
        atol=atol,
        dense_output=True,
        events=blow_down,
    )
    return sol
