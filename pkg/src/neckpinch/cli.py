"""Command-line entry point.

Subcommands:
  run          evolve a preset (or config-defined data), run monitors, write outputs
  presets      list the canonical initial data
  curvature    one-shot curvature table for a preset at t = 0
  convergence  grid/step refinement study printing measured orders

Exit codes: 0 success, 1 usage error, 2 run aborted on non-finite data,
3 monitor hard-violation under --strict.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import flow, monitors
from .config import ConfigError, RunConfig, config_from_dict, load_config
from .curvature import riemann_oracle, sectional_curvatures
from .grid import PeriodicGrid, metric_state
from .output import write_series, write_summary
from .presets import get_preset, presets


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors by default; the documented contract is 1
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _build_parser() -> _Parser:
    parser = _Parser(prog="neckpinch", description=__doc__.strip().splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="evolve, monitor, and serialize a flow")
    run.add_argument("--preset", help="preset name (see: neckpinch presets)")
    run.add_argument("--config", help="JSON config file")
    run.add_argument("--grid-n", type=int, help="grid size override")
    run.add_argument("--out", help="output directory")
    run.add_argument("--format", help="comma-separated subset of csv,json")
    run.add_argument("--monitors", help="comma-separated monitor names")
    run.add_argument("--strict", action="store_true", help="exit 3 on monitor violation")

    sub.add_parser("presets", help="list canonical presets")

    curv = sub.add_parser("curvature", help="curvature table for a preset at t=0")
    curv.add_argument("--preset", default="fig-a")
    curv.add_argument("--grid-n", type=int, default=256)
    curv.add_argument("--out", help="write per-point CSV table here")

    conv = sub.add_parser("convergence", help="refinement study of measured orders")
    conv.add_argument("--preset", default="fig-a")
    return parser


def _resolve_config(args) -> RunConfig:
    cfg = load_config(args.config) if args.config else RunConfig()
    overrides = cfg.as_dict()
    if args.preset:
        overrides["preset"] = args.preset
        overrides["preset_params"] = {}
        overrides["profiles"] = None
    if args.grid_n:
        overrides["grid_n"] = args.grid_n
    if args.out:
        overrides["out_dir"] = args.out
    if args.format:
        overrides["formats"] = [f.strip() for f in args.format.split(",") if f.strip()]
    if args.monitors:
        overrides["monitors_enabled"] = [
            m.strip() for m in args.monitors.split(",") if m.strip()
        ]
    return config_from_dict(overrides)


def _cmd_run(args) -> int:
    try:
        cfg = _resolve_config(args)
        preset = cfg.build_preset()
    except (ConfigError, KeyError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    grid = PeriodicGrid(cfg.grid_n)
    state = preset.build(grid)
    traj, report = flow.evolve(state, cfg.flow)

    reports = monitors.run_monitors(traj, report, cfg.monitors_enabled, cfg.kappa)
    type1 = monitors.type1_classifier(traj, report)
    lam = traj.samples[0].ratio_max
    consts = monitors.constants(lam) if lam >= 1.0 else None

    out_dir = Path(cfg.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    if "csv" in cfg.formats:
        write_series(traj, out_dir / "series.csv")
    if "json" in cfg.formats:
        write_summary(
            traj, report, reports, type1, consts, cfg.as_dict(), out_dir / "summary.json"
        )

    last = traj.samples[-1]
    print(f"run: preset={preset.name} n={cfg.grid_n} stop={traj.stop_reason}")
    print(f"  t_final={last.t:.6g} a_min={last.a_min:.6g} c_max={last.c_max:.6g}")
    if report:
        print(f"  T_estimate={report.t_estimate:.6g} fit_residual={report.fit_residual:.3e}")
    print(f"  type1: {type1.classification} sup(T-t)|Rm|={type1.sup_tml_rm:.4g}")
    for name, rep in reports.items():
        status = {True: "pass", False: "FAIL", None: "n/a"}[rep.passed]
        margin = "" if rep.worst_margin is None else f" margin={rep.worst_margin:.3e}"
        print(f"  monitor {name}: {status}{margin}")

    if traj.stop_reason == flow.STOP_NONFINITE:
        return 2
    if args.strict and any(rep.passed is False for rep in reports.values()):
        return 3
    return 0


def _cmd_presets() -> int:
    for p in presets():
        print(f"{p.name}: phi0 = {p.phi0.formula()}, a0 = {p.a0.formula()}, "
              f"b0 = {p.b0.formula()}, c0 = {p.c0.formula()}")
        if p.description:
            print(f"    {p.description}")
    return 0


def _cmd_curvature(args) -> int:
    try:
        preset = get_preset(args.preset)
        grid = PeriodicGrid(args.grid_n)
    except (KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    state = preset.build(grid)
    curv = sectional_curvatures(state)
    names = (
        "k01", "k02", "k03", "k12", "k13", "k23",
        "khat12", "khat13", "khat23",
        "ric00", "ric11", "ric22", "ric33", "scal", "rm_norm_sq",
    )
    print(f"curvature of preset {preset.name} at t=0, n={args.grid_n}")
    for name in names:
        v = getattr(curv, name).values
        print(f"  {name:10s} min={v.min():+.6e} max={v.max():+.6e}")
    if args.out:
        path = Path(args.out)
        path.mkdir(parents=True, exist_ok=True)
        rows = ["z," + ",".join(names)]
        for k, z in enumerate(grid.z):
            rows.append(
                repr(float(z)) + ","
                + ",".join(repr(float(getattr(curv, n).values[k])) for n in names)
            )
        (path / "curvature.csv").write_text("\n".join(rows) + "\n")
        print(f"wrote {path / 'curvature.csv'}")
    return 0


def _measured_orders(errors: list[float]) -> list[float]:
    return [float(np.log2(e0 / e1)) for e0, e1 in zip(errors, errors[1:])]


def _cmd_convergence(args) -> int:
    try:
        preset = get_preset(args.preset)
    except KeyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    from .grid import d_z, field

    print("derivative stencil on sin(z):")
    errs = []
    for n in (32, 64, 128):
        grid = PeriodicGrid(n)
        err = np.max(np.abs(d_z(field(grid, np.sin(grid.z))).values - np.cos(grid.z)))
        errs.append(err)
        print(f"  n={n:4d} max_err={err:.3e}")
    print(f"  measured orders: {[f'{o:.2f}' for o in _measured_orders(errs)]}")

    print(f"closed-form vs frame-symbol oracle on preset {preset.name}:")
    errs = []
    for n in (32, 64, 128):
        grid = PeriodicGrid(n)
        state = preset.build(grid)
        cf = sectional_curvatures(state)
        orc = riemann_oracle(state)
        err = max(
            float(np.max(np.abs(a.values - b.values)))
            for a, b in zip(cf.sectional(), orc.sectional())
        )
        errs.append(err)
        print(f"  n={n:4d} max_mismatch={err:.3e}")
    print(f"  measured orders: {[f'{o:.2f}' for o in _measured_orders(errs)]}")

    print("shrinking-sphere a_min^2 error under cfl halving (n=64):")
    errs = []
    grid = PeriodicGrid(64)
    for cfl in (0.4, 0.2, 0.1):
        state = metric_state(grid, 0.0, 1.0, 2.0, 2.0, 2.0)
        traj, _ = flow.evolve(state, flow.FlowConfig(cfl_safety=cfl, a_min_stop=0.2))
        ts = traj.ts
        err = float(np.max(np.abs(traj.series("a_min") ** 2 - (4.0 - 4.0 * ts))))
        errs.append(err)
        print(f"  cfl={cfl:.2f} max_err={err:.3e}")
    print(f"  measured orders: {[f'{o:.2f}' for o in _measured_orders(errs)]}")
    return 0


def main(argv: list[str] | None = None) -> int:
    try:
        args = _build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.command == "run":
        return _cmd_run(args)
    if args.command == "presets":
        return _cmd_presets()
    if args.command == "curvature":
        return _cmd_curvature(args)
    if args.command == "convergence":
        return _cmd_convergence(args)
    return 1


if __name__ == "__main__":
    sys.exit(main())
