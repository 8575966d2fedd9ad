"""Command-line interface: landscape, wave, speed, and thresholds commands."""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Optional

from .config import ConfigError, RunConfig, load_config, load_preset
from .coupled import CoupledPotentialContext, coupled_potential
from .scalar import NonConvergence, bp_threshold, landscape, map_threshold
from .speed import SpeedReport, detect_steady_state, measure_speed
from .window import CoupledSpec, WindowSchedule, decode_success, run_wd

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NUMERICAL = 2


def _fmt(value) -> str:
    """CSV cell: 17 significant digits for floats, empty for absent."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(value)
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def _write_csv(path: Path, header: tuple[str, ...], rows) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def cmd_landscape(cfg: RunConfig, out: Path) -> int:
    if cfg.epsilon is None:
        raise ConfigError("the landscape command needs a single epsilon")
    ens = cfg.ensembles[0]
    land = landscape(cfg.epsilon, ens, grid_n=cfg.grid_n)
    _write_csv(
        out / "landscape.csv",
        ("x", "U", "U_prime", "U_double_prime"),
        zip(land.x, land.U, land.U1, land.U2),
    )
    _write_csv(
        out / "landscape_critical.csv",
        ("x_a", "x_b", "x_c0", "x_d", "x_e", "D"),
        [(land.x_a, land.x_b, land.x_c0, land.x_d, land.x_e, land.D)],
    )
    missing = land.missing()
    print(f"landscape: epsilon={cfg.epsilon} ensemble={ens.label()}")
    if missing:
        print("absent critical points: " + ", ".join(missing))
    return EXIT_OK


def cmd_wave(cfg: RunConfig, out: Path) -> int:
    if cfg.T is None:
        raise ConfigError("the wave command needs an explicit T")
    if cfg.epsilon is None:
        raise ConfigError("the wave command needs a single epsilon")
    if len(cfg.W) != 1:
        raise ConfigError("the wave command needs a single window size")
    ens = cfg.ensembles[0]
    spec = CoupledSpec(ens=ens, N=cfg.N, w=cfg.w, epsilon=cfg.epsilon)
    sched = WindowSchedule(
        W=cfg.W[0], T=cfg.T, variant=cfg.schedule, T_first=cfg.T_first
    )
    try:
        sched.validate(spec)
    except ValueError as exc:
        raise ConfigError(str(exc))
    final, traj = run_wd(
        spec, sched, record="per-window", record_windows=cfg.record.windows
    )
    _write_csv(out / "trajectory.csv", ("c", "t", "z", "x"), traj.rows())

    def potential_rows():
        for c in traj.windows():
            ctx = CoupledPotentialContext(spec=spec, sched=sched, c=c, alpha=cfg.alpha)
            block = traj.block(c)
            for t in range(block.shape[0]):
                yield c, t, coupled_potential(block[t], ctx)

    _write_csv(out / "potential_trace.csv", ("c", "t", "U"), potential_rows())

    steady = detect_steady_state(traj, tol=cfg.steady_tol)
    success = decode_success(
        final, spec, threshold=cfg.success.threshold, policy=cfg.success.policy
    )
    report = {
        "c_prime": steady.c_prime,
        "shift_residual": steady.residual,
        "steady_tol": steady.tol,
        "decode_success": success.success,
        "avg": success.avg,
        "max": success.max,
    }
    (out / "steady_state.json").write_text(json.dumps(report, indent=2) + "\n")
    print(f"wave: c_prime={steady.c_prime} residual={steady.residual}")
    return EXIT_OK


def _speed_task(args) -> tuple[str, SpeedReport]:
    label, ens, cfg_n, cfg_w, eps, W, opts = args
    spec = CoupledSpec(ens=ens, N=cfg_n, w=cfg_w, epsilon=eps)
    land = landscape(eps, ens, grid_n=opts["grid_n"]) if opts["bounds"] else None
    report = measure_speed(
        spec,
        W,
        T_max=opts["T_max"],
        alpha=opts["alpha"],
        success_policy=opts["policy"],
        success_threshold=opts["threshold"],
        schedule_variant=opts["schedule"],
        steady_tol=opts["steady_tol"],
        land=land,
        compute_bounds=opts["bounds"],
        validate=False,
    )
    return label, report


def _fixed_t_report(ens, cfg: RunConfig, eps: float, W: int) -> SpeedReport:
    """Single run at the configured T; T_min is filled only on success."""
    spec = CoupledSpec(ens=ens, N=cfg.N, w=cfg.w, epsilon=eps)
    sched = WindowSchedule(W=W, T=cfg.T, variant=cfg.schedule, T_first=cfg.T_first)
    final, _ = run_wd(spec, sched, record="none")
    rep = decode_success(
        final, spec, threshold=cfg.success.threshold, policy=cfg.success.policy
    )
    metric = rep.avg if cfg.success.policy == "average" else rep.max
    return SpeedReport(
        epsilon=eps,
        W=W,
        T_min=cfg.T if rep.success else None,
        c_prime=None,
        A1=None,
        th2_finite=None,
        th2_infinite=None,
        alpha=cfg.alpha,
        success_policy=cfg.success.policy,
        N=cfg.N,
        w=cfg.w,
        schedule=cfg.schedule,
        T_max=cfg.T,
        best_avg=metric,
    )


def cmd_speed(cfg: RunConfig, out: Path, workers: Optional[int]) -> int:
    if not cfg.W:
        raise ConfigError("the speed command needs W (a value, list, or grid)")
    multi = len(cfg.ensembles) > 1
    opts = {
        "T_max": cfg.T_max,
        "alpha": cfg.alpha,
        "policy": cfg.success.policy,
        "threshold": cfg.success.threshold,
        "schedule": cfg.schedule,
        "steady_tol": cfg.steady_tol,
        "bounds": cfg.bounds,
        "grid_n": cfg.grid_n,
    }
    by_label: dict[str, list[SpeedReport]] = {}
    for ens in cfg.ensembles:
        label = ens.label()
        epsilons = cfg.epsilons(ens)
        tasks = [
            (label, ens, cfg.N, cfg.w, eps, W, opts)
            for eps in epsilons
            for W in sorted(cfg.W)
        ]
        if cfg.T is not None:
            reports = [_fixed_t_report(ens, cfg, eps, W) for _, _, _, _, eps, W, _ in tasks]
        elif workers and workers > 1 and len(tasks) > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                reports = [rep for _, rep in pool.map(_speed_task, tasks)]
        else:
            reports = [_speed_task(t)[1] for t in tasks]
        by_label.setdefault(label, []).extend(reports)

    for label, reports in by_label.items():
        reports.sort(key=lambda r: (r.epsilon, r.W))
        name = f"speed_{label}.csv" if multi else "speed.csv"
        _write_csv(
            out / name,
            SpeedReport.CSV_COLUMNS,
            (r.csv_values() for r in reports),
        )
        for r in reports:
            status = f"T_min={r.T_min}" if r.T_min is not None else (
                f"no success up to T_max={r.T_max} (best avg {r.best_avg:.3e})"
            )
            print(f"{label} epsilon={r.epsilon} W={r.W}: {status}")
    return EXIT_OK


def cmd_thresholds(cfg: RunConfig, out: Optional[Path]) -> int:
    rows = []
    for ens in cfg.ensembles:
        eps_bp = bp_threshold(ens)
        eps_map = map_threshold(ens)
        rows.append((ens.label(), eps_bp, eps_map))
        print(f"{ens.label()}: eps_bp={eps_bp:.6f} eps_map={eps_map:.6f}")
    if out is not None:
        _write_csv(out / "thresholds.csv", ("ensemble", "eps_bp", "eps_map"), rows)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="scwde",
        description=(
            "Density evolution, potential landscapes, and wave-speed bounds "
            "for spatially coupled LDPC ensembles under windowed decoding."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, desc in (
        ("landscape", "sample the scalar potential and locate critical points"),
        ("wave", "run one windowed-decoding trajectory and export it"),
        ("speed", "measure propagation speeds and bounds over a grid"),
        ("thresholds", "print BP and MAP thresholds per ensemble"),
    ):
        p = sub.add_parser(name, help=desc)
        src = p.add_mutually_exclusive_group(required=True)
        src.add_argument("--config", type=Path, help="YAML run configuration")
        src.add_argument(
            "--preset",
            choices=("table1", "fig2", "fig3", "fig4"),
            help="named built-in configuration",
        )
        p.add_argument("--out", type=Path, default=Path("scwde_out"))
        if name == "speed":
            p.add_argument(
                "--workers",
                type=int,
                default=os.cpu_count(),
                help="parallel grid points (default: CPU count)",
            )
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_preset(args.preset) if args.preset else load_config(args.config)
        out = args.out
        if args.command == "landscape":
            return cmd_landscape(cfg, out)
        if args.command == "wave":
            return cmd_wave(cfg, out)
        if args.command == "speed":
            return cmd_speed(cfg, out, args.workers)
        return cmd_thresholds(cfg, out)
    except (ConfigError, FileNotFoundError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NonConvergence, ZeroDivisionError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
