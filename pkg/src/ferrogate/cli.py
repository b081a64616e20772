"""Command-line surface.

Subcommands: fields, evolve, exchange, calibrate, register, sweep, verify.
All outputs are deterministic for fixed inputs; run_meta.json is the only
file carrying wall-clock information.  Errors print machine-readable JSON
to stderr and exit nonzero.
"""

from __future__ import annotations

import argparse
import dataclasses
import itertools
import json
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from datetime import datetime, timezone

import numpy as np
from threadpoolctl import threadpool_limits

from . import dynamics, exchange, optics, output, physics, schedule, spinreg
from .errors import FerrogateError, ParameterError, ScheduleError

CANONICAL_SNAPSHOT_TIMES = (-200e-15, -100e-15, 0.0, 150e-15, 450e-15, 600e-15)

_LASER_FIELDS = {"i_avg": "I_avg", "d": "D", "rep_rate": "rep_rate", "tau": "tau_opt"}
_MATERIAL_FIELDS = {"r": "r", "n": "n", "p_s": "P_s", "mass_ratio": "effective_mass_ratio"}

_ANCHORS = [
    # (label, computed-key, reference value, relative tolerance)
    ("rectified polarization peak (uC/cm^2)", "p_max_uc_per_cm2", 6.29e-2, 5e-3),
    ("transient field estimate (gauss)", "b_max_gauss", 39.6, 5e-3),
    ("spontaneous sheet density (cm^-2)", "p_s_sheet_density_per_cm2", 1.6e14, 2e-2),
]


def _load_schedule(args) -> schedule.Schedule:
    path = getattr(args, "schedule", None) or os.environ.get("FERROGATE_CONFIG")
    if path:
        return schedule.load_schedule(path)
    return schedule.canonical_fig3_schedule()


def _laser_material(args) -> tuple[physics.MaterialParams, physics.LaserParams]:
    mat = physics.BARIUM_TITANATE
    laser = physics.DEFAULT_LASER
    overrides = {}
    for key, field in _MATERIAL_FIELDS.items():
        value = getattr(args, f"mat_{key}", None)
        if value is not None:
            overrides[field] = value
    if overrides:
        mat = dataclasses.replace(mat, **overrides)
    overrides = {}
    for key, field in _LASER_FIELDS.items():
        value = getattr(args, f"laser_{key}", None)
        if value is not None:
            overrides[field] = value
    if overrides:
        laser = dataclasses.replace(laser, **overrides)
    return mat, laser


def _field_summary(mat, laser, radius) -> dict:
    p_max = optics.rectified_polarization_peak(mat, laser)
    return {
        "peak_intensity_w_per_m2": physics.peak_intensity(laser),
        "p_max_c_per_m2": p_max,
        "p_max_uc_per_cm2": p_max * 1e2,  # 1 C/m^2 = 100 uC/cm^2
        "sheet_density_per_m2": optics.sheet_density(p_max),
        "sheet_density_per_cm2": optics.sheet_density(p_max) * 1e-4,
        "p_s_sheet_density_per_cm2": optics.sheet_density(mat.P_s) * 1e-4,
        "b_max_tesla": optics.displacement_bmax(radius, p_max, laser.tau_opt),
        "b_max_gauss": optics.displacement_bmax(radius, p_max, laser.tau_opt) * 1e4,
        "radius_m": radius,
    }


def cmd_fields(args) -> int:
    mat, laser = _laser_material(args)
    out_dir = output.ensure_dir(args.out)
    summary = _field_summary(mat, laser, args.radius)

    env = optics.PulseEnvelope(t0=0.0, tau=laser.tau_opt, shape="gaussian")
    t = np.linspace(-3.0 * laser.tau_opt, 3.0 * laser.tau_opt, 601)
    profile = optics.rectified_polarization_profile(mat, laser, env, t)
    output.write_csv(
        os.path.join(out_dir, "p_profile.csv"),
        ["t_s", "p_c_per_m2"],
        zip(profile.times, profile.values),
    )
    b_t = optics.displacement_b_profile(args.radius, summary["p_max_c_per_m2"], env, args.radius, t)
    output.write_csv(
        os.path.join(out_dir, "b_profile.csv"),
        ["t_s", "b_tesla_at_rho_eq_r"],
        zip(t, b_t),
    )
    if args.format == "json":
        output.write_json(os.path.join(out_dir, "summary.json"), summary)
    else:
        output.write_csv(
            os.path.join(out_dir, "summary.csv"),
            ["quantity", "value"],
            sorted(summary.items()),
        )
    return 0


def _parse_times(spec: str) -> list[float]:
    return [schedule._parse_value(tok.strip(), 0) for tok in spec.split(",") if tok.strip()]


def cmd_evolve(args) -> int:
    sched = _load_schedule(args)
    config = exchange.scenario_from_schedule(sched)
    out_dir = output.ensure_dir(args.out)
    times = sorted(set(CANONICAL_SNAPSHOT_TIMES) | set(_parse_times(args.snapshots or "")))
    times = [t for t in times if config.t_start <= t <= config.t_end]
    t_pre, _ = config.padded_window()
    ground = dynamics.stationary_states(config.model, config.grid, config.mass, 1)[0][1]
    traj = dynamics.propagate(
        ground,
        config.model,
        config.mass,
        t_pre,
        config.t_end,
        config.dt,
        mat=config.mat,
        laser=config.laser,
        snapshot_times=times,
        edge_tol=config.edge_tol,
    )
    for snap_t, state in zip(traj.times, traj.states):
        v = dynamics.evaluate_potential(
            config.model, config.mat, config.laser, config.grid.x, snap_t
        )
        label = f"{snap_t * 1e15:+.1f}fs"
        output.write_csv(
            os.path.join(out_dir, f"snapshot_{label}.csv"),
            ["x_m", "re_psi", "im_psi", "prob_density_per_m", "potential_j"],
            zip(config.grid.x, state.values.real, state.values.imag,
                state.probability_density(), v),
        )
    output.write_json(
        os.path.join(out_dir, "evolve_summary.json"),
        {
            "snapshot_times_s": list(traj.times),
            "final_norm": traj.final.norm(),
            "warnings": list(traj.warnings),
        },
    )
    return 0


def _write_report(out_dir, report: exchange.ScenarioReport) -> None:
    output.write_json(os.path.join(out_dir, "report.json"), report.summary())
    output.write_csv(
        os.path.join(out_dir, "trace.csv"),
        ["t_s", "j_joule", "theta_rad"],
        zip(report.trace.times, report.trace.j_values, report.trace.theta_running),
    )


def cmd_exchange(args) -> int:
    sched = _load_schedule(args)
    report = exchange.run_swap_scenario(sched, target_theta=args.target_theta)
    out_dir = output.ensure_dir(args.out)
    _write_report(out_dir, report)
    return 0


def cmd_calibrate(args) -> int:
    sched = _load_schedule(args)
    result = exchange.calibrate_swap_schedule(
        sched,
        target_theta=args.target_theta,
        tolerance=args.tolerance,
    )
    calibrated = schedule.scale_pulses(sched, result.scale)
    out_dir = output.ensure_dir(args.out)
    schedule.save_schedule(calibrated, os.path.join(out_dir, "calibrated_schedule.fgs"))
    output.write_json(
        os.path.join(out_dir, "calibration.json"),
        {
            "scale": result.scale,
            "theta_rad": result.theta,
            "target_theta_rad": args.target_theta,
            "evaluations": result.evaluations,
        },
    )
    report = exchange.run_swap_scenario(calibrated, target_theta=args.target_theta)
    _write_report(out_dir, report)
    return 0


def cmd_register(args) -> int:
    sched = _load_schedule(args)
    if not sched.gates:
        raise ParameterError("register subcommand needs gate lines in the schedule")
    n = int(sched.device.get("qubits", 0)) or max(max(g.i, g.j) for g in sched.gates) + 1
    n = max(n, 2)
    if args.initial:
        if args.initial.startswith("@"):
            with open(args.initial[1:], "r", encoding="utf-8") as handle:
                state = spinreg.SpinState.from_json(handle.read())
        else:
            state = spinreg.SpinState.from_bits(args.initial)
        if state.n != n:
            raise ParameterError(
                f"initial state has {state.n} qubits but the sequence needs {n}"
            )
    else:
        state = spinreg.SpinState.from_bits("".join("ud"[k % 2] for k in range(n)))
    final, log = spinreg.run_sequence(state, sched.gates)
    out_dir = output.ensure_dir(args.out)
    with open(os.path.join(out_dir, "final_state.json"), "w", encoding="utf-8") as handle:
        handle.write(final.to_json() + "\n")
    output.write_csv(
        os.path.join(out_dir, "conservation_log.csv"),
        ["step", "i", "j", "theta", "norm", "sz_total", "s_squared_total"],
        (
            [row["step"], row["i"], row["j"], row["theta"], row["norm"],
             row["sz_total"], row["s_squared_total"]]
            for row in log
        ),
    )
    return 0


def _parse_axis(spec: str) -> tuple[str, np.ndarray]:
    name, _, rng = spec.partition("=")
    parts = rng.split(":")
    if not name or len(parts) != 3:
        raise ParameterError(f"sweep axis must look like name=start:stop:count, got {spec!r}")
    start = schedule._parse_value(parts[0], 0)
    stop = schedule._parse_value(parts[1], 0)
    count = int(parts[2])
    if count < 1:
        raise ParameterError("sweep count must be >= 1")
    return name, np.linspace(start, stop, count)


def _apply_axis(name: str, value: float, sched, mat, laser):
    block, _, key = name.partition(".")
    if block == "laser" and key in _LASER_FIELDS:
        return sched, mat, dataclasses.replace(laser, **{_LASER_FIELDS[key]: value})
    if block == "material" and key in _MATERIAL_FIELDS:
        return sched, dataclasses.replace(mat, **{_MATERIAL_FIELDS[key]: value}), laser
    if block == "pulse" and key == "scale":
        return schedule.scale_pulses(sched, value), mat, laser
    if block in ("device", "grid", "well") and key:
        updated = dict(getattr(sched, block))
        updated[key] = value
        return dataclasses.replace(sched, **{block: updated}), mat, laser
    raise ParameterError(f"unknown sweep axis {name!r}")


def cmd_sweep(args) -> int:
    if not args.sweep:
        raise ParameterError("sweep needs at least one --sweep axis")
    if len(args.sweep) > 2:
        raise ParameterError("sweep supports at most two axes")
    axes = [_parse_axis(spec) for spec in args.sweep]
    base_sched = _load_schedule(args)
    base_mat, base_laser = _laser_material(args)

    if args.target == "fields":
        metric_names = ["p_max_c_per_m2", "b_max_tesla", "sheet_density_per_m2"]
    elif args.target == "exchange":
        metric_names = ["theta_rad", "leakage", "swap_fidelity", "j_static_joule"]
    else:
        raise ParameterError(f"sweep target must be fields or exchange, got {args.target!r}")

    def evaluate(point_values) -> list:
        sched, mat, laser = base_sched, base_mat, base_laser
        for (name, _), value in zip(axes, point_values):
            sched, mat, laser = _apply_axis(name, float(value), sched, mat, laser)
        if args.target == "fields":
            summary = _field_summary(mat, laser, args.radius)
            return [summary[m] for m in metric_names]
        config = exchange.scenario_from_schedule(sched, mat=mat, laser=laser)
        report = exchange.run_swap_scenario(config, target_theta=args.target_theta)
        summary = report.summary()
        return [summary[m] for m in metric_names]

    points = list(itertools.product(*(range(values.size) for _, values in axes)))

    def worker(point) -> list:
        values = [axes[k][1][idx] for k, idx in enumerate(point)]
        try:
            return [*values, *evaluate(values), ""]
        except FerrogateError as exc:
            return [*values, *[None] * len(metric_names), f"{type(exc).__name__}: {exc}"]

    with threadpool_limits(limits=1):
        if args.jobs > 1:
            with ThreadPoolExecutor(max_workers=args.jobs) as pool:
                rows = list(pool.map(worker, points))
        else:
            rows = [worker(point) for point in points]

    out_dir = output.ensure_dir(args.out)
    output.write_csv(
        os.path.join(out_dir, "sweep.csv"),
        [name for name, _ in axes] + metric_names + ["error"],
        rows,
    )
    return 0


def cmd_verify(args) -> int:
    summary = _field_summary(physics.BARIUM_TITANATE, physics.DEFAULT_LASER, 0.5e-6)
    failures = 0
    for label, key, reference, tolerance in _ANCHORS:
        value = summary[key]
        ok = abs(value - reference) <= tolerance * reference
        status = "PASS" if ok else "FAIL"
        failures += 0 if ok else 1
        print(f"{status} {label}: computed {value:.4g}, reference {reference:.4g}, "
              f"tolerance {tolerance:.1%}")
    return 0 if failures == 0 else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ferrogate",
        description="Simulator of ferroelectrically gated quantum-dot exchange operations",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, schedule_flag=True):
        if schedule_flag:
            p.add_argument("--schedule", help="schedule file (.fgs); default: "
                           "$FERROGATE_CONFIG or the built-in canonical scenario")
        p.add_argument("--out", default="out", help="output directory (default: out)")

    p = sub.add_parser("fields", help="rectified polarization and transient field profiles")
    common(p, schedule_flag=False)
    p.add_argument("--format", choices=["csv", "json"], default="json")
    p.add_argument("--radius", type=float, default=0.5e-6, help="field cylinder radius, m")
    for key in _LASER_FIELDS:
        p.add_argument(f"--laser-{key.replace('_', '-')}", dest=f"laser_{key}", type=float)
    for key in _MATERIAL_FIELDS:
        p.add_argument(f"--mat-{key.replace('_', '-')}", dest=f"mat_{key}", type=float)
    p.set_defaults(func=cmd_fields)

    p = sub.add_parser("evolve", help="propagate through the pulse sequence, emit snapshots")
    common(p)
    p.add_argument("--snapshots", help="extra snapshot times, comma separated (SI suffixes ok)")
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("exchange", help="exchange trace and scenario report")
    common(p)
    p.add_argument("--target-theta", type=float, default=math.pi)
    p.set_defaults(func=cmd_exchange)

    p = sub.add_parser("calibrate", help="calibrate pulse amplitude to a target angle")
    common(p)
    p.add_argument("--target-theta", type=float, default=math.pi)
    p.add_argument("--tolerance", type=float, default=1e-3)
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("register", help="run the schedule's gate sequence on a spin register")
    common(p)
    p.add_argument("--initial", help="initial basis state, e.g. udud, or @state.json")
    p.set_defaults(func=cmd_register)

    p = sub.add_parser("sweep", help="run fields/exchange over a parameter grid")
    p.add_argument("target", choices=["fields", "exchange"])
    common(p)
    p.add_argument("--sweep", action="append", default=[],
                   help="axis spec name=start:stop:count (repeat for a second axis)")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--radius", type=float, default=0.5e-6)
    p.add_argument("--target-theta", type=float, default=math.pi)
    for key in _LASER_FIELDS:
        p.add_argument(f"--laser-{key.replace('_', '-')}", dest=f"laser_{key}", type=float)
    for key in _MATERIAL_FIELDS:
        p.add_argument(f"--mat-{key.replace('_', '-')}", dest=f"mat_{key}", type=float)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("verify", help="check the built-in reference anchors")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    started = datetime.now(timezone.utc).isoformat()
    t0 = time.monotonic()
    try:
        code = args.func(args)
    except ScheduleError as exc:
        payload = {"error": type(exc).__name__, "message": str(exc),
                   "line_number": exc.line_number}
        print(json.dumps(payload, sort_keys=True), file=sys.stderr)
        return 1
    except FerrogateError as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}, sort_keys=True),
              file=sys.stderr)
        return 1
    except OSError as exc:
        payload = {"error": type(exc).__name__, "message": str(exc),
                   "path": getattr(exc, "filename", None)}
        print(json.dumps(payload, sort_keys=True), file=sys.stderr)
        return 1
    out_dir = getattr(args, "out", None)
    if code == 0 and out_dir and os.path.isdir(out_dir):
        argv_used = list(argv) if argv is not None else sys.argv[1:]
        output.write_run_meta(out_dir, argv_used, started, time.monotonic() - t0)
    return code


if __name__ == "__main__":
    sys.exit(main())
