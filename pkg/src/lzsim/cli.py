"""Command-line front end: every experiment as a subcommand with file outputs.

Each run writes its data files plus a ``run.txt`` manifest listing every
resolved parameter (defaults included), so a run is reconstructible from the
manifest alone. Outputs contain no timestamps and are byte-identical across
repeated runs with the same configuration. Validation failures exit with
code 2 and a single ``error: ...`` line on stderr.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from . import kernels
from .errors import DomainError, ExtractionError, IntegrationError
from .model import ModelParams, adiabatic_levels
from .propagator import IntegratorOptions, SpinState
from .experiments import (ScanResult, dc_scan, extract_delta, lz_sweep, map2d,
                          pulse_trace)

_PRESETS = ("fe-mgo",)


def _fmt_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if v is None:
        return "none"
    if isinstance(v, float):
        return "%.12g" % (v,)
    if isinstance(v, (list, tuple)):
        return ",".join(_fmt_value(x) for x in v)
    return str(v)


def _resolve_params(args) -> ModelParams:
    if getattr(args, "params", None):
        return ModelParams.from_config(args.params)
    return ModelParams.fe_mgo()


def _resolve_options(args) -> IntegratorOptions:
    return IntegratorOptions(
        steps_per_period=args.steps_per_period,
        tolerance=args.tolerance,
        sample_interval_ns=args.sample_interval_ns,
        refine=args.refine)


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_manifest(out: Path, command: str, params: ModelParams,
                    args, extra: dict) -> None:
    entries = {
        "command": command,
        "preset": "none" if getattr(args, "params", None) else args.preset,
        "params_file": getattr(args, "params", None),
        "seed": args.seed,
        "kernel_backend": kernels.backend_name(),
    }
    for key in ("delta0_ghz", "alpha_h_ghz_per_nm", "alpha_f24_ghz_per_nm",
                "lever_arm_nm_per_v", "epsilon_offset_ghz",
                "quad_bias_ghz_per_nm2", "tunneling_modulation"):
        entries[key] = getattr(params, key)
    entries.update(extra)
    lines = [f"{k}={_fmt_value(v)}" for k, v in sorted(entries.items())]
    (out / "run.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")


def _integrator_extra(opts: IntegratorOptions) -> dict:
    return {
        "steps_per_period": opts.steps_per_period,
        "tolerance": opts.tolerance,
        "sample_interval_ns": opts.sample_interval_ns,
        "refine": opts.refine,
    }


def _parse_float_list(text: str, name: str) -> list[float]:
    vals = []
    for piece in text.split(","):
        piece = piece.strip()
        if not piece:
            continue
        try:
            vals.append(float(piece))
        except ValueError:
            raise DomainError(f"{name}: cannot parse {piece!r} as a number")
    if not vals:
        raise DomainError(f"{name}: empty list")
    return vals


# ---------------------------------------------------------------------------
# subcommands


def cmd_levels(args) -> int:
    params = _resolve_params(args)
    out = _out_dir(args)
    if args.vdc_steps < 2:
        raise DomainError("--vdc-steps must be >= 2")
    if not args.vdc_min_mv < args.vdc_max_mv:
        raise DomainError("--vdc-min-mv must be below --vdc-max-mv")
    grid = np.linspace(args.vdc_min_mv * 1e-3, args.vdc_max_mv * 1e-3,
                       args.vdc_steps)
    with open(out / "levels.csv", "w", encoding="utf-8", newline="") as fh:
        fh.write("v_dc,e_minus_ghz,e_plus_ghz\n")
        for v in grid:
            lo, hi = adiabatic_levels(params, float(v))
            fh.write("%.12g,%.12g,%.12g\n" % (v, lo, hi))
    _write_manifest(out, "levels", params, args, {
        "v_dc_min_v": args.vdc_min_mv * 1e-3,
        "v_dc_max_v": args.vdc_max_mv * 1e-3,
        "v_dc_steps": args.vdc_steps,
    })
    return 0


def _trace_label(tp: float) -> str:
    return "cw" if math.isinf(tp) else ("tp%gns" % (tp,))


def cmd_trace(args) -> int:
    params = _resolve_params(args)
    opts = _resolve_options(args)
    out = _out_dir(args)
    if args.tpump_ns is None:
        pumps = [math.inf]
    else:
        pumps = _parse_float_list(args.tpump_ns, "--tpump-ns")
    trajs = pulse_trace(params, args.vdc_mv * 1e-3, args.vrf_mv * 1e-3,
                        args.f_ghz, pumps, args.tend_ns,
                        phase_rad=args.phase_rad, options=opts)
    files = []
    for tp, traj in zip(pumps, trajs):
        name = f"trace_{_trace_label(tp)}.csv"
        traj.to_csv(out / name)
        files.append(name)
    extra = {
        "v_dc_v": args.vdc_mv * 1e-3,
        "v_rf_v": args.vrf_mv * 1e-3,
        "frequency_ghz": args.f_ghz,
        "phase_rad": args.phase_rad,
        "t_pump_ns": pumps,
        "t_end_ns": args.tend_ns,
        "files": files,
    }
    extra.update(_integrator_extra(opts))
    _write_manifest(out, "trace", params, args, extra)
    return 0


def cmd_scan(args) -> int:
    params = _resolve_params(args)
    opts = _resolve_options(args)
    out = _out_dir(args)
    if args.vdc_steps < 2:
        raise DomainError("--vdc-steps must be >= 2")
    grid = np.linspace(args.vdc_min_mv * 1e-3, args.vdc_max_mv * 1e-3,
                       args.vdc_steps)
    scan = dc_scan(params, grid, args.vrf_mv * 1e-3, args.f_ghz,
                   args.tpump_ns, phase_rad=args.phase_rad, options=opts,
                   jobs=args.jobs)
    scan.to_csv(out / "scan.csv")
    extra = {
        "v_dc_min_v": args.vdc_min_mv * 1e-3,
        "v_dc_max_v": args.vdc_max_mv * 1e-3,
        "v_dc_steps": args.vdc_steps,
        "v_rf_v": args.vrf_mv * 1e-3,
        "frequency_ghz": args.f_ghz,
        "phase_rad": args.phase_rad,
        "t_pump_ns": args.tpump_ns,
        "jobs": args.jobs,
    }
    extra.update(_integrator_extra(opts))
    _write_manifest(out, "scan", params, args, extra)
    return 0


def cmd_map(args) -> int:
    params = _resolve_params(args)
    opts = _resolve_options(args)
    out = _out_dir(args)
    if args.vdc_steps < 2 or args.vrf_steps < 2:
        raise DomainError("--vdc-steps and --vrf-steps must be >= 2")
    dc = np.linspace(args.vdc_min_mv * 1e-3, args.vdc_max_mv * 1e-3,
                     args.vdc_steps)
    rf = np.linspace(args.vrf_min_mv * 1e-3, args.vrf_max_mv * 1e-3,
                     args.vrf_steps)
    hm = map2d(params, dc, rf, args.f_ghz, args.tpump_ns,
               phase_rad=args.phase_rad, options=opts, jobs=args.jobs)
    hm.to_csv(out / "map.csv")
    hm.overlay_to_txt(out / "overlay.txt")
    if args.svg:
        hm.to_svg(out / "map.svg")
    extra = {
        "v_dc_min_v": args.vdc_min_mv * 1e-3,
        "v_dc_max_v": args.vdc_max_mv * 1e-3,
        "v_dc_steps": args.vdc_steps,
        "v_rf_min_v": args.vrf_min_mv * 1e-3,
        "v_rf_max_v": args.vrf_max_mv * 1e-3,
        "v_rf_steps": args.vrf_steps,
        "frequency_ghz": args.f_ghz,
        "phase_rad": args.phase_rad,
        "t_pump_ns": args.tpump_ns,
        "jobs": args.jobs,
        "svg": bool(args.svg),
    }
    extra.update(_integrator_extra(opts))
    _write_manifest(out, "map", params, args, extra)
    return 0


def cmd_lz(args) -> int:
    params = _resolve_params(args)
    opts = _resolve_options(args)
    out = _out_dir(args)
    rates_mv = _parse_float_list(args.rates_mv_per_ns, "--rates-mv-per-ns")
    rows = []
    for rate_mv in rates_mv:
        rate = rate_mv * 1e-3
        survival = lz_sweep(params, args.vstart_mv * 1e-3,
                            args.vend_mv * 1e-3, rate, options=opts)
        rows.append((rate, survival))
    with open(out / "lz.csv", "w", encoding="utf-8", newline="") as fh:
        fh.write("rate_v_per_ns,survival\n")
        for rate, surv in rows:
            fh.write("%.12g,%.12g\n" % (rate, surv))
    extra = {
        "v_start_v": args.vstart_mv * 1e-3,
        "v_end_v": args.vend_mv * 1e-3,
        "rates_v_per_ns": [r for r, _ in rows],
    }
    extra.update(_integrator_extra(opts))
    _write_manifest(out, "lz", params, args, extra)
    return 0


def _read_scan_csv(path: Path, params: ModelParams,
                   frequency_ghz: float) -> ScanResult:
    v_dc = []
    sz_final = []
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != "v_dc,sz_final":
            raise DomainError(f"{path}: expected header 'v_dc,sz_final', "
                              f"got {header!r}")
        for line in fh:
            line = line.strip()
            if not line:
                continue
            a, b = line.split(",")
            v_dc.append(float(a))
            sz_final.append(float(b))
    if len(v_dc) < 3:
        raise DomainError(f"{path}: need at least 3 scan rows")
    axis = np.asarray(v_dc)
    sz_init = np.array([SpinState.ground(params, float(v)).sz for v in axis])
    # drive metadata beyond f is not needed by the extraction
    return ScanResult(v_dc=axis, sz_final=np.asarray(sz_final),
                      sz_initial=sz_init, v_rf=0.0,
                      frequency_ghz=frequency_ghz, t_pump_ns=0.0,
                      phase_rad=0.0, params=params, wall_time_per_point_s=0.0)


def _read_lz_csv(path: Path) -> list[tuple[float, float]]:
    runs = []
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != "rate_v_per_ns,survival":
            raise DomainError(f"{path}: expected header "
                              f"'rate_v_per_ns,survival', got {header!r}")
        for line in fh:
            line = line.strip()
            if not line:
                continue
            a, b = line.split(",")
            runs.append((float(a), float(b)))
    if not runs:
        raise DomainError(f"{path}: no ramp rows")
    return runs


def cmd_extract(args) -> int:
    params = _resolve_params(args)
    out = _out_dir(args)
    scan = _read_scan_csv(Path(args.scan_csv), params, args.f_ghz)
    runs = _read_lz_csv(Path(args.lz_csv))
    result = extract_delta(scan, runs)
    text = result.summary()
    (out / "extract.txt").write_text(text, encoding="utf-8")
    sys.stdout.write(text)
    _write_manifest(out, "extract", params, args, {
        "scan_csv": str(args.scan_csv),
        "lz_csv": str(args.lz_csv),
        "frequency_ghz": args.f_ghz,
    })
    return 0


# ---------------------------------------------------------------------------
# parser


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", default=".", help="output directory (default: .)")
    p.add_argument("--params", default=None, metavar="FILE",
                   help="model parameter file (key=value); overrides --preset")
    p.add_argument("--preset", default="fe-mgo", choices=_PRESETS,
                   help="built-in parameter set (default: fe-mgo)")
    p.add_argument("--seed", type=int, default=None,
                   help="random seed (reserved; pipelines are deterministic)")


def _add_integrator(p: argparse.ArgumentParser) -> None:
    p.add_argument("--steps-per-period", type=int, default=512,
                   help="integrator steps per drive period (default: 512)")
    p.add_argument("--tolerance", type=float, default=1e-9,
                   help="absolute tolerance for refinement/norm checks")
    p.add_argument("--sample-interval-ns", type=float, default=None,
                   help="trajectory sampling interval (default: period/20)")
    p.add_argument("--refine", action="store_true",
                   help="double steps until samples converge to tolerance")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="lzsim",
        description="Driven two-level simulator: traces, resonance scans, "
                    "interference maps, ramp survivals, splitting extraction.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("levels", help="adiabatic level diagram vs V_dc")
    _add_common(p)
    p.add_argument("--vdc-min-mv", type=float, default=-500.0)
    p.add_argument("--vdc-max-mv", type=float, default=500.0)
    p.add_argument("--vdc-steps", type=int, default=201)
    p.set_defaults(func=cmd_levels)

    p = sub.add_parser("trace", help="time traces for a family of pump lengths")
    _add_common(p)
    _add_integrator(p)
    p.add_argument("--vdc-mv", type=float, required=True)
    p.add_argument("--vrf-mv", type=float, required=True)
    p.add_argument("--f-ghz", type=float, required=True)
    p.add_argument("--tpump-ns", default=None,
                   help="comma list of pump durations; 'inf' = cw (default)")
    p.add_argument("--tend-ns", type=float, required=True)
    p.add_argument("--phase-rad", type=float, default=0.0)
    p.set_defaults(func=cmd_trace)

    p = sub.add_parser("scan", help="final <S_z> vs V_dc")
    _add_common(p)
    _add_integrator(p)
    p.add_argument("--vdc-min-mv", type=float, required=True)
    p.add_argument("--vdc-max-mv", type=float, required=True)
    p.add_argument("--vdc-steps", type=int, required=True)
    p.add_argument("--vrf-mv", type=float, required=True)
    p.add_argument("--f-ghz", type=float, required=True)
    p.add_argument("--tpump-ns", type=float, required=True)
    p.add_argument("--phase-rad", type=float, default=0.0)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("map", help="<S_z> over a (V_dc, V_rf) grid")
    _add_common(p)
    _add_integrator(p)
    p.add_argument("--vdc-min-mv", type=float, required=True)
    p.add_argument("--vdc-max-mv", type=float, required=True)
    p.add_argument("--vdc-steps", type=int, required=True)
    p.add_argument("--vrf-min-mv", type=float, required=True)
    p.add_argument("--vrf-max-mv", type=float, required=True)
    p.add_argument("--vrf-steps", type=int, required=True)
    p.add_argument("--f-ghz", type=float, required=True)
    p.add_argument("--tpump-ns", type=float, required=True)
    p.add_argument("--phase-rad", type=float, default=0.0)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--svg", action="store_true",
                   help="also render map.svg with resonance overlay")
    p.set_defaults(func=cmd_map)

    p = sub.add_parser("lz", help="ramp survival probabilities")
    _add_common(p)
    _add_integrator(p)
    p.add_argument("--vstart-mv", type=float, required=True)
    p.add_argument("--vend-mv", type=float, required=True)
    p.add_argument("--rates-mv-per-ns", required=True,
                   help="comma list of sweep speeds in mV/ns")
    p.set_defaults(func=cmd_lz)

    p = sub.add_parser("extract",
                       help="fit kappa from a scan, invert ramp survivals")
    _add_common(p)
    p.add_argument("--scan-csv", required=True)
    p.add_argument("--lz-csv", required=True)
    p.add_argument("--f-ghz", type=float, required=True,
                   help="drive frequency the scan was taken at")
    p.set_defaults(func=cmd_extract)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (DomainError, ExtractionError, IntegrationError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
