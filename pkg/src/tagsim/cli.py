"""Batch command-line front end.

Subcommands: fk, ik, sweep, steer, calibrate, estimate-angle, render.
Angles are degrees and lengths are millimetres on this surface.  Every
command that writes an output set also writes a manifest.json capturing the
effective configuration, so a run can be reproduced byte for byte.

Exit codes: 0 ok, 2 usage, 3 model-domain error, 4 I/O error.
"""

import argparse
import csv
import json
import math
import os
import sys
from dataclasses import asdict

import numpy as np

from . import __version__, experiments, imaging, kinematics, params, pgm, synth
from .calibrate import calibrate as fit_stroke_model
from .errors import ModelDomainError

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DOMAIN = 3
EXIT_IO = 4


def _atomic_write_bytes(path, payload: bytes) -> None:
    tmp = f"{path}.tmp"
    with open(tmp, "wb") as fh:
        fh.write(payload)
    os.replace(tmp, path)


def _atomic(path, write_fn) -> None:
    """Run write_fn against a temp path, then rename over the target."""
    tmp = f"{path}.tmp"
    write_fn(tmp)
    os.replace(tmp, path)


def write_manifest(out_dir, command: str, config_path, seed, snapshot: dict) -> str:
    manifest = {
        "command": command,
        "config": config_path,
        "seed": seed,
        "output_dir": str(out_dir),
        "tool_version": __version__,
        "parameters": snapshot,
    }
    path = os.path.join(out_dir, "manifest.json")
    payload = (json.dumps(manifest, indent=2, sort_keys=True) + "\n").encode("utf-8")
    _atomic_write_bytes(path, payload)
    return path


def _load_effective(args):
    """Config file (flag or TAGSIM_CONFIG), overlaid with CLI flags."""
    config_path = getattr(args, "config", None) or params.default_config_path()
    values = params.load_config(config_path) if config_path else {}
    for key in ("v1", "v2"):
        flag = getattr(args, key, None)
        if flag is not None:
            values[f"{key}_mm"] = flag
    p = params.params_from_config(values)
    g = params.geometry_from_config(values)
    base_path = getattr(args, "base_transform", None)
    if base_path:
        g = params.LaserGeometry(
            v1_mm=g.v1_mm, v2_mm=g.v2_mm, base_transform=np.loadtxt(base_path).reshape(4, 4)
        )
        params.validate_geometry(g)
    return p, g, config_path, values


def _snapshot(p, g, extra=None) -> dict:
    snap = asdict(p)
    snap["v1_mm"] = g.v1_mm
    snap["v2_mm"] = g.v2_mm
    snap["base_transform"] = [list(row) for row in g.base_transform.tolist()]
    if extra:
        snap.update(extra)
    return snap


def cmd_fk(args) -> int:
    p, g, _, _ = _load_effective(args)
    if (args.stroke is None) == (args.phi is None):
        print("fk: give exactly one of --stroke or --phi", file=sys.stderr)
        return EXIT_USAGE
    if args.stroke is not None:
        stroke = args.stroke
        state = kinematics.mirror_state_from_stroke(stroke, p)
        phi = state.phi_rad
    else:
        phi = math.radians(args.phi)
        stroke = kinematics.stroke_from_phi(phi, p)
        state = kinematics.mirror_state_from_stroke(stroke, p)
    theta1 = kinematics.reflection_angle(phi)
    frame = "base" if args.base_transform else "tip"
    endpoint = kinematics.laser_point(phi, g, frame=frame)
    dx = kinematics.delta_x(phi, g)
    x, y, z = endpoint.position_mm
    print(f"stroke          t_s    = {stroke:.6f} mm")
    print(f"mirror rotation phi    = {math.degrees(phi):.6f} deg")
    print(f"incident angle  delta  = {math.degrees(state.incident_angle_rad):.6f} deg")
    print(f"reflection      theta1 = {math.degrees(theta1):.6f} deg")
    print(f"laser point ({endpoint.frame} frame) = ({x:.6f}, {y:.6f}, {z:.6f}) mm")
    print(f"displacement    dx     = {dx:.6f} mm")
    return EXIT_OK


def cmd_ik(args) -> int:
    p, g, _, _ = _load_effective(args)
    phi = kinematics.ik_phi_from_delta_x(args.dx, g)
    stroke = kinematics.stroke_from_phi(phi, p)
    print(f"displacement    dx     = {args.dx:.6f} mm")
    print(f"mirror rotation phi    = {math.degrees(phi):.6f} deg")
    print(f"stroke          t_s    = {stroke:.6f} mm")
    return EXIT_OK


def cmd_sweep(args) -> int:
    p, g, config_path, _ = _load_effective(args)
    if args.replay:
        rows = experiments.read_sweep_replay_csv(args.replay)
        records = experiments.replay_stroke_sweep(rows, p)
    else:
        records = experiments.run_stroke_sweep(
            p,
            step=args.step,
            max_stroke=args.max,
            trials=args.trials,
            estimate_from_images=args.images,
            image_noise_sigma=args.noise_sigma,
            seed=args.seed,
        )
    os.makedirs(args.out, exist_ok=True)
    out_csv = os.path.join(args.out, "sweep.csv")
    _atomic(out_csv, lambda tmp: experiments.write_sweep_csv(tmp, records))
    write_manifest(
        args.out,
        "sweep",
        config_path,
        args.seed,
        _snapshot(
            p,
            g,
            {
                "step_mm": args.step,
                "max_mm": args.max,
                "trials": args.trials,
                "images": args.images,
                "image_noise_sigma": args.noise_sigma,
                "replay": args.replay,
            },
        ),
    )
    print(f"wrote {out_csv} ({len(records)} records)")
    if args.replay:
        print(f"model RMSE = {experiments.sweep_model_rmse(records):.4f} deg")
    return EXIT_OK


def cmd_steer(args) -> int:
    p, g, config_path, _ = _load_effective(args)
    if args.replay:
        measured = experiments.read_steering_replay_csv(args.replay)
        records = experiments.replay_laser_steering(measured, g)
    else:
        records = experiments.run_laser_steering(
            p,
            g,
            trials=args.trials,
            noise_sigma=args.noise_sigma,
            seed=args.seed,
        )
    os.makedirs(args.out, exist_ok=True)
    out_csv = os.path.join(args.out, "steering.csv")
    out_summary = os.path.join(args.out, "steering_summary.csv")
    _atomic(out_csv, lambda tmp: experiments.write_steering_csv(tmp, records))
    _atomic(out_summary, lambda tmp: experiments.write_steering_summary_csv(tmp, records))
    write_manifest(
        args.out,
        "steer",
        config_path,
        args.seed,
        _snapshot(
            p,
            g,
            {
                "trials": args.trials,
                "noise_sigma_mm": args.noise_sigma,
                "replay": args.replay,
            },
        ),
    )
    print(f"wrote {out_csv} and {out_summary}")
    print(f"model RMSE = {experiments.steering_model_rmse(records):.4f} mm")
    return EXIT_OK


def cmd_calibrate(args) -> int:
    p, g, config_path, _ = _load_effective(args)
    samples = []
    with open(args.input, "r", newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        required = {"stroke_mm", "dtheta_deg"}
        if reader.fieldnames is None or not required.issubset(reader.fieldnames):
            print(f"calibrate: {args.input} needs columns {sorted(required)}", file=sys.stderr)
            return EXIT_USAGE
        for row in reader:
            samples.append((float(row["stroke_mm"]), math.radians(float(row["dtheta_deg"]))))
    result = fit_stroke_model(samples, init=p)
    os.makedirs(args.out, exist_ok=True)
    out_csv = os.path.join(args.out, "calibration.csv")

    def _write(tmp):
        with open(tmp, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(experiments.CALIBRATION_COLUMNS)
            for iteration, l_mm, c, rmse_deg in result.history:
                writer.writerow([iteration, repr(l_mm), repr(c), repr(rmse_deg)])

    _atomic(out_csv, _write)
    write_manifest(
        args.out, "calibrate", config_path, None, _snapshot(p, g, {"input": args.input})
    )
    print(f"fitted fulcrum length = {result.fulcrum_length_mm:.6f} mm")
    print(f"fitted elongation c   = {result.elongation_c:.6f}")
    print(f"residual RMSE         = {result.residual_rmse_deg:.6f} deg")
    print(f"iterations            = {result.iterations}, converged = {result.converged}")
    print(f"wrote {out_csv}")
    return EXIT_OK


def cmd_estimate_angle(args) -> int:
    scene = synth.DEFAULT_SCENE
    cfg = scene.pipeline_config()
    paths = []
    if os.path.isdir(args.path):
        paths = sorted(
            os.path.join(args.path, name)
            for name in os.listdir(args.path)
            if name.lower().endswith(".pgm")
        )
        if not paths:
            print(f"estimate-angle: no .pgm files in {args.path}", file=sys.stderr)
            return EXIT_IO
    else:
        paths = [args.path]
    for path in paths:
        img = pgm.read_pgm(path)
        angle = imaging.estimate_angle(img, cfg)
        print(f"{path}: {angle:.4f} deg")
        if args.edges_out:
            cropped = imaging.crop_image(img, cfg.crop)
            binary = imaging.threshold_binary(cropped, cfg.threshold)
            points = imaging.canny_edges(
                binary, cfg.canny_low, cfg.canny_high, cfg.canny_aperture, cfg.smooth_sigma
            )
            _atomic(args.edges_out, lambda tmp: imaging.write_edge_csv(tmp, points))
    return EXIT_OK


def cmd_render(args) -> int:
    scene = synth.DEFAULT_SCENE
    img = synth.render_tag_silhouette(
        math.radians(args.phi), scene, noise_sigma=args.noise_sigma, seed=args.seed
    )
    out_dir = os.path.dirname(os.path.abspath(args.out))
    os.makedirs(out_dir, exist_ok=True)
    _atomic(args.out, lambda tmp: pgm.write_pgm(tmp, img))
    write_manifest(
        out_dir,
        "render",
        None,
        args.seed,
        {"phi_deg": args.phi, "noise_sigma": args.noise_sigma, "scene": asdict(scene)},
    )
    print(f"wrote {args.out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tagsim",
        description="Tendon-actuated galvanometer kinematics and benchtop simulation",
    )
    parser.add_argument("--config", help="key-value parameter file (default: $TAGSIM_CONFIG)")
    sub = parser.add_subparsers(dest="command", required=True)

    fk = sub.add_parser("fk", help="forward chain: stroke or angle to laser endpoint")
    fk.add_argument("--stroke", type=float, help="wire stroke in mm")
    fk.add_argument("--phi", type=float, help="mirror rotation in deg")
    fk.add_argument("--v1", type=float, help="source-to-mirror segment in mm")
    fk.add_argument("--v2", type=float, help="mirror-to-surface distance in mm")
    fk.add_argument("--base-transform", help="file with a 4x4 base transform (16 numbers)")
    fk.set_defaults(func=cmd_fk)

    ik = sub.add_parser("ik", help="inverse: spot displacement to rotation and stroke")
    ik.add_argument("--dx", type=float, required=True, help="spot displacement in mm (>= 0)")
    ik.add_argument("--v1", type=float)
    ik.add_argument("--v2", type=float)
    ik.set_defaults(func=cmd_ik)

    sweep = sub.add_parser("sweep", help="stroke sweep experiment -> sweep.csv")
    sweep.add_argument("--step", type=float, default=experiments.SWEEP_STEP_MM)
    sweep.add_argument("--max", type=float, default=experiments.SWEEP_MAX_MM)
    sweep.add_argument("--trials", type=int, default=1)
    sweep.add_argument("--seed", type=int, default=0)
    sweep.add_argument("--images", action="store_true", help="estimate angles from rendered frames")
    sweep.add_argument("--noise-sigma", type=float, default=0.0, help="image noise sigma")
    sweep.add_argument(
        "--replay", help="replay CSV (trial_id, stroke_mm, estimated_dtheta_deg)"
    )
    sweep.add_argument("--out", default="out_sweep")
    sweep.set_defaults(func=cmd_sweep)

    steer = sub.add_parser("steer", help="laser steering experiment -> steering CSVs")
    steer.add_argument("--trials", type=int, default=experiments.STEERING_TRIALS)
    steer.add_argument("--seed", type=int, default=0)
    steer.add_argument(
        "--noise-sigma", type=float, default=experiments.STEERING_NOISE_SIGMA_MM
    )
    steer.add_argument("--replay", help="replay CSV (phi_deg, trial_id, measured_dx_mm)")
    steer.add_argument("--v1", type=float)
    steer.add_argument("--v2", type=float)
    steer.add_argument("--out", default="out_steer")
    steer.set_defaults(func=cmd_steer)

    cal = sub.add_parser("calibrate", help="fit l and c -> calibration.csv")
    cal.add_argument("--input", required=True, help="CSV with stroke_mm, dtheta_deg columns")
    cal.add_argument("--out", default="out_calibrate")
    cal.set_defaults(func=cmd_calibrate)

    est = sub.add_parser("estimate-angle", help="estimate angle from PGM file or directory")
    est.add_argument("path", help="PGM file or directory of PGM files")
    est.add_argument("--edges-out", help="write detected edge pixels as (col,row) CSV")
    est.set_defaults(func=cmd_estimate_angle)

    render = sub.add_parser("render", help="render a synthetic silhouette to PGM")
    render.add_argument("--phi", type=float, required=True, help="mirror rotation in deg")
    render.add_argument("--noise-sigma", type=float, default=0.0)
    render.add_argument("--seed", type=int, default=0)
    render.add_argument("--out", required=True)
    render.set_defaults(func=cmd_render)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "dx", None) is not None and args.dx < 0:
        print("ik: --dx must be >= 0", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except ModelDomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        # malformed numbers in an input file, bad matrix shape, ...
        print(f"bad input: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
