"""Benchtop experiment drivers: stroke sweep, laser steering, statistics.

Both experiments can run purely on the model (optionally with seeded
measurement noise) or replay externally measured CSV data through the same
statistics, so the analysis math is exercised either way.  Trials draw from
independent child seeds of one root seed, making serial and parallel
execution produce identical records.
"""

import csv
import math
from dataclasses import dataclass

import numpy as np

from . import imaging, kinematics, synth
from .errors import ModelDomainError, ParameterError, UnreachableAngleError
from .params import LaserGeometry, TagParameters
from .synth import SceneConfig

SWEEP_STEP_MM = 0.05
SWEEP_MAX_MM = 2.0
STEERING_ANGLES_DEG = (10.0, 20.0, 30.0)
STEERING_TRIALS = 5
STEERING_NOISE_SIGMA_MM = 0.3  # matches the scatter seen on the benchtop


@dataclass(frozen=True)
class SweepRecord:
    """One stroke sample: model angle change, with and without the wire
    elongation term, plus the image-estimated angle change when enabled.
    Angle changes are relative to the trial's zero-stroke sample."""

    trial_id: int
    stroke_mm: float
    model_dtheta_deg: float | None
    model_dtheta_noelong_deg: float | None
    estimated_dtheta_deg: float | None = None
    error: str | None = None


@dataclass(frozen=True)
class SteeringRecord:
    """Per-angle laser steering statistics over repeated trials."""

    phi_deg: float
    theoretical_dx_mm: float
    measured_dx_mm: tuple
    mean_dx_mm: float
    std_dx_mm: float
    percent_error: float


def rmse(series_a, series_b) -> float:
    """Root mean square difference of two equal-length series."""
    a = np.asarray(series_a, dtype=np.float64)
    b = np.asarray(series_b, dtype=np.float64)
    if a.shape != b.shape or a.size == 0:
        raise ParameterError(f"series must be same nonzero length, got {a.shape} vs {b.shape}")
    return float(np.sqrt(np.mean((a - b) ** 2)))


def _phi_deg_no_elong(t_s: float, p: TagParameters) -> float:
    # rigid-tendon variant of the stroke map (zero wire stretch)
    arg = t_s / p.fulcrum_length_mm
    if arg > 1.0:
        raise UnreachableAngleError(
            f"stroke {t_s} mm unreachable without elongation: arcsin argument {arg:.4f} > 1"
        )
    return math.degrees(math.asin(arg))


def sweep_strokes(step: float = SWEEP_STEP_MM, max_stroke: float = SWEEP_MAX_MM) -> np.ndarray:
    """Stroke grid: rest sample at 0 plus ceil(max/step) displaced samples."""
    if step <= 0:
        raise ParameterError(f"step must be > 0, got {step}")
    n = math.ceil(max_stroke / step)
    return np.concatenate([[0.0], (np.arange(n) + 1) * step])


def run_stroke_sweep(
    p: TagParameters,
    step: float = SWEEP_STEP_MM,
    max_stroke: float = SWEEP_MAX_MM,
    trials: int = 1,
    estimate_from_images: bool = False,
    image_noise_sigma: float = 0.0,
    seed: int = 0,
    scene: SceneConfig = synth.DEFAULT_SCENE,
) -> list[SweepRecord]:
    """Sweep the wire stroke and record model (and optionally image-derived)
    angle changes, baseline-subtracted against each trial's rest sample.

    A stroke the model cannot reach produces a record with its error noted
    rather than aborting the sweep.  Image estimates are only produced for
    rotations inside the renderer's rated range; records beyond it keep
    their model values with an empty estimate column.
    """
    if max_stroke > p.max_stroke_mm:
        raise ParameterError(
            f"sweep max {max_stroke} mm exceeds configured max stroke {p.max_stroke_mm} mm"
        )
    strokes = sweep_strokes(step, max_stroke)
    cfg = scene.pipeline_config()
    seeds = np.random.SeedSequence(seed).spawn(trials)
    records: list[SweepRecord] = []
    for trial in range(trials):
        trial_rng = np.random.default_rng(seeds[trial])
        baseline_est: float | None = None
        for t_s in strokes:
            try:
                phi = kinematics.phi_from_stroke(t_s, p)
                model = math.degrees(phi)
                model_noelong = _phi_deg_no_elong(t_s, p)
            except ModelDomainError as exc:
                records.append(
                    SweepRecord(
                        trial_id=trial,
                        stroke_mm=float(t_s),
                        model_dtheta_deg=None,
                        model_dtheta_noelong_deg=None,
                        error=str(exc),
                    )
                )
                continue
            estimated = None
            if estimate_from_images and phi <= synth.MAX_RENDER_PHI_RAD:
                img = synth.render_tag_silhouette(
                    phi,
                    scene,
                    noise_sigma=image_noise_sigma,
                    seed=int(trial_rng.integers(0, 2**31)),
                )
                angle = imaging.estimate_angle(img, cfg)
                if baseline_est is None:
                    baseline_est = angle
                estimated = angle - baseline_est
            records.append(
                SweepRecord(
                    trial_id=trial,
                    stroke_mm=float(t_s),
                    model_dtheta_deg=model,
                    model_dtheta_noelong_deg=model_noelong,
                    estimated_dtheta_deg=estimated,
                )
            )
    return records


def replay_stroke_sweep(rows, p: TagParameters) -> list[SweepRecord]:
    """Attach model columns to externally measured sweep rows.

    rows are (trial_id, stroke_mm, estimated_dtheta_deg) tuples; estimates
    are re-baselined against each trial's smallest-stroke sample, matching
    the simulated sweep's convention.
    """
    by_trial: dict = {}
    for trial_id, stroke, est in rows:
        by_trial.setdefault(trial_id, []).append((float(stroke), float(est)))
    records: list[SweepRecord] = []
    for trial_id in sorted(by_trial):
        samples = sorted(by_trial[trial_id])
        baseline = samples[0][1]
        for stroke, est in samples:
            try:
                model = math.degrees(kinematics.phi_from_stroke(stroke, p))
                model_noelong = _phi_deg_no_elong(stroke, p)
            except ModelDomainError as exc:
                records.append(
                    SweepRecord(
                        trial_id=trial_id,
                        stroke_mm=stroke,
                        model_dtheta_deg=None,
                        model_dtheta_noelong_deg=None,
                        estimated_dtheta_deg=est - baseline,
                        error=str(exc),
                    )
                )
                continue
            records.append(
                SweepRecord(
                    trial_id=trial_id,
                    stroke_mm=stroke,
                    model_dtheta_deg=model,
                    model_dtheta_noelong_deg=model_noelong,
                    estimated_dtheta_deg=est - baseline,
                )
            )
    return records


def sweep_model_rmse(records) -> float:
    """RMSE of estimated angle changes against the elongation model, over
    records that carry both columns."""
    pairs = [
        (r.estimated_dtheta_deg, r.model_dtheta_deg)
        for r in records
        if r.estimated_dtheta_deg is not None and r.model_dtheta_deg is not None
    ]
    if not pairs:
        raise ParameterError("no records with both estimated and model angles")
    est, model = zip(*pairs)
    return rmse(est, model)


def steering_statistics(phi_deg, theoretical, measured) -> SteeringRecord:
    measured = tuple(float(m) for m in measured)
    theoretical = float(theoretical)
    mean = float(np.mean(measured))
    std = float(np.std(measured, ddof=1)) if len(measured) > 1 else 0.0
    return SteeringRecord(
        phi_deg=float(phi_deg),
        theoretical_dx_mm=theoretical,
        measured_dx_mm=measured,
        mean_dx_mm=mean,
        std_dx_mm=std,
        percent_error=100.0 * (mean - theoretical) / theoretical,
    )


def run_laser_steering(
    p: TagParameters,
    g: LaserGeometry,
    angles_deg=STEERING_ANGLES_DEG,
    trials: int = STEERING_TRIALS,
    noise_sigma: float = STEERING_NOISE_SIGMA_MM,
    seed: int = 0,
) -> list[SteeringRecord]:
    """Steer to each angle `trials` times and compare the spot displacement
    against the endpoint model; measurements are simulated as the
    theoretical displacement plus seeded Gaussian noise."""
    for a in angles_deg:
        if not (0.0 <= a < 45.0):
            raise ParameterError(f"steering angle {a} deg outside [0, 45)")
    seeds = np.random.SeedSequence(seed).spawn(trials)
    rngs = [np.random.default_rng(s) for s in seeds]
    records = []
    for phi_deg in angles_deg:
        theoretical = kinematics.delta_x(math.radians(phi_deg), g)
        measured = [theoretical + rngs[t].normal(0.0, noise_sigma) if noise_sigma > 0 else theoretical
                    for t in range(trials)]
        records.append(steering_statistics(phi_deg, theoretical, measured))
    return records


def replay_laser_steering(measured_by_angle: dict, g: LaserGeometry) -> list[SteeringRecord]:
    """Run the steering statistics over externally measured displacements.

    measured_by_angle maps rotation angle (deg) to a sequence of measured
    displacements (mm)."""
    records = []
    for phi_deg in sorted(measured_by_angle):
        theoretical = kinematics.delta_x(math.radians(phi_deg), g)
        records.append(steering_statistics(phi_deg, theoretical, measured_by_angle[phi_deg]))
    return records


def steering_model_rmse(records) -> float:
    """RMSE of per-angle mean displacements against the model."""
    return rmse(
        [r.mean_dx_mm for r in records],
        [r.theoretical_dx_mm for r in records],
    )


# --- CSV I/O ----------------------------------------------------------------
#
# Column orders are fixed; floats are written with repr so files are
# byte-stable across runs and re-parse exactly.

SWEEP_COLUMNS = (
    "trial_id",
    "stroke_mm",
    "model_dtheta_deg",
    "model_dtheta_noelong_deg",
    "estimated_dtheta_deg",
)
STEERING_COLUMNS = ("phi_deg", "trial_id", "theoretical_dx_mm", "measured_dx_mm")
STEERING_SUMMARY_COLUMNS = (
    "phi_deg",
    "theoretical_dx_mm",
    "mean_dx_mm",
    "std_dx_mm",
    "percent_error",
)
CALIBRATION_COLUMNS = ("iteration", "l_mm", "c", "residual_rmse_deg")


def _cell(value) -> str:
    return "" if value is None else repr(value)


def write_sweep_csv(path, records) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(SWEEP_COLUMNS)
        for r in records:
            writer.writerow(
                [
                    r.trial_id,
                    _cell(r.stroke_mm),
                    _cell(r.model_dtheta_deg),
                    _cell(r.model_dtheta_noelong_deg),
                    _cell(r.estimated_dtheta_deg),
                ]
            )


def write_steering_csv(path, records) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(STEERING_COLUMNS)
        for r in records:
            for trial, dx in enumerate(r.measured_dx_mm):
                writer.writerow([_cell(r.phi_deg), trial, _cell(r.theoretical_dx_mm), _cell(dx)])


def write_steering_summary_csv(path, records) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(STEERING_SUMMARY_COLUMNS)
        for r in records:
            writer.writerow(
                [
                    _cell(r.phi_deg),
                    _cell(r.theoretical_dx_mm),
                    _cell(r.mean_dx_mm),
                    _cell(r.std_dx_mm),
                    _cell(r.percent_error),
                ]
            )


def read_steering_replay_csv(path) -> dict:
    """Read a replay CSV (phi_deg, trial_id, measured_dx_mm) into the
    mapping replay_laser_steering expects."""
    by_angle: dict = {}
    with open(path, "r", newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        required = {"phi_deg", "measured_dx_mm"}
        if reader.fieldnames is None or not required.issubset(reader.fieldnames):
            raise ParameterError(f"{path}: replay CSV needs columns {sorted(required)}")
        for row in reader:
            by_angle.setdefault(float(row["phi_deg"]), []).append(float(row["measured_dx_mm"]))
    if not by_angle:
        raise ParameterError(f"{path}: replay CSV has no data rows")
    return by_angle


def read_sweep_replay_csv(path) -> list[tuple[int, float, float]]:
    """Read (trial_id, stroke_mm, estimated_dtheta_deg) replay rows."""
    rows = []
    with open(path, "r", newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        required = {"trial_id", "stroke_mm", "estimated_dtheta_deg"}
        if reader.fieldnames is None or not required.issubset(reader.fieldnames):
            raise ParameterError(f"{path}: replay CSV needs columns {sorted(required)}")
        for row in reader:
            rows.append(
                (int(row["trial_id"]), float(row["stroke_mm"]), float(row["estimated_dtheta_deg"]))
            )
    if not rows:
        raise ParameterError(f"{path}: replay CSV has no data rows")
    return rows
