import math

import numpy as np
import pytest

from tagsim import experiments, kinematics
from tagsim.errors import ParameterError
from tagsim.experiments import (
    SweepRecord,
    read_steering_replay_csv,
    read_sweep_replay_csv,
    replay_laser_steering,
    replay_stroke_sweep,
    rmse,
    run_laser_steering,
    run_stroke_sweep,
    steering_model_rmse,
    sweep_model_rmse,
    sweep_strokes,
    write_steering_csv,
    write_steering_summary_csv,
    write_sweep_csv,
)
from tagsim.params import DEFAULT_GEOMETRY, DEFAULT_PARAMS, TagParameters

P = DEFAULT_PARAMS
G = DEFAULT_GEOMETRY

# benchtop means measured for the 10/20/30 deg steering runs
MEASURED_MEANS = {10.0: 3.14, 20.0: 7.97, 30.0: 13.96}


# --- rmse ---------------------------------------------------------------------


def test_rmse_identical_zero():
    assert rmse([1.0, 2.0, 3.0], [1.0, 2.0, 3.0]) == 0.0


def test_rmse_unit():
    assert rmse([1.0, 1.0], [0.0, 0.0]) == 1.0


def test_rmse_benchtop_steering_means():
    theoretical = [kinematics.delta_x(math.radians(a), G) for a in (10.0, 20.0, 30.0)]
    value = rmse([3.14, 7.97, 13.96], theoretical)
    assert value == pytest.approx(0.68, abs=0.01)
    # and against the 2-decimal theoretical values quoted alongside them
    assert rmse([3.14, 7.97, 13.96], [3.12, 7.18, 14.83]) == pytest.approx(0.679, abs=5e-4)


def test_rmse_symmetric_nonnegative():
    rng = np.random.default_rng(51)
    a = rng.normal(size=20)
    b = rng.normal(size=20)
    assert rmse(a, b) == rmse(b, a) >= 0.0


def test_rmse_length_mismatch():
    with pytest.raises(ParameterError):
        rmse([1.0], [1.0, 2.0])
    with pytest.raises(ParameterError):
        rmse([], [])


# --- stroke sweep ----------------------------------------------------------------


def test_sweep_grid_counts():
    strokes = sweep_strokes()
    assert strokes[0] == 0.0
    assert strokes.size == 41  # rest sample + 40 displaced samples
    assert strokes[-1] == pytest.approx(2.0, abs=1e-12)


def test_sweep_default_records():
    records = run_stroke_sweep(P)
    assert len(records) == 41
    assert sum(1 for r in records if r.stroke_mm > 0) == 40
    first = records[0]
    assert first.stroke_mm == 0.0
    assert first.model_dtheta_deg == 0.0
    assert first.model_dtheta_noelong_deg == 0.0


def test_sweep_model_value_at_one_mm():
    records = run_stroke_sweep(P)
    at_1mm = next(r for r in records if abs(r.stroke_mm - 1.0) < 1e-9)
    assert at_1mm.model_dtheta_deg == pytest.approx(20.39, abs=5e-3)


def test_sweep_elongation_columns_diverge_slowly():
    for r in run_stroke_sweep(P):
        diff = abs(r.model_dtheta_noelong_deg - r.model_dtheta_deg)
        if r.stroke_mm <= 1.4:
            assert diff < 0.5
        assert diff < 1.0


def test_sweep_model_curves_concave_up():
    records = run_stroke_sweep(P)
    values = [r.model_dtheta_deg for r in records]
    increments = np.diff(values)
    assert np.all(increments > 0)
    assert np.all(np.diff(increments) > -1e-12)  # increments grow


def test_sweep_with_images_tracks_model():
    records = run_stroke_sweep(P, step=0.5, max_stroke=2.0, estimate_from_images=True, seed=3)
    assert len(records) == 5
    assert records[0].estimated_dtheta_deg == 0.0
    for r in records[1:-1]:
        assert r.estimated_dtheta_deg == pytest.approx(r.model_dtheta_deg, abs=0.25)
    # 2.0 mm maps past the renderer's rated rotation: no image estimate
    assert records[-1].estimated_dtheta_deg is None
    assert records[-1].model_dtheta_deg is not None


def test_sweep_beyond_max_stroke_rejected():
    with pytest.raises(ParameterError):
        run_stroke_sweep(P, max_stroke=2.5)


def test_sweep_unreachable_stroke_records_error():
    # unvalidated parameter set whose upper strokes exceed the lever throw
    p = TagParameters(max_stroke_mm=5.0)
    records = run_stroke_sweep(p, step=1.0, max_stroke=5.0)
    errors = [r for r in records if r.error is not None]
    ok = [r for r in records if r.error is None]
    assert errors and ok
    assert all(r.stroke_mm > p.fulcrum_length_mm for r in errors)


def test_sweep_trials_deterministic():
    a = run_stroke_sweep(P, step=0.5, trials=3, estimate_from_images=True, seed=7)
    b = run_stroke_sweep(P, step=0.5, trials=3, estimate_from_images=True, seed=7)
    assert a == b


def test_sweep_replay_attaches_model_columns(tmp_path):
    # measured angles offset by a constant: baseline subtraction removes it
    rows = []
    offset = 2.5
    for t in (0.0, 0.5, 1.0, 1.5):
        rows.append((0, t, math.degrees(kinematics.phi_from_stroke(t, P)) + offset))
    records = replay_stroke_sweep(rows, P)
    assert len(records) == 4
    assert records[0].estimated_dtheta_deg == 0.0
    for r in records:
        assert r.estimated_dtheta_deg == pytest.approx(r.model_dtheta_deg, abs=1e-9)
    assert sweep_model_rmse(records) == pytest.approx(0.0, abs=1e-9)


def test_sweep_replay_csv_reader(tmp_path):
    path = tmp_path / "replay.csv"
    path.write_text(
        "trial_id,stroke_mm,estimated_dtheta_deg\n0,0.0,0.1\n0,0.5,10.2\n"
    )
    rows = read_sweep_replay_csv(path)
    assert rows == [(0, 0.0, 0.1), (0, 0.5, 10.2)]


def test_sweep_replay_rmse_against_model(tmp_path):
    # paper-shaped data: estimates biased low at high stroke
    rows = []
    for t in sweep_strokes():
        model = math.degrees(kinematics.phi_from_stroke(t, P))
        measured = model - (0.08 * t * t * 4.0)  # grows to ~1.3 deg at 2 mm
        rows.append((0, float(t), measured))
    records = replay_stroke_sweep(rows, P)
    value = sweep_model_rmse(records)
    direct = rmse(
        [r.estimated_dtheta_deg for r in records],
        [r.model_dtheta_deg for r in records],
    )
    assert value == direct > 0.0


# --- laser steering ------------------------------------------------------------


def test_steering_theoretical_column():
    records = run_laser_steering(P, G, noise_sigma=0.0)
    theo = [r.theoretical_dx_mm for r in records]
    assert theo[0] == pytest.approx(3.12, abs=0.01)
    assert theo[1] == pytest.approx(7.18, abs=0.01)
    assert theo[2] == pytest.approx(14.83, abs=0.01)


def test_steering_zero_noise_measures_theoretical():
    for r in run_laser_steering(P, G, noise_sigma=0.0):
        assert r.mean_dx_mm == r.theoretical_dx_mm
        assert r.std_dx_mm == 0.0
        assert r.percent_error == 0.0


def test_steering_noise_statistics():
    records = run_laser_steering(P, G, trials=5, noise_sigma=0.3, seed=0)
    for r in records:
        assert len(r.measured_dx_mm) == 5
        assert r.std_dx_mm > 0.0
        assert abs(r.mean_dx_mm - r.theoretical_dx_mm) < 1.0


def test_steering_angle_range_checked():
    with pytest.raises(ParameterError):
        run_laser_steering(P, G, angles_deg=(50.0,))


def test_replay_benchtop_percent_errors():
    records = replay_laser_steering({a: [m] for a, m in MEASURED_MEANS.items()}, G)
    by_angle = {r.phi_deg: r for r in records}
    assert by_angle[10.0].percent_error == pytest.approx(0.76, abs=0.2)
    assert by_angle[20.0].percent_error == pytest.approx(10.94, abs=0.15)
    assert by_angle[30.0].percent_error == pytest.approx(-5.87, abs=0.15)
    assert steering_model_rmse(records) == pytest.approx(0.68, abs=0.01)


def test_percent_error_sign_convention():
    records = replay_laser_steering({10.0: [10.0], 20.0: [1.0]}, G)
    assert records[0].percent_error > 0  # overshoot
    assert records[1].percent_error < 0  # undershoot


# --- CSV I/O ----------------------------------------------------------------------


def test_sweep_csv_round(tmp_path):
    records = run_stroke_sweep(P, step=0.5)
    path = tmp_path / "sweep.csv"
    write_sweep_csv(path, records)
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "trial_id,stroke_mm,model_dtheta_deg,model_dtheta_noelong_deg,estimated_dtheta_deg"
    assert len(lines) == 1 + len(records)


def test_empty_records_header_only(tmp_path):
    path = tmp_path / "sweep.csv"
    write_sweep_csv(path, [])
    assert path.read_text().strip() == (
        "trial_id,stroke_mm,model_dtheta_deg,model_dtheta_noelong_deg,estimated_dtheta_deg"
    )


def test_csv_rerun_byte_identical(tmp_path):
    a = tmp_path / "a.csv"
    b = tmp_path / "b.csv"
    write_sweep_csv(a, run_stroke_sweep(P, trials=2, seed=5))
    write_sweep_csv(b, run_stroke_sweep(P, trials=2, seed=5))
    assert a.read_bytes() == b.read_bytes()


def test_csv_cells_are_plain_numbers(tmp_path):
    # numpy scalar reprs must not leak into the files
    sweep = tmp_path / "sweep.csv"
    write_sweep_csv(sweep, run_stroke_sweep(P, step=0.5, estimate_from_images=True))
    steering = tmp_path / "steering.csv"
    summary = tmp_path / "summary.csv"
    records = run_laser_steering(P, G, seed=2)
    write_steering_csv(steering, records)
    write_steering_summary_csv(summary, records)
    for path in (sweep, steering, summary):
        lines = path.read_text().strip().splitlines()
        assert "np.float" not in "".join(lines)
        for line in lines[1:]:
            for cell in line.split(","):
                if cell != "":
                    float(cell)  # every data cell must re-parse


def test_steering_csvs(tmp_path):
    records = run_laser_steering(P, G, seed=1)
    raw = tmp_path / "steering.csv"
    summary = tmp_path / "steering_summary.csv"
    write_steering_csv(raw, records)
    write_steering_summary_csv(summary, records)
    raw_lines = raw.read_text().strip().splitlines()
    assert raw_lines[0] == "phi_deg,trial_id,theoretical_dx_mm,measured_dx_mm"
    assert len(raw_lines) == 1 + 3 * 5
    summary_lines = summary.read_text().strip().splitlines()
    assert summary_lines[0] == "phi_deg,theoretical_dx_mm,mean_dx_mm,std_dx_mm,percent_error"
    assert len(summary_lines) == 4


def test_replay_csv_reader(tmp_path):
    path = tmp_path / "replay.csv"
    path.write_text(
        "phi_deg,trial_id,measured_dx_mm\n"
        "10.0,0,3.14\n10.0,1,3.10\n20.0,0,7.97\n"
    )
    by_angle = read_steering_replay_csv(path)
    assert by_angle == {10.0: [3.14, 3.10], 20.0: [7.97]}


def test_replay_csv_missing_columns(tmp_path):
    path = tmp_path / "replay.csv"
    path.write_text("a,b\n1,2\n")
    with pytest.raises(ParameterError):
        read_steering_replay_csv(path)
