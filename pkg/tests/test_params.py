import math

import numpy as np
import pytest

from tagsim.errors import ParameterError, SingularTransformError
from tagsim.params import (
    DEFAULT_ACTUATOR,
    DEFAULT_PARAMS,
    ActuatorConfig,
    LaserGeometry,
    TagParameters,
    counts_from_stroke,
    geometry_from_config,
    load_config,
    motor_from_stroke,
    params_from_config,
    stroke_from_counts,
    stroke_from_motor,
    validate_actuator,
    validate_geometry,
    validate_parameters,
)


def test_nominal_parameters_accepted():
    p = TagParameters(2.83, 0.269, 142.0, 53.97, 0.178, 2.0, 45.0)
    assert validate_parameters(p) is p


def test_zero_fulcrum_rejected():
    with pytest.raises(ParameterError):
        validate_parameters(TagParameters(fulcrum_length_mm=0.0))


@pytest.mark.parametrize(
    "field",
    [
        "spring_constant_n_per_mm",
        "wire_length_mm",
        "wire_modulus_gpa",
        "wire_radius_mm",
        "max_stroke_mm",
    ],
)
def test_nonpositive_values_rejected(field):
    with pytest.raises(ParameterError):
        validate_parameters(TagParameters(**{field: -1.0}))


def test_unreachable_max_stroke_rejected():
    # (1 - c) * 3.0 / 2.83 = 1.045 > 1: full stroke leaves the arcsin domain
    with pytest.raises(ParameterError, match="arcsin"):
        validate_parameters(TagParameters(max_stroke_mm=3.0))


def test_max_stroke_at_fulcrum_rejected():
    with pytest.raises(ParameterError, match="fulcrum"):
        validate_parameters(TagParameters(max_stroke_mm=2.83))


def test_rest_incident_pinned_to_45():
    with pytest.raises(ParameterError):
        validate_parameters(TagParameters(rest_incident_deg=44.0))


def test_geometry_validation():
    assert validate_geometry(LaserGeometry(v1_mm=0.0, v2_mm=8.56)) is not None
    with pytest.raises(ParameterError):
        validate_geometry(LaserGeometry(v2_mm=0.0))
    with pytest.raises(ParameterError):
        validate_geometry(LaserGeometry(v1_mm=-1.0))
    skewed = np.eye(4)
    skewed[0, 1] = 0.1
    with pytest.raises(SingularTransformError):
        validate_geometry(LaserGeometry(base_transform=skewed))


def test_actuator_validation():
    assert validate_actuator(ActuatorConfig(0.6, 1024)) is not None
    with pytest.raises(ParameterError):
        validate_actuator(ActuatorConfig(0.0, 1024))
    with pytest.raises(ParameterError):
        validate_actuator(ActuatorConfig(0.6, 0))
    with pytest.raises(ParameterError):
        validate_actuator(ActuatorConfig(0.6, 12.5))


def test_stroke_from_motor_pitch():
    assert stroke_from_motor(1.0, DEFAULT_ACTUATOR) == 0.6
    assert stroke_from_motor(0.0, DEFAULT_ACTUATOR) == 0.0
    assert stroke_from_motor(2.5, DEFAULT_ACTUATOR) == pytest.approx(1.5, abs=1e-15)


def test_motor_stroke_round_trip():
    rng = np.random.default_rng(7)
    for stroke in rng.uniform(0.0, DEFAULT_PARAMS.max_stroke_mm, 200):
        back = stroke_from_motor(motor_from_stroke(stroke))
        assert abs(back - stroke) < 1e-12


def test_counts_round_trip():
    cfg = ActuatorConfig(0.6, 4096)
    assert stroke_from_counts(4096, cfg) == pytest.approx(0.6)
    assert counts_from_stroke(stroke_from_counts(1000, cfg), cfg) == pytest.approx(1000)


def test_nonfinite_revs_rejected():
    with pytest.raises(ParameterError):
        stroke_from_motor(math.nan)


def test_config_round_trip(tmp_path):
    path = tmp_path / "tag.cfg"
    path.write_text(
        "# benchtop setup\n"
        "fulcrum_length_mm = 2.83\n"
        "spring_constant_n_per_mm = 0.269\n"
        "wire_length_mm = 142\n"
        "wire_modulus_gpa = 53.97\n"
        "wire_radius_mm = 0.178\n"
        "max_stroke_mm = 2.0\n"
        "rest_incident_deg = 45\n"
        "v1_mm = 1.5\n"
        "v2_mm = 8.56\n"
    )
    values = load_config(str(path))
    p = params_from_config(values)
    g = geometry_from_config(values)
    assert p == DEFAULT_PARAMS
    assert g.v1_mm == 1.5
    assert g.v2_mm == 8.56


def test_config_unknown_key(tmp_path):
    path = tmp_path / "bad.cfg"
    path.write_text("fulcrum_mm = 2.83\n")
    with pytest.raises(ParameterError, match="unknown key"):
        load_config(str(path))


def test_config_bad_line(tmp_path):
    path = tmp_path / "bad.cfg"
    path.write_text("just some words\n")
    with pytest.raises(ParameterError):
        load_config(str(path))
