"""Physical parameters of the galvanometer mechanism and laser geometry.

Units are fixed: lengths in mm, stiffness in N/mm, Young's modulus in GPa,
angles in degrees in configuration files and radians everywhere else.
All types are immutable after validation and safe to share between threads.
"""

import math
import os
from dataclasses import dataclass, field, replace

import numpy as np

from . import transforms
from .errors import ParameterError

CONFIG_ENV_VAR = "TAGSIM_CONFIG"


@dataclass(frozen=True)
class TagParameters:
    """Constants of the tendon-driven mirror mechanism.

    fulcrum_length_mm   lever arm from the holder pivot to the wire attachment
    spring_constant_n_per_mm  stiffness of the restoring springs
    wire_length_mm      free length of the actuating wire
    wire_modulus_gpa    Young's modulus of the wire
    wire_radius_mm      wire radius used in the elongation term
    max_stroke_mm       largest commanded wire stroke
    rest_incident_deg   laser incident angle at zero stroke (45 for the
                        prism mirror; fixed by the mirror geometry)
    """

    fulcrum_length_mm: float = 2.83
    spring_constant_n_per_mm: float = 0.269
    wire_length_mm: float = 142.0
    wire_modulus_gpa: float = 53.97
    wire_radius_mm: float = 0.178
    max_stroke_mm: float = 2.0
    rest_incident_deg: float = 45.0


@dataclass(frozen=True, eq=False)
class LaserGeometry:
    """Beam segments and base pose for the endpoint model.

    v1_mm           source-to-mirror segment along the tool axis
    v2_mm           perpendicular distance from the mirror to the scan surface
    base_transform  rigid 4x4 pose of the tool tip in the robot base frame
    """

    v1_mm: float = 0.0
    v2_mm: float = 8.56
    base_transform: np.ndarray = field(default_factory=transforms.identity)


@dataclass(frozen=True)
class ActuatorConfig:
    """Lead-screw actuation constants."""

    lead_screw_pitch_mm_per_rev: float = 0.6
    encoder_counts_per_rev: int = 1024


DEFAULT_PARAMS = TagParameters()
DEFAULT_GEOMETRY = LaserGeometry()
DEFAULT_ACTUATOR = ActuatorConfig()


def elongation_fraction(p: TagParameters) -> float:
    """Dimensionless wire-stretch fraction 2*Ks*L / (E*pi*r^2).

    GPa converts to N/mm^2 with a factor 1e3 so the result is unitless.
    Kept here (as well as in kinematics) because validation needs it.
    """
    e_n_per_mm2 = p.wire_modulus_gpa * 1e3
    return (2.0 * p.spring_constant_n_per_mm * p.wire_length_mm) / (
        e_n_per_mm2 * math.pi * p.wire_radius_mm**2
    )


def validate_parameters(p: TagParameters) -> TagParameters:
    """Check all invariants; returns p unchanged if they hold.

    Raises ParameterError on non-positive values, an excessively compliant
    wire, or a stroke range the arcsin mapping cannot reach.
    """
    positive = {
        "fulcrum_length_mm": p.fulcrum_length_mm,
        "spring_constant_n_per_mm": p.spring_constant_n_per_mm,
        "wire_length_mm": p.wire_length_mm,
        "wire_modulus_gpa": p.wire_modulus_gpa,
        "wire_radius_mm": p.wire_radius_mm,
        "max_stroke_mm": p.max_stroke_mm,
    }
    for name, value in positive.items():
        if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
            raise ParameterError(f"{name} must be finite and > 0, got {value!r}")
    if p.rest_incident_deg != 45.0:
        raise ParameterError(
            f"rest_incident_deg must be 45 for the prism mirror, got {p.rest_incident_deg!r}"
        )
    c = elongation_fraction(p)
    if c >= 1.0:
        raise ParameterError(
            f"wire too compliant: elongation fraction {c:.4f} >= 1 breaks the stroke model"
        )
    # arcsin argument at full stroke must stay <= 1
    arg = (1.0 - c) * p.max_stroke_mm / p.fulcrum_length_mm
    if arg > 1.0:
        raise ParameterError(
            f"max_stroke_mm={p.max_stroke_mm} is unreachable: "
            f"arcsin argument {arg:.4f} > 1 at full stroke"
        )
    if p.max_stroke_mm >= p.fulcrum_length_mm:
        raise ParameterError(
            f"max_stroke_mm={p.max_stroke_mm} must be smaller than the "
            f"fulcrum length {p.fulcrum_length_mm}"
        )
    return p


def validate_geometry(g: LaserGeometry) -> LaserGeometry:
    if not (math.isfinite(g.v1_mm) and g.v1_mm >= 0):
        raise ParameterError(f"v1_mm must be finite and >= 0, got {g.v1_mm!r}")
    if not (math.isfinite(g.v2_mm) and g.v2_mm > 0):
        raise ParameterError(f"v2_mm must be finite and > 0, got {g.v2_mm!r}")
    transforms.require_rigid(g.base_transform)
    return g


def validate_actuator(a: ActuatorConfig) -> ActuatorConfig:
    if not (math.isfinite(a.lead_screw_pitch_mm_per_rev) and a.lead_screw_pitch_mm_per_rev > 0):
        raise ParameterError("lead_screw_pitch_mm_per_rev must be > 0")
    if not (isinstance(a.encoder_counts_per_rev, int) and a.encoder_counts_per_rev > 0):
        raise ParameterError("encoder_counts_per_rev must be a positive integer")
    return a


def stroke_from_motor(revs: float, cfg: ActuatorConfig = DEFAULT_ACTUATOR) -> float:
    """Wire stroke (mm) produced by a motor displacement in revolutions."""
    if not math.isfinite(revs):
        raise ParameterError(f"revolutions must be finite, got {revs!r}")
    return revs * cfg.lead_screw_pitch_mm_per_rev


def motor_from_stroke(stroke_mm: float, cfg: ActuatorConfig = DEFAULT_ACTUATOR) -> float:
    """Inverse of stroke_from_motor."""
    return stroke_mm / cfg.lead_screw_pitch_mm_per_rev


def stroke_from_counts(counts: float, cfg: ActuatorConfig = DEFAULT_ACTUATOR) -> float:
    """Wire stroke (mm) for an encoder displacement in counts."""
    return stroke_from_motor(counts / cfg.encoder_counts_per_rev, cfg)


def counts_from_stroke(stroke_mm: float, cfg: ActuatorConfig = DEFAULT_ACTUATOR) -> float:
    return motor_from_stroke(stroke_mm, cfg) * cfg.encoder_counts_per_rev


# --- plain-text configuration files -------------------------------------
#
# One "key = value" pair per line, keys named exactly like the dataclass
# fields above, '#' starts a comment.  Unknown keys are rejected so typos
# do not silently fall back to defaults.

_FLOAT_KEYS = {
    "fulcrum_length_mm",
    "spring_constant_n_per_mm",
    "wire_length_mm",
    "wire_modulus_gpa",
    "wire_radius_mm",
    "max_stroke_mm",
    "rest_incident_deg",
    "v1_mm",
    "v2_mm",
    "lead_screw_pitch_mm_per_rev",
}
_INT_KEYS = {"encoder_counts_per_rev"}


def load_config(path: str) -> dict:
    """Parse a key-value config file into a {key: number} dict."""
    values: dict = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ParameterError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
            key, _, text = line.partition("=")
            key = key.strip()
            text = text.strip()
            if key in _FLOAT_KEYS:
                values[key] = float(text)
            elif key in _INT_KEYS:
                values[key] = int(text)
            else:
                raise ParameterError(f"{path}:{lineno}: unknown key {key!r}")
    return values


def default_config_path() -> str | None:
    return os.environ.get(CONFIG_ENV_VAR)


def params_from_config(values: dict, base: TagParameters = DEFAULT_PARAMS) -> TagParameters:
    fields = {k: v for k, v in values.items() if k in TagParameters.__dataclass_fields__}
    return validate_parameters(replace(base, **fields))


def geometry_from_config(values: dict, base: LaserGeometry = DEFAULT_GEOMETRY) -> LaserGeometry:
    fields = {k: v for k, v in values.items() if k in ("v1_mm", "v2_mm")}
    return validate_geometry(replace(base, **fields))


def actuator_from_config(values: dict, base: ActuatorConfig = DEFAULT_ACTUATOR) -> ActuatorConfig:
    fields = {k: v for k, v in values.items() if k in ActuatorConfig.__dataclass_fields__}
    return validate_actuator(replace(base, **fields))
