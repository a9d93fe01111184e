"""tagsim: kinematics and benchtop simulation for a tendon-actuated
galvanometer (TAG) laser-steering end-effector.

A wire stroke rotates a spring-loaded mirror; the mirror steers a reflected
laser across a scan surface.  This package maps stroke to mirror angle and
laser endpoint (and back), estimates mirror angles from silhouette images,
and drives the benchtop-style sweep, steering and calibration analyses.
"""

__version__ = "0.1.0"

from .calibrate import CalibrationResult, calibrate, first_step_norm
from .errors import (
    BeamLimitError,
    EdgeOutsideCropError,
    InsufficientDataError,
    ModelDomainError,
    NoEdgePixelsError,
    ParameterError,
    SingularTransformError,
    UnreachableAngleError,
)
from .imaging import (
    CropRect,
    EdgeLineFit,
    PipelineConfig,
    angle_from_slope,
    canny_edges,
    estimate_angle,
    fit_edge_line,
    threshold_binary,
)
from .kinematics import (
    LaserEndpoint,
    MirrorState,
    delta_x,
    dh_transform,
    elongation_coefficient,
    ik_phi_from_delta_x,
    ik_stroke_from_delta_x,
    incident_angle,
    laser_point,
    phi_from_stroke,
    reflection_angle,
    stroke_from_phi,
)
from .params import (
    DEFAULT_ACTUATOR,
    DEFAULT_GEOMETRY,
    DEFAULT_PARAMS,
    ActuatorConfig,
    LaserGeometry,
    TagParameters,
    load_config,
    motor_from_stroke,
    stroke_from_motor,
    validate_parameters,
)
from .synth import DEFAULT_SCENE, SceneConfig, render_tag_silhouette

__all__ = [
    "__version__",
    "ActuatorConfig",
    "BeamLimitError",
    "CalibrationResult",
    "CropRect",
    "DEFAULT_ACTUATOR",
    "DEFAULT_GEOMETRY",
    "DEFAULT_PARAMS",
    "DEFAULT_SCENE",
    "EdgeLineFit",
    "EdgeOutsideCropError",
    "InsufficientDataError",
    "LaserEndpoint",
    "LaserGeometry",
    "MirrorState",
    "ModelDomainError",
    "NoEdgePixelsError",
    "ParameterError",
    "PipelineConfig",
    "SceneConfig",
    "SingularTransformError",
    "TagParameters",
    "UnreachableAngleError",
    "angle_from_slope",
    "calibrate",
    "canny_edges",
    "delta_x",
    "dh_transform",
    "elongation_coefficient",
    "estimate_angle",
    "first_step_norm",
    "fit_edge_line",
    "ik_phi_from_delta_x",
    "ik_stroke_from_delta_x",
    "incident_angle",
    "laser_point",
    "load_config",
    "motor_from_stroke",
    "phi_from_stroke",
    "reflection_angle",
    "render_tag_silhouette",
    "stroke_from_motor",
    "stroke_from_phi",
    "threshold_binary",
    "validate_parameters",
]
