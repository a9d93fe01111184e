"""Stroke-to-angle and mirror-to-laser-endpoint kinematics.

The mechanism turns a linear wire stroke t_s into a mirror rotation phi
through a lever of length l, reduced by elastic stretch of the wire:

    phi(t_s) = arcsin((1 - c) * t_s / l),   c = 2*Ks*L / (E*pi*r^2)

The mirror sits at 45 deg at rest, so the laser incident angle is
45 deg + phi, and by the law of reflection the reflected beam deflects by
theta1 = 2*phi.  Treating the beam segments v1 (source to mirror) and v2
(mirror to scan surface) as links gives the endpoint in the tool-tip frame:

    p = (v1 - v2*tan(theta1), v2, 0)

All angles here are radians; degrees only appear at I/O boundaries.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import params as _params
from . import transforms
from .errors import BeamLimitError, SingularTransformError, UnreachableAngleError
from .params import LaserGeometry, TagParameters


@dataclass(frozen=True)
class MirrorState:
    """Mirror pose for one stroke value (angles in radians)."""

    stroke_mm: float
    phi_rad: float
    incident_angle_rad: float


@dataclass(frozen=True, eq=False)
class LaserEndpoint:
    """Reflected-beam endpoint on the scan surface.

    position_mm is a 3-vector in `frame` ("tip" or "base"); theta1_rad is
    the beam deflection from the rest direction.
    """

    position_mm: np.ndarray
    theta1_rad: float
    frame: str


def elongation_coefficient(p: TagParameters) -> float:
    """Stroke-independent wire stretch fraction c = 2*Ks*L / (E*pi*r^2).

    c is the portion of commanded stroke lost to elastic elongation; the
    rigid-tendon limit is c = 0.  Values >= 1 mean the wire stretches more
    than it pulls and the model (and its arcsin inversion) breaks down.
    """
    c = _params.elongation_fraction(p)
    if c >= 1.0:
        raise UnreachableAngleError(
            f"elongation fraction {c:.4f} >= 1: wire too compliant for the stroke model"
        )
    return c


def phi_from_stroke(t_s: float, p: TagParameters) -> float:
    """Mirror rotation (rad) for a wire stroke t_s (mm).

    Monotonically increasing on [0, max_stroke].  Raises if the effective
    stroke exceeds the lever throw ((1-c)*t_s/l > 1).
    """
    if not math.isfinite(t_s) or t_s < 0:
        raise UnreachableAngleError(f"stroke must be finite and >= 0, got {t_s!r}")
    c = elongation_coefficient(p)
    arg = (1.0 - c) * t_s / p.fulcrum_length_mm
    if arg > 1.0:
        raise UnreachableAngleError(
            f"stroke {t_s} mm is unreachable: arcsin argument {arg:.4f} > 1"
        )
    return math.asin(arg)


def stroke_from_phi(phi: float, p: TagParameters) -> float:
    """Wire stroke (mm) that produces mirror rotation phi (rad).

    Inverse of phi_from_stroke: t_s = l*sin(phi) / (1 - c).
    """
    if not (0.0 <= phi < math.pi / 2):
        raise UnreachableAngleError(f"phi must lie in [0, pi/2), got {phi!r}")
    c = elongation_coefficient(p)
    return p.fulcrum_length_mm * math.sin(phi) / (1.0 - c)


def incident_angle(t_s: float, p: TagParameters) -> float:
    """Laser incident angle (rad): rest angle plus mirror rotation."""
    return math.radians(p.rest_incident_deg) + phi_from_stroke(t_s, p)


def mirror_state_from_stroke(t_s: float, p: TagParameters) -> MirrorState:
    phi = phi_from_stroke(t_s, p)
    return MirrorState(
        stroke_mm=t_s,
        phi_rad=phi,
        incident_angle_rad=math.radians(p.rest_incident_deg) + phi,
    )


def reflection_angle(phi: float) -> float:
    """Beam deflection theta1 = 2*phi (law-of-reflection doubling).

    phi must stay below pi/4 so the reflected beam still crosses the scan
    plane; at phi >= pi/4 the beam runs parallel to (or away from) it.
    """
    if not (0.0 <= phi < math.pi / 4):
        raise BeamLimitError(
            f"phi={phi!r} rad: beam leaves the scan half-plane at phi >= pi/4"
        )
    return 2.0 * phi


def dh_transform(theta1: float, g: LaserGeometry) -> np.ndarray:
    """Tool-tip-to-laser-endpoint transform as a three-row DH chain.

    Rows: a fixed translation a=v1 along x, a revolute joint (theta1,
    alpha=-pi/2), and a prismatic offset d = v2/cos(theta1).  The cosine in
    the denominator stretches the last link so it represents the actual
    beam length to the surface rather than a fixed-length link.
    """
    if abs(theta1) >= math.pi / 2:
        raise SingularTransformError(
            f"theta1={theta1!r} rad: beam length diverges at +/-pi/2"
        )
    rows = (
        transforms.dh_matrix(0.0, 0.0, g.v1_mm, 0.0),
        transforms.dh_matrix(theta1, 0.0, 0.0, -math.pi / 2),
        transforms.dh_matrix(0.0, g.v2_mm / math.cos(theta1), 0.0, 0.0),
    )
    return transforms.compose(*rows)


def dh_transform_closed_form(theta1: float, g: LaserGeometry) -> np.ndarray:
    """Closed-form equivalent of dh_transform (used as a cross-check)."""
    if abs(theta1) >= math.pi / 2:
        raise SingularTransformError(
            f"theta1={theta1!r} rad: beam length diverges at +/-pi/2"
        )
    c, s = math.cos(theta1), math.sin(theta1)
    return np.array(
        [
            [c, 0.0, -s, g.v1_mm - g.v2_mm * math.tan(theta1)],
            [s, 0.0, c, g.v2_mm],
            [0.0, -1.0, 0.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
        ]
    )


def laser_point(phi: float, g: LaserGeometry, frame: str = "tip") -> LaserEndpoint:
    """Laser endpoint on the scan surface for mirror rotation phi.

    In the tip frame the point is (v1 - v2*tan(2*phi), v2, 0); increasing
    phi moves it toward -x.  frame="base" additionally applies the
    configured base transform.  The closed form is used so the scan-plane
    coordinates come out exact; the DH chain agrees with it to 1e-12.
    """
    theta1 = reflection_angle(phi)
    point = dh_transform_closed_form(theta1, g)[:3, 3]
    if frame == "tip":
        return LaserEndpoint(position_mm=point, theta1_rad=theta1, frame="tip")
    if frame == "base":
        return LaserEndpoint(
            position_mm=transforms.apply_point(g.base_transform, point),
            theta1_rad=theta1,
            frame="base",
        )
    raise ValueError(f"frame must be 'tip' or 'base', got {frame!r}")


def delta_x(phi: float, g: LaserGeometry) -> float:
    """Unsigned endpoint displacement |x(phi) - x(0)| = v2*tan(2*phi) in mm."""
    x0 = laser_point(0.0, g).position_mm[0]
    x = laser_point(phi, g).position_mm[0]
    return float(abs(x - x0))


def ik_phi_from_delta_x(dx: float, g: LaserGeometry) -> float:
    """Mirror rotation that displaces the endpoint by dx: phi = atan(dx/v2)/2."""
    if not math.isfinite(dx) or dx < 0:
        raise BeamLimitError(f"dx must be finite and >= 0, got {dx!r}")
    return 0.5 * math.atan(dx / g.v2_mm)


def ik_stroke_from_delta_x(dx: float, g: LaserGeometry, p: TagParameters) -> float:
    """Wire stroke that displaces the endpoint by dx (full inverse chain)."""
    return stroke_from_phi(ik_phi_from_delta_x(dx, g), p)
