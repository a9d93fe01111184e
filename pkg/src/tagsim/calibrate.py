"""Fit the stroke-to-angle model to measured (stroke, angle) samples.

The model angle is arcsin((1 - c) * t / l); the fit adjusts the fulcrum
length l and the elongation fraction c by damped Gauss-Newton (step halving
until the residual decreases).  The two parameters only enter through the
effective gain (1 - c) / l, so the Jacobian is rank deficient; the
minimum-norm least-squares step keeps the iterate on the gain manifold
closest to the starting point, which is why the fit is seeded from the
nominal parameters.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import InsufficientDataError, ParameterError
from .params import TagParameters
from .params import elongation_fraction as _elongation_fraction

MAX_ITERATIONS = 100
STEP_NORM_TOL = 1e-10
MIN_STROKE_SPAN_MM = 0.5
MIN_SAMPLES = 4
# out-of-domain arguments get a linear push-back past the arcsin limit so
# the residual stays finite and slopes point back into the domain
PENALTY_SLOPE = 10.0


@dataclass(frozen=True)
class CalibrationResult:
    fulcrum_length_mm: float
    elongation_c: float
    residual_rmse_deg: float
    iterations: int
    converged: bool
    history: tuple  # (iteration, l_mm, c, residual_rmse_deg) per accepted step


def _model_angle(u: float) -> float:
    if u > 1.0:
        return math.pi / 2 + (u - 1.0) * PENALTY_SLOPE
    if u < -1.0:
        return -math.pi / 2 + (u + 1.0) * PENALTY_SLOPE
    return math.asin(u)


def _model_dangle_du(u: float) -> float:
    if abs(u) > 1.0:
        return PENALTY_SLOPE
    return 1.0 / math.sqrt(max(1.0 - u * u, 1e-12))


def _residual_and_jacobian(l, c, strokes, angles):
    n = strokes.size
    r = np.zeros(n)
    J = np.zeros((n, 2))
    for i in range(n):
        t = strokes[i]
        u = (1.0 - c) * t / l
        r[i] = _model_angle(u) - angles[i]
        dadu = _model_dangle_du(u)
        J[i, 0] = dadu * (-(1.0 - c) * t / (l * l))  # d/dl
        J[i, 1] = dadu * (-t / l)  # d/dc
    return r, J


def calibrate(samples, init: TagParameters) -> CalibrationResult:
    """Fit (l, c) to (stroke_mm, angle_rad) samples.

    Needs at least 4 samples spanning at least 0.5 mm of stroke.  Iterates
    until the accepted step norm drops below 1e-10 or 100 iterations; if
    damping cannot find a descent step the best iterate is returned with
    converged=False.
    """
    pts = np.asarray(samples, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] < MIN_SAMPLES:
        raise InsufficientDataError(
            f"need at least {MIN_SAMPLES} (stroke, angle) samples, got {getattr(pts, 'shape', None)}"
        )
    strokes = pts[:, 0]
    angles = pts[:, 1]
    span = strokes.max() - strokes.min()
    if span < MIN_STROKE_SPAN_MM:
        raise InsufficientDataError(
            f"samples span {span:.3f} mm of stroke, need >= {MIN_STROKE_SPAN_MM}"
        )

    l = init.fulcrum_length_mm
    c = _elongation_fraction(init)
    if l <= 0 or not (0.0 <= c < 1.0):
        raise ParameterError(f"bad initial guess l={l}, c={c}")

    def rmse_deg(r):
        return math.degrees(math.sqrt(float(np.mean(r * r))))

    r, J = _residual_and_jacobian(l, c, strokes, angles)
    sse = float(r @ r)
    history = [(0, l, c, rmse_deg(r))]
    converged = False
    iterations = 0

    for iteration in range(1, MAX_ITERATIONS + 1):
        iterations = iteration
        step, *_ = np.linalg.lstsq(J, -r, rcond=None)
        # damp: halve the step until the residual actually decreases
        alpha = 1.0
        accepted = False
        while alpha >= 2.0**-30:
            l_new = l + alpha * step[0]
            c_new = c + alpha * step[1]
            if l_new > 0:
                r_new, J_new = _residual_and_jacobian(l_new, c_new, strokes, angles)
                sse_new = float(r_new @ r_new)
                if sse_new <= sse:
                    accepted = True
                    break
            alpha *= 0.5
        if not accepted:
            break
        step_norm = float(np.hypot(alpha * step[0], alpha * step[1]))
        l, c, r, J, sse = l_new, c_new, r_new, J_new, sse_new
        history.append((iteration, l, c, rmse_deg(r)))
        if step_norm < STEP_NORM_TOL:
            converged = True
            break

    return CalibrationResult(
        fulcrum_length_mm=l,
        elongation_c=c,
        residual_rmse_deg=rmse_deg(r),
        iterations=iterations,
        converged=converged,
        history=tuple(history),
    )


def first_step_norm(samples, init: TagParameters) -> float:
    """Norm of the undamped Gauss-Newton step from the initial guess.

    Zero (to rounding) when the initial guess already fits the samples."""
    pts = np.asarray(samples, dtype=np.float64)
    l = init.fulcrum_length_mm
    c = _elongation_fraction(init)
    r, J = _residual_and_jacobian(l, c, pts[:, 0], pts[:, 1])
    step, *_ = np.linalg.lstsq(J, -r, rcond=None)
    return float(np.hypot(step[0], step[1]))
