"""Rigid 4x4 homogeneous transforms.

Transforms are plain (4, 4) float64 arrays: a 3x3 rotation block R in the
top-left, a 3x1 translation in the top-right, bottom row exactly
(0, 0, 0, 1).  Functions here construct, validate, compose and invert them.
"""

import numpy as np

from .errors import SingularTransformError

ORTHONORMAL_TOL = 1e-9


def identity() -> np.ndarray:
    return np.eye(4)


def make_transform(rotation, translation) -> np.ndarray:
    """Assemble a 4x4 transform from a 3x3 rotation and a 3-vector."""
    H = np.eye(4)
    H[:3, :3] = np.asarray(rotation, dtype=float)
    H[:3, 3] = np.asarray(translation, dtype=float)
    return H


def rotation_block(H: np.ndarray) -> np.ndarray:
    return H[:3, :3]


def translation(H: np.ndarray) -> np.ndarray:
    return H[:3, 3]


def is_rigid(H, tol: float = ORTHONORMAL_TOL) -> bool:
    """True if H is 4x4, R is orthonormal with det +1 within tol, and the
    bottom row is exactly (0, 0, 0, 1)."""
    H = np.asarray(H)
    if H.shape != (4, 4):
        return False
    if not np.array_equal(H[3], np.array([0.0, 0.0, 0.0, 1.0])):
        return False
    R = H[:3, :3]
    if np.max(np.abs(R.T @ R - np.eye(3))) > tol:
        return False
    if abs(np.linalg.det(R) - 1.0) > tol:
        return False
    return True


def require_rigid(H, tol: float = ORTHONORMAL_TOL) -> np.ndarray:
    H = np.asarray(H, dtype=float)
    if not is_rigid(H, tol):
        raise SingularTransformError("matrix is not a rigid transform")
    return H


def compose(*transforms: np.ndarray) -> np.ndarray:
    """Left-to-right product H1 @ H2 @ ... (apply rightmost first)."""
    out = np.eye(4)
    for H in transforms:
        out = out @ H
    return out


def invert(H: np.ndarray) -> np.ndarray:
    """Closed-form rigid inverse: [R^T, -R^T p]."""
    R = H[:3, :3]
    p = H[:3, 3]
    return make_transform(R.T, -R.T @ p)


def apply_point(H: np.ndarray, point) -> np.ndarray:
    """Map a 3-vector through H."""
    p = np.asarray(point, dtype=float)
    return H[:3, :3] @ p + H[:3, 3]


def dh_matrix(theta: float, d: float, a: float, alpha: float) -> np.ndarray:
    """Single Denavit-Hartenberg link matrix for joint parameters
    (theta, d, a, alpha), angles in radians."""
    ct, st = np.cos(theta), np.sin(theta)
    ca, sa = np.cos(alpha), np.sin(alpha)
    return np.array(
        [
            [ct, -st * ca, st * sa, a * ct],
            [st, ct * ca, -ct * sa, a * st],
            [0.0, sa, ca, d],
            [0.0, 0.0, 0.0, 1.0],
        ]
    )
