"""Synthetic benchtop scenes: the mirror-holder silhouette as seen by the
overhead camera.

The holder is drawn as a bright convex quadrilateral on a black background,
rotated about a pivot pixel.  The default scene is sized so that, for every
rotation the pipeline is rated for, the analysis crop contains exactly one
silhouette boundary: the holder's top edge.  The other three sides stay
outside the crop, mirroring a benchtop camera framing where only the edge
of interest is in view.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import EdgeOutsideCropError, ParameterError
from .imaging import CropRect, PipelineConfig


@dataclass(frozen=True)
class SceneConfig:
    """Geometry of the rendered scene, in pixels.

    pivot_x/pivot_y  rotation center (the holder's physical stop)
    edge_len         length of the measured top edge
    thickness        holder depth below the top edge; deep enough that the
                     bottom edge stays below the crop at max rotation
    """

    width: int = 600
    height: int = 600
    pivot_x: float = 40.0
    pivot_y: float = 320.0
    edge_len: float = 480.0
    thickness: float = 240.0
    crop: CropRect = CropRect(x=160, y=40, width=200, height=300)

    def pipeline_config(self, **overrides) -> PipelineConfig:
        return PipelineConfig(crop=self.crop, **overrides)


DEFAULT_SCENE = SceneConfig()

MAX_RENDER_PHI_RAD = math.radians(40.0)


def holder_vertices(phi: float, scene: SceneConfig) -> np.ndarray:
    """Quadrilateral corners (x, y) for rotation phi, y pointing down.

    The top edge runs from the pivot toward +x and tilts up by phi; the
    holder body hangs `thickness` below it.
    """
    ex, ey = math.cos(phi), -math.sin(phi)  # along the top edge
    dx, dy = math.sin(phi), math.cos(phi)  # into the holder body
    p = np.array([scene.pivot_x, scene.pivot_y])
    e = scene.edge_len * np.array([ex, ey])
    d = scene.thickness * np.array([dx, dy])
    return np.array([p, p + e, p + e + d, p + d])


def render_tag_silhouette(
    phi: float,
    scene: SceneConfig = DEFAULT_SCENE,
    noise_sigma: float = 0.0,
    seed: int = 0,
    check_crop: bool = True,
) -> np.ndarray:
    """Render the holder silhouette at mirror rotation phi (radians).

    Optionally adds seeded Gaussian intensity noise (clamped to [0, 255]);
    identical inputs give bit-identical images.  With check_crop, raises
    EdgeOutsideCropError when the top edge no longer crosses the full
    analysis crop strictly inside its bounds.
    """
    if not (0.0 <= phi <= MAX_RENDER_PHI_RAD):
        raise ParameterError(
            f"phi={phi!r} rad outside the renderable range [0, 40 deg]"
        )
    if scene.width <= 0 or scene.height <= 0:
        raise ParameterError("image dimensions must be positive")
    verts = holder_vertices(phi, scene)
    img = kernels.fill_convex_polygon(scene.height, scene.width, verts)
    if check_crop:
        _require_edge_in_crop(img, scene.crop)
    if noise_sigma > 0.0:
        rng = np.random.default_rng(seed)
        noisy = img.astype(np.float64) + rng.normal(0.0, noise_sigma, img.shape)
        img = np.clip(np.rint(noisy), 0, 255).astype(np.uint8)
    return img


def _require_edge_in_crop(img: np.ndarray, crop: CropRect) -> None:
    """Every crop column must contain the silhouette boundary strictly
    inside the crop: some white below, some black above."""
    rs, cs = crop.slices()
    window = img[rs, cs]
    white = window == 255
    covered = white.any(axis=0)
    if not covered.all():
        raise EdgeOutsideCropError("silhouette missing from part of the crop window")
    top = white.argmax(axis=0)
    if (top == 0).any():
        raise EdgeOutsideCropError("silhouette edge clipped at the top of the crop window")
