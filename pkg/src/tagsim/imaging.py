"""Angle estimation from grayscale silhouette images.

Pipeline: crop -> binary threshold -> Canny-style edge detection -> least
squares line fit -> slope-to-angle conversion.  Images are row-major 2D
uint8 arrays throughout.

The edge detector is implemented in-house so its numbers are pinned:

* smoothing: Gaussian, kernel size = aperture, fixed sigma (default 1.0);
* gradient: binomially smoothed central-difference kernels of the
  configured aperture, scaled so an ideal unit-height intensity step peaks
  at gradient magnitude 1.0 per axis (a clean 0/255 edge therefore lands
  well above the default strong threshold of 150);
* non-maximum suppression over 4 direction sectors with a deterministic
  tie-break (see kernels.nonmax_suppress);
* 8-connected double-threshold hysteresis, seeds >= high, growth >= low.
"""

import csv
import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import InsufficientDataError, NoEdgePixelsError, ParameterError

DEFAULT_THRESHOLD = 125
DEFAULT_CANNY_LOW = 100.0
DEFAULT_CANNY_HIGH = 150.0
DEFAULT_APERTURE = 7


@dataclass(frozen=True)
class CropRect:
    """Axis-aligned crop window in pixel coordinates (x right, y down)."""

    x: int
    y: int
    width: int
    height: int

    def slices(self):
        return slice(self.y, self.y + self.height), slice(self.x, self.x + self.width)


@dataclass(frozen=True)
class PipelineConfig:
    crop: CropRect
    threshold: int = DEFAULT_THRESHOLD
    canny_low: float = DEFAULT_CANNY_LOW
    canny_high: float = DEFAULT_CANNY_HIGH
    canny_aperture: int = DEFAULT_APERTURE
    smooth_sigma: float = 1.0

    def __post_init__(self):
        if not (0 < self.canny_low < self.canny_high):
            raise ParameterError(
                f"need 0 < low < high, got {self.canny_low}, {self.canny_high}"
            )
        if self.canny_aperture < 3 or self.canny_aperture % 2 == 0:
            raise ParameterError(f"aperture must be odd and >= 3, got {self.canny_aperture}")
        if not (0 <= self.threshold <= 255):
            raise ParameterError(f"threshold must be in [0, 255], got {self.threshold}")
        if self.crop.width <= 0 or self.crop.height <= 0 or self.crop.x < 0 or self.crop.y < 0:
            raise ParameterError(f"bad crop rectangle {self.crop}")
        if self.smooth_sigma < 0:
            raise ParameterError(f"smooth_sigma must be >= 0, got {self.smooth_sigma}")


@dataclass(frozen=True)
class EdgeLineFit:
    """Least-squares line through edge pixels, row = slope*col + intercept."""

    slope: float
    intercept: float
    inlier_count: int
    fit_residual_rms: float
    degenerate_vertical: bool = False


def as_gray(img) -> np.ndarray:
    img = np.asarray(img)
    if img.ndim != 2 or img.dtype != np.uint8:
        raise ParameterError(f"expected 2D uint8 image, got {img.dtype} shape {img.shape}")
    return img


def crop_image(img, crop: CropRect) -> np.ndarray:
    img = as_gray(img)
    h, w = img.shape
    if crop.x + crop.width > w or crop.y + crop.height > h:
        raise ParameterError(f"crop {crop} exceeds image bounds {w}x{h}")
    rs, cs = crop.slices()
    return img[rs, cs]


def threshold_binary(img, cut: int = DEFAULT_THRESHOLD) -> np.ndarray:
    """Map intensities > cut to 255 and <= cut to 0."""
    img = as_gray(img)
    out = np.zeros_like(img)
    out[img > cut] = 255
    return out


def gaussian_kernel(size: int, sigma: float) -> np.ndarray:
    if size < 1 or size % 2 == 0:
        raise ParameterError(f"kernel size must be odd and >= 1, got {size}")
    if sigma <= 0:
        raise ParameterError(f"sigma must be > 0, got {sigma}")
    x = np.arange(size, dtype=np.float64) - (size - 1) / 2.0
    k = np.exp(-(x**2) / (2.0 * sigma**2))
    return k / k.sum()


def _pascal_row(n: int) -> np.ndarray:
    row = np.array([1.0])
    for _ in range(n):
        row = np.convolve(row, [1.0, 1.0])
    return row


def gradient_kernels(aperture: int) -> tuple[np.ndarray, np.ndarray]:
    """(derivative, smoothing) 1D kernels for the given odd aperture.

    The derivative kernel is a binomial-smoothed central difference, scaled
    so its peak response to a unit step is exactly 1; the smoothing kernel
    is the binomial row normalized to unit sum.
    """
    if aperture < 3 or aperture % 2 == 0:
        raise ParameterError(f"aperture must be odd and >= 3, got {aperture}")
    deriv = np.convolve(_pascal_row(aperture - 3), [1.0, 0.0, -1.0])
    # peak step response = largest partial sum from the positive end
    step_peak = np.max(np.cumsum(deriv))
    deriv = deriv / step_peak
    smooth = _pascal_row(aperture - 1)
    return deriv, smooth / smooth.sum()


def gradients(img, aperture: int = DEFAULT_APERTURE, smooth_sigma: float = 1.0):
    """(gx, gy, magnitude) float64 gradient fields of a grayscale image."""
    f = np.asarray(img, dtype=np.float64)
    if smooth_sigma > 0:
        g = gaussian_kernel(aperture, smooth_sigma)
        f = kernels.separable_correlate(f, g, g)
    deriv, smooth = gradient_kernels(aperture)
    gx = kernels.separable_correlate(f, deriv, smooth)
    gy = kernels.separable_correlate(f, smooth, deriv)
    return gx, gy, np.hypot(gx, gy)


def canny_edges(
    img,
    low: float = DEFAULT_CANNY_LOW,
    high: float = DEFAULT_CANNY_HIGH,
    aperture: int = DEFAULT_APERTURE,
    smooth_sigma: float = 1.0,
) -> np.ndarray:
    """Edge pixel coordinates as an (N, 2) int array of (row, col).

    Returns an empty (0, 2) array when nothing clears the thresholds
    (e.g. a uniform image has zero gradient everywhere).
    """
    gx, gy, mag = gradients(img, aperture, smooth_sigma)
    crest = kernels.nonmax_suppress(mag, gx, gy)
    edge = kernels.hysteresis(crest, low, high)
    rows, cols = np.nonzero(edge)
    return np.column_stack([rows, cols]).astype(np.int64)


def fit_edge_line(points) -> EdgeLineFit:
    """Ordinary least squares of row on column over (row, col) points.

    A near-vertical edge (no column spread) cannot be expressed as
    row = m*col + b; it is reported with degenerate_vertical instead of a
    division blow-up.
    """
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] < 2:
        raise InsufficientDataError(
            f"need at least 2 (row, col) points, got shape {getattr(pts, 'shape', None)}"
        )
    rows = pts[:, 0]
    cols = pts[:, 1]
    n = pts.shape[0]
    col_mean = cols.mean()
    row_mean = rows.mean()
    sxx = np.sum((cols - col_mean) ** 2)
    if sxx < 1e-9:
        residual = float(np.sqrt(np.mean((cols - col_mean) ** 2)))
        return EdgeLineFit(
            slope=math.inf,
            intercept=math.nan,
            inlier_count=n,
            fit_residual_rms=residual,
            degenerate_vertical=True,
        )
    slope = float(np.sum((cols - col_mean) * (rows - row_mean)) / sxx)
    intercept = float(row_mean - slope * col_mean)
    residual = float(np.sqrt(np.mean((rows - (slope * cols + intercept)) ** 2)))
    return EdgeLineFit(
        slope=slope,
        intercept=intercept,
        inlier_count=n,
        fit_residual_rms=residual,
    )


def angle_from_slope(fit: EdgeLineFit) -> float:
    """Edge angle from horizontal in degrees: 90 - atan(|1/m|).

    m = 0 maps to 0 deg (atan of the infinite reciprocal is 90); a
    degenerate vertical fit maps to 90 deg.
    """
    if fit.degenerate_vertical:
        return 90.0
    if fit.slope == 0.0:
        return 0.0
    return 90.0 - math.degrees(math.atan(abs(1.0 / fit.slope)))


def estimate_angle(img, cfg: PipelineConfig) -> float:
    """Full pipeline: crop, threshold, edge filter, line fit, angle (deg)."""
    cropped = crop_image(img, cfg.crop)
    binary = threshold_binary(cropped, cfg.threshold)
    points = canny_edges(
        binary, cfg.canny_low, cfg.canny_high, cfg.canny_aperture, cfg.smooth_sigma
    )
    if points.shape[0] == 0:
        raise NoEdgePixelsError("no edge pixels detected in crop")
    return angle_from_slope(fit_edge_line(points))


def write_edge_csv(path, points) -> None:
    """Dump edge pixels as a (col, row) CSV."""
    pts = np.asarray(points)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["col", "row"])
        for r, c in pts:
            writer.writerow([int(c), int(r)])
