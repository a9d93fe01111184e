"""Per-pixel kernels for rasterization and edge detection.

Each hot loop exists twice: a numba @njit version and a vectorized
pure-numpy version with identical output (the test suite asserts bitwise
equality).  The numba path is the default; set TAGSIM_DISABLE_NUMBA=1 (or
NUMBA_DISABLE_JIT, which would make the jitted loops pointless anyway) to
force the numpy fallback.  benchmarks/bench_kernels.py times both.
"""

import os

import numpy as np

# Direction sectors are picked from |gy|/|gx| against tan(22.5/67.5 deg)
# instead of atan2 so both implementations compare the same products.
_TAN_22_5 = 0.41421356237309503
_TAN_67_5 = 2.414213562373095


def _numba_wanted() -> bool:
    if os.environ.get("TAGSIM_DISABLE_NUMBA", ""):
        return False
    if os.environ.get("NUMBA_DISABLE_JIT", ""):
        return False
    try:
        import numba  # noqa: F401
    except ImportError:
        return False
    return True


USING_NUMBA = _numba_wanted()


# --- convex polygon fill --------------------------------------------------


def _fill_convex_polygon_numpy(height, width, verts):
    """Mask of pixels whose integer centers lie inside (or on) the polygon.

    verts is an (N, 2) float array of (x, y) corners in consistent winding;
    a point is inside when every edge cross product is >= 0.
    """
    verts = np.asarray(verts, dtype=np.float64)
    cols = np.arange(width, dtype=np.float64)[None, :]
    rows = np.arange(height, dtype=np.float64)[:, None]
    inside = np.ones((height, width), dtype=bool)
    n = verts.shape[0]
    for i in range(n):
        x0, y0 = verts[i]
        x1, y1 = verts[(i + 1) % n]
        ex, ey = x1 - x0, y1 - y0
        inside &= ex * (rows - y0) - ey * (cols - x0) >= 0.0
    out = np.zeros((height, width), dtype=np.uint8)
    out[inside] = 255
    return out


def _fill_convex_polygon_loops(height, width, verts):
    out = np.zeros((height, width), dtype=np.uint8)
    n = verts.shape[0]
    for r in range(height):
        for c in range(width):
            inside = True
            for i in range(n):
                x0 = verts[i, 0]
                y0 = verts[i, 1]
                x1 = verts[(i + 1) % n, 0]
                y1 = verts[(i + 1) % n, 1]
                ex = x1 - x0
                ey = y1 - y0
                if ex * (r - y0) - ey * (c - x0) < 0.0:
                    inside = False
                    break
            if inside:
                out[r, c] = 255
    return out


# --- non-maximum suppression ----------------------------------------------


def _nms_numpy(mag, gx, gy):
    """Keep gradient-magnitude crest pixels.

    A pixel survives when its magnitude is >= the neighbor on the negative
    side of its gradient sector and strictly > the one on the positive
    side; the strict side breaks the two-pixel tie a symmetric step edge
    produces, leaving a single-pixel crest.  The 1-pixel border is dropped.
    """
    h, w = mag.shape
    out = np.zeros_like(mag)
    if h < 3 or w < 3:
        return out

    ax = np.abs(gx)
    ay = np.abs(gy)
    horiz = ay < _TAN_22_5 * ax
    vert = ay > _TAN_67_5 * ax
    diag = ~horiz & ~vert
    diag_main = diag & (gx * gy >= 0.0)
    diag_anti = diag & (gx * gy < 0.0)

    m = mag[1:-1, 1:-1]

    def shifted(dr, dc):
        return mag[1 + dr : h - 1 + dr, 1 + dc : w - 1 + dc]

    keep = np.zeros_like(m, dtype=bool)
    for sector, (pdr, pdc), (ndr, ndc) in (
        (horiz, (0, -1), (0, 1)),
        (diag_main, (-1, -1), (1, 1)),
        (vert, (-1, 0), (1, 0)),
        (diag_anti, (-1, 1), (1, -1)),
    ):
        sel = sector[1:-1, 1:-1]
        keep |= sel & (m >= shifted(pdr, pdc)) & (m > shifted(ndr, ndc))
    out[1:-1, 1:-1][keep] = m[keep]
    return out


def _nms_loops(mag, gx, gy):
    h, w = mag.shape
    out = np.zeros_like(mag)
    for r in range(1, h - 1):
        for c in range(1, w - 1):
            m = mag[r, c]
            ax = abs(gx[r, c])
            ay = abs(gy[r, c])
            if ay < _TAN_22_5 * ax:
                pdr, pdc, ndr, ndc = 0, -1, 0, 1
            elif ay > _TAN_67_5 * ax:
                pdr, pdc, ndr, ndc = -1, 0, 1, 0
            elif gx[r, c] * gy[r, c] >= 0.0:
                pdr, pdc, ndr, ndc = -1, -1, 1, 1
            else:
                pdr, pdc, ndr, ndc = -1, 1, 1, -1
            if m >= mag[r + pdr, c + pdc] and m > mag[r + ndr, c + ndc]:
                out[r, c] = m
    return out


# --- hysteresis thresholding ----------------------------------------------


def _hysteresis_numpy(mag, low, high):
    """8-connected hysteresis: seeds are mag >= high, growth through
    mag >= low, implemented as iterated dilation until a fixed point."""
    strong = mag >= high
    weak = mag >= low
    edge = strong.copy()
    while True:
        grown = np.zeros_like(edge)
        grown[1:, :] |= edge[:-1, :]
        grown[:-1, :] |= edge[1:, :]
        grown[:, 1:] |= edge[:, :-1]
        grown[:, :-1] |= edge[:, 1:]
        grown[1:, 1:] |= edge[:-1, :-1]
        grown[1:, :-1] |= edge[:-1, 1:]
        grown[:-1, 1:] |= edge[1:, :-1]
        grown[:-1, :-1] |= edge[1:, 1:]
        grown &= weak
        grown &= ~edge
        if not grown.any():
            return edge
        edge |= grown


def _hysteresis_loops(mag, low, high):
    h, w = mag.shape
    out = np.zeros((h, w), dtype=np.bool_)
    stack = np.empty((h * w, 2), dtype=np.int64)
    top = 0
    for r in range(h):
        for c in range(w):
            if mag[r, c] >= high:
                out[r, c] = True
                stack[top, 0] = r
                stack[top, 1] = c
                top += 1
    while top > 0:
        top -= 1
        r = stack[top, 0]
        c = stack[top, 1]
        for dr in range(-1, 2):
            for dc in range(-1, 2):
                rr = r + dr
                cc = c + dc
                if 0 <= rr < h and 0 <= cc < w and not out[rr, cc] and mag[rr, cc] >= low:
                    out[rr, cc] = True
                    stack[top, 0] = rr
                    stack[top, 1] = cc
                    top += 1
    return out


# --- separable convolution (numpy on both paths; BLAS-fast already) --------


def separable_correlate(img, kernel_x, kernel_y):
    """Correlate rows with kernel_x then columns with kernel_y (no flip, so
    an antisymmetric derivative kernel keeps its sign convention).

    Edge-replicate padding: flat regions stay flat right up to the border,
    so image edges never fake a gradient.  Kernels must have odd length.
    """
    img = np.asarray(img, dtype=np.float64)
    kx = np.asarray(kernel_x, dtype=np.float64)
    ky = np.asarray(kernel_y, dtype=np.float64)
    rx = kx.size // 2
    ry = ky.size // 2
    padded = np.pad(img, ((ry, ry), (rx, rx)), mode="edge")
    h, w = img.shape
    mid = np.zeros((h + 2 * ry, w), dtype=np.float64)
    for k in range(kx.size):
        mid += kx[k] * padded[:, k : k + w]
    out = np.zeros((h, w), dtype=np.float64)
    for k in range(ky.size):
        out += ky[k] * mid[k : k + h, :]
    return out


if USING_NUMBA:
    from numba import njit

    _fill_convex_polygon_numba = njit(cache=True)(_fill_convex_polygon_loops)
    _nms_numba = njit(cache=True)(_nms_loops)
    _hysteresis_numba = njit(cache=True)(_hysteresis_loops)

    def fill_convex_polygon(height, width, verts):
        return _fill_convex_polygon_numba(
            height, width, np.ascontiguousarray(verts, dtype=np.float64)
        )

    def nonmax_suppress(mag, gx, gy):
        return _nms_numba(mag, gx, gy)

    def hysteresis(mag, low, high):
        return _hysteresis_numba(mag, float(low), float(high))

else:

    def fill_convex_polygon(height, width, verts):
        return _fill_convex_polygon_numpy(
            height, width, np.ascontiguousarray(verts, dtype=np.float64)
        )

    def nonmax_suppress(mag, gx, gy):
        return _nms_numpy(mag, gx, gy)

    def hysteresis(mag, low, high):
        return _hysteresis_numpy(mag, float(low), float(high))


fill_convex_polygon.__doc__ = _fill_convex_polygon_numpy.__doc__
nonmax_suppress.__doc__ = _nms_numpy.__doc__
hysteresis.__doc__ = _hysteresis_numpy.__doc__
