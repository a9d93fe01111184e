"""Benchmark the numba kernels against the pure-numpy fallbacks.

Runs both implementations of each hot kernel on benchtop-sized inputs and
prints per-call times plus the speedup.  The numba path needs one warmup
call per function for JIT compilation (cached across runs).

Usage: python benchmarks/bench_kernels.py [--repeats N]
"""

import argparse
import math
import time

import numpy as np

from tagsim import imaging, kernels, synth
from tagsim.kernels import (
    _fill_convex_polygon_numpy,
    _hysteresis_numpy,
    _nms_numpy,
)

if kernels.USING_NUMBA:
    from tagsim.kernels import (
        _fill_convex_polygon_numba,
        _hysteresis_numba,
        _nms_numba,
    )


def timeit(fn, args, repeats):
    best = math.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def bench(name, numba_fn, numpy_fn, args, repeats):
    t_np = timeit(numpy_fn, args, repeats)
    if numba_fn is None:
        print(f"{name:<22} numpy {t_np * 1e3:8.3f} ms   numba     n/a")
        return
    numba_fn(*args)  # warmup / compile
    t_nb = timeit(numba_fn, args, repeats)
    print(
        f"{name:<22} numpy {t_np * 1e3:8.3f} ms   numba {t_nb * 1e3:8.3f} ms"
        f"   speedup {t_np / t_nb:6.1f}x"
    )


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()
    repeats = args.repeats

    scene = synth.DEFAULT_SCENE
    cfg = scene.pipeline_config()
    phi = math.radians(20.0)
    verts = synth.holder_vertices(phi, scene)

    img = synth.render_tag_silhouette(phi, scene)
    binary = imaging.threshold_binary(imaging.crop_image(img, cfg.crop), cfg.threshold)
    gx, gy, mag = imaging.gradients(binary, cfg.canny_aperture, cfg.smooth_sigma)
    crest = kernels.nonmax_suppress(mag, gx, gy)

    print(f"numba available: {kernels.USING_NUMBA}")
    print(f"scene {scene.width}x{scene.height}, crop {cfg.crop.width}x{cfg.crop.height}\n")

    if kernels.USING_NUMBA:
        bench(
            "fill_convex_polygon",
            lambda v: _fill_convex_polygon_numba(scene.height, scene.width, v),
            lambda v: _fill_convex_polygon_numpy(scene.height, scene.width, v),
            (np.ascontiguousarray(verts),),
            repeats,
        )
        bench("nonmax_suppress", _nms_numba, _nms_numpy, (mag, gx, gy), repeats)
        bench(
            "hysteresis",
            _hysteresis_numba,
            _hysteresis_numpy,
            (crest, cfg.canny_low, cfg.canny_high),
            repeats,
        )
    else:
        bench(
            "fill_convex_polygon",
            None,
            lambda v: _fill_convex_polygon_numpy(scene.height, scene.width, v),
            (np.ascontiguousarray(verts),),
            repeats,
        )
        bench("nonmax_suppress", None, _nms_numpy, (mag, gx, gy), repeats)
        bench(
            "hysteresis",
            None,
            _hysteresis_numpy,
            (crest, cfg.canny_low, cfg.canny_high),
            repeats,
        )

    # end to end through whichever path is active
    def full_pipeline():
        frame = synth.render_tag_silhouette(phi, scene)
        return imaging.estimate_angle(frame, cfg)

    t = timeit(lambda: full_pipeline(), (), repeats)
    label = "numba" if kernels.USING_NUMBA else "numpy"
    print(f"\nrender + estimate ({label} path): {t * 1e3:.2f} ms per frame")


if __name__ == "__main__":
    main()
