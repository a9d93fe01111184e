"""Binary PGM (P5) image I/O, 8-bit, for bit-exact fixtures."""

import numpy as np

from .errors import ParameterError


def read_pgm(path) -> np.ndarray:
    """Read an 8-bit binary PGM file into a 2D uint8 array."""
    with open(path, "rb") as fh:
        data = fh.read()

    # header: magic, width, height, maxval as whitespace-separated tokens,
    # '#' comments allowed between them, then a single whitespace byte
    # before the raster
    tokens = []
    pos = 0
    while len(tokens) < 4:
        if pos >= len(data):
            raise ParameterError(f"{path}: truncated PGM header")
        ch = data[pos : pos + 1]
        if ch == b"#":
            eol = data.find(b"\n", pos)
            pos = len(data) if eol < 0 else eol + 1
        elif ch.isspace():
            pos += 1
        else:
            end = pos
            while end < len(data) and not data[end : end + 1].isspace():
                end += 1
            tokens.append(data[pos:end])
            pos = end
    pos += 1  # single whitespace separating header from raster

    if tokens[0] != b"P5":
        raise ParameterError(f"{path}: not a binary PGM (magic {tokens[0]!r})")
    width, height, maxval = int(tokens[1]), int(tokens[2]), int(tokens[3])
    if maxval != 255:
        raise ParameterError(f"{path}: only 8-bit PGM supported, maxval={maxval}")
    raster = data[pos : pos + width * height]
    if len(raster) != width * height:
        raise ParameterError(f"{path}: raster truncated ({len(raster)} of {width * height})")
    return np.frombuffer(raster, dtype=np.uint8).reshape(height, width).copy()


def write_pgm(path, img: np.ndarray) -> None:
    """Write a 2D uint8 array as binary PGM."""
    img = np.asarray(img)
    if img.ndim != 2 or img.dtype != np.uint8:
        raise ParameterError(f"expected 2D uint8 image, got {img.dtype} shape {img.shape}")
    h, w = img.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
        fh.write(np.ascontiguousarray(img).tobytes())
