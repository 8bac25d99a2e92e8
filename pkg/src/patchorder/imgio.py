"""Image file IO for grayscale PGM (binary P5, 8 or 16 bit) and PNG.

All readers return float64 arrays mapped to [0, 1] by dividing by the
container maximum (255 or 65535).  Writers clip to [0, 1] before quantizing.
PGM is parsed and emitted directly; PNG goes through Pillow.
"""

from __future__ import annotations

import os
import re

import numpy as np

from .image import as_image

__all__ = ["read_image", "write_image", "read_pgm", "write_pgm", "read_png", "write_png"]


def read_pgm(path) -> np.ndarray:
    """Read a binary PGM (P5) file and map intensities to [0, 1]."""
    with open(path, "rb") as fh:
        raw = fh.read()
    if not raw.startswith(b"P5"):
        raise ValueError(f"{path}: not a binary PGM (P5) file")
    # Header: magic, width, height, maxval as whitespace-separated tokens,
    # with '#' comments allowed; one whitespace byte separates maxval and raster.
    pos = 2
    fields = []
    while len(fields) < 3:
        while pos < len(raw) and raw[pos : pos + 1].isspace():
            pos += 1
        if pos < len(raw) and raw[pos : pos + 1] == b"#":
            while pos < len(raw) and raw[pos] != 0x0A:
                pos += 1
            continue
        m = re.match(rb"\d+", raw[pos:])
        if m is None:
            raise ValueError(f"{path}: malformed PGM header")
        fields.append(int(m.group()))
        pos += m.end()
    pos += 1  # single whitespace after maxval
    width, height, maxval = fields
    if not 0 < maxval < 65536:
        raise ValueError(f"{path}: invalid maxval {maxval}")
    dtype = np.dtype(">u2") if maxval > 255 else np.uint8
    count = width * height
    data = np.frombuffer(raw, dtype=dtype, count=count, offset=pos)
    if data.size != count:
        raise ValueError(f"{path}: truncated raster data")
    img = data.reshape((height, width)).astype(np.float64)
    return img / maxval


def write_pgm(path, img, bits: int = 8) -> None:
    """Write [0, 1] intensities as binary PGM; 16 bit uses big-endian samples."""
    img = as_image(img)
    if bits not in (8, 16):
        raise ValueError("bits must be 8 or 16")
    maxval = (1 << bits) - 1
    q = np.rint(np.clip(img, 0.0, 1.0) * maxval)
    q = q.astype(np.uint8 if bits == 8 else np.dtype(">u2"))
    header = f"P5\n{img.shape[1]} {img.shape[0]}\n{maxval}\n".encode("ascii")
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(q.tobytes())


def read_png(path) -> np.ndarray:
    """Read a PNG as grayscale and map intensities to [0, 1]."""
    from PIL import Image

    with Image.open(path) as im:
        if im.mode in ("I;16", "I;16B", "I;16L", "I"):
            arr = np.asarray(im, dtype=np.float64)
            return arr / 65535.0
        if im.mode != "L":
            im = im.convert("L")
        return np.asarray(im, dtype=np.float64) / 255.0


def write_png(path, img, bits: int = 8) -> None:
    from PIL import Image

    img = as_image(img)
    if bits not in (8, 16):
        raise ValueError("bits must be 8 or 16")
    maxval = (1 << bits) - 1
    q = np.rint(np.clip(img, 0.0, 1.0) * maxval)
    # mode is inferred from the dtype: uint8 -> L, uint16 -> I;16
    Image.fromarray(q.astype(np.uint8 if bits == 8 else np.uint16)).save(path)


def read_image(path) -> np.ndarray:
    """Read a grayscale image, dispatching on file content (PGM) or extension."""
    with open(path, "rb") as fh:
        magic = fh.read(2)
    if magic == b"P5":
        return read_pgm(path)
    return read_png(path)


def write_image(path, img, bits: int = 8) -> None:
    """Write a grayscale image; format chosen by extension (.pgm or .png)."""
    ext = os.path.splitext(str(path))[1].lower()
    if ext == ".pgm":
        write_pgm(path, img, bits=bits)
    elif ext == ".png":
        write_png(path, img, bits=bits)
    else:
        raise ValueError(f"unsupported image extension: {ext!r}")
