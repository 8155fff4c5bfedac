"""Portable Float Map I/O, grayscale ``Pf`` variant.

Files are written little-endian (negative scale field) with rows stored
bottom-to-top, as the format prescribes. Data is float32 on disk.
"""

from __future__ import annotations

import os
import re

import numpy as np

_HEADER = re.compile(rb"^(P[fF])\s+(\d+)\s+(\d+)\s+(\S+)\s")


class PfmError(ValueError):
    pass


def write_pfm(path: str | os.PathLike, image: np.ndarray) -> None:
    """Write a 2D array as a little-endian grayscale PFM."""
    image = np.asarray(image)
    if image.ndim != 2:
        raise PfmError(f"PFM writer takes one 2D plane, got shape {image.shape}")
    if not np.all(np.isfinite(image)):
        raise PfmError("refusing to write non-finite values")
    h, w = image.shape
    data = np.ascontiguousarray(np.flipud(image), dtype="<f4")
    with open(path, "wb") as fh:
        fh.write(b"Pf\n%d %d\n-1.0\n" % (w, h))
        fh.write(data.tobytes())


def read_pfm(path: str | os.PathLike) -> np.ndarray:
    """Read a grayscale PFM into a float64 array with row 0 at the top."""
    with open(path, "rb") as fh:
        raw = fh.read()
    m = _HEADER.match(raw)
    if m is None:
        raise PfmError(f"{path}: not a PFM file")
    kind, w, h, scale = m.group(1), int(m.group(2)), int(m.group(3)), float(m.group(4))
    if kind != b"Pf":
        raise PfmError(f"{path}: only grayscale 'Pf' files are supported")
    dtype = "<f4" if scale < 0 else ">f4"
    body = raw[m.end():]
    if len(body) != 4 * w * h:
        raise PfmError(f"{path}: expected {4 * w * h} data bytes, found {len(body)}")
    data = np.frombuffer(body, dtype=dtype).reshape(h, w)
    return np.flipud(data).astype(float)
