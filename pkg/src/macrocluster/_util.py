"""Small helpers shared across modules."""

from __future__ import annotations

import math
import os

import numpy as np


def read_text(source) -> str:
    """Text of a path, bytes object, or text/binary file-like."""
    if isinstance(source, (bytes, bytearray)):
        return bytes(source).decode("utf-8-sig")
    if isinstance(source, (str, os.PathLike)):
        with open(source, "r", encoding="utf-8-sig", newline="") as fh:
            return fh.read()
    data = source.read()
    if isinstance(data, bytes):
        data = data.decode("utf-8-sig")
    return data


def is_flat(variance, x) -> bool:
    """True if a series with this variance is constant up to rounding."""
    # a constant float series can leave ~1e-17 residue after centring
    return math.sqrt(variance) <= 1e-15 * max(1.0, float(np.abs(x).max()))
