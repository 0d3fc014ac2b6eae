"""JSON tensor interchange.

A tensor record looks like ``{"shape": [2, 2], "dtype": "f64", "data": [...]}``
with ``data`` flattened row-major. For ``"c64"`` each entry is an ``[re, im]``
pair. Python's float repr round-trips exactly, so dumping and loading a
tensor is bit-preserving.
"""
from __future__ import annotations

import json
import math
from math import prod
from pathlib import Path

import numpy as np

from .errors import TensorFormatError
from .tensor import COMPLEX, REAL, as_tensor


def tensor_to_record(t) -> dict:
    t = as_tensor(t)
    flat = t.reshape(-1)
    if t.dtype == COMPLEX:
        data = [[float(z.real), float(z.imag)] for z in flat]
        dtype = "c64"
    else:
        data = [float(x) for x in flat]
        dtype = "f64"
    return {"shape": list(t.shape), "dtype": dtype, "data": data}


def _check_finite(values, permissive: bool) -> None:
    if permissive:
        return
    for x in values:
        if not math.isfinite(x):
            raise TensorFormatError(f"non-finite value {x!r} in tensor data")


def tensor_from_record(record: dict, permissive: bool = False) -> np.ndarray:
    try:
        shape = [int(s) for s in record["shape"]]
        dtype = record.get("dtype", "f64")
        data = record["data"]
    except (KeyError, TypeError, ValueError) as exc:
        raise TensorFormatError(f"malformed tensor record: {exc}") from None
    if any(s < 1 for s in shape):
        raise TensorFormatError(f"extents must be positive, got {shape}")
    if len(data) != prod(shape):
        raise TensorFormatError(
            f"shape {shape} needs {prod(shape)} entries, data has {len(data)}"
        )
    if dtype == "f64":
        try:
            values = [float(x) for x in data]
        except (TypeError, ValueError):
            raise TensorFormatError("f64 data must be a flat list of numbers") from None
        _check_finite(values, permissive)
        return np.array(values, dtype=REAL).reshape(shape)
    if dtype == "c64":
        if not all(isinstance(p, (list, tuple)) and len(p) == 2 for p in data):
            raise TensorFormatError("c64 data must be a list of [re, im] pairs")
        re = [float(p[0]) for p in data]
        im = [float(p[1]) for p in data]
        _check_finite(re + im, permissive)
        out = np.empty(len(data), dtype=COMPLEX)
        out.real = re
        out.imag = im
        return out.reshape(shape)
    raise TensorFormatError(f"unknown dtype {dtype!r} (expected 'f64' or 'c64')")


def dumps_tensor(t) -> str:
    return json.dumps(tensor_to_record(t), allow_nan=True)


def loads_tensor(text: str, permissive: bool = False) -> np.ndarray:
    try:
        record = json.loads(text)
    except json.JSONDecodeError as exc:
        raise TensorFormatError(f"invalid JSON: {exc}") from None
    if not isinstance(record, dict):
        raise TensorFormatError("tensor JSON must be an object")
    return tensor_from_record(record, permissive=permissive)


def save_tensor(t, path) -> None:
    Path(path).write_text(dumps_tensor(t) + "\n")


def load_tensor(path, permissive: bool = False) -> np.ndarray:
    return loads_tensor(Path(path).read_text(), permissive=permissive)
