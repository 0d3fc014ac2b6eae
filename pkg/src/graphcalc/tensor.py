"""Dense tensor value helpers.

Tensors are plain :class:`numpy.ndarray` objects holding ``float64`` or
``complex128`` entries in C (row-major) order. Vectorization follows the
first-index-fastest convention ``m = i + j*I``; it is implemented with
explicit index arithmetic (a transpose before the row-major reshape) so the
storage order never leaks into the meaning of a flat index.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import prod
from typing import Sequence

import numpy as np

from .errors import (
    ExtentMismatch,
    GraphCalcError,
    InvalidPermutation,
    RankMismatch,
)

REAL = np.dtype(np.float64)
COMPLEX = np.dtype(np.complex128)


@dataclass(frozen=True)
class Tolerance:
    rel: float = 1e-10
    abs: float = 1e-12


DEFAULT_TOLERANCE = Tolerance()


def as_tensor(x, dtype=None) -> np.ndarray:
    """Coerce ``x`` to a contiguous float64/complex128 array.

    Integer and boolean inputs become float64. Scalars become rank-0 arrays.
    """
    arr = np.asarray(x)
    if dtype is not None:
        target = np.dtype(dtype)
    elif np.iscomplexobj(arr):
        target = COMPLEX
    else:
        target = REAL
    if target not in (REAL, COMPLEX):
        raise GraphCalcError(f"unsupported scalar kind {target}")
    return np.asarray(arr, dtype=target, order="C")


def result_dtype(*tensors) -> np.dtype:
    return COMPLEX if any(np.iscomplexobj(t) for t in tensors) else REAL


def max_abs(x) -> float:
    x = np.asarray(x)
    return float(np.max(np.abs(x))) if x.size else 0.0


def relative_residual(lhs, rhs) -> float:
    """Max-abs difference scaled by the larger magnitude of the two sides."""
    lhs = np.asarray(lhs)
    rhs = np.asarray(rhs)
    if lhs.shape != rhs.shape:
        raise ExtentMismatch("shape", lhs.size, rhs.size, f"{lhs.shape} vs {rhs.shape}")
    scale = max(max_abs(lhs), max_abs(rhs))
    if scale == 0.0:
        return 0.0
    return max_abs(lhs - rhs) / scale


def allclose(a, b, tol: Tolerance = DEFAULT_TOLERANCE) -> bool:
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        return False
    return bool(np.allclose(a, b, rtol=tol.rel, atol=tol.abs))


def transpose(a, perm: Sequence[int]) -> np.ndarray:
    """Permute axes: axis ``k`` of the result is axis ``perm[k]`` of ``a``."""
    a = as_tensor(a)
    perm = tuple(int(p) for p in perm)
    if sorted(perm) != list(range(a.ndim)):
        raise InvalidPermutation(f"{perm} is not a permutation of 0..{a.ndim - 1}")
    return np.asarray(a.transpose(perm), order="C")


def inverse_permutation(perm: Sequence[int]) -> tuple[int, ...]:
    inv = [0] * len(perm)
    for k, p in enumerate(perm):
        inv[p] = k
    return tuple(inv)


def _require_rank(a: np.ndarray, rank: int, op: str) -> None:
    if a.ndim != rank:
        raise RankMismatch(f"{op} expects rank {rank}, got rank {a.ndim}")


def flatten_multi(a, axes: Sequence[int] | None = None) -> np.ndarray:
    """Serialize all axes of ``a`` into one, first listed axis fastest."""
    a = as_tensor(a)
    if axes is None:
        axes = range(a.ndim)
    axes = list(axes)
    # reversing the axis order turns row-major flattening into first-fastest
    return np.asarray(a.transpose(axes[::-1]), order="C").reshape(-1)


def vectorize_col(a) -> np.ndarray:
    """Stack the columns of a matrix: ``out[i + j*I] = a[i, j]``."""
    a = as_tensor(a)
    _require_rank(a, 2, "vectorize_col")
    return flatten_multi(a, (0, 1))


def vectorize_row(a) -> np.ndarray:
    """Concatenate the rows of a matrix: ``out[j + i*J] = a[i, j]``."""
    a = as_tensor(a)
    _require_rank(a, 2, "vectorize_row")
    return flatten_multi(a, (1, 0))


def devectorize(v, dims: Sequence[int]) -> np.ndarray:
    """Inverse of :func:`flatten_multi` for a first-index-fastest vector."""
    v = as_tensor(v)
    _require_rank(v, 1, "devectorize")
    dims = [int(d) for d in dims]
    if prod(dims) != v.shape[0]:
        raise ExtentMismatch("flat", v.shape[0], prod(dims), f"product of dims {dims}")
    return np.asarray(v.reshape(dims[::-1]).transpose(range(len(dims))[::-1]), order="C")
