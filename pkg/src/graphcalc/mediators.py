"""Structured constant tensors and the matrix operations they mediate.

The Kronecker tensor is 1 where all of its indices agree. The vectorization
tensor maps a multi-index to one flat index, first input fastest. The
convolution tensor is 1 where a signed sum of its three indices vanishes
modulo the extent. The unitary DFT matrix is the fourth.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import prod
from typing import Sequence

import numpy as np

from .contraction import einsum_eval
from .errors import CapExceeded, ExtentMismatch, GraphCalcError, InvalidSignature, RankMismatch
from .tensor import as_tensor

DEFAULT_CAP = 10**8


def _check_cap(n_entries: int, cap: int | None) -> None:
    cap = DEFAULT_CAP if cap is None else cap
    if n_entries > cap:
        raise CapExceeded(f"dense form needs {n_entries} entries, cap is {cap}")


@dataclass(frozen=True)
class DeltaSpec:
    rank: int
    dim: int

    def __post_init__(self):
        if self.rank < 1 or self.dim < 1:
            raise GraphCalcError(f"delta needs rank >= 1 and dim >= 1, got {self}")


@dataclass(frozen=True)
class GammaSpec:
    input_dims: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "input_dims", tuple(int(d) for d in self.input_dims))
        if not self.input_dims or any(d < 1 for d in self.input_dims):
            raise GraphCalcError(f"gamma needs positive input dims, got {self.input_dims}")

    @property
    def output_dim(self) -> int:
        return prod(self.input_dims)


@dataclass(frozen=True)
class Signature:
    """Sign triple of the convolution tensor, stored with the first sign +1."""

    signs: tuple[int, int, int]

    def __post_init__(self):
        signs = tuple(int(s) for s in self.signs)
        if len(signs) != 3 or any(s not in (1, -1) for s in signs):
            raise InvalidSignature(f"signature needs three signs of +1/-1, got {self.signs}")
        if signs[0] == -1:
            signs = tuple(-s for s in signs)
        object.__setattr__(self, "signs", signs)

    @classmethod
    def parse(cls, text: str) -> "Signature":
        text = text.strip()
        if len(text) != 3 or any(ch not in "+-" for ch in text):
            raise InvalidSignature(f"signature must be three of '+'/'-', got {text!r}")
        return cls(tuple(1 if ch == "+" else -1 for ch in text))

    @classmethod
    def coerce(cls, value) -> "Signature":
        if isinstance(value, Signature):
            return value
        if isinstance(value, str):
            return cls.parse(value)
        return cls(tuple(value))

    def __str__(self) -> str:
        return "".join("+" if s > 0 else "-" for s in self.signs)

    def __iter__(self):
        return iter(self.signs)


CANONICAL_SIGNATURES = tuple(Signature.parse(s) for s in ("+++", "++-", "+-+", "+--"))


@dataclass(frozen=True)
class FourierSpec:
    dim: int
    inverse: bool = False


def delta_dense(rank: int, dim: int, cap: int | None = None) -> np.ndarray:
    spec = DeltaSpec(rank, dim)
    _check_cap(dim**rank, cap)
    out = np.zeros((spec.dim,) * spec.rank)
    idx = np.arange(spec.dim)
    out[(idx,) * spec.rank] = 1.0
    return out


def gamma_dense(input_dims: Sequence[int], cap: int | None = None) -> np.ndarray:
    """Vectorization tensor with axes ``(*input_dims, prod(input_dims))``."""
    spec = GammaSpec(tuple(input_dims))
    m = spec.output_dim
    _check_cap(m * m, cap)
    out = np.zeros(spec.input_dims + (m,))
    grids = np.indices(spec.input_dims)
    flat = np.zeros(spec.input_dims, dtype=np.int64)
    stride = 1
    for axis, extent in enumerate(spec.input_dims):
        flat += grids[axis] * stride
        stride *= extent
    out[tuple(grids) + (flat,)] = 1.0
    return out


def chi_dense(signature, dim: int, cap: int | None = None) -> np.ndarray:
    s1, s2, s3 = Signature.coerce(signature)
    if dim < 1:
        raise GraphCalcError(f"chi needs dim >= 1, got {dim}")
    _check_cap(dim**3, cap)
    i, j, k = np.indices((dim, dim, dim))
    return ((s1 * i + s2 * j + s3 * k) % dim == 0).astype(np.float64)


def fourier_matrix(dim: int, inverse: bool = False) -> np.ndarray:
    """Unitary DFT matrix ``exp(-2*pi*1j*m*n/D)/sqrt(D)``; conjugated if inverse."""
    if dim < 1:
        raise GraphCalcError(f"Fourier matrix needs dim >= 1, got {dim}")
    mn = np.outer(np.arange(dim), np.arange(dim)) % dim
    sign = 1.0 if inverse else -1.0
    return np.exp(sign * 2j * np.pi * mn / dim) / np.sqrt(dim)


def ones_tensor(dims: Sequence[int]) -> np.ndarray:
    return np.ones(tuple(int(d) for d in dims))


def conjugate_chi(signature, dim: int) -> np.ndarray:
    """Contract every wire of chi with F (+ sign) or its inverse (- sign).

    The result is ``sqrt(dim)`` times the rank-3 Kronecker tensor.
    """
    sig = Signature.coerce(signature)
    mats = [fourier_matrix(dim, inverse=s < 0) for s in sig]
    return einsum_eval("ijk,ai,bj,ck->abc", [chi_dense(sig, dim)] + mats)


# ---------------------------------------------------------------------------
# operations mediated by the Kronecker tensor


def _square(a, op: str) -> np.ndarray:
    a = as_tensor(a)
    if a.ndim != 2:
        raise RankMismatch(f"{op} expects a matrix, got rank {a.ndim}")
    if a.shape[0] != a.shape[1]:
        raise ExtentMismatch("row/col", a.shape[0], a.shape[1], f"{op} needs a square matrix")
    return a


def diag_extract(a) -> np.ndarray:
    a = _square(a, "diag_extract")
    return np.diagonal(a).copy()


def diag_embed(v) -> np.ndarray:
    v = as_tensor(v)
    if v.ndim != 1:
        raise RankMismatch(f"diag_embed expects a vector, got rank {v.ndim}")
    out = np.zeros((v.shape[0], v.shape[0]), dtype=v.dtype)
    np.fill_diagonal(out, v)
    return out


def zero_offdiag(a) -> np.ndarray:
    return diag_embed(diag_extract(a))


def trace(a) -> np.ndarray:
    a = _square(a, "trace")
    return np.asarray(np.trace(a))


def partial_trace(a, axes: tuple[int, int] = (0, 1)) -> np.ndarray:
    """Trace a tensor over two axes of equal extent, keeping the others in order."""
    a = as_tensor(a)
    p, q = axes
    if p == q or not (0 <= p < a.ndim and 0 <= q < a.ndim):
        raise GraphCalcError(f"invalid trace axes {axes} for rank {a.ndim}")
    if a.shape[p] != a.shape[q]:
        raise ExtentMismatch("traced", a.shape[p], a.shape[q], f"axes {axes}")
    return np.trace(a, axis1=p, axis2=q).copy()
