"""Signed circular convolutions and the convolution theorem.

``conv1d(a, b, sig)[k]`` is ``sum_ij chi[i, j, k] a[i] b[j]`` for the
convolution tensor of signature ``sig``: ``++-`` is the ordinary circular
convolution ``sum_i a[i] b[k - i]`` and ``+--`` gives ``sum_i a[i] b[i - k]``.

The FFT path rests on the identity that conjugating each wire of chi by F
(``+`` wires) or F^-1 (``-`` wires) yields ``sqrt(D)`` times the Kronecker
tensor, hence ``a * b = sqrt(D) P^-1 (T1 a . T2 b)`` with ``T = F`` on ``+``
inputs, ``F^-1`` on ``-`` inputs and ``P^-1 = F^-1`` when the output sign
is ``-`` (``F`` otherwise).
"""
from __future__ import annotations

from dataclasses import dataclass
from math import prod, sqrt
from typing import Sequence

import numpy as np

from .contraction import einsum_eval
from .errors import ExtentMismatch, RankMismatch, ShapeMismatch
from .mediators import Signature, chi_dense, fourier_matrix
from .tensor import as_tensor

FFT_THRESHOLD = 32
DIRECT_ND_LIMIT = 10**6
REAL_DISCARD_TOL = 1e-10


@dataclass(frozen=True)
class AxisConv:
    signature: Signature
    extent: int

    def __post_init__(self):
        object.__setattr__(self, "signature", Signature.coerce(self.signature))
        if self.extent < 1:
            raise ExtentMismatch("axis", self.extent, 1, "extent must be >= 1")


def dft(v, inverse: bool = False) -> np.ndarray:
    """Unitary DFT (``norm="ortho"``) of a vector, or its inverse."""
    v = as_tensor(v)
    if v.ndim != 1:
        raise RankMismatch(f"dft expects a vector, got rank {v.ndim}")
    return np.fft.ifft(v, norm="ortho") if inverse else np.fft.fft(v, norm="ortho")


def _maybe_real(out: np.ndarray, inputs_real: bool) -> np.ndarray:
    if inputs_real and np.iscomplexobj(out) and np.max(np.abs(out.imag), initial=0.0) < REAL_DISCARD_TOL:
        return np.ascontiguousarray(out.real)
    return out


def _axis_fft(x: np.ndarray, axis: int, inverse: bool) -> np.ndarray:
    if inverse:
        return np.fft.ifft(x, axis=axis, norm="ortho")
    return np.fft.fft(x, axis=axis, norm="ortho")


def _conv1d_direct(a, b, sig: Signature) -> np.ndarray:
    s1, s2, s3 = sig
    D = a.shape[0]
    i = np.arange(D)[None, :]
    k = np.arange(D)[:, None]
    # s1*i + s2*j + s3*k == 0 (mod D) and s2 == 1/s2
    j = (-s2 * (s1 * i + s3 * k)) % D
    return (b[j] * a[None, :]).sum(axis=1)


def _conv_fft(a, b, sigs: Sequence[Signature]) -> np.ndarray:
    fa, fb = a.astype(np.complex128), b.astype(np.complex128)
    for axis, (s1, s2, _) in enumerate(sigs):
        fa = _axis_fft(fa, axis, inverse=s1 < 0)
        fb = _axis_fft(fb, axis, inverse=s2 < 0)
    out = fa * fb
    for axis, (_, _, s3) in enumerate(sigs):
        out = _axis_fft(out, axis, inverse=s3 < 0)
    return out * sqrt(prod(a.shape))


def conv1d(a, b, signature="++-", method: str = "auto") -> np.ndarray:
    """Circular signed convolution of two equal-length vectors.

    ``method`` is ``"direct"`` (O(D^2) index arithmetic), ``"fft"`` or
    ``"auto"`` (FFT once the length reaches ``FFT_THRESHOLD``).
    """
    a = as_tensor(a)
    b = as_tensor(b)
    sig = Signature.coerce(signature)
    if a.ndim != 1 or b.ndim != 1:
        raise RankMismatch("conv1d expects two vectors")
    if a.shape != b.shape:
        raise ExtentMismatch("k", a.shape[0], b.shape[0], "conv1d operands")
    if method == "auto":
        method = "fft" if a.shape[0] >= FFT_THRESHOLD else "direct"
    if method == "direct":
        return _conv1d_direct(a, b, sig)
    if method == "fft":
        real = not (np.iscomplexobj(a) or np.iscomplexobj(b))
        return _maybe_real(_conv_fft(a, b, [sig]), real)
    raise ValueError(f"unknown method {method!r}")


def conv1d_reference(a, b, signature="++-") -> np.ndarray:
    """Dense chi contraction, kept as the oracle for :func:`conv1d`."""
    a = as_tensor(a)
    b = as_tensor(b)
    return einsum_eval("ijk,i,j->k", [chi_dense(signature, a.shape[0]), a, b])


def _axes(a: np.ndarray, axes) -> list[AxisConv]:
    if isinstance(axes, (str, Signature)):
        axes = [axes] * a.ndim
    axes = [ax if isinstance(ax, AxisConv) else AxisConv(ax, a.shape[n])
            for n, ax in enumerate(axes)]
    if len(axes) != a.ndim:
        raise RankMismatch(f"{len(axes)} axis signatures for a rank-{a.ndim} tensor")
    for n, ax in enumerate(axes):
        if ax.extent != a.shape[n]:
            raise ExtentMismatch(f"axis {n}", ax.extent, a.shape[n], "AxisConv extent")
    return axes


def conv_nd(a, b, axes="++-", method: str = "auto") -> np.ndarray:
    """Apply one signed circular convolution per axis of two equal-shape tensors.

    ``axes`` is one signature for every axis or a list with one entry per
    axis. The direct method contracts the outer product with one convolution
    tensor at a time, which works for kernels that are not separable.
    """
    a = as_tensor(a)
    b = as_tensor(b)
    if a.shape != b.shape:
        raise ShapeMismatch(f"conv_nd needs equal shapes, got {a.shape} and {b.shape}")
    axes = _axes(a, axes)
    if method == "auto":
        method = "direct" if a.size**2 <= DIRECT_ND_LIMIT else "fft"
    if method == "fft":
        real = not (np.iscomplexobj(a) or np.iscomplexobj(b))
        return _maybe_real(_conv_fft(a, b, [ax.signature for ax in axes]), real)
    if method != "direct":
        raise ValueError(f"unknown method {method!r}")
    n = a.ndim
    # axes 0..n-1 hold a's indices, n..2n-1 hold b's; each step consumes the
    # leading pair and appends the convolved index at the end
    t = np.multiply.outer(a, b)
    for ax in axes:
        chi = chi_dense(ax.signature, ax.extent)
        t = np.tensordot(t, chi, axes=([0, n], [0, 1]))
        n -= 1
    return t


def linear_conv(a, b) -> np.ndarray:
    """Zero-padded linear convolution built on the circular ``++-`` path."""
    a = as_tensor(a)
    b = as_tensor(b)
    size = a.shape[0] + b.shape[0] - 1
    pa = np.zeros(size, dtype=a.dtype)
    pb = np.zeros(size, dtype=b.dtype)
    pa[: a.shape[0]] = a
    pb[: b.shape[0]] = b
    return conv1d(pa, pb, "++-")


@dataclass(frozen=True)
class TheoremReport:
    signature: Signature
    dim: int
    residual: float
    lhs: np.ndarray
    rhs: np.ndarray


def check_conv_theorem(a, b, signature="++-") -> TheoremReport:
    """Compare both sides of the convolution theorem for one signature.

    For ``++-`` this is ``F(a * b) == sqrt(D) (Fa . Fb)``. The convolution
    is computed directly and the transforms use the explicit DFT matrix, so
    neither side goes through the FFT path.
    """
    a = as_tensor(a)
    b = as_tensor(b)
    sig = Signature.coerce(signature)
    if a.shape != b.shape or a.ndim != 1:
        raise ExtentMismatch("k", a.shape[0], b.shape[0], "theorem operands")
    D = a.shape[0]
    s1, s2, s3 = sig
    fwd, inv = fourier_matrix(D), fourier_matrix(D, inverse=True)
    out_t = fwd if s3 < 0 else inv
    lhs = out_t @ _conv1d_direct(a, b, sig)
    rhs = sqrt(D) * ((fwd if s1 > 0 else inv) @ a) * ((fwd if s2 > 0 else inv) @ b)
    return TheoremReport(sig, D, float(np.max(np.abs(lhs - rhs))), lhs, rhs)
