"""The six matrix products, each with a direct kernel and a mediated reference.

Direct kernels write straight into the output buffer. The ``*_reference``
functions build the same result by contracting the operands with Kronecker
and vectorization tensors; they exist to cross-check the kernels.

Flattened index pairs follow the vectorization convention where the first
listed index varies fastest: ``kronecker(a, b)[i + k*I, j + l*J] ==
a[i, j] * b[k, l]``. Pass ``layout="textbook"`` for the common
``[i*K + k, j*L + l]`` layout.
"""
from __future__ import annotations

import string

import numpy as np

from .contraction import einsum_eval
from .errors import ExtentMismatch, RankMismatch, ShapeMismatch
from .mediators import delta_dense, gamma_dense
from .tensor import as_tensor, result_dtype

LAYOUTS = ("gamma", "textbook")


def _matrix(a, op: str, name: str = "operand") -> np.ndarray:
    a = as_tensor(a)
    if a.ndim != 2:
        raise RankMismatch(f"{op}: {name} must be a matrix, got rank {a.ndim}")
    return a


def _check_layout(layout: str) -> None:
    if layout not in LAYOUTS:
        raise ValueError(f"layout must be one of {LAYOUTS}, got {layout!r}")


def dot(a, b) -> np.ndarray:
    a = _matrix(a, "dot")
    b = _matrix(b, "dot")
    if a.shape[1] != b.shape[0]:
        raise ExtentMismatch("j", a.shape[1], b.shape[0], "dot inner extents")
    return a @ b


def tensor_product(a, b) -> np.ndarray:
    """Outer product keeping every index: ``out[i, j, k, l] = a[i, j] * b[k, l]``."""
    a = as_tensor(a)
    b = as_tensor(b)
    return np.multiply.outer(a, b)


def kronecker(a, b, layout: str = "gamma") -> np.ndarray:
    a = _matrix(a, "kronecker")
    b = _matrix(b, "kronecker")
    _check_layout(layout)
    (I, J), (K, L) = a.shape, b.shape
    out = np.empty((I * K, J * L), dtype=result_dtype(a, b))
    if layout == "gamma":
        np.multiply(b[:, None, :, None], a[None, :, None, :], out=out.reshape(K, I, L, J))
    else:
        np.multiply(a[:, None, :, None], b[None, :, None, :], out=out.reshape(I, K, J, L))
    return out


def hadamard(a, b) -> np.ndarray:
    a = as_tensor(a)
    b = as_tensor(b)
    if a.shape != b.shape:
        raise ShapeMismatch(f"hadamard needs equal shapes, got {a.shape} and {b.shape}")
    return a * b


def khatri_rao_col(a, b, layout: str = "gamma") -> np.ndarray:
    """Column-wise Kronecker product of ``I x J`` and ``K x J`` matrices."""
    a = _matrix(a, "khatri_rao_col")
    b = _matrix(b, "khatri_rao_col")
    _check_layout(layout)
    (I, J), (K, J2) = a.shape, b.shape
    if J != J2:
        raise ExtentMismatch("j", J, J2, "khatri_rao_col column counts")
    out = np.empty((I * K, J), dtype=result_dtype(a, b))
    if layout == "gamma":
        np.multiply(b[:, None, :], a[None, :, :], out=out.reshape(K, I, J))
    else:
        np.multiply(a[:, None, :], b[None, :, :], out=out.reshape(I, K, J))
    return out


def khatri_rao_row(a, b, layout: str = "gamma") -> np.ndarray:
    """Row-wise Kronecker product of ``I x J`` and ``I x L`` matrices."""
    a = _matrix(a, "khatri_rao_row")
    b = _matrix(b, "khatri_rao_row")
    _check_layout(layout)
    (I, J), (I2, L) = a.shape, b.shape
    if I != I2:
        raise ExtentMismatch("i", I, I2, "khatri_rao_row row counts")
    out = np.empty((I, J * L), dtype=result_dtype(a, b))
    if layout == "gamma":
        np.multiply(b[:, :, None], a[:, None, :], out=out.reshape(I, L, J))
    else:
        np.multiply(a[:, :, None], b[:, None, :], out=out.reshape(I, J, L))
    return out


def tracy_singh(a, b) -> np.ndarray:
    """Block-wise double Kronecker product of two rank-4 block matrices.

    ``a[i, j, k, l]`` holds outer (block) indices ``i, j`` and inner indices
    ``k, l``. Rows of the result flatten ``(i, p, k, r)`` and columns
    ``(j, q, l, s)``, first listed fastest, giving an ``IPKR x JQLS`` matrix.
    """
    a = as_tensor(a)
    b = as_tensor(b)
    if a.ndim != 4 or b.ndim != 4:
        raise RankMismatch(f"tracy_singh needs rank-4 operands, got {a.ndim} and {b.ndim}")
    I, J, K, L = a.shape
    P, Q, R, S = b.shape
    out = np.empty((I * P * K * R, J * Q * L * S), dtype=result_dtype(a, b))
    # row-major view axes are the flattened groups in reverse: (r,k,p,i) x (s,l,q,j)
    view = out.reshape(R, K, P, I, S, L, Q, J)
    at = a.transpose(2, 0, 3, 1)[None, :, None, :, None, :, None, :]
    bt = b.transpose(2, 0, 3, 1)[:, None, :, None, :, None, :, None]
    np.multiply(bt, at, out=view)
    return out


# ---------------------------------------------------------------------------
# mediated reference paths


def dot_reference(a, b) -> np.ndarray:
    a = _matrix(a, "dot")
    b = _matrix(b, "dot")
    return einsum_eval("ij,kl,jk->il", [a, b, delta_dense(2, a.shape[1])])


def tensor_product_reference(a, b) -> np.ndarray:
    a = as_tensor(a)
    b = as_tensor(b)
    letters = iter(string.ascii_letters)
    la = "".join(next(letters) for _ in range(a.ndim))
    lb = "".join(next(letters) for _ in range(b.ndim))
    return einsum_eval(f"{la},{lb}->{la}{lb}", [a, b])


def _pair_gamma(d1: int, d2: int, layout: str) -> tuple[np.ndarray, str]:
    """Gamma joining two wires, and the index order to wire it with."""
    if layout == "gamma":
        return gamma_dense([d1, d2]), "xy"
    return gamma_dense([d2, d1]), "yx"


def kronecker_reference(a, b, layout: str = "gamma") -> np.ndarray:
    a = _matrix(a, "kronecker")
    b = _matrix(b, "kronecker")
    _check_layout(layout)
    g_row, o_row = _pair_gamma(a.shape[0], b.shape[0], layout)
    g_col, o_col = _pair_gamma(a.shape[1], b.shape[1], layout)
    rows = o_row.replace("x", "i").replace("y", "k")
    cols = o_col.replace("x", "j").replace("y", "l")
    return einsum_eval(f"ij,kl,{rows}m,{cols}n->mn", [a, b, g_row, g_col])


def hadamard_reference(a, b) -> np.ndarray:
    a = as_tensor(a)
    b = as_tensor(b)
    if a.shape != b.shape:
        raise ShapeMismatch(f"hadamard needs equal shapes, got {a.shape} and {b.shape}")
    n = a.ndim
    letters = string.ascii_letters
    la, lb, lo = letters[:n], letters[n:2 * n], letters[2 * n:3 * n]
    deltas = [delta_dense(3, d) for d in a.shape]
    spec = ",".join([la, lb] + [la[k] + lb[k] + lo[k] for k in range(n)]) + "->" + lo
    return einsum_eval(spec, [a, b] + deltas)


def khatri_rao_col_reference(a, b, layout: str = "gamma") -> np.ndarray:
    a = _matrix(a, "khatri_rao_col")
    b = _matrix(b, "khatri_rao_col")
    _check_layout(layout)
    if a.shape[1] != b.shape[1]:
        raise ExtentMismatch("j", a.shape[1], b.shape[1], "khatri_rao_col column counts")
    g, order = _pair_gamma(a.shape[0], b.shape[0], layout)
    rows = order.replace("x", "i").replace("y", "k")
    return einsum_eval(f"ij,kl,{rows}m,jln->mn", [a, b, g, delta_dense(3, a.shape[1])])


def khatri_rao_row_reference(a, b, layout: str = "gamma") -> np.ndarray:
    a = _matrix(a, "khatri_rao_row")
    b = _matrix(b, "khatri_rao_row")
    _check_layout(layout)
    if a.shape[0] != b.shape[0]:
        raise ExtentMismatch("i", a.shape[0], b.shape[0], "khatri_rao_row row counts")
    g, order = _pair_gamma(a.shape[1], b.shape[1], layout)
    cols = order.replace("x", "j").replace("y", "l")
    return einsum_eval(f"ij,kl,ikm,{cols}n->mn", [a, b, delta_dense(3, a.shape[0]), g])


def tracy_singh_reference(a, b) -> np.ndarray:
    a = as_tensor(a)
    b = as_tensor(b)
    if a.ndim != 4 or b.ndim != 4:
        raise RankMismatch(f"tracy_singh needs rank-4 operands, got {a.ndim} and {b.ndim}")
    I, J, K, L = a.shape
    P, Q, R, S = b.shape
    g_row = gamma_dense([I, P, K, R])
    g_col = gamma_dense([J, Q, L, S])
    return einsum_eval("ijkl,pqrs,ipkrm,jqlsn->mn", [a, b, g_row, g_col])


DIRECT = {
    "dot": dot,
    "tensor": tensor_product,
    "kronecker": kronecker,
    "hadamard": hadamard,
    "khatri_rao_col": khatri_rao_col,
    "khatri_rao_row": khatri_rao_row,
    "tracy_singh": tracy_singh,
}

REFERENCE = {
    "dot": dot_reference,
    "tensor": tensor_product_reference,
    "kronecker": kronecker_reference,
    "hadamard": hadamard_reference,
    "khatri_rao_col": khatri_rao_col_reference,
    "khatri_rao_row": khatri_rao_row_reference,
    "tracy_singh": tracy_singh_reference,
}
