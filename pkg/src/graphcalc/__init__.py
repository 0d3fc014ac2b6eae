"""Tensor contractions with Kronecker, vectorization and convolution tensors."""
from __future__ import annotations

from .contraction import IndexSpec, einsum_eval, parse_subscripts, plan_contraction
from .convolution import AxisConv, check_conv_theorem, conv1d, conv_nd, dft, linear_conv
from .errors import GraphCalcError
from .mediators import (
    CANONICAL_SIGNATURES,
    Signature,
    chi_dense,
    delta_dense,
    diag_embed,
    diag_extract,
    fourier_matrix,
    gamma_dense,
    trace,
)
from .products import (
    dot,
    hadamard,
    khatri_rao_col,
    khatri_rao_row,
    kronecker,
    tensor_product,
    tracy_singh,
)
from .tensor import relative_residual, vectorize_col, vectorize_row

__version__ = "0.1.0"
