"""Tensor diagrams: construction, evaluation, rewriting and export."""
from __future__ import annotations

from .expr import Net
from .graph import (
    Chi,
    Delta,
    Dense,
    Diagram,
    Fourier,
    Gamma,
    build,
    evaluate,
    from_json,
    load_diagram,
    make_diagram,
    to_dot,
    to_einsum,
    to_json,
)
from .rules import (
    RULES,
    chi_fourier_at,
    fuse_delta_at,
    fuse_gamma_at,
    rewrite_chi_fourier,
    rewrite_fuse_delta,
    rewrite_fuse_gamma,
    rewrite_swap_delta_gamma,
    splice,
    swap_delta_gamma_at,
    unswap_delta_gamma_at,
)
from .simplify import Step, measure, simplify, simplify_steps

__all__ = [
    "Chi", "Delta", "Dense", "Diagram", "Fourier", "Gamma", "Net", "RULES", "Step",
    "build", "chi_fourier_at", "evaluate", "from_json", "fuse_delta_at", "fuse_gamma_at",
    "load_diagram", "make_diagram", "measure", "rewrite_chi_fourier", "rewrite_fuse_delta",
    "rewrite_fuse_gamma", "rewrite_swap_delta_gamma", "simplify", "simplify_steps",
    "splice", "swap_delta_gamma_at", "to_dot", "to_einsum", "to_json",
    "unswap_delta_gamma_at",
]
