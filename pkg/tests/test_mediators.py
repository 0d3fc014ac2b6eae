from __future__ import annotations

from math import sqrt

import numpy as np
import pytest

from graphcalc.contraction import einsum_eval
from graphcalc.errors import CapExceeded, ExtentMismatch, GraphCalcError, InvalidSignature
from graphcalc.mediators import (
    CANONICAL_SIGNATURES,
    Signature,
    chi_dense,
    conjugate_chi,
    delta_dense,
    diag_embed,
    diag_extract,
    fourier_matrix,
    gamma_dense,
    partial_trace,
    trace,
    zero_offdiag,
)
from graphcalc.tensor import vectorize_col

from oracles import chi_loop, delta_loop, dft_loop, gamma_loop


@pytest.mark.parametrize("rank,dim", [(1, 1), (1, 4), (2, 3), (3, 2), (4, 3)])
def test_delta_matches_loop(rank, dim):
    assert np.array_equal(delta_dense(rank, dim), delta_loop(rank, dim))


def test_delta_rank2_is_identity():
    assert np.array_equal(delta_dense(2, 5), np.eye(5))


@pytest.mark.parametrize("dims", [(1,), (3,), (2, 3), (3, 2), (1, 4), (2, 1, 3)])
def test_gamma_matches_loop(dims):
    assert np.array_equal(gamma_dense(dims), gamma_loop(dims))


def test_gamma_contracted_with_matrix_is_col():
    a = np.arange(6.0).reshape(2, 3)
    assert np.array_equal(einsum_eval("ij,ijm->m", [a, gamma_dense((2, 3))]), vectorize_col(a))


def test_single_input_gamma_is_identity():
    assert np.array_equal(gamma_dense((4,)), np.eye(4))


@pytest.mark.parametrize("sig", ["+++", "++-", "+-+", "+--", "-++", "---"])
@pytest.mark.parametrize("dim", [1, 2, 3, 5])
def test_chi_matches_loop(sig, dim):
    signs = [1 if c == "+" else -1 for c in sig]
    assert np.array_equal(chi_dense(sig, dim), chi_loop(signs, dim))


def test_signature_canonical_form():
    assert str(Signature.parse("-+-")) == "+-+"
    assert Signature.parse("--+") == Signature.parse("++-")
    assert {str(s) for s in CANONICAL_SIGNATURES} == {"+++", "++-", "+-+", "+--"}


@pytest.mark.parametrize("text", ["++", "+*-", "++++", ""])
def test_bad_signature(text):
    with pytest.raises(InvalidSignature):
        Signature.parse(text)


def test_chi_at_d1_is_one():
    assert chi_dense("+--", 1).tolist() == [[[1.0]]]


@pytest.mark.parametrize("dim", [1, 2, 5, 8])
def test_fourier_matches_loop_and_is_unitary(dim):
    F = fourier_matrix(dim)
    eye = np.eye(dim)
    assert np.allclose(F, np.array([dft_loop(eye[:, n]) for n in range(dim)]).T, atol=1e-13)
    assert np.allclose(fourier_matrix(dim, inverse=True) @ F, eye, atol=1e-13)


def test_fourier_first_column():
    assert np.allclose(fourier_matrix(4)[:, 0], [0.5, 0.5, 0.5, 0.5])


@pytest.mark.parametrize("sig", CANONICAL_SIGNATURES, ids=str)
@pytest.mark.parametrize("dim", [2, 3, 5, 8])
def test_conjugated_chi(sig, dim):
    assert np.max(np.abs(conjugate_chi(sig, dim) - sqrt(dim) * delta_dense(3, dim))) < 1e-12


def test_cap():
    with pytest.raises(CapExceeded):
        delta_dense(4, 10, cap=1000)
    with pytest.raises(CapExceeded):
        gamma_dense((10, 10), cap=1000)
    with pytest.raises(CapExceeded):
        chi_dense("+++", 11, cap=1000)


def test_invalid_extents():
    with pytest.raises(GraphCalcError):
        delta_dense(0, 3)
    with pytest.raises(GraphCalcError):
        gamma_dense((2, 0))
    with pytest.raises(GraphCalcError):
        fourier_matrix(0)


def test_delta_mediated_matrix_operations():
    a = np.arange(9.0).reshape(3, 3)
    assert diag_extract(a).tolist() == [0, 4, 8]
    assert np.array_equal(diag_embed([1.0, 2.0]), np.diag([1.0, 2.0]))
    assert np.array_equal(zero_offdiag(a), np.diag([0.0, 4.0, 8.0]))
    assert trace(a).shape == () and trace(a) == 12
    with pytest.raises(ExtentMismatch):
        trace(np.zeros((2, 3)))


def test_partial_trace():
    t = np.arange(2 * 3 * 2.0).reshape(2, 3, 2)
    want = np.array([t[0, j, 0] + t[1, j, 1] for j in range(3)])
    assert np.array_equal(partial_trace(t, (0, 2)), want)
    with pytest.raises(ExtentMismatch):
        partial_trace(t, (0, 1))


def test_diag_as_einsum_with_delta():
    v = np.array([1.0, 2.0, 3.0])
    assert np.array_equal(einsum_eval("k,ijk->ij", [v, delta_dense(3, 3)]), diag_embed(v))
