from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from graphcalc import products
from graphcalc.errors import ExtentMismatch, RankMismatch, ShapeMismatch

from oracles import (
    dot_loop,
    khatri_rao_col_loop,
    khatri_rao_row_loop,
    kron_loop,
    random_complex,
    tracy_singh_loop,
)

LAYOUTS = ["gamma", "textbook"]
extent = st.integers(1, 4)


@settings(max_examples=30, deadline=None)
@given(extent, extent, extent, extent, st.sampled_from(LAYOUTS), st.integers(0, 2**31))
def test_kronecker_matches_loop(I, J, K, L, layout, seed):
    rng = np.random.default_rng(seed)
    a, b = random_complex(rng, (I, J)), random_complex(rng, (K, L))
    assert np.allclose(products.kronecker(a, b, layout), kron_loop(a, b, layout), atol=1e-14)


def test_textbook_layout_is_numpy_kron(rng):
    a, b = rng.random((2, 3)), rng.random((4, 2))
    assert np.array_equal(products.kronecker(a, b, "textbook"), np.kron(a, b))
    assert np.array_equal(products.kronecker(a, b), np.kron(b, a))


@settings(max_examples=30, deadline=None)
@given(extent, extent, extent, st.sampled_from(LAYOUTS), st.integers(0, 2**31))
def test_khatri_rao_matches_loop(I, J, K, layout, seed):
    rng = np.random.default_rng(seed)
    a, b = random_complex(rng, (I, J)), random_complex(rng, (K, J))
    assert np.allclose(products.khatri_rao_col(a, b, layout), khatri_rao_col_loop(a, b, layout))
    a, b = random_complex(rng, (J, I)), random_complex(rng, (J, K))
    assert np.allclose(products.khatri_rao_row(a, b, layout), khatri_rao_row_loop(a, b, layout))


def test_khatri_rao_columns_are_kronecker_columns(rng):
    a, b = rng.random((3, 4)), rng.random((2, 4))
    kr = products.khatri_rao_col(a, b)
    for j in range(4):
        assert np.allclose(kr[:, j], products.kronecker(a[:, [j]], b[:, [j]])[:, 0])


@settings(max_examples=15, deadline=None)
@given(st.lists(st.integers(1, 3), min_size=8, max_size=8), st.integers(0, 2**31))
def test_tracy_singh_matches_loop(ext, seed):
    rng = np.random.default_rng(seed)
    a, b = random_complex(rng, tuple(ext[:4])), random_complex(rng, tuple(ext[4:]))
    assert np.allclose(products.tracy_singh(a, b), tracy_singh_loop(a, b))


def test_tracy_singh_with_trivial_blocks_is_kronecker(rng):
    # one block each: outer extents 1, so only the inner Kronecker remains
    a, b = rng.random((3, 2)), rng.random((2, 4))
    ts = products.tracy_singh(a[None, None], b[None, None])
    assert np.allclose(ts, products.kronecker(a, b))


def test_dot_and_hadamard(rng):
    a, b = random_complex(rng, (3, 4)), random_complex(rng, (4, 2))
    assert np.allclose(products.dot(a, b), dot_loop(a, b))
    c = random_complex(rng, (3, 4))
    assert np.array_equal(products.hadamard(a, c), a * c)


def test_tensor_product_keeps_every_index(rng):
    a, b = rng.random((2, 3)), rng.random((4, 5))
    t = products.tensor_product(a, b)
    assert t.shape == (2, 3, 4, 5)
    assert t[1, 2, 3, 4] == a[1, 2] * b[3, 4]


def test_extent_one():
    a, b = np.array([[2.0]]), np.array([[3.0, 4.0]])
    assert products.kronecker(a, b).tolist() == [[6.0, 8.0]]
    assert products.khatri_rao_row(a, np.array([[5.0]])).tolist() == [[10.0]]


def test_errors():
    with pytest.raises(ExtentMismatch):
        products.dot(np.zeros((2, 3)), np.zeros((2, 3)))
    with pytest.raises(ShapeMismatch):
        products.hadamard(np.zeros((2, 3)), np.zeros((3, 2)))
    with pytest.raises(ExtentMismatch):
        products.khatri_rao_col(np.zeros((2, 3)), np.zeros((2, 2)))
    with pytest.raises(ExtentMismatch):
        products.khatri_rao_row(np.zeros((2, 3)), np.zeros((3, 3)))
    with pytest.raises(RankMismatch):
        products.kronecker(np.zeros(3), np.zeros((2, 2)))
    with pytest.raises(RankMismatch):
        products.tracy_singh(np.zeros((2, 2)), np.zeros((2, 2, 2, 2)))
    with pytest.raises(ValueError):
        products.kronecker(np.zeros((2, 2)), np.zeros((2, 2)), layout="rowmajor")


def test_real_inputs_stay_real(rng):
    a, b = rng.random((2, 2)), rng.random((2, 2))
    for name, fn in products.DIRECT.items():
        if name != "tracy_singh":
            assert fn(a, b).dtype == np.float64
