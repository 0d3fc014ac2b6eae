"""Brute-force reference implementations used only by the tests.

Everything here is plain nested loops over Python scalars, written straight
from the index definitions so it shares no code path with the package.
"""
from __future__ import annotations

import cmath
import itertools
import math

import numpy as np


def einsum_loop(spec: str, operands):
    lhs, _, rhs = spec.replace(" ", "").partition("->")
    inputs = lhs.split(",")
    sizes = {}
    for labels, op in zip(inputs, operands):
        for label, n in zip(labels, np.shape(op)):
            sizes[label] = n
    names = sorted(sizes)
    out_shape = tuple(sizes[l] for l in rhs)
    out = np.zeros(out_shape, dtype=complex)
    for values in itertools.product(*(range(sizes[l]) for l in names)):
        env = dict(zip(names, values))
        term = 1
        for labels, op in zip(inputs, operands):
            term *= op[tuple(env[l] for l in labels)]
        out[tuple(env[l] for l in rhs)] += term
    return out


def delta_loop(rank: int, dim: int):
    out = np.zeros((dim,) * rank)
    for idx in itertools.product(range(dim), repeat=rank):
        if len(set(idx)) == 1:
            out[idx] = 1
    return out


def gamma_loop(dims):
    total = math.prod(dims)
    out = np.zeros(tuple(dims) + (total,))
    for idx in itertools.product(*(range(n) for n in dims)):
        m, stride = 0, 1
        for i, n in zip(idx, dims):
            m += i * stride
            stride *= n
        out[idx + (m,)] = 1
    return out


def chi_loop(signs, dim: int):
    out = np.zeros((dim,) * 3)
    for i, j, k in itertools.product(range(dim), repeat=3):
        if (signs[0] * i + signs[1] * j + signs[2] * k) % dim == 0:
            out[i, j, k] = 1
    return out


def dft_loop(v, inverse=False):
    D = len(v)
    sign = 1 if inverse else -1
    return np.array([sum(v[n] * cmath.exp(sign * 2j * math.pi * m * n / D) for n in range(D))
                     for m in range(D)]) / math.sqrt(D)


def kron_loop(a, b, layout="gamma"):
    (I, J), (K, L) = a.shape, b.shape
    out = np.zeros((I * K, J * L), dtype=complex)
    for i, j, k, l in itertools.product(range(I), range(J), range(K), range(L)):
        if layout == "gamma":
            out[i + k * I, j + l * J] = a[i, j] * b[k, l]
        else:
            out[i * K + k, j * L + l] = a[i, j] * b[k, l]
    return out


def khatri_rao_col_loop(a, b, layout="gamma"):
    (I, J), (K, _) = a.shape, b.shape
    out = np.zeros((I * K, J), dtype=complex)
    for i, k, j in itertools.product(range(I), range(K), range(J)):
        row = i + k * I if layout == "gamma" else i * K + k
        out[row, j] = a[i, j] * b[k, j]
    return out


def khatri_rao_row_loop(a, b, layout="gamma"):
    (I, J), (_, L) = a.shape, b.shape
    out = np.zeros((I, J * L), dtype=complex)
    for i, j, l in itertools.product(range(I), range(J), range(L)):
        col = j + l * J if layout == "gamma" else j * L + l
        out[i, col] = a[i, j] * b[i, l]
    return out


def tracy_singh_loop(a, b):
    I, J, K, L = a.shape
    P, Q, R, S = b.shape
    out = np.zeros((I * P * K * R, J * Q * L * S), dtype=complex)
    for i, j, k, l in itertools.product(range(I), range(J), range(K), range(L)):
        for p, q, r, s in itertools.product(range(P), range(Q), range(R), range(S)):
            row = i + I * (p + P * (k + K * r))
            col = j + J * (q + Q * (l + L * s))
            out[row, col] = a[i, j, k, l] * b[p, q, r, s]
    return out


def dot_loop(a, b):
    I, J = a.shape
    K = b.shape[1]
    out = np.zeros((I, K), dtype=complex)
    for i, j, k in itertools.product(range(I), range(J), range(K)):
        out[i, k] += a[i, j] * b[j, k]
    return out


def conv_loop(a, b):
    """Ordinary circular convolution: sum_i a[i] b[k - i]."""
    D = len(a)
    return np.array([sum(a[i] * b[(k - i) % D] for i in range(D)) for k in range(D)])


def corr_loop(a, b):
    """Circular cross-correlation as written in the criterion: sum_i a[i] b[k + i]."""
    D = len(a)
    return np.array([sum(a[i] * b[(k + i) % D] for i in range(D)) for k in range(D)])


def chi_conv_loop(a, b, signs):
    """sum_ij chi[i, j, k] a[i] b[j], enumerating index triples."""
    D = len(a)
    out = np.zeros(D, dtype=complex)
    for i, j, k in itertools.product(range(D), repeat=3):
        if (signs[0] * i + signs[1] * j + signs[2] * k) % D == 0:
            out[k] += a[i] * b[j]
    return out


def random_complex(rng, shape):
    return rng.random(shape) + 1j * rng.random(shape)
