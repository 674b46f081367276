"""Brute-force reference implementations used only by the tests.

They loop over basis indices bit by bit and never touch the package's
tensor-reshaping code paths.
"""

import numpy as np


def bits(b, n):
    return [(b >> (n - 1 - k)) & 1 for k in range(n)]


def from_bits(bs):
    out = 0
    for v in bs:
        out = (out << 1) | v
    return out


def partial_trace_loops(m, n, keep):
    keep = sorted(keep)
    d = 2 ** len(keep)
    out = np.zeros((d, d), dtype=complex)
    for i in range(2**n):
        bi = bits(i, n)
        for j in range(2**n):
            bj = bits(j, n)
            if any(bi[k] != bj[k] for k in range(n) if k not in keep):
                continue
            out[from_bits([bi[k] for k in keep]), from_bits([bj[k] for k in keep])] += m[i, j]
    return out


def partial_transpose_loops(m, n, tset):
    out = np.zeros_like(m)
    for i in range(2**n):
        for j in range(2**n):
            bi, bj = bits(i, n), bits(j, n)
            for k in tset:
                bi[k], bj[k] = bj[k], bi[k]
            out[from_bits(bi), from_bits(bj)] = m[i, j]
    return out


def random_density(rng, n, rank=None):
    d = 2**n
    rank = rank or d
    a = rng.normal(size=(d, rank)) + 1j * rng.normal(size=(d, rank))
    m = a @ a.conj().T
    return m / np.trace(m).real


def random_unitary(rng, d):
    a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    q, r = np.linalg.qr(a)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_hermitian(rng, d):
    a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return a + a.conj().T
