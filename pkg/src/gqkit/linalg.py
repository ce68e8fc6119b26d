"""Vectors, matrices and projective points over a table-driven finite field."""

from __future__ import annotations

import itertools

import numpy as np

from .galois import Field


def encode(f: Field, vecs: np.ndarray) -> np.ndarray:
    """Base-q integer code of each row (first coordinate most significant)."""
    vecs = np.asarray(vecs, dtype=np.int64)
    code = np.zeros(vecs.shape[:-1], dtype=np.int64)
    for j in range(vecs.shape[-1]):
        code = code * f.q + vecs[..., j]
    return code


def decode(f: Field, codes, n: int) -> np.ndarray:
    codes = np.asarray(codes, dtype=np.int64)
    out = np.empty(codes.shape + (n,), dtype=np.int64)
    for j in range(n - 1, -1, -1):
        out[..., j] = codes % f.q
        codes = codes // f.q
    return out


def normalize(f: Field, vecs: np.ndarray) -> np.ndarray:
    """Scale each nonzero row so its first nonzero entry is 1."""
    vecs = np.asarray(vecs, dtype=np.int64)
    nz = vecs != 0
    first = np.argmax(nz, axis=-1)
    lead = np.take_along_axis(vecs, first[..., None], axis=-1)[..., 0]
    scale = f.inv[lead]
    return f.mul[vecs, scale[..., None]]


def projective_points(f: Field, n: int) -> np.ndarray:
    """All points of PG(n-1, q) as normalized rows, in increasing code order."""
    allv = decode(f, np.arange(1, f.q**n), n)
    norm = normalize(f, allv)
    keep = np.all(norm == allv, axis=1)
    return allv[keep]


def dot(f: Field, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Row-wise standard dot product (broadcasting over leading axes)."""
    prod = f.mul[a, b]
    acc = prod[..., 0]
    for j in range(1, prod.shape[-1]):
        acc = f.add[acc, prod[..., j]]
    return acc


def lincomb(f: Field, coeffs: np.ndarray, vecs: np.ndarray) -> np.ndarray:
    """sum_i coeffs[..., i] * vecs[i] for a stack of basis vectors."""
    coeffs = np.asarray(coeffs, dtype=np.int64)
    out = np.zeros(coeffs.shape[:-1] + (vecs.shape[-1],), dtype=np.int64)
    for i in range(vecs.shape[0]):
        out = f.add[out, f.mul[coeffs[..., i, None], vecs[i]]]
    return out


def matvec(f: Field, M: np.ndarray, vecs: np.ndarray) -> np.ndarray:
    """Row vectors times matrix: v -> v M."""
    return lincomb(f, vecs, M)


def row_reduce(f: Field, M) -> tuple[np.ndarray, list[int]]:
    A = np.array(M, dtype=np.int64).copy()
    rows, cols = A.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if A[i, c]), None)
        if piv is None:
            continue
        A[[r, piv]] = A[[piv, r]]
        A[r] = f.mul[A[r], f.inv[A[r, c]]]
        for i in range(rows):
            if i != r and A[i, c]:
                A[i] = f.sub[A[i], f.mul[A[r], A[i, c]]]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return A, pivots


def rank(f: Field, M) -> int:
    return len(row_reduce(f, M)[1])


def nullspace(f: Field, M) -> np.ndarray:
    """Basis (as rows) of {x : M x^T = 0}."""
    M = np.atleast_2d(np.asarray(M, dtype=np.int64))
    R, piv = row_reduce(f, M)
    n = M.shape[1]
    free = [c for c in range(n) if c not in piv]
    basis = []
    for fc in free:
        v = np.zeros(n, dtype=np.int64)
        v[fc] = 1
        for i, pc in enumerate(piv):
            v[pc] = f.neg[R[i, fc]]
        basis.append(v)
    return np.array(basis, dtype=np.int64).reshape(len(basis), n)


def span_points(f: Field, basis: np.ndarray) -> np.ndarray:
    """Normalized points of the projective subspace spanned by ``basis`` rows."""
    k = basis.shape[0]
    coeffs = np.array(list(itertools.product(range(f.q), repeat=k))[1:], dtype=np.int64)
    vecs = lincomb(f, coeffs, basis)
    vecs = vecs[np.any(vecs != 0, axis=1)]
    return np.unique(normalize(f, vecs), axis=0)


def mat_inverse(f: Field, M) -> np.ndarray:
    M = np.asarray(M, dtype=np.int64)
    n = M.shape[0]
    aug = np.concatenate([M, np.eye(n, dtype=np.int64)], axis=1)
    R, piv = row_reduce(f, aug)
    if piv[:n] != list(range(n)):
        raise ValueError("matrix is singular")
    return R[:, n:]


def mat_mul(f: Field, A, B) -> np.ndarray:
    return lincomb(f, np.asarray(A, dtype=np.int64), np.asarray(B, dtype=np.int64))
