"""Numeric substrate: sparse matrices, randomized truncated SVD, softmax/sigmoid,
and the plain-text dense matrix format used for embedding exchange."""

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import EmptyMatrix, NonFiniteInput, RankTooLarge


def sparse_matrix(rows, cols, entries):
    """Build a CSR matrix from ``(row, col, value)`` triples.

    Zero values are dropped; duplicate coordinates raise ``ValueError``.
    """
    entries = [(int(r), int(c), float(v)) for r, c, v in entries if v != 0]
    seen = set()
    for r, c, _ in entries:
        if (r, c) in seen:
            raise ValueError(f"duplicate entry at ({r}, {c})")
        if not (0 <= r < rows and 0 <= c < cols):
            raise ValueError(f"entry ({r}, {c}) out of range for {rows}x{cols}")
        seen.add((r, c))
    if entries:
        r, c, v = zip(*entries)
    else:
        r, c, v = (), (), ()
    m = sp.csr_matrix((np.asarray(v, dtype=np.float64), (r, c)), shape=(rows, cols))
    m.sort_indices()
    return m


def sparse_entries(m):
    """Row-major ``(row, col, value)`` list of the stored non-zeros."""
    m = sp.csr_matrix(m)
    m.sort_indices()
    out = []
    for i in range(m.shape[0]):
        lo, hi = m.indptr[i], m.indptr[i + 1]
        out.extend((i, int(j), float(v)) for j, v in zip(m.indices[lo:hi], m.data[lo:hi]) if v != 0)
    return out


def matmul(a, b):
    """Product of dense or sparse operands, always returned dense float64."""
    out = a @ b
    if sp.issparse(out):
        out = out.toarray()
    return np.asarray(out, dtype=np.float64)


@dataclass
class SvdFactors:
    U: np.ndarray  # n x k
    S: np.ndarray  # k, non-increasing
    V: np.ndarray  # m x k

    def reconstruct(self):
        return (self.U * self.S) @ self.V.T


def truncated_svd(M, k, seed=0, oversample=10, power_iters=2):
    """Rank-``k`` SVD by Gaussian range finding with power iterations.

    ``M`` may be a dense array or a scipy sparse matrix. The result is a
    deterministic function of ``(M, k, seed, oversample, power_iters)``.
    """
    n, m = M.shape
    if not 1 <= k <= min(n, m):
        raise RankTooLarge(f"k={k} outside [1, {min(n, m)}]")
    nnz = M.nnz if sp.issparse(M) else np.count_nonzero(M)
    if nnz == 0:
        raise EmptyMatrix("matrix has no non-zero entries")
    if sp.issparse(M):
        M = sp.csr_matrix(M, dtype=np.float64)
    else:
        M = np.asarray(M, dtype=np.float64)

    width = min(k + oversample, min(n, m))
    rng = np.random.default_rng(seed)
    omega = rng.standard_normal((m, width))
    Q, _ = np.linalg.qr(matmul(M, omega))
    for _ in range(power_iters):
        Z, _ = np.linalg.qr(matmul(M.T, Q))
        Q, _ = np.linalg.qr(matmul(M, Z))

    B = matmul(M.T, Q).T  # width x m
    Ub, S, Vt = np.linalg.svd(B, full_matrices=False)
    U = Q @ Ub[:, :k]
    V = Vt[:k].T
    # fix signs so the largest-magnitude entry of each U column is positive
    idx = np.argmax(np.abs(U), axis=0)
    signs = np.sign(U[idx, np.arange(k)])
    signs[signs == 0] = 1.0
    return SvdFactors(U * signs, S[:k].copy(), V * signs)


def softmax(v, axis=-1):
    v = np.asarray(v, dtype=np.float64)
    if not np.all(np.isfinite(v)):
        raise NonFiniteInput("softmax input contains non-finite values")
    z = v - np.max(v, axis=axis, keepdims=True)
    e = np.exp(z)
    return e / np.sum(e, axis=axis, keepdims=True)


def log_softmax(v, axis=-1):
    v = np.asarray(v, dtype=np.float64)
    z = v - np.max(v, axis=axis, keepdims=True)
    return z - np.log(np.sum(np.exp(z), axis=axis, keepdims=True))


def sigmoid(x):
    x = np.asarray(x, dtype=np.float64)
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out if out.ndim else float(out)


def log_sigmoid(x):
    """``log(sigmoid(x))`` without overflow."""
    return -np.logaddexp(0.0, -np.asarray(x, dtype=np.float64))


def write_dense(path, M):
    """Write ``M`` as a ``rows cols`` header line followed by row-major values."""
    M = np.atleast_2d(np.asarray(M, dtype=np.float64))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"{M.shape[0]} {M.shape[1]}\n")
        for row in M:
            fh.write(" ".join(repr(float(x)) for x in row))
            fh.write("\n")


def read_dense(path):
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise ValueError(f"{path}: expected 'rows cols' header")
        rows, cols = int(header[0]), int(header[1])
        values = np.array(fh.read().split(), dtype=np.float64)
    if values.size != rows * cols:
        raise ValueError(f"{path}: expected {rows * cols} values, found {values.size}")
    return values.reshape(rows, cols)
