"""Dense linear algebra over F_p.

Row reduction is compiled with numba.  For moduli below 2**16 the row
updates skip the per-entry ``%`` and let entries grow, reducing a row only
when it is chosen as a pivot; int64 has room for well over 10**9 such
updates at these sizes.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp
from numba import njit

__all__ = [
    "rref",
    "rank",
    "kernel",
    "solve_in_span",
    "independent_rows",
    "mat_mul_mod",
    "sparse_kernel",
    "sparse_rank",
    "row_basis",
]

_LAZY_LIMIT = 1 << 16


@njit(cache=True)
def _inv_mod(a, p):
    # a^(p-2) mod p
    result = 1
    base = a % p
    e = p - 2
    while e > 0:
        if e & 1:
            result = (result * base) % p
        base = (base * base) % p
        e >>= 1
    return result


@njit(cache=True)
def _rref_inplace(A, p, lazy, reduced):
    m, n = A.shape
    pivots = np.empty(min(m, n), dtype=np.int64)
    r = 0
    for c in range(n):
        if r == m:
            break
        piv = -1
        for i in range(r, m):
            v = A[i, c] % p
            A[i, c] = v
            if v != 0:
                piv = i
                break
        if piv < 0:
            continue
        if piv != r:
            for j in range(c, n):
                t = A[r, j]
                A[r, j] = A[piv, j]
                A[piv, j] = t
        inv = _inv_mod(A[r, c], p)
        for j in range(c, n):
            A[r, j] = (A[r, j] % p) * inv % p
        start = 0 if reduced else r + 1
        for i in range(start, m):
            if i == r:
                continue
            f = A[i, c] % p
            if f == 0:
                A[i, c] = 0
                continue
            g = p - f
            if lazy:
                for j in range(c, n):
                    A[i, j] += g * A[r, j]
            else:
                for j in range(c, n):
                    A[i, j] = (A[i, j] + g * A[r, j]) % p
            A[i, c] = 0
        pivots[r] = c
        r += 1
    for i in range(m):
        for j in range(n):
            A[i, j] = A[i, j] % p
    return pivots[:r]


def rref(A: np.ndarray, p: int, reduced: bool = True):
    """Row echelon form of ``A`` mod ``p``; returns ``(R, pivot_columns)``.

    With ``reduced=False`` only entries below pivots are cleared (faster).
    """
    M = np.array(A, dtype=np.int64, copy=True) % p
    if M.ndim != 2:
        raise ValueError("expected a matrix")
    if M.shape[0] == 0 or M.shape[1] == 0:
        return M, np.zeros(0, dtype=np.int64)
    piv = _rref_inplace(M, p, p < _LAZY_LIMIT, reduced)
    return M, piv


def rank(A: np.ndarray, p: int) -> int:
    A = np.asarray(A)
    if A.size == 0:
        return 0
    if A.shape[0] > A.shape[1]:
        A = A.T
    _, piv = rref(A, p, reduced=False)
    return int(piv.shape[0])


def kernel(A: np.ndarray, p: int) -> np.ndarray:
    """Basis of the right kernel of ``A`` as rows of a (k, ncols) array."""
    A = np.asarray(A, dtype=np.int64)
    m, n = A.shape
    if n == 0:
        return np.zeros((0, 0), dtype=np.int64)
    if m == 0:
        return np.eye(n, dtype=np.int64)
    R, piv = rref(A, p)
    r = piv.shape[0]
    free = np.setdiff1d(np.arange(n), piv)
    K = np.zeros((free.shape[0], n), dtype=np.int64)
    if free.shape[0] == 0:
        return K
    K[np.arange(free.shape[0]), free] = 1
    # x_piv = -R[:, free] x_free
    K[:, piv] = (-R[:r][:, free].T) % p
    return K


def independent_rows(A: np.ndarray, p: int) -> np.ndarray:
    """Indices of a maximal set of linearly independent rows, greedily from the top."""
    A = np.asarray(A, dtype=np.int64)
    if A.shape[0] == 0:
        return np.zeros(0, dtype=np.int64)
    # pivots of the transpose's echelon form pick rows in order
    _, piv = rref(A.T, p, reduced=False)
    return piv


def solve_in_span(basis_echelon: np.ndarray, pivots: np.ndarray, vecs: np.ndarray, p: int) -> np.ndarray:
    """Reduce ``vecs`` (rows) against a reduced echelon basis; return remainders."""
    V = np.array(vecs, dtype=np.int64, copy=True) % p
    if basis_echelon.shape[0] == 0 or V.shape[0] == 0:
        return V
    coeffs = V[:, pivots]
    return (V - mat_mul_mod(coeffs, basis_echelon[: pivots.shape[0]], p)) % p


def mat_mul_mod(A: np.ndarray, B: np.ndarray, p: int) -> np.ndarray:
    """Exact ``A @ B mod p`` for small ``p`` via float64 BLAS in safe blocks."""
    A = np.asarray(A, dtype=np.int64) % p
    B = np.asarray(B, dtype=np.int64) % p
    inner = A.shape[1]
    if inner == 0:
        return np.zeros((A.shape[0], B.shape[1]), dtype=np.int64)
    if (p - 1) ** 2 >= 2 ** 52:
        return (A.astype(object) @ B.astype(object) % p).astype(np.int64)
    block = max(1, int((2 ** 52) // ((p - 1) ** 2 + 1)))
    out = np.zeros((A.shape[0], B.shape[1]), dtype=np.int64)
    for s in range(0, inner, block):
        part = A[:, s:s + block].astype(np.float64) @ B[s:s + block].astype(np.float64)
        out = (out + np.mod(part, p).astype(np.int64)) % p
    return out


# ---------------------------------------------------------------------------
# large sparse matrices
#
# A tall matrix M (m rows, n columns, m >> n) is compressed to P @ M with a
# random P of n + 16 rows.  ker(P M) always contains ker(M); the candidate
# kernel is accepted only after the exact check M K = 0, so results are exact
# and independent of the random draw (the reduced echelon basis of a
# subspace is unique).

_DENSE_LIMIT = 3_000_000
_CHUNK = 256


def _sketch(M: sp.csr_matrix, rows: int, p: int, rng: np.random.Generator) -> np.ndarray:
    m, n = M.shape
    MT = M.T.tocsr().astype(np.float64)
    out = np.empty((rows, n), dtype=np.int64)
    for s in range(0, rows, _CHUNK):
        k = min(_CHUNK, rows - s)
        P = rng.integers(0, p, size=(m, k)).astype(np.float64)
        # each entry sums at most nnz(column) products below p**2
        out[s:s + k] = np.mod(MT @ P, p).astype(np.int64).T
    return out


def _as_csr(M, p: int) -> sp.csr_matrix:
    M = sp.csr_matrix(M, dtype=np.int64)
    M.data %= p
    M.eliminate_zeros()
    return M


def sparse_kernel(M, p: int, seed: int = 0) -> np.ndarray:
    """Right kernel of a sparse matrix mod ``p`` as rows of a dense array."""
    M = _as_csr(M, p)
    m, n = M.shape
    if n == 0:
        return np.zeros((0, 0), dtype=np.int64)
    if m * n <= _DENSE_LIMIT or m <= n + 16:
        return kernel(M.toarray(), p)
    rng = np.random.default_rng(seed)
    extra = 16
    while True:
        K = kernel(_sketch(M, n + extra, p, rng), p)
        if K.shape[0] == 0 or not np.any((M @ K.T) % p):
            return K
        extra *= 2


def sparse_rank(M, p: int, seed: int = 0) -> int:
    """Rank mod ``p``; tall or wide matrices are handled through their kernel."""
    M = _as_csr(M, p)
    m, n = M.shape
    if m == 0 or n == 0:
        return 0
    if m < n:
        M = M.T.tocsr()
        m, n = n, m
    if m * n <= _DENSE_LIMIT:
        return rank(M.toarray(), p)
    return n - sparse_kernel(M, p, seed).shape[0]


def row_basis(V, p: int, seed: int = 0) -> tuple[np.ndarray, np.ndarray]:
    """Reduced echelon basis of the row space of ``V`` and its pivot columns."""
    V = _as_csr(V, p)
    m, n = V.shape
    if m == 0 or n == 0:
        return np.zeros((0, n), dtype=np.int64), np.zeros(0, dtype=np.int64)
    if m * n <= _DENSE_LIMIT or m <= n + 16:
        R, piv = rref(V.toarray(), p)
        return R[: piv.shape[0]], piv
    # the row space is the orthogonal complement of the kernel
    rng = np.random.default_rng(seed)
    extra = 16
    while True:
        S = _sketch(V, n + extra, p, rng)
        R, piv = rref(S, p)
        R = R[: piv.shape[0]]
        rest = V[:, piv] @ R if R.shape[0] else np.zeros((m, n), dtype=np.int64)
        if not np.any((V.toarray() - rest) % p):
            return R, piv
        extra *= 2
