"""Exact linear algebra over the prime field F_p.

Matrices are numpy int64 arrays with entries in range(p). Every routine
returns freshly reduced arrays; nothing is modified in place.
"""

import itertools

import numpy as np


def is_prime(p):
    if p < 2:
        return False
    return all(p % q for q in range(2, int(p**0.5) + 1))


def mat(rows, cols, entries=None, p=2):
    if entries is None:
        return np.zeros((rows, cols), dtype=np.int64)
    A = np.array(entries, dtype=np.int64).reshape(rows, cols)
    return A % p


def eye(n):
    return np.eye(n, dtype=np.int64)


def zeros(m, n):
    return np.zeros((m, n), dtype=np.int64)


def mul(A, B, p):
    assert A.shape[1] == B.shape[0], (A.shape, B.shape)
    return (A @ B) % p


def rref(A, p):
    """Reduced row echelon form of A and its pivot columns."""
    R = np.array(A, dtype=np.int64) % p
    m, n = R.shape
    pivots = []
    row = 0
    for col in range(n):
        if row == m:
            break
        nz = np.nonzero(R[row:, col])[0]
        if len(nz) == 0:
            continue
        r = row + nz[0]
        if r != row:
            R[[row, r]] = R[[r, row]]
        inv = pow(int(R[row, col]), -1, p)
        R[row] = (R[row] * inv) % p
        for other in range(m):
            if other != row and R[other, col]:
                R[other] = (R[other] - R[other, col] * R[row]) % p
        pivots.append(col)
        row += 1
    return R, pivots


def rank(A, p):
    if A.size == 0:
        return 0
    return len(rref(A, p)[1])


def nullspace(A, p):
    """Basis of {x : A x = 0} as the columns of an (n x k) matrix."""
    m, n = A.shape
    if m == 0:
        return eye(n)
    R, pivots = rref(A, p)
    free = [j for j in range(n) if j not in pivots]
    N = zeros(n, len(free))
    for c, j in enumerate(free):
        N[j, c] = 1
        for r, pc in enumerate(pivots):
            N[pc, c] = (-R[r, j]) % p
    return N


def solve(A, B, p):
    """Some X with A X = B, or None when the system is inconsistent.

    B may be a vector or a matrix; free variables are set to zero so the
    answer is deterministic.
    """
    vector = B.ndim == 1
    B2 = B.reshape(-1, 1) if vector else B
    m, n = A.shape
    assert B2.shape[0] == m
    k = B2.shape[1]
    if m == 0:
        X = zeros(n, k)
        return X[:, 0] if vector else X
    aug = np.concatenate([A % p, B2 % p], axis=1)
    R, pivots = rref(aug, p)
    if any(c >= n for c in pivots):
        return None
    X = zeros(n, k)
    for r, c in enumerate(pivots):
        X[c] = R[r, n:]
    return X[:, 0] if vector else X


def column_basis(A, p):
    """Indices of a maximal independent set of columns (leftmost first)."""
    if A.size == 0:
        return []
    return rref(A, p)[1]


def in_span(A, v, p):
    return solve(A, v, p) is not None


def quotient(K, n, p):
    """Projection V -> V/span(K) for V = F_p^n.

    K holds spanning vectors as columns. Returns (Q, S): Q maps V onto
    quotient coordinates and S is the section picking the standard basis
    vectors not used as pivots, so Q @ S = I and Q kills K.
    """
    if K.shape[1] == 0:
        return eye(n), eye(n)
    R, pivots = rref(K.T, p)
    R = R[: len(pivots)]
    keep = [j for j in range(n) if j not in pivots]
    reduce_ = (eye(n) - R.T @ eye(n)[pivots, :]) % p
    Q = reduce_[keep, :] % p
    S = eye(n)[:, keep]
    return Q, S


def vectors(n, p):
    """All vectors of F_p^n in lexicographic order, as tuples."""
    return itertools.product(range(p), repeat=n)


def span_elements(B, p):
    """All elements of the column span of B, enumerated by coefficients."""
    n, k = B.shape
    for coeffs in itertools.product(range(p), repeat=k):
        yield (B @ np.array(coeffs, dtype=np.int64)) % p if k else zeros(n, 1)[:, 0]


def block(rows, p=None):
    """np.block that tolerates zero-sized pieces."""
    out = np.block(rows) if rows else zeros(0, 0)
    return out % p if p else out
