"""Exact integer matrix algebra.

Hermite and Smith normal forms, saturated kernel lattices, integer linear
solving and cokernel structure, all over arbitrary-precision integers.
Matrices are numpy arrays of dtype=object holding Python ints, so nothing
ever overflows and no floating point is involved.
"""

from __future__ import annotations

import numpy as np

from .abelian import FGAbelianGroup, factorint


def _as_int(x) -> int:
    # operator.index semantics: ints and integer-like only, no silent
    # truncation of floats
    if isinstance(x, bool):
        raise ValueError(f"matrix entry {x!r} is not an integer")
    try:
        return int(x.__index__())
    except AttributeError:
        raise ValueError(f"matrix entry {x!r} is not an integer") from None


def intmat(rows) -> np.ndarray:
    """Build an exact integer matrix (dtype=object) from nested sequences."""
    if isinstance(rows, np.ndarray):
        arr = rows
        if arr.dtype == object and arr.ndim == 2:
            return arr
        rows = arr.tolist()
    try:
        data = [[_as_int(x) for x in row] for row in rows]
    except TypeError:
        raise ValueError("matrix input must be a sequence of rows") from None
    ncols = {len(r) for r in data}
    if len(data) and len(ncols) != 1:
        raise ValueError("ragged rows in matrix input")
    m = len(data)
    n = ncols.pop() if data else 0
    out = np.empty((m, n), dtype=object)
    for i, row in enumerate(data):
        for j, x in enumerate(row):
            out[i, j] = x
    return out


def zeros(m: int, n: int) -> np.ndarray:
    out = np.empty((m, n), dtype=object)
    out[...] = 0
    return out


def eye(n: int) -> np.ndarray:
    out = zeros(n, n)
    for i in range(n):
        out[i, i] = 1
    return out


def intvec(entries) -> np.ndarray:
    out = np.empty(len(entries), dtype=object)
    for i, x in enumerate(entries):
        out[i] = int(x)
    return out


def _swap_rows(W: np.ndarray, i: int, j: int) -> None:
    if i != j:
        W[[i, j]] = W[[j, i]]


def _row_reduce(W: np.ndarray, ncols: int, hermite: bool) -> list[tuple[int, int]]:
    """In-place integer row echelon reduction of W, pivoting on W[:, :ncols].

    Columns beyond ncols (an augmented block) undergo the same row
    operations.  Pivots are made positive; with hermite=True the entries
    above each pivot are reduced into [0, pivot).  Returns the pivot
    positions (row, col).
    """
    m = W.shape[0]
    pivots: list[tuple[int, int]] = []
    r = 0
    for c in range(ncols):
        if r == m:
            break
        while True:
            col = W[r:, c]
            nz = np.nonzero(col != 0)[0]
            if len(nz) == 0:
                break
            absvals = [abs(col[i]) for i in nz]
            best = nz[min(range(len(nz)), key=absvals.__getitem__)]
            _swap_rows(W, r, r + best)
            if W[r, c] < 0:
                W[r] = -W[r]
            if len(nz) == 1:
                break
            piv = W[r, c]
            rest = W[r + 1:, c]
            q = rest // piv
            upd = np.nonzero(q != 0)[0]
            if len(upd) == 0:
                # remaining entries already in [0, piv); smaller nonzero
                # exists only if some entry is nonzero, handled next round
                sub = np.nonzero(rest != 0)[0]
                if len(sub) == 0:
                    break
                continue
            W[r + 1 + upd] -= q[upd, None] * W[r][None, :]
            # loop: remainders are now in [0, piv), Euclid terminates
            if not np.any(W[r + 1:, c] != 0):
                break
        if W[r, c] != 0:
            if hermite and r > 0:
                piv = W[r, c]
                q = W[:r, c] // piv
                upd = np.nonzero(q != 0)[0]
                if len(upd):
                    W[upd] -= q[upd, None] * W[r][None, :]
            pivots.append((r, c))
            r += 1
    return pivots


def hermite_normal_form(M) -> tuple[np.ndarray, np.ndarray]:
    """Row Hermite normal form: returns (H, U) with H = U @ M, U unimodular."""
    M = intmat(M)
    m, n = M.shape
    W = np.concatenate([M, eye(m)], axis=1) if m else zeros(0, n)
    _row_reduce(W, n, hermite=True)
    return W[:, :n].copy(), W[:, n:].copy()


def rational_rank(M) -> int:
    """Rank of M over the rationals, computed exactly."""
    M = intmat(M).copy()
    return len(_row_reduce(M, M.shape[1], hermite=False))


def kernel_basis(M) -> np.ndarray:
    """Basis of the integer kernel lattice {x : Mx = 0}, as matrix columns.

    The kernel of an integer matrix is automatically saturated: the basis
    comes from the unimodular transform of a row reduction of the
    transpose, so the returned columns span the full kernel lattice and
    Z^cols modulo the kernel is torsion-free.
    """
    M = intmat(M)
    m, n = M.shape
    W = np.concatenate([M.T.copy(), eye(n)], axis=1)
    pivots = _row_reduce(W, m, hermite=False)
    rank = len(pivots)
    return W[rank:, m:].T.copy()


def column_lattice_basis(M) -> np.ndarray:
    """Columns forming a basis of the lattice spanned by the columns of M.

    Row operations on the transpose preserve the column lattice, so the
    nonzero rows of its echelon form give an exact generating set.
    """
    W = intmat(M).T.copy()
    pivots = _row_reduce(W, W.shape[1], hermite=False)
    return W[:len(pivots)].T.copy()


def _chain_from_diagonal(diag: list[int]) -> list[int]:
    """Turn nonzero diagonal entries into an ascending divisibility chain."""
    powers: dict[int, list[int]] = {}
    for d in diag:
        d = abs(d)
        if d == 1:
            continue
        for p, e in factorint(d).items():
            powers.setdefault(p, []).append(e)
    depth = max((len(v) for v in powers.values()), default=0)
    chain = []
    for i in range(depth):
        f = 1
        for p, exps in powers.items():
            exps_sorted = sorted(exps, reverse=True)
            if i < len(exps_sorted):
                f *= p ** exps_sorted[i]
        chain.append(f)
    chain.reverse()
    return chain


def _diagonalize(M: np.ndarray) -> list[int]:
    """Nonzero diagonal entries of some diagonalization of M.

    Alternates row and column echelon passes; this converges to a diagonal
    matrix equivalent to M but the entries need not form a chain yet.
    """
    A = M.copy()
    for _ in range(100):
        pivots = _row_reduce(A, A.shape[1], hermite=False)
        rank = len(pivots)
        A = A[:rank]
        # diagonal iff every pivot row has a single nonzero entry
        if all(np.count_nonzero(A[i] != 0) <= 1 for i in range(rank)):
            return [A[i, c] for i, c in pivots]
        A = A.T.copy()
    raise RuntimeError("diagonalization did not converge")


def cokernel_structure(M) -> FGAbelianGroup:
    """Structure of Z^rows / column-span(M) as a finitely generated group."""
    M = intmat(M)
    diag = _diagonalize(M)
    free = M.shape[0] - len(diag)
    return FGAbelianGroup(free, _chain_from_diagonal(diag))


def invariant_factors(M) -> list[int]:
    """Invariant factors of M (SNF diagonal with unit entries dropped)."""
    return _chain_from_diagonal(_diagonalize(intmat(M)))


def smith_normal_form(M) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Smith normal form: (D, U, V) with D = U @ M @ V.

    U and V are unimodular; D is diagonal with d_1 | d_2 | ... positive,
    followed by zeros.
    """
    M = intmat(M)
    m, n = M.shape
    D = M.copy()
    U = eye(m)
    V = eye(n)
    t = 0
    while t < min(m, n):
        sub = D[t:, t:]
        nz = np.nonzero(sub != 0)
        if len(nz[0]) == 0:
            break
        # smallest-magnitude pivot keeps coefficient growth tame
        k = min(range(len(nz[0])), key=lambda i: abs(sub[nz[0][i], nz[1][i]]))
        pi, pj = t + nz[0][k], t + nz[1][k]
        _swap_rows(D, t, pi)
        _swap_rows(U, t, pi)
        if pj != t:
            D[:, [t, pj]] = D[:, [pj, t]]
            V[:, [t, pj]] = V[:, [pj, t]]
        while True:
            if D[t, t] < 0:
                D[t] = -D[t]
                U[t] = -U[t]
            piv = D[t, t]
            col = D[:, t].copy()
            col[t] = 0
            if np.any(col != 0):
                q = D[:, t] // piv
                q[t] = 0
                upd = np.nonzero(q != 0)[0]
                if len(upd):
                    D[upd] -= q[upd, None] * D[t][None, :]
                    U[upd] -= q[upd, None] * U[t][None, :]
                if np.any(np.concatenate([D[:t, t], D[t + 1:, t]]) != 0):
                    # a remainder became the new smallest entry
                    colv = D[:, t]
                    nz2 = [i for i in range(m) if i != t and colv[i] != 0]
                    best = min(nz2, key=lambda i: abs(colv[i]))
                    _swap_rows(D, t, best)
                    _swap_rows(U, t, best)
                    continue
            row = D[t, :].copy()
            row[t] = 0
            if np.any(row != 0):
                piv = D[t, t]
                q = D[t, :] // piv
                q[t] = 0
                upd = np.nonzero(q != 0)[0]
                if len(upd):
                    D[:, upd] -= D[:, t][:, None] * q[None, upd]
                    V[:, upd] -= V[:, t][:, None] * q[None, upd]
                if np.any(np.concatenate([D[t, :t], D[t, t + 1:]]) != 0):
                    rowv = D[t, :]
                    nz2 = [j for j in range(n) if j != t and rowv[j] != 0]
                    best = min(nz2, key=lambda j: abs(rowv[j]))
                    D[:, [t, best]] = D[:, [best, t]]
                    V[:, [t, best]] = V[:, [best, t]]
                    continue
                continue
            break
        # enforce pivot | remaining submatrix for the divisibility chain
        piv = D[t, t]
        if piv != 1 and t + 1 < min(m, n):
            rem = D[t + 1:, t + 1:]
            bad = np.nonzero(_mod_abs(rem, piv))
            if len(bad[0]):
                i = t + 1 + bad[0][0]
                D[t] += D[i]
                U[t] += U[i]
                continue_outer = True
            else:
                continue_outer = False
        else:
            continue_outer = False
        if not continue_outer:
            t += 1
    return D, U, V


def _mod_abs(A: np.ndarray, piv) -> np.ndarray:
    if A.size == 0:
        return np.zeros(A.shape, dtype=bool)
    return (A % piv) != 0


def solve_integer(A, b):
    """An integer solution x of A x = b, or None when none exists."""
    A = intmat(A)
    b = intvec(b)
    D, U, V = smith_normal_form(A)
    m, n = A.shape
    c = U @ b if m else intvec([])
    y = zeros(n, 1)[:, 0]
    r = min(m, n)
    for i in range(m):
        d = D[i, i] if i < r else 0
        if d == 0:
            if c[i] != 0:
                return None
        else:
            if c[i] % d != 0:
                return None
            y[i] = c[i] // d
    return V @ y


def determinant(M) -> int:
    """Exact determinant by fraction-free (Bareiss) elimination."""
    M = intmat(M).copy()
    n = M.shape[0]
    if M.shape[0] != M.shape[1]:
        raise ValueError("determinant of a non-square matrix")
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if M[k, k] == 0:
            nz = np.nonzero(M[k + 1:, k] != 0)[0]
            if len(nz) == 0:
                return 0
            _swap_rows(M, k, k + 1 + int(nz[0]))
            sign = -sign
        piv = M[k, k]
        blk = M[k + 1:, k + 1:]
        M[k + 1:, k + 1:] = (piv * blk - np.outer(M[k + 1:, k], M[k, k + 1:])) // prev
        M[k + 1:, k] = 0
        prev = piv
    return sign * int(M[n - 1, n - 1])


class SaturatedBasisSolver:
    """Repeated coordinate solving against a fixed lattice basis.

    Holds a column-echelon form of the basis matrix; `quotient_by` computes
    the structure of (lattice)/(sublattice) for a sublattice handed in by
    generating vectors, expressing each generator in basis coordinates by
    exact forward substitution and reading the quotient off the coefficient
    matrix.  Generators outside the lattice are a hard error.
    """

    def __init__(self, basis: np.ndarray):
        B = intmat(basis)
        self.n, self.s = B.shape
        W = np.concatenate([B.T.copy(), eye(self.s)], axis=1)
        pivots = _row_reduce(W, self.n, hermite=False)
        if len(pivots) != self.s:
            raise ValueError("basis columns are not independent")
        self.echelon = W[:, :self.n].T.copy()   # n x s, column echelon
        self.pivot_rows = [c for _, c in pivots]

    def coefficient_matrix(self, gens: np.ndarray) -> np.ndarray:
        """Coordinates of each generator column, up to a basis change.

        Returns Y (s x g) with column spans satisfying
        lattice(basis) @ C = gens for C = W @ Y, W unimodular; quotient
        computations may use Y directly.
        """
        G = intmat(gens).copy()
        g = G.shape[1]
        Y = zeros(self.s, g)
        for j in range(self.s):
            r = self.pivot_rows[j]
            piv = self.echelon[r, j]
            vals = G[r, :]
            if np.any(vals % piv != 0):
                raise ArithmeticError("vector outside the spanned lattice")
            coef = vals // piv
            Y[j, :] = coef
            upd = np.nonzero(coef != 0)[0]
            if len(upd):
                G[:, upd] -= np.outer(self.echelon[:, j], coef[upd])
        if np.any(G != 0):
            raise ArithmeticError("vector outside the spanned lattice")
        return Y

    def quotient_by(self, gens: np.ndarray) -> FGAbelianGroup:
        Y = self.coefficient_matrix(gens)
        return cokernel_structure(Y)
