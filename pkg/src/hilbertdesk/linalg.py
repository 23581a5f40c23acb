"""Exact dense linear algebra over the rationals.

Matrices are lists of rows of ``Fraction``.  Nothing here takes square roots
or touches floating point.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

Matrix = list  # list[list[Fraction]]


def frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        raise TypeError("floats are not accepted in exact arithmetic")
    return Fraction(x)


def mat(rows: Iterable[Iterable]) -> Matrix:
    return [[frac(x) for x in row] for row in rows]


def zeros(n: int, m: int | None = None) -> Matrix:
    m = n if m is None else m
    return [[Fraction(0)] * m for _ in range(n)]


def identity(n: int) -> Matrix:
    out = zeros(n)
    for i in range(n):
        out[i][i] = Fraction(1)
    return out


def transpose(a: Matrix) -> Matrix:
    if not a:
        return []
    return [list(col) for col in zip(*a)]


def matmul(a: Matrix, b: Matrix) -> Matrix:
    if not a:
        return []
    bt = transpose(b)
    if not bt:
        return [[] for _ in a]
    out = []
    for row in a:
        nz = [(k, x) for k, x in enumerate(row) if x]
        out.append([sum((x * col[k] for k, x in nz), Fraction(0)) for col in bt])
    return out


def matvec(a: Matrix, v: Sequence[Fraction]) -> list:
    return [sum((x * v[k] for k, x in enumerate(row) if x), Fraction(0)) for row in a]


def add(a: Matrix, b: Matrix) -> Matrix:
    return [[x + y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def sub(a: Matrix, b: Matrix) -> Matrix:
    return [[x - y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def scale(c, a: Matrix) -> Matrix:
    c = frac(c)
    return [[c * x for x in row] for row in a]


def is_zero(a: Matrix) -> bool:
    return all(x == 0 for row in a for x in row)


def dot(u: Sequence[Fraction], v: Sequence[Fraction]) -> Fraction:
    return sum((x * y for x, y in zip(u, v) if x and y), Fraction(0))


def quad(g: Matrix, u: Sequence[Fraction], v: Sequence[Fraction] | None = None) -> Fraction:
    """Bilinear form u^T g v."""
    v = u if v is None else v
    return dot(u, matvec(g, v))


def rref(a: Matrix) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form and pivot columns."""
    m = [list(row) for row in a]
    if not m:
        return m, []
    nrows, ncols = len(m), len(m[0])
    pivots = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        p = next((i for i in range(r, nrows) if m[i][c] != 0), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        pivot_row = m[r]
        for i in range(nrows):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], pivot_row)]
        pivots.append(c)
        r += 1
    return m, pivots


def rank(a: Matrix) -> int:
    return len(rref(a)[1]) if a else 0


def nullspace(a: Matrix, ncols: int | None = None) -> list[list[Fraction]]:
    """Basis of {x : a x = 0}, one vector per free column (free entry 1)."""
    if not a:
        n = ncols or 0
        return [[Fraction(int(i == j)) for i in range(n)] for j in range(n)]
    r, pivots = rref(a)
    n = len(a[0])
    free = [c for c in range(n) if c not in set(pivots)]
    basis = []
    for f in free:
        v = [Fraction(0)] * n
        v[f] = Fraction(1)
        for row, p in zip(r, pivots):
            v[p] = -row[f]
        basis.append(v)
    return basis


def solve(a: Matrix, b: Sequence[Fraction]) -> list | None:
    """One solution of a x = b with free variables set to zero, or None."""
    n = len(a[0]) if a else 0
    aug = [list(row) + [frac(x)] for row, x in zip(a, b)]
    r, pivots = rref(aug)
    if n in pivots:
        return None
    x = [Fraction(0)] * n
    for row, p in zip(r, pivots):
        x[p] = row[n]
    return x


def inverse(a: Matrix) -> Matrix:
    n = len(a)
    aug = [list(row) + e for row, e in zip(a, identity(n))]
    r, pivots = rref(aug)
    if pivots[:n] != list(range(n)):
        raise ZeroDivisionError("matrix is singular")
    return [row[n:] for row in r]


def column_space_basis(vectors: Sequence[Sequence[Fraction]]) -> list[int]:
    """Indices of a maximal independent subset (greedy, in order)."""
    if not vectors:
        return []
    return rref(transpose([list(v) for v in vectors]))[1]


def trace(a: Matrix) -> Fraction:
    return sum((a[i][i] for i in range(len(a))), Fraction(0))


def commutator_nullspace(mats: Sequence[Matrix], dim: int) -> list[Matrix]:
    """Basis of {X : X A = A X for every A in mats}, by sparse elimination.

    Unknown X[i][j] lives in column i*dim + j.  Rows are kept as dicts and
    reduced incrementally, which keeps monomial-type inputs cheap.
    """
    pivots: dict[int, dict[int, Fraction]] = {}
    ncols = dim * dim
    sparse = []
    for a in mats:
        cols = [dict() for _ in range(dim)]
        rows = []
        for i, row in enumerate(a):
            rows.append({k: x for k, x in enumerate(row) if x})
            for k, x in enumerate(row):
                if x:
                    cols[k][i] = x
        sparse.append((rows, cols))
    for rows, cols in sparse:
        for i in range(dim):
            for j in range(dim):
                eq: dict[int, Fraction] = {}
                # (X A)[i][j] = sum_k X[i][k] A[k][j]
                for k, x in cols[j].items():
                    key = i * dim + k
                    eq[key] = eq.get(key, 0) + x
                # (A X)[i][j] = sum_k A[i][k] X[k][j]
                for k, x in rows[i].items():
                    key = k * dim + j
                    eq[key] = eq.get(key, 0) - x
                _insert_row(pivots, {k: v for k, v in eq.items() if v})
    return _sparse_null(pivots, ncols, dim)


def _insert_row(pivots, row):
    while row:
        c = min(row)
        prow = pivots.get(c)
        if prow is None:
            inv = 1 / row[c]
            pivots[c] = {k: v * inv for k, v in row.items()}
            return
        f = row[c]
        for k, v in prow.items():
            nv = row.get(k, 0) - f * v
            if nv:
                row[k] = nv
            else:
                row.pop(k, None)


def _sparse_null(pivots, ncols, dim):
    free = [c for c in range(ncols) if c not in pivots]
    order = sorted(pivots, reverse=True)
    basis = []
    for f in free:
        x = {f: Fraction(1)}
        for p in order:
            s = sum((v * x[k] for k, v in pivots[p].items() if k != p and k in x), Fraction(0))
            if s:
                x[p] = -s
        m = zeros(dim)
        for k, v in x.items():
            m[k // dim][k % dim] = v
        basis.append(m)
    return basis
