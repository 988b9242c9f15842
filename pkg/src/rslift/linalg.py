"""Exact linear algebra over the rationals.

Small hand-rolled routines tailored to the sizes this package needs
(matrices up to a few dozen rows): fraction-free Bareiss elimination for
integer kernels, rational Gauss-Jordan for solving and inverses, and a
Faddeev-LeVerrier characteristic polynomial.  Everything is deterministic:
given equal inputs, pivots, basis ordering and normalization are equal.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm
from typing import Sequence

Scalar = int | Fraction
Matrix = list[list[Fraction]]


def _frac(x: Scalar) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def to_matrix(rows: Sequence[Sequence[Scalar]]) -> Matrix:
    return [[_frac(x) for x in row] for row in rows]


def identity(n: int) -> Matrix:
    return [[Fraction(1 if i == j else 0) for j in range(n)] for i in range(n)]


def zeros(m: int, n: int) -> Matrix:
    return [[Fraction(0)] * n for _ in range(m)]


def mat_mul(a: Sequence[Sequence[Scalar]], b: Sequence[Sequence[Scalar]]) -> Matrix:
    if a and b and len(a[0]) != len(b):
        raise ValueError("dimension mismatch in mat_mul")
    bt = list(zip(*b))
    return [
        [sum((_frac(x) * _frac(y) for x, y in zip(row, col)), Fraction(0)) for col in bt]
        for row in a
    ]


def mat_vec(a: Sequence[Sequence[Scalar]], v: Sequence[Scalar]) -> list[Fraction]:
    if a and len(a[0]) != len(v):
        raise ValueError("dimension mismatch in mat_vec")
    return [sum((_frac(x) * _frac(y) for x, y in zip(row, v)), Fraction(0)) for row in a]


def mat_add(a: Matrix, b: Matrix) -> Matrix:
    return [[x + y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def mat_scale(a: Matrix, s: Scalar) -> Matrix:
    s = _frac(s)
    return [[s * x for x in row] for row in a]


def transpose(a: Sequence[Sequence[Scalar]]) -> Matrix:
    return [list(map(_frac, col)) for col in zip(*a)]


def _clear_row(row: Sequence[Scalar]) -> list[int]:
    fracs = [_frac(x) for x in row]
    mult = lcm(*(f.denominator for f in fracs)) if fracs else 1
    ints = [int(f * mult) for f in fracs]
    g = 0
    for x in ints:
        g = gcd(g, x)
    if g > 1:
        ints = [x // g for x in ints]
    return ints


def kernel_basis(rows: Sequence[Sequence[Scalar]], ncols: int) -> list[tuple[Fraction, ...]]:
    """Canonical basis of {v : A v = 0}.

    Fraction-free (Bareiss) forward elimination on the integer-cleared
    matrix, then exact back-substitution per free column.  Basis vectors are
    primitive integer vectors, ordered by their defining free column, with
    positive entry there.
    """
    m = [_clear_row(r) for r in rows]
    m = [r for r in m if any(r)]
    pivots: list[int] = []
    rank = 0
    prev = 1
    for col in range(ncols):
        pivot_row = None
        for i in range(rank, len(m)):
            if m[i][col] != 0:
                pivot_row = i
                break
        if pivot_row is None:
            continue
        m[rank], m[pivot_row] = m[pivot_row], m[rank]
        lead = m[rank][col]
        for i in range(rank + 1, len(m)):
            head = m[i][col]
            row_i, row_r = m[i], m[rank]
            for j in range(col + 1, ncols):
                row_i[j] = (lead * row_i[j] - head * row_r[j]) // prev
            row_i[col] = 0
        prev = lead
        pivots.append(col)
        rank += 1
    free_cols = [c for c in range(ncols) if c not in pivots]
    basis: list[tuple[Fraction, ...]] = []
    for f in free_cols:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for i in range(rank - 1, -1, -1):
            pc = pivots[i]
            acc = Fraction(0)
            for j in range(pc + 1, ncols):
                if m[i][j] != 0 and v[j] != 0:
                    acc += m[i][j] * v[j]
            v[pc] = -acc / m[i][pc]
        mult = lcm(*(x.denominator for x in v))
        ints = [int(x * mult) for x in v]
        g = 0
        for x in ints:
            g = gcd(g, x)
        if g > 1:
            ints = [x // g for x in ints]
        basis.append(tuple(Fraction(x) for x in ints))
    return basis


def rref(rows: Sequence[Sequence[Scalar]]) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form and pivot column indices."""
    m = to_matrix(rows)
    if not m:
        return [], []
    ncols = len(m[0])
    pivots: list[int] = []
    rank = 0
    for col in range(ncols):
        pivot_row = None
        for i in range(rank, len(m)):
            if m[i][col] != 0:
                pivot_row = i
                break
        if pivot_row is None:
            continue
        m[rank], m[pivot_row] = m[pivot_row], m[rank]
        lead = m[rank][col]
        m[rank] = [x / lead for x in m[rank]]
        for i in range(len(m)):
            if i != rank and m[i][col] != 0:
                factor = m[i][col]
                m[i] = [x - factor * y for x, y in zip(m[i], m[rank])]
        pivots.append(col)
        rank += 1
    return m, pivots


def rank(rows: Sequence[Sequence[Scalar]]) -> int:
    return len(rref(rows)[1])


def row_space_basis(rows: Sequence[Sequence[Scalar]]) -> list[tuple[Fraction, ...]]:
    """Canonical basis of the row space (nonzero rows of the rref)."""
    red, pivots = rref(rows)
    return [tuple(red[i]) for i in range(len(pivots))]


def column_space_basis(rows: Sequence[Sequence[Scalar]]) -> list[tuple[Fraction, ...]]:
    return row_space_basis(transpose(rows))


def solve(
    a: Sequence[Sequence[Scalar]], b: Sequence[Scalar]
) -> list[Fraction] | None:
    """One exact solution of A x = b, or None if inconsistent.

    Free variables are set to zero, so the answer is unique when A has full
    column rank.
    """
    m = to_matrix(a)
    if not m:
        return [] if all(_frac(x) == 0 for x in b) else None
    ncols = len(m[0])
    aug = [row + [_frac(bx)] for row, bx in zip(m, b)]
    red, pivots = rref(aug)
    for row in red:
        if all(x == 0 for x in row[:-1]) and row[-1] != 0:
            return None
    x = [Fraction(0)] * ncols
    for i in range(len(pivots) - 1, -1, -1):
        pc = pivots[i]
        if pc == ncols:
            return None
        acc = red[i][-1]
        for j in range(pc + 1, ncols):
            if red[i][j] != 0 and x[j] != 0:
                acc -= red[i][j] * x[j]
        x[pc] = acc
    return x


def mat_inv(a: Sequence[Sequence[Scalar]]) -> Matrix:
    n = len(a)
    aug = [list(map(_frac, row)) + identity(n)[i] for i, row in enumerate(a)]
    red, pivots = rref(aug)
    if pivots != list(range(n)):
        raise ValueError("matrix is singular")
    return [row[n:] for row in red[:n]]


def trace(a: Matrix) -> Fraction:
    return sum((a[i][i] for i in range(len(a))), Fraction(0))


def charpoly(a: Sequence[Sequence[Scalar]]) -> list[Fraction]:
    """Monic characteristic polynomial coefficients [1, c1, ..., cn].

    p(t) = t^n + c1 t^(n-1) + ... + cn, by Faddeev-LeVerrier.
    """
    n = len(a)
    m = to_matrix(a)
    coeffs = [Fraction(1)]
    work = identity(n)
    for j in range(1, n + 1):
        work = mat_mul(m, work)
        cj = -trace(work) / j
        coeffs.append(cj)
        if j < n:
            for i in range(n):
                work[i][i] += cj
    return coeffs


def mat_poly(coeffs: Sequence[Scalar], a: Sequence[Sequence[Scalar]]) -> Matrix:
    """Evaluate p(A) for p given by monic-descending coefficients."""
    n = len(a)
    m = to_matrix(a)
    result = mat_scale(identity(n), coeffs[0])
    for c in coeffs[1:]:
        result = mat_mul(result, m)
        for i in range(n):
            result[i][i] += _frac(c)
    return result


def vec_add(u: Sequence[Scalar], v: Sequence[Scalar]) -> list[Fraction]:
    return [_frac(x) + _frac(y) for x, y in zip(u, v)]


def vec_sub(u: Sequence[Scalar], v: Sequence[Scalar]) -> list[Fraction]:
    return [_frac(x) - _frac(y) for x, y in zip(u, v)]


def vec_scale(u: Sequence[Scalar], s: Scalar) -> list[Fraction]:
    s = _frac(s)
    return [s * _frac(x) for x in u]


def is_zero_vec(u: Sequence[Scalar]) -> bool:
    return all(_frac(x) == 0 for x in u)
