"""Exact integer matrix algebra.

Everything here runs on Python ints, so entry growth during elimination is
absorbed by arbitrary precision arithmetic.  These routines are the substrate
for the rest of the package: Smith normal forms give canonical forms of
finitely generated abelian groups, kernel bases give homology, and integer
solves give subgroup arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction


class IntMatrix:
    """Immutable dense integer matrix, stored row-major."""

    __slots__ = ("rows", "cols", "data")

    def __init__(self, data, rows: int | None = None, cols: int | None = None):
        tup = tuple(tuple(int(x) for x in row) for row in data)
        if rows is None:
            rows = len(tup)
        if cols is None:
            cols = len(tup[0]) if tup else 0
        if len(tup) != rows:
            raise ValueError(f"expected {rows} rows, got {len(tup)}")
        if any(len(row) != cols for row in tup):
            raise ValueError("rows have unequal lengths")
        if rows and not tup:
            tup = tuple(() for _ in range(rows))
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "cols", cols)
        object.__setattr__(self, "data", tup)

    def __setattr__(self, name, value):
        raise AttributeError("IntMatrix is immutable")

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "IntMatrix":
        return cls([[0] * cols for _ in range(rows)], rows=rows, cols=cols)

    @classmethod
    def from_columns(cls, columns, rows: int) -> "IntMatrix":
        cols = list(columns)
        return cls(
            [[col[i] for col in cols] for i in range(rows)],
            rows=rows,
            cols=len(cols),
        )

    @classmethod
    def diagonal(cls, entries) -> "IntMatrix":
        entries = list(entries)
        n = len(entries)
        return cls([[entries[i] if i == j else 0 for j in range(n)] for i in range(n)])

    def __getitem__(self, key) -> int:
        i, j = key
        return self.data[i][j]

    def row(self, i: int) -> tuple[int, ...]:
        return self.data[i]

    def column(self, j: int) -> tuple[int, ...]:
        return tuple(self.data[i][j] for i in range(self.rows))

    def columns(self) -> list[list[int]]:
        return [list(self.column(j)) for j in range(self.cols)]

    def transpose(self) -> "IntMatrix":
        return IntMatrix(
            [[self.data[i][j] for i in range(self.rows)] for j in range(self.cols)],
            rows=self.cols,
            cols=self.rows,
        )

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        out = []
        for i in range(self.rows):
            row = self.data[i]
            out.append(
                [
                    sum(row[k] * other.data[k][j] for k in range(self.cols))
                    for j in range(other.cols)
                ]
            )
        return IntMatrix(out, rows=self.rows, cols=other.cols)

    def scale(self, c: int) -> "IntMatrix":
        return IntMatrix([[c * x for x in row] for row in self.data], rows=self.rows, cols=self.cols)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def is_zero(self) -> bool:
        return all(x == 0 for row in self.data for x in row)

    def diagonal_entries(self) -> tuple[int, ...]:
        return tuple(self.data[i][i] for i in range(min(self.rows, self.cols)))

    def to_lists(self) -> list[list[int]]:
        return [list(row) for row in self.data]

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, IntMatrix)
            and self.shape == other.shape
            and self.data == other.data
        )

    def __hash__(self) -> int:
        return hash((self.rows, self.cols, self.data))

    def __repr__(self) -> str:
        return f"IntMatrix({self.to_lists()!r})"


def hstack(a: IntMatrix, b: IntMatrix) -> IntMatrix:
    if a.rows != b.rows:
        raise ValueError("row count mismatch")
    return IntMatrix(
        [list(a.data[i]) + list(b.data[i]) for i in range(a.rows)],
        rows=a.rows,
        cols=a.cols + b.cols,
    )


def vstack(a: IntMatrix, b: IntMatrix) -> IntMatrix:
    if a.cols != b.cols:
        raise ValueError("column count mismatch")
    return IntMatrix(
        [list(r) for r in a.data] + [list(r) for r in b.data],
        rows=a.rows + b.rows,
        cols=a.cols,
    )


@dataclass(frozen=True)
class SmithDecomposition:
    """Unimodular U, V with U @ A @ V == D, D diagonal with d_i | d_{i+1}."""

    u: IntMatrix
    d: IntMatrix
    v: IntMatrix

    def diagonal(self) -> tuple[int, ...]:
        return self.d.diagonal_entries()


PIVOT_STRATEGIES = ("min_abs", "first_nonzero")


def _find_pivot(d, m, n, t, strategy):
    best = None
    for i in range(t, m):
        row = d[i]
        for j in range(t, n):
            x = row[j]
            if x == 0:
                continue
            if strategy == "first_nonzero":
                return (i, j)
            if best is None or abs(x) < abs(d[best[0]][best[1]]):
                best = (i, j)
    return best


def snf(a: IntMatrix, strategy: str = "min_abs") -> SmithDecomposition:
    """Smith normal form of an integer matrix.

    The pivot `strategy` selects which nonzero entry of the working block is
    moved into pivot position: "min_abs" takes a smallest-magnitude entry
    (limits growth), "first_nonzero" takes the first in row-major order.  Both
    produce the same diagonal, which the test suite uses as a cross-check.

    Returns:
        SmithDecomposition with u @ a @ v == d, |det u| == |det v| == 1,
        nonnegative diagonal satisfying the divisibility chain.
    """
    if strategy not in PIVOT_STRATEGIES:
        raise ValueError(f"unknown pivot strategy {strategy!r}")
    m, n = a.rows, a.cols
    d = [list(row) for row in a.data]
    u = [[1 if i == j else 0 for j in range(m)] for i in range(m)]
    v = [[1 if i == j else 0 for j in range(n)] for i in range(n)]

    def row_add(i, k, c):
        # row_i += c * row_k
        di, dk = d[i], d[k]
        for j in range(n):
            di[j] += c * dk[j]
        ui, uk = u[i], u[k]
        for j in range(m):
            ui[j] += c * uk[j]

    def col_add(j, k, c):
        # col_j += c * col_k
        for i in range(m):
            d[i][j] += c * d[i][k]
        for i in range(n):
            v[i][j] += c * v[i][k]

    def row_swap(i, k):
        d[i], d[k] = d[k], d[i]
        u[i], u[k] = u[k], u[i]

    def col_swap(j, k):
        for i in range(m):
            d[i][j], d[i][k] = d[i][k], d[i][j]
        for i in range(n):
            v[i][j], v[i][k] = v[i][k], v[i][j]

    def row_negate(i):
        d[i] = [-x for x in d[i]]
        u[i] = [-x for x in u[i]]

    t = 0
    while t < min(m, n):
        piv = _find_pivot(d, m, n, t, strategy)
        if piv is None:
            break
        if piv[0] != t:
            row_swap(t, piv[0])
        if piv[1] != t:
            col_swap(t, piv[1])
        while True:
            # Clear the pivot column; a nonzero remainder is strictly smaller
            # than the pivot, so swapping it in makes progress.
            for i in range(t + 1, m):
                while d[i][t] != 0:
                    q = d[i][t] // d[t][t]
                    if q:
                        row_add(i, t, -q)
                    if d[i][t] != 0:
                        row_swap(i, t)
            for j in range(t + 1, n):
                while d[t][j] != 0:
                    q = d[t][j] // d[t][t]
                    if q:
                        col_add(j, t, -q)
                    if d[t][j] != 0:
                        col_swap(j, t)
            if any(d[i][t] != 0 for i in range(t + 1, m)):
                continue
            # Pivot must divide the rest of the block for the chain to hold.
            p = d[t][t]
            bad = None
            for i in range(t + 1, m):
                row = d[i]
                if any(row[j] % p for j in range(t + 1, n)):
                    bad = i
                    break
            if bad is None:
                break
            row_add(t, bad, 1)
        if d[t][t] < 0:
            row_negate(t)
        t += 1

    return SmithDecomposition(
        IntMatrix(u, rows=m, cols=m),
        IntMatrix(d, rows=m, cols=n),
        IntMatrix(v, rows=n, cols=n),
    )


def cokernel_structure(a: IntMatrix) -> tuple[int, tuple[int, ...]]:
    """Structure of Z^rows / (column lattice of `a`).

    Returns (free_rank, invariant_factors) with unit factors dropped.
    """
    diag = snf(a).diagonal()
    nonzero = [x for x in diag if x != 0]
    free_rank = a.rows - len(nonzero)
    return free_rank, tuple(x for x in nonzero if x != 1)


def kernel_basis(a: IntMatrix) -> IntMatrix:
    """Basis of the integer null space of `a`, as matrix columns.

    The basis is primitive: its columns are columns of a unimodular matrix,
    so they extend to a basis of the ambient lattice.
    """
    dec = snf(a)
    rank = sum(1 for x in dec.diagonal() if x != 0)
    cols = [dec.v.column(j) for j in range(rank, a.cols)]
    return IntMatrix.from_columns(cols, rows=a.cols)


def solve(a: IntMatrix, b: IntMatrix) -> IntMatrix | None:
    """Integer solution X of a @ X == b, or None when none exists."""
    if a.rows != b.rows:
        raise ValueError("row count mismatch")
    dec = snf(a)
    c = dec.u @ b
    diag = dec.diagonal()
    y = [[0] * b.cols for _ in range(a.cols)]
    for i in range(a.rows):
        di = diag[i] if i < len(diag) else 0
        for j in range(b.cols):
            cij = c.data[i][j]
            if di == 0:
                if cij != 0:
                    return None
            else:
                if cij % di:
                    return None
                if i < a.cols:
                    y[i][j] = cij // di
    return dec.v @ IntMatrix(y, rows=a.cols, cols=b.cols)


def column_basis(a: IntMatrix) -> IntMatrix:
    """Basis of the lattice spanned by the columns of `a` (echelon columns)."""
    work = [list(a.column(j)) for j in range(a.cols)]
    work = [c for c in work if any(c)]
    basis = []
    for r in range(a.rows):
        live = [c for c in work if c[r] != 0]
        while len(live) > 1:
            live.sort(key=lambda c: abs(c[r]))
            c0 = live[0]
            for c in live[1:]:
                q = c[r] // c0[r]
                for i in range(a.rows):
                    c[i] -= q * c0[i]
            live = [c for c in work if c[r] != 0]
        if live:
            col = live[0]
            work.remove(col)
            if col[r] < 0:
                col[:] = [-x for x in col]
            basis.append(col)
    return IntMatrix.from_columns(basis, rows=a.rows)


def det(a: IntMatrix) -> int:
    """Exact determinant via fraction-free (Bareiss) elimination."""
    if a.rows != a.cols:
        raise ValueError("determinant of a non-square matrix")
    n = a.rows
    if n == 0:
        return 1
    m = [list(row) for row in a.data]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if m[i][k] != 0), None)
            if swap is None:
                return 0
            m[k], m[swap] = m[swap], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
            m[i][k] = 0
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def invert_unimodular(a: IntMatrix) -> IntMatrix:
    """Inverse of a unimodular integer matrix (exact Gauss-Jordan)."""
    if a.rows != a.cols:
        raise ValueError("inverse of a non-square matrix")
    n = a.rows
    work = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
            for i, row in enumerate(a.data)]
    for col in range(n):
        piv = next((i for i in range(col, n) if work[i][col] != 0), None)
        if piv is None:
            raise ValueError("matrix is singular")
        work[col], work[piv] = work[piv], work[col]
        inv = 1 / work[col][col]
        work[col] = [x * inv for x in work[col]]
        for i in range(n):
            if i != col and work[i][col] != 0:
                f = work[i][col]
                work[i] = [x - f * y for x, y in zip(work[i], work[col])]
    out = []
    for row in work:
        tail = row[n:]
        if any(x.denominator != 1 for x in tail):
            raise ValueError("matrix is not unimodular")
        out.append([int(x) for x in tail])
    return IntMatrix(out, rows=n, cols=n)
