"""Exact dense linear algebra over prime fields GF(p) and over the integers.

All field matrices are dense, row-major numpy int64 arrays with entries kept
in canonical range [0, p).  Elimination is plain Gaussian elimination with
first-nonzero pivoting, so identical inputs always produce identical echelon
forms, kernels and solutions.  Integer ranks use fraction-free (Bareiss)
elimination on arbitrary-precision Python ints; no floating point anywhere.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

# (p-1)^2 * cols must stay below 2^63 for int64 accumulation in matmul.
# 2^26 leaves room for matrices with tens of thousands of columns, far
# beyond desk scale.
MAX_MODULUS = 1 << 26

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, valid for every n < 3.3e24."""
    if n < 2:
        return False
    for q in _MR_BASES:
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


class DenseMatrix:
    """Immutable dense matrix; entries are int64 values already reduced mod p."""

    __slots__ = ("a",)

    def __init__(self, array: np.ndarray):
        a = np.ascontiguousarray(array, dtype=np.int64)
        if a.ndim != 2:
            raise ValueError(f"expected a 2-D array, got ndim={a.ndim}")
        a.setflags(write=False)
        object.__setattr__(self, "a", a)

    @property
    def rows(self) -> int:
        return self.a.shape[0]

    @property
    def cols(self) -> int:
        return self.a.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.a.shape

    @property
    def is_empty(self) -> bool:
        return self.a.size == 0

    def transpose(self) -> "DenseMatrix":
        return DenseMatrix(self.a.T)

    def tolist(self) -> list[list[int]]:
        return [[int(x) for x in row] for row in self.a]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DenseMatrix):
            return NotImplemented
        return self.shape == other.shape and bool(np.array_equal(self.a, other.a))

    def __hash__(self) -> int:
        return hash((self.shape, self.a.tobytes()))

    def __setattr__(self, name, value):
        raise AttributeError("DenseMatrix is immutable")

    def __repr__(self) -> str:
        return f"DenseMatrix({self.tolist()!r})"


@dataclass(frozen=True)
class FieldContext:
    """The prime field GF(p) together with its dense linear-algebra toolkit.

    p must be prime and below MAX_MODULUS so that int64 matrix products
    cannot overflow.
    """

    p: int

    def __post_init__(self):
        if not isinstance(self.p, int) or not is_prime(self.p):
            raise ValueError(f"modulus must be prime, got {self.p}")
        if self.p >= MAX_MODULUS:
            raise ValueError(f"modulus {self.p} exceeds the supported bound {MAX_MODULUS}")

    # -- construction -----------------------------------------------------

    def matrix(self, rows: Sequence[Sequence[int]] | np.ndarray, shape: tuple[int, int] | None = None) -> DenseMatrix:
        """Build a matrix from nested sequences, reducing entries mod p.

        shape is required for empty data (0 rows or 0 cols).
        """
        a = np.array(rows, dtype=np.int64)
        if a.size == 0 and a.ndim != 2:
            if shape is None:
                shape = (len(rows), 0) if hasattr(rows, "__len__") else (0, 0)
            a = a.reshape(shape)
        if a.ndim != 2:
            raise ValueError("matrix data must be two-dimensional")
        return DenseMatrix(np.mod(a, self.p))

    def zeros(self, rows: int, cols: int) -> DenseMatrix:
        return DenseMatrix(np.zeros((rows, cols), dtype=np.int64))

    def identity(self, n: int) -> DenseMatrix:
        return DenseMatrix(np.eye(n, dtype=np.int64))

    # -- arithmetic -------------------------------------------------------

    def add(self, m: DenseMatrix, n: DenseMatrix) -> DenseMatrix:
        return DenseMatrix((m.a + n.a) % self.p)

    def sub(self, m: DenseMatrix, n: DenseMatrix) -> DenseMatrix:
        return DenseMatrix((m.a - n.a) % self.p)

    def neg(self, m: DenseMatrix) -> DenseMatrix:
        return DenseMatrix((-m.a) % self.p)

    def scalar_mul(self, c: int, m: DenseMatrix) -> DenseMatrix:
        return DenseMatrix((c % self.p) * m.a % self.p)

    def matmul(self, m: DenseMatrix, n: DenseMatrix) -> DenseMatrix:
        if m.cols != n.rows:
            raise ValueError(f"shape mismatch: {m.shape} @ {n.shape}")
        if m.rows == 0 or n.cols == 0 or m.cols == 0:
            return self.zeros(m.rows, n.cols)
        return DenseMatrix((m.a @ n.a) % self.p)

    def mat_pow(self, m: DenseMatrix, k: int) -> DenseMatrix:
        if m.rows != m.cols:
            raise ValueError("matrix power needs a square matrix")
        if k < 0:
            raise ValueError("negative powers unsupported")
        result = self.identity(m.rows)
        base = m
        while k:
            if k & 1:
                result = self.matmul(result, base)
            base = self.matmul(base, base)
            k >>= 1
        return result

    @staticmethod
    def hstack(blocks: Sequence[DenseMatrix]) -> DenseMatrix:
        return DenseMatrix(np.hstack([b.a for b in blocks]))

    @staticmethod
    def vstack(blocks: Sequence[DenseMatrix]) -> DenseMatrix:
        return DenseMatrix(np.vstack([b.a for b in blocks]))

    @staticmethod
    def block_diag(blocks: Sequence[DenseMatrix]) -> DenseMatrix:
        rows = sum(b.rows for b in blocks)
        cols = sum(b.cols for b in blocks)
        out = np.zeros((rows, cols), dtype=np.int64)
        r = c = 0
        for b in blocks:
            out[r : r + b.rows, c : c + b.cols] = b.a
            r += b.rows
            c += b.cols
        return DenseMatrix(out)

    # -- elimination ------------------------------------------------------

    def rref(self, m: DenseMatrix) -> tuple[DenseMatrix, list[int]]:
        """Reduced row echelon form with unit pivots and the pivot columns.

        First-nonzero pivot selection in row order; fully deterministic.
        """
        a = m.a.copy()
        p = self.p
        rows, cols = a.shape
        pivots: list[int] = []
        r = 0
        for c in range(cols):
            if r == rows:
                break
            nz = np.nonzero(a[r:, c])[0]
            if nz.size == 0:
                continue
            i = r + int(nz[0])
            if i != r:
                a[[r, i]] = a[[i, r]]
            inv = pow(int(a[r, c]), p - 2, p)
            a[r] = a[r] * inv % p
            hits = np.nonzero(a[:, c])[0]
            for j in hits:
                if j != r:
                    a[j] = (a[j] - a[j, c] * a[r]) % p
            pivots.append(c)
            r += 1
        return DenseMatrix(a), pivots

    def rank(self, m: DenseMatrix) -> int:
        if m.is_empty:
            return 0
        return len(self.rref(m)[1])

    def kernel(self, m: DenseMatrix) -> DenseMatrix:
        """Basis of the right null space {v : m v = 0}, as matrix columns.

        Column count equals cols(m) - rank(m); the empty matrix has full
        kernel.
        """
        rows, cols = m.shape
        if cols == 0:
            return self.zeros(0, 0)
        if rows == 0:
            return self.identity(cols)
        red, pivots = self.rref(m)
        free = [c for c in range(cols) if c not in pivots]
        out = np.zeros((cols, len(free)), dtype=np.int64)
        for k, c in enumerate(free):
            out[c, k] = 1
            for i, pc in enumerate(pivots):
                out[pc, k] = (-red.a[i, c]) % self.p
        return DenseMatrix(out)

    def column_space(self, m: DenseMatrix) -> DenseMatrix:
        """Basis of the column space: the pivot columns of m, in order."""
        if m.is_empty:
            return self.zeros(m.rows, 0)
        _, pivots = self.rref(m)
        return DenseMatrix(m.a[:, pivots])

    def solve(self, a: DenseMatrix, b: DenseMatrix) -> DenseMatrix | None:
        """First solution X of a @ X = b in elimination order, or None.

        Free variables are set to zero, so the result is deterministic.
        """
        if a.rows != b.rows:
            raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
        if a.cols == 0:
            return self.zeros(0, b.cols) if not b.a.any() else None
        aug = self.hstack([a, b])
        red, pivots = self.rref(aug)
        if any(c >= a.cols for c in pivots):
            return None
        x = np.zeros((a.cols, b.cols), dtype=np.int64)
        for i, pc in enumerate(pivots):
            x[pc] = red.a[i, a.cols :]
        return DenseMatrix(x)

    def coordinates(self, basis: DenseMatrix, vectors: DenseMatrix) -> DenseMatrix | None:
        """Express vectors (columns) in a column basis: solve basis @ X = vectors."""
        return self.solve(basis, vectors)

    def inverse(self, m: DenseMatrix) -> DenseMatrix | None:
        if m.rows != m.cols:
            return None
        if m.rows == 0:
            return m
        return self.solve(m, self.identity(m.rows))

    def is_invertible(self, m: DenseMatrix) -> bool:
        return m.rows == m.cols and self.rank(m) == m.rows


@dataclass(frozen=True)
class IntegerMatrix:
    """Dense arbitrary-precision integer matrix, row-major."""

    rows: int
    cols: int
    entries: tuple[int, ...]

    def __post_init__(self):
        if len(self.entries) != self.rows * self.cols:
            raise ValueError("entries length must equal rows * cols")

    @classmethod
    def from_rows(cls, rows: Iterable[Sequence[int]], cols: int | None = None) -> "IntegerMatrix":
        data = [list(r) for r in rows]
        if cols is None:
            cols = len(data[0]) if data else 0
        for r in data:
            if len(r) != cols:
                raise ValueError("ragged rows")
        return cls(len(data), cols, tuple(int(x) for row in data for x in row))

    def row(self, i: int) -> list[int]:
        return list(self.entries[i * self.cols : (i + 1) * self.cols])


def rank_ff(m: DenseMatrix, ctx: FieldContext) -> int:
    """Rank of m over GF(p) by exact Gaussian elimination."""
    return ctx.rank(m)


def kernel_basis(m: DenseMatrix, ctx: FieldContext) -> DenseMatrix:
    """Column basis of {v : m v = 0} over GF(p)."""
    return ctx.kernel(m)


def rank_int(m: IntegerMatrix) -> int:
    """Rank of an integer matrix over the rationals, fraction-free.

    Bareiss elimination: every intermediate quantity is an exact minor, so
    divisions are exact and no overflow or rounding can occur.
    """
    a = [m.row(i) for i in range(m.rows)]
    rows, cols = m.rows, m.cols
    rank = 0
    prev = 1
    for c in range(cols):
        piv = None
        for i in range(rank, rows):
            if a[i][c] != 0:
                piv = i
                break
        if piv is None:
            continue
        if piv != rank:
            a[rank], a[piv] = a[piv], a[rank]
        pv = a[rank][c]
        for i in range(rank + 1, rows):
            ric = a[i][c]
            row_i, row_r = a[i], a[rank]
            for j in range(c, cols):
                row_i[j] = (row_i[j] * pv - ric * row_r[j]) // prev
        prev = pv
        rank += 1
    return rank
