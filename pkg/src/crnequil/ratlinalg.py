"""Exact dense linear algebra over the rationals.

Everything downstream (deficiency, kernels, translation systems, the
equilibrium parametrization) relies on exact ranks and null spaces, so all
entries are ``fractions.Fraction`` and no floating point is used anywhere.
Rank uses fraction-free (Bareiss) elimination on an integer-scaled copy to
bound intermediate growth; bases follow a fixed reduced-row-echelon
convention so outputs are reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd


class RationalMatrix:
    """Dense row-major matrix of ``Fraction`` entries."""

    __slots__ = ("rows", "cols", "data")

    def __init__(self, data: list[list]):
        self.data: list[list[Fraction]] = [[Fraction(x) for x in row] for row in data]
        self.rows = len(self.data)
        self.cols = len(self.data[0]) if self.data else 0
        for row in self.data:
            if len(row) != self.cols:
                raise ValueError("ragged rows")

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "RationalMatrix":
        return cls([[0] * cols for _ in range(rows)])

    @classmethod
    def identity(cls, n: int) -> "RationalMatrix":
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def from_columns(cls, columns: list[list]) -> "RationalMatrix":
        if not columns:
            return cls.zeros(0, 0)
        rows = len(columns[0])
        return cls([[columns[j][i] for j in range(len(columns))] for i in range(rows)])

    def __getitem__(self, idx: tuple[int, int]) -> Fraction:
        i, j = idx
        return self.data[i][j]

    def __eq__(self, other) -> bool:
        if not isinstance(other, RationalMatrix):
            return NotImplemented
        return self.data == other.data

    def __repr__(self) -> str:
        body = "; ".join(" ".join(str(x) for x in row) for row in self.data)
        return f"RationalMatrix({self.rows}x{self.cols}: {body})"

    def copy_data(self) -> list[list[Fraction]]:
        return [row[:] for row in self.data]

    def column(self, j: int) -> list[Fraction]:
        return [row[j] for row in self.data]

    def columns(self) -> list[list[Fraction]]:
        return [self.column(j) for j in range(self.cols)]

    def transpose(self) -> "RationalMatrix":
        return RationalMatrix([[self.data[i][j] for i in range(self.rows)] for j in range(self.cols)])

    def __matmul__(self, other: "RationalMatrix") -> "RationalMatrix":
        if self.cols != other.rows:
            raise ValueError("shape mismatch")
        out = [[Fraction(0)] * other.cols for _ in range(self.rows)]
        for i in range(self.rows):
            row = self.data[i]
            for k in range(self.cols):
                a = row[k]
                if a == 0:
                    continue
                other_row = other.data[k]
                for j in range(other.cols):
                    if other_row[j] != 0:
                        out[i][j] += a * other_row[j]
        return RationalMatrix(out)

    def mul_vector(self, v: list) -> list[Fraction]:
        if len(v) != self.cols:
            raise ValueError("shape mismatch")
        vf = [Fraction(x) for x in v]
        return [sum((row[j] * vf[j] for j in range(self.cols)), Fraction(0)) for row in self.data]

    def is_zero(self) -> bool:
        return all(x == 0 for row in self.data for x in row)

    # -- elimination ----------------------------------------------------

    def rank(self) -> int:
        """Exact rank via Bareiss fraction-free elimination.

        Rows are first scaled to integers (scaling does not change rank).
        """
        m = []
        for row in self.data:
            scale = 1
            for x in row:
                scale = scale * x.denominator // gcd(scale, x.denominator)
            m.append([int(x * scale) for x in row])
        rows, cols = self.rows, self.cols
        rank = 0
        prev = 1
        row_idx = 0
        for col in range(cols):
            if row_idx >= rows:
                break
            piv = None
            for i in range(row_idx, rows):
                if m[i][col] != 0:
                    piv = i
                    break
            if piv is None:
                continue
            m[row_idx], m[piv] = m[piv], m[row_idx]
            p = m[row_idx][col]
            for i in range(row_idx + 1, rows):
                for j in range(col + 1, cols):
                    m[i][j] = (p * m[i][j] - m[i][col] * m[row_idx][j]) // prev
                m[i][col] = 0
            prev = p
            rank += 1
            row_idx += 1
        return rank

    def rref(self) -> tuple["RationalMatrix", tuple[int, ...]]:
        """Reduced row echelon form and its pivot columns.

        Pivot choice is the first nonzero entry scanning down, so the result
        is deterministic for a given matrix.
        """
        m = self.copy_data()
        pivots: list[int] = []
        r = 0
        for c in range(self.cols):
            if r >= self.rows:
                break
            piv = None
            for i in range(r, self.rows):
                if m[i][c] != 0:
                    piv = i
                    break
            if piv is None:
                continue
            m[r], m[piv] = m[piv], m[r]
            inv = m[r][c]
            m[r] = [x / inv for x in m[r]]
            for i in range(self.rows):
                if i != r and m[i][c] != 0:
                    f = m[i][c]
                    m[i] = [a - f * b for a, b in zip(m[i], m[r])]
            pivots.append(c)
            r += 1
        return RationalMatrix(m), tuple(pivots)

    def kernel_basis(self) -> "RationalMatrix":
        """Basis of the right null space as matrix columns.

        Uses the RREF free-column convention: one basis vector per free
        column in increasing index order, with a 1 in the free coordinate.
        Returns a cols x 0 matrix for a trivial kernel.
        """
        rref, pivots = self.rref()
        free = [c for c in range(self.cols) if c not in pivots]
        columns = []
        for f in free:
            v = [Fraction(0)] * self.cols
            v[f] = Fraction(1)
            for r, c in enumerate(pivots):
                v[c] = -rref.data[r][f]
            columns.append(v)
        if not columns:
            return RationalMatrix([[] for _ in range(self.cols)])
        return RationalMatrix.from_columns(columns)

    def cokernel_basis(self) -> "RationalMatrix":
        """Basis of ker(transpose) as matrix columns (conservation-law style)."""
        return self.transpose().kernel_basis()

    def inverse(self) -> "RationalMatrix":
        if self.rows != self.cols:
            raise ValueError("inverse of non-square matrix")
        n = self.rows
        aug = [self.data[i][:] + [Fraction(1) if j == i else Fraction(0) for j in range(n)] for i in range(n)]
        m = RationalMatrix(aug)
        red, pivots = m.rref()
        if len(pivots) != n or any(p >= n for p in pivots):
            raise ValueError("matrix is singular")
        return RationalMatrix([row[n:] for row in red.data])

    def generalized_inverse(self) -> "RationalMatrix":
        """H with self @ H @ self == self, via exact rank factorization.

        Factor M = F G with F the pivot columns and G the nonzero RREF rows,
        then H = G^T (G G^T)^-1 (F^T F)^-1 F^T. The zero matrix maps to the
        zero matrix of transposed shape.
        """
        rref, pivots = self.rref()
        k = len(pivots)
        if k == 0:
            return RationalMatrix.zeros(self.cols, self.rows)
        F = RationalMatrix.from_columns([self.column(c) for c in pivots])
        G = RationalMatrix(rref.data[:k])
        Gt = G.transpose()
        Ft = F.transpose()
        left = Gt @ (G @ Gt).inverse()
        right = (Ft @ F).inverse() @ Ft
        return left @ right


@dataclass(frozen=True)
class Inconsistency:
    """Report that a linear system A x = b has no solution."""

    rank_a: int
    rank_augmented: int

    def __str__(self) -> str:
        return f"inconsistent system: rank(A)={self.rank_a}, rank([A|b])={self.rank_augmented}"


def solve_consistent(a: RationalMatrix, b: list) -> list[Fraction] | Inconsistency:
    """One exact solution of a x = b, or an :class:`Inconsistency` report.

    The returned solution is the deterministic RREF choice with all free
    variables set to zero.
    """
    bf = [Fraction(x) for x in b]
    if len(bf) != a.rows:
        raise ValueError("right-hand side length mismatch")
    aug = RationalMatrix([a.data[i][:] + [bf[i]] for i in range(a.rows)])
    red, pivots = aug.rref()
    if pivots and pivots[-1] == a.cols:
        return Inconsistency(rank_a=len(pivots) - 1, rank_augmented=len(pivots))
    x = [Fraction(0)] * a.cols
    for r, c in enumerate(pivots):
        x[c] = red.data[r][a.cols]
    return x
