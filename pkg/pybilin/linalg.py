"""
Exact sparse linear algebra over the rationals.

Matrices are stored as row dictionaries of `Fraction` entries and handed to
sympy's `DomainMatrix` over `QQ` (sparse SDM format) for elimination.
"""
from fractions import Fraction
import logging

from sympy.polys.domains import QQ
from sympy.polys.matrices import DomainMatrix

logger = logging.getLogger(__name__)


def _to_qq(value):
    value = Fraction(value)
    return QQ(value.numerator, value.denominator)


def _from_qq(value):
    return Fraction(int(value.numerator), int(value.denominator))


class SparseMatrix:
    """
    Immutable sparse rational matrix.

    :param rows: mapping row index -> {column index -> value}; zero
    entries are dropped.
    :param shape: (number of rows, number of columns).
    """
    def __init__(self, rows, shape):
        nrows, ncols = shape
        cleaned = {}
        for i, row in rows.items():
            if not 0 <= i < nrows:
                raise IndexError('row {} outside shape {}.'.format(i, shape))
            kept = {}
            for j, value in row.items():
                if not 0 <= j < ncols:
                    raise IndexError(
                        'column {} outside shape {}.'.format(j, shape)
                    )
                value = Fraction(value)
                if value:
                    kept[j] = value
            if kept:
                cleaned[i] = kept
        self.rows = cleaned
        self.shape = (nrows, ncols)

    @classmethod
    def from_columns(cls, columns, nrows):
        """
        Build a matrix from a list of sparse column vectors.
        """
        rows = {}
        for j, column in enumerate(columns):
            for i, value in column.items():
                rows.setdefault(i, {})[j] = value
        return cls(rows, (nrows, len(columns)))

    @classmethod
    def identity(cls, n):
        return cls({i: {i: 1} for i in range(n)}, (n, n))

    def __eq__(self, other):
        if not isinstance(other, SparseMatrix):
            return NotImplemented
        return self.shape == other.shape and self.rows == other.rows

    def __repr__(self):
        return 'SparseMatrix({!r}, {!r})'.format(self.rows, self.shape)

    def __getitem__(self, index):
        i, j = index
        return self.rows.get(i, {}).get(j, Fraction(0))

    def is_zero(self):
        return not self.rows

    def column(self, j):
        return {i: row[j] for i, row in self.rows.items() if j in row}

    def transpose(self):
        rows = {}
        for i, row in self.rows.items():
            for j, value in row.items():
                rows.setdefault(j, {})[i] = value
        return SparseMatrix(rows, (self.shape[1], self.shape[0]))

    def __matmul__(self, other):
        if self.shape[1] != other.shape[0]:
            raise ValueError(
                'cannot multiply {} by {}.'.format(self.shape, other.shape)
            )
        rows = {}
        for i, row in self.rows.items():
            out = {}
            for k, value in row.items():
                for j, other_value in other.rows.get(k, {}).items():
                    out[j] = out.get(j, Fraction(0)) + value * other_value
            rows[i] = out
        return SparseMatrix(rows, (self.shape[0], other.shape[1]))

    def __add__(self, other):
        if self.shape != other.shape:
            raise ValueError('shape mismatch.')
        rows = {i: dict(row) for i, row in self.rows.items()}
        for i, row in other.rows.items():
            target = rows.setdefault(i, {})
            for j, value in row.items():
                target[j] = target.get(j, Fraction(0)) + value
        return SparseMatrix(rows, self.shape)

    def __neg__(self):
        return SparseMatrix(
            {i: {j: -v for j, v in row.items()} for i, row in self.rows.items()},
            self.shape,
        )

    def __sub__(self, other):
        return self + (-other)

    def apply(self, vector):
        """
        Multiply by a sparse column vector {column -> value}.
        """
        out = {}
        for i, row in self.rows.items():
            total = sum(
                (value * vector[j] for j, value in row.items() if j in vector),
                Fraction(0),
            )
            if total:
                out[i] = total
        return out

    def to_domain_matrix(self):
        return DomainMatrix(
            {
                i: {j: _to_qq(v) for j, v in row.items()}
                for i, row in self.rows.items()
            },
            self.shape,
            QQ,
        )

    def rank(self):
        if not self.rows:
            return 0
        return self.to_domain_matrix().rank()

    def rref(self):
        """
        Reduced row echelon form.
        :return: (SparseMatrix in rref, tuple of pivot columns).
        """
        if not self.rows:
            return self, ()
        reduced, pivots = self.to_domain_matrix().rref()
        rep = reduced.to_sparse().rep
        rows = {
            i: {j: _from_qq(v) for j, v in row.items()}
            for i, row in dict(rep).items()
        }
        return SparseMatrix(rows, self.shape), tuple(pivots)

    def nullspace(self):
        """
        Basis of the kernel, one sparse column vector per free column, in
        column order.
        """
        reduced, pivots = self.rref()
        pivot_rows = {}
        for r, col in enumerate(pivots):
            pivot_rows[col] = reduced.rows.get(r, {})
        basis = []
        for free in range(self.shape[1]):
            if free in pivot_rows:
                continue
            vector = {free: Fraction(1)}
            for col, row in pivot_rows.items():
                if free in row:
                    vector[col] = -row[free]
            basis.append(vector)
        return basis

    def solve(self, rhs):
        """
        Particular solution of self * x = rhs with free variables set to
        zero, or None when the system is inconsistent.

        :param rhs: sparse vector {row -> value}.
        :return: sparse vector {column -> value} or None.
        """
        nrows, ncols = self.shape
        augmented = {i: dict(row) for i, row in self.rows.items()}
        for i, value in rhs.items():
            if value:
                augmented.setdefault(i, {})[ncols] = Fraction(value)
        reduced, pivots = SparseMatrix(augmented, (nrows, ncols + 1)).rref()
        if ncols in pivots:
            return None
        solution = {}
        for r, col in enumerate(pivots):
            value = reduced.rows.get(r, {}).get(ncols, Fraction(0))
            if value:
                solution[col] = value
        return solution

    def det(self):
        nrows, ncols = self.shape
        if nrows != ncols:
            raise ValueError('determinant of a non-square matrix.')
        if nrows == 0:
            return Fraction(1)
        if not self.rows:
            return Fraction(0)
        return _from_qq(self.to_domain_matrix().det())

