"""
Unit tests for Exact Linear Algebra Module

Tests field construction, sparse rref, kernels, membership, intersections
and reduction modulo a prime.
"""

import pytest
from fractions import Fraction
from pathlib import Path
import sys

# Add parent directory to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from sympy.polys.domains import GF, QQ

from modules.exact_linalg import (
    DimensionMismatchError,
    EchelonSpace,
    FieldMismatchError,
    LinearAlgebraError,
    SparseMatrix,
    clean_vector,
    coerce,
    echelonize,
    echelon_reduce,
    field_label,
    intersect,
    kernel_basis,
    make_field,
    membership,
    quotient_basis,
    rank,
    reduce_mod_p,
    rref,
    scalar_to_json,
)


class TestFields:
    """Tests for field labels and scalar coercion."""

    def test_rationals(self):
        """Q and QQ both name the rationals."""
        assert make_field("Q") == QQ
        assert make_field("QQ") == QQ
        assert field_label(QQ) == "Q"

    def test_prime_field_labels(self):
        """Fp:<p> and Fp with an explicit prime agree."""
        assert make_field("Fp:7") == GF(7, symmetric=False)
        assert make_field("Fp", 7) == make_field("Fp:7")
        assert field_label(make_field("Fp:7")) == "Fp:7"

    def test_composite_characteristic_rejected(self):
        """A composite characteristic is an error."""
        with pytest.raises(LinearAlgebraError):
            make_field("Fp:9")

    def test_unknown_label_rejected(self):
        """Labels other than Q and Fp are rejected."""
        with pytest.raises(LinearAlgebraError):
            make_field("R")

    def test_fraction_coercion(self):
        """Fractions map to the field; 1/7 has no image in F_7."""
        assert coerce(QQ, Fraction(1, 2)) * 2 == QQ.one
        assert coerce(GF(5, symmetric=False), Fraction(1, 2)) * 2 == GF(5, symmetric=False).one
        with pytest.raises(FieldMismatchError):
            coerce(GF(7, symmetric=False), Fraction(1, 7))

    def test_bool_rejected(self):
        """Booleans are not scalars."""
        with pytest.raises(FieldMismatchError):
            coerce(QQ, True)

    def test_scalar_to_json(self):
        """Integral values become ints, the rest p/q strings."""
        assert scalar_to_json(QQ, coerce(QQ, 3)) == 3
        assert scalar_to_json(QQ, coerce(QQ, Fraction(2, 3))) == "2/3"


class TestSparseMatrix:
    """Tests for the sparse matrix type."""

    def test_zeros_are_dropped(self):
        """Zero entries are not stored."""
        m = SparseMatrix.from_dense([[0, 1], [0, 0]], QQ)
        assert m.nnz() == 1
        assert m.row(1) == {}

    def test_index_out_of_range(self):
        """Entries outside the shape are rejected."""
        with pytest.raises(DimensionMismatchError):
            SparseMatrix(2, 2, QQ, {0: {5: 1}})

    def test_transpose_and_matmul(self):
        """(A B)^T equals B^T A^T."""
        a = SparseMatrix.from_dense([[1, 2], [0, 1]], QQ)
        b = SparseMatrix.from_dense([[3, 0], [1, 1]], QQ)
        assert a.matmul(b).transpose() == b.transpose().matmul(a.transpose())

    def test_matmul_shape_mismatch(self):
        """Incompatible shapes raise."""
        a = SparseMatrix.from_dense([[1, 2, 3]], QQ)
        with pytest.raises(DimensionMismatchError):
            a.matmul(a)

    def test_field_mismatch(self):
        """Multiplying across fields raises."""
        a = SparseMatrix.identity(2, QQ)
        b = SparseMatrix.identity(2, GF(7, symmetric=False))
        with pytest.raises(FieldMismatchError):
            a.matmul(b)

    def test_apply(self):
        """Matrix-vector product on sparse vectors."""
        m = SparseMatrix.from_dense([[1, 1], [0, 2]], QQ)
        assert m.apply(clean_vector(QQ, {1: 1})) == clean_vector(QQ, {0: 1, 1: 2})


class TestRowReduction:
    """Tests for rref and its derived primitives."""

    def test_rank_and_pivots(self):
        """A rank-2 matrix with pivots in columns 0 and 2."""
        m = SparseMatrix.from_dense([[1, 2, 0], [2, 4, 1], [3, 6, 1]], QQ)
        r, pivots, reduced = rref(m)
        assert r == 2
        assert pivots == [0, 2]
        assert reduced.row(0) == clean_vector(QQ, {0: 1, 1: 2})

    def test_zero_matrix(self):
        """The zero matrix has rank 0."""
        assert rank(SparseMatrix.zero(3, 4, QQ)) == 0

    def test_rank_depends_on_characteristic(self):
        """det = 7 is invertible over Q but not over F_7."""
        rows = [[1, 2], [-2, 3]]
        assert rank(SparseMatrix.from_dense(rows, QQ)) == 2
        assert rank(SparseMatrix.from_dense(rows, GF(7, symmetric=False))) == 1

    def test_kernel_dimension(self):
        """Kernel has cols - rank vectors, each killed by the matrix."""
        m = SparseMatrix.from_dense([[1, 1, 1], [1, -1, 0]], QQ)
        kernel = kernel_basis(m)
        assert len(kernel) == 1
        assert m.apply(kernel[0]) == {}

    def test_echelonize_is_canonical(self):
        """Two spanning sets of one subspace give the same echelon basis."""
        first = [clean_vector(QQ, {0: 1, 1: 1}), clean_vector(QQ, {1: 1, 2: 1})]
        second = [clean_vector(QQ, {0: 1, 2: -1}), clean_vector(QQ, {0: 2, 1: 1, 2: -1})]
        assert echelonize(first, 3, QQ) == echelonize(second, 3, QQ)

    def test_membership(self):
        """Coordinates reproduce the target; non-members give None."""
        span = [clean_vector(QQ, {0: 1}), clean_vector(QQ, {1: 1})]
        coords = membership(span, clean_vector(QQ, {0: 2, 1: 3}), 3, QQ)
        assert coords == [QQ.convert(2), QQ.convert(3)]
        assert membership(span, clean_vector(QQ, {2: 1}), 3, QQ) is None

    def test_echelon_reduce(self):
        """Members reduce to zero; others keep a remainder off the pivots."""
        rows, _ = echelonize([clean_vector(QQ, {0: 1, 1: 1})], 3, QQ)
        assert echelon_reduce(rows, clean_vector(QQ, {0: 2, 1: 2}), QQ) == {}
        assert echelon_reduce(rows, clean_vector(QQ, {0: 1}), QQ) == clean_vector(QQ, {1: -1})

    def test_quotient_basis(self):
        """Representatives are the non-pivot columns."""
        assert quotient_basis([clean_vector(QQ, {0: 1, 1: 1})], 3, QQ) == [1, 2]

    def test_intersect(self):
        """Two planes in 3-space meet in a line."""
        u = [clean_vector(QQ, {0: 1}), clean_vector(QQ, {1: 1})]
        w = [clean_vector(QQ, {1: 1}), clean_vector(QQ, {2: 1})]
        assert intersect(u, w, 3, QQ) == [clean_vector(QQ, {1: 1})]

    def test_reduce_mod_p(self):
        """Integral rational matrices reduce; fractions do not."""
        m = SparseMatrix.from_dense([[7, 1], [14, 2]], QQ)
        reduced = reduce_mod_p(m, 7)
        assert reduced.field == GF(7, symmetric=False)
        assert reduced.nnz() == 2
        with pytest.raises(LinearAlgebraError):
            reduce_mod_p(SparseMatrix.from_dense([[Fraction(1, 2)]], QQ), 7)


class TestEchelonSpace:
    """Tests for the incremental echelon basis."""

    def test_add_reports_growth(self):
        """add returns False for dependent vectors."""
        space = EchelonSpace(3, QQ)
        assert space.add(clean_vector(QQ, {0: 1, 1: 1}))
        assert space.add(clean_vector(QQ, {1: 1}))
        assert not space.add(clean_vector(QQ, {0: 2}))
        assert len(space) == 2
        assert space.pivots == [0, 1]

    def test_matches_batch_echelon(self):
        """Incremental and batch bases agree."""
        vectors = [clean_vector(QQ, {0: 1, 2: 1}), clean_vector(QQ, {0: 1, 1: 1})]
        rows, _ = echelonize(vectors, 3, QQ)
        assert EchelonSpace(3, QQ, vectors).basis() == rows
