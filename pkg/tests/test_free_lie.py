"""
Unit tests for Free Lie Algebra Module

Tests Lyndon words, the Witt formula, standard bracketing, the associative
embedding and the truncated bracket.
"""

import pytest
from fractions import Fraction
from pathlib import Path
import sys
import warnings

import numpy as np

# Add parent directory to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from modules.free_lie import (
    Alphabet,
    Bracket,
    Combination,
    FreeLieAlgebra,
    FreeLieError,
    Gen,
    NotLyndonError,
    UnboundNameError,
    default_names,
    expression_names,
    expression_text,
    from_associative_lie,
    is_lyndon,
    lie_bracket,
    lyndon_words,
    standard_bracketing,
    standard_factorization,
    to_associative,
    tree_text,
    witt_dimension,
)


class TestLyndonWords:
    """Tests for Lyndon word enumeration and the Witt formula."""

    @pytest.mark.parametrize("rank,degree,expected", [
        (2, 1, 2), (2, 2, 1), (2, 3, 2), (2, 4, 3), (2, 5, 6), (2, 6, 9), (2, 7, 18), (2, 8, 30),
        (3, 2, 3), (3, 3, 8), (3, 8, 810),
    ])
    def test_witt_values(self, rank, degree, expected):
        """Known dimensions of free Lie algebra pieces."""
        assert witt_dimension(rank, degree) == expected

    def test_witt_without_deprecation_warnings(self):
        """The Moebius function comes from its current sympy home."""
        with warnings.catch_warnings():
            warnings.simplefilter("error", DeprecationWarning)
            assert witt_dimension(2, 12) == 335

    @pytest.mark.parametrize("rank", [1, 2, 3])
    def test_count_matches_witt(self, rank):
        """Enumeration agrees with the formula."""
        for degree in range(1, 9):
            assert len(lyndon_words(rank, degree)) == witt_dimension(rank, degree)

    def test_degree_two_rank_two(self):
        """The only Lyndon word of length 2 over {x, y} is xy."""
        assert lyndon_words(2, 2) == [(0, 1)]

    def test_lexicographic_order(self):
        """Words come out sorted."""
        words = lyndon_words(3, 4)
        assert words == sorted(words)

    def test_invalid_degree(self):
        """Degree 0 is rejected."""
        with pytest.raises(FreeLieError):
            lyndon_words(2, 0)

    def test_is_lyndon(self):
        """Lyndon words are strictly smaller than their rotations."""
        assert is_lyndon((0, 0, 1))
        assert not is_lyndon((0, 1, 0))
        assert not is_lyndon((0, 0))


class TestStandardBracketing:
    """Tests for standard factorization and bracketing."""

    def test_factorization_takes_longest_suffix(self):
        """xxy splits as x.xy, xyy as xy.y."""
        assert standard_factorization((0, 0, 1)) == ((0,), (0, 1))
        assert standard_factorization((0, 1, 1)) == ((0, 1), (1,))

    def test_bracketing_text(self):
        """Trees render with generator names."""
        alphabet = Alphabet(["x", "y"])
        assert tree_text(standard_bracketing((0, 0, 1), alphabet)) == "[x,[x,y]]"
        assert tree_text(standard_bracketing((0, 1, 1), alphabet)) == "[[x,y],y]"

    def test_non_lyndon_rejected(self):
        """Bracketing needs a Lyndon word."""
        with pytest.raises(NotLyndonError):
            standard_bracketing((1, 0))


class TestAlphabet:
    """Tests for generator alphabets."""

    def test_default_names(self):
        """x, y, z up to rank 3, indexed names beyond."""
        assert default_names(2) == ["x", "y"]
        assert default_names(4) == ["x1", "x2", "x3", "x4"]

    def test_duplicates_rejected(self):
        """Names must be distinct."""
        with pytest.raises(FreeLieError):
            Alphabet(["x", "x"])

    def test_unknown_name(self):
        """Lookup of a missing name raises."""
        with pytest.raises(UnboundNameError):
            Alphabet(["x"]).index("y")


class TestFreeLieAlgebra:
    """Tests for arithmetic in the truncated free Lie algebra."""

    def setup_method(self):
        self.L = FreeLieAlgebra(["x", "y"], 4)
        self.x = self.L.generator("x")
        self.y = self.L.generator("y")

    def test_antisymmetry(self):
        """[a, b] = -[b, a] and [a, a] = 0."""
        xy = self.L.bracket(self.x, self.y)
        assert self.L.bracket(self.y, self.x) == -xy
        assert self.L.bracket(xy, xy).is_zero()

    def test_jacobi_on_generators(self):
        """Jacobi identity for x, y and [x, y]."""
        a, b = self.x, self.y
        c = self.L.bracket(a, b)
        total = (self.L.bracket(a, self.L.bracket(b, c))
                 + self.L.bracket(b, self.L.bracket(c, a))
                 + self.L.bracket(c, self.L.bracket(a, b)))
        assert total.is_zero()

    def test_truncation(self):
        """Brackets past degree D vanish."""
        L = FreeLieAlgebra(["x", "y"], 2)
        xy = L.bracket(L.generator("x"), L.generator("y"))
        assert L.bracket(L.generator("x"), xy).is_zero()

    def test_associative_embedding(self):
        """[x, y] expands to xy - yx and comes back."""
        xy = lie_bracket(self.x, self.y)
        poly = to_associative(xy)
        assert poly == {(0, 1): self.L.field.one, (1, 0): -self.L.field.one}
        assert from_associative_lie(self.L, poly) == xy

    def test_non_lie_polynomial(self):
        """xy alone is not a Lie element."""
        assert from_associative_lie(self.L, {(1, 0): 1}) is None

    def test_left_normed_matches_bracketing(self):
        """[[x, y], y] is the basis element of xyy."""
        assert self.L.left_normed([self.x, self.y, self.y]) == self.L.basis_element((0, 1, 1))

    def test_adjoint_action(self):
        """x o (y) = [x, y]; the empty word acts as the identity."""
        assert self.L.adjoint_apply(self.x, {(1,): 1}) == self.L.bracket(self.x, self.y)
        assert self.L.adjoint_apply(self.x, {(): 1}) == self.x

    def test_evaluate_expression(self):
        """Expressions evaluate against same-named generators."""
        expr = Combination(((Fraction(2), Bracket(Gen("x"), Gen("y"))), (Fraction(-1), Gen("x"))))
        value = self.L.evaluate(expr)
        assert value == self.L.bracket(self.x, self.y).scale(2) - self.x
        assert value.degrees() == [1, 2]
        assert not value.is_homogeneous()

    def test_mixed_algebras_rejected(self):
        """Elements of different algebras do not bracket."""
        other = FreeLieAlgebra(["x", "y"], 3)
        with pytest.raises(FreeLieError):
            lie_bracket(self.x, other.generator("y"))

    def test_random_element_is_homogeneous(self):
        """Random elements are nonzero and homogeneous."""
        e = self.L.random_element(3, np.random.default_rng(1))
        assert not e.is_zero()
        assert e.degrees() == [3]


class TestExpressions:
    """Tests for the shared expression tree."""

    def test_names_in_order(self):
        """Names are listed once, by first appearance."""
        expr = Bracket(Gen("b"), Bracket(Gen("a"), Gen("b")))
        assert expression_names(expr) == ["b", "a"]

    def test_text(self):
        """Combinations render with signs and coefficients."""
        expr = Combination(((Fraction(1), Gen("x")), (Fraction(-1, 2), Bracket(Gen("x"), Gen("y")))))
        assert expression_text(expr) == "x - 1/2*[x,y]"
        assert expression_text(Combination(())) == "0"
