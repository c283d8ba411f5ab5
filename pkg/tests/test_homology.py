"""
Unit tests for Homology Module

Tests the Chevalley-Eilenberg complex, Betti numbers, the Kunneth
comparison, H_2 by the Hopf formula and the relation-module sequence.
"""

import pytest
from math import comb
from pathlib import Path
import sys

# Add parent directory to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from modules.findim_lie import abelian, free_nilpotent, from_structure_constants, heisenberg
from modules.free_lie import Bracket, Gen, witt_dimension
from modules.homology import (
    BettiTable,
    ChainComplex,
    HomologyError,
    NilpotencyCertificateError,
    abelianized_gamma_dims,
    betti_numbers,
    euler_characteristic,
    hopf_h2,
    kunneth_check,
    pbw_dimensions,
    relation_sequence_check,
)
from modules.presentations import Presentation, gamma_relators


class TestBettiNumbers:
    """Tests for Betti numbers of small algebras."""

    def test_heisenberg(self, heis):
        """H has Betti numbers 1, 2, 2, 1."""
        table = betti_numbers(heis)
        assert table.betti == [1, 2, 2, 1]
        assert table.field == "Q"

    def test_heisenberg_mod_p(self, gf7):
        """The same numbers over F_7."""
        assert betti_numbers(heisenberg(gf7)).betti == [1, 2, 2, 1]
        assert betti_numbers(heisenberg(gf7)).field == "Fp:7"

    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_abelian_is_binomial(self, n):
        """Every boundary of an abelian algebra vanishes."""
        assert betti_numbers(abelian(n)).betti == [comb(n, k) for k in range(n + 1)]

    def test_free_nilpotent_h1_h2(self):
        """b_1 = rank and b_2 = witt(rank, c + 1) for N(rank, c)."""
        for rank, c in [(2, 2), (2, 3), (3, 2)]:
            table = betti_numbers(free_nilpotent(rank, c), 2)
            assert table[1] == rank
            assert table[2] == witt_dimension(rank, c + 1)

    def test_euler_characteristic_vanishes(self, zoo):
        """Nonzero nilpotent algebras have Euler characteristic 0."""
        for L in zoo:
            if L.dim <= 8:
                assert euler_characteristic(betti_numbers(L)) == 0

    def test_degrees_beyond_dimension(self, heis):
        """Degrees above dim L report 0."""
        table = betti_numbers(heis, 5)
        assert table.betti == [1, 2, 2, 1, 0, 0]
        assert table[9] == 0

    def test_negative_degree(self, heis):
        """A negative bound is rejected."""
        with pytest.raises(HomologyError):
            betti_numbers(heis, -1)

    def test_to_json(self, heis):
        """Tables serialize with algebra, field and numbers."""
        assert betti_numbers(heis).to_json() == {"algebra": "H", "field": "Q", "betti": [1, 2, 2, 1]}

    def test_table_equality(self):
        """Tables compare by numbers and field."""
        assert BettiTable("A", "Q", [1, 1]) == BettiTable("B", "Q", [1, 1])
        assert BettiTable("A", "Q", [1, 1]) != BettiTable("A", "Fp:7", [1, 1])


class TestChainComplex:
    """Tests for the boundary maps."""

    def test_square_zero(self, zoo):
        """d o d = 0 on every bundled algebra of modest size."""
        for L in zoo:
            if L.dim <= 6:
                assert ChainComplex(L).square_zero_failures() == []

    def test_heisenberg_ranks(self, heis):
        """Only d_2 is nonzero on H."""
        cx = ChainComplex(heis)
        assert cx.dimension(2) == 3
        assert cx.boundary_rank(2) == 1
        assert cx.boundary_rank(3) == 0


class TestKunneth:
    """Tests for the Kunneth comparison."""

    def test_heisenberg_plus_abelian(self, heis):
        """b_n of H + ab1 matches the convolution."""
        for n in range(4):
            report = kunneth_check(heis, abelian(1), n)
            assert report["passed"], report

    def test_report_fields(self, heis):
        """Reports carry both tables and the verdict."""
        report = kunneth_check(heis, heis, 2)
        assert report["expected"] == 1 * 2 + 2 * 2 + 2 * 1
        assert report["computed"] == report["expected"]
        assert report["verdict"] == "pass"


class TestHopf:
    """Tests for H_2 by the Hopf formula."""

    @pytest.mark.parametrize("rank,c", [(2, 1), (2, 2), (2, 3), (3, 2)])
    def test_free_nilpotent(self, rank, c):
        """H_2 of N(rank, c) is the degree c + 1 piece of the free algebra."""
        names = ["x", "y", "z"][:rank]
        pres = Presentation(f"N{rank}{c}", names, gamma_relators(names, c + 1))
        result = hopf_h2(pres, c)
        assert result.dim_h2 == witt_dimension(rank, c + 1)
        assert len(result.basis) == result.dim_h2

    def test_agrees_with_betti(self):
        """H_2 of the Heisenberg presentation equals b_2(H)."""
        x, y = Gen("x"), Gen("y")
        pres = Presentation("H", ["x", "y"], [Bracket(x, Bracket(x, y)), Bracket(y, Bracket(x, y))])
        assert hopf_h2(pres, 2).dim_h2 == betti_numbers(heisenberg())[2]

    def test_not_nilpotent(self):
        """A free presentation has no nilpotency certificate."""
        with pytest.raises(NilpotencyCertificateError):
            hopf_h2(Presentation("F", ["x", "y"]), 2)

    def test_report(self):
        """Reports list coset representatives as text; H_2 of ab2 is spanned by xy."""
        pres = Presentation("A", ["x", "y"], [Bracket(Gen("x"), Gen("y"))])
        report = hopf_h2(pres, 1).to_report()
        assert report["dim_h2"] == 1
        assert report["dim_RF"] == 0
        assert report["basis"] == ["xy"]


class TestRelationSequence:
    """Tests for dim N^ab against enveloping algebra dimensions."""

    def test_pbw_polynomial_ring(self):
        """Two generators of degree 1 give dimensions n + 1."""
        assert pbw_dimensions({1: 2}, 4) == [1, 2, 3, 4, 5]

    def test_pbw_heisenberg(self):
        """Graded dims 2, 1 give 1, 2, 4, 6."""
        assert pbw_dimensions({1: 2, 2: 1}, 3) == [1, 2, 4, 6]

    def test_abelianized_commutator_ideal(self):
        """For c = 1 the low degrees of N^ab are Witt numbers."""
        assert abelianized_gamma_dims(2, 1, 4) == [0, 0, 1, 2, 3]

    @pytest.mark.parametrize("d,c", [(2, 1), (2, 2), (3, 1)])
    def test_sequence_holds(self, d, c):
        """The sequence check passes in every degree."""
        report = relation_sequence_check(d, c, 6)
        assert report["passed"], report["verdict"]
        assert len(report["per_degree"]) == 7


class TestModularPrecheck:
    """Tests for boundary ranks modulo a prime."""

    def test_no_drop_for_heisenberg(self, heis):
        """H has unit structure constants."""
        assert ChainComplex(heis).modular_rank_drops(7) == []

    def test_drop_at_dividing_prime(self):
        """[x, y] = 7z loses rank modulo 7 in d_2."""
        L = from_structure_constants(["x", "y", "z"], {("x", "y"): {"z": 7}}, name="H7")
        cx = ChainComplex(L)
        assert cx.modular_rank_drops(7) == [2]
        assert cx.modular_rank_drops(5) == []

    def test_needs_rationals(self, gf7):
        """Only algebras over Q can be reduced."""
        with pytest.raises(HomologyError):
            ChainComplex(heisenberg(gf7)).modular_rank_drops(5)
