"""
Unit tests for Presentations Module

Tests presentation validation, nilpotent quotients, the finite generation
report and the relation-module growth profile.
"""

import pytest
from pathlib import Path
import sys

# Add parent directory to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from modules.free_lie import Bracket, Combination, Gen, expression_text
from modules.presentations import (
    Presentation,
    PresentationError,
    expression_degree,
    fp1_check,
    fp2_evidence,
    gamma_relators,
    lift_to_field,
    nilpotent_quotient,
    relator_homogeneity,
)

x, y = Gen("x"), Gen("y")
XY = Bracket(x, y)


@pytest.fixture
def heisenberg_presentation():
    """<x, y | [x,[x,y]], [y,[x,y]]>."""
    return Presentation("H", ["x", "y"], [Bracket(x, XY), Bracket(y, XY)])


class TestPresentation:
    """Tests for presentation construction."""

    def test_text(self, heisenberg_presentation):
        """Presentations render as <gens | relators>."""
        assert heisenberg_presentation.text() == "<x, y | [x,[x,y]], [y,[x,y]]>"
        assert heisenberg_presentation.rank == 2

    def test_unknown_generator(self):
        """Relators may only use declared generators."""
        with pytest.raises(PresentationError):
            Presentation("P", ["x"], [Bracket(x, Gen("w"))])

    def test_zero_relator_dropped(self):
        """[x, x] evaluates to zero and is dropped."""
        pres = Presentation("P", ["x", "y"], [Bracket(x, x), XY])
        assert len(pres.relators) == 1

    def test_expression_degree(self):
        """Degree is the leaf count of the largest term."""
        assert expression_degree(Bracket(x, XY)) == 3
        assert expression_degree(Combination(())) == 0

    def test_gamma_relators(self):
        """Degree-3 relators are the standard bracketings of xxy and xyy."""
        texts = [expression_text(r) for r in gamma_relators(["x", "y"], 3)]
        assert texts == ["[x,[x,y]]", "[[x,y],y]"]

    def test_homogeneity(self):
        """x + [x, y] is not homogeneous."""
        from fractions import Fraction
        mixed = Combination(((Fraction(1), x), (Fraction(1), XY)))
        assert relator_homogeneity(Presentation("P", ["x", "y"], [XY]))
        assert not relator_homogeneity(Presentation("P", ["x", "y"], [mixed]))


class TestNilpotentQuotient:
    """Tests for class-c quotients."""

    def test_heisenberg_at_class_three(self, heisenberg_presentation):
        """The Heisenberg presentation stabilizes at dimension 3."""
        result = nilpotent_quotient(heisenberg_presentation, 3)
        assert result.quotient.dim == 3
        assert result.graded_dims() == {1: 2, 2: 1, 3: 0}
        assert result.quotient.name == "H/c3"

    def test_free_presentation(self):
        """Without relators the quotient is free nilpotent."""
        result = nilpotent_quotient(Presentation("F", ["x", "y"]), 4)
        assert result.quotient.dim == 8

    def test_generator_images(self, heisenberg_presentation):
        """Generators map to the basis vectors they represent."""
        result = nilpotent_quotient(heisenberg_presentation, 2)
        assert set(result.generator_images) == {"x", "y"}
        assert all(result.generator_images.values())

    def test_report(self, heisenberg_presentation):
        """nq reports carry per-degree dimensions."""
        report = nilpotent_quotient(heisenberg_presentation, 2).to_report()
        assert report["dim"] == 3
        assert report["per_degree"] == [{"degree": 1, "dim": 2}, {"degree": 2, "dim": 1}]

    def test_invalid_class(self, heisenberg_presentation):
        """Class 0 is rejected."""
        with pytest.raises(PresentationError):
            nilpotent_quotient(heisenberg_presentation, 0)

    def test_over_prime_field(self, heisenberg_presentation, gf7):
        """Quotients can be computed over F_7."""
        result = nilpotent_quotient(heisenberg_presentation, 3, gf7)
        assert result.quotient.field == gf7
        assert result.quotient.dim == 3
        assert lift_to_field(heisenberg_presentation, gf7).field == gf7


class TestFiniteness:
    """Tests for the finite generation report and the relation module profile."""

    def test_fp1(self, heisenberg_presentation):
        """Two generators are needed at every class."""
        report = fp1_check(heisenberg_presentation, 3)
        assert report["passed"]
        assert report["minimal_generators"] == 2
        assert report["minimal_generators_at_class"] == 2

    def test_fp1_redundant_generator(self):
        """A generator equal to a bracket is not minimal."""
        pres = Presentation("P", ["x", "y", "z"], [Combination(((1, Gen("z")), (-1, XY)))])
        report = fp1_check(pres)
        assert report["generators"] == 3
        assert report["minimal_generators"] == 2

    def test_fp2_heisenberg(self, heisenberg_presentation):
        """Relations of degree 3 generate the relation module through degree 4."""
        report = fp2_evidence(heisenberg_presentation, 4)
        assert report["passed"]
        assert report["generation_degree"] == 3
        rows = {row["degree"]: row for row in report["per_degree"]}
        assert rows[3]["new_generators"] == 2
        assert rows[4]["new_generators"] == 0

    @pytest.mark.parametrize("D", [3, 5])
    def test_fp2_matches_abelianized_gamma(self, D):
        """Relation module of the abelianization presentation is N/[N, N] with N = gamma_2(F)."""
        from modules.homology import abelianized_gamma_dims
        report = fp2_evidence(Presentation("Ab", ["x", "y"], [XY]), D)
        dims = [row["dim"] for row in report["per_degree"]]
        assert dims == abelianized_gamma_dims(2, 1, D)[1:]

    def test_fp2_needs_nilpotency(self):
        """The free presentation fails the nilpotency certificate."""
        from modules.homology import NilpotencyCertificateError
        with pytest.raises(NilpotencyCertificateError):
            fp2_evidence(Presentation("F", ["x", "y"]), 3)

    def test_fp2_rejects_inhomogeneous(self):
        """Inhomogeneous relators have no degrees."""
        from fractions import Fraction
        mixed = Combination(((Fraction(1), x), (Fraction(1), XY)))
        with pytest.raises(PresentationError):
            fp2_evidence(Presentation("P", ["x", "y"], [mixed]), 3)
