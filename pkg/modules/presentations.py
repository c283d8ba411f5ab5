"""
Presentations Module

Finitely presented Lie algebras F/R on named generators. Realized through
their class-c nilpotent quotients free_nilpotent(rank, c) / (ideal of the
relators), with truncation-based semi-decisions for finite generation and for
finite generation of the relation module R/[R,R] under the adjoint action.

No emojis or unicode characters in this file.
"""

import logging
from dataclasses import dataclass, field as dataclass_field
from typing import Any, Dict, List, Optional, Sequence

from sympy.polys.domains import QQ

from modules.error_handler import LiefError
from modules.exact_linalg import EchelonSpace, SparseMatrix, Vector, field_label, rank
from modules.findim_lie import (
    FinDimLie,
    QuotientMap,
    Subspace,
    bracket_subspaces,
    derived_subalgebra,
    free_nilpotent,
    ideal_closure,
    quotient_algebra,
)
from modules.free_lie import (
    Alphabet,
    Bracket,
    Expr,
    FreeLieAlgebra,
    Gen,
    expression_names,
    expression_text,
    lyndon_words,
    standard_bracketing,
)
from modules.homology import NilpotencyCertificateError, nilpotency_certificate

# Set up logging
logger = logging.getLogger(__name__)


class PresentationError(LiefError):
    """Custom exception for presentation errors."""
    pass


def expression_degree(expr: Expr) -> int:
    """Upper bound for the degree of an expression (leaves in its largest term)."""
    if isinstance(expr, Gen):
        return 1
    if isinstance(expr, Bracket):
        return expression_degree(expr.left) + expression_degree(expr.right)
    return max((expression_degree(sub) for _, sub in expr.terms), default=0)


def tree_to_expression(tree) -> Expr:
    """Bracket tree of generator names to an expression."""
    if isinstance(tree, tuple):
        return Bracket(tree_to_expression(tree[0]), tree_to_expression(tree[1]))
    return Gen(tree)


def gamma_relators(generators: Sequence[str], degree: int) -> List[Expr]:
    """Standard bracketings of all Lyndon words of one degree (a basis of gamma_n mod gamma_{n+1})."""
    alphabet = Alphabet(generators)
    return [tree_to_expression(standard_bracketing(w, alphabet)) for w in lyndon_words(alphabet, degree)]


class Presentation:
    """
    Generators plus relators, representing F/R.

    Relators that evaluate to zero in the free algebra are dropped with a
    warning.
    """

    def __init__(self, name: str, generators: Sequence[str], relators: Sequence[Expr] = (), field=QQ):
        self.name = name
        self.generators = Alphabet(generators)
        self.field = field
        kept: List[Expr] = []
        for rel in relators:
            unknown = [n for n in expression_names(rel) if n not in self.generators]
            if unknown:
                raise PresentationError(f"Relator {expression_text(rel)} of {name} uses unknown names {unknown}")
            bound = expression_degree(rel)
            if bound == 0:
                logger.warning(f"Dropping zero relator {expression_text(rel)} of {name}")
                continue
            free = FreeLieAlgebra(self.generators, bound, field)
            if free.evaluate(rel).is_zero():
                logger.warning(f"Dropping zero relator {expression_text(rel)} of {name}")
                continue
            kept.append(rel)
        self.relators = kept

    @property
    def rank(self) -> int:
        return len(self.generators)

    def text(self) -> str:
        gens = ", ".join(self.generators.names)
        rels = ", ".join(expression_text(r) for r in self.relators)
        return f"<{gens} | {rels}>"

    def __repr__(self) -> str:
        return f"Presentation({self.name} = {self.text()})"

    def free_cover(self, c: int) -> FinDimLie:
        """free_nilpotent on the generators of this presentation."""
        return free_nilpotent(self.rank, c, self.field, list(self.generators.names))

    def relator_vectors(self, F: FinDimLie) -> List[Vector]:
        """Images of the relators in a free nilpotent algebra on the same generators."""
        vectors = []
        for rel in self.relators:
            vec = F.evaluate(rel)
            if not vec:
                logger.debug(f"Relator {expression_text(rel)} vanishes in {F.name}")
                continue
            vectors.append(vec)
        return vectors


def relator_homogeneity(pres: Presentation) -> bool:
    """True when every relator is homogeneous in the free algebra."""
    for rel in pres.relators:
        free = FreeLieAlgebra(pres.generators, max(expression_degree(rel), 1), pres.field)
        if not free.evaluate(rel).is_homogeneous():
            return False
    return True


@dataclass
class NilpotentQuotientResult:
    """Class-c quotient of a presentation with its projection data."""
    presentation: Presentation
    cls: int
    free: FinDimLie
    relator_ideal: Subspace
    quotient: FinDimLie
    projection: QuotientMap
    generator_images: Dict[str, Vector] = dataclass_field(default_factory=dict)

    def graded_dims(self) -> Dict[int, int]:
        dims = self.quotient.graded_dims()
        for d in range(1, self.cls + 1):
            dims.setdefault(d, 0)
        return dict(sorted(dims.items()))

    def to_report(self) -> Dict[str, Any]:
        return {
            "check": "nq",
            "presentation": self.presentation.name,
            "class": self.cls,
            "dim": self.quotient.dim,
            "per_degree": [{"degree": d, "dim": n} for d, n in self.graded_dims().items()],
            "graded": self.quotient.graded,
        }


def nilpotent_quotient(pres: Presentation, c: int, field=None) -> NilpotentQuotientResult:
    """
    Quotient free_nilpotent(rank, c) / ideal(relators).

    Raises:
        PresentationError: If c < 1
    """
    if c < 1:
        raise PresentationError(f"Nilpotency class must be >= 1, got {c}")
    if field is not None:
        pres = lift_to_field(pres, field)
    F = pres.free_cover(c)
    R = ideal_closure(F, pres.relator_vectors(F))
    Q, proj = quotient_algebra(F, R, name=f"{pres.name}/c{c}")
    images = {g: proj.apply(F.basis_vector(F.index(g))) for g in pres.generators.names}
    logger.info(f"Nilpotent quotient {pres.name} at class {c}: dim {Q.dim}")
    return NilpotentQuotientResult(pres, c, F, R, Q, proj, images)


def fp1_check(pres: Presentation, c: Optional[int] = None) -> Dict[str, Any]:
    """
    Finite generation report.

    A finitely presented algebra is always finitely generated; the report
    adds the minimal number of generators (dimension of the abelianization),
    computed at class 1 and, when c is given, confirmed at class c.
    """
    minimal = nilpotent_quotient(pres, 1).quotient.dim
    report: Dict[str, Any] = {
        "check": "fp1",
        "presentation": pres.name,
        "generators": pres.rank,
        "finitely_generated": True,
        "minimal_generators": minimal,
        "semi_decision": True,
    }
    passed = True
    if c is not None and c > 1:
        Q = nilpotent_quotient(pres, c).quotient
        at_class = Q.dim - derived_subalgebra(Q).dim
        report["class"] = c
        report["minimal_generators_at_class"] = at_class
        passed = at_class == minimal
    report["passed"] = passed
    report["verdict"] = (f"finitely generated, minimal generators {minimal}" if passed
                         else "abelianization not stable in the class")
    return report


class RelationModule:
    """
    R/[R,R] inside free_nilpotent(rank, D) for homogeneous relators.

    Each degree n <= D is exact. Quotient bases are RREF rows reduced
    modulo [R,R]; coordinates are read at their pivots.
    """

    def __init__(self, pres: Presentation, D: int):
        if not relator_homogeneity(pres):
            raise PresentationError(f"{pres.name} has inhomogeneous relators; degrees are undefined")
        if D < 2:
            raise PresentationError(f"Degree bound must be >= 2, got {D}")
        self.pres = pres
        self.D = D
        self.F = pres.free_cover(D)
        self.R = ideal_closure(self.F, pres.relator_vectors(self.F))
        if not nilpotency_certificate(self.F, self.R, D):
            raise NilpotencyCertificateError(
                f"{pres.name} is not nilpotent of class <= {D - 1}: relators miss degree {D}"
            )
        self.RR = bracket_subspaces(self.F, self.R, self.R)
        self._commutators: Dict[int, EchelonSpace] = {}
        self._quotients: Dict[int, EchelonSpace] = {}
        for n in range(1, D + 1):
            rr = EchelonSpace(self.F.dim, self.F.field, self._rows_of_degree(self.RR, n))
            quotient = EchelonSpace(self.F.dim, self.F.field,
                                    (rr.reduce(v) for v in self._rows_of_degree(self.R, n)))
            self._commutators[n] = rr
            self._quotients[n] = quotient

    def _rows_of_degree(self, S: Subspace, n: int) -> List[Vector]:
        degrees = self.F.degrees
        return [row for row in S.basis if degrees[min(row)] == n]

    def dimension(self, n: int) -> int:
        return len(self._quotients[n]) if 1 <= n <= self.D else 0

    def basis(self, n: int) -> List[Vector]:
        return self._quotients[n].basis() if 1 <= n <= self.D else []

    def coordinates(self, v: Vector, n: int) -> Dict[int, Any]:
        """Coordinates of an element of R_n in the basis of (R/[R,R])_n."""
        reduced = self._commutators[n].reduce(v)
        pivots = self._quotients[n].pivots
        return {k: reduced[p] for k, p in enumerate(pivots) if p in reduced}

    def generator_vectors(self) -> List[Vector]:
        return [self.F.basis_vector(self.F.index(g)) for g in self.pres.generators.names]


def adjoint_module_matrix(module: RelationModule, n: int) -> SparseMatrix:
    """
    Matrix of (R/[R,R])_{n-1} x generators -> (R/[R,R])_n, r o x = [r, x].

    Row (k, g) holds the coordinates of [t_k, x_g] where t_k runs over the
    basis of degree n-1.
    """
    gens = module.generator_vectors()
    source = module.basis(n - 1) if n >= 2 else []
    cols = module.dimension(n)
    entries: Dict[int, Vector] = {}
    row = 0
    for t in source:
        for g in gens:
            image = module.F.bracket(t, g)
            coords = module.coordinates(image, n) if image else {}
            if coords:
                entries[row] = coords
            row += 1
    return SparseMatrix(len(source) * len(gens), cols, module.F.field, entries)


def fp2_evidence(pres: Presentation, D: int) -> Dict[str, Any]:
    """
    Generation profile of R/[R,R] under the adjoint action, through degree D.

    A semi-decision: reports the smallest d0 such that degrees <= d0 generate
    the module through degree D, or that new generators still appear at D.
    """
    module = RelationModule(pres, D)
    rows = []
    last_new = 0
    for n in range(1, D + 1):
        dim_n = module.dimension(n)
        reached = rank(adjoint_module_matrix(module, n)) if n >= 2 else 0
        new = dim_n - reached
        if new > 0:
            last_new = n
        rows.append({"degree": n, "dim": dim_n, "from_below": reached, "new_generators": new})
    if last_new == D:
        verdict = f"growth persists at {D}"
    elif last_new == 0:
        verdict = f"relation module is zero through degree {D}"
    else:
        verdict = f"generated by degree <= {last_new} through degree {D}"
    logger.info(f"FP2 evidence for {pres.name}: {verdict}")
    return {
        "check": "fp2",
        "presentation": pres.name,
        "class": D,
        "per_degree": rows,
        "generation_degree": last_new if last_new < D else None,
        "verdict": verdict,
        "semi_decision": True,
        "passed": last_new < D,
    }


def lift_to_field(pres: Presentation, field) -> Presentation:
    """Same presentation over another scalar field."""
    if field == pres.field:
        return pres
    logger.debug(f"Re-reading {pres.name} over {field_label(field)}")
    return Presentation(pres.name, pres.generators.names, pres.relators, field)


# Command-line testing interface
if __name__ == "__main__":
    import sys

    if "--test" in sys.argv:
        print("Testing Presentations Module...")
        print("-" * 50)

        x, y = Gen("x"), Gen("y")
        pres = Presentation("H", ["x", "y"], [Bracket(x, Bracket(x, y)), Bracket(y, Bracket(x, y))])
        result = nilpotent_quotient(pres, 3)
        print(f"  {pres.text()} at class 3: dim {result.quotient.dim}")
        assert result.quotient.dim == 3

        ab = Presentation("A", ["x", "y"], [Bracket(x, y)])
        print(f"  FP2 evidence: {fp2_evidence(ab, 6)['verdict']}")

        print("-" * 50)
        print("[SUCCESS] All tests passed!")
    else:
        print("Usage: python3 -m modules.presentations --test")
