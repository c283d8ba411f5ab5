"""
Homology Module

Lie algebra homology with trivial coefficients through the Chevalley-Eilenberg
complex, Kunneth checks on direct sums, the Hopf formula for H_2 of a
nilpotent presented algebra, and the degree-by-degree check of the exact
sequence 0 -> N^ab -> U(Q)^d -> U(Q) -> K -> 0 for N = gamma_{c+1}(F).

No emojis or unicode characters in this file.
"""

import logging
from dataclasses import dataclass
from itertools import combinations
from math import comb
from typing import Any, Dict, List, Optional, Tuple

from sympy.polys.domains import QQ

from modules.error_handler import LiefError
from modules.exact_linalg import LinearAlgebraError, SparseMatrix, Vector, field_label, rank, reduce_mod_p
from modules.findim_lie import (
    FinDimLie,
    Subspace,
    bracket_subspaces,
    direct_sum,
    free_nilpotent,
    ideal_closure,
    intersect_subspaces,
    vector_text,
)
from modules.free_lie import FreeLieAlgebra, witt_dimension

# Set up logging
logger = logging.getLogger(__name__)


class HomologyError(LiefError):
    """Custom exception for homology computation errors."""
    pass


class NilpotencyCertificateError(HomologyError):
    """Raised when a presented algebra is not nilpotent at the requested class."""
    pass


# =============================================================================
# Chevalley-Eilenberg complex
# =============================================================================

class BettiTable:
    """Betti numbers b_0..b_n of a Lie algebra over a stated field."""

    def __init__(self, algebra: str, field: str, betti: List[int]):
        self.algebra = algebra
        self.field = field
        self.betti = list(betti)

    def __getitem__(self, n: int) -> int:
        return self.betti[n] if 0 <= n < len(self.betti) else 0

    def __len__(self) -> int:
        return len(self.betti)

    def __eq__(self, other) -> bool:
        if not isinstance(other, BettiTable):
            return NotImplemented
        return self.betti == other.betti and self.field == other.field

    def __repr__(self) -> str:
        return f"BettiTable({self.algebra}, {self.field}, {self.betti})"

    def euler_characteristic(self) -> int:
        return sum((-1) ** n * b for n, b in enumerate(self.betti))

    def to_json(self) -> Dict[str, Any]:
        return {"algebra": self.algebra, "field": self.field, "betti": list(self.betti)}


class ChainComplex:
    """Chevalley-Eilenberg complex of L with trivial coefficients."""

    def __init__(self, L: FinDimLie):
        self.L = L
        self._boundaries: Dict[int, SparseMatrix] = {}
        self._ranks: Dict[int, int] = {}

    def dimension(self, n: int) -> int:
        """dim of Lambda^n L."""
        if n < 0 or n > self.L.dim:
            return 0
        return comb(self.L.dim, n)

    def boundary(self, n: int) -> SparseMatrix:
        if n not in self._boundaries:
            self._boundaries[n] = ce_boundary(self.L, n)
        return self._boundaries[n]

    def boundary_rank(self, n: int) -> int:
        """rank of d_n; zero outside 2..dim L."""
        if n < 2 or n > self.L.dim:
            return 0
        if n not in self._ranks:
            self._ranks[n] = rank(self.boundary(n))
            logger.debug(f"{self.L.name}: rank d_{n} = {self._ranks[n]}")
        return self._ranks[n]

    def square_zero_failures(self) -> List[int]:
        """Degrees n with d_{n-1} d_n != 0."""
        failures = []
        for n in range(2, self.L.dim + 1):
            if not self.boundary(n - 1).matmul(self.boundary(n)).is_zero():
                failures.append(n)
        return failures

    def modular_rank_drops(self, p: int, up_to: Optional[int] = None) -> List[int]:
        """
        Degrees n whose boundary d_n loses rank modulo p.

        Rank over F_p never exceeds rank over Q, so any drop means Betti
        numbers over F_p differ from those over Q. Boundaries with
        non-integral entries are skipped.
        """
        if not self.L.field.is_QQ:
            raise HomologyError("Modular rank comparison needs an algebra over Q")
        top = self.L.dim if up_to is None else min(up_to + 1, self.L.dim)
        drops = []
        for n in range(2, top + 1):
            try:
                reduced = reduce_mod_p(self.boundary(n), p)
            except LinearAlgebraError:
                logger.debug(f"{self.L.name}: d_{n} is not integral, skipped mod {p}")
                continue
            if rank(reduced) < self.boundary_rank(n):
                drops.append(n)
        return drops


def exterior_basis(dim: int, n: int) -> List[Tuple[int, ...]]:
    """Index tuples i_1 < ... < i_n in lexicographic order."""
    return list(combinations(range(dim), n))


def ce_boundary(L: FinDimLie, n: int) -> SparseMatrix:
    """
    Boundary d_n : Lambda^n L -> Lambda^{n-1} L.

    d(b_1 ^ ... ^ b_n) = sum_{s<t} (-1)^{s+t} [b_s, b_t] ^ b_1 ^ ... ^ b_n with
    b_s and b_t removed (1-based positions).

    Raises:
        HomologyError: If n is outside 1..dim L
    """
    if n < 1 or n > L.dim:
        raise HomologyError(f"Boundary degree {n} outside 1..{L.dim} for {L.name}")
    source = exterior_basis(L.dim, n)
    target = exterior_basis(L.dim, n - 1)
    target_index = {t: k for k, t in enumerate(target)}
    entries: Dict[int, Vector] = {}
    field = L.field
    for col, tup in enumerate(source):
        for s, t in combinations(range(n), 2):
            image = L.bracket_basis(tup[s], tup[t])
            if not image:
                continue
            rest = tup[:s] + tup[s + 1:t] + tup[t + 1:]
            sign = 1 if (s + t) % 2 == 0 else -1
            for k, val in image.items():
                if k in rest:
                    continue
                # Moving b_k into sorted position past the smaller indices.
                before = sum(1 for r in rest if r < k)
                wedge = tuple(sorted(rest + (k,)))
                coef = val if (sign * (-1) ** before) > 0 else -val
                row = target_index[wedge]
                row_entries = entries.setdefault(row, {})
                new = row_entries.get(col, field.zero) + coef
                if field.is_zero(new):
                    row_entries.pop(col, None)
                else:
                    row_entries[col] = new
    return SparseMatrix(len(target), len(source), field, entries)


def betti_numbers(L: FinDimLie, up_to: Optional[int] = None,
                  complex_: Optional[ChainComplex] = None) -> BettiTable:
    """
    Betti numbers b_n = dim Lambda^n - rank d_n - rank d_{n+1}.

    Degrees above dim L are reported as 0.
    """
    if up_to is None:
        up_to = L.dim
    if up_to < 0:
        raise HomologyError(f"Betti degree must be >= 0, got {up_to}")
    cx = complex_ or ChainComplex(L)
    betti = []
    for n in range(up_to + 1):
        if n > L.dim:
            betti.append(0)
            continue
        betti.append(cx.dimension(n) - cx.boundary_rank(n) - cx.boundary_rank(n + 1))
    return BettiTable(L.name, field_label(L.field), betti)


def euler_characteristic(table: BettiTable) -> int:
    """Alternating sum of a Betti table."""
    return table.euler_characteristic()


def kunneth_check(A: FinDimLie, B: FinDimLie, n: int) -> Dict[str, Any]:
    """
    Compare b_n(A + B) with sum_i b_i(A) b_{n-i}(B).

    Returns:
        Report dict with expected, computed and a verdict
    """
    betti_a = betti_numbers(A, n)
    betti_b = betti_numbers(B, n)
    expected = sum(betti_a[i] * betti_b[n - i] for i in range(n + 1))
    computed = betti_numbers(direct_sum(A, B), n)[n]
    passed = expected == computed
    if not passed:
        logger.warning(f"Kunneth mismatch for {A.name}+{B.name} at n={n}: {expected} vs {computed}")
    return {
        "check": "kunneth",
        "algebras": [A.name, B.name],
        "degree": n,
        "betti_a": betti_a.betti,
        "betti_b": betti_b.betti,
        "expected": expected,
        "computed": computed,
        "verdict": "pass" if passed else f"mismatch at degree {n}",
        "passed": passed,
    }


# =============================================================================
# Hopf formula
# =============================================================================

@dataclass
class HopfResult:
    """H_2 of a presented algebra with coset representatives in free_nilpotent(rank, c+1)."""
    presentation: str
    cls: int
    dim_h2: int
    basis: List[Vector]
    ambient: FinDimLie
    dim_intersection: int
    dim_commutator: int

    def to_report(self) -> Dict[str, Any]:
        return {
            "check": "hopf",
            "presentation": self.presentation,
            "class": self.cls,
            "dim_R_meet_derived": self.dim_intersection,
            "dim_RF": self.dim_commutator,
            "dim_h2": self.dim_h2,
            "basis": [vector_text(self.ambient, v) for v in self.basis],
        }


def nilpotency_certificate(F: FinDimLie, R: Subspace, degree: int) -> bool:
    """True when every basis element of the given degree lies in R."""
    return all(R.contains(F.basis_vector(i)) for i in F.indices_of_degree(degree))


def hopf_h2(pres, c: int, field=None) -> "HopfResult":
    """
    H_2 of F/R by the Hopf formula (R meet [F,F]) / [R,F].

    Computed inside free_nilpotent(rank, c+1): once R contains the degree c+1
    part, [R,F] contains everything of degree c+2, so the truncation is exact.

    Args:
        pres: Presentation (generators and relators)
        c: Nilpotency class of the presented algebra
        field: Scalar field (defaults to the presentation's field)

    Returns:
        HopfResult with the dimension and coset representatives

    Raises:
        NilpotencyCertificateError: If F/R is not nilpotent of class <= c
    """
    field = field or pres.field
    F = free_nilpotent(pres.rank, c + 1, field, list(pres.generators.names))
    R = ideal_closure(F, pres.relator_vectors(F))
    if not nilpotency_certificate(F, R, c + 1):
        raise NilpotencyCertificateError(
            f"{pres.name} is not nilpotent of class <= {c}: relators miss degree {c + 1}"
        )
    whole = Subspace.whole(F)
    derived = Subspace(F, [F.basis_vector(i) for i in range(F.dim) if F.degrees[i] >= 2])
    R_meet = intersect_subspaces(R, derived)
    RF = bracket_subspaces(F, R, whole)
    quotient_space = RF.copy()
    reps = []
    for v in R_meet.basis:
        if quotient_space.add(v):
            reps.append(v)
    dim_h2 = R_meet.dim - RF.dim
    logger.info(f"Hopf H_2({pres.name}) at class {c}: {dim_h2}")
    return HopfResult(pres.name, c, dim_h2, reps, F, R_meet.dim, RF.dim)


# =============================================================================
# Relation module sequence for N = gamma_{c+1}(F)
# =============================================================================

def pbw_dimensions(graded_dims: Dict[int, int], up_to: int) -> List[int]:
    """
    Coefficients of prod_k (1 - t^k)^(-dim_k) through t^up_to.

    These are the graded dimensions of the enveloping algebra of a
    positively graded Lie algebra with the given graded dimensions.
    """
    series = [0] * (up_to + 1)
    series[0] = 1
    for degree, count in sorted(graded_dims.items()):
        if degree < 1:
            continue
        for _ in range(count):
            for m in range(degree, up_to + 1):
                series[m] += series[m - degree]
    return series


def abelianized_gamma_dims(d: int, c: int, up_to: int, field=None) -> List[int]:
    """
    dim (N / [N, N])_n for N = gamma_{c+1}(F), F free of rank d, n = 0..up_to.

    [N, N]_n is spanned by brackets of Lyndon basis elements of degrees i, j
    >= c+1 with i + j = n; its rank is computed on associative expansions,
    which is faithful because the embedding into the free associative
    algebra is injective.
    """
    F = FreeLieAlgebra(d, max(up_to, 1), field or QQ)
    dims = [0] * (up_to + 1)
    for n in range(c + 1, up_to + 1):
        words_index: Dict[Tuple[int, ...], int] = {}
        rows: List[Vector] = []
        for i in range(c + 1, n // 2 + 1):
            j = n - i
            if j < c + 1:
                continue
            left = F.basis(i)
            right = F.basis(j)
            for a, u in enumerate(left):
                start = a + 1 if i == j else 0
                for w in right[start:]:
                    poly = F.commutator(F.expansion(u), F.expansion(w))
                    row: Vector = {}
                    for word, val in poly.items():
                        col = words_index.setdefault(word, len(words_index))
                        row[col] = val
                    if row:
                        rows.append(row)
        bracket_rank = rank(SparseMatrix.from_rows(rows, len(words_index), F.field)) if rows else 0
        dims[n] = F.dimension(n) - bracket_rank
        logger.debug(f"N^ab degree {n}: {len(rows)} brackets, rank {bracket_rank}")
    return dims


def relation_sequence_check(d: int, c: int, up_to: int, field=None) -> Dict[str, Any]:
    """
    Verify dim N^ab_n = d dim U(Q)_{n-1} - dim U(Q)_n + [n = 0] for n <= up_to.

    Q = F / gamma_{c+1}(F) is free nilpotent of rank d and class c.
    """
    graded = {k: witt_dimension(d, k) for k in range(1, c + 1)}
    U = pbw_dimensions(graded, up_to)
    nab = abelianized_gamma_dims(d, c, up_to, field)
    rows = []
    failures = []
    for n in range(up_to + 1):
        previous = U[n - 1] if n >= 1 else 0
        expected = d * previous - U[n] + (1 if n == 0 else 0)
        ok = nab[n] == expected
        rows.append({"degree": n, "dim_N_ab": nab[n], "dim_U": U[n], "expected": expected, "ok": ok})
        if not ok:
            failures.append(n)
    passed = not failures
    return {
        "check": "sequence",
        "rank": d,
        "class": c,
        "up_to": up_to,
        "per_degree": rows,
        "verdict": "pass" if passed else f"mismatch at degree {failures[0]}",
        "passed": passed,
    }


# Command-line testing interface
if __name__ == "__main__":
    import sys

    if "--test" in sys.argv:
        from modules.findim_lie import heisenberg

        print("Testing Homology Module...")
        print("-" * 50)

        table = betti_numbers(heisenberg())
        print(f"  Heisenberg Betti numbers: {table.betti}")
        assert table.betti == [1, 2, 2, 1]

        report = relation_sequence_check(2, 1, 4)
        print(f"  Sequence check (d=2, c=1, D=4): {report['verdict']}")

        print("-" * 50)
        print("[SUCCESS] All tests passed!")
    else:
        print("Usage: python3 -m modules.homology --test")
