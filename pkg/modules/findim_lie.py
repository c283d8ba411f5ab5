"""
Finite-Dimensional Lie Algebra Module

Lie algebras given by structure constants over Q or F_p, with optional
grading by positive degrees. Provides free nilpotent algebras, ideals and
subalgebras generated by vectors, lower central series, centers, quotients,
direct and semidirect sums, and homomorphisms defined on generators.

Vectors are sparse coordinate dicts over the named basis.

No emojis or unicode characters in this file.
"""

import logging
from itertools import combinations
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple, Union

from sympy.polys.domains import QQ

from modules.error_handler import LiefError
from modules.exact_linalg import (
    EchelonSpace,
    FieldMismatchError,
    SparseMatrix,
    Vector,
    add_scaled,
    clean_vector,
    coerce,
    field_label,
    intersect,
    kernel_basis,
    scalar_to_str,
)
from modules.free_lie import (
    Expr,
    ExpressionOps,
    FreeLieAlgebra,
    Word,
    default_names,
    evaluate_with,
    standard_factorization,
)

# Set up logging
logger = logging.getLogger(__name__)


class LieAlgebraError(LiefError):
    """Custom exception for finite-dimensional Lie algebra errors."""
    pass


class JacobiViolationError(LieAlgebraError):
    """Raised when a bracket table fails the Jacobi identity."""
    pass


class AntisymmetryViolationError(LieAlgebraError):
    """Raised when a bracket table is not alternating."""
    pass


class NotAnIdealError(LieAlgebraError):
    """Raised when a quotient is requested by a subspace that is not an ideal."""
    pass


class FinDimLie:
    """
    Finite-dimensional Lie algebra by structure constants.

    The bracket table stores [b_i, b_j] for every ordered pair with a nonzero
    bracket. When degrees are present they filter the algebra; `graded` is True
    when every bracket is homogeneous of the summed degree.
    """

    def __init__(self, names: Sequence[str], table: Mapping[Tuple[int, int], Vector],
                 field=QQ, degrees: Optional[Sequence[int]] = None, name: str = "L",
                 recipes: Optional[List[Any]] = None):
        self.names = list(names)
        if len(set(self.names)) != len(self.names):
            raise LieAlgebraError(f"Basis names must be distinct: {self.names}")
        self.dim = len(self.names)
        self.field = field
        self.name = name
        self._index = {n: i for i, n in enumerate(self.names)}
        self._table: Dict[Tuple[int, int], Vector] = {}
        for (i, j), vec in table.items():
            vec = clean_vector(field, vec)
            if vec:
                self._table[(i, j)] = vec
                self._table[(j, i)] = {k: -v for k, v in vec.items()}
        self.degrees = list(degrees) if degrees is not None else None
        if self.degrees is not None and len(self.degrees) != self.dim:
            raise LieAlgebraError("One degree per basis element is required")
        self.graded = self.degrees is not None and self._brackets_homogeneous()
        # Per basis element: ("gen", name) or (i, j) meaning [b_i, b_j].
        self.recipes = recipes
        # Set by free_nilpotent.
        self.lie_words: Optional[List[Word]] = None
        self.free_algebra: Optional[FreeLieAlgebra] = None
        self.generator_names: Optional[List[str]] = None

    def __repr__(self) -> str:
        return f"FinDimLie({self.name}, dim={self.dim}, {field_label(self.field)})"

    def _brackets_homogeneous(self) -> bool:
        for (i, j), vec in self._table.items():
            target = self.degrees[i] + self.degrees[j]
            if any(self.degrees[k] != target for k in vec):
                return False
        return True

    # ----- basis and vectors -----

    def index(self, name: str) -> int:
        if name not in self._index:
            raise LieAlgebraError(f"'{name}' is not a basis element of {self.name}")
        return self._index[name]

    def basis_vector(self, i: int) -> Vector:
        return {i: self.field.one}

    def basis_vectors(self) -> List[Vector]:
        return [self.basis_vector(i) for i in range(self.dim)]

    def bracket_basis(self, i: int, j: int) -> Vector:
        return self._table.get((i, j), {})

    def bracket(self, u: Vector, v: Vector) -> Vector:
        """Bilinear extension of the structure constants."""
        out: Vector = {}
        for i, a in u.items():
            for j, b in v.items():
                entry = self._table.get((i, j))
                if entry:
                    add_scaled(self.field, out, entry, a * b)
        return out

    def add(self, u: Vector, v: Vector) -> Vector:
        out = dict(u)
        add_scaled(self.field, out, v, self.field.one)
        return out

    def scale(self, c, u: Vector) -> Vector:
        c = coerce(self.field, c)
        if self.field.is_zero(c):
            return {}
        return {k: c * val for k, val in u.items()}

    def ops(self) -> ExpressionOps:
        return ExpressionOps(zero=dict, add=self.add, scale=self.scale, bracket=self.bracket)

    def evaluate(self, expr: Expr, binding: Optional[Mapping[str, Vector]] = None) -> Vector:
        """Evaluate an expression; by default names refer to basis elements."""
        values = {n: self.basis_vector(i) for i, n in enumerate(self.names)}
        if binding is not None:
            values.update(binding)
        return evaluate_with(expr, values, self.ops())

    def ad_matrix(self, i: int) -> SparseMatrix:
        """Matrix of ad(b_i): column j holds [b_i, b_j]."""
        entries: Dict[int, Vector] = {}
        for j in range(self.dim):
            for k, val in self.bracket_basis(i, j).items():
                entries.setdefault(k, {})[j] = val
        return SparseMatrix(self.dim, self.dim, self.field, entries)

    def is_abelian(self) -> bool:
        return not self._table

    def find_jacobi_violation(self) -> Optional[Tuple[int, int, int]]:
        """First basis triple i < j < k violating the Jacobi identity, if any."""
        for i, j, k in combinations(range(self.dim), 3):
            total = self.bracket(self.bracket_basis(i, j), self.basis_vector(k))
            add_scaled(self.field, total, self.bracket(self.bracket_basis(j, k), self.basis_vector(i)),
                       self.field.one)
            add_scaled(self.field, total, self.bracket(self.bracket_basis(k, i), self.basis_vector(j)),
                       self.field.one)
            if total:
                return (i, j, k)
        return None

    def validate(self) -> None:
        """Raise JacobiViolationError naming the offending triple."""
        bad = self.find_jacobi_violation()
        if bad is not None:
            i, j, k = bad
            raise JacobiViolationError(
                f"Jacobi identity fails in {self.name} for ({self.names[i]}, {self.names[j]}, {self.names[k]})"
            )

    # ----- grading -----

    def degree(self, i: int) -> int:
        if self.degrees is None:
            raise LieAlgebraError(f"{self.name} carries no grading")
        return self.degrees[i]

    def max_degree(self) -> int:
        return max(self.degrees) if self.degrees else 0

    def graded_dims(self) -> Dict[int, int]:
        """Number of basis elements per degree, degrees 1..max."""
        if self.degrees is None:
            raise LieAlgebraError(f"{self.name} carries no grading")
        dims = {d: 0 for d in range(1, self.max_degree() + 1)}
        for d in self.degrees:
            dims[d] = dims.get(d, 0) + 1
        return dims

    def indices_of_degree(self, degree: int) -> List[int]:
        return [i for i in range(self.dim) if self.degree(i) == degree]


class Subspace:
    """Subspace of a Lie algebra, kept as an RREF basis."""

    def __init__(self, ambient: FinDimLie, vectors: Sequence[Vector] = ()):
        self.ambient = ambient
        self._space = EchelonSpace(ambient.dim, ambient.field, vectors)

    @classmethod
    def from_space(cls, ambient: FinDimLie, space: EchelonSpace) -> "Subspace":
        sub = cls(ambient)
        sub._space = space
        return sub

    @classmethod
    def whole(cls, ambient: FinDimLie) -> "Subspace":
        return cls(ambient, ambient.basis_vectors())

    @property
    def dim(self) -> int:
        return len(self._space)

    @property
    def basis(self) -> List[Vector]:
        return self._space.basis()

    @property
    def pivots(self) -> List[int]:
        return self._space.pivots

    def contains(self, v: Vector) -> bool:
        return self._space.contains(v)

    def reduce(self, v: Vector) -> Vector:
        return self._space.reduce(v)

    def add(self, v: Vector) -> bool:
        return self._space.add(v)

    def is_subspace_of(self, other: "Subspace") -> bool:
        return all(other.contains(v) for v in self.basis)

    def is_zero(self) -> bool:
        return self.dim == 0

    def is_homogeneous(self) -> bool:
        """True when every RREF row lives in a single degree."""
        degrees = self.ambient.degrees
        if degrees is None:
            return False
        return all(len({degrees[k] for k in row}) == 1 for row in self.basis)

    def copy(self) -> "Subspace":
        return Subspace(self.ambient, self.basis)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Subspace):
            return NotImplemented
        return self.ambient.dim == other.ambient.dim and self.basis == other.basis

    def __repr__(self) -> str:
        return f"Subspace(dim={self.dim} in {self.ambient.name})"


# =============================================================================
# Constructors
# =============================================================================

def _as_index(L_names: Dict[str, int], key: Union[int, str]) -> int:
    if isinstance(key, int):
        return key
    if key not in L_names:
        raise LieAlgebraError(f"Unknown basis name '{key}'")
    return L_names[key]


def from_structure_constants(names: Sequence[str], table: Mapping, field=QQ,
                             degrees: Optional[Sequence[int]] = None,
                             name: str = "L") -> FinDimLie:
    """
    Build and validate a Lie algebra from a bracket table.

    Args:
        names: Basis names
        table: {(a, b): {c: coef}} with keys given as names or indices;
               pairs not listed bracket to zero
        field: Scalar field
        degrees: Optional degree of each basis element
        name: Label used in reports

    Returns:
        Validated FinDimLie

    Raises:
        AntisymmetryViolationError: If [a, a] != 0 or [a, b] != -[b, a]
        JacobiViolationError: If the Jacobi identity fails
    """
    index = {n: i for i, n in enumerate(names)}
    normalized: Dict[Tuple[int, int], Vector] = {}
    for (a, b), vec in table.items():
        i, j = _as_index(index, a), _as_index(index, b)
        vec = clean_vector(field, {_as_index(index, k): v for k, v in vec.items()})
        if i == j:
            if vec:
                raise AntisymmetryViolationError(f"[{names[i]},{names[i]}] must be 0")
            continue
        key, signed = ((i, j), vec) if i < j else ((j, i), {k: -v for k, v in vec.items()})
        if key in normalized and normalized[key] != signed:
            raise AntisymmetryViolationError(
                f"[{names[key[0]]},{names[key[1]]}] and [{names[key[1]]},{names[key[0]]}] are not opposite"
            )
        normalized[key] = signed
    L = FinDimLie(names, normalized, field, degrees, name)
    if degrees is not None and not L.graded:
        raise LieAlgebraError(f"Brackets of {name} do not respect the given degrees")
    L.validate()
    logger.debug(f"Validated {name}: dim {L.dim}")
    return L


def abelian(dim: int, field=QQ, names: Optional[Sequence[str]] = None, name: Optional[str] = None) -> FinDimLie:
    """Abelian Lie algebra, graded in degree 1."""
    names = list(names) if names is not None else [f"a{i}" for i in range(1, dim + 1)]
    return FinDimLie(names, {}, field, [1] * dim, name or f"ab{dim}")


def heisenberg(field=QQ) -> FinDimLie:
    """Heisenberg algebra x, y, z with [x, y] = z."""
    return from_structure_constants(["x", "y", "z"], {("x", "y"): {"z": 1}}, field,
                                    degrees=[1, 1, 2], name="H")


def free_nilpotent(rank: int, c: int, field=QQ, names: Optional[Sequence[str]] = None) -> FinDimLie:
    """
    Free nilpotent Lie algebra F / gamma_{c+1}(F) in the Lyndon basis.

    Basis elements are named by their words and ordered by degree, then
    lexicographically; `lie_words` holds the words and `recipes` the standard
    factorizations.
    """
    if rank < 1 or c < 1:
        raise LieAlgebraError(f"free_nilpotent needs rank, class >= 1, got ({rank}, {c})")
    names = list(names) if names is not None else default_names(rank)
    F = FreeLieAlgebra(names, c, field)
    words: List[Word] = []
    for degree in range(1, c + 1):
        words.extend(F.basis(degree))
    position = {w: i for i, w in enumerate(words)}
    table: Dict[Tuple[int, int], Vector] = {}
    for i, u in enumerate(words):
        for j in range(i + 1, len(words)):
            w = words[j]
            if len(u) + len(w) > c:
                continue
            result = F.bracket_words(u, w)
            if result:
                table[(i, j)] = {position[word]: val for word, val in result.items()}
    recipes: List[Any] = []
    for w in words:
        if len(w) == 1:
            recipes.append(("gen", names[w[0]]))
        else:
            u, v = standard_factorization(w)
            recipes.append((position[u], position[v]))
    basis_names = [F.alphabet.spell(w) for w in words]
    L = FinDimLie(basis_names, table, field, [len(w) for w in words],
                  f"N({rank},{c})", recipes)
    L.lie_words = words
    L.free_algebra = F
    L.generator_names = names
    logger.debug(f"free_nilpotent({rank}, {c}): dim {L.dim}")
    return L


# =============================================================================
# Subspace operations
# =============================================================================

def ideal_closure(L: FinDimLie, gens: Sequence[Vector]) -> Subspace:
    """
    Smallest ideal containing gens.

    Each round brackets the vectors that entered in the previous round with
    every basis element; the loop stops when a round adds nothing.
    """
    space = EchelonSpace(L.dim, L.field)
    frontier = [v for v in gens if space.add(v)]
    rounds = 0
    while frontier:
        rounds += 1
        new_frontier = []
        for v in frontier:
            for i in range(L.dim):
                w = L.bracket(L.basis_vector(i), v)
                if w and space.add(w):
                    new_frontier.append(w)
        frontier = new_frontier
    logger.debug(f"ideal_closure in {L.name}: dim {len(space)} after {rounds} rounds")
    return Subspace.from_space(L, space)


def subalgebra_closure(L: FinDimLie, gens: Sequence[Vector]) -> Subspace:
    """Smallest bracket-closed subspace containing gens."""
    space = EchelonSpace(L.dim, L.field)
    members: List[Vector] = []
    frontier = []
    for v in gens:
        if space.add(v):
            frontier.append(v)
    while frontier:
        members.extend(frontier)
        new_frontier = []
        for v in frontier:
            for u in members:
                w = L.bracket(u, v)
                if w and space.add(w):
                    new_frontier.append(w)
        frontier = new_frontier
    return Subspace.from_space(L, space)


def bracket_subspaces(L: FinDimLie, U: Subspace, W: Subspace) -> Subspace:
    """The span [U, W] of all brackets of basis vectors."""
    space = EchelonSpace(L.dim, L.field)
    for u in U.basis:
        for w in W.basis:
            vec = L.bracket(u, w)
            if vec:
                space.add(vec)
    return Subspace.from_space(L, space)


def intersect_subspaces(U: Subspace, W: Subspace) -> Subspace:
    """U intersected with W."""
    L = U.ambient
    return Subspace(L, intersect(U.basis, W.basis, L.dim, L.field))


def sum_subspaces(U: Subspace, W: Subspace) -> Subspace:
    return Subspace(U.ambient, U.basis + W.basis)


def lower_central_series(L: FinDimLie) -> List[Subspace]:
    """gamma_1 = L, gamma_j = [L, gamma_{j-1}], until the chain stabilizes."""
    whole = Subspace.whole(L)
    series = [whole]
    while True:
        nxt = bracket_subspaces(L, whole, series[-1])
        if nxt.dim == series[-1].dim:
            break
        series.append(nxt)
        if nxt.dim == 0:
            break
    return series


def derived_subalgebra(L: FinDimLie) -> Subspace:
    whole = Subspace.whole(L)
    return bracket_subspaces(L, whole, whole)


def center(L: FinDimLie) -> Subspace:
    """Kernel of the stacked adjoint maps."""
    entries: Dict[int, Vector] = {}
    for (i, j), vec in L._table.items():
        for k, val in vec.items():
            entries.setdefault(j * L.dim + k, {})[i] = val
    stacked = SparseMatrix(L.dim * L.dim, L.dim, L.field, entries)
    return Subspace(L, kernel_basis(stacked))


def degree_profile(S: Subspace) -> Dict[int, int]:
    """
    Dimensions per degree of a subspace of a graded algebra.

    Uses the filtration by degree: a vector counts in the lowest degree where
    it has a nonzero coordinate after reduction. For homogeneous subspaces
    this is the dimension of each graded piece.
    """
    L = S.ambient
    if L.degrees is None:
        raise LieAlgebraError(f"{L.name} carries no grading")
    order = sorted(range(L.dim), key=lambda i: (L.degrees[i], i))
    position = {old: new for new, old in enumerate(order)}
    permuted = EchelonSpace(L.dim, L.field,
                            ({position[k]: v for k, v in vec.items()} for vec in S.basis))
    profile = {d: 0 for d in range(1, L.max_degree() + 1)}
    for pivot in permuted.pivots:
        profile[L.degrees[order[pivot]]] += 1
    return profile


# =============================================================================
# Quotients, sums, homomorphisms
# =============================================================================

class QuotientMap:
    """Projection L -> L / I onto the coset representatives."""

    def __init__(self, source: FinDimLie, ideal: Subspace, reps: List[int], target: FinDimLie):
        self.source = source
        self.ideal = ideal
        self.reps = reps
        self.target = target
        self._rep_index = {r: k for k, r in enumerate(reps)}

    def apply(self, v: Vector) -> Vector:
        rem = self.ideal.reduce(v)
        return {self._rep_index[k]: val for k, val in rem.items()}

    def lift(self, u: Vector) -> Vector:
        return {self.reps[k]: val for k, val in u.items()}


def quotient_algebra(L: FinDimLie, I: Subspace, name: Optional[str] = None) -> Tuple[FinDimLie, QuotientMap]:
    """
    Quotient by an ideal, with its projection.

    The quotient basis consists of the non-pivot basis elements of I's RREF.
    Degrees carry over; the quotient is graded when I is homogeneous.

    Raises:
        NotAnIdealError: If [L, I] is not contained in I
    """
    for v in I.basis:
        for i in range(L.dim):
            w = L.bracket(L.basis_vector(i), v)
            if w and not I.contains(w):
                raise NotAnIdealError(f"Subspace of {L.name} is not closed under bracketing with {L.names[i]}")
    pivot_set = set(I.pivots)
    reps = [j for j in range(L.dim) if j not in pivot_set]
    rep_index = {r: k for k, r in enumerate(reps)}
    table: Dict[Tuple[int, int], Vector] = {}
    for a, i in enumerate(reps):
        for b in range(a + 1, len(reps)):
            j = reps[b]
            vec = L.bracket_basis(i, j)
            if not vec:
                continue
            rem = I.reduce(vec)
            if rem:
                table[(a, b)] = {rep_index[k]: val for k, val in rem.items()}
    degrees = [L.degrees[r] for r in reps] if L.degrees is not None else None
    Q = FinDimLie([L.names[r] for r in reps], table, L.field, degrees, name or f"{L.name}/I")
    proj = QuotientMap(L, I, reps, Q)
    return Q, proj


def direct_sum(A: FinDimLie, B: FinDimLie, name: Optional[str] = None) -> FinDimLie:
    """A (+) B with basis A then B and zero cross brackets."""
    return direct_sum_all([A, B], name)


def direct_sum_all(algebras: Sequence[FinDimLie], name: Optional[str] = None) -> FinDimLie:
    """
    Direct sum of several algebras, blocks in the given order.

    Basis names are kept when they are disjoint; otherwise each is prefixed
    with its summand's name (or position, when summand names repeat).
    """
    if not algebras:
        raise LieAlgebraError("direct_sum_all needs at least one summand")
    field = algebras[0].field
    for other in algebras[1:]:
        if other.field != field:
            raise FieldMismatchError(
                f"Cannot sum algebras over {field_label(field)} and {field_label(other.field)}"
            )
    all_names = [n for L in algebras for n in L.names]
    if len(set(all_names)) == len(all_names):
        names = all_names
    else:
        labels = [L.name for L in algebras]
        if len(set(labels)) != len(labels):
            labels = [str(k + 1) for k in range(len(algebras))]
        names = [f"{label}.{n}" for label, L in zip(labels, algebras) for n in L.names]
    table: Dict[Tuple[int, int], Vector] = {}
    offset = 0
    for L in algebras:
        for (i, j), vec in L._table.items():
            if i < j:
                table[(i + offset, j + offset)] = {k + offset: v for k, v in vec.items()}
        offset += L.dim
    degrees = None
    if all(L.degrees is not None for L in algebras):
        degrees = [d for L in algebras for d in L.degrees]
    return FinDimLie(names, table, field, degrees, name or "+".join(L.name for L in algebras))


def semidirect_sum(B: FinDimLie, Q: FinDimLie, action: Sequence[SparseMatrix],
                   name: Optional[str] = None) -> FinDimLie:
    """
    Semidirect sum with B an ideal: basis B then Q, [q, b] = D_q(b).

    Args:
        B: The ideal
        Q: The acting algebra
        action: One dim(B) x dim(B) matrix per basis element of Q; column j
                holds D_q(b_j)

    Raises:
        JacobiViolationError: If some D_q is not a derivation or the action
                              does not respect the bracket of Q
    """
    if len(action) != Q.dim:
        raise LieAlgebraError(f"Need {Q.dim} action matrices, got {len(action)}")
    columns: List[List[Vector]] = []
    for q, D in enumerate(action):
        if D.rows != B.dim or D.cols != B.dim:
            raise LieAlgebraError(f"Action matrix for {Q.names[q]} must be {B.dim}x{B.dim}")
        cols = [{} for _ in range(B.dim)]
        for i, row in D.entries.items():
            for j, val in row.items():
                cols[j][i] = val
        columns.append(cols)

    def derive(q: int, v: Vector) -> Vector:
        out: Vector = {}
        for j, val in v.items():
            add_scaled(B.field, out, columns[q][j], val)
        return out

    for q in range(Q.dim):
        for i, j in combinations(range(B.dim), 2):
            lhs = derive(q, B.bracket_basis(i, j))
            rhs = B.bracket(columns[q][i], B.basis_vector(j))
            add_scaled(B.field, rhs, B.bracket(B.basis_vector(i), columns[q][j]), B.field.one)
            if lhs != rhs:
                raise JacobiViolationError(
                    f"Action of {Q.names[q]} is not a derivation on ({B.names[i]}, {B.names[j]})"
                )

    offset = B.dim
    table: Dict[Tuple[int, int], Vector] = {}
    for (i, j), vec in B._table.items():
        if i < j:
            table[(i, j)] = dict(vec)
    for (i, j), vec in Q._table.items():
        if i < j:
            table[(i + offset, j + offset)] = {k + offset: v for k, v in vec.items()}
    for i in range(B.dim):
        for q in range(Q.dim):
            image = columns[q][i]
            if image:
                table[(i, q + offset)] = {k: -v for k, v in image.items()}
    if set(B.names) & set(Q.names):
        names = [f"{B.name}.{n}" for n in B.names] + [f"{Q.name}.{n}" for n in Q.names]
    else:
        names = B.names + Q.names
    degrees = None
    if B.degrees is not None and Q.degrees is not None:
        degrees = B.degrees + Q.degrees
    L = FinDimLie(names, table, B.field, degrees, name or f"{B.name}x|{Q.name}")
    L.validate()
    return L


class LieHomomorphism:
    """Linear map on bases; images[i] is the image of source basis element i."""

    def __init__(self, source: FinDimLie, target: FinDimLie, images: List[Vector]):
        self.source = source
        self.target = target
        self.images = images

    def apply(self, v: Vector) -> Vector:
        out: Vector = {}
        for i, val in v.items():
            add_scaled(self.target.field, out, self.images[i], val)
        return out

    def kernel(self) -> Subspace:
        entries: Dict[int, Vector] = {}
        for i, image in enumerate(self.images):
            for k, val in image.items():
                entries.setdefault(k, {})[i] = val
        matrix = SparseMatrix(self.target.dim, self.source.dim, self.source.field, entries)
        return Subspace(self.source, kernel_basis(matrix))

    def image(self) -> Subspace:
        return Subspace(self.target, [im for im in self.images if im])

    def find_bracket_violation(self) -> Optional[Tuple[int, int]]:
        for i, j in combinations(range(self.source.dim), 2):
            lhs = self.apply(self.source.bracket_basis(i, j))
            rhs = self.target.bracket(self.images[i], self.images[j])
            if lhs != rhs:
                return (i, j)
        return None

    def kills(self, S: Subspace) -> bool:
        return all(not self.apply(v) for v in S.basis)

    def compose(self, other: "LieHomomorphism") -> "LieHomomorphism":
        """other after self."""
        return LieHomomorphism(self.source, other.target, [other.apply(im) for im in self.images])


def homomorphism_from_generators(source: FinDimLie, target: FinDimLie,
                                 images: Mapping[str, Vector], check: bool = True) -> LieHomomorphism:
    """
    Extend generator images along the bracket recipes of the source basis.

    Args:
        source: Algebra with recipes (free_nilpotent)
        target: Target algebra
        images: Image of each generator name; missing generators map to 0
        check: Verify the bracket on all basis pairs

    Raises:
        LieAlgebraError: If the source has no recipes or the map is not a homomorphism
    """
    if source.recipes is None:
        raise LieAlgebraError(f"{source.name} has no generator recipes")
    result: List[Vector] = []
    for recipe in source.recipes:
        if recipe[0] == "gen":
            result.append(clean_vector(target.field, dict(images.get(recipe[1], {}))))
        else:
            i, j = recipe
            result.append(target.bracket(result[i], result[j]))
    hom = LieHomomorphism(source, target, result)
    if check:
        bad = hom.find_bracket_violation()
        if bad is not None:
            i, j = bad
            raise LieAlgebraError(
                f"Generator images do not define a homomorphism {source.name} -> {target.name} "
                f"(fails on [{source.names[i]},{source.names[j]}])"
            )
    return hom


def induced_on_quotient(hom: LieHomomorphism, proj: QuotientMap) -> LieHomomorphism:
    """
    The map L / I -> target induced by hom.

    Raises:
        LieAlgebraError: If hom does not vanish on I
    """
    if not hom.kills(proj.ideal):
        raise LieAlgebraError(f"Map from {hom.source.name} does not vanish on the ideal")
    return LieHomomorphism(proj.target, hom.target, [hom.images[r] for r in proj.reps])


def vector_text(L: FinDimLie, v: Vector) -> str:
    """Render a vector as a combination of basis names."""
    if not v:
        return "0"
    parts = []
    for k in sorted(v):
        coef = scalar_to_str(L.field, v[k])
        parts.append(L.names[k] if coef == "1" else f"{coef}*{L.names[k]}")
    return " + ".join(parts)


# Command-line testing interface
if __name__ == "__main__":
    import sys

    if "--test" in sys.argv:
        print("Testing Finite-Dimensional Lie Algebra Module...")
        print("-" * 50)

        N = free_nilpotent(2, 3)
        dims = [s.dim for s in lower_central_series(N)]
        print(f"  N(2,3): dim {N.dim}, lower central series {dims}")
        assert dims == [5, 3, 2, 0]

        H = heisenberg()
        print(f"  center of H: dim {center(H).dim}")
        print("[OK] Series and center computed")

        print("-" * 50)
        print("[SUCCESS] All tests passed!")
    else:
        print("Usage: python3 -m modules.findim_lie --test")
