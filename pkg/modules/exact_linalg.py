"""
Exact Linear Algebra Module

Exact sparse linear algebra over the rationals and prime fields F_p.
Every rank, kernel, membership and quotient computation in the workbench
goes through this module.

Scalars are sympy polys-domain elements (QQ or GF(p)); vectors are sparse
dicts mapping column index to a nonzero scalar. Row reduction is delegated
to sympy's sparse reduced-row-echelon routine.

No emojis or unicode characters in this file.
"""

import logging
from fractions import Fraction
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

from sympy import isprime
from sympy.polys.domains import GF, QQ
from sympy.polys.matrices.sdm import sdm_irref

from modules.error_handler import LiefError

# Set up logging
logger = logging.getLogger(__name__)

DEFAULT_PRIME = 32003

Vector = Dict[int, Any]


class LinearAlgebraError(LiefError):
    """Custom exception for linear algebra errors."""
    pass


class FieldMismatchError(LinearAlgebraError):
    """Raised when scalars from different fields are combined."""
    pass


class DimensionMismatchError(LinearAlgebraError):
    """Raised when vectors do not live in the expected ambient space."""
    pass


# =============================================================================
# Fields and scalars
# =============================================================================

def make_field(label: str = "Q", prime: Optional[int] = None):
    """
    Build a scalar field from a label.

    Args:
        label: "Q", "Fp" (with prime) or "Fp:<p>"
        prime: Prime for "Fp" when not embedded in the label

    Returns:
        sympy domain (QQ or GF(p) with residues in [0, p))
    """
    text = str(label).strip()
    if text.upper() in ("Q", "QQ"):
        return QQ
    if text.lower().startswith("fp"):
        rest = text[2:].lstrip(":").strip()
        p = int(rest) if rest else (prime if prime is not None else DEFAULT_PRIME)
        if not isprime(p):
            raise LinearAlgebraError(f"Field characteristic must be prime, got {p}")
        return GF(p, symmetric=False)
    raise LinearAlgebraError(f"Unknown field label: {label}")


def field_label(field) -> str:
    """Short label used in reports ("Q" or "Fp:<p>")."""
    if field.is_QQ:
        return "Q"
    return f"Fp:{field.characteristic()}"


def coerce(field, value) -> Any:
    """
    Convert an int, Fraction or domain element into the given field.

    Raises:
        FieldMismatchError: If value already belongs to a different field
    """
    if field.of_type(value):
        return value
    if isinstance(value, bool):
        raise FieldMismatchError(f"Cannot use boolean {value!r} as a scalar")
    if isinstance(value, int):
        return field.convert(value)
    if isinstance(value, Fraction):
        num = field.convert(value.numerator)
        den = field.convert(value.denominator)
        if field.is_zero(den):
            raise FieldMismatchError(f"{value} has no image in {field_label(field)}")
        return num / den
    raise FieldMismatchError(
        f"Scalar {value!r} does not belong to field {field_label(field)}"
    )


def scalar_to_str(field, value) -> str:
    """Render a scalar as text: integers, p/q for rationals, residues in [0, p)."""
    return str(field.to_sympy(value))


def scalar_to_json(field, value) -> Any:
    """JSON-friendly scalar: int when integral, else the string p/q."""
    as_sympy = field.to_sympy(value)
    if as_sympy.is_Integer:
        return int(as_sympy)
    return str(as_sympy)


def clean_vector(field, vec: Dict[int, Any]) -> Vector:
    """Coerce entries and drop zeros."""
    out = {}
    for idx, val in vec.items():
        val = coerce(field, val)
        if not field.is_zero(val):
            out[idx] = val
    return out


def add_scaled(field, target: Vector, source: Vector, scale) -> None:
    """In place: target += scale * source, keeping the vector sparse."""
    if field.is_zero(scale):
        return
    for idx, val in source.items():
        new = target.get(idx, field.zero) + scale * val
        if field.is_zero(new):
            target.pop(idx, None)
        else:
            target[idx] = new


def linear_combination(field, coeffs: Sequence, vectors: Sequence[Vector]) -> Vector:
    """Return sum(coeffs[i] * vectors[i]) as a sparse vector."""
    out: Vector = {}
    for c, v in zip(coeffs, vectors):
        add_scaled(field, out, v, c)
    return out


# =============================================================================
# Sparse matrices
# =============================================================================

class SparseMatrix:
    """
    Exact sparse matrix over a single scalar field.

    Entries are stored as {row: {col: nonzero scalar}}. Instances are treated
    as immutable values after construction.
    """

    def __init__(self, rows: int, cols: int, field, entries: Optional[Dict] = None):
        self.rows = rows
        self.cols = cols
        self.field = field
        self.entries: Dict[int, Vector] = {}
        for i, row in (entries or {}).items():
            if not 0 <= i < rows:
                raise DimensionMismatchError(f"Row index {i} outside 0..{rows - 1}")
            for j in row:
                if not 0 <= j < cols:
                    raise DimensionMismatchError(f"Column index {j} outside 0..{cols - 1}")
            cleaned = clean_vector(field, row)
            if cleaned:
                self.entries[i] = cleaned

    @classmethod
    def from_rows(cls, vectors: Sequence[Vector], cols: int, field) -> "SparseMatrix":
        """Stack sparse vectors as the rows of a matrix."""
        return cls(len(vectors), cols, field, {i: dict(v) for i, v in enumerate(vectors)})

    @classmethod
    def from_dense(cls, rows: Sequence[Sequence], field) -> "SparseMatrix":
        """Build from a list of lists of ints/Fractions/scalars."""
        nrows = len(rows)
        ncols = len(rows[0]) if nrows else 0
        entries = {i: {j: val for j, val in enumerate(row)} for i, row in enumerate(rows)}
        return cls(nrows, ncols, field, entries)

    @classmethod
    def zero(cls, rows: int, cols: int, field) -> "SparseMatrix":
        return cls(rows, cols, field, {})

    @classmethod
    def identity(cls, n: int, field) -> "SparseMatrix":
        return cls(n, n, field, {i: {i: field.one} for i in range(n)})

    def get(self, i: int, j: int):
        return self.entries.get(i, {}).get(j, self.field.zero)

    def row(self, i: int) -> Vector:
        return dict(self.entries.get(i, {}))

    def is_zero(self) -> bool:
        return not self.entries

    def transpose(self) -> "SparseMatrix":
        entries: Dict[int, Vector] = {}
        for i, row in self.entries.items():
            for j, val in row.items():
                entries.setdefault(j, {})[i] = val
        return SparseMatrix(self.cols, self.rows, self.field, entries)

    def matmul(self, other: "SparseMatrix") -> "SparseMatrix":
        """Matrix product self * other."""
        _check_same_field(self.field, other.field)
        if self.cols != other.rows:
            raise DimensionMismatchError(
                f"Cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}"
            )
        entries: Dict[int, Vector] = {}
        for i, row in self.entries.items():
            acc: Vector = {}
            for k, a_ik in row.items():
                other_row = other.entries.get(k)
                if other_row:
                    add_scaled(self.field, acc, other_row, a_ik)
            if acc:
                entries[i] = acc
        return SparseMatrix(self.rows, other.cols, self.field, entries)

    def apply(self, vec: Vector) -> Vector:
        """Matrix-vector product self * vec (vec indexed by columns)."""
        out: Vector = {}
        for i, row in self.entries.items():
            acc = self.field.zero
            for j, val in row.items():
                if j in vec:
                    acc += val * vec[j]
            if not self.field.is_zero(acc):
                out[i] = acc
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, SparseMatrix):
            return NotImplemented
        return (self.rows, self.cols, self.field, self.entries) == (
            other.rows, other.cols, other.field, other.entries
        )

    def __repr__(self) -> str:
        return f"SparseMatrix({self.rows}x{self.cols}, {field_label(self.field)}, nnz={self.nnz()})"

    def nnz(self) -> int:
        return sum(len(row) for row in self.entries.values())


def _check_same_field(a, b) -> None:
    if a != b:
        raise FieldMismatchError(f"Field mismatch: {field_label(a)} vs {field_label(b)}")


def _check_vectors(vectors: Iterable[Vector], dim: int, field) -> None:
    for vec in vectors:
        for idx, val in vec.items():
            if not 0 <= idx < dim:
                raise DimensionMismatchError(f"Index {idx} outside ambient dimension {dim}")
            if not field.of_type(val):
                raise FieldMismatchError(
                    f"Entry {val!r} at index {idx} is not in field {field_label(field)}"
                )


# =============================================================================
# Row reduction and derived primitives
# =============================================================================

def rref(m: SparseMatrix) -> Tuple[int, List[int], SparseMatrix]:
    """
    Reduced row echelon form.

    The reduced form is unique, so the result does not depend on elimination
    order; pivots are scaled to 1.

    Args:
        m: Matrix to reduce

    Returns:
        Tuple of (rank, pivot columns in increasing order, reduced matrix)
    """
    _check_vectors(m.entries.values(), m.cols, m.field)
    nonempty = {i: row for i, row in m.entries.items() if row}
    if not nonempty:
        return 0, [], SparseMatrix.zero(m.rows, m.cols, m.field)
    reduced, pivots, _ = sdm_irref(nonempty)
    logger.debug(f"rref {m.rows}x{m.cols} over {field_label(m.field)}: rank {len(pivots)}")
    return len(pivots), list(pivots), SparseMatrix(m.rows, m.cols, m.field, reduced)


def rank(m: SparseMatrix) -> int:
    """Rank of a matrix."""
    return rref(m)[0]


def _kernel_from_rref(reduced: SparseMatrix, pivots: List[int]) -> List[Vector]:
    field = reduced.field
    pivot_set = set(pivots)
    column_entries: Dict[int, List[Tuple[int, Any]]] = {}
    for i, row in reduced.entries.items():
        for j, val in row.items():
            if j not in pivot_set:
                column_entries.setdefault(j, []).append((pivots[i], val))
    basis = []
    for j in range(reduced.cols):
        if j in pivot_set:
            continue
        vec = {j: field.one}
        for pivot_col, val in column_entries.get(j, []):
            vec[pivot_col] = -val
        basis.append(vec)
    return basis


def kernel_basis(m: SparseMatrix) -> List[Vector]:
    """
    Basis of the right null space {v : m v = 0}.

    Returns one vector per non-pivot column, so the count is cols - rank.
    """
    _, pivots, reduced = rref(m)
    return _kernel_from_rref(reduced, pivots)


def echelonize(vectors: Sequence[Vector], dim: int, field) -> Tuple[List[Vector], List[int]]:
    """
    Echelon (RREF) basis of the span of vectors.

    Returns:
        Tuple of (rows in pivot order, pivot columns)
    """
    _check_vectors(vectors, dim, field)
    matrix = SparseMatrix.from_rows([v for v in vectors if v], dim, field)
    r, pivots, reduced = rref(matrix)
    return [reduced.row(i) for i in range(r)], pivots


def membership(span: Sequence[Vector], v: Vector, dim: int, field) -> Optional[List[Any]]:
    """
    Express v as a combination of the span vectors.

    Args:
        span: Spanning vectors (need not be independent)
        v: Target vector
        dim: Ambient dimension
        field: Scalar field

    Returns:
        Coordinates c with sum(c[i] * span[i]) == v, or None if v is not a member
    """
    _check_vectors(list(span) + [v], dim, field)
    n = len(span)
    # Columns are the span vectors; the last column is v.
    entries: Dict[int, Vector] = {}
    for col, vec in enumerate(span):
        for idx, val in vec.items():
            entries.setdefault(idx, {})[col] = val
    for idx, val in v.items():
        entries.setdefault(idx, {})[n] = val
    augmented = SparseMatrix(dim, n + 1, field, entries)
    _, pivots, reduced = rref(augmented)
    if n in pivots:
        return None
    coords = [field.zero] * n
    for i, pivot in enumerate(pivots):
        coords[pivot] = reduced.get(i, n)
    return coords


def quotient_basis(sub: Sequence[Vector], ambient_dim: int, field) -> List[int]:
    """
    Coset representatives for ambient / span(sub).

    The standard basis vectors at the returned indices (the non-pivot columns
    of the echelon form of sub) project to a basis of the quotient.
    """
    _, pivots = echelonize(sub, ambient_dim, field)
    pivot_set = set(pivots)
    return [j for j in range(ambient_dim) if j not in pivot_set]


def intersect(u: Sequence[Vector], w: Sequence[Vector], dim: int, field) -> List[Vector]:
    """Echelon basis of span(u) intersected with span(w)."""
    u_rows, _ = echelonize(u, dim, field)
    w_rows, _ = echelonize(w, dim, field)
    if not u_rows or not w_rows:
        return []
    stacked = SparseMatrix.from_rows(u_rows + w_rows, dim, field)
    relations = kernel_basis(stacked.transpose())
    images = []
    for rel in relations:
        coeffs = [rel.get(i, field.zero) for i in range(len(u_rows))]
        images.append(linear_combination(field, coeffs, u_rows))
    rows, _ = echelonize(images, dim, field)
    return rows


def echelon_reduce(rows: Sequence[Vector], v: Vector, field) -> Vector:
    """
    Remainder of v modulo an echelon basis (rows as returned by echelonize).

    The remainder is zero at every pivot column; v lies in the span iff it is empty.
    """
    out = dict(v)
    for row in rows:
        pivot = min(row)
        coeff = out.get(pivot)
        if coeff is not None:
            add_scaled(field, out, row, -coeff / row[pivot])
    return out


def reduce_mod_p(m: SparseMatrix, p: int) -> SparseMatrix:
    """
    Reduce a rational matrix with integral entries modulo a prime.

    Raises:
        LinearAlgebraError: If an entry is not an integer
    """
    if not m.field.is_QQ:
        raise FieldMismatchError("reduce_mod_p expects a matrix over Q")
    target = make_field(f"Fp:{p}")
    entries: Dict[int, Vector] = {}
    for i, row in m.entries.items():
        for j, val in row.items():
            as_sympy = QQ.to_sympy(val)
            if not as_sympy.is_Integer:
                raise LinearAlgebraError(f"Entry {as_sympy} at ({i}, {j}) is not integral")
            entries.setdefault(i, {})[j] = target.convert(int(as_sympy))
    return SparseMatrix(m.rows, m.cols, target, entries)


class EchelonSpace:
    """
    Incrementally maintained RREF basis of a subspace.

    Used by the closure loops, which add one candidate vector at a time.
    """

    def __init__(self, dim: int, field, vectors: Iterable[Vector] = ()):
        self.dim = dim
        self.field = field
        self.pivot_rows: Dict[int, Vector] = {}
        for vec in vectors:
            self.add(vec)

    def reduce(self, vec: Vector) -> Vector:
        """Remainder of vec after eliminating every pivot column."""
        out = dict(vec)
        for pivot in sorted(set(out) & set(self.pivot_rows)):
            coeff = out.get(pivot)
            if coeff is not None:
                add_scaled(self.field, out, self.pivot_rows[pivot], -coeff)
        return out

    def contains(self, vec: Vector) -> bool:
        return not self.reduce(vec)

    def add(self, vec: Vector) -> bool:
        """
        Add a vector to the span.

        Returns:
            True if the span grew
        """
        rem = self.reduce(vec)
        if not rem:
            return False
        pivot = min(rem)
        inv = self.field.one / rem[pivot]
        rem = {j: val * inv for j, val in rem.items()}
        for row in self.pivot_rows.values():
            coeff = row.get(pivot)
            if coeff is not None:
                add_scaled(self.field, row, rem, -coeff)
        self.pivot_rows[pivot] = rem
        return True

    @property
    def pivots(self) -> List[int]:
        return sorted(self.pivot_rows)

    def basis(self) -> List[Vector]:
        return [dict(self.pivot_rows[p]) for p in self.pivots]

    def __len__(self) -> int:
        return len(self.pivot_rows)


# Command-line testing interface
if __name__ == "__main__":
    import sys

    if "--test" in sys.argv:
        print("Testing Exact Linear Algebra Module...")
        print("-" * 50)

        m = SparseMatrix.from_dense([[1, 2], [2, 4]], QQ)
        r, piv, _ = rref(m)
        print(f"  rank [[1,2],[2,4]] = {r}, pivots {piv}")
        assert r == 1 and piv == [0]
        print(f"  kernel = {kernel_basis(m)}")

        print("-" * 50)
        print("[SUCCESS] All tests passed!")
    else:
        print("Usage: python3 -m modules.exact_linalg --test")
