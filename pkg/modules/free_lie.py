"""
Free Lie Algebra Module

Free Lie algebras on a finite ordered alphabet, represented degree by degree in
the Lyndon basis and truncated at a fixed degree D. Brackets are computed in
the free associative algebra ([a, b] = ab - ba) and brought back to the Lyndon
basis by triangular back-substitution: the expansion of the basis element of a
Lyndon word w is w itself plus lexicographically larger words of equal length.

Also holds the bracket-expression tree shared by every module that evaluates
relators or generator tuples.

No emojis or unicode characters in this file.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable, Dict, Iterator, List, Mapping, NamedTuple, Optional, Sequence, Tuple, Union

from sympy import divisors
from sympy.functions.combinatorial.numbers import mobius
from sympy.polys.domains import QQ

from modules.error_handler import LiefError
from modules.exact_linalg import add_scaled, coerce, field_label, scalar_to_str

# Set up logging
logger = logging.getLogger(__name__)

Word = Tuple[int, ...]
AssocPoly = Dict[Word, Any]
BracketTree = Union[str, int, Tuple[Any, Any]]


class FreeLieError(LiefError):
    """Custom exception for free Lie algebra errors."""
    pass


class NotLyndonError(FreeLieError):
    """Raised when a word that must be Lyndon is not."""
    pass


class UnboundNameError(FreeLieError):
    """Raised when an expression mentions a name with no binding."""
    pass


# =============================================================================
# Words, Lyndon basis, Witt formula
# =============================================================================

def default_names(rank: int) -> List[str]:
    """Generator names for an anonymous free algebra: x, y, z or x1..xn."""
    if rank <= 3:
        return ["x", "y", "z"][:rank]
    return [f"x{i}" for i in range(1, rank + 1)]


class Alphabet:
    """Ordered set of generator names; the order is declaration order."""

    def __init__(self, names: Sequence[str]):
        names = tuple(names)
        if not names:
            raise FreeLieError("Alphabet must contain at least one generator")
        if len(set(names)) != len(names):
            raise FreeLieError(f"Generator names must be distinct: {list(names)}")
        self.names = names
        self._index = {name: i for i, name in enumerate(names)}

    def __len__(self) -> int:
        return len(self.names)

    def __contains__(self, name: str) -> bool:
        return name in self._index

    def __eq__(self, other) -> bool:
        return isinstance(other, Alphabet) and self.names == other.names

    def __hash__(self) -> int:
        return hash(self.names)

    def __repr__(self) -> str:
        return f"Alphabet({list(self.names)})"

    def index(self, name: str) -> int:
        if name not in self._index:
            raise UnboundNameError(f"'{name}' is not a generator of {list(self.names)}")
        return self._index[name]

    def spell(self, word: Word) -> str:
        """Word as text: letters concatenated, dot-separated for long names."""
        letters = [self.names[i] for i in word]
        if all(len(name) == 1 for name in self.names):
            return "".join(letters)
        return ".".join(letters)


def _rank_of(alphabet: Union[Alphabet, int]) -> int:
    return alphabet if isinstance(alphabet, int) else len(alphabet)


def _lyndon_up_to(rank: int, max_len: int) -> Iterator[Word]:
    """Duval's generation of all Lyndon words of length <= max_len, in lex order."""
    w = [-1]
    while w:
        w[-1] += 1
        yield tuple(w)
        m = len(w)
        while len(w) < max_len:
            w.append(w[len(w) - m])
        while w and w[-1] == rank - 1:
            w.pop()


def lyndon_words(alphabet: Union[Alphabet, int], degree: int) -> List[Word]:
    """
    Lyndon words of a given length in lexicographic order.

    Args:
        alphabet: Alphabet or its rank
        degree: Word length, at least 1

    Returns:
        List of words (tuples of letter indices)

    Raises:
        FreeLieError: If degree < 1
    """
    if degree < 1:
        raise FreeLieError(f"Lyndon words need degree >= 1, got {degree}")
    rank = _rank_of(alphabet)
    return [w for w in _lyndon_up_to(rank, degree) if len(w) == degree]


def witt_dimension(rank: int, degree: int) -> int:
    """Dimension of the degree-n piece of the free Lie algebra of the given rank."""
    if rank < 1 or degree < 1:
        raise FreeLieError(f"witt_dimension needs rank, degree >= 1, got ({rank}, {degree})")
    total = sum(mobius(d) * rank ** (degree // d) for d in divisors(degree))
    return int(total) // degree


def is_lyndon(word: Word) -> bool:
    """True if word is strictly smaller than each of its proper rotations."""
    n = len(word)
    if n == 0:
        return False
    return all(word < word[i:] + word[:i] for i in range(1, n))


def standard_factorization(word: Word) -> Tuple[Word, Word]:
    """
    Split a Lyndon word of length >= 2 as u.v with v its longest proper Lyndon suffix.

    Raises:
        NotLyndonError: If word is not Lyndon or has length 1
    """
    if len(word) < 2 or not is_lyndon(word):
        raise NotLyndonError(f"No standard factorization for {word}")
    for i in range(1, len(word)):
        if is_lyndon(word[i:]):
            return word[:i], word[i:]
    raise NotLyndonError(f"No Lyndon suffix found for {word}")


def standard_bracketing(word: Word, alphabet: Optional[Alphabet] = None) -> BracketTree:
    """
    Bracket tree of a Lyndon word.

    Leaves are generator names when an alphabet is given, letter indices otherwise.
    """
    if not is_lyndon(word):
        raise NotLyndonError(f"{word} is not a Lyndon word")
    if len(word) == 1:
        return alphabet.names[word[0]] if alphabet is not None else word[0]
    u, v = standard_factorization(word)
    return (standard_bracketing(u, alphabet), standard_bracketing(v, alphabet))


def tree_text(tree: BracketTree) -> str:
    """Render a bracket tree as [a,[b,c]]."""
    if isinstance(tree, tuple):
        return f"[{tree_text(tree[0])},{tree_text(tree[1])}]"
    return str(tree)


# =============================================================================
# Bracket expressions (shared AST)
# =============================================================================

@dataclass(frozen=True)
class Gen:
    """A named generator (or basis element) in an expression."""
    name: str


@dataclass(frozen=True)
class Bracket:
    """The bracket [left, right]."""
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Combination:
    """A linear combination sum(coef * expr) with rational coefficients."""
    terms: Tuple[Tuple[Fraction, "Expr"], ...]


Expr = Union[Gen, Bracket, Combination]

ZERO_EXPR = Combination(())


def expression_names(expr: Expr) -> List[str]:
    """Names used by an expression, in order of first appearance."""
    seen: List[str] = []

    def walk(node: Expr) -> None:
        if isinstance(node, Gen):
            if node.name not in seen:
                seen.append(node.name)
        elif isinstance(node, Bracket):
            walk(node.left)
            walk(node.right)
        else:
            for _, sub in node.terms:
                walk(sub)

    walk(expr)
    return seen


def expression_text(expr: Expr) -> str:
    """Canonical text of an expression; parses back to the same tree."""
    if isinstance(expr, Gen):
        return expr.name
    if isinstance(expr, Bracket):
        return f"[{expression_text(expr.left)},{expression_text(expr.right)}]"
    if not expr.terms:
        return "0"
    parts = []
    for k, (coef, sub) in enumerate(expr.terms):
        body = expression_text(sub)
        if isinstance(sub, Combination):
            body = f"({body})"
        magnitude = abs(coef)
        text = body if magnitude == 1 else f"{magnitude}*{body}"
        if k == 0:
            parts.append(text if coef > 0 else f"-{text}")
        else:
            parts.append(f" + {text}" if coef > 0 else f" - {text}")
    return "".join(parts)


class ExpressionOps(NamedTuple):
    """Arithmetic used to evaluate an expression in some Lie algebra."""
    zero: Callable[[], Any]
    add: Callable[[Any, Any], Any]
    scale: Callable[[Fraction, Any], Any]
    bracket: Callable[[Any, Any], Any]


def evaluate_with(expr: Expr, binding: Mapping[str, Any], ops: ExpressionOps) -> Any:
    """
    Evaluate an expression homomorphically.

    Args:
        expr: Expression tree
        binding: Map from names to values in the target algebra
        ops: Target arithmetic

    Raises:
        UnboundNameError: If a name has no binding
    """
    if isinstance(expr, Gen):
        if expr.name not in binding:
            raise UnboundNameError(f"Name '{expr.name}' is not bound")
        return binding[expr.name]
    if isinstance(expr, Bracket):
        return ops.bracket(evaluate_with(expr.left, binding, ops),
                           evaluate_with(expr.right, binding, ops))
    total = ops.zero()
    for coef, sub in expr.terms:
        total = ops.add(total, ops.scale(coef, evaluate_with(sub, binding, ops)))
    return total


# =============================================================================
# Free Lie algebra
# =============================================================================

class FreeLieElement:
    """Finite linear combination of Lyndon basis elements of degree <= D."""

    __slots__ = ("algebra", "coords")

    def __init__(self, algebra: "FreeLieAlgebra", coords: Mapping[Word, Any]):
        field = algebra.field
        cleaned = {}
        for word, val in coords.items():
            if len(word) > algebra.truncation:
                raise FreeLieError(
                    f"Word of degree {len(word)} exceeds truncation {algebra.truncation}"
                )
            val = coerce(field, val)
            if not field.is_zero(val):
                cleaned[tuple(word)] = val
        self.algebra = algebra
        self.coords = cleaned

    def _check(self, other: "FreeLieElement") -> None:
        if not isinstance(other, FreeLieElement) or other.algebra != self.algebra:
            raise FreeLieError("Elements belong to different free Lie algebras")

    def __add__(self, other: "FreeLieElement") -> "FreeLieElement":
        self._check(other)
        out = dict(self.coords)
        add_scaled(self.algebra.field, out, other.coords, self.algebra.field.one)
        return FreeLieElement(self.algebra, out)

    def __sub__(self, other: "FreeLieElement") -> "FreeLieElement":
        self._check(other)
        out = dict(self.coords)
        add_scaled(self.algebra.field, out, other.coords, -self.algebra.field.one)
        return FreeLieElement(self.algebra, out)

    def __neg__(self) -> "FreeLieElement":
        return FreeLieElement(self.algebra, {w: -c for w, c in self.coords.items()})

    def scale(self, c) -> "FreeLieElement":
        c = coerce(self.algebra.field, c)
        return FreeLieElement(self.algebra, {w: c * v for w, v in self.coords.items()})

    def __eq__(self, other) -> bool:
        if not isinstance(other, FreeLieElement):
            return NotImplemented
        return self.algebra == other.algebra and self.coords == other.coords

    def is_zero(self) -> bool:
        return not self.coords

    def degrees(self) -> List[int]:
        return sorted({len(w) for w in self.coords})

    def is_homogeneous(self) -> bool:
        return len(self.degrees()) <= 1

    def component(self, degree: int) -> "FreeLieElement":
        return FreeLieElement(self.algebra, {w: c for w, c in self.coords.items() if len(w) == degree})

    def text(self) -> str:
        """Human-readable combination of standard bracketings."""
        if not self.coords:
            return "0"
        field = self.algebra.field
        parts = []
        for word in sorted(self.coords, key=lambda w: (len(w), w)):
            coef = scalar_to_str(field, self.coords[word])
            parts.append(f"{coef}*{tree_text(standard_bracketing(word, self.algebra.alphabet))}")
        return " + ".join(parts)

    def __repr__(self) -> str:
        return f"FreeLieElement({self.text()})"


class FreeLieAlgebra:
    """
    Free Lie algebra on an alphabet, truncated at degree D.

    Products whose degree exceeds D are dropped; every report that uses an
    instance records D.
    """

    def __init__(self, generators: Union[Alphabet, Sequence[str], int], truncation: int, field=QQ):
        if isinstance(generators, int):
            generators = default_names(generators)
        self.alphabet = generators if isinstance(generators, Alphabet) else Alphabet(generators)
        if truncation < 1:
            raise FreeLieError(f"Truncation degree must be >= 1, got {truncation}")
        self.truncation = truncation
        self.field = field
        self._basis: Dict[int, List[Word]] = {}
        self._expansions: Dict[Word, AssocPoly] = {}
        self._brackets: Dict[Tuple[Word, Word], Dict[Word, Any]] = {}

    def __eq__(self, other) -> bool:
        if not isinstance(other, FreeLieAlgebra):
            return NotImplemented
        return (self.alphabet, self.truncation, self.field) == (
            other.alphabet, other.truncation, other.field
        )

    def __hash__(self) -> int:
        return hash((self.alphabet, self.truncation))

    def __repr__(self) -> str:
        return (f"FreeLieAlgebra({list(self.alphabet.names)}, D={self.truncation}, "
                f"{field_label(self.field)})")

    @property
    def rank(self) -> int:
        return len(self.alphabet)

    def basis(self, degree: int) -> List[Word]:
        """Lyndon words of one degree (empty beyond the truncation)."""
        if degree > self.truncation:
            return []
        if degree not in self._basis:
            self._basis[degree] = lyndon_words(self.rank, degree)
        return self._basis[degree]

    def dimension(self, degree: int) -> int:
        return len(self.basis(degree))

    # ----- elements -----

    def zero(self) -> FreeLieElement:
        return FreeLieElement(self, {})

    def element(self, coords: Mapping[Word, Any]) -> FreeLieElement:
        return FreeLieElement(self, coords)

    def basis_element(self, word: Word) -> FreeLieElement:
        if not is_lyndon(word):
            raise NotLyndonError(f"{self.alphabet.spell(word)} is not a Lyndon word")
        return FreeLieElement(self, {tuple(word): self.field.one})

    def generator(self, name: str) -> FreeLieElement:
        return FreeLieElement(self, {(self.alphabet.index(name),): self.field.one})

    def generators(self) -> Dict[str, FreeLieElement]:
        return {name: self.generator(name) for name in self.alphabet.names}

    # ----- associative embedding -----

    def expansion(self, word: Word) -> AssocPoly:
        """Associative expansion of the basis element of a Lyndon word."""
        cached = self._expansions.get(word)
        if cached is not None:
            return cached
        if len(word) == 1:
            result = {word: self.field.one}
        else:
            u, v = standard_factorization(word)
            result = self.commutator(self.expansion(u), self.expansion(v))
        self._expansions[word] = result
        return result

    def commutator(self, p: AssocPoly, q: AssocPoly) -> AssocPoly:
        out: AssocPoly = {}
        field = self.field
        for a, ca in p.items():
            for b, cb in q.items():
                prod = ca * cb
                for word, sign in ((a + b, prod), (b + a, -prod)):
                    new = out.get(word, field.zero) + sign
                    if field.is_zero(new):
                        out.pop(word, None)
                    else:
                        out[word] = new
        return out

    def to_associative(self, e: FreeLieElement) -> AssocPoly:
        """Expand an element into the free associative algebra."""
        out: AssocPoly = {}
        for word, coef in e.coords.items():
            add_scaled(self.field, out, self.expansion(word), coef)
        return out

    def from_associative_lie(self, poly: Mapping[Word, Any]) -> Optional[FreeLieElement]:
        """
        Recover the Lie element whose expansion is poly.

        Returns:
            The element, or None when poly is not in the image of the Lie algebra
        """
        by_degree: Dict[int, AssocPoly] = {}
        for word, coef in poly.items():
            coef = coerce(self.field, coef)
            if self.field.is_zero(coef):
                continue
            if len(word) > self.truncation:
                raise FreeLieError(
                    f"Polynomial has degree {len(word)} beyond truncation {self.truncation}"
                )
            by_degree.setdefault(len(word), {})[tuple(word)] = coef
        coords = self._back_substitute(by_degree)
        if coords is None:
            return None
        return FreeLieElement(self, coords)

    def _back_substitute(self, by_degree: Dict[int, AssocPoly]) -> Optional[Dict[Word, Any]]:
        coords: Dict[Word, Any] = {}
        for degree in sorted(by_degree):
            part = dict(by_degree[degree])
            while part:
                lead = min(part)
                if not is_lyndon(lead):
                    return None
                coef = part[lead]
                coords[lead] = coef
                add_scaled(self.field, part, self.expansion(lead), -coef)
        return coords

    # ----- bracket -----

    def bracket_words(self, u: Word, w: Word) -> Dict[Word, Any]:
        if u == w or len(u) + len(w) > self.truncation:
            return {}
        if u > w:
            return {word: -c for word, c in self.bracket_words(w, u).items()}
        key = (u, w)
        cached = self._brackets.get(key)
        if cached is not None:
            return cached
        joined = u + w
        if is_lyndon(joined) and standard_factorization(joined) == (u, w):
            result = {joined: self.field.one}
        else:
            poly = self.commutator(self.expansion(u), self.expansion(w))
            result = self._back_substitute({len(joined): poly}) if poly else {}
            if result is None:
                raise FreeLieError(f"Commutator of {u} and {w} left the Lie subspace")
        self._brackets[key] = result
        return result

    def bracket(self, a: FreeLieElement, b: FreeLieElement) -> FreeLieElement:
        """Lie bracket, truncated past degree D."""
        a._check(b)
        out: Dict[Word, Any] = {}
        for u, cu in a.coords.items():
            for w, cw in b.coords.items():
                add_scaled(self.field, out, self.bracket_words(u, w), cu * cw)
        return FreeLieElement(self, out)

    def left_normed(self, elements: Sequence[FreeLieElement]) -> FreeLieElement:
        """[[...[e1, e2], ...], ek]; a single element is returned unchanged."""
        if not elements:
            raise FreeLieError("left_normed needs at least one element")
        result = elements[0]
        for e in elements[1:]:
            result = self.bracket(result, e)
        return result

    def adjoint_apply(self, r: FreeLieElement, f: Mapping[Word, Any]) -> FreeLieElement:
        """
        Right action r o f of the enveloping algebra: r o (uv) = (r o u) o v.

        Args:
            r: Element acted upon
            f: Associative polynomial (the empty word is the unit)
        """
        total = self.zero()
        for word, coef in f.items():
            term = r
            for letter in word:
                if term.is_zero():
                    break
                term = self.bracket(term, FreeLieElement(self, {(letter,): self.field.one}))
            total = total + term.scale(coerce(self.field, coef))
        return total

    def evaluate(self, expr: Expr, binding: Optional[Mapping[str, FreeLieElement]] = None) -> FreeLieElement:
        """Evaluate an expression; unbound names default to same-named generators."""
        values: Dict[str, FreeLieElement] = {}
        if binding is None:
            values = self.generators()
        else:
            values = dict(binding)
        return evaluate_with(expr, values, self.ops())

    def ops(self) -> ExpressionOps:
        field = self.field
        return ExpressionOps(
            zero=self.zero,
            add=lambda a, b: a + b,
            scale=lambda c, a: a.scale(coerce(field, c)),
            bracket=self.bracket,
        )

    def random_element(self, degree: int, rng) -> FreeLieElement:
        """
        Random homogeneous element with small integer coefficients.

        Args:
            degree: Degree of the element
            rng: numpy Generator
        """
        words = self.basis(degree)
        if not words:
            return self.zero()
        coeffs = [int(c) for c in rng.integers(-3, 4, size=len(words))]
        if all(c == 0 for c in coeffs):
            coeffs[int(rng.integers(0, len(words)))] = 1
        return FreeLieElement(self, dict(zip(words, coeffs)))


# =============================================================================
# Module-level operations
# =============================================================================

def to_associative(e: FreeLieElement) -> AssocPoly:
    """Expand a free Lie element into the free associative algebra."""
    return e.algebra.to_associative(e)


def from_associative_lie(algebra: FreeLieAlgebra, p: Mapping[Word, Any]) -> Optional[FreeLieElement]:
    """Inverse of to_associative on the Lie subspace; None for non-Lie input."""
    return algebra.from_associative_lie(p)


def lie_bracket(a: FreeLieElement, b: FreeLieElement) -> FreeLieElement:
    """Bracket of two elements of the same free Lie algebra."""
    if not isinstance(b, FreeLieElement) or a.algebra != b.algebra:
        raise FreeLieError("Cannot bracket elements of different free Lie algebras")
    return a.algebra.bracket(a, b)


def adjoint_apply(r: FreeLieElement, f: Mapping[Word, Any]) -> FreeLieElement:
    """Right adjoint action r o f."""
    return r.algebra.adjoint_apply(r, f)


def left_normed(elements: Sequence[FreeLieElement]) -> FreeLieElement:
    """Left-normed bracket of a nonempty sequence."""
    if not elements:
        raise FreeLieError("left_normed needs at least one element")
    return elements[0].algebra.left_normed(elements)


def random_element(algebra: FreeLieAlgebra, degree: int, rng) -> FreeLieElement:
    """Random homogeneous element of the given degree."""
    return algebra.random_element(degree, rng)


# Command-line testing interface
if __name__ == "__main__":
    import sys

    if "--test" in sys.argv:
        print("Testing Free Lie Algebra Module...")
        print("-" * 50)

        for n in range(1, 9):
            count = len(lyndon_words(2, n))
            print(f"  rank 2 degree {n}: {count} Lyndon words, Witt {witt_dimension(2, n)}")
            assert count == witt_dimension(2, n)

        F = FreeLieAlgebra(["x", "y"], 4)
        x, y = F.generator("x"), F.generator("y")
        print(f"  [[x,y],x] = {F.bracket(F.bracket(x, y), x).text()}")
        print("[OK] Bracket computed")

        print("-" * 50)
        print("[SUCCESS] All tests passed!")
    else:
        print("Usage: python3 -m modules.free_lie --test")
