"""
Subdirect Sum Module

Subalgebras of direct sums of graded Lie algebras (free nilpotent algebras or
nilpotent quotients of presentations), fibre sums over a common quotient, the
presentation P-tilde built from split data together with its map delta into
the fibre sum, and split fibre sums B x| L1.

Every computation happens in class-c truncations and every verdict is stamped
with the class.

No emojis or unicode characters in this file.
"""

import logging
from dataclasses import dataclass, field as dataclass_field
from fractions import Fraction
from itertools import combinations
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

from modules.error_handler import LiefError
from modules.exact_linalg import (
    SparseMatrix,
    Vector,
    add_scaled,
    coerce,
    kernel_basis,
    linear_combination,
    membership,
)
from modules.findim_lie import (
    FinDimLie,
    LieAlgebraError,
    LieHomomorphism,
    Subspace,
    bracket_subspaces,
    degree_profile,
    direct_sum_all,
    homomorphism_from_generators,
    ideal_closure,
    induced_on_quotient,
    intersect_subspaces,
    lower_central_series,
    quotient_algebra,
    semidirect_sum,
    subalgebra_closure,
    vector_text,
)
from modules.free_lie import Bracket, Combination, Expr, Gen, ZERO_EXPR, expression_text
from modules.presentations import NilpotentQuotientResult, Presentation, nilpotent_quotient

# Set up logging
logger = logging.getLogger(__name__)


class SubdirectError(LiefError):
    """Custom exception for subdirect and fibre sum errors."""
    pass


class NotSubdirectError(SubdirectError):
    """Raised when some coordinate projection is not surjective."""
    pass


class MapsDisagreeError(SubdirectError):
    """Raised when the maps of a fibre sum are not surjective homomorphisms onto Q."""
    pass


class MalformedPresentationError(SubdirectError):
    """Raised when presentation data does not have the required shape."""
    pass


def _profile_rows(profile: Mapping[int, int], target: Mapping[int, int]) -> List[Dict[str, int]]:
    return [{"degree": d, "dim": profile.get(d, 0), "target": target.get(d, 0)}
            for d in sorted(set(profile) | set(target))]


def _first_deficient(profile: Mapping[int, int], target: Mapping[int, int]) -> Optional[int]:
    for d in sorted(set(profile) | set(target)):
        if profile.get(d, 0) != target.get(d, 0):
            return d
    return None


# =============================================================================
# Subdirect sums
# =============================================================================

class SubdirectSum:
    """
    Subalgebra L of F_1 (+) ... (+) F_k generated by tuples.

    Factors must carry degrees (free nilpotent algebras and their quotients
    do). The generated span is closed under brackets on construction.
    """

    def __init__(self, factors: Sequence[FinDimLie], generators: Sequence[Sequence[Vector]],
                 cls: int, name: str = "S", check: bool = True):
        if not factors:
            raise SubdirectError("A subdirect sum needs at least one factor")
        for F in factors:
            if F.degrees is None:
                raise SubdirectError(f"Factor {F.name} carries no grading")
        self.name = name
        self.factors = list(factors)
        self.cls = cls
        self.field = factors[0].field
        self.ambient = direct_sum_all(self.factors, name=f"{name}.ambient")
        self.offsets = []
        offset = 0
        for F in self.factors:
            self.offsets.append(offset)
            offset += F.dim
        self.generators = [self.combine(t) for t in generators]
        self.span = subalgebra_closure(self.ambient, self.generators)
        logger.info(f"Subdirect sum {name}: dim {self.span.dim} in dim {self.ambient.dim} (class {cls})")
        if check:
            self.check_subdirect()

    @property
    def k(self) -> int:
        return len(self.factors)

    def combine(self, coords: Sequence[Vector]) -> Vector:
        """Tuple of factor vectors to an ambient vector."""
        if len(coords) != self.k:
            raise SubdirectError(f"Expected {self.k} coordinates, got {len(coords)}")
        out: Vector = {}
        for i, vec in enumerate(coords):
            for idx, val in vec.items():
                if idx >= self.factors[i].dim:
                    raise SubdirectError(f"Coordinate {i + 1} has index {idx} outside {self.factors[i].name}")
                out[idx + self.offsets[i]] = val
        return out

    def embed(self, i: int, vec: Vector) -> Vector:
        return {idx + self.offsets[i]: val for idx, val in vec.items()}

    def restrict(self, vec: Vector, i: int) -> Vector:
        lo, hi = self.offsets[i], self.offsets[i] + self.factors[i].dim
        return {idx - lo: val for idx, val in vec.items() if lo <= idx < hi}

    def contains(self, vec: Vector) -> bool:
        return self.span.contains(vec)

    def profile(self) -> Dict[int, int]:
        return degree_profile(self.span)

    def projection_image(self, indices: Sequence[int]) -> Tuple[FinDimLie, Subspace]:
        """Image of L in the sum of the selected factors (0-based indices)."""
        target = direct_sum_all([self.factors[i] for i in indices], name="target")
        vectors = []
        for v in self.span.basis:
            image: Vector = {}
            shift = 0
            for i in indices:
                for idx, val in self.restrict(v, i).items():
                    image[idx + shift] = val
                shift += self.factors[i].dim
            if image:
                vectors.append(image)
        return target, Subspace(target, vectors)

    def check_subdirect(self) -> None:
        """
        Raises:
            NotSubdirectError: Naming the first factor and degree where the projection is deficient
        """
        for i, F in enumerate(self.factors):
            target, image = self.projection_image([i])
            got = degree_profile(image)
            bad = _first_deficient(got, F.graded_dims())
            if bad is not None:
                raise NotSubdirectError(
                    f"{self.name}: projection to factor {i + 1} ({F.name}) is deficient at degree {bad} "
                    f"(image {got.get(bad, 0)} of {F.graded_dims().get(bad, 0)})"
                )

    def reclosure_is_noop(self) -> bool:
        return subalgebra_closure(self.ambient, self.span.basis) == self.span


def build_subdirect(factors: Sequence[FinDimLie], generator_tuples: Sequence[Sequence[Vector]],
                    cls: int, name: str = "S") -> SubdirectSum:
    """Build and verify a subdirect sum."""
    return SubdirectSum(factors, generator_tuples, cls, name)


def project(S: SubdirectSum, indices: Sequence[int]) -> Dict[str, Any]:
    """
    Surjectivity of the projection to the factors with the given 1-based indices.
    """
    zero_based = [i - 1 for i in indices]
    for i in zero_based:
        if not 0 <= i < S.k:
            raise SubdirectError(f"Factor index {i + 1} outside 1..{S.k}")
    target, image = S.projection_image(zero_based)
    got = degree_profile(image)
    want = target.graded_dims()
    bad = _first_deficient(got, want)
    return {
        "check": "project",
        "subdirect": S.name,
        "indices": list(indices),
        "class": S.cls,
        "per_degree": _profile_rows(got, want),
        "verdict": f"surjective up to class {S.cls}" if bad is None else f"deficient at degree {bad}",
        "passed": bad is None,
    }


def projection_scan(S: SubdirectSum, s: int) -> Dict[str, Any]:
    """Run project() for every s-element set of factors."""
    results = [project(S, list(idx)) for idx in combinations(range(1, S.k + 1), s)]
    failed = [r["indices"] for r in results if not r["passed"]]
    return {
        "check": "scan",
        "subdirect": S.name,
        "size": s,
        "class": S.cls,
        "results": [{"indices": r["indices"], "verdict": r["verdict"]} for r in results],
        "verdict": f"all {len(results)} projections surjective" if not failed else f"deficient for {failed[0]}",
        "passed": not failed,
    }


def intersect_factor(S: SubdirectSum, i: int) -> Subspace:
    """L meet F_i as a subspace of factor i (0-based)."""
    basis = S.span.basis
    lo, hi = S.offsets[i], S.offsets[i] + S.factors[i].dim
    # Columns are the basis vectors of L; rows are coordinates outside block i.
    entries: Dict[int, Vector] = {}
    for col, v in enumerate(basis):
        for idx, val in v.items():
            if not lo <= idx < hi:
                entries.setdefault(idx, {})[col] = val
    relations = kernel_basis(SparseMatrix(S.ambient.dim, len(basis), S.field, entries)) if basis else []
    vectors = []
    for rel in relations:
        combo = linear_combination(S.field, [rel.get(k, S.field.zero) for k in range(len(basis))], basis)
        vectors.append(S.restrict(combo, i))
    return Subspace(S.factors[i], vectors)


def nonzero_intersections(S: SubdirectSum) -> Dict[str, Any]:
    """Whether L meets each factor nontrivially (up to class c)."""
    rows = []
    for i, F in enumerate(S.factors):
        meet = intersect_factor(S, i)
        rows.append({"factor": i + 1, "name": F.name, "dim": meet.dim,
                     "per_degree": degree_profile(meet)})
    passed = all(r["dim"] > 0 for r in rows)
    return {
        "check": "intersections",
        "subdirect": S.name,
        "class": S.cls,
        "factors": rows,
        "verdict": "L meets every factor" if passed else "some intersection is zero",
        "passed": passed,
    }


def direct_decomposition_check(S: SubdirectSum) -> Dict[str, Any]:
    """Whether L equals the sum of its intersections with the factors, degree by degree."""
    total: Dict[int, int] = {}
    for i in range(S.k):
        for d, n in degree_profile(intersect_factor(S, i)).items():
            total[d] = total.get(d, 0) + n
    got = S.profile()
    bad = _first_deficient(total, got)
    return {
        "check": "decompose",
        "subdirect": S.name,
        "class": S.cls,
        "per_degree": _profile_rows(total, got),
        "verdict": "L is the sum of its factor intersections" if bad is None
        else f"decomposition fails at degree {bad}",
        "passed": bad is None,
    }


def generator_profile(S: SubdirectSum) -> Dict[str, Any]:
    """dim (L/[L,L])_n per degree: the number of generators needed in each degree."""
    derived = bracket_subspaces(S.ambient, S.span, S.span)
    whole = S.profile()
    der = degree_profile(derived)
    rows = [{"degree": d, "generators": whole.get(d, 0) - der.get(d, 0)} for d in sorted(whole)]
    return {
        "check": "profile",
        "subdirect": S.name,
        "class": S.cls,
        "per_degree": rows,
        "verdict": "profile computed",
        "passed": True,
    }


def containment_check(S: SubdirectSum, vec: Vector, label: str) -> Dict[str, Any]:
    """Membership of a vector in L, reported by homogeneous component."""
    degrees = S.ambient.degrees
    components: Dict[int, Vector] = {}
    for idx, val in vec.items():
        components.setdefault(degrees[idx], {})[idx] = val
    failing = [d for d in sorted(components) if not S.contains(components[d])]
    member = S.contains(vec)
    return {
        "check": "contains",
        "subdirect": S.name,
        "element": label,
        "class": S.cls,
        "failing_degrees": failing,
        "verdict": "member" if member else f"not a member (degree {failing[0] if failing else '?'})",
        "passed": member,
    }


def gamma_containment_check(S: SubdirectSum) -> Dict[str, Any]:
    """
    Check gamma_{k-1}(F_i) inside L for every factor, basis element by basis element.

    Also reports the hypotheses: pairwise surjective projections and nonzero
    intersections with every factor.
    """
    k = S.k
    pairwise = all(project(S, [a, b])["passed"] for a, b in combinations(range(1, k + 1), 2))
    meets = nonzero_intersections(S)["passed"]
    step = max(k - 1, 1)
    first_failure = None
    rows = []
    for i, F in enumerate(S.factors):
        series = lower_central_series(F)
        gamma = series[step - 1] if step - 1 < len(series) else Subspace(F)
        contained = 0
        for v in gamma.basis:
            if S.contains(S.embed(i, v)):
                contained += 1
            elif first_failure is None:
                first_failure = {"factor": i + 1, "degree": F.degrees[min(v)], "element": vector_text(F, v)}
        rows.append({"factor": i + 1, "gamma_dim": gamma.dim, "contained": contained})
    passed = first_failure is None
    verdict = (f"gamma_{step}(F_i) contained in L for all i up to class {S.cls}" if passed
               else f"gamma_{step} fails in factor {first_failure['factor']} at degree {first_failure['degree']}")
    return {
        "check": "gamma",
        "subdirect": S.name,
        "class": S.cls,
        "gamma_index": step,
        "hypotheses": {"pairwise_surjective": pairwise, "meets_every_factor": meets},
        "factors": rows,
        "first_failure": first_failure,
        "verdict": verdict,
        "passed": passed,
    }


def _random_degrees(rng, count: int, cap: int) -> List[int]:
    degrees = [1] * count
    for _ in range(max(cap - count, 0)):
        if rng.integers(0, 2):
            degrees[int(rng.integers(0, count))] += 1
    return degrees


def _random_vector(rng, F: FinDimLie, degree: int) -> Vector:
    indices = F.indices_of_degree(degree)
    if not indices:
        return {}
    coeffs = [int(c) for c in rng.integers(-3, 4, size=len(indices))]
    if all(c == 0 for c in coeffs):
        coeffs[0] = 1
    return {idx: coerce(F.field, c) for idx, c in zip(indices, coeffs) if c}


def gamma_witness(S: SubdirectSum, fs: Sequence[Vector], target: int = 0) -> Dict[str, Any]:
    """
    Left-normed witness for gamma containment.

    For f_1..f_{k-1} in F_t, lift each f_j to a_j in L with coordinate f_j in
    factor t and 0 in the j-th other factor. Then [a_1, ..., a_{k-1}] has
    every coordinate 0 except in factor t, where it equals [f_1, ..., f_{k-1}].
    """
    if S.k < 2:
        raise SubdirectError("The witness construction needs at least two factors")
    if len(fs) != S.k - 1:
        raise SubdirectError(f"Need {S.k - 1} elements, got {len(fs)}")
    others = [i for i in range(S.k) if i != target]
    basis = S.span.basis
    lifts = []
    for f, other in zip(fs, others):
        pair = [target, other]
        projected = [{**{idx: v for idx, v in S.restrict(b, target).items()},
                      **{idx + S.factors[target].dim: v for idx, v in S.restrict(b, other).items()}}
                     for b in basis]
        coords = membership(projected, dict(f), S.factors[target].dim + S.factors[other].dim, S.field)
        if coords is None:
            return {"lifted": False, "passed": False, "failed_factor": other + 1}
        lifts.append(linear_combination(S.field, coords, basis))
    witness = lifts[0]
    expected = dict(fs[0])
    F = S.factors[target]
    for a, f in zip(lifts[1:], fs[1:]):
        witness = S.ambient.bracket(witness, a)
        expected = F.bracket(expected, f)
    lands = all(not S.restrict(witness, i) for i in others)
    equals = S.restrict(witness, target) == expected
    member = S.contains(witness)
    return {
        "lifted": True,
        "lands_in_factor": lands,
        "equals_bracket": equals,
        "member": member,
        "nonzero": bool(expected),
        "passed": lands and equals and member,
    }


def gamma_witness_sweep(S: SubdirectSum, trials: int, rng, target: int = 0) -> Dict[str, Any]:
    """Run gamma_witness on random homogeneous f's with total degree <= c."""
    F = S.factors[target]
    outcomes = []
    for _ in range(trials):
        degrees = _random_degrees(rng, S.k - 1, min(S.cls, F.max_degree() * (S.k - 1)))
        fs = [_random_vector(rng, F, d) for d in degrees]
        result = gamma_witness(S, fs, target)
        result["degrees"] = degrees
        outcomes.append(result)
    failures = [i for i, r in enumerate(outcomes) if not r["passed"]]
    return {
        "check": "witness",
        "subdirect": S.name,
        "class": S.cls,
        "trials": trials,
        "nonzero_witnesses": sum(1 for r in outcomes if r.get("nonzero")),
        "verdict": f"witness identity holds in {trials} trials" if not failures
        else f"witness fails in trial {failures[0] + 1}",
        "passed": not failures,
    }


# =============================================================================
# Fibre sums
# =============================================================================

@dataclass
class SplitData:
    """
    Data of L1 = <X u A0 | r_i - w_i, [a, x] - v_(a,x), z_j> over Q = <X | r_i>.
    """
    X: List[str]
    A0: List[str]
    relations: List[Tuple[Expr, Expr]]
    actions: Dict[Tuple[str, str], Expr] = dataclass_field(default_factory=dict)
    killers: List[Expr] = dataclass_field(default_factory=list)

    def b_elements(self) -> List[Expr]:
        return [_difference(r, w) for r, w in self.relations]

    def action_relators(self) -> List[Expr]:
        return [_difference(Bracket(Gen(a), Gen(x)), self.actions.get((a, x), ZERO_EXPR))
                for a in self.A0 for x in self.X]


def _difference(a: Expr, b: Expr) -> Expr:
    if b == ZERO_EXPR:
        return a
    return Combination(((Fraction(1), a), (Fraction(-1), b)))


@dataclass
class FibreSumSpec:
    """Two presented algebras with maps onto a common presented quotient."""
    name: str
    quotient: Presentation
    first: Presentation
    second: Presentation
    first_map: Dict[str, Optional[str]]
    second_map: Dict[str, Optional[str]]
    cls: int
    split: Optional[SplitData] = None

    @classmethod
    def from_maps(cls, name: str, quotient: Presentation, first: Presentation, second: Presentation,
                  mapping: Mapping[str, Optional[str]], c: int,
                  qualified: Optional[Mapping[Tuple[str, str], Optional[str]]] = None) -> "FibreSumSpec":
        """
        Resolve generator maps: qualified entries, then plain entries, then same-name
        quotient generators, otherwise 0.
        """
        qualified = qualified or {}

        def resolve(pres: Presentation) -> Dict[str, Optional[str]]:
            out = {}
            for g in pres.generators.names:
                if (pres.name, g) in qualified:
                    out[g] = qualified[(pres.name, g)]
                elif g in mapping:
                    out[g] = mapping[g]
                else:
                    out[g] = g if g in quotient.generators else None
                if out[g] is not None and out[g] not in quotient.generators:
                    raise MapsDisagreeError(f"{g} maps to {out[g]}, which is not a generator of {quotient.name}")
            return out

        return cls(name, quotient, first, second, resolve(first), resolve(second), c)

    @classmethod
    def from_split_data(cls, name: str, data: SplitData, c: int, field,
                        second: Optional[Presentation] = None) -> "FibreSumSpec":
        """L1 from split data, Q = <X | r_i>, L2 free on X unless given."""
        overlap = set(data.X) & set(data.A0)
        if overlap:
            raise MalformedPresentationError(f"X and A0 share names {sorted(overlap)}")
        relators = data.b_elements() + data.action_relators() + list(data.killers)
        first = Presentation(f"{name}.L1", data.X + data.A0, relators, field)
        quotient = Presentation(f"{name}.Q", data.X, [r for r, _ in data.relations], field)
        second = second or Presentation(f"{name}.L2", data.X, [], field)
        first_map = {g: (g if g in data.X else None) for g in first.generators.names}
        second_map = {g: (g if g in data.X else None) for g in second.generators.names}
        spec = cls(name, quotient, first, second, first_map, second_map, c, data)
        return spec

    def with_second(self, second: Presentation) -> "FibreSumSpec":
        second_map = {g: self.second_map.get(g, g if g in self.quotient.generators else None)
                      for g in second.generators.names}
        return FibreSumSpec(self.name, self.quotient, self.first, second, self.first_map,
                            second_map, self.cls, self.split)


def _map_to_quotient(nq: NilpotentQuotientResult, q_nq: NilpotentQuotientResult,
                     mapping: Mapping[str, Optional[str]]) -> LieHomomorphism:
    images = {g: q_nq.generator_images[q] for g, q in mapping.items() if q is not None}
    hom_free = homomorphism_from_generators(nq.free, q_nq.quotient, images)
    try:
        return induced_on_quotient(hom_free, nq.projection)
    except LieAlgebraError as e:
        raise MapsDisagreeError(
            f"Relators of {nq.presentation.name} do not vanish in {q_nq.presentation.name}"
        ) from e


@dataclass
class FibreSum:
    """Fibre sum P inside L1_c (+) L2_c with the maps onto Q_c."""
    spec: FibreSumSpec
    sum: SubdirectSum
    first: NilpotentQuotientResult
    second: NilpotentQuotientResult
    quotient: NilpotentQuotientResult
    pi1: LieHomomorphism
    pi2: LieHomomorphism
    lifts: Dict[str, Tuple[str, str]]


def fibre_sum(spec: FibreSumSpec, field=None) -> FibreSum:
    """
    Fibre sum {(h1, h2) : pi1(h1) = pi2(h2)} generated by explicit tuples.

    Generators: (lift1(q), lift2(q)) for every generator q of Q; (g - lift(q), 0)
    for the other generators over q and (g, 0) for generators over 0; Q's
    relators evaluated on the lifts, in each coordinate; symmetrically in the
    second coordinate.

    Raises:
        MapsDisagreeError: If a map is not a surjective homomorphism onto Q
    """
    c = spec.cls
    Qn = nilpotent_quotient(spec.quotient, c, field)
    N1 = nilpotent_quotient(spec.first, c, field)
    N2 = nilpotent_quotient(spec.second, c, field)
    pi1 = _map_to_quotient(N1, Qn, spec.first_map)
    pi2 = _map_to_quotient(N2, Qn, spec.second_map)
    lifts: Dict[str, Tuple[str, str]] = {}
    for q in spec.quotient.generators.names:
        pre1 = [g for g, t in spec.first_map.items() if t == q]
        pre2 = [g for g, t in spec.second_map.items() if t == q]
        if not pre1 or not pre2:
            raise MapsDisagreeError(f"Generator {q} of {spec.quotient.name} has no preimage in both factors")
        lifts[q] = (pre1[0], pre2[0])

    L1, L2 = N1.quotient, N2.quotient
    tuples: List[List[Vector]] = []
    for q, (g1, g2) in lifts.items():
        tuples.append([N1.generator_images[g1], N2.generator_images[g2]])
    for nq, mapping, slot in ((N1, spec.first_map, 0), (N2, spec.second_map, 1)):
        L = nq.quotient
        for g, q in mapping.items():
            image = nq.generator_images[g]
            if q is None:
                kernel_gen = image
            elif lifts[q][slot] == g:
                continue
            else:
                kernel_gen = L.add(image, L.scale(-1, nq.generator_images[lifts[q][slot]]))
            if kernel_gen:
                tuples.append([kernel_gen, {}] if slot == 0 else [{}, kernel_gen])
        binding = {q: nq.generator_images[lifts[q][slot]] for q in lifts}
        for rel in spec.quotient.relators:
            value = L.evaluate(rel, binding)
            if value:
                tuples.append([value, {}] if slot == 0 else [{}, value])
    S = SubdirectSum([L1, L2], tuples, c, name=spec.name)
    return FibreSum(spec, S, N1, N2, Qn, pi1, pi2, lifts)


def kernel_fibre(fs: FibreSum) -> Subspace:
    """{(h1, h2) : pi1(h1) = pi2(h2)} computed directly as a kernel."""
    S = fs.sum
    Q = fs.quotient.quotient
    entries: Dict[int, Vector] = {}
    for slot, pi in ((0, fs.pi1), (1, fs.pi2)):
        sign = Q.field.one if slot == 0 else -Q.field.one
        for i, image in enumerate(pi.images):
            col = S.offsets[slot] + i
            for k, val in image.items():
                entries.setdefault(k, {})[col] = sign * val
    matrix = SparseMatrix(Q.dim, S.ambient.dim, S.field, entries)
    return Subspace(S.ambient, kernel_basis(matrix))


def fibre_double_check(fs: FibreSum) -> Dict[str, Any]:
    """Compare the generator-built fibre sum with the kernel construction."""
    S = fs.sum
    direct = kernel_fibre(fs)
    got = S.profile()
    want = degree_profile(direct)
    equal = direct == S.span
    return {
        "check": "fibre",
        "fibre": fs.spec.name,
        "class": S.cls,
        "dim": S.span.dim,
        "per_degree": _profile_rows(got, want),
        "meet_first": intersect_factor(S, 0).dim,
        "meet_second": intersect_factor(S, 1).dim,
        "verdict": "generated and kernel constructions agree" if equal
        else f"constructions differ at degree {_first_deficient(got, want)}",
        "passed": equal,
    }


def claim1_reduction(spec: FibreSumSpec, field=None) -> Dict[str, Any]:
    """
    Compare P over a presented L2 with P0 / Ker(mu), where P0 uses the free
    cover F of L2 and mu = id (+) (F -> L2).
    """
    free_second = Presentation(f"{spec.second.name}.free", spec.second.generators.names, [],
                               spec.second.field)
    fs = fibre_sum(spec, field)
    fs0 = fibre_sum(spec.with_second(free_second), field)
    S, S0 = fs.sum, fs0.sum
    # Both covers are free_nilpotent on the same generators and class, so the
    # relator ideal of L2 moves into block 2 of P0 through the cover projection.
    cover = fs0.second.projection
    kernel = Subspace(S0.ambient, [S0.embed(1, cover.apply(v)) for v in fs.second.relator_ideal.basis])
    kernel_inside = kernel.is_subspace_of(S0.span)
    proj2 = fs.second.projection
    image_vectors = []
    for v in S0.span.basis:
        image_vectors.append(S.combine([S0.restrict(v, 0), proj2.apply(cover.lift(S0.restrict(v, 1)))]))
    image = Subspace(S.ambient, image_vectors)
    matches = image == S.span
    p0 = S0.profile()
    ker = degree_profile(kernel)
    predicted = {d: p0.get(d, 0) - ker.get(d, 0) for d in p0}
    got = S.profile()
    bad = _first_deficient(predicted, got)
    passed = kernel_inside and matches and bad is None
    return {
        "check": "claim1",
        "fibre": spec.name,
        "class": spec.cls,
        "dim_P": S.span.dim,
        "dim_P0": S0.span.dim,
        "dim_kernel": kernel.dim,
        "per_degree": _profile_rows(predicted, got),
        "kernel_inside_P0": kernel_inside,
        "image_is_P": matches,
        "verdict": "P = P0 / Ker(mu) degree by degree" if passed else "reduction fails",
        "passed": passed,
    }


# =============================================================================
# The presentation P-tilde and its kernel Delta
# =============================================================================

@dataclass
class TildePresentation:
    """<X u A0 | R2 u R3 u R4> with the elements b_i = r_i - w_i and the map delta."""
    spec: FibreSumSpec
    presentation: Presentation
    r2: List[Expr]
    r3: List[Expr]
    r4: List[Expr]
    b: List[Expr]
    delta: Dict[str, Tuple[Optional[str], Optional[str]]]

    def to_report(self) -> Dict[str, Any]:
        return {
            "check": "tilde-build",
            "fibre": self.spec.name,
            "R2": [expression_text(e) for e in self.r2],
            "R3": [expression_text(e) for e in self.r3],
            "R4": [expression_text(e) for e in self.r4],
            "b": [expression_text(e) for e in self.b],
        }


def build_tilde_presentation(spec: FibreSumSpec) -> TildePresentation:
    """
    Replace the relators r_i - w_i of L1 by [r_i - w_i, a_j] and keep R2, R3.

    Raises:
        MalformedPresentationError: If the fibre sum was not declared from split data
    """
    data = spec.split
    if data is None:
        raise MalformedPresentationError(f"{spec.name} was not declared from split data")
    b = data.b_elements()
    r2 = data.action_relators()
    r3 = list(data.killers)
    r4 = [Bracket(bi, Gen(a)) for bi in b for a in data.A0]
    pres = Presentation(f"{spec.name}.tilde", data.X + data.A0, r2 + r3 + r4, spec.first.field)
    delta: Dict[str, Tuple[Optional[str], Optional[str]]] = {x: (x, x) for x in data.X}
    delta.update({a: (a, None) for a in data.A0})
    return TildePresentation(spec, pres, r2, r3, r4, b, delta)


def _abelianization_profile(L: FinDimLie, I: Subspace) -> Dict[int, int]:
    whole = degree_profile(I)
    derived = degree_profile(bracket_subspaces(L, I, I))
    return {d: whole.get(d, 0) - derived.get(d, 0) for d in whole}


def verify_delta_abelian(tp: TildePresentation, c: Optional[int] = None, field=None) -> Dict[str, Any]:
    """
    Inside the class-c quotient T of P-tilde: A~ = ideal(A0), B~ = ideal(b_i).
    Checks delta kills the relators, [A~, B~] = 0, Delta = ker(delta) equals
    A~ meet B~ (both inclusions) and [Delta, Delta] = 0.
    """
    spec = tp.spec
    c = c or spec.cls
    if c != spec.cls:
        spec = FibreSumSpec(spec.name, spec.quotient, spec.first, spec.second, spec.first_map,
                            spec.second_map, c, spec.split)
    fs = fibre_sum(spec, field)
    S = fs.sum
    T = nilpotent_quotient(tp.presentation, c, field)
    Tq = T.quotient

    images = {}
    for g, (first, second) in tp.delta.items():
        vec: Vector = {}
        if first is not None:
            add_scaled(S.field, vec, S.embed(0, fs.first.generator_images[first]), S.field.one)
        if second is not None:
            add_scaled(S.field, vec, S.embed(1, fs.second.generator_images[second]), S.field.one)
        images[g] = vec
    delta_free = homomorphism_from_generators(T.free, S.ambient, images)
    relator_vectors = tp.presentation.relator_vectors(T.free)
    kills = all(not delta_free.apply(v) for v in relator_vectors)
    if not kills:
        return {
            "check": "tilde",
            "fibre": spec.name,
            "class": c,
            "delta_kills_relators": False,
            "verdict": "failed: delta_kills_relators",
            "passed": False,
        }
    delta = induced_on_quotient(delta_free, T.projection)

    Delta = delta.kernel()
    data = spec.split
    A_tilde = ideal_closure(Tq, [T.generator_images[a] for a in data.A0])
    b_vectors = [Tq.evaluate(e, T.generator_images) for e in tp.b]
    B_tilde = ideal_closure(Tq, b_vectors)
    commute = bracket_subspaces(Tq, A_tilde, B_tilde).is_zero()
    meet = intersect_subspaces(A_tilde, B_tilde)
    delta_in_meet = Delta.is_subspace_of(meet)
    meet_in_delta = meet.is_subspace_of(Delta)
    abelian = bracket_subspaces(Tq, Delta, Delta).is_zero()
    image_is_P = delta.image() == S.span

    L1 = fs.first.quotient
    A = ideal_closure(L1, [fs.first.generator_images[a] for a in data.A0])
    tilde_ab = _abelianization_profile(Tq, A_tilde)
    a_ab = _abelianization_profile(L1, A)
    abelianizations_match = ({d: n for d, n in tilde_ab.items() if n} == {d: n for d, n in a_ab.items() if n})

    passed = commute and delta_in_meet and meet_in_delta and abelian and image_is_P
    failed = [name for name, ok in (("image_is_fibre_sum", image_is_P), ("commute", commute),
                                    ("delta_in_meet", delta_in_meet), ("meet_in_delta", meet_in_delta),
                                    ("delta_abelian", abelian)) if not ok]
    logger.info(f"Delta checks for {spec.name} at class {c}: {'pass' if passed else failed}")
    return {
        "check": "tilde",
        "fibre": spec.name,
        "class": c,
        "dim_T": Tq.dim,
        "dim_A_tilde": A_tilde.dim,
        "dim_B_tilde": B_tilde.dim,
        "dim_Delta": Delta.dim,
        "delta_kills_relators": kills,
        "commute": commute,
        "delta_in_meet": delta_in_meet,
        "meet_in_delta": meet_in_delta,
        "delta_abelian": abelian,
        "image_is_fibre_sum": image_is_P,
        "abelianization_A_tilde": tilde_ab,
        "abelianization_A": a_ab,
        "abelianizations_match": abelianizations_match,
        "verdict": "pass" if passed else f"failed: {', '.join(failed)}",
        "passed": passed,
    }


def random_split_data(rng) -> SplitData:
    """
    Small random split data: X = {x, y}, |A0| <= 2, one or two relations.
    """
    X = ["x", "y"]
    A0 = ["a", "b"][:int(rng.integers(0, 3))]
    x, y = Gen("x"), Gen("y")
    xy = Bracket(x, y)
    candidates = [xy, Bracket(x, xy), Bracket(y, xy)]

    def small_combination(items: Sequence[Expr]) -> Expr:
        terms = []
        for item in items:
            coef = int(rng.integers(-2, 3))
            if coef:
                terms.append((Fraction(coef), item))
        return Combination(tuple(terms)) if terms else ZERO_EXPR

    a_terms: List[Expr] = [Gen(a) for a in A0]
    if len(A0) == 2:
        a_terms.append(Bracket(Gen(A0[0]), Gen(A0[1])))
    relations = []
    for idx in range(int(rng.integers(1, 3))):
        r = candidates[0] if idx == 0 else candidates[int(rng.integers(1, 3))]
        w = small_combination(a_terms)
        relations.append((r, w))
    actions = {}
    for a in A0:
        for g in X:
            v = small_combination([Gen(b) for b in A0])
            if v != ZERO_EXPR:
                actions[(a, g)] = v
    killers = []
    if len(A0) == 2 and rng.integers(0, 2):
        killers.append(Bracket(Gen(A0[0]), Gen(A0[1])))
    return SplitData(X, A0, relations, actions, killers)


def tilde_sweep(trials: int, rng, c: int, field) -> Dict[str, Any]:
    """verify_delta_abelian on random split specs."""
    outcomes = []
    for t in range(trials):
        data = random_split_data(rng)
        spec = FibreSumSpec.from_split_data(f"random{t + 1}", data, c, field)
        report = verify_delta_abelian(build_tilde_presentation(spec), c, field)
        outcomes.append({"trial": t + 1, "A0": len(data.A0), "dim_Delta": report["dim_Delta"],
                         "verdict": report["verdict"], "passed": report["passed"]})
    failures = [o["trial"] for o in outcomes if not o["passed"]]
    return {
        "check": "tilde-sweep",
        "class": c,
        "trials": trials,
        "results": outcomes,
        "verdict": f"all {trials} random specs pass" if not failures else f"trial {failures[0]} fails",
        "passed": not failures,
    }


# =============================================================================
# Split fibre sums
# =============================================================================

def split_fibre(B: FinDimLie, Q: FinDimLie, action: Sequence[SparseMatrix],
                L1: FinDimLie, pi: LieHomomorphism) -> Dict[str, Any]:
    """
    P = B x| L1 with L1 acting through pi : L1 -> Q.

    Verifies that L1 embeds with ker(pi) mapped identically, that B is an
    ideal with P/B isomorphic to L1, and that (b, l) -> (l, b + pi(l)) embeds
    P in L1 (+) (B x| Q) as the fibre sum.
    """
    if pi.source is not L1 or pi.target is not Q:
        raise SubdirectError("pi must map L1 to Q")
    if pi.find_bracket_violation() is not None:
        raise SubdirectError(f"The map {L1.name} -> {Q.name} is not a homomorphism")
    if pi.image().dim != Q.dim:
        raise MapsDisagreeError(f"The map {L1.name} -> {Q.name} is not surjective")

    pulled = []
    for l in range(L1.dim):
        entries: Dict[int, Vector] = {}
        for q, coef in pi.images[l].items():
            for i, row in action[q].entries.items():
                target = entries.setdefault(i, {})
                add_scaled(B.field, target, row, coef)
        pulled.append(SparseMatrix(B.dim, B.dim, B.field, entries))
    P = semidirect_sum(B, L1, pulled, name=f"{B.name}x|{L1.name}")
    L2 = semidirect_sum(B, Q, action, name=f"{B.name}x|{Q.name}")

    offset = B.dim
    embeds = all(P.bracket_basis(i + offset, j + offset) ==
                 {k + offset: v for k, v in L1.bracket_basis(i, j).items()}
                 for i, j in combinations(range(L1.dim), 2))
    kernel_dim = pi.kernel().dim
    B_block = Subspace(P, [P.basis_vector(i) for i in range(B.dim)])
    b_ideal = ideal_closure(P, B_block.basis) == B_block
    quotient, _ = quotient_algebra(P, B_block)
    quotient_matches = quotient.dim == L1.dim and all(
        quotient.bracket_basis(i, j) == L1.bracket_basis(i, j)
        for i, j in combinations(range(L1.dim), 2)
    )

    fibre_ambient = direct_sum_all([L1, L2], name="L1+L2")
    images = []
    for i in range(B.dim):
        images.append({L1.dim + i: B.field.one})
    for l in range(L1.dim):
        vec = {l: B.field.one}
        for q, coef in pi.images[l].items():
            vec[L1.dim + B.dim + q] = coef
        images.append(vec)
    theta = LieHomomorphism(P, fibre_ambient, images)
    theta_hom = theta.find_bracket_violation() is None
    theta_injective = theta.kernel().is_zero()
    # pi1(h1) = pi2(h2): pi on the L1 block, projection on the Q block of L2.
    entries: Dict[int, Vector] = {}
    for l in range(L1.dim):
        for q, coef in pi.images[l].items():
            entries.setdefault(q, {})[l] = coef
    for q in range(Q.dim):
        entries.setdefault(q, {})[L1.dim + B.dim + q] = -B.field.one
    fibre = Subspace(fibre_ambient, kernel_basis(SparseMatrix(Q.dim, fibre_ambient.dim, B.field, entries)))
    image_is_fibre = theta.image() == fibre

    passed = embeds and b_ideal and quotient_matches and theta_hom and theta_injective and image_is_fibre
    return {
        "check": "split",
        "algebra": P.name,
        "dim_P": P.dim,
        "dim_kernel_of_pi": kernel_dim,
        "L1_embeds": embeds,
        "B_is_ideal": b_ideal,
        "quotient_is_L1": quotient_matches,
        "fibre_embedding": theta_hom and theta_injective,
        "image_is_fibre_sum": image_is_fibre,
        "verdict": "pass" if passed else "split construction fails",
        "passed": passed,
    }


# Command-line testing interface
if __name__ == "__main__":
    import sys

    if "--test" in sys.argv:
        from modules.findim_lie import free_nilpotent

        print("Testing Subdirect Sum Module...")
        print("-" * 50)

        F = free_nilpotent(2, 3)
        x, y = F.basis_vector(0), F.basis_vector(1)
        diagonal = build_subdirect([F, F], [[x, x], [y, y]], 3, name="D")
        print(f"  diagonal: {project(diagonal, [1, 2])['verdict']}")

        print("-" * 50)
        print("[SUCCESS] All tests passed!")
    else:
        print("Usage: python3 -m modules.subdirect --test")
