"""
Script Parser Module

Parser for the line-oriented .lie input format. A script is a sequence of
declarations (field, truncation class, free algebras, presentations,
finite-dimensional algebras, subdirect sums, fibre sums) followed by check
directives. Everything after '#' on a line is a comment. Braces and angle
brackets may span several lines.

The grammar is written with pyparsing. Every declaration records its source
line so that runtime errors can point back into the script, and every
declaration prints back to text that parses to the same tree.

No emojis or unicode characters in this file.
"""

import logging
import re
from dataclasses import dataclass, field as dataclass_field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple, Union

import pyparsing as pp

from modules.error_handler import LiefError
from modules.free_lie import Bracket, Combination, Expr, Gen, ZERO_EXPR, expression_names, expression_text

# Set up logging
logger = logging.getLogger(__name__)

pp.ParserElement.enable_packrat()


class ScriptError(LiefError):
    """Custom exception for script errors."""

    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None):
        self.line = line
        self.column = column
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(f"{message}{where}")


class ScriptSyntaxError(ScriptError):
    """Raised when the script text does not match the grammar."""
    pass


class UndeclaredNameError(ScriptError):
    """Raised when a name is used before it is declared."""
    pass


class DuplicateNameError(ScriptError):
    """Raised when a name is declared twice."""
    pass


# =============================================================================
# Script tree
# =============================================================================

@dataclass
class FieldDecl:
    label: str
    prime: Optional[int] = None
    line: int = dataclass_field(default=0, compare=False)

    @property
    def spec(self) -> str:
        return "Q" if self.label == "Q" else f"Fp:{self.prime}"

    def to_text(self) -> str:
        return "field Q" if self.label == "Q" else f"field Fp {self.prime}"


@dataclass
class ClassDecl:
    cls: int
    line: int = dataclass_field(default=0, compare=False)

    def to_text(self) -> str:
        return f"class {self.cls}"


@dataclass
class FreeDecl:
    name: str
    generators: List[str]
    line: int = dataclass_field(default=0, compare=False)

    def to_text(self) -> str:
        return f"free {self.name} = free({', '.join(self.generators)})"


@dataclass
class PresentDecl:
    name: str
    generators: List[str]
    relators: List[Expr]
    gamma: List[int] = dataclass_field(default_factory=list)
    line: int = dataclass_field(default=0, compare=False)

    def to_text(self) -> str:
        items = [expression_text(r) for r in self.relators] + [f"gamma {n}" for n in self.gamma]
        return f"present {self.name} = <{', '.join(self.generators)} | {', '.join(items)}>"


@dataclass
class AlgebraDecl:
    """
    kind is one of constants, abelian, nilpotent, heisenberg, quotient, sum, semidirect.

    For constants, basis holds (name, degree or None) and brackets holds
    (left, right, value). For semidirect, brackets holds [q, b] = value.
    """
    name: str
    kind: str
    args: List[Union[str, int]] = dataclass_field(default_factory=list)
    basis: List[Tuple[str, Optional[int]]] = dataclass_field(default_factory=list)
    brackets: List[Tuple[str, str, Expr]] = dataclass_field(default_factory=list)
    line: int = dataclass_field(default=0, compare=False)

    def to_text(self) -> str:
        if self.kind == "heisenberg":
            head = "heisenberg"
        elif self.kind == "constants":
            cells = [n if d is None else f"{n}:{d}" for n, d in self.basis]
            head = f"constants({', '.join(cells)})"
        else:
            head = f"{self.kind}({', '.join(str(a) for a in self.args)})"
        if self.kind in ("constants", "semidirect"):
            body = ", ".join(f"[{a},{b}] = {expression_text(v)}" for a, b, v in self.brackets)
            return f"algebra {self.name} = {head} {{ {body} }}"
        return f"algebra {self.name} = {head}"


@dataclass
class SubdirectDecl:
    name: str
    factors: List[str]
    generators: List[List[Expr]]
    line: int = dataclass_field(default=0, compare=False)

    def to_text(self) -> str:
        tuples = ", ".join("(" + ", ".join(expression_text(e) for e in t) + ")" for t in self.generators)
        return f"subdirect {self.name} in {' + '.join(self.factors)} gens {{ {tuples} }}"


@dataclass
class FibreDecl:
    """Either a pullback of two declared presentations or split data."""
    name: str
    kind: str
    first: Optional[str] = None
    second: Optional[str] = None
    quotient: Optional[str] = None
    mapping: List[Tuple[str, Optional[str]]] = dataclass_field(default_factory=list)
    X: List[str] = dataclass_field(default_factory=list)
    A0: List[str] = dataclass_field(default_factory=list)
    relations: List[Tuple[Expr, Expr]] = dataclass_field(default_factory=list)
    actions: List[Tuple[str, str, Expr]] = dataclass_field(default_factory=list)
    killers: List[Expr] = dataclass_field(default_factory=list)
    line: int = dataclass_field(default=0, compare=False)

    def to_text(self) -> str:
        if self.kind == "pullback":
            head = f"fibre {self.name} = pullback({self.first} -> {self.quotient}, {self.second} -> {self.quotient})"
            if not self.mapping:
                return head
            body = ", ".join(f"{a} -> {b if b is not None else 0}" for a, b in self.mapping)
            return f"{head} map {{ {body} }}"
        rels = ", ".join(f"{expression_text(r)} = {expression_text(w)}" for r, w in self.relations)
        acts = ", ".join(f"[{a},{x}] = {expression_text(v)}" for a, x, v in self.actions)
        kills = ", ".join(expression_text(z) for z in self.killers)
        return (f"fibre {self.name} = split<{', '.join(self.X)} ; {', '.join(self.A0)} | "
                f"{rels} ; {acts} ; {kills}>")


@dataclass
class MapBlock:
    """name -> expression pairs inside map { ... }."""
    entries: List[Tuple[str, Expr]]

    def to_text(self) -> str:
        return "map { " + ", ".join(f"{a} -> {expression_text(e)}" for a, e in self.entries) + " }"


@dataclass
class ExprTuple:
    items: List[Expr]

    def to_text(self) -> str:
        return "(" + ", ".join(expression_text(e) for e in self.items) + ")"


CheckArg = Union[str, int, ExprTuple, MapBlock]


@dataclass
class CheckDecl:
    directive: str
    args: List[CheckArg] = dataclass_field(default_factory=list)
    options: Dict[str, Union[int, str, List[int]]] = dataclass_field(default_factory=dict)
    line: int = dataclass_field(default=0, compare=False)
    column: int = dataclass_field(default=1, compare=False)

    def to_text(self) -> str:
        parts = ["check", self.directive]
        for arg in self.args:
            parts.append(arg.to_text() if isinstance(arg, (ExprTuple, MapBlock)) else str(arg))
        for key, value in self.options.items():
            if isinstance(value, list):
                value = "[" + ",".join(str(v) for v in value) + "]"
            parts.append(f"{key}={value}")
        return " ".join(parts)

    @property
    def names(self) -> List[str]:
        return [a for a in self.args if isinstance(a, str)]

    @property
    def integers(self) -> List[int]:
        return [a for a in self.args if isinstance(a, int)]


Declaration = Union[FieldDecl, ClassDecl, FreeDecl, PresentDecl, AlgebraDecl, SubdirectDecl, FibreDecl, CheckDecl]


@dataclass
class Script:
    """Ordered declarations of a .lie script."""
    declarations: List[Declaration]
    source: str = dataclass_field(default="", compare=False)

    @property
    def field(self) -> Optional[FieldDecl]:
        return next((d for d in self.declarations if isinstance(d, FieldDecl)), None)

    @property
    def cls(self) -> Optional[int]:
        decl = next((d for d in self.declarations if isinstance(d, ClassDecl)), None)
        return decl.cls if decl else None

    @property
    def checks(self) -> List[CheckDecl]:
        return [d for d in self.declarations if isinstance(d, CheckDecl)]

    def named(self) -> Dict[str, Declaration]:
        return {d.name: d for d in self.declarations if hasattr(d, "name")}

    def to_text(self) -> str:
        return "\n".join(d.to_text() for d in self.declarations) + "\n"


# =============================================================================
# Grammar
# =============================================================================

@dataclass
class _Term:
    coef: Fraction
    expr: Expr


def _suppress(chars: str) -> List[pp.ParserElement]:
    return [pp.Suppress(c) for c in chars]


LBRACK, RBRACK, LPAR, RPAR, COMMA, LBRACE, RBRACE, LANGLE, RANGLE, EQUALS, SEMI, COLON, BAR = _suppress("[](),{}<>=;:|")
ARROW = pp.Suppress("->")

IDENT = pp.Regex(r"[A-Za-z_][A-Za-z0-9_]*(\.[A-Za-z_][A-Za-z0-9_]*)?")
SIMPLE_IDENT = pp.Regex(r"[A-Za-z_][A-Za-z0-9_]*")
INTEGER = pp.Regex(r"\d+").set_parse_action(lambda t: int(t[0]))
RATIONAL = pp.Regex(r"\d+(/\d+)?").set_parse_action(lambda t: Fraction(t[0]))


def _comma_list(item: pp.ParserElement) -> pp.ParserElement:
    return item + pp.ZeroOrMore(COMMA + item)


def _optional_list(item: pp.ParserElement) -> pp.ParserElement:
    return pp.Optional(_comma_list(item))


def _combine_terms(tokens) -> Expr:
    terms = []
    sign = 1
    for tok in tokens:
        if tok == "-":
            sign = -1
        elif tok == "+":
            sign = 1
        else:
            terms.append((sign * tok.coef, tok.expr))
            sign = 1
    if len(terms) == 1 and terms[0][0] == 1:
        return terms[0][1]
    return Combination(tuple(terms))


def _build_term(tokens) -> _Term:
    if len(tokens) == 2:
        return _Term(tokens[0], tokens[1])
    return _Term(Fraction(1), tokens[0])


EXPR = pp.Forward()
_zero = pp.Regex(r"0(?![0-9/*])").set_parse_action(lambda: ZERO_EXPR)
_generator = IDENT.copy().set_parse_action(lambda t: Gen(t[0]))
_bracket = (LBRACK + EXPR + COMMA + EXPR + RBRACK).set_parse_action(lambda t: Bracket(t[0], t[1]))
_group = LPAR + EXPR + RPAR
_atom = _bracket | _group | _zero | _generator
_term = (pp.Optional(RATIONAL + pp.Suppress("*")) + _atom).set_parse_action(_build_term)
_sign = pp.one_of("+ -")
EXPR <<= (pp.Optional(_sign) + _term + pp.ZeroOrMore(_sign + _term)).set_parse_action(_combine_terms)
EXPR.set_name("expression")


def _kw(word: str) -> pp.ParserElement:
    return pp.Suppress(pp.Keyword(word))


# field Q | field Fp <p> | field Fp:<p>
FIELD_DECL = (_kw("field") + (pp.Keyword("Q") | (pp.Keyword("Fp") + pp.Optional(COLON) + INTEGER))).set_parse_action(
    lambda t: FieldDecl("Q") if t[0] == "Q" else FieldDecl("Fp", t[1])
)

CLASS_DECL = (_kw("class") + INTEGER).set_parse_action(lambda t: ClassDecl(t[0]))

FREE_DECL = (_kw("free") + SIMPLE_IDENT + EQUALS + _kw("free") + LPAR + pp.Group(_comma_list(SIMPLE_IDENT)) + RPAR
             ).set_parse_action(lambda t: FreeDecl(t[0], list(t[1])))


def _build_present(t) -> PresentDecl:
    relators, gamma = [], []
    for item in t[2]:
        if isinstance(item, int):
            gamma.append(item)
        else:
            relators.append(item)
    return PresentDecl(t[0], list(t[1]), relators, gamma)


_gamma_item = _kw("gamma") + INTEGER
_relator_item = _gamma_item | EXPR
PRESENT_DECL = (_kw("present") + SIMPLE_IDENT + EQUALS + LANGLE + pp.Group(_comma_list(SIMPLE_IDENT))
                + pp.Group(pp.Optional(BAR + _optional_list(_relator_item))) + RANGLE
                ).set_parse_action(_build_present)

_basis_cell = pp.Group(SIMPLE_IDENT + pp.Optional(COLON + INTEGER))
_table_entry = pp.Group(LBRACK + SIMPLE_IDENT + COMMA + SIMPLE_IDENT + RBRACK + EQUALS + EXPR)
_table_sep = COMMA | SEMI
_table = LBRACE + pp.Group(pp.Optional(_table_entry + pp.ZeroOrMore(pp.Optional(_table_sep) + _table_entry))
                           + pp.Optional(_table_sep)) + RBRACE


def _build_constants(t) -> AlgebraDecl:
    basis = [(cell[0], cell[1] if len(cell) > 1 else None) for cell in t[1]]
    brackets = [(e[0], e[1], e[2]) for e in t[2]]
    return AlgebraDecl(t[0], "constants", [], basis, brackets)


_constants = (_kw("constants") + pp.Group(pp.Optional(LPAR + _optional_list(_basis_cell) + RPAR)) + _table)
_name_arg = SIMPLE_IDENT | INTEGER
_simple_kind = pp.one_of("abelian nilpotent quotient sum", as_keyword=True) + LPAR + pp.Group(_comma_list(_name_arg)) + RPAR
_semidirect = pp.Keyword("semidirect") + LPAR + pp.Group(_comma_list(SIMPLE_IDENT)) + RPAR + _table

ALGEBRA_DECL = (
    (_kw("algebra") + SIMPLE_IDENT + EQUALS + _constants).set_parse_action(_build_constants)
    | (_kw("algebra") + SIMPLE_IDENT + EQUALS + _semidirect).set_parse_action(
        lambda t: AlgebraDecl(t[0], "semidirect", list(t[2]), [], [(e[0], e[1], e[2]) for e in t[3]]))
    | (_kw("algebra") + SIMPLE_IDENT + EQUALS + _simple_kind).set_parse_action(
        lambda t: AlgebraDecl(t[0], t[1], list(t[2])))
    | (_kw("algebra") + SIMPLE_IDENT + EQUALS + pp.Keyword("heisenberg")).set_parse_action(
        lambda t: AlgebraDecl(t[0], "heisenberg"))
)

_expr_tuple = (LPAR + _comma_list(EXPR) + RPAR).set_parse_action(lambda t: ExprTuple(list(t)))
SUBDIRECT_DECL = (_kw("subdirect") + SIMPLE_IDENT + _kw("in") + pp.Group(SIMPLE_IDENT + pp.ZeroOrMore(pp.Suppress("+") + SIMPLE_IDENT))
                  + _kw("gens") + LBRACE + pp.Group(_optional_list(_expr_tuple)) + RBRACE
                  ).set_parse_action(lambda t: SubdirectDecl(t[0], list(t[1]), [tup.items for tup in t[2]]))

_map_target = _zero.copy().set_parse_action(lambda: "0") | IDENT
_map_entry = pp.Group(IDENT + ARROW + _map_target)


def _build_pullback(t) -> FibreDecl:
    name, first, q1, second, q2 = t[0], t[1], t[2], t[3], t[4]
    if q1 != q2:
        raise pp.ParseFatalException("", 0, f"both maps of {name} must target the same quotient")
    mapping = [(e[0], None if e[1] == "0" else e[1]) for e in (t[5] if len(t) > 5 else [])]
    return FibreDecl(name, "pullback", first=first, second=second, quotient=q1, mapping=mapping)


_pullback = (_kw("pullback") + LPAR + SIMPLE_IDENT + ARROW + SIMPLE_IDENT + COMMA + SIMPLE_IDENT + ARROW
             + SIMPLE_IDENT + RPAR + pp.Optional(_kw("map") + LBRACE + pp.Group(_optional_list(_map_entry)) + RBRACE))
_relation = pp.Group(EXPR + EQUALS + EXPR)
_action = pp.Group(LBRACK + SIMPLE_IDENT + COMMA + SIMPLE_IDENT + RBRACK + EQUALS + EXPR)


def _build_split(t) -> FibreDecl:
    return FibreDecl(t[0], "split", X=list(t[1]), A0=list(t[2]),
                     relations=[(r[0], r[1]) for r in t[3]],
                     actions=[(a[0], a[1], a[2]) for a in t[4]],
                     killers=list(t[5]))


_split = (_kw("split") + LANGLE + pp.Group(_comma_list(SIMPLE_IDENT)) + SEMI + pp.Group(_optional_list(SIMPLE_IDENT))
          + BAR + pp.Group(_optional_list(_relation)) + SEMI + pp.Group(_optional_list(_action)) + SEMI
          + pp.Group(_optional_list(EXPR)) + RANGLE)

FIBRE_DECL = (
    (_kw("fibre") + SIMPLE_IDENT + EQUALS + _pullback).set_parse_action(_build_pullback)
    | (_kw("fibre") + SIMPLE_IDENT + EQUALS + _split).set_parse_action(_build_split)
)

_check_map = (_kw("map") + LBRACE + pp.Group(_optional_list(pp.Group(IDENT + ARROW + EXPR))) + RBRACE
              ).set_parse_action(lambda t: MapBlock([(e[0], e[1]) for e in t[0]]))
_int_list = (LBRACK + _comma_list(INTEGER) + RBRACK).set_parse_action(lambda t: [list(t)])
_option = pp.Group(SIMPLE_IDENT + EQUALS + (_int_list | INTEGER | SIMPLE_IDENT))
_check_arg = _check_map | _expr_tuple | INTEGER | SIMPLE_IDENT


def _build_check(t) -> CheckDecl:
    options = {}
    for opt in t[2]:
        value = opt[1]
        options[opt[0]] = list(value) if isinstance(value, (list, pp.ParseResults)) else value
    return CheckDecl(t[0], list(t[1]), options)


DIRECTIVE = pp.Regex(r"[a-z][a-z0-9-]*")
CHECK_DECL = (_kw("check") + DIRECTIVE + pp.Group(pp.ZeroOrMore(~_option + _check_arg))
              + pp.Group(pp.ZeroOrMore(_option))).set_parse_action(_build_check)

STATEMENT = FIELD_DECL | CLASS_DECL | FREE_DECL | PRESENT_DECL | ALGEBRA_DECL | SUBDIRECT_DECL | FIBRE_DECL | CHECK_DECL


# =============================================================================
# Parsing
# =============================================================================

def _open_depth(text: str) -> int:
    stripped = text.replace("->", "")
    return (stripped.count("{") - stripped.count("}")) + (stripped.count("<") - stripped.count(">"))


def split_statements(text: str) -> List[Tuple[int, str]]:
    """
    Group source lines into statements.

    Returns:
        (first line number, statement text) pairs; comments and blank lines dropped
    """
    statements = []
    buffer: List[str] = []
    start = 0
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not buffer:
            if not line.strip():
                continue
            start = number
        buffer.append(line)
        if _open_depth("\n".join(buffer)) <= 0:
            statements.append((start, "\n".join(buffer)))
            buffer = []
    if buffer:
        statements.append((start, "\n".join(buffer)))
    return statements


def parse_expression(text: str) -> Expr:
    """
    Parse a bracket expression.

    Raises:
        ScriptSyntaxError: With the column of the first unexpected character
    """
    try:
        return EXPR.parse_string(text, parse_all=True)[0]
    except pp.ParseBaseException as e:
        raise ScriptSyntaxError(f"Invalid expression: {e.msg}", e.lineno, e.col) from e


def _parse_statement(start: int, text: str) -> Declaration:
    try:
        decl = STATEMENT.parse_string(text, parse_all=True)[0]
    except pp.ParseBaseException as e:
        line = start + e.lineno - 1
        raise ScriptSyntaxError(f"Cannot parse statement: {e.msg}", line, e.col) from e
    decl.line = start
    return decl


def _declared_kinds(decl: Declaration) -> Optional[str]:
    for kind, cls in (("free", FreeDecl), ("presentation", PresentDecl), ("algebra", AlgebraDecl),
                      ("subdirect", SubdirectDecl), ("fibre", FibreDecl)):
        if isinstance(decl, cls):
            return kind
    return None


def _referenced_names(decl: Declaration) -> List[str]:
    if isinstance(decl, AlgebraDecl):
        return [a for a in decl.args if isinstance(a, str)]
    if isinstance(decl, SubdirectDecl):
        return list(decl.factors)
    if isinstance(decl, FibreDecl) and decl.kind == "pullback":
        return [decl.first, decl.second, decl.quotient]
    if isinstance(decl, CheckDecl):
        return decl.names
    return []


def _check_relator_names(decl: PresentDecl) -> None:
    known = set(decl.generators)
    for rel in decl.relators:
        unknown = [n for n in expression_names(rel) if n not in known]
        if unknown:
            raise UndeclaredNameError(f"Relator of {decl.name} uses undeclared generator '{unknown[0]}'", decl.line, 1)


def parse_script(text: str) -> Script:
    """
    Parse a complete .lie script.

    Raises:
        ScriptSyntaxError: On the first statement that does not parse, or a repeated field/class
        UndeclaredNameError: When a name is used before its declaration
        DuplicateNameError: When a name is declared twice
    """
    declarations: List[Declaration] = []
    declared: Dict[str, int] = {}
    seen_field = seen_class = False
    for start, statement in split_statements(text):
        decl = _parse_statement(start, statement)
        if isinstance(decl, FieldDecl):
            if seen_field:
                raise ScriptSyntaxError("Only one field declaration is allowed", start, 1)
            seen_field = True
        if isinstance(decl, ClassDecl):
            if seen_class:
                raise ScriptSyntaxError("Only one class declaration is allowed", start, 1)
            if decl.cls < 1:
                raise ScriptSyntaxError("The class must be at least 1", start, 1)
            seen_class = True
        for name in _referenced_names(decl):
            if name not in declared:
                raise UndeclaredNameError(f"'{name}' is used before it is declared", start, 1)
        if isinstance(decl, PresentDecl):
            _check_relator_names(decl)
        if _declared_kinds(decl) is not None:
            if decl.name in declared:
                raise DuplicateNameError(
                    f"'{decl.name}' is already declared on line {declared[decl.name]}", start, 1
                )
            declared[decl.name] = start
        declarations.append(decl)
    logger.debug(f"Parsed {len(declarations)} declarations")
    return Script(declarations, source=text)


def parse_file(path) -> Script:
    with open(path, "r", encoding="utf-8") as f:
        return parse_script(f.read())


def field_from_text(text: str) -> Tuple[str, Optional[int]]:
    """'Q' or 'Fp:<p>' (also 'Fp <p>') to (label, prime)."""
    match = re.fullmatch(r"\s*(Q|Fp)(?:\s*[: ]\s*(\d+))?\s*", text)
    if not match or (match.group(1) == "Fp" and match.group(2) is None):
        raise ScriptSyntaxError(f"Unknown field '{text}' (expected Q or Fp:<p>)")
    return match.group(1), int(match.group(2)) if match.group(2) else None


# Command-line testing interface
if __name__ == "__main__":
    import sys

    if "--test" in sys.argv:
        print("Testing Script Parser Module...")
        print("-" * 50)

        script = parse_script("field Q\nclass 3\npresent L = <x, y | [x,[x,y]]>\ncheck nq L\n")
        print(script.to_text())
        assert parse_script(script.to_text()) == script

        print("-" * 50)
        print("[SUCCESS] All tests passed!")
    else:
        print("Usage: python3 -m modules.script_parser --test")
