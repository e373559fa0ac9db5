"""The ``.coh`` text format: ring presentations, space builders, let bindings and eval statements.

A program is a sequence of sections. A ``space`` statement opens a section on a
built-in ring; ``gen`` opens a custom section (or extends the open one while it
has not been evaluated in). ``rel``, ``top`` and ``integral`` complete the
custom ring; ``let`` and ``eval`` compute in the section's ring.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Any, Callable, Union

from lark import Lark, Transformer, v_args
from lark.exceptions import UnexpectedInput, VisitError

from .artifacts import format_rational
from .errors import (
    CohocalcError,
    DegreeMismatch,
    DslError,
    DslEvalError,
    DslSyntaxError,
    UnknownIdentifier,
)
from .grr_lambda import lambda_closed, lambda_grr
from .mukai_k import CurveKClass, MukaiVector, bb_pairing, chi_k3, curve_chi, mukai_pairing, restrict_to_curve
from .report import Report, format_value
from .ring_core import Element, Generator, Monomial, RewriteRule, RingPresentation, coeff_of_monomial, integrate, make_ring, transfer
from .spaces import (
    SpaceRing,
    abelian_ring,
    curve_even_ring,
    jac_x_curve_ring,
    point_ring,
    sm_alpha_ring,
    wbar_ring,
)
from .verlinde import bernoulli, theta_top_rank2

logger = logging.getLogger(__name__)

GRAMMAR = r"""
start: stmt*

?stmt: gen_stmt
     | rel_stmt
     | top_stmt
     | integral_stmt
     | space_stmt
     | let_stmt
     | eval_stmt

gen_stmt: "gen" NAME ":" INT ";"
rel_stmt: "rel" monomial "=" poly ";"
top_stmt: "top" INT ";"
integral_stmt: "integral" monomial "=" rational ";"
space_stmt: "space" NAME "(" [arglist] ")" ";"
let_stmt: "let" NAME "=" poly ";"
eval_stmt: "eval" eval_kind "(" poly ")" ";"

eval_kind: "integrate"                -> integrate_kind
         | "normal"                   -> normal_kind
         | "coeff" "[" monomial "]"   -> coeff_kind

monomial: mono_factor ("*" mono_factor)*
        | INT                         -> unit_monomial
mono_factor: NAME ("^" INT)?

?poly: term
     | "-" term                       -> neg
     | "+" term
     | poly "+" term                  -> add
     | poly "-" term                  -> sub

?term: factor
     | term "*" factor                -> mul

?factor: atom
       | atom "^" INT                 -> power

?atom: NAME                           -> var
     | rational
     | NAME "(" [arglist] ")"         -> call
     | "(" poly ")"

rational: INT ("/" INT)?

arglist: poly ("," poly)* tail?
tail: ";" poly

NAME: /[A-Za-z_][A-Za-z0-9_]*/
INT: /[0-9]+/
COMMENT: /#[^\n]*/

%import common.WS
%ignore WS
%ignore COMMENT
"""


# syntax tree


@dataclass(frozen=True)
class Num:
    value: Fraction
    line: int | None = field(default=None, compare=False)
    col: int | None = field(default=None, compare=False)


@dataclass(frozen=True)
class Var:
    name: str
    line: int | None = field(default=None, compare=False)
    col: int | None = field(default=None, compare=False)


@dataclass(frozen=True)
class Neg:
    operand: "Expr"
    line: int | None = field(default=None, compare=False)
    col: int | None = field(default=None, compare=False)


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"
    line: int | None = field(default=None, compare=False)
    col: int | None = field(default=None, compare=False)


@dataclass(frozen=True)
class Pow:
    base: "Expr"
    exponent: int
    line: int | None = field(default=None, compare=False)
    col: int | None = field(default=None, compare=False)


@dataclass(frozen=True)
class Call:
    name: str
    args: tuple["Expr", ...]
    h2: "Expr | None" = None
    line: int | None = field(default=None, compare=False)
    col: int | None = field(default=None, compare=False)


Expr = Union[Num, Var, Neg, BinOp, Pow, Call]


@dataclass(frozen=True)
class GenStmt:
    name: str
    degree: int
    line: int | None = field(default=None, compare=False)
    col: int | None = field(default=None, compare=False)


@dataclass(frozen=True)
class RelStmt:
    lhs: Monomial
    rhs: Expr
    line: int | None = field(default=None, compare=False)
    col: int | None = field(default=None, compare=False)


@dataclass(frozen=True)
class TopStmt:
    degree: int
    line: int | None = field(default=None, compare=False)
    col: int | None = field(default=None, compare=False)


@dataclass(frozen=True)
class IntegralStmt:
    monomial: Monomial
    value: Fraction
    line: int | None = field(default=None, compare=False)
    col: int | None = field(default=None, compare=False)


@dataclass(frozen=True)
class SpaceStmt:
    name: str
    args: tuple[Expr, ...]
    line: int | None = field(default=None, compare=False)
    col: int | None = field(default=None, compare=False)


@dataclass(frozen=True)
class LetStmt:
    name: str
    expr: Expr
    line: int | None = field(default=None, compare=False)
    col: int | None = field(default=None, compare=False)


@dataclass(frozen=True)
class EvalStmt:
    kind: str
    expr: Expr
    monomial: Monomial | None = None
    line: int | None = field(default=None, compare=False)
    col: int | None = field(default=None, compare=False)


Statement = Union[GenStmt, RelStmt, TopStmt, IntegralStmt, SpaceStmt, LetStmt, EvalStmt]


@dataclass(frozen=True)
class DslProgram:
    statements: tuple[Statement, ...] = ()

    def of_type(self, kind: type) -> list[Any]:
        return [stmt for stmt in self.statements if isinstance(stmt, kind)]

    @property
    def gens(self) -> list[GenStmt]:
        return self.of_type(GenStmt)

    @property
    def rels(self) -> list[RelStmt]:
        return self.of_type(RelStmt)

    @property
    def integrals(self) -> list[IntegralStmt]:
        return self.of_type(IntegralStmt)

    @property
    def evals(self) -> list[EvalStmt]:
        return self.of_type(EvalStmt)


class _Tail:
    def __init__(self, expr: Expr):
        self.expr = expr


@v_args(meta=True)
class _AstBuilder(Transformer):
    def start(self, meta, children):
        return DslProgram(tuple(children))

    def gen_stmt(self, meta, children):
        name, degree = children
        return GenStmt(str(name), int(degree), meta.line, meta.column)

    def rel_stmt(self, meta, children):
        lhs, rhs = children
        return RelStmt(lhs, rhs, meta.line, meta.column)

    def top_stmt(self, meta, children):
        return TopStmt(int(children[0]), meta.line, meta.column)

    def integral_stmt(self, meta, children):
        monomial, value = children
        return IntegralStmt(monomial, value.value, meta.line, meta.column)

    def space_stmt(self, meta, children):
        name, arglist = children
        args, tail = arglist if arglist is not None else ((), None)
        if tail is not None:
            raise DslSyntaxError("space builders take no '; H2' argument", meta.line, meta.column, expected=[")"])
        return SpaceStmt(str(name), args, meta.line, meta.column)

    def let_stmt(self, meta, children):
        name, expr = children
        return LetStmt(str(name), expr, meta.line, meta.column)

    def eval_stmt(self, meta, children):
        (kind, monomial), expr = children
        return EvalStmt(kind, expr, monomial, meta.line, meta.column)

    def integrate_kind(self, meta, children):
        return ("integrate", None)

    def normal_kind(self, meta, children):
        return ("normal", None)

    def coeff_kind(self, meta, children):
        return ("coeff", children[0])

    def monomial(self, meta, children):
        exponents: dict[str, int] = {}
        for name, power in children:
            exponents[name] = exponents.get(name, 0) + power
        return Monomial.of(exponents)

    def unit_monomial(self, meta, children):
        if int(children[0]) != 1:
            raise DslSyntaxError(f"the only numeric monomial is 1, got {children[0]}", meta.line, meta.column, expected=["NAME"])
        return Monomial()

    def mono_factor(self, meta, children):
        power = int(children[1]) if len(children) > 1 else 1
        return (str(children[0]), power)

    def rational(self, meta, children):
        numerator = int(children[0])
        denominator = int(children[1]) if len(children) > 1 else 1
        if denominator == 0:
            raise DslSyntaxError("zero denominator", meta.line, meta.column, expected=["INT"])
        return Num(Fraction(numerator, denominator), meta.line, meta.column)

    def var(self, meta, children):
        return Var(str(children[0]), meta.line, meta.column)

    def neg(self, meta, children):
        return Neg(children[0], meta.line, meta.column)

    def add(self, meta, children):
        return BinOp("+", children[0], children[1], meta.line, meta.column)

    def sub(self, meta, children):
        return BinOp("-", children[0], children[1], meta.line, meta.column)

    def mul(self, meta, children):
        return BinOp("*", children[0], children[1], meta.line, meta.column)

    def power(self, meta, children):
        return Pow(children[0], int(children[1]), meta.line, meta.column)

    def call(self, meta, children):
        name, arglist = children
        args, tail = arglist if arglist is not None else ((), None)
        return Call(str(name), args, tail, meta.line, meta.column)

    def arglist(self, meta, children):
        tail = None
        if children and isinstance(children[-1], _Tail):
            tail = children[-1].expr
            children = children[:-1]
        return (tuple(children), tail)

    def tail(self, meta, children):
        return _Tail(children[0])


@lru_cache(maxsize=1)
def _parser() -> Lark:
    return Lark(GRAMMAR, parser="lalr", propagate_positions=True, maybe_placeholders=True)


# spaces and builtins


def _space_wbar(*args: int) -> SpaceRing:
    return wbar_ring(*args)


def _space_jac_x_curve(g: int, k: int, with_mu: int = 0) -> SpaceRing:
    return jac_x_curve_ring(g, k, with_mu=bool(with_mu))


SPACE_BUILDERS: dict[str, Callable[..., SpaceRing]] = {
    "abelian": abelian_ring,
    "curve": curve_even_ring,
    "jac_x_curve": _space_jac_x_curve,
    "wbar": _space_wbar,
    "sm_alpha": sm_alpha_ring,
    "point": point_ring,
}


def _as_int(value: Any, what: str) -> int:
    if isinstance(value, Fraction) and value.denominator == 1:
        return int(value)
    raise DslEvalError(f"{what} must be an integer, got {format_value(value)}")


def _as_kclass(value: Any) -> CurveKClass:
    if isinstance(value, CurveKClass):
        return value
    raise DslEvalError(f"expected a curve K-class, got {format_value(value)}")


def _as_mukai(value: Any) -> MukaiVector:
    if isinstance(value, MukaiVector):
        return value
    raise DslEvalError(f"expected a Mukai vector, got {format_value(value)}")


def _builtin_lambda(source: Callable[..., Any]) -> Callable[..., Any]:
    def run(g: Any, k: Any, r: Any, d: Any) -> Element:
        x = CurveKClass(_as_int(r, "r"), _as_int(d, "d"))
        return source(_as_int(g, "g"), _as_int(k, "k"), x).value

    return run


BUILTINS: dict[str, tuple[int, Callable[..., Any]]] = {
    "lambda_closed": (4, _builtin_lambda(lambda_closed)),
    "lambda_grr": (4, _builtin_lambda(lambda_grr)),
    "mukai": (3, lambda r, m, s, H2=Fraction(2): MukaiVector(_as_int(r, "r"), _as_int(m, "m"), _as_int(s, "s"), _as_int(H2, "H2"))),
    "kclass": (2, lambda r, d: CurveKClass(_as_int(r, "r"), _as_int(d, "d"))),
    "chi_k3": (2, lambda x, y: Fraction(chi_k3(_as_mukai(x), _as_mukai(y)))),
    "bb": (2, lambda x, y: Fraction(bb_pairing(_as_mukai(x), _as_mukai(y)))),
    "mukai_pair": (2, lambda x, y: Fraction(mukai_pairing(_as_mukai(x), _as_mukai(y)))),
    "restrict": (2, lambda x, n: restrict_to_curve(_as_mukai(x), _as_int(n, "n"))),
    "curve_chi": (2, lambda x, g: Fraction(curve_chi(_as_kclass(x), _as_int(g, "g")))),
    "bernoulli": (1, lambda n: bernoulli(_as_int(n, "n"))),
    "verlinde2": (1, lambda g: theta_top_rank2(_as_int(g, "g"))),
}


# sections


@dataclass
class _Section:
    space: SpaceStmt | None = None
    gens: list[GenStmt] = field(default_factory=list)
    rels: list[RelStmt] = field(default_factory=list)
    top: TopStmt | None = None
    integrals: list[IntegralStmt] = field(default_factory=list)
    body: list[Statement] = field(default_factory=list)

    @property
    def used(self) -> bool:
        return bool(self.body)


def _split_sections(program: DslProgram) -> list[_Section]:
    sections: list[_Section] = []
    current: _Section | None = None
    for stmt in program.statements:
        if isinstance(stmt, SpaceStmt):
            current = _Section(space=stmt)
            sections.append(current)
        elif isinstance(stmt, GenStmt):
            if current is None or current.space is not None or current.used:
                current = _Section()
                sections.append(current)
            current.gens.append(stmt)
        elif isinstance(stmt, (RelStmt, TopStmt, IntegralStmt)):
            keyword = {RelStmt: "rel", TopStmt: "top", IntegralStmt: "integral"}[type(stmt)]
            if current is None or current.space is not None:
                raise DslError(f"'{keyword}' needs a ring opened by 'gen'", stmt.line, stmt.col)
            if current.used:
                raise DslError(f"'{keyword}' after the ring has been evaluated in", stmt.line, stmt.col)
            if isinstance(stmt, RelStmt):
                current.rels.append(stmt)
            elif isinstance(stmt, IntegralStmt):
                current.integrals.append(stmt)
            else:
                if current.top is not None:
                    raise DslError("'top' given twice for one ring", stmt.line, stmt.col)
                current.top = stmt
        else:
            if current is None:
                current = _Section()
                sections.append(current)
            current.body.append(stmt)
    return sections


def _constant(expr: Expr) -> Fraction:
    if isinstance(expr, Num):
        return expr.value
    if isinstance(expr, Neg):
        return -_constant(expr.operand)
    raise DslSyntaxError("builder arguments must be integer literals", expr.line, expr.col, expected=["INT"])


def _build_space(stmt: SpaceStmt) -> SpaceRing:
    builder = SPACE_BUILDERS.get(stmt.name)
    if builder is None:
        raise UnknownIdentifier(
            f"unknown space {stmt.name!r}; known spaces: {', '.join(sorted(SPACE_BUILDERS))}", stmt.line, stmt.col
        )
    args = [_constant(arg) for arg in stmt.args]
    try:
        return builder(*[_as_int(arg, "space argument") for arg in args])
    except DslError as exc:
        raise DslEvalError(str(exc), stmt.line, stmt.col) from exc
    except TypeError as exc:
        raise DslEvalError(f"bad arguments for space {stmt.name}: {exc}", stmt.line, stmt.col) from exc
    except CohocalcError as exc:
        raise DslEvalError(f"{exc.code}: {exc}", stmt.line, stmt.col) from exc


def _names_in(expr: Expr) -> list[Var | Call]:
    if isinstance(expr, (Var, Call)):
        found: list[Var | Call] = [expr]
        if isinstance(expr, Call):
            for arg in expr.args + ((expr.h2,) if expr.h2 is not None else ()):
                found += _names_in(arg)
        return found
    if isinstance(expr, Neg):
        return _names_in(expr.operand)
    if isinstance(expr, BinOp):
        return _names_in(expr.left) + _names_in(expr.right)
    if isinstance(expr, Pow):
        return _names_in(expr.base)
    return []


def _homogeneous_degree(expr: Expr, degrees: dict[str, int]) -> int | None:
    """Degree of a relation right-hand side; None stands for the zero polynomial."""
    if isinstance(expr, Num):
        return None if expr.value == 0 else 0
    if isinstance(expr, Var):
        return degrees[expr.name]
    if isinstance(expr, Neg):
        return _homogeneous_degree(expr.operand, degrees)
    if isinstance(expr, Pow):
        base = _homogeneous_degree(expr.base, degrees)
        if base is None:
            return None if expr.exponent else 0
        return base * expr.exponent
    if isinstance(expr, BinOp):
        left = _homogeneous_degree(expr.left, degrees)
        right = _homogeneous_degree(expr.right, degrees)
        if expr.op == "*":
            return None if left is None or right is None else left + right
        if left is not None and right is not None and left != right:
            raise DegreeMismatch(f"terms of degree {left} and {right} in one relation", expr.line, expr.col)
        return left if left is not None else right
    raise DslSyntaxError("builtin calls are not allowed in relations", expr.line, expr.col, expected=["NAME", "INT"])


def _validate(program: DslProgram) -> None:
    for section in _split_sections(program):
        if section.space is not None:
            space = _build_space(section.space)
            generators = set(space.presentation.generator_names())
            scope = generators | set(space.named_classes)
        else:
            degrees: dict[str, int] = {}
            for gen in section.gens:
                if gen.degree <= 0 or gen.degree % 2:
                    raise DegreeMismatch(f"generator {gen.name} must have positive even degree, got {gen.degree}", gen.line, gen.col)
                degrees[gen.name] = gen.degree
            for rel in section.rels:
                for name in rel.lhs.names():
                    if name not in degrees:
                        raise UnknownIdentifier(f"unknown generator {name!r}", rel.line, rel.col)
                for item in _names_in(rel.rhs):
                    if isinstance(item, Var) and item.name not in degrees:
                        raise UnknownIdentifier(f"unknown generator {item.name!r}", item.line, item.col)
                lhs_degree = sum(degrees[name] * power for name, power in rel.lhs.exponents)
                rhs_degree = _homogeneous_degree(rel.rhs, degrees)
                if rhs_degree is not None and rhs_degree != lhs_degree:
                    raise DegreeMismatch(
                        f"relation for {_format_monomial(rel.lhs)} has degree {lhs_degree} on the left and {rhs_degree} on the right",
                        rel.line,
                        rel.col,
                    )
            for integral in section.integrals:
                for name in integral.monomial.names():
                    if name not in degrees:
                        raise UnknownIdentifier(f"unknown generator {name!r}", integral.line, integral.col)
            generators = set(degrees)
            scope = set(degrees)
        for stmt in section.body:
            expr = stmt.expr  # type: ignore[union-attr]
            for item in _names_in(expr):
                if isinstance(item, Call):
                    if item.name not in BUILTINS:
                        raise UnknownIdentifier(f"unknown function {item.name!r}", item.line, item.col)
                elif item.name not in scope:
                    raise UnknownIdentifier(f"unknown identifier {item.name!r}", item.line, item.col)
            if isinstance(stmt, EvalStmt) and stmt.monomial is not None:
                for name in stmt.monomial.names():
                    if name not in generators:
                        raise UnknownIdentifier(f"unknown generator {name!r}", stmt.line, stmt.col)
            if isinstance(stmt, LetStmt):
                scope.add(stmt.name)


def parse(text: str) -> DslProgram:
    try:
        tree = _parser().parse(text)
    except UnexpectedInput as exc:
        expected = getattr(exc, "expected", None) or getattr(exc, "allowed", None) or []
        line = exc.line if getattr(exc, "line", -1) not in (None, -1) else _last_line(text)
        col = exc.column if getattr(exc, "column", -1) not in (None, -1) else 1
        raise DslSyntaxError("unexpected input", line, col, expected=list(expected)) from exc
    try:
        program = _AstBuilder().transform(tree)
    except VisitError as exc:
        if isinstance(exc.orig_exc, DslError):
            raise exc.orig_exc from exc
        raise
    _validate(program)
    logger.debug("parsed %d statements", len(program.statements))
    return program


def _last_line(text: str) -> int:
    return text.count("\n") + 1


# printing


def _format_monomial(monomial: Monomial) -> str:
    if monomial.is_one():
        return "1"
    return "*".join(name if power == 1 else f"{name}^{power}" for name, power in monomial.exponents)


def format_expr(expr: Expr, level: int = 0) -> str:
    """Levels: 0 sum, 1 product operand on the left, 2 product operand on the right, 3 power base."""
    if isinstance(expr, Num):
        return format_rational(expr.value) if expr.value >= 0 else f"({format_rational(expr.value)})"
    if isinstance(expr, Var):
        return expr.name
    if isinstance(expr, Call):
        args = ", ".join(format_expr(arg) for arg in expr.args)
        if expr.h2 is not None:
            args += f"; {format_expr(expr.h2)}"
        return f"{expr.name}({args})"
    if isinstance(expr, Pow):
        text = f"{format_expr(expr.base, 3)}^{expr.exponent}"
        return f"({text})" if level >= 3 else text
    if isinstance(expr, Neg):
        text = f"-{format_expr(expr.operand, 1)}"
        return f"({text})" if level >= 1 else text
    if expr.op == "*":
        text = f"{format_expr(expr.left, 1)}*{format_expr(expr.right, 2)}"
        return f"({text})" if level >= 2 else text
    text = f"{format_expr(expr.left, 0)} {expr.op} {_format_sum_operand(expr.right)}"
    return f"({text})" if level >= 1 else text


def _format_sum_operand(expr: Expr) -> str:
    if isinstance(expr, (Neg, BinOp)) and not (isinstance(expr, BinOp) and expr.op == "*"):
        return f"({format_expr(expr)})"
    return format_expr(expr, 1)


def format_statement(stmt: Statement) -> str:
    if isinstance(stmt, GenStmt):
        return f"gen {stmt.name}: {stmt.degree};"
    if isinstance(stmt, RelStmt):
        return f"rel {_format_monomial(stmt.lhs)} = {format_expr(stmt.rhs)};"
    if isinstance(stmt, TopStmt):
        return f"top {stmt.degree};"
    if isinstance(stmt, IntegralStmt):
        return f"integral {_format_monomial(stmt.monomial)} = {format_rational(stmt.value)};"
    if isinstance(stmt, SpaceStmt):
        return f"space {stmt.name}({', '.join(format_expr(arg) for arg in stmt.args)});"
    if isinstance(stmt, LetStmt):
        return f"let {stmt.name} = {format_expr(stmt.expr)};"
    if stmt.kind == "coeff":
        return f"eval coeff[{_format_monomial(stmt.monomial)}]({format_expr(stmt.expr)});"
    return f"eval {stmt.kind}({format_expr(stmt.expr)});"


def format_program(program: DslProgram) -> str:
    return "".join(format_statement(stmt) + "\n" for stmt in program.statements)


# evaluation


def _raw_terms(expr: Expr) -> dict[Monomial, Fraction]:
    """Expand a relation right-hand side into unreduced terms."""
    if isinstance(expr, Num):
        return {Monomial(): expr.value} if expr.value else {}
    if isinstance(expr, Var):
        return {Monomial.of({expr.name: 1}): Fraction(1)}
    if isinstance(expr, Neg):
        return {monomial: -value for monomial, value in _raw_terms(expr.operand).items()}
    if isinstance(expr, Pow):
        result: dict[Monomial, Fraction] = {Monomial(): Fraction(1)}
        base = _raw_terms(expr.base)
        for _ in range(expr.exponent):
            result = _raw_product(result, base)
        return result
    if isinstance(expr, BinOp):
        left = _raw_terms(expr.left)
        right = _raw_terms(expr.right)
        if expr.op == "*":
            return _raw_product(left, right)
        sign = 1 if expr.op == "+" else -1
        merged = dict(left)
        for monomial, value in right.items():
            merged[monomial] = merged.get(monomial, Fraction(0)) + sign * value
        return {monomial: value for monomial, value in merged.items() if value}
    raise DslSyntaxError("builtin calls are not allowed in relations", expr.line, expr.col, expected=["NAME", "INT"])


def _raw_product(a: dict[Monomial, Fraction], b: dict[Monomial, Fraction]) -> dict[Monomial, Fraction]:
    product: dict[Monomial, Fraction] = {}
    for left, left_value in a.items():
        for right, right_value in b.items():
            monomial = left * right
            product[monomial] = product.get(monomial, Fraction(0)) + left_value * right_value
    return {monomial: value for monomial, value in product.items() if value}


def _section_ring(section: _Section, index: int) -> tuple[RingPresentation | None, dict[str, Element]]:
    if section.space is not None:
        space = _build_space(section.space)
        return space.presentation, dict(space.named_classes)
    if not section.gens:
        return None, {}
    anchor = section.gens[0]
    if section.top is None:
        raise DslEvalError("ring declares no 'top' degree", anchor.line, anchor.col)
    try:
        ring = make_ring(
            [Generator(gen.name, gen.degree) for gen in section.gens],
            [RewriteRule(rel.lhs, tuple(_raw_terms(rel.rhs).items())) for rel in section.rels],
            section.top.degree,
            {integral.monomial: integral.value for integral in section.integrals},
            name=f"section{index}",
        )
    except CohocalcError as exc:
        raise DslEvalError(f"{exc.code}: {exc}", anchor.line, anchor.col) from exc
    return ring, {}


class _Evaluator:
    def __init__(self, ring: RingPresentation | None, named: dict[str, Element]):
        self.ring = ring
        self.scope: dict[str, Any] = dict(named)

    def value(self, expr: Expr) -> Any:
        if isinstance(expr, Num):
            return expr.value
        if isinstance(expr, Var):
            if expr.name in self.scope:
                return self.scope[expr.name]
            if self.ring is not None and self.ring.has_generator(expr.name):
                return self.ring.gen(expr.name)
            raise UnknownIdentifier(f"unknown identifier {expr.name!r}", expr.line, expr.col)
        if isinstance(expr, Neg):
            return -self.value(expr.operand)
        if isinstance(expr, Pow):
            return self.value(expr.base) ** expr.exponent
        if isinstance(expr, Call):
            return self.call(expr)
        left = self.value(expr.left)
        right = self.value(expr.right)
        for operand in (left, right):
            if not isinstance(operand, (Fraction, Element)):
                raise DslEvalError(f"cannot apply '{expr.op}' to {format_value(operand)}", expr.line, expr.col)
        if expr.op == "+":
            return left + right
        if expr.op == "-":
            return left - right
        return left * right

    def call(self, expr: Call) -> Any:
        arity, function = BUILTINS[expr.name]
        args = [self.value(arg) for arg in expr.args]
        if expr.h2 is not None:
            if expr.name != "mukai":
                raise DslEvalError(f"only mukai(...) takes a '; H2' argument", expr.line, expr.col)
            args.append(self.value(expr.h2))
        if len(expr.args) != arity:
            raise DslEvalError(f"{expr.name} takes {arity} arguments, got {len(expr.args)}", expr.line, expr.col)
        result = function(*args)
        if isinstance(result, Element) and self.ring is not None and result.ring != self.ring:
            if all(self.ring.has_generator(name) for monomial, _ in result.terms for name in monomial.names()):
                result = transfer(result, self.ring)
        return result

    def element(self, value: Any, stmt: Statement) -> Element:
        if isinstance(value, Element):
            return value
        if isinstance(value, Fraction) and self.ring is not None:
            return self.ring.scalar(value)
        raise DslEvalError(f"expected a ring element, got {format_value(value)}", stmt.line, stmt.col)


def eval_program(program: DslProgram, name: str = "eval") -> Report:
    report = Report(scenario=name)
    for index, section in enumerate(_split_sections(program)):
        if not section.body:
            if section.gens:
                _section_ring(section, index)
            continue
        ring, named = _section_ring(section, index)
        evaluator = _Evaluator(ring, named)
        for stmt in section.body:
            try:
                if isinstance(stmt, LetStmt):
                    evaluator.scope[stmt.name] = evaluator.value(stmt.expr)
                    continue
                assert isinstance(stmt, EvalStmt)
                value = evaluator.value(stmt.expr)
                if stmt.kind == "integrate":
                    result: Any = integrate(evaluator.element(value, stmt))
                elif stmt.kind == "normal":
                    result = value
                else:
                    assert stmt.monomial is not None
                    result = coeff_of_monomial(evaluator.element(value, stmt), stmt.monomial)
            except DslError:
                raise
            except (CohocalcError, TypeError, ValueError, ZeroDivisionError) as exc:
                code = getattr(exc, "code", type(exc).__name__)
                raise DslEvalError(f"{code}: {exc}", stmt.line, stmt.col) from exc
            report.record(format_statement(stmt), result, f"line {stmt.line}")
    return report
