"""Restricted statement/expression IR captured from process bodies.

Every convertible process body and handler member function exists both as an
executable closure and as a tree in this grammar.  The grammar is closed:
anything a body does that is not expressible here is rejected when the body
is captured.

Statements: Drive(target path, expr), If(cond, then, elifs, else),
Call(object path, member, args).
Expressions: Ref(path), Const(value), BinOp(op, l, r), Not(e),
SwitchExpr(default, cases), Truthiness(handler path).

A path is a tuple of attribute names rooted at a name visible to the body
(a local, a closure cell or ``self``).  Assigning a receiver-style handler to
a target (``target << handler`` or ``handler >> target``) is represented as
Drive(target, Ref(handler)); the backend and the simulator both give that
shape stream-out semantics.
"""

from dataclasses import dataclass, field


@dataclass(frozen=True)
class Ref:
    path: tuple


@dataclass(frozen=True)
class Const:
    value: object


@dataclass(frozen=True)
class BinOp:
    op: str
    left: object
    right: object


@dataclass(frozen=True)
class Not:
    expr: object


@dataclass(frozen=True)
class SwitchExpr:
    default: object
    cases: tuple  # of (condition expr, value expr)


@dataclass(frozen=True)
class Truthiness:
    path: tuple


@dataclass
class Drive:
    target: tuple
    expr: object


@dataclass
class If:
    cond: object
    then: list
    elifs: list = field(default_factory=list)  # of (cond, [stmt])
    orelse: list = field(default_factory=list)


@dataclass
class Call:
    path: tuple
    member: str
    args: list


COMPARE_OPS = ("==", "!=", "<", "<=", ">", ">=")
ARITH_OPS = ("+", "-", "&", "|", "^")
BOOL_OPS = ("and", "or")


def iter_expr_refs(expr):
    """Yield every Ref/Truthiness path appearing in an expression."""
    if isinstance(expr, (Ref, Truthiness)):
        yield expr.path
    elif isinstance(expr, BinOp):
        yield from iter_expr_refs(expr.left)
        yield from iter_expr_refs(expr.right)
    elif isinstance(expr, Not):
        yield from iter_expr_refs(expr.expr)
    elif isinstance(expr, SwitchExpr):
        yield from iter_expr_refs(expr.default)
        for cond, val in expr.cases:
            yield from iter_expr_refs(cond)
            yield from iter_expr_refs(val)


def iter_statements(stmts):
    """Yield every statement in a body, depth first."""
    for st in stmts:
        yield st
        if isinstance(st, If):
            yield from iter_statements(st.then)
            for _, body in st.elifs:
                yield from iter_statements(body)
            yield from iter_statements(st.orelse)


def read_paths(stmts):
    """Paths read by a statement list (expression positions)."""
    for st in iter_statements(stmts):
        if isinstance(st, Drive):
            yield from iter_expr_refs(st.expr)
        elif isinstance(st, If):
            yield from iter_expr_refs(st.cond)
            for cond, _ in st.elifs:
                yield from iter_expr_refs(cond)
        elif isinstance(st, Call):
            for a in st.args:
                yield from iter_expr_refs(a)


def drive_targets(stmts):
    for st in iter_statements(stmts):
        if isinstance(st, Drive):
            yield st.target
