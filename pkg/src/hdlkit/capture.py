"""Capture of process bodies and member functions into the statement IR.

The source of the decorated function is parsed with the stdlib ``ast`` module
and lowered into the restricted grammar in :mod:`hdlkit.ir`.  The executable
closure and the captured tree come from the same source text, and a
differential test drives both against random stimulus.

The grammar is closed: encountering a construct outside it raises
CaptureError at decoration time.  Simulation-only bodies (host-level RNG,
python I/O) must opt out of capture and are then rejected by the VHDL
backend instead.
"""

import ast
import inspect
import textwrap

from . import ir


class CaptureError(Exception):
    """Body not expressible in the statement grammar."""


_BINOPS = {
    ast.Add: "+",
    ast.Sub: "-",
    ast.BitAnd: "&",
    ast.BitOr: "|",
    ast.BitXor: "^",
}

_CMPOPS = {
    ast.Eq: "==",
    ast.NotEq: "!=",
    ast.Lt: "<",
    ast.LtE: "<=",
    ast.Gt: ">",
    ast.GtE: ">=",
}


def _function_ast(func):
    try:
        src = textwrap.dedent(inspect.getsource(func))
    except (OSError, TypeError) as exc:
        raise CaptureError(
            f"cannot read source of {func.__qualname__}: {exc}") from exc
    node = ast.parse(src).body[0]
    if not isinstance(node, (ast.FunctionDef, ast.AsyncFunctionDef)):
        raise CaptureError(f"{func.__qualname__} is not a plain function")
    return node


def _path(node):
    parts = []
    while isinstance(node, ast.Attribute):
        parts.append(node.attr)
        node = node.value
    if not isinstance(node, ast.Name):
        raise CaptureError(
            f"line {node.lineno}: only attribute paths rooted at a name are "
            "allowed")
    parts.append(node.id)
    return tuple(reversed(parts))


class _BodyCapture:
    def __init__(self, func_name):
        self.func_name = func_name

    def fail(self, node, why):
        raise CaptureError(
            f"{self.func_name} line {getattr(node, 'lineno', '?')}: {why}")

    def body(self, stmts):
        out = []
        for st in stmts:
            out.append(self.statement(st))
        return out

    def statement(self, st):
        if isinstance(st, ast.Expr):
            return self.expr_statement(st.value)
        if isinstance(st, ast.If):
            return self.if_statement(st)
        if isinstance(st, ast.Pass):
            self.fail(st, "pass has no hardware meaning")
        self.fail(st, f"statement {type(st).__name__} is outside the grammar")

    def expr_statement(self, node):
        if isinstance(node, ast.BinOp) and isinstance(node.op, ast.LShift):
            return ir.Drive(_path(node.left), self.expr(node.right))
        if isinstance(node, ast.BinOp) and isinstance(node.op, ast.RShift):
            # handler >> target is stream-out, i.e. target << handler
            return ir.Drive(_path(node.right), ir.Ref(_path(node.left)))
        if isinstance(node, ast.Call):
            return self.call_statement(node)
        self.fail(node, f"expression statement {type(node).__name__} is "
                        "outside the grammar")

    def call_statement(self, node):
        if node.keywords:
            self.fail(node, "keyword arguments are outside the grammar")
        args = [self.expr(a) for a in node.args]
        if isinstance(node.func, ast.Attribute):
            return ir.Call(_path(node.func.value), node.func.attr, args)
        if isinstance(node.func, ast.Name):
            # free-function form of the reset dispatch: reset(x)
            if node.func.id == "reset" and len(args) == 1 \
                    and isinstance(args[0], ir.Ref):
                return ir.Call(args[0].path, "reset", [])
            self.fail(node, f"call to {node.func.id} is outside the grammar")
        self.fail(node, "unsupported call form")

    def if_statement(self, st):
        cond = self.condition(st.test)
        then = self.body(st.body)
        elifs = []
        orelse = st.orelse
        while len(orelse) == 1 and isinstance(orelse[0], ast.If):
            nested = orelse[0]
            elifs.append((self.condition(nested.test), self.body(nested.body)))
            orelse = nested.orelse
        return ir.If(cond, then, elifs, self.body(orelse))

    def condition(self, node):
        return self.expr(node, condition=True)

    def expr(self, node, condition=False):
        if isinstance(node, ast.Constant):
            if isinstance(node.value, bool) or isinstance(node.value, int):
                return ir.Const(node.value)
            self.fail(node, f"constant {node.value!r} is outside the grammar")
        if isinstance(node, (ast.Name, ast.Attribute)):
            path = _path(node)
            if condition:
                return ir.Truthiness(path)
            return ir.Ref(path)
        if isinstance(node, ast.BinOp):
            op = _BINOPS.get(type(node.op))
            if op is None:
                self.fail(node, f"operator {type(node.op).__name__} is "
                                "outside the grammar")
            return ir.BinOp(op, self.expr(node.left), self.expr(node.right))
        if isinstance(node, ast.Compare):
            if len(node.ops) != 1:
                self.fail(node, "chained comparisons are outside the grammar")
            op = _CMPOPS.get(type(node.ops[0]))
            if op is None:
                self.fail(node, "unsupported comparison operator")
            return ir.BinOp(op, self.expr(node.left),
                            self.expr(node.comparators[0]))
        if isinstance(node, ast.BoolOp):
            op = "and" if isinstance(node.op, ast.And) else "or"
            values = [self.expr(v, condition=condition) for v in node.values]
            result = values[0]
            for v in values[1:]:
                result = ir.BinOp(op, result, v)
            return result
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.Not):
            return ir.Not(self.expr(node.operand, condition=condition))
        if isinstance(node, ast.Call):
            return self.call_expr(node)
        self.fail(node, f"expression {type(node).__name__} is outside the "
                        "grammar")

    def call_expr(self, node):
        if isinstance(node.func, ast.Name) and node.func.id == "v_switch":
            if len(node.args) != 2 or not isinstance(node.args[1], ast.List):
                self.fail(node, "v_switch takes a default and a case list")
            default = self.expr(node.args[0])
            cases = []
            for elt in node.args[1].elts:
                if not (isinstance(elt, ast.Call)
                        and isinstance(elt.func, ast.Name)
                        and elt.func.id == "v_case"
                        and len(elt.args) == 2):
                    self.fail(elt, "switch cases must be v_case(cond, value)")
                cases.append((self.condition(elt.args[0]),
                              self.expr(elt.args[1])))
            return ir.SwitchExpr(default, tuple(cases))
        self.fail(node, "only v_switch calls may appear in expressions")


def capture_body(func, skip_params=0):
    """Parse ``func`` and return (statement list, parameter names).

    skip_params drops leading parameters (``self``) from the returned list.
    """
    fnode = _function_ast(func)
    params = [a.arg for a in fnode.args.args][skip_params:]
    if fnode.args.vararg or fnode.args.kwarg or fnode.args.kwonlyargs:
        raise CaptureError(
            f"{func.__qualname__}: only plain positional parameters are "
            "supported")
    body = fnode.body
    # allow (and drop) a leading docstring
    if body and isinstance(body[0], ast.Expr) \
            and isinstance(body[0].value, ast.Constant) \
            and isinstance(body[0].value.value, str):
        body = body[1:]
    cap = _BodyCapture(func.__qualname__)
    return cap.body(body), params


def closure_environment(func, frame_locals=None):
    """Name -> object mapping visible to the body: closure cells first,
    then the locals of the scope where the body was declared, then globals."""
    env = {}
    env.update(func.__globals__)
    if frame_locals:
        env.update(frame_locals)
    if func.__closure__:
        for name, cell in zip(func.__code__.co_freevars, func.__closure__):
            try:
                env[name] = cell.cell_contents
            except ValueError:
                pass
    return env


def resolve_path(path, env, fallback=None):
    """Walk a captured path against an environment snapshot."""
    root = path[0]
    if root in env:
        obj = env[root]
    elif fallback is not None and root in fallback:
        obj = fallback[root]
    else:
        raise KeyError(f"unresolved name {root!r} in captured path "
                       f"{'.'.join(path)}")
    for attr in path[1:]:
        obj = getattr(obj, attr)
    return obj
