"""A tiny arithmetic language for coordinate expressions in chart files.

Grammar (Python operator precedence; whitespace is insignificant)::

    expr   := term (("+" | "-") term)*
    term   := factor (("*" | "/") factor)*
    factor := ("+" | "-") factor | power
    power  := atom ("**" factor)?
    atom   := NUMBER | NAME | FUNC "(" expr ")" | "(" expr ")"
    FUNC   := sin | cos | tan | exp | log | sqrt | sinh | cosh | tanh

``NAME`` is a coordinate or parameter name; ``pi`` and ``e`` are predefined.
Parsing reuses :mod:`ast` and rejects every node outside this grammar.
"""

from __future__ import annotations

import ast
import math
from dataclasses import dataclass
from typing import Callable, Mapping, Union

FUNCTIONS: dict[str, Callable[[float], float]] = {
    "sin": math.sin,
    "cos": math.cos,
    "tan": math.tan,
    "exp": math.exp,
    "log": math.log,
    "sqrt": math.sqrt,
    "sinh": math.sinh,
    "cosh": math.cosh,
    "tanh": math.tanh,
}
CONSTANTS = {"pi": math.pi, "e": math.e}

_BINOPS = {
    ast.Add: ("+", lambda a, b: a + b),
    ast.Sub: ("-", lambda a, b: a - b),
    ast.Mult: ("*", lambda a, b: a * b),
    ast.Div: ("/", lambda a, b: a / b),
    ast.Pow: ("**", lambda a, b: a**b),
}
_OPFUNCS = {sym: fn for sym, fn in _BINOPS.values()}


class ExpressionError(ValueError):
    pass


@dataclass(frozen=True)
class Const:
    value: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Neg:
    arg: "Node"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Node"


Node = Union[Const, Var, Neg, BinOp, Call]


def _convert(node: ast.AST) -> Node:
    if isinstance(node, ast.Expression):
        return _convert(node.body)
    if isinstance(node, ast.Constant):
        if isinstance(node.value, bool) or not isinstance(node.value, (int, float)):
            raise ExpressionError(f"unsupported literal {node.value!r}")
        return Const(float(node.value))
    if isinstance(node, ast.Name):
        if node.id in CONSTANTS:
            return Const(CONSTANTS[node.id])
        return Var(node.id)
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        arg = _convert(node.operand)
        return Neg(arg) if isinstance(node.op, ast.USub) else arg
    if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
        return BinOp(_BINOPS[type(node.op)][0], _convert(node.left), _convert(node.right))
    if isinstance(node, ast.Call):
        if (
            isinstance(node.func, ast.Name)
            and node.func.id in FUNCTIONS
            and len(node.args) == 1
            and not node.keywords
        ):
            return Call(node.func.id, _convert(node.args[0]))
        raise ExpressionError(f"unsupported function call: {ast.dump(node.func)}")
    raise ExpressionError(f"unsupported syntax: {type(node).__name__}")


def parse(source: str | float | int) -> Node:
    if isinstance(source, (int, float)) and not isinstance(source, bool):
        return Const(float(source))
    if not isinstance(source, str):
        raise ExpressionError(f"expression must be a string or number, got {type(source).__name__}")
    try:
        tree = ast.parse(source.strip(), mode="eval")
    except SyntaxError as exc:
        raise ExpressionError(f"cannot parse {source!r}: {exc.msg}") from None
    return _convert(tree)


def free_names(node: Node) -> set[str]:
    if isinstance(node, Var):
        return {node.name}
    if isinstance(node, Const):
        return set()
    if isinstance(node, (Neg, Call)):
        return free_names(node.arg)
    return free_names(node.left) | free_names(node.right)


def substitute(node: Node, values: Mapping[str, float]) -> Node:
    """Replace named variables by constants (used to bind chart parameters)."""
    if isinstance(node, Var):
        return Const(float(values[node.name])) if node.name in values else node
    if isinstance(node, Const):
        return node
    if isinstance(node, Neg):
        return Neg(substitute(node.arg, values))
    if isinstance(node, Call):
        return Call(node.func, substitute(node.arg, values))
    return BinOp(node.op, substitute(node.left, values), substitute(node.right, values))


def evaluate(node: Node, env: Mapping[str, float]) -> float:
    if isinstance(node, Const):
        return node.value
    if isinstance(node, Var):
        try:
            return env[node.name]
        except KeyError:
            raise ExpressionError(f"unbound name {node.name!r}") from None
    if isinstance(node, Neg):
        return -evaluate(node.arg, env)
    if isinstance(node, Call):
        return FUNCTIONS[node.func](evaluate(node.arg, env))
    return _OPFUNCS[node.op](evaluate(node.left, env), evaluate(node.right, env))


def compile_positional(node: Node, names: list[str]) -> Callable[[list[float]], float]:
    """Closure evaluating ``node`` on a coordinate sequence ordered like ``names``."""
    index = {name: i for i, name in enumerate(names)}
    unbound = free_names(node) - set(index)
    if unbound:
        raise ExpressionError(f"unbound names {sorted(unbound)}")

    def build(n: Node):
        if isinstance(n, Const):
            v = n.value
            return lambda u: v
        if isinstance(n, Var):
            i = index[n.name]
            return lambda u: u[i]
        if isinstance(n, Neg):
            a = build(n.arg)
            return lambda u: -a(u)
        if isinstance(n, Call):
            f, a = FUNCTIONS[n.func], build(n.arg)
            return lambda u: f(a(u))
        op, left, right = _OPFUNCS[n.op], build(n.left), build(n.right)
        return lambda u: op(left(u), right(u))

    return build(node)


def to_source(node: Node) -> str:
    if isinstance(node, Const):
        return repr(node.value)
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Neg):
        return f"(-{to_source(node.arg)})"
    if isinstance(node, Call):
        return f"{node.func}({to_source(node.arg)})"
    return f"({to_source(node.left)} {node.op} {to_source(node.right)})"
