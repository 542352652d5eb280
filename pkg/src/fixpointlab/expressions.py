"""Tiny arithmetic expression grammar for maps and dominating families.

Grammar: numeric literals, the declared variables, + - * / ** unary -,
and calls to abs/min/max.  Expressions are validated against an AST
whitelist and then compiled, so config-supplied formulas cannot reach
anything outside that grammar.
"""
from __future__ import annotations

import ast
from typing import Callable, Sequence

_ALLOWED_BINOPS = (ast.Add, ast.Sub, ast.Mult, ast.Div, ast.Pow)
_ALLOWED_UNARY = (ast.USub, ast.UAdd)
_ALLOWED_CALLS = {"abs": abs, "min": min, "max": max}


class ExpressionError(ValueError):
    """Malformed or out-of-grammar expression; message is the diagnostic."""


def _validate(node: ast.AST, variables: Sequence[str], source: str) -> None:
    if isinstance(node, ast.Expression):
        _validate(node.body, variables, source)
    elif isinstance(node, ast.BinOp):
        if not isinstance(node.op, _ALLOWED_BINOPS):
            raise ExpressionError(
                f"operator {type(node.op).__name__} not allowed in {source!r}")
        _validate(node.left, variables, source)
        _validate(node.right, variables, source)
    elif isinstance(node, ast.UnaryOp):
        if not isinstance(node.op, _ALLOWED_UNARY):
            raise ExpressionError(
                f"operator {type(node.op).__name__} not allowed in {source!r}")
        _validate(node.operand, variables, source)
    elif isinstance(node, ast.Call):
        if not isinstance(node.func, ast.Name) or node.func.id not in _ALLOWED_CALLS:
            raise ExpressionError(f"only abs/min/max calls allowed in {source!r}")
        if node.keywords:
            raise ExpressionError(f"keyword arguments not allowed in {source!r}")
        for arg in node.args:
            _validate(arg, variables, source)
    elif isinstance(node, ast.Name):
        if node.id not in variables:
            raise ExpressionError(
                f"unknown variable {node.id!r} in {source!r} "
                f"(allowed: {', '.join(variables)})")
    elif isinstance(node, ast.Constant):
        if not isinstance(node.value, (int, float)):
            raise ExpressionError(f"non-numeric constant in {source!r}")
    else:
        raise ExpressionError(
            f"construct {type(node).__name__} not allowed in {source!r}")


def compile_expression(source: str,
                       variables: Sequence[str]) -> Callable[..., float]:
    """Compile ``source`` into a float-valued function of ``variables``.

    The returned callable takes the variables as keyword arguments, e.g.
    ``compile_expression("x/3", ["x"])(x=1.0)``.  Raises ExpressionError
    with a parse diagnostic on malformed input.
    """
    try:
        tree = ast.parse(source, mode="eval")
    except SyntaxError as exc:
        raise ExpressionError(f"cannot parse {source!r}: {exc.msg}") from exc
    _validate(tree, variables, source)
    code = compile(tree, "<expression>", "eval")
    env = {"__builtins__": {}}
    env.update(_ALLOWED_CALLS)

    def evaluate(**values: float) -> float:
        return float(eval(code, env, values))

    evaluate.source = source  # type: ignore[attr-defined]
    return evaluate
