"""Compile density expressions from spec files into vectorised functions.

Only arithmetic, comparisons and a fixed set of numpy functions of the
single variable ``x`` are accepted.
"""

import ast

import numpy as np

from .errors import SpecError

_FUNCTIONS = {
    "exp": np.exp,
    "log": np.log,
    "log1p": np.log1p,
    "expm1": np.expm1,
    "sqrt": np.sqrt,
    "abs": np.abs,
    "sin": np.sin,
    "cos": np.cos,
    "tanh": np.tanh,
    "where": np.where,
    "minimum": np.minimum,
    "maximum": np.maximum,
    "heaviside": np.heaviside,
}
_CONSTANTS = {"pi": np.pi, "e": np.e}
_ALLOWED = (
    ast.Expression, ast.BinOp, ast.UnaryOp, ast.Compare, ast.Call, ast.Name, ast.Load,
    ast.Constant, ast.Add, ast.Sub, ast.Mult, ast.Div, ast.Pow, ast.USub, ast.UAdd,
    ast.Lt, ast.LtE, ast.Gt, ast.GtE, ast.Eq, ast.NotEq, ast.BitAnd, ast.BitOr,
)


def compile_density(text, field="expression"):
    """Return f(x) evaluating ``text`` elementwise on numpy arrays."""
    if not isinstance(text, str) or not text.strip():
        raise SpecError("expected a non-empty expression string", field)
    try:
        tree = ast.parse(text.strip(), mode="eval")
    except SyntaxError as exc:
        raise SpecError(f"cannot parse expression {text!r}: {exc.msg}", field) from None
    for node in ast.walk(tree):
        if not isinstance(node, _ALLOWED):
            raise SpecError(f"construct {type(node).__name__} not allowed in {text!r}", field)
        if isinstance(node, ast.Name) and node.id != "x" and node.id not in _FUNCTIONS \
                and node.id not in _CONSTANTS:
            raise SpecError(f"unknown name {node.id!r} in {text!r}", field)
        if isinstance(node, ast.Call) and not (
                isinstance(node.func, ast.Name) and node.func.id in _FUNCTIONS):
            raise SpecError(f"only whitelisted functions may be called in {text!r}", field)
        if isinstance(node, ast.Constant) and not isinstance(node.value, (int, float)):
            raise SpecError(f"non-numeric constant in {text!r}", field)
    code = compile(tree, f"<{field}>", "eval")
    namespace = {"__builtins__": {}, **_FUNCTIONS, **_CONSTANTS}

    def density(x):
        x = np.asarray(x, dtype=float)
        with np.errstate(all="ignore"):
            out = eval(code, namespace, {"x": x})  # noqa: S307 - validated AST above
        return np.broadcast_to(np.asarray(out, dtype=float), x.shape).copy()

    density.source = text
    return density
