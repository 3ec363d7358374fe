"""Random condition generators shared by the property and acceptance tests."""

import random

from intprop.model import ValueRange, VariabilityModel
from intprop.parser import Binary, BoolLit, Defined, Ident, IntLit, Unary

ARITH = ["+", "-", "*", "/", "%", "&", "|", "^", "<<", ">>"]
CMP = ["==", "!=", "<", "<=", ">", ">="]
LOGIC = ["&&", "||"]


def random_model(rng, n_vars=3, max_range=6, constants=True):
    entries = {}
    for i in range(n_vars):
        size = rng.randint(1 if constants else 2, max_range)
        lo = rng.randint(-3, 3)
        values = sorted(rng.sample(range(lo, lo + 2 * max_range), size))
        entries[f"V{i}"] = ValueRange(tuple(values))
    return VariabilityModel(entries)


def random_int_expr(rng, names, depth):
    if depth <= 0 or rng.random() < 0.3:
        if rng.random() < 0.55:
            return Ident(rng.choice(names))
        return IntLit(rng.randint(0, 6))
    r = rng.random()
    if r < 0.12:
        return Unary(rng.choice(["-", "~", "!"]), random_int_expr(rng, names, depth - 1))
    if r < 0.22:
        # comparison / logic used as an integer operand
        op = rng.choice(CMP + LOGIC)
    else:
        op = rng.choice(ARITH)
    rhs = random_int_expr(rng, names, depth - 1)
    if op in ("<<", ">>") and rng.random() < 0.8:
        rhs = IntLit(rng.randint(0, 3))
    return Binary(op, random_int_expr(rng, names, depth - 1), rhs)


def random_condition(rng, names, depth=5):
    """A Boolean-position condition tree of depth at most ``depth``.

    ``random_int_expr(..., d)`` is at most ``d + 1`` deep, hence the offsets.
    """
    if depth <= 1:
        if rng.random() < 0.5:
            return Defined(rng.choice(names))
        return random_int_expr(rng, names, 0)
    r = rng.random()
    if r < 0.35:
        return Binary(rng.choice(LOGIC), random_condition(rng, names, depth - 1), random_condition(rng, names, depth - 1))
    if r < 0.45:
        return Unary("!", random_condition(rng, names, depth - 1))
    if r < 0.85:
        return Binary(rng.choice(CMP), random_int_expr(rng, names, depth - 2), random_int_expr(rng, names, depth - 2))
    if r < 0.9:
        return Defined(rng.choice(names))
    if r < 0.93:
        return BoolLit(rng.random() < 0.5)
    return random_int_expr(rng, names, depth - 1)


def expr_depth(expr):
    if isinstance(expr, Unary):
        return 1 + expr_depth(expr.operand)
    if isinstance(expr, Binary):
        return 1 + max(expr_depth(expr.lhs), expr_depth(expr.rhs))
    return 1
