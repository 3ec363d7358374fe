"""Exhaustive reference semantics for checking converted conditions.

The oracle never looks at tuple sets. It evaluates the original condition
directly for every configuration (each variable undefined or set to one of
its allowed values) and compares the outcome with the converted formula.

Two semantics are available for the original condition:

``strict`` (default)
    The semantics the conversion realises. An integer sub-expression that
    reads an undefined variable has no value; a comparison (or the implicit
    ``!= 0`` / ``== 0`` test) over such a sub-expression is false. Inside
    integer context every operand is evaluated; ``&&``/``||``/``!`` in
    Boolean context short-circuit as in C.

``cpp``
    Plain preprocessor evaluation: undefined identifiers read as 0. The
    conversion is not exact under this reading (``VAR < 2`` is true for an
    undefined ``VAR``) and it is offered only for comparison.
"""

import enum
import itertools
import math
from dataclasses import dataclass, field
from typing import Dict, Optional

from intprop import cint
from intprop.model import Constant, Restricted, Unknown
from intprop.parser import Binary, BoolLit, Defined, Ident, IntLit, Unary, is_boolean, parse_condition
from intprop.transform import (
    And,
    Const,
    Not,
    Or,
    SigmaNamer,
    TransformConfig,
    UnknownPolicy,
    Var,
    format_formula,
    sigma_name,
    transform_condition,
)

DEFAULT_GUARD = 10**7


class _Present:
    def __repr__(self):
        return "PRESENT"


#: Value of a variable that is only tested with ``defined()``.
PRESENT = _Present()


class _EvalError:
    def __repr__(self):
        return "EVAL_ERROR"


#: Result of evaluating a condition that divides by zero.
EVAL_ERROR = _EvalError()


class GuardExceeded(Exception):
    def __init__(self, product, guard):
        self.product = product
        self.guard = guard
        super().__init__(f"{product} configurations exceed the guard of {guard}")


class UndecodableName(Exception):
    pass


# --- configurations ---------------------------------------------------------


def config_count(model, vars, presence=(), pinned=()):
    sizes = [len(model.entries[v]) + 1 for v in vars]
    sizes += [2] * len(presence)
    return math.prod(sizes)


def enumerate_configs(model, vars, presence=(), pinned=(), guard=DEFAULT_GUARD):
    """Yield every configuration of ``vars`` in lexicographic order.

    Each variable in ``vars`` is undefined (``None``) or one of its values.
    Variables in ``presence`` only toggle between ``None`` and
    :data:`PRESENT`; variables in ``pinned`` always hold their single
    (constant) value and do not multiply the count.
    """
    vars = set(vars)
    presence = set(presence) - vars
    pinned = set(pinned)
    vars -= pinned
    domains = {}
    for v in vars:
        kind = model.classify(v)
        if not isinstance(kind, (Restricted, Constant)):
            raise ValueError(f"{v} has no finite range")
        domains[v] = [None] + list(model.entries[v].values)
    for v in presence:
        domains[v] = [None, PRESENT]
    for v in pinned:
        kind = model.classify(v)
        if not isinstance(kind, Constant):
            raise ValueError(f"{v} is not a constant")
        domains[v] = [kind.value]
    product = math.prod(len(d) for d in domains.values())
    if product > guard:
        raise GuardExceeded(product, guard)
    names = sorted(domains)
    for values in itertools.product(*(domains[n] for n in names)):
        yield dict(zip(names, values))


# --- original condition -------------------------------------------------------


class _Strict:
    def __init__(self, config, zero):
        self.config = config
        self.zero = zero

    def ival(self, expr):
        if isinstance(expr, IntLit):
            return expr.value
        if isinstance(expr, BoolLit):
            return int(expr.value)
        if isinstance(expr, Ident):
            if expr.name in self.zero:
                return 0
            value = self.config.get(expr.name)
            if value is PRESENT:
                raise ValueError(f"{expr.name} has no value in this configuration")
            return value
        if isinstance(expr, Defined):
            return int(self.config.get(expr.name) is not None)
        if isinstance(expr, Unary):
            x = self.ival(expr.operand)
            return None if x is None else cint.UNARY[expr.op](x)
        a = self.ival(expr.lhs)
        b = self.ival(expr.rhs)
        if a is None or b is None:
            return None
        return cint.BINARY[expr.op](a, b)

    def bval(self, expr):
        if isinstance(expr, BoolLit):
            return expr.value
        if isinstance(expr, Defined):
            return self.config.get(expr.name) is not None
        if isinstance(expr, Unary) and expr.op == "!":
            if is_boolean(expr.operand):
                return not self.bval(expr.operand)
            x = self.ival(expr.operand)
            return x is not None and x == 0
        if isinstance(expr, Binary):
            if expr.op == "&&":
                return self.bval(expr.lhs) and self.bval(expr.rhs)
            if expr.op == "||":
                return self.bval(expr.lhs) or self.bval(expr.rhs)
            if expr.op in cint.COMPARISON_OPS:
                a = self.ival(expr.lhs)
                b = self.ival(expr.rhs)
                return a is not None and b is not None and bool(cint.BINARY[expr.op](a, b))
        x = self.ival(expr)
        return x is not None and x != 0


def _cpp_value(expr, config, zero):
    if isinstance(expr, IntLit):
        return expr.value
    if isinstance(expr, BoolLit):
        return int(expr.value)
    if isinstance(expr, Ident):
        value = config.get(expr.name)
        return 0 if value is None or value is PRESENT or expr.name in zero else value
    if isinstance(expr, Defined):
        return int(config.get(expr.name) is not None)
    if isinstance(expr, Unary):
        return cint.UNARY[expr.op](_cpp_value(expr.operand, config, zero))
    if expr.op == "&&":
        return int(bool(_cpp_value(expr.lhs, config, zero)) and bool(_cpp_value(expr.rhs, config, zero)))
    if expr.op == "||":
        return int(bool(_cpp_value(expr.lhs, config, zero)) or bool(_cpp_value(expr.rhs, config, zero)))
    return cint.BINARY[expr.op](_cpp_value(expr.lhs, config, zero), _cpp_value(expr.rhs, config, zero))


def eval_original(expr, config, semantics="strict", zero=frozenset()):
    """Truth value of a parsed condition, or :data:`EVAL_ERROR`.

    ``zero`` names identifiers that read as literal 0 regardless of the
    configuration (the ``zero`` unknown-identifier policy).
    """
    try:
        if semantics == "strict":
            return _Strict(config, zero).bval(expr)
        if semantics == "cpp":
            return _cpp_value(expr, config, zero) != 0
    except cint.DivisionByZero:
        return EVAL_ERROR
    raise ValueError(f"unknown semantics {semantics!r}")


# --- converted formula -----------------------------------------------------


def decode_name(name, config):
    """Map a Boolean variable back to ``(variable, value)``; value None = defined-ness."""
    if name in config:
        return name, None
    var, sep, suffix = name.rpartition("_eq_")
    if sep and var in config:
        digits = suffix[1:] if suffix.startswith("m") else suffix
        if digits.isdigit():
            value = -int(digits) if suffix.startswith("m") else int(digits)
            if sigma_name(var, value) == name:
                return var, value
    raise UndecodableName(name)


def eval_prop(formula, config):
    if isinstance(formula, Var):
        var, value = decode_name(formula.name, config)
        current = config[var]
        if value is None:
            return current is not None
        return current is not PRESENT and current == value
    if isinstance(formula, Const):
        return formula.value
    if isinstance(formula, Not):
        return not eval_prop(formula.operand, config)
    if isinstance(formula, And):
        return all(eval_prop(c, config) for c in formula.children)
    if isinstance(formula, Or):
        return any(eval_prop(c, config) for c in formula.children)
    raise TypeError(f"not a formula: {formula!r}")


# --- equivalence -----------------------------------------------------------


class Verdict(enum.Enum):
    EQUIVALENT = "equivalent"
    COUNTEREXAMPLE = "counterexample"
    NOT_APPLICABLE = "not-applicable"


@dataclass
class EquisatResult:
    verdict: Verdict
    formula: object = None
    configs: int = 0
    excluded: int = 0
    counterexample: Optional[Dict[str, object]] = None
    reason: str = ""
    warnings: list = field(default_factory=list)

    @property
    def equivalent(self):
        return self.verdict is Verdict.EQUIVALENT

    def describe(self):
        if self.verdict is Verdict.EQUIVALENT:
            tail = f", {self.excluded} excluded" if self.excluded else ""
            return f"EQUIVALENT ({self.configs} configs{tail})"
        if self.verdict is Verdict.COUNTEREXAMPLE:
            return f"COUNTEREXAMPLE {format_config(self.counterexample)}"
        return f"NOT APPLICABLE ({self.reason})"


def format_config(config):
    def show(v):
        if v is None:
            return "undef"
        return "defined" if v is PRESENT else str(v)

    return "{" + ", ".join(f"{k}={show(v)}" for k, v in sorted(config.items())) + "}"


def _names(expr, values, defined):
    if isinstance(expr, Ident):
        values.add(expr.name)
    elif isinstance(expr, Defined):
        defined.add(expr.name)
    elif isinstance(expr, Unary):
        _names(expr.operand, values, defined)
    elif isinstance(expr, Binary):
        _names(expr.lhs, values, defined)
        _names(expr.rhs, values, defined)


def check_equisat(
    expr, model, config=None, namer=None, semantics="strict", guard=DEFAULT_GUARD
):
    """Compare a condition with its conversion on every configuration."""
    if isinstance(expr, str):
        expr = parse_condition(expr)
    config = config or TransformConfig()
    result = transform_condition(expr, model, config, namer or SigmaNamer(model))
    out = EquisatResult(Verdict.NOT_APPLICABLE, result.formula, warnings=result.warnings)
    if result.fallback:
        out.reason = "fallback used"
        return out

    values, defined = set(), set()
    _names(expr, values, defined)
    full, pinned, zero = set(), set(), set()
    for name in values:
        kind = model.classify(name)
        if isinstance(kind, Restricted):
            full.add(name)
        elif isinstance(kind, Constant):
            pinned.add(name)
        elif isinstance(kind, Unknown) and config.unknown_policy is UnknownPolicy.ZERO:
            zero.add(name)
        else:
            out.reason = f"{name} is unrestricted"
            return out
    presence = defined - full - pinned

    checked = excluded = 0
    for cfg in enumerate_configs(model, full, presence, pinned, guard):
        expected = eval_original(expr, cfg, semantics, frozenset(zero))
        if expected is EVAL_ERROR:
            excluded += 1
            continue
        checked += 1
        if eval_prop(result.formula, cfg) != expected:
            out.verdict = Verdict.COUNTEREXAMPLE
            out.counterexample = cfg
            out.configs, out.excluded = checked, excluded
            return out
    out.verdict = Verdict.EQUIVALENT
    out.configs, out.excluded = checked, excluded
    return out


def check_text(text, model, config=None, semantics="strict", guard=DEFAULT_GUARD):
    """Convert ``text`` and check it; returns ``(replacement, EquisatResult)``."""
    expr = parse_condition(text)
    res = check_equisat(expr, model, config, semantics=semantics, guard=guard)
    return format_formula(res.formula), res
