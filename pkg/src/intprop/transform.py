"""Bottom-up conversion of integer sub-expressions to propositional formulas.

Integer sub-expressions evaluate to one of three lattice values:

* :class:`Lit` -- a known integer,
* :class:`TupleSet` -- every candidate result paired with the original
  variable values that produced it,
* :class:`Fallback` -- the exact analysis was abandoned; only the set of
  variables the result depends on is kept.

Comparisons turn these into a :class:`Formula` over the Boolean variables
handed out by :class:`SigmaNamer`.
"""

import enum
import threading
from dataclasses import dataclass, field
from typing import FrozenSet, List, NamedTuple, Tuple

from intprop import cint
from intprop.model import Constant, Restricted, Unknown
from intprop.parser import (
    Binary,
    BoolLit,
    Defined,
    Ident,
    IntLit,
    Unary,
    is_boolean,
    parse_condition,
    serialize,
)


class NameCollision(Exception):
    pass


class UnknownPolicy(enum.Enum):
    UNRESTRICTED = "unrestricted"
    ZERO = "zero"


@dataclass(frozen=True)
class TransformConfig:
    max_combinations: int = 1000
    unknown_policy: UnknownPolicy = UnknownPolicy.UNRESTRICTED

    def __post_init__(self):
        if self.max_combinations < 1:
            raise ValueError("max_combinations must be >= 1")


# --- naming -----------------------------------------------------------------


class _Epsilon:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "EPSILON"


EPSILON = _Epsilon()


def sigma_name(var, value=EPSILON):
    """Boolean variable name for ``var`` having ``value`` (or being defined)."""
    if value is EPSILON:
        return var
    if value < 0:
        return f"{var}_eq_m{-value}"
    return f"{var}_eq_{value}"


class SigmaNamer:
    """Hands out value variables and refuses names that clash.

    A produced name may not equal a model variable, nor a name produced
    earlier for another (variable, value) pair. The registry is guarded by a
    lock so one namer can be shared between threads.
    """

    def __init__(self, model):
        self._reserved = frozenset(model.entries)
        self._produced = {}
        self._cache = {}
        self._lock = threading.Lock()

    def __call__(self, var, value=EPSILON):
        if value is EPSILON:
            return var
        key = (var, value)
        name = self._cache.get(key)
        if name is not None:
            return name
        name = sigma_name(var, value)
        with self._lock:
            self._register(name, key)
            self._cache[key] = name
        return name

    def _register(self, name, key):
        if name in self._reserved:
            raise NameCollision(
                f"generated name {name} for {key[0]}={key[1]} is already a model variable"
            )
        owner = self._produced.get(name)
        if owner is not None and owner != key:
            raise NameCollision(f"generated name {name} used for both {owner} and {key}")
        self._produced[name] = key

    @property
    def produced(self):
        with self._lock:
            return dict(self._produced)

    def merge(self, produced):
        """Fold in the registry of another namer (e.g. from a worker process)."""
        with self._lock:
            for name, key in produced.items():
                self._register(name, tuple(key))
                self._cache[tuple(key)] = name


# --- propositional formulas ------------------------------------------------


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Const:
    value: bool


@dataclass(frozen=True)
class Not:
    operand: "Formula"


@dataclass(frozen=True)
class And:
    children: Tuple["Formula", ...]


@dataclass(frozen=True)
class Or:
    children: Tuple["Formula", ...]


TRUE = Const(True)
FALSE = Const(False)


def conjoin(children):
    children = tuple(children)
    if not children:
        return TRUE
    return children[0] if len(children) == 1 else And(children)


def disjoin(children):
    children = tuple(children)
    if not children:
        return FALSE
    return children[0] if len(children) == 1 else Or(children)


def formula_vars(formula):
    out = set()
    stack = [formula]
    while stack:
        f = stack.pop()
        if isinstance(f, Var):
            out.add(f.name)
        elif isinstance(f, Not):
            stack.append(f.operand)
        elif isinstance(f, (And, Or)):
            stack.extend(f.children)
    return out


def to_condexpr(formula):
    """Lower a formula to a :mod:`intprop.parser` tree for printing."""
    if isinstance(formula, Var):
        return Defined(formula.name)
    if isinstance(formula, Const):
        return BoolLit(formula.value)
    if isinstance(formula, Not):
        return Unary("!", to_condexpr(formula.operand))
    op = "&&" if isinstance(formula, And) else "||"
    children = [to_condexpr(c) for c in formula.children]
    expr = children[0]
    for child in children[1:]:
        expr = Binary(op, expr, child)
    return expr


def format_formula(formula):
    """Print a formula; same text as ``serialize(to_condexpr(formula))``."""
    if isinstance(formula, Var):
        return f"defined({formula.name})"
    if isinstance(formula, Const):
        return "1" if formula.value else "0"
    if isinstance(formula, Not):
        inner = format_formula(formula.operand)
        return f"!({inner})" if isinstance(formula.operand, (Not, And, Or)) else f"!{inner}"
    # Children print left-nested: only the first may stay bare when it uses
    # the same operator; any other compound child gets parentheses.
    op = " && " if isinstance(formula, And) else " || "
    parts = []
    for i, child in enumerate(formula.children):
        text = format_formula(child)
        if isinstance(child, (And, Or)) and not (i == 0 and type(child) is type(formula)):
            text = f"({text})"
        parts.append(text)
    return op.join(parts)


# --- integer evaluation lattice -------------------------------------------


@dataclass(frozen=True)
class Lit:
    value: int


class ValueTuple(NamedTuple):
    current: int
    # (variable, original value) pairs sorted by variable name
    originals: Tuple[Tuple[str, int], ...]


@dataclass
class TupleSet:
    tuples: List[ValueTuple]
    involved: FrozenSet[str]

    def __len__(self):
        return len(self.tuples)


@dataclass(frozen=True)
class Fallback:
    names: FrozenSet[str]

    def __post_init__(self):
        if not self.names:
            raise ValueError("fallback needs at least one variable")


def _involved(value):
    if isinstance(value, TupleSet):
        return value.involved
    if isinstance(value, Fallback):
        return value.names
    return frozenset()


def _merge_originals(a, b):
    if not a:
        return b
    if not b:
        return a
    if a[-1][0] < b[0][0]:
        return a + b
    if b[-1][0] < a[0][0]:
        return b + a
    merged = dict(a)
    merged.update(b)
    return tuple(sorted(merged.items()))


def _pairs(a, b):
    """Group both tuple lists for a consistent join.

    Returns ``(count, groups)`` where groups is a list of ``(left, right)``
    tuple lists whose members agree on every shared variable.
    """
    shared = a.involved & b.involved
    if not shared:
        return len(a.tuples) * len(b.tuples), [(a.tuples, b.tuples)]
    shared = sorted(shared)

    def project(t):
        d = dict(t.originals)
        return tuple(d[v] for v in shared)

    right = {}
    for t in b.tuples:
        right.setdefault(project(t), []).append(t)
    left = {}
    for t in a.tuples:
        left.setdefault(project(t), []).append(t)
    groups = [(lt, right[k]) for k, lt in left.items() if k in right]
    return sum(len(lt) * len(rt) for lt, rt in groups), groups


# --- conversion ---------------------------------------------------------------


@dataclass
class TransformResult:
    formula: object
    fallback: bool = False
    warnings: List[str] = field(default_factory=list)
    max_combinations: int = 0
    limit_hits: int = 0
    tilde_uses: int = 0
    div_zero_drops: int = 0


class _Converter:
    def __init__(self, model, config, namer):
        self.model = model
        self.config = config
        self.namer = namer
        self.result = TransformResult(FALSE)

    def warn(self, message):
        self.result.warnings.append(message)

    # integer context

    def eval_int(self, expr):
        if isinstance(expr, IntLit):
            return Lit(expr.value)
        if isinstance(expr, BoolLit):
            return Lit(int(expr.value))
        if isinstance(expr, Ident):
            return self._ident(expr.name)
        if isinstance(expr, Defined):
            self.warn(f"defined({expr.name}) used as an integer; falling back")
            return Fallback(frozenset((expr.name,)))
        if isinstance(expr, Unary):
            operand = self.eval_int(expr.operand)
            if expr.op == "~":
                self.result.tilde_uses += 1
                self.warn("'~' evaluated as 64-bit signed two's complement")
            return self._unary(cint.UNARY[expr.op], operand)
        if isinstance(expr, Binary):
            return self._binary(expr.op, self.eval_int(expr.lhs), self.eval_int(expr.rhs))
        raise TypeError(f"not an integer expression: {expr!r}")

    def _ident(self, name):
        kind = self.model.classify(name)
        if isinstance(kind, Restricted):
            return TupleSet(
                [ValueTuple(v, ((name, v),)) for v in kind.values], frozenset((name,))
            )
        if isinstance(kind, Constant):
            return Lit(kind.value)
        if isinstance(kind, Unknown):
            if self.config.unknown_policy is UnknownPolicy.ZERO:
                return Lit(0)
            self.warn(f"unknown identifier {name} treated as unrestricted")
        return Fallback(frozenset((name,)))

    def _unary(self, fn, operand):
        if isinstance(operand, Lit):
            return Lit(fn(operand.value))
        if isinstance(operand, TupleSet):
            return TupleSet(
                [ValueTuple(fn(t.current), t.originals) for t in operand.tuples],
                operand.involved,
            )
        return operand

    def _drop(self, count):
        if count:
            self.result.div_zero_drops += count
            self.warn(f"division by zero drops {count} candidate value(s)")

    def _binary(self, op, lhs, rhs):
        fn = cint.BINARY[op]
        if isinstance(lhs, Fallback) or isinstance(rhs, Fallback):
            return Fallback(_involved(lhs) | _involved(rhs))
        if isinstance(lhs, Lit) and isinstance(rhs, Lit):
            try:
                return Lit(fn(lhs.value, rhs.value))
            except cint.DivisionByZero:
                self._drop(1)
                return TupleSet([], frozenset())
        if isinstance(lhs, Lit) or isinstance(rhs, Lit):
            if isinstance(lhs, Lit):
                k, ts = lhs.value, rhs
                apply = lambda cur: fn(k, cur)  # noqa: E731
            else:
                k, ts = rhs.value, lhs
                apply = lambda cur: fn(cur, k)  # noqa: E731
            out = []
            dropped = 0
            for t in ts.tuples:
                try:
                    out.append(ValueTuple(apply(t.current), t.originals))
                except cint.DivisionByZero:
                    dropped += 1
            self._drop(dropped)
            return TupleSet(out, ts.involved)
        count, groups = self._join(lhs, rhs)
        if groups is None:
            return Fallback(lhs.involved | rhs.involved)
        out = []
        dropped = 0
        for left, right in groups:
            for a in left:
                for b in right:
                    try:
                        cur = fn(a.current, b.current)
                    except cint.DivisionByZero:
                        dropped += 1
                        continue
                    out.append(ValueTuple(cur, _merge_originals(a.originals, b.originals)))
        self._drop(dropped)
        return TupleSet(out, lhs.involved | rhs.involved)

    def _join(self, lhs, rhs):
        count, groups = _pairs(lhs, rhs)
        if count > self.result.max_combinations:
            self.result.max_combinations = count
        if count > self.config.max_combinations:
            self.result.limit_hits += 1
            self.warn(
                f"{count} value combinations exceed the limit of "
                f"{self.config.max_combinations}; falling back"
            )
            return count, None
        return count, groups

    # boolean context

    def witness(self, originals):
        return conjoin(Var(self.namer(v, k)) for v, k in originals)

    def resolve(self, op, lhs, rhs):
        fn = cint.BINARY[op]
        if isinstance(lhs, Fallback) or isinstance(rhs, Fallback):
            return self._fallback(_involved(lhs) | _involved(rhs))
        if isinstance(lhs, Lit) and isinstance(rhs, Lit):
            return TRUE if fn(lhs.value, rhs.value) else FALSE
        found = []
        if isinstance(rhs, Lit):
            k = rhs.value
            found = [t.originals for t in lhs.tuples if fn(t.current, k)]
        elif isinstance(lhs, Lit):
            k = lhs.value
            found = [t.originals for t in rhs.tuples if fn(k, t.current)]
        else:
            _, groups = self._join(lhs, rhs)
            if groups is None:
                return self._fallback(lhs.involved | rhs.involved)
            for left, right in groups:
                for a in left:
                    for b in right:
                        if fn(a.current, b.current):
                            found.append(_merge_originals(a.originals, b.originals))
        return disjoin(self.witness(o) for o in sorted(set(found)))

    def _fallback(self, names):
        self.result.fallback = True
        return conjoin(Var(self.namer(v)) for v in sorted(names))

    def to_prop(self, expr):
        if isinstance(expr, BoolLit):
            return TRUE if expr.value else FALSE
        if isinstance(expr, Defined):
            return Var(self.namer(expr.name))
        if isinstance(expr, Unary) and expr.op == "!":
            if is_boolean(expr.operand):
                inner = self.to_prop(expr.operand)
                if isinstance(inner, Const):
                    return FALSE if inner.value else TRUE
                return Not(inner)
            return self.resolve("==", self.eval_int(expr.operand), Lit(0))
        if isinstance(expr, Binary):
            if expr.op == "&&":
                return And((self.to_prop(expr.lhs), self.to_prop(expr.rhs)))
            if expr.op == "||":
                return Or((self.to_prop(expr.lhs), self.to_prop(expr.rhs)))
            if expr.op in cint.COMPARISON_OPS:
                return self.resolve(expr.op, self.eval_int(expr.lhs), self.eval_int(expr.rhs))
        return self.resolve("!=", self.eval_int(expr), Lit(0))


def fold_constants(expr, model):
    """Replace every identifier with a single allowed value by that literal."""
    if isinstance(expr, Ident):
        kind = model.classify(expr.name)
        return IntLit(kind.value) if isinstance(kind, Constant) else expr
    if isinstance(expr, Unary):
        operand = fold_constants(expr.operand, model)
        return expr if operand is expr.operand else Unary(expr.op, operand)
    if isinstance(expr, Binary):
        lhs = fold_constants(expr.lhs, model)
        rhs = fold_constants(expr.rhs, model)
        if lhs is expr.lhs and rhs is expr.rhs:
            return expr
        return Binary(expr.op, lhs, rhs)
    return expr


def _setup(model, config, namer):
    return _Converter(model, config or TransformConfig(), namer or SigmaNamer(model))


def eval_int(expr, model, config=None, namer=None):
    """Evaluate an integer-valued tree to a Lit, TupleSet or Fallback."""
    return _setup(model, config, namer).eval_int(expr)


def resolve_comparison(op, lhs, rhs, model, config=None, namer=None):
    if op not in cint.COMPARISON_OPS:
        raise ValueError(f"not a comparison operator: {op}")
    conv = _setup(model, config, namer)
    return conv.resolve(op, lhs, rhs)


def transform_condition(expr, model, config=None, namer=None):
    """Turn a parsed condition into a :class:`TransformResult`.

    Constants are folded first; the result's ``formula`` mentions only
    generated value variables and defined-ness variables.
    """
    conv = _setup(model, config, namer)
    conv.result.formula = conv.to_prop(fold_constants(expr, model))
    return conv.result


@dataclass
class Conversion:
    text: str
    expr: object
    result: TransformResult

    @property
    def formula(self):
        return self.result.formula


def convert_condition(text, model, config=None, namer=None):
    """Parse, transform and print one condition.

    Raises :class:`intprop.parser.SkipCondition` for conditions that cannot
    be converted.
    """
    expr = parse_condition(text)
    result = transform_condition(expr, model, config, namer)
    return Conversion(format_formula(result.formula), expr, result)
