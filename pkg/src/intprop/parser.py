"""Tokenizer, precedence-climbing parser and printer for ``#if`` conditions.

The accepted dialect is the C-preprocessor constant expression grammar
without function-like macros, character/string literals, ``##`` and the
ternary operator. Conditions using any of those raise :class:`SkipCondition`
so the caller can leave them untouched.
"""

import enum
import re
from dataclasses import dataclass
from typing import NamedTuple, Union

from intprop.cint import INT64_MIN, wrap


class SkipReason(enum.Enum):
    STRING_CONCAT = "string-concat"
    MACRO_FUNCTION_CALL = "macro-function-call"
    CHAR_OR_STRING_LITERAL = "char-or-string-literal"
    SYNTAX_ERROR = "syntax-error"
    UNTERMINATED_COMMENT = "unterminated-comment"


class SkipCondition(Exception):
    """A condition the converter will not touch."""

    def __init__(self, reason, detail=""):
        self.reason = reason
        self.detail = detail
        msg = reason.value if not detail else f"{reason.value}: {detail}"
        super().__init__(msg)


# --- AST -------------------------------------------------------------------


@dataclass(frozen=True)
class IntLit:
    value: int


@dataclass(frozen=True)
class Ident:
    name: str


@dataclass(frozen=True)
class Defined:
    name: str


@dataclass(frozen=True)
class BoolLit:
    value: bool


@dataclass(frozen=True)
class Unary:
    op: str  # "-", "~", "!"
    operand: "CondExpr"


@dataclass(frozen=True)
class Binary:
    op: str
    lhs: "CondExpr"
    rhs: "CondExpr"


CondExpr = Union[IntLit, Ident, Defined, BoolLit, Unary, Binary]

BOOLEAN_BINARY = frozenset(("&&", "||", "==", "!=", "<", "<=", ">", ">="))


def is_boolean(expr):
    """True for nodes whose value is a truth value rather than an integer."""
    if isinstance(expr, (Defined, BoolLit)):
        return True
    if isinstance(expr, Unary):
        return expr.op == "!"
    if isinstance(expr, Binary):
        return expr.op in BOOLEAN_BINARY
    return False


# --- tokens ----------------------------------------------------------------

# Kinds: "int", "ident", "defined", "op", "(", ")"
_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<int>(?:0[xX][0-9a-fA-F]+|0[bB][01]+|[0-9]+)(?:[uU](?:ll|LL|l|L)?|(?:ll|LL|l|L)[uU]?)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<concat>\#\#)
  | (?P<quote>['"])
  | (?P<op><<|>>|<=|>=|==|!=|&&|\|\||[-+*/%&|^~!<>])
  | (?P<paren>[()])
    """,
    re.VERBOSE,
)

_INT_BODY_RE = re.compile(r"(0[xX][0-9a-fA-F]+|0[bB][01]+|[0-9]+)")


def _int_value(text):
    body = _INT_BODY_RE.match(text).group(1)
    if body[:2] in ("0x", "0X"):
        value = int(body[2:], 16)
    elif body[:2] in ("0b", "0B"):
        value = int(body[2:], 2)
    elif len(body) > 1 and body[0] == "0":
        if any(c in "89" for c in body):
            raise SkipCondition(SkipReason.SYNTAX_ERROR, f"bad octal literal {text}")
        value = int(body, 8)
    else:
        value = int(body)
    if value >= 1 << 64:
        raise SkipCondition(SkipReason.SYNTAX_ERROR, f"integer literal too large: {text}")
    return wrap(value)


class Token(NamedTuple):
    kind: str
    value: object
    pos: int


def tokenize(text):
    """Split a condition into tokens, raising :class:`SkipCondition`."""
    tokens = []
    pos = 0
    n = len(text)
    while pos < n:
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise SkipCondition(
                SkipReason.SYNTAX_ERROR, f"unexpected character {text[pos]!r} at {pos}"
            )
        kind = m.lastgroup
        lexeme = m.group()
        if kind == "int":
            # 12abc is a malformed number, not "12" followed by "abc"
            end = m.end()
            if end < n and (text[end].isalnum() or text[end] == "_"):
                raise SkipCondition(SkipReason.SYNTAX_ERROR, f"bad number at {pos}")
            tokens.append(Token("int", _int_value(lexeme), pos))
        elif kind == "ident":
            tokens.append(Token("defined" if lexeme == "defined" else "ident", lexeme, pos))
        elif kind == "op":
            tokens.append(Token("op", lexeme, pos))
        elif kind == "paren":
            tokens.append(Token(lexeme, lexeme, pos))
        elif kind == "concat":
            raise SkipCondition(SkipReason.STRING_CONCAT, f"'##' at {pos}")
        elif kind == "quote":
            raise SkipCondition(SkipReason.CHAR_OR_STRING_LITERAL, f"{lexeme} at {pos}")
        pos = m.end()
    return tokens


# --- parser ----------------------------------------------------------------

# binding power, loosest first
_BINARY_PREC = {
    "||": 1,
    "&&": 2,
    "|": 3,
    "^": 4,
    "&": 5,
    "==": 6, "!=": 6,
    "<": 7, "<=": 7, ">": 7, ">=": 7,
    "<<": 8, ">>": 8,
    "+": 9, "-": 9,
    "*": 10, "/": 10, "%": 10,
}
_UNARY_OPS = frozenset(("-", "+", "~", "!"))


class _Parser:
    def __init__(self, tokens):
        self.tokens = tokens
        self.i = 0

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def take(self):
        tok = self.peek()
        if tok is None:
            raise SkipCondition(SkipReason.SYNTAX_ERROR, "unexpected end of condition")
        self.i += 1
        return tok

    def expect(self, kind):
        tok = self.take()
        if tok.kind != kind:
            raise SkipCondition(SkipReason.SYNTAX_ERROR, f"expected {kind!r} at {tok.pos}")
        return tok

    def expression(self, min_prec=1):
        lhs = self.unary()
        while True:
            tok = self.peek()
            if tok is None or tok.kind != "op":
                return lhs
            prec = _BINARY_PREC.get(tok.value)
            if prec is None or prec < min_prec:
                return lhs
            self.i += 1
            rhs = self.expression(prec + 1)
            lhs = Binary(tok.value, lhs, rhs)

    def unary(self):
        tok = self.peek()
        if tok is not None and tok.kind == "op" and tok.value in _UNARY_OPS:
            self.i += 1
            operand = self.unary()
            if tok.value == "+":
                return operand
            return Unary(tok.value, operand)
        return self.primary()

    def primary(self):
        tok = self.take()
        if tok.kind == "int":
            return IntLit(tok.value)
        if tok.kind == "ident":
            nxt = self.peek()
            if nxt is not None and nxt.kind == "(":
                raise SkipCondition(SkipReason.MACRO_FUNCTION_CALL, f"{tok.value}(...)")
            return Ident(tok.value)
        if tok.kind == "defined":
            if self.peek() is not None and self.peek().kind == "(":
                self.i += 1
                name = self.expect("ident").value
                self.expect(")")
            else:
                name = self.expect("ident").value
            return Defined(name)
        if tok.kind == "(":
            inner = self.expression()
            self.expect(")")
            return inner
        raise SkipCondition(SkipReason.SYNTAX_ERROR, f"unexpected {tok.value!r} at {tok.pos}")


def parse(tokens):
    """Build a :data:`CondExpr` from a token list."""
    if not tokens:
        raise SkipCondition(SkipReason.SYNTAX_ERROR, "empty condition")
    p = _Parser(tokens)
    expr = p.expression()
    if p.peek() is not None:
        tok = p.peek()
        raise SkipCondition(SkipReason.SYNTAX_ERROR, f"trailing {tok.value!r} at {tok.pos}")
    return expr


def parse_condition(text):
    return parse(tokenize(text))


# --- printer ---------------------------------------------------------------


def serialize(expr):
    """Print a condition with explicit parentheses around nested operators.

    Only a left operand using the same ``&&``/``||`` operator is printed
    without parentheses, so left-nested chains stay flat and reparse to the
    identical tree.
    """
    if isinstance(expr, IntLit):
        if expr.value == INT64_MIN:
            return "(-9223372036854775807 - 1)"
        return str(expr.value) if expr.value >= 0 else f"({expr.value})"
    if isinstance(expr, Ident):
        return expr.name
    if isinstance(expr, Defined):
        return f"defined({expr.name})"
    if isinstance(expr, BoolLit):
        return "1" if expr.value else "0"
    if isinstance(expr, Unary):
        inner = serialize(expr.operand)
        if isinstance(expr.operand, (Unary, Binary)):
            inner = f"({inner})"
        return f"{expr.op}{inner}"
    if isinstance(expr, Binary):
        lhs = serialize(expr.lhs)
        rhs = serialize(expr.rhs)
        flat_left = (
            expr.op in ("&&", "||")
            and isinstance(expr.lhs, Binary)
            and expr.lhs.op == expr.op
        )
        if isinstance(expr.lhs, Binary) and not flat_left:
            lhs = f"({lhs})"
        if isinstance(expr.rhs, Binary):
            rhs = f"({rhs})"
        return f"{lhs} {expr.op} {rhs}"
    raise TypeError(f"not a condition node: {expr!r}")
