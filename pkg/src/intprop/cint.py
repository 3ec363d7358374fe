"""64-bit signed integer arithmetic with C-preprocessor semantics.

Every result wraps around in two's complement. Division truncates toward
zero and the remainder takes the sign of the dividend, as in C99. Shift
counts are masked to their low six bits (the x86 convention), so no shift
is ever undefined.
"""

INT64_MIN = -(1 << 63)
INT64_MAX = (1 << 63) - 1
_MASK = (1 << 64) - 1


def wrap(value):
    """Reduce an arbitrary Python int to the signed 64-bit range."""
    value &= _MASK
    if value > INT64_MAX:
        value -= 1 << 64
    return value


class DivisionByZero(ArithmeticError):
    pass


def _div(a, b):
    if b == 0:
        raise DivisionByZero
    q = abs(a) // abs(b)
    if (a < 0) != (b < 0):
        q = -q
    return wrap(q)


def _mod(a, b):
    if b == 0:
        raise DivisionByZero
    r = abs(a) % abs(b)
    return -r if a < 0 else r


BINARY = {
    "+": lambda a, b: wrap(a + b),
    "-": lambda a, b: wrap(a - b),
    "*": lambda a, b: wrap(a * b),
    "/": _div,
    "%": _mod,
    "&": lambda a, b: a & b,
    "|": lambda a, b: a | b,
    "^": lambda a, b: a ^ b,
    "<<": lambda a, b: wrap(a << (b & 63)),
    ">>": lambda a, b: a >> (b & 63),
    "==": lambda a, b: int(a == b),
    "!=": lambda a, b: int(a != b),
    "<": lambda a, b: int(a < b),
    "<=": lambda a, b: int(a <= b),
    ">": lambda a, b: int(a > b),
    ">=": lambda a, b: int(a >= b),
    # Integer-context logical operators; both sides are always evaluated.
    "&&": lambda a, b: int(a != 0 and b != 0),
    "||": lambda a, b: int(a != 0 or b != 0),
}

UNARY = {
    "-": lambda a: wrap(-a),
    "~": lambda a: ~a,
    "!": lambda a: int(a == 0),
}

ARITHMETIC_OPS = frozenset(("+", "-", "*", "/", "%", "&", "|", "^", "<<", ">>"))
COMPARISON_OPS = frozenset(("==", "!=", "<", "<=", ">", ">="))
LOGICAL_OPS = frozenset(("&&", "||"))
