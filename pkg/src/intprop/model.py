"""Variability model: allowed value ranges of the integer variables.

File format, one entry per line::

    # comment
    VAR_A = {1, 2, 3}
    CONST_A = {2}
    X = 1..4
    N = *
"""

import re
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Mapping, Optional, Tuple

from intprop.cint import INT64_MAX, INT64_MIN

IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")

_LINE_RE = re.compile(r"\s*([^=\s]+)\s*=\s*(.*?)\s*\Z")
_SET_RE = re.compile(r"\{(.*)\}\Z")
_RANGE_RE = re.compile(r"([+-]?\d+)\s*\.\.\s*([+-]?\d+)\Z")
_INT_RE = re.compile(r"[+-]?\d+\Z")


class ModelError(ValueError):
    """Raised for malformed model files; carries the 1-based line number."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class ValueRange:
    """Allowed values of one variable. ``values is None`` means unrestricted."""

    values: Optional[Tuple[int, ...]] = None

    def __post_init__(self):
        if self.values is not None:
            if not self.values:
                raise ValueError("empty range")
            if any(b <= a for a, b in zip(self.values, self.values[1:])):
                raise ValueError("range must be strictly ascending")
            if self.values[0] < INT64_MIN or self.values[-1] > INT64_MAX:
                raise ValueError("range value outside signed 64-bit")

    @classmethod
    def finite(cls, values):
        return cls(tuple(sorted(set(values))))

    @classmethod
    def unrestricted(cls):
        return cls(None)

    @property
    def is_unrestricted(self):
        return self.values is None

    @property
    def is_constant(self):
        return self.values is not None and len(self.values) == 1

    def __len__(self):
        if self.values is None:
            raise TypeError("unrestricted range has no length")
        return len(self.values)


@dataclass(frozen=True)
class Constant:
    value: int


@dataclass(frozen=True)
class Restricted:
    values: Tuple[int, ...]


@dataclass(frozen=True)
class Unrestricted:
    pass


@dataclass(frozen=True)
class Unknown:
    pass


@dataclass(frozen=True)
class VariabilityModel:
    entries: Mapping[str, ValueRange] = field(default_factory=dict)

    def __post_init__(self):
        for name in self.entries:
            if not IDENT_RE.match(name):
                raise ModelError(f"not a C identifier: {name!r}")
        object.__setattr__(self, "entries", MappingProxyType(dict(self.entries)))

    def __reduce__(self):
        return (VariabilityModel, (dict(self.entries),))

    def __contains__(self, name):
        return name in self.entries

    def __len__(self):
        return len(self.entries)

    def classify(self, name):
        rng = self.entries.get(name)
        if rng is None:
            return Unknown()
        if rng.is_unrestricted:
            return Unrestricted()
        if rng.is_constant:
            return Constant(rng.values[0])
        return Restricted(rng.values)

    def dumps(self):
        """Serialize into the canonical model-file form."""
        lines = []
        for name, rng in self.entries.items():
            if rng.is_unrestricted:
                lines.append(f"{name} = *")
            else:
                lines.append(f"{name} = {{{', '.join(map(str, rng.values))}}}")
        return "".join(line + "\n" for line in lines)


def classify(model, name):
    return model.classify(name)


def _parse_int(text, lineno):
    text = text.strip()
    if not _INT_RE.match(text):
        raise ModelError(f"not an integer: {text!r}", lineno)
    value = int(text)
    if not INT64_MIN <= value <= INT64_MAX:
        raise ModelError(f"value outside signed 64-bit: {value}", lineno)
    return value


def _parse_range(text, lineno):
    if text == "*":
        return ValueRange.unrestricted()
    m = _SET_RE.match(text)
    if m:
        body = m.group(1).strip()
        if not body:
            raise ModelError("empty range", lineno)
        values = [_parse_int(part, lineno) for part in body.split(",")]
        if len(set(values)) != len(values):
            raise ModelError("duplicate value in range", lineno)
        return ValueRange.finite(values)
    m = _RANGE_RE.match(text)
    if m:
        lo, hi = _parse_int(m.group(1), lineno), _parse_int(m.group(2), lineno)
        if lo > hi:
            raise ModelError(f"empty range {lo}..{hi}", lineno)
        return ValueRange(tuple(range(lo, hi + 1)))
    raise ModelError(f"malformed range: {text!r}", lineno)


def load_model(text):
    """Parse model-file contents into a :class:`VariabilityModel`."""
    entries = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        m = _LINE_RE.match(line)
        if not m:
            raise ModelError(f"malformed line: {raw!r}", lineno)
        name, rhs = m.groups()
        if not IDENT_RE.match(name):
            raise ModelError(f"not a C identifier: {name!r}", lineno)
        if name in entries:
            raise ModelError(f"duplicate variable {name}", lineno)
        entries[name] = _parse_range(rhs, lineno)
    return VariabilityModel(entries)


def read_model(path):
    with open(path, encoding="utf-8") as f:
        return load_model(f.read())
