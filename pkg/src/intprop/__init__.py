"""Convert integer-based C-preprocessor ``#if`` conditions to propositional form.

The main entry points are :func:`intprop.model.load_model`,
:func:`intprop.transform.convert_condition` and
:func:`intprop.rewrite.rewrite_tree`.
"""

from intprop.model import ValueRange, VariabilityModel, load_model
from intprop.parser import SkipCondition, SkipReason, parse_condition, serialize
from intprop.transform import (
    NameCollision,
    SigmaNamer,
    TransformConfig,
    UnknownPolicy,
    convert_condition,
)

__all__ = [
    "NameCollision",
    "SigmaNamer",
    "SkipCondition",
    "SkipReason",
    "TransformConfig",
    "UnknownPolicy",
    "ValueRange",
    "VariabilityModel",
    "convert_condition",
    "load_model",
    "parse_condition",
    "serialize",
]

__version__ = "0.1.0"
