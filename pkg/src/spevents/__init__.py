"""Spacetime events of indivisible quantum states.

Exact small-qubit state algebra, LI (local and invertible) operator
classification, worldline scenarios and their partition into spacetime
events, environment-relative Hilbert spaces, lattice transition maps, and
finite ontological models for the preparation-independence argument.
"""

from .errors import (
    ArgumentError,
    CapacityError,
    ContradictionError,
    GeometryError,
    ModelError,
    ParseError,
    PreconditionError,
    ShapeError,
    SpeventsError,
    UnknownNameError,
    ValidationError,
)
from .eventgraph import BoundaryMode, build_partition, collapsed_support, delayed_choice_equivalence, simulate
from .figures import BUILTIN_NAMES, builtin
from .dsl import parse, render

__version__ = "0.1.0"

__all__ = [
    "ArgumentError",
    "BUILTIN_NAMES",
    "BoundaryMode",
    "CapacityError",
    "ContradictionError",
    "GeometryError",
    "ModelError",
    "ParseError",
    "PreconditionError",
    "ShapeError",
    "SpeventsError",
    "UnknownNameError",
    "ValidationError",
    "build_partition",
    "builtin",
    "collapsed_support",
    "delayed_choice_equivalence",
    "parse",
    "render",
    "simulate",
]
