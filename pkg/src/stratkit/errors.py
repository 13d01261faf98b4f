"""Exception types shared by every module.

Input problems derive from ``InputError`` (the CLI maps them to exit code 1);
broken internal consistency checks raise ``InvariantError`` (exit code 2).
"""


class StratError(Exception):
    """Base class for all package errors."""

    kind = "error"


class InputError(StratError, ValueError):
    kind = "input"


class ValidationError(InputError):
    kind = "validation"


class ShapeError(InputError):
    """A weight vector does not have the shape of a one-parameter weight."""

    kind = "shape"


class StructureError(InputError):
    """Cells do not form a partition, or a component has a gap."""

    kind = "structure"


class InvariantError(StratError, RuntimeError):
    kind = "invariant"
