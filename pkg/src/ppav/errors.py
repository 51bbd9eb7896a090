"""Exception types shared by every module.

Two families are distinguished because the command line maps them to
different exit codes: bad input (2) versus a numerical postcondition that
could not be met (3).
"""


class ValidationError(ValueError):
    """Input violates a type invariant (shape, symmetry, definiteness...)."""


class NumericalError(ArithmeticError):
    """A computation broke one of its postconditions or is too ill-conditioned."""
