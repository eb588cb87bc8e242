"""Exception hierarchy.

Every error carries the CLI exit code it maps to, so the command line
front end can translate failures without a lookup table of its own.
"""


class GSError(Exception):
    """Base class for all library errors."""

    exit_code = 1


class ParseError(GSError):
    """Malformed profile or expression text."""

    exit_code = 2

    def __init__(self, message, text="", position=None):
        self.text = text
        self.position = position
        if position is not None:
            message = f"{message} at position {position}"
            if text:
                message += f"\n  {text}\n  {' ' * position}^"
        super().__init__(message)


class DomainError(GSError, ValueError):
    """A function was evaluated outside of its real domain.

    ``subexpr`` is the printed form of the failing subexpression and
    ``index`` its pre-order position inside the evaluated tree (``None``
    when the failure did not come from an expression tree).
    """

    exit_code = 5

    def __init__(self, message, subexpr=None, index=None):
        self.subexpr = subexpr
        self.index = index
        if subexpr is not None:
            message = f"{message} in subexpression #{index}: {subexpr}"
        super().__init__(message)


class ParameterError(GSError, ValueError):
    """Parameters outside the admissible range of a family or operation."""

    exit_code = 2


class ConstraintError(ParameterError):
    """A family constraint has no real solution or is violated."""


class ClassMismatch(GSError, ValueError):
    """A symmetry map was applied to a solution of the wrong symmetry class."""

    exit_code = 4


class NoReduction(GSError, ValueError):
    """The symmetry class admits no reduced ODE."""

    exit_code = 3


class NumericFailure(GSError, RuntimeError):
    """Integrator or root finder failure."""

    exit_code = 5


class VerificationFailure(GSError):
    """A residual gate rejected a solution or field."""

    exit_code = 4
