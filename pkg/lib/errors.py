"""Exception hierarchy shared by the library and the CLI.

Plain argument mistakes (wrong shape, k out of range, unknown norm) raise
``ValueError`` directly. The classes below mark failures that depend on the
numbers themselves rather than on how a function was called.
"""

from __future__ import annotations

from typing import Any


class AlphaCompoundError(Exception):
    """Base class for library failures the CLI reports without a traceback."""


class DomainError(AlphaCompoundError, ValueError):
    """Input lies outside the mathematical domain of the operation.

    Examples: a singular matrix passed to a real power, a spectrum touching
    the branch cut when a real result is required, a singular scaling matrix
    at a sample point, or a bisection without a bracket.
    """


class NumericalError(AlphaCompoundError, ArithmeticError):
    """A numerical routine failed to converge or was given a degenerate step."""


class IntegrationError(AlphaCompoundError, RuntimeError):
    """ODE integration stopped early.

    Attributes:
        partial: The trajectory up to the last accepted step (a
            ``lib.ode.Trajectory``), or ``None`` when nothing was accepted.
    """

    def __init__(self, message: str, partial: Any = None) -> None:
        super().__init__(message)
        self.partial = partial


__all__ = ["AlphaCompoundError", "DomainError", "IntegrationError", "NumericalError"]
