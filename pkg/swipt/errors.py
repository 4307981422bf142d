"""
Exception hierarchy for the SWIPT energy-efficiency library.

Every error raised by the library derives from ``SwiptError`` and from the
builtin a caller would naturally catch, so ``except ValueError`` keeps working
for bad inputs while ``except SwiptError`` catches everything we raise.
"""

from typing import Any, Optional


class SwiptError(Exception):
    """Root of all library errors."""


class InvalidDimensionError(SwiptError, ValueError):
    """A matrix or vector was requested with a non-positive dimension."""


class AntennaIndexError(SwiptError, ValueError):
    """An antenna index lies outside ``[0, n_rx)``."""


class LengthMismatchError(SwiptError, ValueError):
    """Allocation and eigen-channel vectors disagree in length."""


class DecompositionError(SwiptError, ArithmeticError):
    """The eigensolver failed to converge or produced non-finite values."""


class NonPositivePowerError(SwiptError, ArithmeticError):
    """Net consumed power is not positive, so EE is undefined."""

    def __init__(self, total_power: float, message: Optional[str] = None):
        self.total_power = total_power
        super().__init__(message or f"total consumed power {total_power:.6g} W is not positive")


class InfeasibleProblemError(SwiptError, ValueError):
    """No allocation satisfies the QoS constraints."""

    def __init__(self, constraint: str, detail: str = "", phase: Optional[str] = None):
        self.constraint = constraint
        self.detail = detail
        self.phase = phase
        where = f" during {phase}" if phase else ""
        super().__init__(f"infeasible {constraint} constraint{where}: {detail}".rstrip(": "))

    def in_phase(self, phase: str) -> "InfeasibleProblemError":
        """Return a copy tagged with the solver phase that hit the infeasibility."""
        return InfeasibleProblemError(self.constraint, self.detail, phase=phase)


class ConvergenceError(SwiptError, RuntimeError):
    """An iteration cap was hit; ``best`` carries the best iterate found."""

    def __init__(self, message: str, best: Any = None, iterations: int = 0,
                 residual: float = float("nan")):
        self.best = best
        self.iterations = iterations
        self.residual = residual
        super().__init__(message)


class BracketError(SwiptError, RuntimeError):
    """Bisection bounds failed to straddle the root."""


class CapExceededError(SwiptError, ValueError):
    """An enumeration would exceed its configured size cap."""


class ConfigError(SwiptError, ValueError):
    """Run configuration could not be parsed or validated."""

    def __init__(self, message: str, field: Optional[str] = None, line: Optional[int] = None):
        self.field = field
        self.line = line
        location = []
        if line is not None:
            location.append(f"line {line}")
        if field:
            location.append(f"field '{field}'")
        prefix = f"[{', '.join(location)}] " if location else ""
        super().__init__(prefix + message)


class UnknownStrategyError(SwiptError, ValueError):
    """A factory was asked for a solver or strategy it does not know."""
