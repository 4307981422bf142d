"""
Result types returned by the inner solvers.
"""

from dataclasses import dataclass, field
from typing import Dict, List, Optional

from swipt.channel import EigenChannels
from swipt.errors import NonPositivePowerError
from swipt.system_model import (
    Allocation,
    Metrics,
    QosConstraints,
    SystemParams,
    check_feasible,
    total_power,
)


@dataclass(frozen=True)
class EvaluatedAllocation:
    """An allocation together with its metrics and feasibility."""

    allocation: Allocation
    metrics: Metrics
    feasible: bool

    @property
    def ee(self) -> float:
        return self.metrics.ee

    @classmethod
    def of(cls, alloc: Allocation, lam: EigenChannels, params: SystemParams,
           qos: QosConstraints, n_active: int) -> "EvaluatedAllocation":
        metrics = total_power(alloc, lam, params, n_active)
        return cls(alloc, metrics, check_feasible(alloc, lam, params, qos).feasible)


@dataclass(frozen=True)
class TraceRow:
    """One row of a convergence trace.

    ``step`` is the outer iteration, alternation round or phase number;
    ``event`` is ``iterate`` or ``rounding``.
    """

    step: int
    ee: float
    rate: float
    energy: float
    power: float
    beta: Optional[float] = None
    residual: Optional[float] = None
    max_dual: Optional[float] = None
    phase: Optional[str] = None
    event: str = "iterate"


def trace_row(step: int, evaluated: EvaluatedAllocation, **extra) -> TraceRow:
    m = evaluated.metrics
    return TraceRow(step=step, ee=m.ee, rate=m.rate, energy=m.energy, power=m.total_power, **extra)


@dataclass
class SolveResult:
    """Relaxed optimum, rounded binary solution and the convergence trace."""

    algorithm: str
    relaxed: Optional[EvaluatedAllocation]
    rounded: Optional[EvaluatedAllocation]
    converged: bool
    iterations: Dict[str, int] = field(default_factory=dict)
    trace: List[TraceRow] = field(default_factory=list)

    @property
    def ee(self) -> float:
        """EE of the binary solution, or -inf when rounding found no feasible pattern."""
        if self.rounded is None or not self.rounded.feasible:
            return float("-inf")
        return self.rounded.ee

    @property
    def feasible(self) -> bool:
        return self.rounded is not None and self.rounded.feasible

    @property
    def rounding_drop(self) -> float:
        if self.rounded is None or self.relaxed is None:
            return float("nan")
        return self.relaxed.ee - self.rounded.ee


def safe_evaluate(alloc: Allocation, lam: EigenChannels, params: SystemParams,
                  qos: QosConstraints, n_active: int) -> Optional[EvaluatedAllocation]:
    """Evaluate, or ``None`` when the power model is undefined at this point."""
    try:
        return EvaluatedAllocation.of(alloc, lam, params, qos, n_active)
    except NonPositivePowerError:
        return None
