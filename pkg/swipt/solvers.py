"""
Inner resource-allocation solvers behind one interface.

This module handles solver lookup by name, following the Single
Responsibility Principle: callers ask the factory for ``dm_cvx``, ``jeapa``
or ``moo_lc`` and get an object with a ``solve`` method, so antenna selection
and the harness never branch on the algorithm.
"""

from abc import ABC, abstractmethod
from typing import Dict, List, Optional, Type

from swipt.ascent import SolverConfig
from swipt.channel import EigenChannels
from swipt.dm_cvx import solve_dinkelbach
from swipt.errors import UnknownStrategyError
from swipt.jeapa import solve_jeapa
from swipt.moo_lc import solve_moo_lc
from swipt.results import SolveResult
from swipt.system_model import Allocation, QosConstraints, SystemParams


class InnerSolverInterface(ABC):
    """Solves the fixed-antenna-set EE problem on a set of eigen-channels."""

    name: str = ""

    def __init__(self, cfg: SolverConfig = SolverConfig()):
        self.cfg = cfg

    @abstractmethod
    def solve(self, lam: EigenChannels, params: SystemParams, qos: QosConstraints,
              n_active: int, start: Optional[Allocation] = None) -> SolveResult:
        """Solve on ``lam``; a feasible ``start`` bounds the relaxed EE from below."""
        pass


class DinkelbachSolver(InnerSolverInterface):
    """Relaxed Dinkelbach iteration with rounding."""

    name = "dm_cvx"

    def solve(self, lam, params, qos, n_active, start=None):
        return solve_dinkelbach(lam, params, qos, n_active, self.cfg, start)


class AlternatingSolver(InnerSolverInterface):
    """Alternating assignment and power blocks."""

    name = "jeapa"

    def solve(self, lam, params, qos, n_active, start=None):
        return solve_jeapa(lam, params, qos, n_active, self.cfg, start)


class LowComplexitySolver(InnerSolverInterface):
    """Closed-form init followed by one assignment and one power pass."""

    name = "moo_lc"

    def solve(self, lam, params, qos, n_active, start=None):
        return solve_moo_lc(lam, params, qos, n_active, self.cfg, start)


class InnerSolverFactory:
    """Factory class for creating inner solvers following the Factory Pattern."""

    _registry: Dict[str, Type[InnerSolverInterface]] = {
        cls.name: cls for cls in (DinkelbachSolver, AlternatingSolver, LowComplexitySolver)
    }

    @classmethod
    def available(cls) -> List[str]:
        return list(cls._registry)

    @classmethod
    def create_solver(cls, solver_type: str, cfg: SolverConfig = SolverConfig()) -> InnerSolverInterface:
        """Create an inner solver by name."""
        try:
            return cls._registry[solver_type.lower()](cfg)
        except KeyError:
            raise UnknownStrategyError(f"Unknown solver type: {solver_type}") from None
