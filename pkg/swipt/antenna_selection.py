"""
Receive-antenna subset selection around an inner EE solver.

Two strategies: exhaustive search over every non-empty subset, and the
norm-sorted strategy that ranks antennas by the squared norm of their channel
row and only tries the top-N prefixes. Infeasible subsets are recorded with an
EE of -inf and skipped; they never abort a selection.
"""

import functools
import itertools
import logging
from dataclasses import dataclass, field
from typing import Callable, Iterable, List, Optional, Union

import numpy as np

from swipt.ascent import SolverConfig
from swipt.channel import (
    AntennaSet,
    ChannelMatrix,
    eigen_channels,
    frobenius_row_norms,
    select_rows,
)
from swipt.errors import (
    BracketError,
    CapExceededError,
    ConvergenceError,
    DecompositionError,
    InfeasibleProblemError,
    NonPositivePowerError,
    UnknownStrategyError,
)
from swipt.results import SolveResult
from swipt.solvers import InnerSolverFactory, InnerSolverInterface
from swipt.system_model import Allocation, QosConstraints, SystemParams, screen_parameters

logger = logging.getLogger(__name__)

STRATEGIES = ("fixed_full", "exhaustive", "frobenius")
DEFAULT_INNER_SOLVER = "jeapa"

# solve(lam, params, qos, n_active) -> SolveResult
SubsetSolver = Callable[..., SolveResult]


@dataclass(frozen=True)
class SelectionConfig:
    max_exhaustive_antennas: int = 12

    def __post_init__(self):
        if self.max_exhaustive_antennas < 1:
            raise ValueError("max_exhaustive_antennas must be >= 1")


@dataclass
class SubsetEvaluation:
    """Inner-solver outcome on one antenna subset."""

    antenna_set: AntennaSet
    result: Optional[SolveResult]
    error: Optional[str] = None

    @property
    def ee(self) -> float:
        return float("-inf") if self.result is None else self.result.ee

    @property
    def feasible(self) -> bool:
        return self.result is not None and self.result.feasible


@dataclass
class SelectionOutcome:
    best_set: AntennaSet
    best_result: Optional[SolveResult]
    per_n_table: List[SubsetEvaluation]
    strategy: str
    inner_solver: str
    evaluations: int
    subsets: List[SubsetEvaluation] = field(default_factory=list, repr=False)

    @property
    def ee(self) -> float:
        return float("-inf") if self.best_result is None else self.best_result.ee

    @property
    def best_n(self) -> int:
        return self.best_set.size


@dataclass(frozen=True)
class SelectionScores:
    det_score: float
    trace_score: float
    frob_scores: List[float]
    scalarization_weight: float
    weighted_score: float


def _resolve_solver(solver: Union[str, InnerSolverInterface], cfg: SolverConfig) -> InnerSolverInterface:
    if isinstance(solver, InnerSolverInterface):
        return solver
    return InnerSolverFactory.create_solver(solver, cfg)


def evaluate_subset(h: ChannelMatrix, chi: AntennaSet, params: SystemParams, qos: QosConstraints,
                    solve: SubsetSolver) -> SubsetEvaluation:
    """Run ``solve`` on the eigen-channels of ``h`` restricted to ``chi``."""
    try:
        lam = eigen_channels(select_rows(h, chi))
        screen_parameters(params, lam)
        result = solve(lam, params, qos, chi.size)
    except (InfeasibleProblemError, NonPositivePowerError, ConvergenceError,
            BracketError, DecompositionError) as exc:
        logger.info("antenna set {%s} skipped: %s", chi.label(), exc)
        return SubsetEvaluation(chi, None, str(exc))
    if not result.feasible:
        logger.info("antenna set {%s}: no feasible binary allocation", chi.label())
    return SubsetEvaluation(chi, result)


def best_of(evaluations: Iterable[SubsetEvaluation]) -> Optional[SubsetEvaluation]:
    """Highest EE; ties go to fewer antennas, then the lexicographically smaller set."""
    best = None
    for candidate in evaluations:
        if best is None:
            best = candidate
            continue
        key = (-candidate.ee, candidate.antenna_set.size, candidate.antenna_set.indices)
        if key < (-best.ee, best.antenna_set.size, best.antenna_set.indices):
            best = candidate
    return best


def all_subsets(n_rx: int) -> List[AntennaSet]:
    """Non-empty subsets by size, lexicographic within a size."""
    return [AntennaSet(combo) for size in range(1, n_rx + 1)
            for combo in itertools.combinations(range(n_rx), size)]


def _outcome(evaluated: List[SubsetEvaluation], per_n: List[SubsetEvaluation], strategy: str,
             solver_name: str) -> SelectionOutcome:
    winner = best_of(evaluated)
    logger.info("%s selection with %s: best set {%s}, EE %.6g after %d evaluations",
                strategy, solver_name, winner.antenna_set.label(), winner.ee, len(evaluated))
    return SelectionOutcome(best_set=winner.antenna_set, best_result=winner.result, per_n_table=per_n,
                            strategy=strategy, inner_solver=solver_name, evaluations=len(evaluated),
                            subsets=evaluated)


def exhaustive_search(h: ChannelMatrix, params: SystemParams, qos: QosConstraints, solve: SubsetSolver,
                      solver_name: str, cap: int) -> SelectionOutcome:
    if h.n_rx > cap:
        raise CapExceededError(f"exhaustive search over n_rx={h.n_rx} antennas exceeds the cap of {cap}")
    evaluated = [evaluate_subset(h, chi, params, qos, solve) for chi in all_subsets(h.n_rx)]
    per_n = [best_of(e for e in evaluated if e.antenna_set.size == n) for n in range(1, h.n_rx + 1)]
    return _outcome(evaluated, per_n, "exhaustive", solver_name)


def select_exhaustive(h: ChannelMatrix, params: SystemParams, qos: QosConstraints,
                      solver: Union[str, InnerSolverInterface] = DEFAULT_INNER_SOLVER,
                      cfg: SolverConfig = SolverConfig(),
                      selection: SelectionConfig = SelectionConfig()) -> SelectionOutcome:
    """Run the inner solver on all 2^n_rx - 1 subsets and keep the best."""
    inner = _resolve_solver(solver, cfg)
    return exhaustive_search(h, params, qos, inner.solve, inner.name, selection.max_exhaustive_antennas)


def norm_order(h: ChannelMatrix) -> List[int]:
    """Antenna indices by descending row norm, lower index first on ties."""
    norms = frobenius_row_norms(h)
    return sorted(range(h.n_rx), key=lambda n: (-norms[n], n))


def select_frobenius(h: ChannelMatrix, params: SystemParams, qos: QosConstraints,
                     solver: Union[str, InnerSolverInterface] = DEFAULT_INNER_SOLVER,
                     cfg: SolverConfig = SolverConfig()) -> SelectionOutcome:
    """Try the top-N antennas by row norm for N = 1..n_rx."""
    inner = _resolve_solver(solver, cfg)
    order = norm_order(h)
    evaluated = [evaluate_subset(h, AntennaSet(order[:n]), params, qos, inner.solve)
                 for n in range(1, h.n_rx + 1)]
    return _outcome(evaluated, list(evaluated), "frobenius", inner.name)


def select_full(h: ChannelMatrix, params: SystemParams, qos: QosConstraints,
                solver: Union[str, InnerSolverInterface] = DEFAULT_INNER_SOLVER,
                cfg: SolverConfig = SolverConfig(),
                start: Optional[Allocation] = None) -> SelectionOutcome:
    """Every receive antenna active; the no-selection reference.

    ``start`` is handed to the inner solver as a warm start.
    """
    inner = _resolve_solver(solver, cfg)
    solve = inner.solve if start is None else functools.partial(inner.solve, start=start)
    evaluated = [evaluate_subset(h, AntennaSet.full(h.n_rx), params, qos, solve)]
    return _outcome(evaluated, list(evaluated), "fixed_full", inner.name)


def selection_scores(h_chi: ChannelMatrix, varpi: float, power: float = 1.0,
                     eta: float = 0.1) -> SelectionScores:
    """Determinant and trace criteria of the Gram matrix plus their weighted combination.

    The weighted score assumes equal transmit power ``power / n_tx`` per
    antenna: ``log2 det(I + (P/N_T) H H^H) + varpi * eta * (P/N_T) tr(H H^H)``.
    """
    entries = h_chi.entries
    gram = entries @ entries.conj().T
    try:
        det = float(np.real(np.linalg.det(gram)))
        per_antenna = power / h_chi.n_tx
        sign, logdet = np.linalg.slogdet(np.eye(h_chi.n_rx) + per_antenna * gram)
    except np.linalg.LinAlgError as exc:
        raise DecompositionError(f"Gram determinant failed: {exc}") from exc
    trace = float(np.real(np.trace(gram)))
    weighted = float(logdet) / np.log(2.0) + varpi * eta * per_antenna * trace
    return SelectionScores(det_score=max(det, 0.0), trace_score=trace,
                           frob_scores=frobenius_row_norms(h_chi), scalarization_weight=varpi,
                           weighted_score=weighted)


class SelectionStrategyFactory:
    """Factory class for selection strategies following the Factory Pattern."""

    @staticmethod
    def select(strategy: str, h: ChannelMatrix, params: SystemParams, qos: QosConstraints,
               solver: Union[str, InnerSolverInterface] = DEFAULT_INNER_SOLVER,
               cfg: SolverConfig = SolverConfig(),
               selection: SelectionConfig = SelectionConfig(),
               start: Optional[Allocation] = None) -> SelectionOutcome:
        """Run ``strategy``; ``start`` only applies to the full array, whose eigen-channels it matches."""
        if strategy == "exhaustive":
            return select_exhaustive(h, params, qos, solver, cfg, selection)
        if strategy == "frobenius":
            return select_frobenius(h, params, qos, solver, cfg)
        if strategy == "fixed_full":
            return select_full(h, params, qos, solver, cfg, start)
        raise UnknownStrategyError(f"Unknown selection strategy: {strategy}")
