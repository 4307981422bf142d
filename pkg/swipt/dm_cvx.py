"""
Dinkelbach-method EE maximisation over the relaxed assignment.

The EE ratio U_R / U_T is maximised by a sequence of subtractive problems
``max U_R - beta * U_T`` over the relaxed feasible set. beta starts at zero
and is replaced by the EE of each subtractive optimum until the optimal
residual drops below ``delta``. The relaxed optimum is then rounded and its
powers are re-optimised for the binary assignment.

The subtractive objective is concave in the powers at fixed assignment and
concave in the assignment at fixed powers, but the harvested-energy term
couples the two bilinearly. Each subtractive problem is therefore solved from
several starting assignments (every binary pattern on small channel counts)
and the best KKT point is kept.
"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from swipt.ascent import (
    SmoothProblem,
    SolverConfig,
    choose_best,
    kkt_residual,
    inner_or_best,
    polish,
)
from swipt.channel import EigenChannels
from swipt.errors import ConvergenceError, InfeasibleProblemError
from swipt.jeapa import (
    feasible_power_start,
    finalize,
    initial_point,
    round_and_reoptimize,
    start_patterns,
)
from swipt.results import EvaluatedAllocation, SolveResult, trace_row
from swipt.system_model import (
    ALPHA_FLOOR,
    LOG2E,
    Allocation,
    QosConstraints,
    SystemParams,
    rate_terms,
    sum_rate,
    total_power,
)

logger = logging.getLogger(__name__)

__all__ = [
    "DinkelbachState",
    "SolveResult",
    "SolverConfig",
    "solve_dinkelbach",
    "solve_subtractive",
    "subtractive_problem",
    "u_r",
    "u_t",
]


@dataclass
class DinkelbachState:
    """Current EE estimate, the residual at the last subtractive optimum and their history."""

    beta: float = 0.0
    residual: float = float("inf")
    trace: List[Tuple[float, float]] = field(default_factory=list)

    def record(self, beta: float, residual: float) -> None:
        if beta < 0:
            raise ValueError(f"beta must be non-negative, got {beta}")
        self.beta = beta
        self.residual = residual
        self.trace.append((beta, residual))


def u_r(alloc: Allocation, lam: EigenChannels) -> float:
    """Numerator of the EE ratio: relaxed sum-rate."""
    return sum_rate(alloc, lam)


def u_t(alloc: Allocation, lam: EigenChannels, params: SystemParams, n_active: int) -> float:
    """Denominator of the EE ratio: net consumed power. Raises NonPositivePowerError if <= 0."""
    return total_power(alloc, lam, params, n_active).total_power


def _split(x: np.ndarray, count: int) -> Tuple[np.ndarray, np.ndarray]:
    return x[:count], x[count:]


def subtractive_problem(beta: float, lam: EigenChannels, params: SystemParams, qos: QosConstraints,
                        n_active: int) -> SmoothProblem:
    """``U_R - beta * U_T`` over x = [p, a] with the rate, energy and budget constraints."""
    gains = lam.gains
    count = lam.count
    p_fix = params.fixed_power(n_active)

    def rate(x):
        p, a = _split(x, count)
        return float(np.sum(rate_terms(a, p, gains)))

    def energy(x):
        p, a = _split(x, count)
        return params.eta * float(np.sum((1.0 - a) * p * gains))

    def rate_grad(x):
        p, a = _split(x, count)
        safe = np.maximum(a, ALPHA_FLOOR)
        dp = np.where(a > ALPHA_FLOOR, a * gains * LOG2E / (safe + p * gains), 0.0)
        snr = p * gains / safe
        da = np.log2(1.0 + snr) - snr * LOG2E / (1.0 + snr)
        return np.concatenate([dp, da])

    def energy_grad(x):
        p, a = _split(x, count)
        return params.eta * np.concatenate([(1.0 - a) * gains, -p * gains])

    def objective(x):
        p, _ = _split(x, count)
        consumed = params.zeta * float(np.sum(p)) + p_fix - energy(x)
        return rate(x) - beta * consumed

    def gradient(x):
        consumed_grad = np.concatenate([np.full(count, params.zeta), np.zeros(count)]) - energy_grad(x)
        return rate_grad(x) - beta * consumed_grad

    def constraints(x):
        p, _ = _split(x, count)
        return np.array([rate(x) - qos.r_min, energy(x) - qos.e_min, qos.p_max - float(np.sum(p))])

    def jacobian(x):
        budget = np.concatenate([-np.ones(count), np.zeros(count)])
        return np.vstack([rate_grad(x), energy_grad(x), budget])

    return SmoothProblem(objective, gradient, constraints, jacobian,
                         lower=np.zeros(2 * count),
                         upper=np.concatenate([np.full(count, qos.p_max), np.ones(count)]))


def fixed_assignment_problem(beta: float, assign: np.ndarray, lam: EigenChannels, params: SystemParams,
                             qos: QosConstraints, n_active: int) -> SmoothProblem:
    """The subtractive problem restricted to the powers, a concave program."""
    joint = subtractive_problem(beta, lam, params, qos, n_active)
    assign = np.asarray(assign, dtype=float)
    count = lam.count

    def lift(p):
        return np.concatenate([p, assign])

    return SmoothProblem(
        objective=lambda p: joint.objective(lift(p)),
        gradient=lambda p: joint.gradient(lift(p))[:count],
        constraints=lambda p: joint.constraints(lift(p)),
        jacobian=lambda p: joint.jacobian(lift(p))[:, :count],
        lower=np.zeros(count), upper=np.full(count, qos.p_max),
    )


@dataclass
class SubtractiveSolution:
    allocation: Allocation
    objective: float
    kkt: float
    iterations: int


def solve_subtractive_block(beta: float, lam: EigenChannels, params: SystemParams, qos: QosConstraints,
                            n_active: int, cfg: SolverConfig = SolverConfig(),
                            start: Optional[Allocation] = None) -> SubtractiveSolution:
    if beta < 0:
        raise ValueError(f"beta must be non-negative, got {beta}")
    count = lam.count
    problem = subtractive_problem(beta, lam, params, qos, n_active)

    def pack(alloc: Allocation) -> np.ndarray:
        return np.concatenate([alloc.power, alloc.assign])

    candidates = []
    if start is not None and problem.is_feasible(pack(start)):
        candidates.append(pack(start))
    else:
        candidates.append(pack(initial_point(lam, params, qos, cfg)))

    iterations = 0
    for pattern in start_patterns(count, cfg):
        restricted = fixed_assignment_problem(beta, pattern, lam, params, qos, n_active)
        try:
            p0 = feasible_power_start(pattern, lam, params, qos, restricted, cfg)
        except InfeasibleProblemError:
            continue
        stage_one = inner_or_best(restricted, p0, cfg)
        iterations += stage_one.iterations
        x1 = np.concatenate([stage_one.x, pattern])
        candidates.append(x1)
        stage_two = inner_or_best(problem, x1, cfg)
        iterations += stage_two.iterations
        candidates.append(stage_two.x)

    best = choose_best(problem, candidates)
    residual = kkt_residual(problem, best)
    if residual > cfg.kkt_tol:
        refined = polish(problem, best, cfg.max_inner)
        best = choose_best(problem, [best, refined])
        residual = kkt_residual(problem, best)
    p, a = _split(best, count)
    logger.debug("subtractive beta=%.9g: objective=%.9g kkt=%.3g", beta, problem.objective(best), residual)
    return SubtractiveSolution(Allocation(a, p), problem.objective(best), residual, iterations)


def solve_subtractive(beta: float, lam: EigenChannels, params: SystemParams, qos: QosConstraints,
                      n_active: int, cfg: SolverConfig = SolverConfig(),
                      start: Optional[Allocation] = None) -> Allocation:
    """Maximiser of ``U_R - beta * U_T`` meeting the KKT tolerance.

    Raises InfeasibleProblemError when no feasible point exists and
    ConvergenceError, carrying the best iterate, when the KKT residual stays
    above ``cfg.kkt_tol``.
    """
    solution = solve_subtractive_block(beta, lam, params, qos, n_active, cfg, start)
    if solution.kkt > cfg.kkt_tol:
        raise ConvergenceError(
            f"subtractive problem at beta={beta:.6g} ended with KKT residual {solution.kkt:.3g}",
            best=solution.allocation, iterations=solution.iterations, residual=solution.kkt)
    return solution.allocation


def run_dinkelbach(lam: EigenChannels, params: SystemParams, qos: QosConstraints, n_active: int,
                   cfg: SolverConfig = SolverConfig(), start: Optional[Allocation] = None):
    """Outer beta iteration; returns (relaxed point, state, converged, inner iterations, trace).

    beta starts at zero, or at the EE of ``start`` when that point is feasible.
    """
    state = DinkelbachState()
    trace = []
    incumbent: Optional[Allocation] = None
    if start is not None:
        seed = EvaluatedAllocation.of(start, lam, params, qos, n_active)
        if seed.feasible and seed.ee > 0:
            state.beta = seed.ee
            incumbent = start
    current: Optional[EvaluatedAllocation] = None
    inner = 0
    converged = False
    for n in range(1, cfg.max_outer + 1):
        beta = state.beta
        block = solve_subtractive_block(beta, lam, params, qos, n_active, cfg, start=incumbent)
        inner += block.iterations
        if block.kkt > cfg.kkt_tol:
            logger.warning("dinkelbach iteration %d: KKT residual %.3g above tolerance, continuing "
                           "from best iterate", n, block.kkt)
        solution = block.allocation
        current = EvaluatedAllocation.of(solution, lam, params, qos, n_active)
        residual = current.metrics.rate - beta * current.metrics.total_power
        state.record(beta, residual)
        trace.append(trace_row(n, current, beta=beta, residual=residual))
        logger.debug("dinkelbach iteration %d: beta=%.9g residual=%.3g", n, beta, residual)
        if residual <= cfg.delta:
            converged = True
            break
        state.beta = current.ee
        incumbent = solution
    if not converged:
        logger.warning("dinkelbach stopped at max_outer=%d with residual %.3g", cfg.max_outer, state.residual)
    return current, state, converged, inner, trace


def solve_dinkelbach(lam: EigenChannels, params: SystemParams, qos: QosConstraints, n_active: int,
                     cfg: SolverConfig = SolverConfig(), start: Optional[Allocation] = None) -> SolveResult:
    relaxed, state, converged, inner, trace = run_dinkelbach(lam, params, qos, n_active, cfg, start)
    rounding = round_and_reoptimize(relaxed.allocation, lam, params, qos, n_active, cfg)
    return finalize("dm_cvx", relaxed, rounding, converged,
                    {"outer": len(state.trace), "inner": inner}, trace)
