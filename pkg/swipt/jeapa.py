"""
Joint eigen-channel assignment and power allocation by alternating optimisation.

Each round first optimises the relaxed assignment for the current powers and
then the powers for the new assignment. Both blocks maximise the same EE ratio,
so the per-round EE never decreases. The alternation is run from several
feasible starts and the best relaxed point is kept. Its assignment is then
rounded, repaired if needed, and the powers are re-optimised for the binary
pattern.

The gradients of both block Lagrangians are derived from the objective and
constraint definitions and checked against finite differences in the tests.
"""

import itertools
import logging
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from swipt.ascent import (
    SmoothProblem,
    SolverConfig,
    inner_or_best,
    polish,
)
from swipt.channel import EigenChannels
from swipt.errors import InfeasibleProblemError
from swipt.results import (
    EvaluatedAllocation,
    SolveResult,
    trace_row,
)
from swipt.system_model import (
    ALPHA_FLOOR,
    LOG2E,
    Allocation,
    QosConstraints,
    SystemParams,
    check_feasible,
    min_power_allocation,
    pattern_feasible,
    rate_terms,
    round_assignment,
    water_filling,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class EffectiveChannels:
    """Gains seen by each block once the other block is held fixed."""

    lam_hat: np.ndarray
    lam_check: np.ndarray
    lam_tilde: np.ndarray
    p_fix: float
    p_fix_tilde: float

    @classmethod
    def of(cls, alloc: Allocation, lam: EigenChannels, params: SystemParams,
           n_active: int) -> "EffectiveChannels":
        gains = lam.gains
        lam_tilde = alloc.power * gains
        p_fix = params.fixed_power(n_active)
        return cls(
            lam_hat=gains / np.maximum(alloc.assign, ALPHA_FLOOR),
            lam_check=(1.0 - alloc.assign) * gains,
            lam_tilde=lam_tilde,
            p_fix=p_fix,
            p_fix_tilde=params.zeta * float(np.sum(alloc.power)) + p_fix
            - params.eta * float(np.sum(lam_tilde)),
        )


@dataclass(frozen=True)
class PowerDuals:
    rho: float = 0.0
    kappa: float = 0.0
    xi: float = 0.0

    def __post_init__(self):
        if min(self.rho, self.kappa, self.xi) < 0:
            raise ValueError("power multipliers must be non-negative")

    def as_array(self) -> np.ndarray:
        return np.array([self.rho, self.kappa, self.xi])

    @classmethod
    def from_array(cls, values: np.ndarray) -> "PowerDuals":
        return cls(*(float(v) for v in values[:3]))


@dataclass(frozen=True)
class AssignDuals:
    tau: float = 0.0
    sigma_c: float = 0.0
    nu: Tuple[float, ...] = ()

    def __post_init__(self):
        if min((self.tau, self.sigma_c) + tuple(self.nu)) < 0:
            raise ValueError("assignment multipliers must be non-negative")

    def as_array(self) -> np.ndarray:
        return np.array([self.tau, self.sigma_c, *self.nu])

    @classmethod
    def from_array(cls, values: np.ndarray) -> "AssignDuals":
        return cls(float(values[0]), float(values[1]), tuple(float(v) for v in values[2:]))


@dataclass
class BlockResult:
    allocation: Allocation
    duals: np.ndarray
    iterations: int
    kkt: float
    polished: bool


# -- power block ---------------------------------------------------------------

def power_problem(assign: np.ndarray, lam: EigenChannels, params: SystemParams,
                  qos: QosConstraints, n_active: int) -> SmoothProblem:
    """EE over the powers at a fixed assignment; constraints rate, energy, budget."""
    assign = np.asarray(assign, dtype=float)
    gains = lam.gains
    decoding = assign > ALPHA_FLOOR
    eff = EffectiveChannels.of(Allocation(assign, np.zeros(gains.size)), lam, params, n_active)
    cost = params.zeta - params.eta * eff.lam_check

    def rate(p):
        return float(np.sum(rate_terms(assign, p, gains)))

    def rate_grad(p):
        return np.where(decoding, assign * eff.lam_hat * LOG2E / (1.0 + p * eff.lam_hat), 0.0)

    def denominator(p):
        return float(np.sum(cost * p)) + eff.p_fix

    def objective(p):
        return rate(p) / denominator(p)

    def gradient(p):
        d = denominator(p)
        return rate_grad(p) / d - rate(p) * cost / d ** 2

    def constraints(p):
        return np.array([
            rate(p) - qos.r_min,
            params.eta * float(np.sum(eff.lam_check * p)) - qos.e_min,
            qos.p_max - float(np.sum(p)),
        ])

    def jacobian(p):
        return np.vstack([rate_grad(p), params.eta * eff.lam_check, -np.ones(gains.size)])

    return SmoothProblem(objective, gradient, constraints, jacobian,
                         lower=np.zeros(gains.size), upper=np.full(gains.size, qos.p_max))


def power_lagrangian(power: np.ndarray, assign: np.ndarray, duals: PowerDuals, lam: EigenChannels,
                     params: SystemParams, qos: QosConstraints, n_active: int) -> float:
    """EE plus multiplier-weighted rate, energy and budget slacks at fixed assignment."""
    problem = power_problem(assign, lam, params, qos, n_active)
    return problem.objective(power) + float(duals.as_array() @ problem.constraints(power))


def power_lagrangian_gradient(power: np.ndarray, assign: np.ndarray, duals: PowerDuals,
                              lam: EigenChannels, params: SystemParams, qos: QosConstraints,
                              n_active: int) -> np.ndarray:
    problem = power_problem(assign, lam, params, qos, n_active)
    return problem.gradient(power) + problem.jacobian(power).T @ duals.as_array()


def feasible_power_start(assign: np.ndarray, lam: EigenChannels, params: SystemParams, qos: QosConstraints,
                 problem: SmoothProblem, cfg: SolverConfig) -> np.ndarray:
    """A feasible power vector for ``assign``, or InfeasibleProblemError."""
    gains = lam.gains
    harvest_gain = (1.0 - assign) * gains
    if params.eta * qos.p_max * float(np.max(harvest_gain)) < qos.e_min - 1e-12:
        raise InfeasibleProblemError("energy", "harvesting channels cannot deliver e_min within p_max")
    if np.all((assign == 0.0) | (assign == 1.0)):
        alloc = min_power_allocation(assign, lam, params, qos)
        if alloc is None or not problem.is_feasible(alloc.power):
            raise InfeasibleProblemError("power", f"binary pattern {assign.tolist()} needs more than p_max")
        return alloc.power
    uniform = np.full(gains.size, qos.p_max / gains.size)
    if problem.is_feasible(uniform):
        return uniform
    phase_one = SmoothProblem(
        objective=lambda p: problem.constraints(p)[0],
        gradient=lambda p: problem.jacobian(p)[0],
        constraints=lambda p: problem.constraints(p)[1:],
        jacobian=lambda p: problem.jacobian(p)[1:],
        lower=problem.lower, upper=problem.upper,
    )
    best = polish(phase_one, uniform, cfg.max_inner)
    if not problem.is_feasible(best):
        raise InfeasibleProblemError("rate", "r_min unreachable at this assignment")
    return best


def power_allocation_block(assign, lam: EigenChannels, params: SystemParams, qos: QosConstraints,
                           n_active: int, cfg: SolverConfig = SolverConfig(),
                           start: Optional[Allocation] = None) -> BlockResult:
    assign = np.asarray(assign, dtype=float)
    problem = power_problem(assign, lam, params, qos, n_active)
    if start is not None and problem.is_feasible(start.power):
        p0 = np.asarray(start.power, dtype=float)
    else:
        p0 = feasible_power_start(assign, lam, params, qos, problem, cfg)
    solution = inner_or_best(problem, p0, cfg)
    power = solution.x
    if not solution.feasible or problem.objective(power) < problem.objective(p0):
        power = p0
    return BlockResult(Allocation(assign, power), solution.duals, solution.iterations,
                       solution.kkt, solution.polished)


def power_allocation(assign, lam: EigenChannels, params: SystemParams, qos: QosConstraints,
                     n_active: int, cfg: SolverConfig = SolverConfig(),
                     start: Optional[Allocation] = None) -> Allocation:
    """EE-maximising powers for a fixed (relaxed or binary) assignment."""
    return power_allocation_block(assign, lam, params, qos, n_active, cfg, start).allocation


# -- assignment block ----------------------------------------------------------

def assignment_problem(power: np.ndarray, lam: EigenChannels, params: SystemParams,
                       qos: QosConstraints, n_active: int) -> SmoothProblem:
    """EE over the relaxed assignment at fixed powers; constraints rate, energy, a <= 1."""
    power = np.asarray(power, dtype=float)
    count = lam.count
    eff = EffectiveChannels.of(Allocation(np.ones(count), power), lam, params, n_active)
    lam_tilde = eff.lam_tilde

    def rate(a):
        return float(np.sum(rate_terms(a, power, lam.gains)))

    def rate_grad(a):
        x = lam_tilde / np.maximum(a, ALPHA_FLOOR)
        return np.log2(1.0 + x) - x * LOG2E / (1.0 + x)

    def denominator(a):
        return eff.p_fix_tilde + params.eta * float(np.sum(a * lam_tilde))

    def objective(a):
        return rate(a) / denominator(a)

    def gradient(a):
        d = denominator(a)
        return rate_grad(a) / d - rate(a) * params.eta * lam_tilde / d ** 2

    def constraints(a):
        head = [rate(a) - qos.r_min, params.eta * float(np.sum((1.0 - a) * lam_tilde)) - qos.e_min]
        return np.concatenate([head, 1.0 - a])

    def jacobian(a):
        return np.vstack([rate_grad(a), -params.eta * lam_tilde, -np.eye(count)])

    return SmoothProblem(objective, gradient, constraints, jacobian,
                         lower=np.zeros(count), upper=np.ones(count))


def assignment_lagrangian(assign: np.ndarray, power: np.ndarray, duals: AssignDuals,
                          lam: EigenChannels, params: SystemParams, qos: QosConstraints,
                          n_active: int) -> float:
    """EE plus multiplier-weighted rate, energy and upper-bound slacks at fixed powers."""
    problem = assignment_problem(power, lam, params, qos, n_active)
    return problem.objective(assign) + float(duals.as_array() @ problem.constraints(assign))


def assignment_lagrangian_gradient(assign: np.ndarray, power: np.ndarray, duals: AssignDuals,
                                   lam: EigenChannels, params: SystemParams, qos: QosConstraints,
                                   n_active: int) -> np.ndarray:
    problem = assignment_problem(power, lam, params, qos, n_active)
    return problem.gradient(assign) + problem.jacobian(assign).T @ duals.as_array()


def _assignment_start(power: np.ndarray, lam: EigenChannels, params: SystemParams,
                      qos: QosConstraints, problem: SmoothProblem, cfg: SolverConfig) -> np.ndarray:
    lam_tilde = power * lam.gains
    available = params.eta * float(np.sum(lam_tilde))
    if available < qos.e_min - 1e-12:
        raise InfeasibleProblemError("energy", f"harvestable {available:.6g} W < e_min {qos.e_min:.6g} W")
    if float(np.sum(np.log2(1.0 + lam_tilde))) < qos.r_min - 1e-12:
        raise InfeasibleProblemError("rate", "r_min unreachable even with every channel decoding")
    # largest common share that still meets the energy requirement
    share = 1.0 if available <= 0 else 1.0 - qos.e_min / available
    a0 = np.full(lam.count, float(np.clip(share, 0.0, 1.0)))
    if problem.is_feasible(a0):
        return a0
    phase_one = SmoothProblem(
        objective=lambda a: problem.constraints(a)[0],
        gradient=lambda a: problem.jacobian(a)[0],
        constraints=lambda a: problem.constraints(a)[1:],
        jacobian=lambda a: problem.jacobian(a)[1:],
        lower=problem.lower, upper=problem.upper,
    )
    best = polish(phase_one, a0, cfg.max_inner)
    if not problem.is_feasible(best):
        raise InfeasibleProblemError("rate", "r_min and e_min cannot both be met at these powers")
    return best


def eigen_assignment_block(power, lam: EigenChannels, params: SystemParams, qos: QosConstraints,
                           n_active: int, cfg: SolverConfig = SolverConfig(),
                           start: Optional[Allocation] = None) -> BlockResult:
    power = np.asarray(power, dtype=float)
    problem = assignment_problem(power, lam, params, qos, n_active)
    if not np.any(power > 0):
        if qos.r_min > 0 or qos.e_min > 0:
            raise InfeasibleProblemError("rate" if qos.r_min > 0 else "energy", "all powers are zero")
        a0 = np.ones(lam.count) if start is None else np.asarray(start.assign, dtype=float)
        return BlockResult(Allocation(a0, power), np.zeros(2 + lam.count), 0, 0.0, False)
    if start is not None and problem.is_feasible(np.asarray(start.assign, dtype=float)):
        a0 = np.asarray(start.assign, dtype=float)
    else:
        a0 = _assignment_start(power, lam, params, qos, problem, cfg)
    solution = inner_or_best(problem, a0, cfg)
    assign = solution.x
    if not solution.feasible or problem.objective(assign) < problem.objective(a0):
        assign = a0
    return BlockResult(Allocation(assign, power), solution.duals, solution.iterations,
                       solution.kkt, solution.polished)


def eigen_assignment(power, lam: EigenChannels, params: SystemParams, qos: QosConstraints,
                     n_active: int, cfg: SolverConfig = SolverConfig(),
                     start: Optional[Allocation] = None) -> Allocation:
    """EE-maximising relaxed assignment in [0, 1]^L for fixed powers."""
    return eigen_assignment_block(power, lam, params, qos, n_active, cfg, start).allocation


# -- initialisation and rounding -----------------------------------------------

def start_patterns(count: int, cfg: SolverConfig) -> List[np.ndarray]:
    """Assignments the multi-start solvers are seeded from."""
    patterns = [np.ones(count), np.full(count, 0.5)]
    if count <= cfg.exhaustive_start_channels:
        patterns += [np.array(bits, dtype=float) for bits in itertools.product((1.0, 0.0), repeat=count)]
    else:
        patterns += [np.where(np.arange(count) == k, 0.0, 1.0) for k in range(count)]
    unique = []
    for pattern in patterns:
        if not any(np.array_equal(pattern, seen) for seen in unique):
            unique.append(pattern)
    return unique


def _bisect_share(low: float, high: float, ok, iterations: int = 60) -> float:
    """Boundary of the monotone predicate ``ok`` on [low, high]; ``ok(high)`` must hold."""
    for _ in range(iterations):
        mid = 0.5 * (low + high)
        if ok(mid):
            high = mid
        else:
            low = mid
    return high


def initial_point(lam: EigenChannels, params: SystemParams, qos: QosConstraints,
                  cfg: SolverConfig = SolverConfig()) -> Allocation:
    """A feasible relaxed starting point, or InfeasibleProblemError naming the blocking constraint."""
    count = lam.count
    gains = lam.gains
    if params.eta * qos.p_max * float(gains[0]) < qos.e_min - 1e-12:
        raise InfeasibleProblemError("energy", "e_min exceeds eta * p_max * lambda_max")
    capacity_powers, _ = water_filling(gains, qos.p_max)
    if float(np.sum(np.log2(1.0 + capacity_powers * gains))) < qos.r_min - 1e-12:
        raise InfeasibleProblemError("rate", "r_min exceeds the water-filling capacity at p_max")

    def feasible(alloc: Allocation) -> bool:
        return check_feasible(alloc, lam, params, qos).feasible

    candidate = Allocation(np.full(count, 0.5), np.full(count, qos.p_max / (2 * count)))
    if feasible(candidate):
        return candidate
    full = np.full(count, qos.p_max / count)
    candidate = Allocation(np.full(count, 0.5), full)
    if feasible(candidate):
        return candidate
    report = check_feasible(candidate, lam, params, qos)
    if report.rate_slack < 0 <= report.energy_slack:
        share = _bisect_share(0.5, 1.0, lambda c: check_feasible(
            Allocation(np.full(count, c), full), lam, params, qos).rate_slack >= 0)
    else:
        share = 1.0 - _bisect_share(0.5, 1.0, lambda c: check_feasible(
            Allocation(np.full(count, 1.0 - c), full), lam, params, qos).energy_slack >= 0)
    candidate = Allocation(np.full(count, share), full)
    if feasible(candidate):
        return candidate

    patterns = [np.ones(count)] + [np.where(np.arange(count) == k, 0.0, 1.0) for k in range(count)]
    for pattern in patterns:
        alloc = min_power_allocation(pattern, lam, params, qos)
        if alloc is not None and feasible(alloc):
            return alloc

    # maximise the rate subject to energy and budget, jointly over (p, a)
    problem = joint_rate_problem(lam, params, qos)
    x = polish(problem, np.concatenate([full, np.full(count, 0.5)]), cfg.max_inner)
    candidate = Allocation(x[count:], x[:count])
    if feasible(candidate):
        return candidate
    worst, slack = check_feasible(candidate, lam, params, qos).worst()
    raise InfeasibleProblemError(worst, f"no feasible starting point found (slack {slack:.3g})")


def joint_rate_problem(lam: EigenChannels, params: SystemParams, qos: QosConstraints) -> SmoothProblem:
    """Max relaxed rate over x = [p, a] subject to energy and budget."""
    gains = lam.gains
    count = lam.count

    def split(x):
        return x[:count], x[count:]

    def rate(x):
        p, a = split(x)
        return float(np.sum(rate_terms(a, p, gains)))

    def rate_grad(x):
        p, a = split(x)
        safe = np.maximum(a, ALPHA_FLOOR)
        dp = np.where(a > ALPHA_FLOOR, a * gains * LOG2E / (safe + p * gains), 0.0)
        ratio = p * gains / safe
        da = np.log2(1.0 + ratio) - ratio * LOG2E / (1.0 + ratio)
        return np.concatenate([dp, da])

    def constraints(x):
        p, a = split(x)
        return np.array([params.eta * float(np.sum((1.0 - a) * p * gains)) - qos.e_min,
                         qos.p_max - float(np.sum(p))])

    def jacobian(x):
        p, a = split(x)
        energy = np.concatenate([params.eta * (1.0 - a) * gains, -params.eta * p * gains])
        budget = np.concatenate([-np.ones(count), np.zeros(count)])
        return np.vstack([energy, budget])

    return SmoothProblem(rate, rate_grad, constraints, jacobian,
                         lower=np.zeros(2 * count),
                         upper=np.concatenate([np.full(count, qos.p_max), np.ones(count)]))


def repair_assignment(alloc: Allocation, lam: EigenChannels, params: SystemParams,
                      qos: QosConstraints) -> Optional[Allocation]:
    """Round, then flip the least decided entries one by one until the pattern is feasible."""
    rounded = round_assignment(alloc)
    if pattern_feasible(rounded.assign, lam, params, qos):
        return rounded
    assign = rounded.assign.copy()
    order = np.argsort(np.abs(alloc.assign - 0.5), kind="stable")
    for flips, index in enumerate(order, start=1):
        assign[index] = 1.0 - assign[index]
        if pattern_feasible(assign, lam, params, qos):
            logger.info("rounding repaired after %d flip(s): %s", flips, assign.tolist())
            return Allocation(assign, alloc.power)
    logger.warning("rounding repair exhausted, no feasible binary pattern near %s", alloc.assign.tolist())
    return None


@dataclass
class RoundingOutcome:
    evaluated: Optional[EvaluatedAllocation]
    iterations: int = 0
    duals: np.ndarray = field(default_factory=lambda: np.zeros(3))


def round_and_reoptimize(relaxed: Allocation, lam: EigenChannels, params: SystemParams,
                         qos: QosConstraints, n_active: int, cfg: SolverConfig) -> RoundingOutcome:
    """Binary assignment from the relaxed point with powers re-optimised for it."""
    binary = repair_assignment(relaxed, lam, params, qos)
    if binary is None:
        return RoundingOutcome(None)
    try:
        block = power_allocation_block(binary.assign, lam, params, qos, n_active, cfg)
    except InfeasibleProblemError as exc:
        logger.warning("power re-optimisation after rounding failed: %s", exc)
        return RoundingOutcome(None)
    evaluated = EvaluatedAllocation.of(block.allocation, lam, params, qos, n_active)
    return RoundingOutcome(evaluated, block.iterations, block.duals)


def finalize(algorithm: str, relaxed: EvaluatedAllocation, rounding: RoundingOutcome,
             converged: bool, iterations: dict, trace: List) -> SolveResult:
    """Attach the rounding row; the relaxed and rounded points are reported as found."""
    rounded = rounding.evaluated
    if rounded is not None:
        step = trace[-1].step + 1 if trace else 0
        trace.append(trace_row(step, rounded, event="rounding",
                               max_dual=float(np.max(rounding.duals))))
        logger.info("%s: EE drop at rounding %.3g", algorithm, relaxed.ee - rounded.ee)
    iterations = dict(iterations)
    iterations["inner"] = iterations.get("inner", 0) + rounding.iterations
    return SolveResult(algorithm=algorithm, relaxed=relaxed, rounded=rounded,
                       converged=converged, iterations=iterations, trace=trace)


# -- alternation ---------------------------------------------------------------

ASSIGN_TOL = 1e-5
FLAT_PATIENCE = 3


@dataclass
class AlternationRun:
    best: EvaluatedAllocation
    trace: List
    converged: bool
    rounds: int
    inner: int


def alternate(start: Allocation, lam: EigenChannels, params: SystemParams, qos: QosConstraints,
              n_active: int, cfg: SolverConfig = SolverConfig()) -> AlternationRun:
    """Alternate the two blocks from a feasible ``start``.

    A round without EE gain ends the run only once the assignment has settled
    or ``FLAT_PATIENCE`` flat rounds went by in a row.
    """
    best = EvaluatedAllocation.of(start, lam, params, qos, n_active)
    trace = [trace_row(0, best, max_dual=0.0)]
    inner = 0
    flat = 0
    converged = False
    rounds = 0
    for rounds in range(1, cfg.max_outer + 1):
        assign_block = eigen_assignment_block(best.allocation.power, lam, params, qos, n_active, cfg,
                                              start=best.allocation)
        power_block = power_allocation_block(assign_block.allocation.assign, lam, params, qos,
                                             n_active, cfg, start=assign_block.allocation)
        inner += assign_block.iterations + power_block.iterations
        candidate = EvaluatedAllocation.of(power_block.allocation, lam, params, qos, n_active)
        improvement = candidate.ee - best.ee if candidate.feasible else float("-inf")
        moved = float(np.max(np.abs(candidate.allocation.assign - best.allocation.assign)))
        if improvement >= 0:
            best = candidate
        max_dual = float(max(np.max(assign_block.duals), np.max(power_block.duals)))
        trace.append(trace_row(rounds, best, max_dual=max_dual))
        logger.debug("jeapa round %d: ee=%.9g improvement=%.3g moved=%.3g", rounds, best.ee,
                     improvement, moved)
        flat = flat + 1 if improvement < cfg.ee_tol else 0
        if flat and (improvement < 0 or moved < ASSIGN_TOL or flat >= FLAT_PATIENCE):
            converged = True
            break
    return AlternationRun(best, trace, converged, rounds, inner)


def jeapa_starts(lam: EigenChannels, params: SystemParams, qos: QosConstraints, n_active: int,
                 cfg: SolverConfig = SolverConfig()) -> List[Allocation]:
    """Feasible starting points: the uniform point, then the power optimum of each binary pattern.

    The uniform point spends what the most expensive pattern start spends, so
    the starts do not move with ``p_max`` once the budget stops binding.
    Raises the InfeasibleProblemError of :func:`initial_point` when there is
    no start at all.
    """
    patterns = []
    for pattern in start_patterns(lam.count, cfg):
        if not np.all((pattern == 0.0) | (pattern == 1.0)):
            continue
        if not pattern_feasible(pattern, lam, params, qos):
            continue
        try:
            alloc = power_allocation(pattern, lam, params, qos, n_active, cfg)
        except InfeasibleProblemError:
            continue
        if check_feasible(alloc, lam, params, qos).feasible:
            patterns.append(alloc)

    spend = max((float(np.sum(alloc.power)) for alloc in patterns), default=qos.p_max)
    budgets = [min(qos.p_max, 2.0 * spend)] if spend > 0 else []
    if not budgets or budgets[0] < qos.p_max:
        budgets.append(qos.p_max)
    uniform = None
    failure: Optional[InfeasibleProblemError] = None
    for budget in budgets:
        try:
            uniform = initial_point(lam, params, qos.with_updates(p_max=budget), cfg)
        except InfeasibleProblemError as exc:
            failure = failure or exc
            continue
        if check_feasible(uniform, lam, params, qos).feasible:
            break
        uniform = None
    starts = ([uniform] if uniform is not None else []) + patterns
    if not starts:
        raise failure or InfeasibleProblemError("power", "no feasible starting point found")
    return starts


def solve_jeapa(lam: EigenChannels, params: SystemParams, qos: QosConstraints, n_active: int,
                cfg: SolverConfig = SolverConfig(), start: Optional[Allocation] = None) -> SolveResult:
    """Alternate assignment and power blocks from every start and keep the best relaxed point.

    A feasible ``start`` is added to the starts, so the relaxed EE is never
    below its EE.
    """
    starts = jeapa_starts(lam, params, qos, n_active, cfg)
    if start is not None and check_feasible(start, lam, params, qos).feasible:
        starts.append(start)
    winner: Optional[AlternationRun] = None
    inner = 0
    for index, alloc in enumerate(starts):
        try:
            run = alternate(alloc, lam, params, qos, n_active, cfg)
        except InfeasibleProblemError as exc:
            logger.debug("jeapa start %d abandoned: %s", index, exc)
            continue
        inner += run.inner
        logger.debug("jeapa start %d: ee=%.9g after %d round(s)", index, run.best.ee, run.rounds)
        if winner is None or run.best.ee > winner.best.ee:
            winner = run
    if winner is None:
        raise InfeasibleProblemError("power", "every starting point was abandoned")
    rounding = round_and_reoptimize(winner.best.allocation, lam, params, qos, n_active, cfg)
    return finalize("jeapa", winner.best, rounding, winner.converged,
                    {"outer": winner.rounds, "inner": inner}, winner.trace)
