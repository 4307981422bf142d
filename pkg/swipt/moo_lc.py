"""
Low-complexity three-phase heuristic.

Phase one treats every eigen-channel as carrying data and energy at once and
maximises the weighted sum ``gamma1 * rate + gamma2 * theta * energy`` under
the power budget. Its KKT conditions give the powers in closed form for a
given budget multiplier phi, and phi is found by bisection on the budget.
The budget itself is the one whose phase-one powers give the best EE, so the
start stops following p_max once p_max exceeds it. Phase two optimises the
relaxed assignment for those powers; phase three rounds it and re-optimises
the powers for the binary pattern.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy.optimize import minimize_scalar

from swipt.ascent import SolverConfig
from swipt.channel import EigenChannels
from swipt.errors import BracketError, InfeasibleProblemError
from swipt.jeapa import eigen_assignment_block, repair_assignment, power_allocation_block
from swipt.results import EvaluatedAllocation, SolveResult, safe_evaluate, trace_row
from swipt.system_model import LOG2E, Allocation, QosConstraints, SystemParams, check_feasible

logger = logging.getLogger(__name__)

PHI_FLOOR = 1e-12
BRACKET_EXPANSIONS = 6
BUDGET_RTOL = 1e-8
MAX_BISECTIONS = 200
LADDER_FLOOR = 1e-3
LADDER_RATIO = 2.0 ** 0.25
BUDGET_XATOL = 1e-6


@dataclass(frozen=True)
class MooState:
    """Scalarisation weights, the budget multiplier and the rate-equivalent of harvested power."""

    gamma1: float
    gamma2: float
    phi: float = 0.0
    c_eh: float = 0.0

    def __post_init__(self):
        if self.gamma1 < 0 or self.gamma2 < 0 or abs(self.gamma1 + self.gamma2 - 1.0) > 1e-12:
            raise ValueError(f"weights must be non-negative and sum to 1, got {self.gamma1}, {self.gamma2}")
        if self.phi < 0:
            raise ValueError(f"phi must be non-negative, got {self.phi}")


def moo_weights(params: SystemParams, qos: QosConstraints) -> MooState:
    """Weights from the QoS targets; pure rate when both targets are zero."""
    harvest = params.theta * qos.e_min
    total = qos.r_min + harvest
    if total <= 0:
        return MooState(gamma1=1.0, gamma2=0.0)
    gamma2 = harvest / total
    return MooState(gamma1=1.0 - gamma2, gamma2=gamma2)


def scalarized_objective(power: np.ndarray, lam: EigenChannels, params: SystemParams,
                         state: MooState) -> float:
    """Weighted sum of rate and rate-equivalent harvested power with every channel doing both."""
    power = np.asarray(power, dtype=float)
    rate = float(np.sum(np.log2(1.0 + power * lam.gains)))
    c_eh = params.theta * params.eta * float(np.sum(power * lam.gains))
    return state.gamma1 * rate + state.gamma2 * c_eh


def scalarized_gradient(power: np.ndarray, lam: EigenChannels, params: SystemParams,
                        state: MooState) -> np.ndarray:
    gains = lam.gains
    power = np.asarray(power, dtype=float)
    return (state.gamma1 * gains * LOG2E / (1.0 + power * gains)
            + state.gamma2 * params.theta * params.eta * gains)


def closed_form_power(phi: float, lam: EigenChannels, params: SystemParams, state: MooState) -> np.ndarray:
    """KKT powers at multiplier ``phi``; ``inf`` where the linear harvest term outweighs phi."""
    gains = lam.gains
    slope = phi - state.gamma2 * params.theta * params.eta * gains
    power = np.zeros(gains.size)
    live = gains > 0
    unbounded = live & (slope <= 0)
    bounded = live & ~unbounded
    power[unbounded] = np.inf
    power[bounded] = np.maximum(
        state.gamma1 * LOG2E / slope[bounded] - 1.0 / gains[bounded], 0.0)
    return power


def moo_power_init(lam: EigenChannels, params: SystemParams, qos: QosConstraints) -> Allocation:
    """Phase-one powers with the assignment left at 0.5."""
    return moo_power_state(lam, params, qos)[0]


def moo_power_state(lam: EigenChannels, params: SystemParams, qos: QosConstraints,
                    budget: Optional[float] = None):
    """Phase-one powers spending ``budget`` (``qos.p_max`` by default) and the final state."""
    budget = qos.p_max if budget is None else budget
    state = moo_weights(params, qos)
    gains = lam.gains
    half = np.full(lam.count, 0.5)
    if not np.any(gains > 0):
        return Allocation(half, np.zeros(lam.count)), state
    if state.gamma1 == 0.0:
        # linear objective, the whole budget goes to the strongest channel
        power = np.zeros(lam.count)
        power[0] = budget
        phi = state.gamma2 * params.theta * params.eta * float(gains[0])
        return Allocation(half, power), MooState(0.0, 1.0, phi=phi, c_eh=phi * budget)

    def spent(phi: float) -> float:
        return float(np.sum(closed_form_power(phi, lam, params, state)))

    low = PHI_FLOOR
    high = (state.gamma1 * float(gains[0]) * LOG2E
            + state.gamma2 * params.theta * params.eta * float(gains[0]) + 1.0)
    for _ in range(BRACKET_EXPANSIONS):
        if spent(high) <= budget:
            break
        high *= 10.0
    if spent(high) > budget:
        raise BracketError(f"phi bracket [{low:.3g}, {high:.3g}] does not straddle budget={budget}")
    if spent(low) <= budget:
        # budget slack even at vanishing phi; take the stationary point
        phi = low
    else:
        for _ in range(MAX_BISECTIONS):
            phi = 0.5 * (low + high)
            if spent(phi) > budget:
                low = phi
            else:
                high = phi
            if abs(budget - spent(high)) <= BUDGET_RTOL * budget:
                break
        phi = high
    power = closed_form_power(phi, lam, params, state)
    c_eh = params.theta * params.eta * float(np.sum(power * gains))
    state = MooState(state.gamma1, state.gamma2, phi=phi, c_eh=c_eh)
    logger.debug("moo init: gamma1=%.4g phi=%.6g sum p=%.9g", state.gamma1, phi, float(np.sum(power)))
    return Allocation(half, power), state


# -- phase-one budget ----------------------------------------------------------

def budget_ladder(p_max: float) -> np.ndarray:
    """Geometric budgets from ``LADDER_FLOOR`` up to ``p_max``; the points below ``p_max`` do not depend on it."""
    if p_max <= LADDER_FLOOR:
        return np.array([p_max])
    steps = int(np.floor(np.log(p_max / LADDER_FLOOR) / np.log(LADDER_RATIO)))
    ladder = LADDER_FLOOR * LADDER_RATIO ** np.arange(steps + 1)
    return np.append(ladder[ladder < p_max], p_max)


def shared_assignment(power: np.ndarray, lam: EigenChannels, params: SystemParams,
                      qos: QosConstraints) -> Optional[Allocation]:
    """Common share on every channel that harvests exactly ``e_min``, or ``None`` if none does."""
    available = params.eta * float(np.sum(power * lam.gains))
    if qos.e_min <= 0:
        share = 1.0
    elif available <= 0:
        return None
    else:
        share = 1.0 - qos.e_min / available
    if share < 0:
        return None
    return Allocation(np.full(lam.count, share), power)


def budget_score(budget: float, lam: EigenChannels, params: SystemParams, qos: QosConstraints,
                 n_active: int) -> Tuple[float, Optional[Allocation]]:
    """EE of the phase-one powers at ``budget`` under the shared assignment, ``-inf`` if infeasible."""
    power = moo_power_state(lam, params, qos, budget)[0].power
    point = shared_assignment(power, lam, params, qos)
    if point is None:
        return float("-inf"), None
    evaluated = safe_evaluate(point, lam, params, qos, n_active)
    if evaluated is None or not evaluated.feasible:
        return float("-inf"), None
    return evaluated.ee, point


def phase_one_point(lam: EigenChannels, params: SystemParams, qos: QosConstraints,
                    n_active: int) -> Allocation:
    """Phase-one powers at the budget with the best EE, searched over :func:`budget_ladder`.

    Falls back to the full budget with the assignment at 0.5 when no budget
    gives a feasible point.
    """
    ladder = budget_ladder(qos.p_max)
    scored = [budget_score(b, lam, params, qos, n_active) for b in ladder]
    best = int(np.argmax([ee for ee, _ in scored]))
    best_ee, best_point = scored[best]
    if best_point is None:
        return moo_power_init(lam, params, qos)
    low, high = float(ladder[max(best - 1, 0)]), float(ladder[min(best + 1, ladder.size - 1)])
    if high > low:
        def loss(b: float) -> float:
            ee, _ = budget_score(b, lam, params, qos, n_active)
            return -ee if np.isfinite(ee) else 1.0

        found = minimize_scalar(loss, bounds=(low, high), method="bounded",
                                options={"xatol": BUDGET_XATOL * high})
        ee, point = budget_score(float(found.x), lam, params, qos, n_active)
        if point is not None and ee > best_ee:
            best_ee, best_point = ee, point
    logger.debug("moo budget search: sum p=%.6g ee=%.9g", float(np.sum(best_point.power)), best_ee)
    return best_point


def solve_moo_lc(lam: EigenChannels, params: SystemParams, qos: QosConstraints, n_active: int,
                 cfg: SolverConfig = SolverConfig(), start: Optional[Allocation] = None) -> SolveResult:
    """Closed-form init, relaxed assignment, then rounding with power refinement.

    A feasible ``start`` gets its own assignment phase and the better relaxed
    point goes on to rounding.
    """
    trace = []
    init = phase_one_point(lam, params, qos, n_active)
    evaluated = safe_evaluate(init, lam, params, qos, n_active)
    if evaluated is not None:
        trace.append(trace_row(1, evaluated, phase="init"))

    blocks = []
    failure: Optional[InfeasibleProblemError] = None
    try:
        blocks.append(eigen_assignment_block(init.power, lam, params, qos, n_active, cfg, start=init))
    except InfeasibleProblemError as exc:
        failure = exc.in_phase("assignment")
    seed = None
    if start is not None and check_feasible(start, lam, params, qos).feasible:
        seed = EvaluatedAllocation.of(start, lam, params, qos, n_active)
        try:
            blocks.append(eigen_assignment_block(start.power, lam, params, qos, n_active, cfg, start=start))
        except InfeasibleProblemError as exc:
            logger.debug("moo_lc: assignment from the given start failed: %s", exc)
    if not blocks and seed is None:
        raise failure
    inner = sum(block.iterations for block in blocks)
    scored = [(EvaluatedAllocation.of(block.allocation, lam, params, qos, n_active), block)
              for block in blocks]
    relaxed, max_dual = None, 0.0
    if scored:
        relaxed, block = max(scored, key=lambda pair: (pair[0].feasible, pair[0].ee))
        max_dual = float(np.max(block.duals))
    if seed is not None and (relaxed is None or not relaxed.feasible or seed.ee > relaxed.ee):
        relaxed = seed
    trace.append(trace_row(2, relaxed, phase="assignment", max_dual=max_dual))

    binary = repair_assignment(relaxed.allocation, lam, params, qos)
    if binary is None:
        raise InfeasibleProblemError("rate", "no feasible binary pattern near the phase-two assignment",
                                     phase="refinement")
    try:
        refined = power_allocation_block(binary.assign, lam, params, qos, n_active, cfg)
    except InfeasibleProblemError as exc:
        raise exc.in_phase("refinement") from exc
    inner += refined.iterations
    rounded = EvaluatedAllocation.of(refined.allocation, lam, params, qos, n_active)
    trace.append(trace_row(3, rounded, phase="refinement", event="rounding"))
    if rounded.feasible and rounded.ee > relaxed.ee:
        logger.debug("moo_lc: refined binary point beats the phase-two assignment, promoting it")
        relaxed = rounded
    return SolveResult(algorithm="moo_lc", relaxed=relaxed, rounded=rounded, converged=True,
                       iterations={"outer": len(trace), "inner": inner}, trace=trace)
