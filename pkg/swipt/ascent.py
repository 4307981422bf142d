"""
First-order primal-dual engine shared by the inner resource-allocation problems.

Every inner problem is cast as ``max f(x)`` subject to ``g(x) >= 0`` and box
bounds. The engine runs projected gradient ascent on the Lagrangian
``f + mu.g`` with projected dual subgradient steps along ``-g`` (the
constraint values are the subgradient of the dual function), then measures
the KKT residual of the iterate and, when it is above tolerance, polishes it
with SLSQP.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence

import numpy as np
from scipy.optimize import minimize, nnls

from swipt.errors import ConvergenceError

logger = logging.getLogger(__name__)

FEASIBILITY_TOL = 1e-9
ACTIVE_TOL = 1e-6

SCHEDULE_RULES = ("harmonic", "sqrt", "constant")


@dataclass(frozen=True)
class StepSchedule:
    """Diminishing step sizes: divergent sum, vanishing limit.

    ``harmonic`` uses primal0/n for the primal and dual0/sqrt(n) for the dual
    variables, ``sqrt`` uses the inverse square root for both. ``constant``
    keeps both fixed and only makes sense for short test runs.
    """

    primal0: float = 0.1
    dual0: float = 1.0
    rule: str = "harmonic"

    def __post_init__(self):
        if self.rule not in SCHEDULE_RULES:
            raise ValueError(f"Unknown step schedule: {self.rule}")
        if not (self.primal0 > 0 and self.dual0 > 0):
            raise ValueError("initial step sizes must be positive")

    def primal(self, n: int) -> float:
        if self.rule == "harmonic":
            return self.primal0 / n
        if self.rule == "constant":
            return self.primal0
        return self.primal0 / math.sqrt(n)

    def dual(self, n: int) -> float:
        if self.rule == "constant":
            return self.dual0
        return self.dual0 / math.sqrt(n)


@dataclass(frozen=True)
class SolverConfig:
    """Tolerances and iteration caps of the inner solvers."""

    delta: float = 1e-6
    max_outer: int = 50
    max_inner: int = 5000
    step0: float = 0.1
    kkt_tol: float = 1e-5
    dual_step0: float = 1.0
    ascent_iters: int = 200
    ee_tol: float = 1e-6
    exhaustive_start_channels: int = 3

    def __post_init__(self):
        if not self.delta > 0:
            raise ValueError(f"delta must be positive, got {self.delta}")
        if self.max_outer < 1 or self.max_inner < 1:
            raise ValueError("iteration caps must be >= 1")
        if not (self.step0 > 0 and self.kkt_tol > 0 and self.dual_step0 > 0):
            raise ValueError("step0, dual_step0 and kkt_tol must be positive")
        if self.ascent_iters < 0:
            raise ValueError("ascent_iters must be >= 0")

    @property
    def schedule(self) -> StepSchedule:
        return StepSchedule(primal0=self.step0, dual0=self.dual_step0)


@dataclass
class SmoothProblem:
    """``max objective(x)`` s.t. ``constraints(x) >= 0`` and ``lower <= x <= upper``."""

    objective: Callable[[np.ndarray], float]
    gradient: Callable[[np.ndarray], np.ndarray]
    constraints: Callable[[np.ndarray], np.ndarray]
    jacobian: Callable[[np.ndarray], np.ndarray]
    lower: np.ndarray
    upper: np.ndarray

    def project(self, x: np.ndarray) -> np.ndarray:
        return np.clip(x, self.lower, self.upper)

    def violation(self, x: np.ndarray) -> float:
        g = self.constraints(x)
        worst = float(np.max(-g)) if g.size else 0.0
        bounds = float(max(np.max(self.lower - x), np.max(x - self.upper)))
        return max(0.0, worst, bounds)

    def is_feasible(self, x: np.ndarray, tol: float = FEASIBILITY_TOL) -> bool:
        return self.violation(x) <= tol


@dataclass
class AscentResult:
    x: np.ndarray
    duals: np.ndarray
    iterations: int
    converged: bool
    best_feasible: Optional[np.ndarray] = None
    max_dual_history: List[float] = field(default_factory=list)


@dataclass
class InnerSolution:
    """Outcome of :func:`solve_inner`."""

    x: np.ndarray
    duals: np.ndarray
    objective: float
    violation: float
    kkt: float
    iterations: int
    polished: bool

    @property
    def feasible(self) -> bool:
        return self.violation <= FEASIBILITY_TOL


def primal_dual_ascent(problem: SmoothProblem, x0: np.ndarray, duals0: np.ndarray,
                       schedule: StepSchedule, max_iter: int,
                       move_tol: float = 1e-8, violation_tol: float = FEASIBILITY_TOL) -> AscentResult:
    """Projected Lagrangian gradient ascent with projected dual subgradient descent."""
    x = problem.project(np.asarray(x0, dtype=float).copy())
    mu = np.maximum(np.asarray(duals0, dtype=float).copy(), 0.0)
    best, best_value = None, -np.inf
    if problem.is_feasible(x):
        best, best_value = x.copy(), problem.objective(x)
    history = []
    converged = False
    n = 0
    for n in range(1, max_iter + 1):
        grad = problem.gradient(x) + problem.jacobian(x).T @ mu
        x_new = problem.project(x + schedule.primal(n) * grad)
        g = problem.constraints(x_new)
        mu = np.maximum(mu - schedule.dual(n) * g, 0.0)
        history.append(float(np.max(mu)) if mu.size else 0.0)
        movement = float(np.max(np.abs(x_new - x)))
        x = x_new
        if problem.is_feasible(x, violation_tol):
            value = problem.objective(x)
            if value > best_value:
                best, best_value = x.copy(), value
            if movement < move_tol:
                converged = True
                break
    logger.debug("primal-dual ascent stopped after %d iterations (converged=%s)", n, converged)
    return AscentResult(x=x, duals=mu, iterations=n, converged=converged,
                        best_feasible=best, max_dual_history=history)


def estimate_multipliers(problem: SmoothProblem, x: np.ndarray,
                         active_tol: float = ACTIVE_TOL) -> np.ndarray:
    """Non-negative multipliers of the near-active constraints by least squares on stationarity."""
    g = problem.constraints(x)
    mu = np.zeros(g.size)
    active = np.flatnonzero(g <= active_tol * (1.0 + np.abs(g)))
    free = _free_coordinates(problem, x)
    if active.size == 0 or free.size == 0:
        return mu
    jac = problem.jacobian(x)
    a = jac[np.ix_(active, free)].T
    b = -problem.gradient(x)[free]
    mu[active], _ = nnls(a, b)
    return mu


def _free_coordinates(problem: SmoothProblem, x: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    at_lower = x <= problem.lower + tol
    at_upper = x >= problem.upper - tol
    return np.flatnonzero(~(at_lower | at_upper))


def kkt_residual(problem: SmoothProblem, x: np.ndarray, mu: Optional[np.ndarray] = None) -> float:
    """Max of constraint violation, complementary slackness and projected stationarity.

    Stationarity is measured relative to ``1 + |grad f|_inf`` so the residual
    is comparable across problem scalings.
    """
    if mu is None:
        mu = estimate_multipliers(problem, x)
    grad = problem.gradient(x)
    g = problem.constraints(x)
    r = grad + problem.jacobian(x).T @ mu
    tol = 1e-10
    projected = r.copy()
    at_lower = x <= problem.lower + tol
    at_upper = x >= problem.upper - tol
    projected[at_lower] = np.maximum(r[at_lower], 0.0)
    projected[at_upper] = np.minimum(r[at_upper], 0.0)
    stationarity = float(np.max(np.abs(projected))) / (1.0 + float(np.max(np.abs(grad))))
    slackness = float(np.max(np.abs(mu * g))) if g.size else 0.0
    return max(problem.violation(x), stationarity, slackness)


def polish(problem: SmoothProblem, x0: np.ndarray, max_iter: int, ftol: float = 1e-12) -> np.ndarray:
    """Run SLSQP from ``x0`` and return the projected end point."""
    upper = [None if not np.isfinite(u) else float(u) for u in problem.upper]
    bounds = list(zip((float(v) for v in problem.lower), upper))
    result = minimize(
        lambda x: -problem.objective(x),
        problem.project(np.asarray(x0, dtype=float)),
        jac=lambda x: -problem.gradient(x),
        bounds=bounds,
        constraints=[{"type": "ineq", "fun": problem.constraints, "jac": problem.jacobian}],
        method="SLSQP",
        options={"maxiter": max_iter, "ftol": ftol},
    )
    if not result.success:
        logger.debug("SLSQP stopped early: %s", result.message)
    return problem.project(np.asarray(result.x, dtype=float))


def choose_best(problem: SmoothProblem, candidates: Sequence[np.ndarray]) -> np.ndarray:
    """Highest objective among feasible candidates, else the least violated one."""
    feasible = [x for x in candidates if problem.is_feasible(x)]
    if feasible:
        return max(feasible, key=problem.objective)
    return min(candidates, key=problem.violation)


def solve_inner(problem: SmoothProblem, x0: np.ndarray, cfg: SolverConfig,
                duals0: Optional[np.ndarray] = None) -> InnerSolution:
    """Primal-dual ascent from ``x0``, SLSQP polish when the KKT residual is above ``cfg.kkt_tol``.

    Raises:
        ConvergenceError: the residual is still above ``cfg.kkt_tol`` after
            polishing. ``best`` holds the :class:`InnerSolution` reached.
    """
    m = problem.constraints(problem.project(np.asarray(x0, dtype=float))).size
    duals0 = np.zeros(m) if duals0 is None else duals0
    candidates = [problem.project(np.asarray(x0, dtype=float))]
    ascent = primal_dual_ascent(problem, x0, duals0, cfg.schedule, cfg.ascent_iters)
    iterations = ascent.iterations
    if ascent.best_feasible is not None:
        candidates.append(ascent.best_feasible)
    candidates.append(ascent.x)
    x = choose_best(problem, candidates)
    residual = kkt_residual(problem, x)
    polished = False
    if residual > cfg.kkt_tol:
        refined = polish(problem, x, cfg.max_inner)
        candidates.append(refined)
        if not problem.is_feasible(x):
            # an infeasible warm point may mislead SLSQP, try the raw start as well
            candidates.append(polish(problem, candidates[0], cfg.max_inner))
        x = choose_best(problem, candidates)
        residual = kkt_residual(problem, x)
        polished = True
    solution = InnerSolution(x=x, duals=ascent.duals, objective=problem.objective(x),
                             violation=problem.violation(x), kkt=residual,
                             iterations=iterations, polished=polished)
    if residual > cfg.kkt_tol:
        raise ConvergenceError(
            f"inner problem stopped with KKT residual {residual:.3g} > {cfg.kkt_tol:.3g}",
            best=solution, iterations=iterations, residual=residual,
        )
    return solution


def inner_or_best(problem: SmoothProblem, x0: np.ndarray, cfg: SolverConfig,
                  duals0: Optional[np.ndarray] = None) -> InnerSolution:
    """:func:`solve_inner`, falling back to the best iterate when it does not converge."""
    try:
        return solve_inner(problem, x0, cfg, duals0)
    except ConvergenceError as exc:
        logger.debug("%s; keeping best iterate", exc)
        return exc.best
