"""
Simulation Controller for the SWIPT simulator.

This module orchestrates seeded Monte Carlo trials, parameter sweeps, solver
comparisons, convergence traces and oracle certification, acting as the main
coordinator between configuration, the solvers and CSV output.

Each trial draws its channel from a seed derived from the master seed and
the trial index alone, so records do not depend on how trials are spread
over worker processes.
"""

import logging
import time
from abc import ABC, abstractmethod
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from swipt.antenna_selection import SelectionConfig, SelectionOutcome, SelectionStrategyFactory, norm_order
from swipt.baselines import min_power_baseline, no_eh_baseline
from swipt.channel import AntennaSet, ChannelMatrix, eigen_channels, generate_rayleigh, select_rows
from swipt.errors import CapExceededError, ConfigError, SwiptError
from swipt.oracle import oracle_fixed_set
from swipt.results import EvaluatedAllocation, SolveResult
from swipt.solvers import InnerSolverFactory
from swipt.system_model import Allocation, QosConstraints, SystemParams, screen_parameters
from util.config_manager import RunConfig

logger = logging.getLogger(__name__)

MASK64 = 0xFFFFFFFFFFFFFFFF
UPPER_BOUND_TOL = 1e-3
ROUNDING_TOL = 1e-6

# sweep variables whose feasible set grows along +1 (ascending) or -1 (descending) values
NESTED_SWEEPS = {"p_max": 1, "r_min": -1, "e_min": -1, "p_sta": -1}


def splitmix64(value: int) -> int:
    """One step of the SplitMix64 mixer."""
    z = (value + 0x9E3779B97F4A7C15) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def trial_seed(master_seed: int, trial: int) -> int:
    return splitmix64((master_seed & MASK64) ^ splitmix64(trial))


def trial_channel(config: RunConfig, trial: int) -> ChannelMatrix:
    return generate_rayleigh(config.params.n_rx, config.params.n_tx, trial_seed(config.master_seed, trial))


@dataclass
class TrialRecord:
    trial: int
    algorithm: str
    selection: str
    sweep_value: Optional[float]
    n_active: Optional[int]
    ee_relaxed: Optional[float]
    ee_rounded: Optional[float]
    rate: Optional[float]
    energy: Optional[float]
    power: Optional[float]
    feasible: bool
    outer_iters: int
    inner_iters: int
    runtime_ms: float


@dataclass
class ComparisonRecord:
    trial: int
    sweep_value: Optional[float]
    scheme: str
    reference: str
    ee_relaxed: Optional[float]
    ee_rounded: Optional[float]
    delta_rounded: Optional[float]
    relative_gap_relaxed: Optional[float]
    feasible: bool


@dataclass
class OracleCheckRecord:
    trial: int
    algorithm: str
    oracle_ee: Optional[float]
    relaxed_ee: Optional[float]
    rounded_ee: Optional[float]
    upper_bound_ok: bool
    rounding_ok: bool

    @property
    def passed(self) -> bool:
        return self.upper_bound_ok and self.rounding_ok


def apply_sweep(config: RunConfig, value: Optional[float]) -> Tuple[SystemParams, QosConstraints, Optional[int]]:
    """Parameters at one sweep point; the third item caps the active antenna count."""
    params, qos = config.params, config.qos
    if value is None:
        return params, qos, None
    variable = config.sweep.variable
    if variable == "p_sta":
        return params.with_updates(p_sta=value), qos, None
    if variable == "n_active":
        return params, qos, int(value)
    return params, qos.with_updates(**{variable: value}), None


def _record(trial: int, algorithm: str, selection: str, value: Optional[float], n_active: Optional[int],
            result: Optional[SolveResult], started: float) -> TrialRecord:
    runtime = (time.perf_counter() - started) * 1000.0
    if result is None:
        return TrialRecord(trial, algorithm, selection, value, n_active, None, None, None, None, None,
                           False, 0, 0, runtime)
    rounded = result.rounded
    metrics = None if rounded is None else rounded.metrics
    return TrialRecord(
        trial=trial, algorithm=algorithm, selection=selection, sweep_value=value, n_active=n_active,
        ee_relaxed=None if result.relaxed is None else result.relaxed.ee,
        ee_rounded=None if rounded is None else rounded.ee,
        rate=None if metrics is None else metrics.rate,
        energy=None if metrics is None else metrics.energy,
        power=None if metrics is None else metrics.total_power,
        feasible=result.feasible,
        outer_iters=result.iterations.get("outer", 0),
        inner_iters=result.iterations.get("inner", 0),
        runtime_ms=runtime,
    )


def _baseline_record(trial: int, name: str, value: Optional[float], n_active: int,
                     evaluated: Optional[EvaluatedAllocation], started: float) -> TrialRecord:
    result = None
    if evaluated is not None:
        result = SolveResult(algorithm=name, relaxed=evaluated, rounded=evaluated, converged=True)
    return _record(trial, name, "fixed_full", value, n_active if result else None, result, started)


def solve_point(h: ChannelMatrix, config: RunConfig, strategy: str, algorithm: str,
                params: SystemParams, qos: QosConstraints, limit: Optional[int],
                start: Optional[Allocation] = None):
    """Selection outcome for one strategy/algorithm at one sweep point."""
    if limit is not None:
        if not 1 <= limit <= h.n_rx:
            raise ConfigError(f"n_active sweep value {limit} outside [1, {h.n_rx}]", field="sweep.values")
        h = select_rows(h, AntennaSet(norm_order(h)[:limit]))
        strategy = "fixed_full"
    return SelectionStrategyFactory.select(
        strategy, h, params, qos, algorithm, config.solver_cfg,
        SelectionConfig(config.max_exhaustive_antennas), start)


def solve_order(config: RunConfig) -> List[int]:
    """Sweep point indices with every feasible set containing the previous one.

    For ``p_sta`` the EE of any allocation only grows along the order. Other
    variables keep the configured order.
    """
    points = config.sweep_points
    direction = NESTED_SWEEPS.get(config.sweep.variable) if config.sweep else None
    if direction is None or None in points:
        return list(range(len(points)))
    return sorted(range(len(points)), key=lambda i: direction * points[i])


def run_trial(config: RunConfig, trial: int, baselines: bool = False) -> List[TrialRecord]:
    """Every algorithm, strategy and sweep point on the channel of one trial.

    On the full array each relaxed point warm-starts the same algorithm at the
    next point of :func:`solve_order`. Records come out in the configured
    sweep order.
    """
    h = trial_channel(config, trial)
    points = config.sweep_points
    rows = {}
    incumbents: Dict[Tuple[str, str], Allocation] = {}
    for index in solve_order(config):
        value = points[index]
        params, qos, limit = apply_sweep(config, value)
        records = []
        for strategy in config.strategies:
            for algorithm in config.algorithms:
                started = time.perf_counter()
                start = incumbents.get((strategy, algorithm)) if limit is None else None
                try:
                    outcome = solve_point(h, config, strategy, algorithm, params, qos, limit, start)
                    records.append(_record(trial, algorithm, strategy, value, outcome.best_n,
                                           outcome.best_result, started))
                except ConfigError:
                    raise
                except (SwiptError, ArithmeticError, ValueError) as exc:
                    logger.error("trial %d %s/%s at %s failed: %s", trial, algorithm, strategy, value, exc)
                    records.append(_record(trial, algorithm, strategy, value, None, None, started))
                    continue
                relaxed = None if outcome.best_result is None else outcome.best_result.relaxed
                if strategy == "fixed_full" and relaxed is not None and relaxed.feasible:
                    incumbents[(strategy, algorithm)] = relaxed.allocation
        if baselines:
            records.extend(_baselines(h, trial, value, params, qos, limit, config))
        rows[index] = records
    return [record for index in range(len(points)) for record in rows[index]]


def _baselines(h: ChannelMatrix, trial: int, value: Optional[float], params: SystemParams,
               qos: QosConstraints, limit: Optional[int], config: RunConfig) -> List[TrialRecord]:
    if limit is not None:
        h = select_rows(h, AntennaSet(norm_order(h)[:limit]))
    n_active = h.n_rx
    rows = []
    try:
        lam = eigen_channels(h)
        screen_parameters(params, lam)
    except SwiptError as exc:
        logger.error("trial %d baselines skipped: %s", trial, exc)
        started = time.perf_counter()
        return [_baseline_record(trial, name, value, n_active, None, started)
                for name in ("no_eh", "min_power")]
    started = time.perf_counter()
    rows.append(_baseline_record(trial, "no_eh", value, n_active,
                                 no_eh_baseline(lam, params, qos, n_active, config.solver_cfg), started))
    started = time.perf_counter()
    rows.append(_baseline_record(trial, "min_power", value, n_active,
                                 min_power_baseline(lam, params, qos, n_active), started))
    return rows


def compare_records(records: List[TrialRecord]) -> List[ComparisonRecord]:
    """Paired deltas against the first scheme of each (trial, sweep value) group."""
    comparisons = []
    groups = {}
    for record in records:
        groups.setdefault((record.trial, record.sweep_value), []).append(record)
    for group in groups.values():
        reference = group[0]
        ref_name = f"{reference.algorithm}/{reference.selection}"
        for record in group:
            delta = gap = None
            if record.ee_rounded is not None and reference.ee_rounded is not None:
                delta = record.ee_rounded - reference.ee_rounded
            if record.ee_relaxed is not None and reference.ee_relaxed:
                gap = (record.ee_relaxed - reference.ee_relaxed) / abs(reference.ee_relaxed)
            comparisons.append(ComparisonRecord(
                trial=record.trial, sweep_value=record.sweep_value,
                scheme=f"{record.algorithm}/{record.selection}", reference=ref_name,
                ee_relaxed=record.ee_relaxed, ee_rounded=record.ee_rounded,
                delta_rounded=delta, relative_gap_relaxed=gap, feasible=record.feasible))
    return comparisons


def oracle_check_trial(config: RunConfig, trial: int) -> List[OracleCheckRecord]:
    """Certify every algorithm against the brute-force oracle on one small channel."""
    h = trial_channel(config, trial)
    if h.n_rx > config.oracle_cfg.max_antennas:
        raise CapExceededError(f"oracle check needs n_rx <= {config.oracle_cfg.max_antennas}, got {h.n_rx}")
    lam = eigen_channels(h)
    screen_parameters(config.params, lam)
    n_active = h.n_rx
    oracle = oracle_fixed_set(lam, config.params, config.qos, n_active, config.oracle_cfg)
    oracle_ee = None if oracle.rounded is None else oracle.rounded.ee
    records = []
    for algorithm in config.algorithms:
        solver = InnerSolverFactory.create_solver(algorithm, config.solver_cfg)
        try:
            result = solver.solve(lam, config.params, config.qos, n_active)
        except SwiptError as exc:
            logger.error("trial %d %s failed during oracle check: %s", trial, algorithm, exc)
            result = None
        relaxed = None if result is None or result.relaxed is None else result.relaxed.ee
        rounded = None if result is None or not result.feasible else result.ee
        if algorithm == "moo_lc":
            # heuristic, its relaxed point is not an upper bound
            upper_ok = True
        else:
            upper_ok = oracle_ee is None or (relaxed is not None and relaxed >= oracle_ee - UPPER_BOUND_TOL)
        rounding_ok = rounded is None or relaxed is None or rounded <= relaxed + ROUNDING_TOL
        records.append(OracleCheckRecord(trial, algorithm, oracle_ee, relaxed, rounded, upper_ok, rounding_ok))
        if not (upper_ok and rounding_ok):
            logger.error("trial %d %s violates the oracle bounds: oracle=%s relaxed=%s rounded=%s",
                         trial, algorithm, oracle_ee, relaxed, rounded)
    return records


class SimulationControllerInterface(ABC):
    """Interface for simulation controllers."""

    @abstractmethod
    def run(self) -> List[TrialRecord]:
        """Run every configured trial."""
        pass


class SimulationController(SimulationControllerInterface):
    """Fans trials out to worker processes and collects their records in trial order."""

    def __init__(self, config: RunConfig, workers: int = 1):
        self.config = config
        self.workers = max(1, workers)

    def _map(self, function, *extra) -> list:
        trials = list(range(self.config.trials))
        if self.workers == 1 or len(trials) == 1:
            batches = [function(self.config, trial, *extra) for trial in trials]
        else:
            with ProcessPoolExecutor(max_workers=self.workers) as pool:
                futures = [pool.submit(function, self.config, trial, *extra) for trial in trials]
                batches = [future.result() for future in futures]
        return [record for batch in batches for record in batch]

    def run(self) -> List[TrialRecord]:
        records = self._map(run_trial)
        logger.info("ran %d trials, %d records", self.config.trials, len(records))
        return sorted(records, key=lambda r: r.trial)

    def compare(self) -> List[ComparisonRecord]:
        if len(self.config.algorithms) < 2 and len(self.config.strategies) < 2:
            raise ConfigError("compare needs at least two algorithms or two selection strategies",
                              field="algorithms")
        records = sorted(self._map(run_trial, True), key=lambda r: r.trial)
        return compare_records(records)

    def _first_point(self, trial: int):
        if not 0 <= trial < self.config.trials:
            raise ConfigError(f"trial {trial} outside [0, {self.config.trials})", field="trial")
        params, qos, limit = apply_sweep(self.config, self.config.sweep_points[0])
        return trial_channel(self.config, trial), params, qos, limit

    def trace(self, trial: int, algorithm: str) -> SolveResult:
        """Convergence trace of one algorithm on one trial at the first sweep point."""
        h, params, qos, limit = self._first_point(trial)
        outcome = solve_point(h, self.config, self.config.strategies[0], algorithm, params, qos, limit)
        if outcome.best_result is None:
            raise SwiptError(f"trial {trial}: {algorithm} found no feasible antenna set")
        return outcome.best_result

    def select(self, trial: int, strategy: str, algorithm: str) -> SelectionOutcome:
        """Every antenna set ``strategy`` evaluates on one trial at the first sweep point."""
        h, params, qos, limit = self._first_point(trial)
        return solve_point(h, self.config, strategy, algorithm, params, qos, limit)

    def oracle_check(self) -> List[OracleCheckRecord]:
        records = self._map(oracle_check_trial)
        failures = sum(1 for r in records if not r.passed)
        logger.info("oracle check: %d records, %d violations", len(records), failures)
        return sorted(records, key=lambda r: r.trial)
