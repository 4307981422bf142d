"""
Brute-force ground truth for small instances.

Enumerates every binary assignment and grid-searches the powers over the
budget simplex, then wraps that in an exhaustive antenna-subset search. Slow
by construction; only meant to certify the solvers on a handful of channels.
"""

import itertools
import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from swipt.antenna_selection import SelectionOutcome, exhaustive_search
from swipt.channel import ChannelMatrix, EigenChannels
from swipt.errors import CapExceededError
from swipt.results import EvaluatedAllocation, SolveResult, trace_row
from swipt.system_model import (
    SLACK_TOL,
    Allocation,
    QosConstraints,
    SystemParams,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class OracleConfig:
    power_grid_steps: int = 200
    max_channels: int = 4
    max_antennas: int = 4

    def __post_init__(self):
        if self.power_grid_steps < 10:
            raise ValueError(f"power_grid_steps must be >= 10, got {self.power_grid_steps}")
        if self.max_channels < 1 or self.max_antennas < 1:
            raise ValueError("oracle caps must be >= 1")


def simplex_points(count: int, steps: int) -> np.ndarray:
    """Integer grid points ``k`` in ``[0, steps]^count`` with ``sum(k) <= steps``."""
    grid = np.zeros((1, 0), dtype=np.int64)
    for _ in range(count):
        reps = steps - grid.sum(axis=1) + 1
        expanded = np.repeat(grid, reps, axis=0)
        offsets = np.repeat(np.cumsum(reps) - reps, reps)
        levels = np.arange(expanded.shape[0]) - offsets
        grid = np.column_stack([expanded, levels])
    return grid


def _chunks(count: int, steps: int):
    """Simplex grid split on the first axis so large channel counts stay in memory."""
    if count == 1:
        yield simplex_points(1, steps)
        return
    rest = simplex_points(count - 1, steps)
    rest_sum = rest.sum(axis=1)
    for first in range(steps + 1):
        rows = rest[rest_sum <= steps - first]
        yield np.column_stack([np.full(rows.shape[0], first, dtype=np.int64), rows])


def oracle_fixed_set(lam: EigenChannels, params: SystemParams, qos: QosConstraints, n_active: int,
                     ocfg: OracleConfig = OracleConfig()) -> SolveResult:
    """Best binary allocation on the power grid; ``rounded`` is None when nothing is feasible."""
    count = lam.count
    if count > ocfg.max_channels:
        raise CapExceededError(f"oracle supports at most {ocfg.max_channels} channels, got {count}")
    gains = lam.gains
    step = qos.p_max / ocfg.power_grid_steps
    patterns = [np.array(bits) for bits in itertools.product((1.0, 0.0), repeat=count)]
    best: Optional[Allocation] = None
    best_ee = -np.inf
    points = 0
    for chunk in _chunks(count, ocfg.power_grid_steps):
        grid = chunk.astype(float) * step
        points += grid.shape[0]
        snr = grid * gains
        transmit = params.zeta * np.sum(grid, axis=1) + params.fixed_power(n_active)
        for assign in patterns:
            rate = np.sum(np.log2(1.0 + assign * snr), axis=1)
            energy = params.eta * np.sum((1.0 - assign) * snr, axis=1)
            consumed = transmit - energy
            ok = (rate >= qos.r_min - SLACK_TOL) & (energy >= qos.e_min - SLACK_TOL) & (consumed > 0)
            if not np.any(ok):
                continue
            ee = np.where(ok, rate / np.where(consumed > 0, consumed, 1.0), -np.inf)
            index = int(np.argmax(ee))
            if ee[index] > best_ee:
                best_ee = float(ee[index])
                best = Allocation(assign, grid[index])
    if best is None:
        logger.info("oracle: no feasible grid point")
        return SolveResult(algorithm="oracle", relaxed=None, rounded=None, converged=True)
    evaluated = EvaluatedAllocation.of(best, lam, params, qos, n_active)
    return SolveResult(algorithm="oracle", relaxed=evaluated, rounded=evaluated, converged=True,
                       iterations={"outer": len(patterns), "inner": len(patterns) * points},
                       trace=[trace_row(0, evaluated)])


def oracle_full(h: ChannelMatrix, params: SystemParams, qos: QosConstraints,
                ocfg: OracleConfig = OracleConfig()) -> SelectionOutcome:
    """Exhaustive antenna subsets with :func:`oracle_fixed_set` inside."""
    if h.n_rx > ocfg.max_antennas:
        raise CapExceededError(f"oracle supports at most {ocfg.max_antennas} antennas, got {h.n_rx}")

    def solve(lam, params_, qos_, n_active):
        return oracle_fixed_set(lam, params_, qos_, n_active, ocfg)

    return exhaustive_search(h, params, qos, solve, "oracle", ocfg.max_antennas)
