"""
Comparison baselines for the harness ``compare`` command.
"""

import logging
from typing import Optional

import numpy as np

from swipt.ascent import SolverConfig
from swipt.channel import EigenChannels
from swipt.errors import InfeasibleProblemError
from swipt.jeapa import power_allocation
from swipt.results import EvaluatedAllocation
from swipt.system_model import (
    QosConstraints,
    SystemParams,
    min_power_allocation,
    pattern_feasible,
)

logger = logging.getLogger(__name__)


def no_eh_baseline(lam: EigenChannels, params: SystemParams, qos: QosConstraints, n_active: int,
                   cfg: SolverConfig = SolverConfig()) -> Optional[EvaluatedAllocation]:
    """EE-optimal powers with every channel decoding and no energy requirement."""
    relaxed_qos = qos.with_updates(e_min=0.0)
    try:
        alloc = power_allocation(np.ones(lam.count), lam, params, relaxed_qos, n_active, cfg)
    except InfeasibleProblemError as exc:
        logger.info("no-EH baseline infeasible: %s", exc)
        return None
    return EvaluatedAllocation.of(alloc, lam, params, relaxed_qos, n_active)


def min_power_baseline(lam: EigenChannels, params: SystemParams, qos: QosConstraints,
                       n_active: int) -> Optional[EvaluatedAllocation]:
    """Least transmit power meeting the QoS, reported at its EE.

    Candidates are all channels decoding (only when no energy is required)
    and, for each channel, that channel harvesting while the rest decode.
    """
    count = lam.count
    patterns = [np.where(np.arange(count) == k, 0.0, 1.0) for k in range(count)]
    if qos.e_min == 0:
        patterns.insert(0, np.ones(count))
    best = None
    for pattern in patterns:
        if not pattern_feasible(pattern, lam, params, qos):
            continue
        alloc = min_power_allocation(pattern, lam, params, qos)
        spent = float(np.sum(alloc.power))
        if best is None or spent < best[0]:
            best = (spent, alloc)
    if best is None:
        logger.info("min-power baseline found no feasible pattern")
        return None
    return EvaluatedAllocation.of(best[1], lam, params, qos, n_active)
