"""
Energy-efficiency optimisation for spatial-switching MIMO SWIPT links.

This package contains the channel and power models, the three inner
resource-allocation solvers, receive-antenna selection and a brute-force
oracle for small instances.
"""

from swipt.ascent import SolverConfig, StepSchedule
from swipt.channel import (
    AntennaSet,
    ChannelMatrix,
    EigenChannels,
    eigen_channels,
    frobenius_row_norms,
    generate_rayleigh,
    load_channel,
    save_channel,
    select_rows,
)
from swipt.results import SolveResult, TraceRow
from swipt.system_model import (
    Allocation,
    Metrics,
    QosConstraints,
    SystemParams,
    check_feasible,
    harvested_energy,
    round_assignment,
    sum_rate,
    total_power,
)

__all__ = [
    "Allocation",
    "AntennaSet",
    "ChannelMatrix",
    "EigenChannels",
    "Metrics",
    "QosConstraints",
    "SolveResult",
    "SolverConfig",
    "StepSchedule",
    "SystemParams",
    "TraceRow",
    "check_feasible",
    "eigen_channels",
    "frobenius_row_norms",
    "generate_rayleigh",
    "harvested_energy",
    "load_channel",
    "round_assignment",
    "save_channel",
    "select_rows",
    "sum_rate",
    "total_power",
]
