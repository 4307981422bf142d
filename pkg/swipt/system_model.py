"""
System model for the spatial-switching SWIPT link.

Holds the hardware parameters, the QoS constraints, the eigen-channel
allocation and every scalar metric derived from them: sum-rate, harvested
energy, the linear power model and energy efficiency. Feasibility checks,
assignment rounding and water-filling helpers live here too because all three
solvers share them.
"""

import logging
import math
from dataclasses import dataclass, field, replace
from typing import List, Optional, Sequence, Tuple

import numpy as np

from swipt.channel import EigenChannels
from swipt.errors import (
    InvalidDimensionError,
    LengthMismatchError,
    NonPositivePowerError,
)

logger = logging.getLogger(__name__)

LOG2E = math.log2(math.e)
ALPHA_FLOOR = 1e-9
SLACK_TOL = 1e-9
REFERENCE_DRAIN_EFFICIENCY = 0.38


@dataclass(frozen=True)
class SystemParams:
    """Hardware constants of the transmit-receive chain."""

    n_tx: int = 8
    n_rx: int = 8
    zeta: float = 1.0 / REFERENCE_DRAIN_EFFICIENCY
    eta: float = 0.1
    p_sta: float = 5.0
    p_ant_bs: float = 1.0
    p_ant: float = 1.0
    theta: float = 1.0

    def __post_init__(self):
        if self.n_tx < 1 or self.n_rx < 1:
            raise InvalidDimensionError(f"antenna counts must be positive, got {self.n_tx}x{self.n_rx}")
        if not self.zeta >= 1.0:
            raise ValueError(f"zeta must be >= 1 (drain efficiency <= 100%), got {self.zeta}")
        if not 0.0 < self.eta <= 1.0:
            raise ValueError(f"eta must lie in (0, 1], got {self.eta}")
        if min(self.p_sta, self.p_ant_bs, self.p_ant) < 0:
            raise ValueError("circuit powers must be non-negative")
        if not self.theta > 0:
            raise ValueError(f"theta must be positive, got {self.theta}")

    @classmethod
    def from_drain_efficiency(cls, drain_efficiency: float, **kwargs) -> "SystemParams":
        """Build parameters from the amplifier efficiency instead of its reciprocal."""
        if not 0.0 < drain_efficiency <= 1.0:
            raise ValueError(f"drain efficiency must lie in (0, 1], got {drain_efficiency}")
        return cls(zeta=1.0 / drain_efficiency, **kwargs)

    @classmethod
    def reference_defaults(cls) -> "SystemParams":
        return cls.from_drain_efficiency(REFERENCE_DRAIN_EFFICIENCY)

    @property
    def p_sta_bar(self) -> float:
        """Static transmitter power including the per-antenna BS term."""
        return self.p_sta + self.p_ant_bs * self.n_tx

    def fixed_power(self, n_active: int) -> float:
        """Transmit-independent consumption P_fix for ``n_active`` receive antennas."""
        return self.p_sta_bar + self.p_ant * n_active

    def with_updates(self, **changes) -> "SystemParams":
        return replace(self, **changes)


@dataclass(frozen=True)
class QosConstraints:
    """Minimum rate, minimum harvested energy and transmit power budget."""

    r_min: float = 0.0
    e_min: float = 0.0
    p_max: float = 10.0

    def __post_init__(self):
        if self.r_min < 0 or self.e_min < 0:
            raise ValueError(f"r_min and e_min must be non-negative, got {self.r_min}, {self.e_min}")
        if not self.p_max > 0:
            raise ValueError(f"p_max must be positive, got {self.p_max}")

    def with_updates(self, **changes) -> "QosConstraints":
        return replace(self, **changes)


@dataclass(frozen=True, eq=False)
class Allocation:
    """Eigen-channel assignment (relaxed or binary) and per-channel powers."""

    assign: np.ndarray
    power: np.ndarray

    def __post_init__(self):
        assign = np.asarray(self.assign, dtype=float).ravel().copy()
        power = np.asarray(self.power, dtype=float).ravel().copy()
        if assign.size != power.size:
            raise LengthMismatchError(f"assign has {assign.size} entries but power has {power.size}")
        if not (np.all(np.isfinite(assign)) and np.all(np.isfinite(power))):
            raise ValueError("allocation entries must be finite")
        if np.any(assign < -SLACK_TOL) or np.any(assign > 1.0 + SLACK_TOL) or np.any(power < -SLACK_TOL):
            raise ValueError(f"allocation out of bounds: assign={assign}, power={power}")
        # absorb round-off from projections
        assign = np.clip(assign, 0.0, 1.0)
        power = np.clip(power, 0.0, None)
        assign.setflags(write=False)
        power.setflags(write=False)
        object.__setattr__(self, "assign", assign)
        object.__setattr__(self, "power", power)

    @classmethod
    def zeros(cls, count: int) -> "Allocation":
        return cls(np.zeros(count), np.zeros(count))

    @property
    def count(self) -> int:
        return self.assign.size

    @property
    def is_binary(self) -> bool:
        return bool(np.all((self.assign == 0.0) | (self.assign == 1.0)))

    def with_power(self, power: Sequence[float]) -> "Allocation":
        return Allocation(self.assign, power)

    def with_assign(self, assign: Sequence[float]) -> "Allocation":
        return Allocation(assign, self.power)


@dataclass(frozen=True)
class Metrics:
    """Rate, energy and power figures of one allocation."""

    rate: float
    energy: float
    transmit_power: float
    circuit_power: float
    total_power: float
    ee: float

    def as_dict(self) -> dict:
        return {
            "rate": self.rate,
            "energy": self.energy,
            "transmit_power": self.transmit_power,
            "circuit_power": self.circuit_power,
            "total_power": self.total_power,
            "ee": self.ee,
        }


@dataclass(frozen=True)
class FeasibilityReport:
    """Per-constraint slack; negative slack means violation."""

    rate_slack: float
    energy_slack: float
    power_slack: float
    assign_slack: float
    power_bound_slack: float
    tolerance: float = SLACK_TOL
    feasible: bool = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "feasible", all(s >= -self.tolerance for s in self._slacks().values()))

    def _slacks(self) -> dict:
        return {
            "rate": self.rate_slack,
            "energy": self.energy_slack,
            "power": self.power_slack,
            "assign_bounds": self.assign_slack,
            "power_bounds": self.power_bound_slack,
        }

    def violated(self) -> List[str]:
        return [name for name, slack in self._slacks().items() if slack < -self.tolerance]

    def worst(self) -> Tuple[str, float]:
        """Name and slack of the most violated constraint."""
        return min(self._slacks().items(), key=lambda item: item[1])


def _check_lengths(alloc: Allocation, lam: EigenChannels) -> None:
    if alloc.count != lam.count:
        raise LengthMismatchError(f"allocation has {alloc.count} channels, eigen-channels have {lam.count}")


def rate_terms(assign: np.ndarray, power: np.ndarray, gains: np.ndarray) -> np.ndarray:
    """Per-channel relaxed rate a*log2(1 + p*lam/a), zero where a is at the floor."""
    safe = np.maximum(assign, ALPHA_FLOOR)
    terms = assign * np.log2(1.0 + power * gains / safe)
    return np.where(assign <= ALPHA_FLOOR, 0.0, terms)


def sum_rate(alloc: Allocation, lam: EigenChannels) -> float:
    """Relaxed sum-rate in bits/s/Hz; equals the binary formula on binary assignments."""
    _check_lengths(alloc, lam)
    return float(np.sum(rate_terms(alloc.assign, alloc.power, lam.gains)))


def harvested_energy(alloc: Allocation, lam: EigenChannels, params: SystemParams) -> float:
    """Power harvested from the channels routed to the rectifier, in Watts."""
    _check_lengths(alloc, lam)
    return float(params.eta * np.sum((1.0 - alloc.assign) * alloc.power * lam.gains))


def total_power(alloc: Allocation, lam: EigenChannels, params: SystemParams, n_active: int) -> Metrics:
    """Evaluate the linear power model and fill every metric, EE included."""
    if n_active < 1:
        raise InvalidDimensionError(f"n_active must be >= 1, got {n_active}")
    rate = sum_rate(alloc, lam)
    energy = harvested_energy(alloc, lam, params)
    transmit = float(np.sum(alloc.power))
    circuit = params.fixed_power(n_active)
    total = params.zeta * transmit + circuit - energy
    if total <= 0:
        raise NonPositivePowerError(total)
    return Metrics(rate=rate, energy=energy, transmit_power=transmit,
                   circuit_power=circuit, total_power=total, ee=rate / total)


def check_feasible(alloc: Allocation, lam: EigenChannels, params: SystemParams,
                   qos: QosConstraints) -> FeasibilityReport:
    """Slack of every constraint of the relaxed problem."""
    _check_lengths(alloc, lam)
    return FeasibilityReport(
        rate_slack=sum_rate(alloc, lam) - qos.r_min,
        energy_slack=harvested_energy(alloc, lam, params) - qos.e_min,
        power_slack=qos.p_max - float(np.sum(alloc.power)),
        assign_slack=float(np.min(np.minimum(alloc.assign, 1.0 - alloc.assign))),
        power_bound_slack=float(np.min(alloc.power)),
    )


def round_assignment(alloc: Allocation) -> Allocation:
    """Map every relaxed indicator to the nearer of {0, 1}; ties go to information decoding."""
    return Allocation(np.where(alloc.assign >= 0.5, 1.0, 0.0), alloc.power)


def screen_parameters(params: SystemParams, lam: EigenChannels) -> None:
    """Reject channels on which harvesting would return more than the amplifier spends."""
    margin = float(np.min(params.zeta - params.eta * lam.gains))
    if margin <= 0:
        raise NonPositivePowerError(
            margin,
            f"zeta - eta*lambda_max = {margin:.6g} <= 0: harvesting outweighs transmit cost, "
            "consumed power can become non-positive")


def water_filling(gains: Sequence[float], budget: float) -> Tuple[np.ndarray, float]:
    """Rate-maximising powers over ``gains`` with total ``budget``; returns (powers, water level)."""
    gains = np.asarray(gains, dtype=float)
    powers = np.zeros(gains.size)
    active = np.flatnonzero(gains > 0)
    if active.size == 0 or budget <= 0:
        return powers, 0.0
    order = active[np.argsort(gains[active])[::-1]]
    inverse = 1.0 / gains[order]
    # drop the weakest channel until every remaining one gets positive power
    for used in range(order.size, 0, -1):
        level = (budget + np.sum(inverse[:used])) / used
        if level > inverse[used - 1]:
            powers[order[:used]] = level - inverse[:used]
            return powers, float(level)
    return powers, 0.0


def inverse_water_filling(gains: Sequence[float], rate: float, tol: float = 1e-12) -> np.ndarray:
    """Least total power reaching ``rate`` bits/s/Hz over ``gains`` (water-filling shape)."""
    gains = np.asarray(gains, dtype=float)
    if rate <= 0:
        return np.zeros(gains.size)
    if not np.any(gains > 0):
        return np.full(gains.size, np.inf)

    def rate_at(level: float) -> float:
        return float(np.sum(np.log2(np.maximum(level * gains, 1.0))))

    low, high = 0.0, 1.0 / np.max(gains[gains > 0])
    while rate_at(high) < rate:
        high *= 2.0
    for _ in range(200):
        mid = 0.5 * (low + high)
        if rate_at(mid) < rate:
            low = mid
        else:
            high = mid
        if high - low <= tol * high:
            break
    with np.errstate(divide="ignore"):
        inverse = np.where(gains > 0, 1.0 / np.where(gains > 0, gains, 1.0), np.inf)
    return np.maximum(high - inverse, 0.0)


def min_power_allocation(assign: Sequence[float], lam: EigenChannels, params: SystemParams,
                         qos: QosConstraints) -> Optional[Allocation]:
    """Least-transmit-power powers meeting the QoS for a binary assignment.

    Decoding channels get the inverse water-filling powers for ``r_min``; the
    energy requirement is put entirely on the strongest harvesting channel.
    The result may exceed ``p_max``; callers compare against the budget.
    """
    assign = np.asarray(assign, dtype=float)
    gains = lam.gains
    power = np.zeros(gains.size)
    decode = np.flatnonzero(assign == 1.0)
    harvest = np.flatnonzero(assign == 0.0)
    if qos.r_min > 0:
        if decode.size == 0:
            return None
        power[decode] = inverse_water_filling(gains[decode], qos.r_min)
    if qos.e_min > 0:
        if harvest.size == 0 or gains[harvest].max() <= 0:
            return None
        best = harvest[np.argmax(gains[harvest])]
        power[best] = qos.e_min / (params.eta * gains[best])
    if not np.all(np.isfinite(power)):
        return None
    return Allocation(assign, power)


def pattern_feasible(assign: Sequence[float], lam: EigenChannels, params: SystemParams,
                     qos: QosConstraints) -> bool:
    """Whether some power vector makes the binary ``assign`` meet every constraint."""
    alloc = min_power_allocation(assign, lam, params, qos)
    return alloc is not None and float(np.sum(alloc.power)) <= qos.p_max * (1.0 + 1e-12) + SLACK_TOL
