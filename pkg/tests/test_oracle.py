"""
Brute-force oracle - Test Suite.

 Group 1 - Simplex grid enumeration
 Group 2 - Caps and configuration
 Group 3 - Fixed-set oracle: known optimum, infeasibility, binary output
 Group 4 - Oracle over antenna subsets
"""

import numpy as np
import pytest
from scipy.optimize import minimize_scalar

from swipt.channel import EigenChannels, generate_rayleigh
from swipt.errors import CapExceededError
from swipt.oracle import OracleConfig, oracle_fixed_set, oracle_full, simplex_points
from swipt.system_model import QosConstraints, check_feasible

from conftest import scaled_params, seeded_gains

_PARAMS1 = scaled_params(1)
_FREE = QosConstraints(r_min=0.0, e_min=0.0, p_max=5.0)


# ── Group 1 ──────────────────────────────────────────────────────────────────

@pytest.mark.parametrize("count,steps,expected", [(1, 10, 11), (2, 3, 10), (3, 10, 286), (4, 20, 10626)])
def test_simplex_point_count(count, steps, expected):
    points = simplex_points(count, steps)
    assert points.shape == (expected, count)
    assert np.all(points >= 0)
    assert np.all(points.sum(axis=1) <= steps)
    assert len({tuple(row) for row in points}) == expected


# ── Group 2 ──────────────────────────────────────────────────────────────────

def test_channel_cap():
    lam = EigenChannels.from_gains([5.0, 4.0, 3.0, 2.0, 1.0])
    with pytest.raises(CapExceededError):
        oracle_fixed_set(lam, scaled_params(5), _FREE, 5, OracleConfig(power_grid_steps=10))


def test_antenna_cap():
    with pytest.raises(CapExceededError):
        oracle_full(generate_rayleigh(5, 2, 0), scaled_params(2).with_updates(n_rx=5), _FREE)


def test_grid_resolution_floor():
    with pytest.raises(ValueError):
        OracleConfig(power_grid_steps=5)


# ── Group 3 ──────────────────────────────────────────────────────────────────

def test_single_channel_matches_scalar_optimum():
    lam = EigenChannels.from_gains([2.0])
    result = oracle_fixed_set(lam, _PARAMS1, _FREE, 1, OracleConfig(power_grid_steps=500))
    fixed = _PARAMS1.fixed_power(1)

    def negative_ee(p):
        return -np.log2(1.0 + 2.0 * p) / (_PARAMS1.zeta * p + fixed)

    scan = minimize_scalar(negative_ee, bounds=(0.0, 5.0), method="bounded", options={"xatol": 1e-10})
    assert result.rounded.ee <= -scan.fun + 1e-12
    assert result.rounded.ee == pytest.approx(-scan.fun, rel=1e-4)
    assert list(result.rounded.allocation.assign) == [1.0]


def test_unreachable_targets_give_no_solution():
    result = oracle_fixed_set(EigenChannels.from_gains([1.0, 0.5]), scaled_params(2),
                              QosConstraints(r_min=50.0, e_min=0.0, p_max=1.0), 2,
                              OracleConfig(power_grid_steps=20))
    assert result.rounded is None
    assert result.relaxed is None
    assert result.ee == float("-inf")
    assert not result.feasible


@pytest.mark.parametrize("seed", range(3))
def test_oracle_point_is_binary_and_feasible(seed):
    lam = seeded_gains(seed)
    params = scaled_params(2)
    qos = QosConstraints(r_min=1.0, e_min=0.05, p_max=5.0)
    result = oracle_fixed_set(lam, params, qos, 2, OracleConfig(power_grid_steps=80))
    alloc = result.rounded.allocation
    assert alloc.is_binary
    assert float(np.sum(alloc.power)) <= qos.p_max + 1e-9
    assert check_feasible(alloc, lam, params, qos).feasible


def test_finer_grid_never_worse():
    lam = EigenChannels.from_gains([4.0, 1.5])
    params = scaled_params(2)
    coarse = oracle_fixed_set(lam, params, _FREE, 2, OracleConfig(power_grid_steps=20))
    fine = oracle_fixed_set(lam, params, _FREE, 2, OracleConfig(power_grid_steps=40))
    assert fine.ee >= coarse.ee


# ── Group 4 ──────────────────────────────────────────────────────────────────

def test_oracle_over_subsets():
    h = generate_rayleigh(2, 2, 3)
    outcome = oracle_full(h, scaled_params(2), _FREE, OracleConfig(power_grid_steps=40))
    assert outcome.evaluations == 3
    assert outcome.inner_solver == "oracle"
    assert outcome.best_n in (1, 2)
    assert outcome.ee == max(e.ee for e in outcome.subsets)
