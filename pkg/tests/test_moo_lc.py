"""
Low-complexity heuristic - Test Suite.

 Group 1 - Scalarisation weights
 Group 2 - Closed-form powers: water-filling limit, single channel, KKT stationarity
 Group 3 - Scalarised objective: concavity and harvest monotonicity in gamma2
 Group 4 - Three-phase solve: phases, EE bound against dm_cvx, infeasibility tagging
 Group 5 - Phase-one budget search and warm starts
"""

import numpy as np
import pytest

from swipt.ascent import SolverConfig
from swipt.channel import EigenChannels
from swipt.dm_cvx import solve_dinkelbach
from swipt.errors import InfeasibleProblemError
from swipt.moo_lc import (
    MooState,
    budget_ladder,
    closed_form_power,
    moo_power_init,
    moo_power_state,
    moo_weights,
    phase_one_point,
    scalarized_gradient,
    scalarized_objective,
    shared_assignment,
    solve_moo_lc,
)
from swipt.system_model import QosConstraints, check_feasible, harvested_energy, water_filling

from conftest import scaled_params, seeded_gains

_PARAMS2 = scaled_params(2)
_CFG = SolverConfig()
_LAM3 = EigenChannels.from_gains([5.0, 2.0, 0.7])
_BINDING = QosConstraints(r_min=1.0, e_min=0.05, p_max=5.0)


# ── Group 1 ──────────────────────────────────────────────────────────────────

@pytest.mark.parametrize("r_min,e_min", [(1.0, 0.05), (4.0, 0.0), (0.0, 2.0), (3.0, 1.5)])
def test_weights_sum_to_one(r_min, e_min):
    state = moo_weights(_PARAMS2, QosConstraints(r_min, e_min, 10.0))
    assert state.gamma1 + state.gamma2 == pytest.approx(1.0, abs=1e-12)
    assert state.gamma2 == pytest.approx(_PARAMS2.theta * e_min / (r_min + _PARAMS2.theta * e_min))


def test_zero_targets_fall_back_to_rate():
    state = moo_weights(_PARAMS2, QosConstraints(0.0, 0.0, 10.0))
    assert (state.gamma1, state.gamma2) == (1.0, 0.0)


def test_state_rejects_bad_weights():
    with pytest.raises(ValueError):
        MooState(gamma1=0.7, gamma2=0.2)
    with pytest.raises(ValueError):
        MooState(gamma1=1.0, gamma2=0.0, phi=-1.0)


# ── Group 2 ──────────────────────────────────────────────────────────────────

def test_no_energy_target_is_water_filling():
    params = scaled_params(3)
    qos = QosConstraints(r_min=2.0, e_min=0.0, p_max=6.0)
    alloc = moo_power_init(_LAM3, params, qos)
    expected, _ = water_filling(_LAM3.gains, qos.p_max)
    assert alloc.power == pytest.approx(expected, abs=1e-6)
    assert float(np.sum(alloc.power)) == pytest.approx(qos.p_max, rel=1e-8)
    assert list(alloc.assign) == [0.5, 0.5, 0.5]


def test_single_channel_takes_whole_budget():
    alloc = moo_power_init(EigenChannels.from_gains([2.0]), scaled_params(1), QosConstraints(1.0, 0.0, 5.0))
    assert alloc.power[0] == pytest.approx(5.0, rel=1e-7)


@pytest.mark.parametrize("seed", range(5))
def test_budget_residual(seed):
    params = scaled_params(3)
    qos = QosConstraints(r_min=2.0, e_min=0.1, p_max=8.0)
    alloc, state = moo_power_state(seeded_gains(seed, 3), params, qos)
    assert abs(qos.p_max - float(np.sum(alloc.power))) <= 1e-8 * qos.p_max
    assert state.phi > 0


def test_kkt_stationarity():
    params = scaled_params(3)
    qos = QosConstraints(r_min=2.0, e_min=0.5, p_max=4.0)
    alloc, state = moo_power_state(_LAM3, params, qos)
    grad = scalarized_gradient(alloc.power, _LAM3, params, state)
    live = alloc.power > 1e-9
    assert np.any(live)
    assert grad[live] == pytest.approx(np.full(int(live.sum()), state.phi), rel=1e-6)
    assert np.all(grad[~live] <= state.phi * (1 + 1e-6))


def test_closed_form_marks_unbounded_channels():
    state = MooState(gamma1=0.5, gamma2=0.5)
    power = closed_form_power(0.0, _LAM3, _PARAMS2, state)
    assert np.all(np.isinf(power))


def test_pure_harvest_weights_use_strongest_channel():
    alloc, state = moo_power_state(_LAM3, scaled_params(3), QosConstraints(0.0, 0.2, 3.0))
    assert list(alloc.power) == [3.0, 0.0, 0.0]
    assert state.gamma2 == 1.0


# ── Group 3 ──────────────────────────────────────────────────────────────────

def test_scalarized_objective_concave(rng):
    state = moo_weights(_PARAMS2, QosConstraints(1.0, 0.5, 10.0))
    for _ in range(100):
        x, y = rng.uniform(0.0, 5.0, size=3), rng.uniform(0.0, 5.0, size=3)
        mid = scalarized_objective(0.5 * (x + y), _LAM3, _PARAMS2, state)
        ends = 0.5 * (scalarized_objective(x, _LAM3, _PARAMS2, state)
                      + scalarized_objective(y, _LAM3, _PARAMS2, state))
        assert mid >= ends - 1e-12


def test_harvest_grows_with_gamma2():
    params = scaled_params(3)
    harvested = []
    for e_min in (0.0, 0.1, 0.3, 0.6, 1.0, 2.0):
        _, state = moo_power_state(_LAM3, params, QosConstraints(1.0, e_min, 5.0))
        harvested.append(state.c_eh)
    assert all(b >= a - 1e-7 for a, b in zip(harvested, harvested[1:]))
    assert harvested[-1] > harvested[0]


# ── Group 4 ──────────────────────────────────────────────────────────────────

@pytest.mark.parametrize("seed", range(5))
def test_three_phases_at_most(seed):
    result = solve_moo_lc(seeded_gains(seed), _PARAMS2, _BINDING, 2, _CFG)
    phases = [row.phase for row in result.trace]
    assert len(phases) <= 3
    assert phases[-2:] == ["assignment", "refinement"]
    assert result.trace[-1].event == "rounding"
    assert result.rounded.allocation.is_binary
    assert check_feasible(result.rounded.allocation, seeded_gains(seed), _PARAMS2, _BINDING).feasible


@pytest.mark.parametrize("seed", range(3))
def test_bounded_by_dinkelbach(seed):
    lam = seeded_gains(seed)
    heuristic = solve_moo_lc(lam, _PARAMS2, _BINDING, 2, _CFG)
    reference = solve_dinkelbach(lam, _PARAMS2, _BINDING, 2, _CFG)
    assert heuristic.rounded.ee <= reference.relaxed.ee * (1.0 + 1e-4) + 1e-6


def test_assignment_phase_infeasibility_is_tagged():
    lam = EigenChannels.from_gains([3.0, 1.2])
    # the phase-one powers leave too little on the first channel to harvest e_min
    qos = QosConstraints(r_min=3.0, e_min=1.4, p_max=5.0)
    with pytest.raises(InfeasibleProblemError) as info:
        solve_moo_lc(lam, _PARAMS2, qos, 2, _CFG)
    assert info.value.phase == "assignment"
    assert info.value.constraint == "energy"


# ── Group 5 ──────────────────────────────────────────────────────────────────

_SHIPPED = QosConstraints(r_min=1.0, e_min=0.1, p_max=20.0)


def test_ladder_shared_below_budget():
    small, large = budget_ladder(10.0), budget_ladder(40.0)
    assert small[-1] == 10.0 and large[-1] == 40.0
    assert np.all(np.diff(large) > 0)
    below = small[:-1]
    assert np.array_equal(large[:below.size], below)
    assert np.all(below < 10.0)


def test_ladder_below_floor():
    assert list(budget_ladder(1e-4)) == [1e-4]


def test_shared_assignment_harvests_exactly_e_min():
    params = scaled_params(3)
    point = shared_assignment(np.array([2.0, 1.0, 0.5]), _LAM3, params, _SHIPPED)
    assert np.ptp(point.assign) == 0.0
    assert harvested_energy(point, _LAM3, params) == pytest.approx(_SHIPPED.e_min, rel=1e-12)


def test_shared_assignment_out_of_reach():
    assert shared_assignment(np.array([1e-3, 0.0, 0.0]), _LAM3, scaled_params(3), _SHIPPED) is None


@pytest.mark.parametrize("seed", range(3))
def test_phase_one_point_feasible_and_inside_budget(seed):
    lam = seeded_gains(seed, 4)
    params = scaled_params(4)
    point = phase_one_point(lam, params, _SHIPPED, 4)
    assert check_feasible(point, lam, params, _SHIPPED).feasible
    assert float(np.sum(point.power)) <= _SHIPPED.p_max


@pytest.mark.parametrize("seed", range(4))
def test_relaxed_ee_does_not_fall_with_budget(seed):
    params = scaled_params(4)
    lam = seeded_gains(seed, 4)
    ee, start = [], None
    for p_max in (10.0, 20.0, 40.0):
        relaxed = solve_moo_lc(lam, params, _SHIPPED.with_updates(p_max=p_max), 4, _CFG, start=start).relaxed
        ee.append(relaxed.ee)
        start = relaxed.allocation
    assert all(b >= a - 1e-12 for a, b in zip(ee, ee[1:]))


def test_start_bounds_relaxed_ee_from_below():
    lam = seeded_gains(2, 4)
    params = scaled_params(4)
    reference = solve_dinkelbach(lam, params, _SHIPPED, 4, _CFG).relaxed
    warm = solve_moo_lc(lam, params, _SHIPPED, 4, _CFG, start=reference.allocation)
    assert warm.relaxed.ee >= reference.ee
    assert [row.phase for row in warm.trace][-2:] == ["assignment", "refinement"]
