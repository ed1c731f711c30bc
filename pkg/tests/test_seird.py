import math

import numpy as np
import pytest

from epipolicy.errors import NonFiniteState
from epipolicy.seird import (
    IcuModel,
    SeirdParams,
    SeirdState,
    effective_mortality,
    reference_params,
    simulate,
    step,
)


def make_params(n=1000.0, r0=2.64, alpha=0.0):
    return SeirdParams(r0=r0, gamma=1 / 16.33, sigma=1 / 5.27, mu=0.025,
                       n=n, alpha=alpha)


def test_step_hand_computed_euler_update():
    # one Euler day from S=990, I=10 with the reference parameters
    params = make_params()
    state = SeirdState(990.0, 0.0, 10.0, 0.0, 0.0)
    nxt, flows = step(state, params, re=2.64, mu_eff=0.025, dt=1.0)
    assert nxt.s == pytest.approx(988.39951, abs=1e-4)
    assert nxt.e == pytest.approx(1.60049, abs=1e-4)
    assert nxt.i == pytest.approx(9.38763, abs=1e-4)
    assert nxt.r == pytest.approx(0.59706, abs=1e-4)
    assert nxt.d == pytest.approx(0.01531, abs=1e-4)
    assert nxt.total() == pytest.approx(1000.0, abs=1e-9)
    assert flows.new_exposed == pytest.approx(1.60049, abs=1e-4)


def test_step_disease_free_state_is_absorbing():
    params = make_params()
    state = SeirdState(1000.0, 0.0, 0.0, 0.0, 0.0)
    nxt, flows = step(state, params, re=2.64, mu_eff=0.025, dt=1.0)
    assert nxt == state
    assert flows == (0.0, 0.0, 0.0, 0.0)


def test_step_zero_re_keeps_s_and_decays_e():
    params = make_params()
    state = SeirdState(985.0, 5.0, 10.0, 0.0, 0.0)
    nxt, _ = step(state, params, re=0.0, mu_eff=0.025, dt=1.0)
    assert nxt.s == state.s
    assert nxt.e == pytest.approx(5.0 - params.sigma * 5.0 + 0.0)


def test_step_rejects_bad_inputs():
    params = make_params()
    state = SeirdState(990.0, 0.0, 10.0, 0.0, 0.0)
    with pytest.raises(ValueError):
        step(state, params, re=-1.0, mu_eff=0.025, dt=1.0)
    with pytest.raises(ValueError):
        step(state, params, re=1.0, mu_eff=0.025, dt=0.0)


def test_step_non_finite_state_detected():
    params = make_params()
    state = SeirdState(math.inf, 0.0, 10.0, 0.0, 0.0)
    with pytest.raises(NonFiniteState):
        step(state, params, re=2.64, mu_eff=0.025, dt=1.0)


def test_effective_mortality_no_demand():
    params = make_params(n=1e6)
    assert effective_mortality(0.0, params, IcuModel()) == pytest.approx(0.036)


def test_effective_mortality_under_capacity():
    # demand 300 <= 600 beds
    params = make_params(n=1e6)
    assert effective_mortality(5000.0, params, IcuModel()) == pytest.approx(0.036)


def test_effective_mortality_over_capacity():
    # demand 1200 vs 600 beds: half treated
    params = make_params(n=1e6)
    assert effective_mortality(20000.0, params, IcuModel()) == pytest.approx(0.048)


def test_simulate_no_transmission_geometric_decay():
    params = make_params(n=1000.0)
    init = SeirdState(990.0, 0.0, 10.0, 0.0, 0.0)
    traj = simulate(init, params, lambda d: 0.0, horizon=20, substeps=1)
    expected = 10.0 * (1.0 - params.gamma) ** np.arange(21)
    np.testing.assert_allclose(traj.compartment("i"), expected, rtol=1e-12)


def test_simulate_subcritical_epidemic_dies_out():
    # R_e = 0.8 < 1: total infections bounded by the geometric chain
    # seed * Re / (1 - Re) = 400, and the infectious pool decays away
    params = make_params(n=1e6, r0=0.8)
    init = SeirdState(1e6 - 100, 0.0, 100.0, 0.0, 0.0)
    traj = simulate(init, params, lambda d: 0.8, horizon=400)
    assert traj.states[-1].i < 2.0
    assert traj.states[-1].i < 0.1 * traj.compartment("i").max()
    assert traj.cumulative_cases() < 500


def test_simulate_conserves_population():
    params = make_params(n=1e6)
    init = SeirdState(1e6 - 9000, 0.0, 9000.0, 0.0, 0.0)
    traj = simulate(init, params, lambda d: 2.64, icu=IcuModel(), horizon=90)
    for st in traj.states:
        assert abs(st.total() - 1e6) <= 1e-9 * 1e6


def test_simulate_monotone_deaths_and_cases():
    params = make_params(n=1e6)
    init = SeirdState(1e6 - 9000, 0.0, 9000.0, 0.0, 0.0)
    traj = simulate(init, params, lambda d: 2.64, icu=IcuModel(), horizon=90)
    d = traj.compartment("d")
    assert np.all(np.diff(d) >= 0)
    cases = np.cumsum(traj.flow("new_exposed"))
    assert np.all(np.diff(cases) >= 0)


@pytest.mark.parametrize("re,grows", [(0.5, False), (0.9, False),
                                      (1.1, True), (2.64, True)])
def test_epidemic_threshold(re, grows):
    # tiny seed keeps S ~ N; compare E+I after the initial transient settles
    params = make_params(n=1e9)
    init = SeirdState(1e9 - 1000, 0.0, 1000.0, 0.0, 0.0)
    traj = simulate(init, params, lambda d: re, horizon=120)
    ei = traj.compartment("e") + traj.compartment("i")
    assert (ei[120] > ei[60]) == grows


def test_grid_refinement_under_one_percent():
    # halving the internal step changes day-90 occupancies by < 1%
    params = make_params(n=1e6)
    init = SeirdState(1e6 - 9000, 0.0, 9000.0, 0.0, 0.0)
    t4 = simulate(init, params, lambda d: 2.64, icu=IcuModel(), horizon=90,
                  substeps=4)
    t8 = simulate(init, params, lambda d: 2.64, icu=IcuModel(), horizon=90,
                  substeps=8)
    for name in ("s", "e", "i", "r", "d"):
        a = getattr(t4.states[-1], name)
        b = getattr(t8.states[-1], name)
        assert abs(a - b) / max(abs(b), 1.0) < 0.01


def test_trajectory_shapes_and_rows():
    params = make_params(n=1e6)
    init = SeirdState(1e6 - 100, 0.0, 100.0, 0.0, 0.0)
    traj = simulate(init, params, lambda d: 2.0, horizon=10)
    assert len(traj.states) == 11
    assert len(traj.flows) == 10
    assert len(traj.re) == 10
    rows = traj.to_rows()
    assert rows[0]["day"] == 0 and "re" in rows[0]
    assert "re" not in rows[-1]  # final state row has no flow columns


def test_params_validation():
    with pytest.raises(ValueError):
        SeirdParams(r0=-1, gamma=0.1, sigma=0.2, mu=0.025, n=1000)
    with pytest.raises(ValueError):
        SeirdParams(r0=2, gamma=0.1, sigma=0.2, mu=1.5, n=1000)
    with pytest.raises(ValueError):
        SeirdParams(r0=2, gamma=0.1, sigma=0.2, mu=0.025, n=0)


def test_reference_params_values():
    p = reference_params(1e6)
    assert p.r0 == 2.64
    assert 1 / p.gamma == pytest.approx(16.33)
    assert 1 / p.sigma == pytest.approx(5.27)
    assert p.mu == 0.025
    assert p.alpha == 0.0
