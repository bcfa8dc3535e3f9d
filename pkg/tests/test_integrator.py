import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import solve_ivp

from regime_predprey import (GridSpec, RegimeParameterSet, log_drift_phi, log_drift_psi,
                             log_drift_X, log_drift_Y, lyapunov_slope, simulate_auxiliary,
                             simulate_bundle, time_average)
from regime_predprey.errors import StepTooLarge
from regime_predprey.integrator import _chunk_inputs, switching_path_for

from conftest import BASE, make_scenario, random_scenario

UNIT = RegimeParameterSet(**{k: 1.0 for k in BASE})


def test_drift_X_arithmetic():
    assert log_drift_X(0.0, 0.0, UNIT) == pytest.approx(1 - 0.5 - 1 - 1 / 3, abs=1e-15)


def test_drift_X_without_predator_is_phi_drift():
    r = RegimeParameterSet(**BASE)
    for lx in (-3.0, 0.0, 2.0):
        assert log_drift_X(lx, -800.0, r) == log_drift_phi(lx, r)


def test_drift_Y_arithmetic_and_starvation():
    r = RegimeParameterSet(**dict(BASE, a2=1.0, beta=0.0, b2=1.0, c2=2.0))
    assert log_drift_Y(0.0, 0.0, r) == pytest.approx(-1 - 1 + 2 / 3, abs=1e-15)
    r = RegimeParameterSet(**BASE)
    assert log_drift_Y(-800.0, 0.3, r) == pytest.approx(-r.a2 - r.beta ** 2 / 2 - r.b2 * math.exp(0.3))
    assert log_drift_Y(-800.0, 0.3, r) < 0


def test_drift_Y_saturation_limit():
    r = RegimeParameterSet(**dict(BASE, c2=2.5, m2=0.8))
    gain = log_drift_Y(60.0, -60.0, r) - (-r.a2 - r.beta ** 2 / 2)
    assert gain == pytest.approx(r.c2 / r.m2, rel=1e-12)


def test_psi_equilibrium_root():
    r = RegimeParameterSet(**dict(BASE, c2=3.0))
    y_star = (-r.a2 + r.c2 / r.m2 - r.beta ** 2 / 2) / r.b2
    assert abs(log_drift_psi(math.log(y_star), r)) < 1e-14


finite = st.floats(min_value=-30, max_value=30)


@settings(max_examples=200, deadline=None)
@given(finite, finite, finite)
def test_predation_monotone_and_psi_dominates(lx, ly1, ly2):
    r = RegimeParameterSet(**BASE)
    lo, hi = sorted((ly1, ly2))
    if hi - lo > 1e-6 and lx < 5 and lo > -20:
        assert log_drift_X(lx, hi, r) < log_drift_X(lx, lo, r)
    assert log_drift_psi(ly1, r) >= log_drift_Y(lx, ly1, r)
    assert log_drift_phi(lx, r) >= log_drift_X(lx, ly1, r)


def test_deterministic_limit_matches_ode_solver():
    r = dict(a1=1.0, b1=1.0, c1=1.5, a2=0.5, b2=0.5, c2=2.0, m1=0.8, m2=1.0, m3=0.6,
             alpha=0.0, beta=0.0)
    s = make_scenario([r], x0=0.5, y0=2.0)
    p = s.regimes[0]

    def rhs(t, u):
        x, y = u
        den = p.m1 + p.m2 * x + p.m3 * y
        return [x * (p.a1 - p.b1 * x - p.c1 * y / den), y * (-p.a2 - p.b2 * y + p.c2 * x / den)]

    sol = solve_ivp(rhs, (0, 10), [0.5, 2.0], method="DOP853", rtol=1e-13, atol=1e-14)
    b = simulate_bundle(s, GridSpec(1e-4, 10.0, 1000), seed=0)
    assert abs(math.exp(b.logX[-1]) / sol.y[0, -1] - 1) < 1e-4
    assert abs(math.exp(b.logY[-1]) / sol.y[1, -1] - 1) < 1e-4


def test_same_seed_bit_identical(two_regime):
    g = GridSpec(1e-3, 50.0, 7)
    a, b = simulate_bundle(two_regime, g, 3), simulate_bundle(two_regime, g, 3)
    for k in ("times", "logX", "logY", "logPhi", "logPsi", "regime"):
        assert np.array_equal(getattr(a, k), getattr(b, k))
    c = simulate_bundle(two_regime, g, 4)
    assert not np.array_equal(a.logX, c.logX)


def test_auxiliary_equals_bundle_series():
    s = make_scenario([dict(a1=1.5), dict(a1=0.3, alpha=1.0, c2=2.0)], [[-2, 2], [0.5, -0.5]],
                      rho=0.4)
    g = GridSpec(1e-3, 200.0, 10)
    b = simulate_bundle(s, g, 8, path_id=2)
    assert np.array_equal(simulate_auxiliary(s, "phi", g, 8, 2).log_values, b.logPhi)
    assert np.array_equal(simulate_auxiliary(s, "psi", g, 8, 2).log_values, b.logPsi)


def test_domination_on_random_scenarios():
    rng = np.random.default_rng(42)
    for k in range(10):
        s = random_scenario(rng)
        b = simulate_bundle(s, GridSpec(1e-3, 100.0, 1), seed=k)
        assert np.all(np.isfinite(b.logX)) and np.all(np.isfinite(b.logY))
        assert np.all(b.logX <= b.logPhi)
        assert np.all(b.logY <= b.logPsi)


def test_domination_survives_prey_only_convergence():
    # predator dies out, X and phi merge: the ordering must still hold exactly
    s = make_scenario([dict(c2=0.2)])
    b = simulate_bundle(s, GridSpec(1e-3, 2000.0, 1), seed=1)
    gap = b.logPhi - b.logX
    assert gap[-1] < 1e-12
    assert np.all(gap >= 0) and np.all(b.logPsi >= b.logY)


def test_step_too_large_is_reported():
    s = make_scenario([dict(a1=5.0, b1=0.5)], x0=10.0)
    with pytest.raises(StepTooLarge) as exc:
        simulate_bundle(s, GridSpec(0.5, 10.0, 1), seed=0)
    assert 0 < exc.value.suggested_dt < 0.5


def test_jump_times_are_grid_points_and_bridge_preserves_increments(two_regime):
    g = GridSpec(0.01, 30.0, 1)
    path = switching_path_for(two_regime, g, 5)
    assert path.jump_times.size > 5
    h, reg, dw1, dw2, base_end = _chunk_inputs(0, g.n_steps, g.dt, path, 5, 0, 0)
    t = np.concatenate([[0.0], np.cumsum(h)])
    # every jump is a substep boundary and regimes are constant on each substep
    for jt in path.jump_times:
        assert np.min(np.abs(t - jt)) < 1e-9
    assert np.array_equal(reg, path.regime_at(t[:-1] + 1e-12))
    assert base_end.sum() == g.n_steps
    # summing bridge pieces recovers the unsplit base increments
    w = np.random.Generator(np.random.Philox(
        np.random.SeedSequence(5, spawn_key=(0, 1, 0)))).standard_normal((g.n_steps, 2)) * 0.1
    owner = np.concatenate([[0], np.cumsum(base_end)[:-1]])
    assert np.allclose(np.bincount(owner, dw1), w[:, 0], atol=1e-14)
    assert np.allclose(np.bincount(owner, dw2), w[:, 1], atol=1e-14)


def test_noise_does_not_depend_on_switching():
    # duplicated regime: switching only splits steps, the Brownian path is shared,
    # so the two runs differ by the O(dt) effect of the extra substeps
    one = make_scenario([{}])
    two = make_scenario([{}, {}], [[-3.0, 3.0], [3.0, -3.0]])
    g = GridSpec(1e-3, 20.0, 1)
    a, b = simulate_bundle(one, g, 2), simulate_bundle(two, g, 2)
    assert np.max(np.abs(a.logX - b.logX)) < 1e-2
    c = simulate_bundle(one, g, 3)
    assert np.max(np.abs(a.logX - c.logX)) > 0.1


def test_gbm_mean_matches_closed_form():
    # b1 = 0 turns phi into a geometric Brownian motion (validation bypassed)
    s = make_scenario([dict(a1=0.4, b1=0.0, alpha=0.6)], x0=1.3)
    g = GridSpec(0.02, 1.0, 50)
    finals = np.array([simulate_auxiliary(s, "phi", g, 1, r).log_values[-1]
                       for r in range(10000)])
    vals = np.exp(finals)
    se = vals.std(ddof=1) / math.sqrt(vals.size)
    assert abs(vals.mean() - 1.3 * math.exp(0.4)) < 3 * se


def test_phi_time_average_decreases_with_self_competition():
    g = GridSpec(1e-3, 2000.0, 10)
    avg = [time_average(simulate_auxiliary(make_scenario([dict(b1=b)]), "phi", g, 0),
                        lambda x, i: x).value for b in (1.0, 2.0)]
    assert avg[1] < avg[0]


def test_transient_psi_has_negative_slope():
    # -a2 + c2/m2 < 0 everywhere, hence T2 > 0
    s = make_scenario([dict(a2=1.0, c2=0.5)])
    p = simulate_auxiliary(s, "psi", GridSpec(1e-3, 2000.0, 100), 0)
    est = lyapunov_slope(p.times, p.log_values, (1000.0, 2000.0))
    assert est.high < 0
    assert est.slope == pytest.approx(-1.0 + 0.5 - 0.125, abs=0.1)


def test_csv_export(tmp_path, two_regime):
    b = simulate_bundle(two_regime, GridSpec(0.01, 1.0, 10), 0)
    f = tmp_path / "p.csv"
    b.to_csv(f)
    lines = f.read_text().splitlines()
    assert lines[0] == "time,regime,logX,logY,logPhi,logPsi"
    assert len(lines) == b.times.size + 1
    row = lines[-1].split(",")
    assert float(row[2]) == b.logX[-1]
    assert int(row[1]) == b.regime[-1] + 1
