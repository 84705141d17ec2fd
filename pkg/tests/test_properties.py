import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from holobeam.holographic import GainMatrix, brute_force_switch_pattern, pattern_objective, solve_switch_pattern_ed
from holobeam.power import HardwareProfile, marginal_rates, power_share_hwi, water_filling

gains = arrays(float, st.integers(1, 8), elements=st.floats(1e-7, 1e-4))
quality = st.floats(0.3, 0.999)
rhos = st.floats(1e-3, 1e2)


@given(gains, rhos)
def test_water_filling_on_simplex(lam, rho):
    p = water_filling(lam, rho, 1e-12).p
    assert np.all(p >= 0)
    assert abs(p.sum() - 1) < 1e-12


@given(gains, rhos, quality)
def test_hwi_shares_on_simplex(lam, rho, eps):
    p = power_share_hwi(lam, rho, HardwareProfile(eps, 1.0, 1e-12)).p
    assert np.all(p >= 0)
    assert abs(p.sum() - 1) < 1e-9


@given(gains, rhos)
def test_water_filling_favours_stronger_streams(lam, rho):
    # only without impairments: a saturated strong stream may need less power than a weak one
    p = water_filling(lam, rho, 1e-12).p
    order = np.argsort(lam, kind="stable")
    assert np.all(np.diff(p[order]) >= -1e-9)


@settings(max_examples=50)
@given(gains, rhos, quality)
def test_hwi_stationarity(lam, rho, eps):
    hw = HardwareProfile(eps, 1.0, 1e-12)
    share = power_share_hwi(lam, rho, hw)
    rates = marginal_rates(share.p, lam, rho, hw)
    on = share.p > 1e-12
    np.testing.assert_allclose(rates[on], -share.lagrange_b, rtol=1e-6)


@settings(max_examples=40, deadline=None)
@given(arrays(float, (6, 6), elements=st.floats(-1, 1)))
def test_eigen_design_between_all_on_and_optimum(a):
    gain = GainMatrix.from_q(a @ a.T)
    ed = solve_switch_pattern_ed(gain)
    best = brute_force_switch_pattern(gain)
    tol = 1e-9 * max(1.0, best.objective_value)
    assert pattern_objective(gain, np.ones(6)) - tol <= ed.objective_value <= best.objective_value + tol
    assert set(np.unique(ed.xi)) <= {0.0, 1.0}
