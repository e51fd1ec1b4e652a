import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from qedfriction.errors import CutoffRequired, DivergentTail
from qedfriction.numerics import QuadratureSpec, oscillatory_phase_integral, quad_semi_infinite
from qedfriction.rindler import (
    RindlerParams,
    coth_integrand,
    correlator_weights,
    gamma_identity,
    moving_spectral_density,
    rindler_balance_residual,
    rindler_diffusion_rate,
    rindler_drag,
    spectrum_table,
    trajectory,
    xi_eta_closed_form,
)
from qedfriction.spectral import BoostParams, PlanckOccupation, planck_occupation, transformed_spectral_density
from qedfriction.thermal_kinetics import diffusion_rate, drag_force


def test_params():
    r = RindlerParams(2 * math.pi)
    assert r.T_DU == pytest.approx(1.0, rel=1e-15)
    with pytest.raises(ValueError):
        RindlerParams(0.0)


def test_trajectory_origin_and_unit_point():
    t, y = trajectory(0.0, RindlerParams(2.0))
    assert t == 0.0 and y == 0.5
    t, y = trajectory(1.0, RindlerParams(1.0))
    assert (t, y) == pytest.approx((1.175201, 1.543081), abs=1e-6)


@settings(max_examples=200, deadline=None)
@given(st.floats(min_value=0.1, max_value=10), st.floats(min_value=-5, max_value=5))
def test_trajectory_hyperbola(a, atau):
    r = RindlerParams(a)
    t, y = trajectory(atau / a, r)
    # y - t loses digits like e^{2|a tau|}; scale the tolerance by that conditioning
    cond = (y * y + t * t) * a * a
    assert (y - t) * (y + t) == pytest.approx(1 / a**2, rel=1e-14 * cond)


def test_trajectory_phase():
    r, w = RindlerParams(1.7), 0.8
    tau = np.linspace(-2, 2, 9)
    t, y = trajectory(tau, r)
    assert np.allclose(w * (t + y), w / r.a * np.exp(r.a * tau), rtol=1e-14)


def test_xi_modulus_at_unit_arguments():
    a = 1.0
    xi = xi_eta_closed_form(a, a, RindlerParams(a), "xi")
    expected = math.pi / math.sinh(math.pi) * math.exp(-math.pi) / a**2
    assert abs(xi) ** 2 == pytest.approx(expected, rel=1e-12)
    assert abs(xi) ** 2 == pytest.approx(0.0117554, abs=1e-7)


@settings(max_examples=100, deadline=None)
@given(st.floats(min_value=0.1, max_value=10), st.floats(min_value=0.1, max_value=5), st.floats(min_value=0.5, max_value=3))
def test_xi_eta_ratio_and_omega_independence(w, W, a):
    r = RindlerParams(a)
    xi = xi_eta_closed_form(w, W, r, "xi")
    eta = xi_eta_closed_form(w, W, r, "eta")
    assert abs(eta) / abs(xi) == pytest.approx(math.exp(math.pi * W / a), rel=1e-12)
    assert abs(xi_eta_closed_form(2 * w, W, r)) == pytest.approx(abs(xi), rel=1e-12)


def test_closed_form_validation():
    with pytest.raises(ValueError):
        xi_eta_closed_form(1.0, 1.0, RindlerParams(1.0), "zeta")
    with pytest.raises(ValueError):
        xi_eta_closed_form(-1.0, 1.0, RindlerParams(1.0))


def test_gamma_identity_at_a():
    lhs, rhs, rhs_exp = gamma_identity(1.0, RindlerParams(1.0))
    ref = (math.pi / math.sinh(math.pi)) ** 2
    assert lhs == pytest.approx(ref, rel=1e-12)
    assert rhs == pytest.approx(ref, rel=1e-14) and rhs_exp == pytest.approx(ref, rel=1e-14)
    assert ref == pytest.approx(0.0740, abs=1e-4)


def test_gamma_identity_small_frequency():
    a = 2.0
    W = np.array([1e-3, 1e-4]) * a
    lhs, _, _ = gamma_identity(W, RindlerParams(a))
    # |Gamma(iy)|^4 = 1/y^4 (pi y / sinh pi y)^2 ~ 1/y^4 (1 - pi^2 y^2 / 3)
    y = W / a
    assert np.allclose(lhs * W**4, a**4 * (1 - math.pi**2 * y**2 / 3), rtol=1e-10)


def test_gamma_identity_ratio():
    r = RindlerParams(1.0)
    l1, _, _ = gamma_identity(1.0, r)
    l2, _, _ = gamma_identity(2.0, r)
    expected = (1 / 2) ** 2 * (math.sinh(math.pi) / math.sinh(2 * math.pi)) ** 2
    assert l2 / l1 == pytest.approx(expected, rel=1e-10)


def test_correlator_weights_are_planck():
    r = RindlerParams(3.0)
    W = np.linspace(0.1, 20, 50)
    cw = correlator_weights(W, r)
    n = planck_occupation(W, r.T_DU)
    assert np.allclose(cw.w_g_gdag, n / W, rtol=1e-11)
    assert np.allclose(cw.w_gdag_g, (n + 1) / W, rtol=1e-11)
    assert np.all(cw.w_g_gdag >= 0) and np.all(cw.w_gdag_g >= 0)


@settings(max_examples=200, deadline=None)
@given(st.floats(min_value=0.01, max_value=50), st.floats(min_value=0.1, max_value=10))
def test_kms_ratio(W, a):
    r = RindlerParams(a)
    assume(W / r.T_DU < 700)  # keep exp(Omega/T_DU) finite
    cw = correlator_weights(W, r)
    assert cw.kms_ratio == pytest.approx(math.exp(W / r.T_DU), rel=1e-12)


def test_weights_at_large_frequency():
    r = RindlerParams(1.0)
    cw = correlator_weights(200.0, r)
    assert cw.w_g_gdag < 1e-250
    assert cw.w_gdag_g == pytest.approx(1 / 200.0, rel=1e-10)


@pytest.mark.parametrize("k", [0.5, 1.0, 2.0])
def test_unruh_equivalence(params, k):
    r = RindlerParams(2 * math.pi * k)
    routes = rindler_diffusion_rate(r, params)
    thermal = diffusion_rate(PlanckOccupation(k), params).value
    assert routes.route_a.value == pytest.approx(thermal, rel=1e-8)
    assert routes.relative_difference <= 1e-8


def test_rindler_diffusion_limits(params):
    small = rindler_diffusion_rate(RindlerParams(0.05), params).route_a.value
    unit = rindler_diffusion_rate(RindlerParams(2 * math.pi), params).route_a.value
    assert 0 < small < 1e-9 * unit
    r1 = rindler_diffusion_rate(RindlerParams(2.0), params).route_a.value
    r2 = rindler_diffusion_rate(RindlerParams(4.0), params).route_a.value
    assert r2 > r1


def test_net_linearized_drag(params):
    r = RindlerParams(2 * math.pi)
    assert rindler_drag(0.0, r, params).value == 0.0
    f = rindler_drag(0.02, r, params).value
    g = drag_force(0.02, PlanckOccupation(r.T_DU), params, form="linearized").value
    assert f == pytest.approx(g, rel=1e-12)
    assert f < 0


def test_coth_total_needs_cutoff(params):
    with pytest.raises(CutoffRequired):
        rindler_drag(0.0, RindlerParams(1.0), params, form="coth_total")


def test_coth_total_log_growth(params):
    r = RindlerParams(1.0)
    vals = [rindler_drag(0.0, r, params, QuadratureSpec().with_cutoff(100 * math.e**k), "coth_total").value
            for k in range(3)]
    assert (vals[1] - vals[0]) / (vals[2] - vals[1]) == pytest.approx(1.0, rel=0.05)


def test_coth_integrand_diverges_adaptively(params):
    with pytest.raises(DivergentTail):
        quad_semi_infinite(coth_integrand(RindlerParams(1.0), params))


def test_coth_integrand_small_frequency_limit(params):
    f = coth_integrand(RindlerParams(1.0), params)
    assert f(0.0) == 0.0
    assert f(1e-9) == pytest.approx(1e-9 * params.coupling * 2 * params.beta * 1e-9 / math.pi, rel=1e-6)


def test_unknown_drag_form(params):
    with pytest.raises(ValueError):
        rindler_drag(0.1, RindlerParams(1.0), params, form="other")


def test_moving_spectrum_composes_existing_transform():
    r = RindlerParams(2.0)
    w = np.geomspace(0.01, 10, 20)
    assert np.array_equal(moving_spectral_density(w, 0.3, r),
                          transformed_spectral_density(w, PlanckOccupation(r.T_DU), BoostParams(0.3)))


def test_rindler_balance(params):
    assert rindler_balance_residual(RindlerParams(2 * math.pi), params, np.geomspace(1e-3, 50, 300)) <= 1e-12


def test_spectrum_table_columns_and_values():
    rows = spectrum_table(RindlerParams(1.0), np.linspace(0.1, 10, 25))
    assert list(rows[0]) == ["Omega", "w_gg_dag", "w_g_dag_g", "kms_ratio", "gamma_identity_residual"]
    for row in rows:
        assert abs(row["gamma_identity_residual"]) <= 1e-10
        assert row["kms_ratio"] == pytest.approx(math.exp(2 * math.pi * row["Omega"]), rel=1e-12)


def test_closed_form_matches_ladder_for_eta():
    a = 1.5
    r = RindlerParams(a)
    val = oscillatory_phase_integral(a, a, a, -1)
    closed = xi_eta_closed_form(a, a, r, "eta")
    assert abs(val - closed) <= 1e-6 * abs(closed)
