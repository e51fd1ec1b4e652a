import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from qedfriction.errors import DerivativeUnavailable
from qedfriction.spectral import (
    BoostParams,
    PlanckOccupation,
    TabulatedOccupation,
    ZeroOccupation,
    doppler_shift,
    load_occupation_csv,
    planck_occupation,
    spectral_density,
    transformed_spectral_density,
)


def test_planck_unit_occupation():
    T = 0.37
    assert planck_occupation(T * math.log(2), T) == pytest.approx(1.0, rel=1e-15)


def test_planck_zero_temperature():
    assert planck_occupation(2.0, 0.0) == 0.0
    assert np.all(planck_occupation(np.array([0.1, 1.0]), 0.0) == 0.0)


def test_planck_x_equal_one():
    assert planck_occupation(1.0, 1.0) == pytest.approx(1 / (math.e - 1), rel=1e-15)
    assert planck_occupation(1.0, 1.0) == pytest.approx(0.581977, abs=1e-6)


def test_planck_small_x_series_is_continuous():
    T = 1.0
    below = planck_occupation(0.999e-6, T)
    above = planck_occupation(1.001e-6, T)
    assert below == pytest.approx(1 / 0.999e-6 - 0.5, rel=1e-12)
    assert above == pytest.approx(1 / 1.001e-6 - 0.5, rel=1e-9)


def test_planck_rejects_negative_temperature():
    with pytest.raises(ValueError):
        planck_occupation(1.0, -1.0)
    with pytest.raises(ValueError):
        PlanckOccupation(-1.0)


@settings(max_examples=200, deadline=None)
@given(st.floats(min_value=1e-3, max_value=50), st.floats(min_value=0.05, max_value=20))
def test_planck_positive_and_decreasing(w, T):
    assume(w / T < 700)  # exp(-x) underflows beyond this
    n1 = planck_occupation(w, T)
    n2 = planck_occupation(1.01 * w, T)
    assert n1 > 0 and n2 < n1


@settings(max_examples=200, deadline=None)
@given(st.floats(min_value=1e-3, max_value=30), st.floats(min_value=0.05, max_value=20))
def test_planck_derivative_closed_form(w, T):
    occ = PlanckOccupation(T)
    h = 1e-6 * w
    fd = (occ(w + h) - occ(w - h)) / (2 * h)
    assert occ.derivative(w) == pytest.approx(fd, rel=1e-5)


def test_spectral_density_vacuum():
    w = np.array([0.5, 1.0, 3.0])
    assert np.allclose(spectral_density(w, ZeroOccupation()), w / (2 * np.pi), rtol=0, atol=0)


def test_spectral_density_unit_occupation():
    T = math.pi / math.log(2)  # n(pi) = 1
    assert spectral_density(math.pi, PlanckOccupation(T)) == pytest.approx(1.5, rel=1e-14)


@settings(max_examples=100, deadline=None)
@given(st.floats(min_value=0.01, max_value=50), st.floats(min_value=0.1, max_value=10))
def test_spectral_density_coth_form(w, T):
    expected = w / (2 * np.pi) / math.tanh(w / (2 * T))
    assert spectral_density(w, PlanckOccupation(T)) == pytest.approx(expected, rel=1e-12)


def test_vacuum_floor():
    w = np.geomspace(0.01, 50, 50)
    assert np.all(spectral_density(w, PlanckOccupation(2.0)) >= w / (2 * np.pi))


def test_boost_validation_and_gamma():
    with pytest.raises(ValueError):
        BoostParams(1.0)
    b = BoostParams(0.6)
    assert b.gamma == pytest.approx(1.25, rel=1e-15)


@settings(max_examples=200, deadline=None)
@given(st.floats(min_value=-0.999, max_value=0.999))
def test_boost_gamma_identity(v):
    g = BoostParams(v).gamma
    assert g >= 1
    assert g * g * (1 - v * v) == pytest.approx(1.0, abs=1e-14 * g * g)


def test_doppler_examples():
    assert doppler_shift(2.0, BoostParams(0.0), 1) == 2.0
    assert doppler_shift(1.0, BoostParams(0.6), +1) == pytest.approx(2.0, rel=1e-15)
    with pytest.raises(ValueError):
        doppler_shift(1.0, BoostParams(0.1), 0)


@settings(max_examples=200, deadline=None)
@given(st.floats(min_value=0.01, max_value=50), st.floats(min_value=-0.99, max_value=0.99))
def test_forward_backward_product(w, v):
    b = BoostParams(v)
    assert doppler_shift(w, b, 1) * doppler_shift(w, b, -1) == pytest.approx(w * w, rel=1e-12)


@settings(max_examples=200, deadline=None)
@given(st.floats(min_value=-0.9, max_value=0.9), st.floats(min_value=-0.9, max_value=0.9),
       st.floats(min_value=0.01, max_value=50))
def test_doppler_group_property(v1, v2, w):
    b1, b2 = BoostParams(v1), BoostParams(v2)
    two_step = doppler_shift(doppler_shift(w, b1, 1), b2, 1)
    assert two_step == pytest.approx(doppler_shift(w, b1.compose(b2), 1), rel=1e-12)


def test_transformed_density_at_rest():
    w = np.geomspace(0.01, 50, 30)
    occ = PlanckOccupation(1.3)
    assert np.array_equal(transformed_spectral_density(w, occ, BoostParams(0.0)), spectral_density(w, occ))


@settings(max_examples=200, deadline=None)
@given(st.floats(min_value=0.01, max_value=50), st.floats(min_value=-0.9, max_value=0.9),
       st.floats(min_value=0.1, max_value=10))
def test_transformed_density_coth_form(w, v, T):
    b = BoostParams(v)
    expected = w / (2 * np.pi) / math.tanh(b.gamma * w * (1 + v) / (2 * T))
    assert transformed_spectral_density(w, PlanckOccupation(T), b) == pytest.approx(expected, rel=1e-12)


def test_transformed_density_vacuum_is_boost_invariant():
    w = np.geomspace(0.01, 50, 30)
    for v in (-0.8, 0.3, 0.95):
        assert np.allclose(transformed_spectral_density(w, ZeroOccupation(), BoostParams(v)), w / (2 * np.pi),
                           rtol=1e-15, atol=0)


@settings(max_examples=100, deadline=None)
@given(st.floats(min_value=0.01, max_value=50), st.floats(min_value=-0.9, max_value=0.9))
def test_vacuum_part_rescaling(w, v):
    # rho(gamma w (1+v)) / (gamma (1+v)) for the omega-proportional vacuum part
    b = BoostParams(v)
    shifted = doppler_shift(w, b, 1)
    via_lab = spectral_density(shifted, ZeroOccupation()) / (b.gamma * (1 + v))
    assert via_lab == pytest.approx(transformed_spectral_density(w, ZeroOccupation(), b), rel=1e-12)


def test_tabulated_reproduces_planck_between_nodes():
    T = 1.0
    grid = np.linspace(0.1, 20, 400)
    tab = TabulatedOccupation(grid, planck_occupation(grid, T))
    w = np.linspace(1.0, 15.0, 77)
    assert np.allclose(tab(w), planck_occupation(w, T), rtol=2e-4)
    exact = PlanckOccupation(T).derivative(w)
    err_coarse = np.max(np.abs(tab.derivative(w) / exact - 1))
    fine_grid = np.linspace(0.1, 20, 799)
    fine = TabulatedOccupation(fine_grid, planck_occupation(fine_grid, T))
    err_fine = np.max(np.abs(fine.derivative(w) / exact - 1))
    # central differences: second order in the table spacing
    assert err_coarse < 1e-2
    assert 3.0 < err_coarse / err_fine < 5.0


def test_tabulated_clamps_outside_grid():
    tab = TabulatedOccupation([1.0, 2.0], [0.5, 0.25])
    assert tab(0.1) == 0.5 and tab(10.0) == 0.25


def test_tabulated_non_smooth_has_no_derivative():
    tab = TabulatedOccupation([1.0, 2.0, 3.0], [0.5, 0.25, 0.1], smooth=False)
    with pytest.raises(DerivativeUnavailable):
        tab.derivative(1.5)


@pytest.mark.parametrize(
    "omega, n",
    [([1.0, 1.0], [0.1, 0.2]), ([1.0, 2.0], [0.1, -0.2]), ([1.0], [0.1])],
)
def test_tabulated_validation(omega, n):
    with pytest.raises(ValueError):
        TabulatedOccupation(omega, n)


def test_load_occupation_csv(tmp_path):
    path = tmp_path / "occ.csv"
    path.write_text("omega,n\n1.0,0.5\n2.0,0.25\n3.0,0.125\n")
    tab = load_occupation_csv(path)
    assert tab(2.0) == pytest.approx(0.25)
    bad = tmp_path / "bad.csv"
    bad.write_text("1.0,0.5\n2.0,0.25\n")
    with pytest.raises(ValueError):
        load_occupation_csv(bad)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(min_value=0, max_value=10), min_size=2, max_size=10),
       st.floats(min_value=-5, max_value=20))
def test_tabulated_nonnegative(values, w):
    tab = TabulatedOccupation(np.arange(1, len(values) + 1, dtype=float), values)
    assert tab(w) >= 0
