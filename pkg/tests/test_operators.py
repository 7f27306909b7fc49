"""Pointwise operators: Laplacian, convex remainders, pressure, curvature forms."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pmelab import (
    carre_du_champ,
    complete_graph,
    curvature_form,
    curvature_form_mixed,
    difference_sum,
    exp_remainder,
    exp_remainder_m,
    gradient_energy,
    gradient_energy_field,
    laplacian,
    laplacian_field,
    mixed_laplacian,
    mixed_laplacian_field,
    path_graph,
    pressure,
    pressure_inverse,
    square_graph,
)
from pmelab.errors import DomainError, ValidationError
from pmelab.operators import check_exponent, check_mixing

EXPONENTS = st.floats(min_value=1.05, max_value=5.0, allow_nan=False)
POSITIVE = st.floats(min_value=1e-3, max_value=10.0, allow_nan=False)


def positive_field(n):
    return st.lists(POSITIVE, min_size=n, max_size=n).map(np.array)


# -- validation ------------------------------------------------------------


def test_exponent_must_exceed_one():
    assert check_exponent(2) == 2.0
    for bad in (1.0, 0.5, -3.0, math.inf, math.nan):
        with pytest.raises(DomainError):
            check_exponent(bad)


def test_mixing_parameter_lives_in_unit_interval():
    assert check_mixing(0) == 0.0
    assert check_mixing(1) == 1.0
    for bad in (-0.1, 1.1, math.nan):
        with pytest.raises(DomainError):
            check_mixing(bad)


# -- Laplacian -------------------------------------------------------------


def test_laplacian_on_a_path_interior_vertex():
    g = path_graph(3)
    assert laplacian(g, [1.0, 0.0, 1.0], "2") == 2.0
    assert laplacian(g, [1.0, 0.0, 1.0], "1") == -1.0


def test_laplacian_of_constants_vanishes():
    g = complete_graph(4)
    assert laplacian(g, np.full(4, 3.7), "x1") == 0.0


def test_laplacian_field_matches_pointwise():
    g = square_graph()
    f = np.array([0.3, 1.2, -0.5, 2.0])
    field = laplacian_field(g, f)
    for x in g.vertices:
        assert field[g.index(x)] == pytest.approx(laplacian(g, f, x), rel=1e-14)


def test_carre_du_champ_two_point_oracle():
    g = complete_graph(2)
    assert carre_du_champ(g, [0.0, 2.0], "x1") == 2.0


@given(st.integers(min_value=0, max_value=50))
@settings(max_examples=100, deadline=None)
def test_carre_du_champ_identity_with_laplacian(seed):
    rng = np.random.default_rng(seed)
    g = square_graph()
    f = rng.normal(size=g.n)
    for x in g.vertices:
        direct = carre_du_champ(g, f, x)
        via_lap = 0.5 * (laplacian(g, f * f, x) - 2.0 * f[g.index(x)] * laplacian(g, f, x))
        assert direct == pytest.approx(via_lap, rel=1e-12, abs=1e-12)


def test_difference_sum_with_identity_map_is_the_laplacian():
    g = path_graph(4)
    f = np.array([0.5, 2.0, 1.0, 3.0])
    for x in g.vertices:
        assert difference_sum(g, lambda t: t, f, x) == pytest.approx(
            laplacian(g, f, x), rel=1e-14
        )


# -- convex remainders -----------------------------------------------------


def test_exp_remainder_exact_values():
    assert exp_remainder(0.0) == 0.0
    assert exp_remainder(math.log(2.0)) == pytest.approx(1.0 - math.log(2.0), rel=1e-15)
    assert exp_remainder(-1.0) == pytest.approx(math.exp(-1.0), rel=1e-15)


@given(st.floats(min_value=-50.0, max_value=50.0, allow_nan=False))
@settings(max_examples=300)
def test_exp_remainder_is_nonnegative_and_zero_only_at_zero(r):
    value = exp_remainder(r)
    assert value >= 0.0
    if abs(r) > 1e-7:
        assert value > 0.0


def test_exp_remainder_m_cubic_exponent_oracle():
    # ((m-1)^2/m) e^{qr} - (m-1) e^r + (m-1)/m at m = 3, r = 1, q = 3/2
    expected = (4.0 / 3.0) * math.exp(1.5) - 2.0 * math.e + 2.0 / 3.0
    assert exp_remainder_m(3.0, 1.0) == pytest.approx(expected, rel=1e-14)
    assert expected == pytest.approx(1.2056884368659957, rel=1e-15)


@given(
    st.floats(min_value=1e-3, max_value=30.0, allow_nan=False),
    st.sampled_from([-1.0, 1.0]),
)
@settings(max_examples=300)
def test_exp_remainder_m_collapses_at_m_two(size, sign):
    # arguments are kept away from 0, where the combination of remainders
    # cancels and the relative error necessarily grows like eps / r^2
    r = sign * size
    direct = exp_remainder_m(2.0, r)
    expected = 0.5 * math.expm1(r) ** 2
    assert direct == pytest.approx(expected, rel=1e-12)


@given(EXPONENTS, st.floats(min_value=-20.0, max_value=20.0, allow_nan=False))
@settings(max_examples=300)
def test_exp_remainder_m_is_nonnegative(m, r):
    assert exp_remainder_m(m, r) >= 0.0


def test_exp_remainder_m_overflow_returns_infinity():
    assert exp_remainder_m(1.001, 50.0) == math.inf


# -- pressure --------------------------------------------------------------


def test_pressure_oracle_value():
    assert pressure(1.5, 4.0) == pytest.approx(6.0, rel=1e-15)
    assert pressure(2.0, np.array([1.0, 0.5]))[1] == 1.0


@given(EXPONENTS, POSITIVE)
@settings(max_examples=300)
def test_pressure_round_trip(m, u):
    v = pressure(m, u)
    assert v > 0.0
    assert pressure_inverse(m, v) == pytest.approx(u, rel=1e-10)


def test_pressure_of_zero_is_zero():
    assert pressure(2.0, 0.0) == 0.0
    assert pressure_inverse(3.0, 0.0) == 0.0


# -- gradient energy -------------------------------------------------------


def test_gradient_energy_collapses_to_carre_du_champ_at_m_two():
    g = square_graph()
    rng = np.random.default_rng(11)
    w = rng.uniform(0.2, 3.0, g.n)
    for x in g.vertices:
        assert gradient_energy(g, 2.0, w, x) == pytest.approx(
            carre_du_champ(g, w, x), rel=1e-12
        )


@given(st.integers(min_value=0, max_value=200))
@settings(max_examples=150, deadline=None)
def test_gradient_energy_log_and_sum_forms_agree(seed):
    rng = np.random.default_rng(seed)
    m = float(rng.uniform(1.05, 5.0))
    g = square_graph()
    w = rng.uniform(0.05, 5.0, g.n)
    lw = np.log(w)
    for x in g.vertices:
        i = g.index(x)
        log_form = w[i] ** 2 * sum(
            g.kernel(x, y) * exp_remainder_m(m, lw[g.index(y)] - lw[i]) for y in g.neighbors(x)
        )
        assert gradient_energy(g, m, w, x) == pytest.approx(log_form, rel=1e-9)


@given(st.integers(min_value=0, max_value=200))
@settings(max_examples=150, deadline=None)
def test_gradient_energy_is_quadratically_homogeneous(seed):
    rng = np.random.default_rng(seed)
    m = float(rng.uniform(1.05, 5.0))
    c = float(rng.uniform(0.1, 10.0))
    g = square_graph()
    w = rng.uniform(0.05, 5.0, g.n)
    for x in g.vertices:
        assert gradient_energy(g, m, c * w, x) == pytest.approx(
            c * c * gradient_energy(g, m, w, x), rel=1e-9
        )


def test_gradient_energy_field_matches_pointwise():
    g = path_graph(5)
    rng = np.random.default_rng(4)
    for m in (1.2, 1.7, 2.0, 3.5):
        w = rng.uniform(0.1, 4.0, g.n)
        field = gradient_energy_field(g, m, w)
        for x in g.vertices:
            assert field[g.index(x)] == pytest.approx(gradient_energy(g, m, w, x), rel=1e-12)


def test_gradient_energy_handles_zero_values_for_large_m():
    g = path_graph(3)
    w = np.array([0.0, 1.0, 2.0])
    # only the finite-limit branch contributes at zeros when m >= 2
    value = gradient_energy(g, 2.0, w, "2")
    assert value == pytest.approx(carre_du_champ(g, w, "2"), rel=1e-12)
    assert np.isfinite(gradient_energy(g, 3.0, w, "2"))


def test_gradient_energy_is_continuous_across_the_form_switch():
    g = square_graph()
    rng = np.random.default_rng(9)
    w = rng.uniform(0.2, 3.0, g.n)
    below = gradient_energy_field(g, 1.5 - 1e-9, w)
    above = gradient_energy_field(g, 1.5 + 1e-9, w)
    np.testing.assert_allclose(below, above, rtol=1e-6)


def test_gradient_energy_near_one_stays_finite_on_pressure_fields():
    # pressures of a fixed density have vanishing log spread as m drops to
    # 1, which is the regime the small-exponent branch is built for
    g = square_graph()
    u = np.array([0.1, 2.0, 3.0, 0.4])
    for m in (1.01, 1.001):
        field = gradient_energy_field(g, m, pressure(m, u))
        assert np.all(np.isfinite(field))
        assert np.all(field >= 0.0)


def test_gradient_energy_near_one_saturates_on_wide_fields():
    # a ratio of 20 between neighbors at m = 1.001 puts the true value far
    # beyond float range, and the saturation contract reports +infinity
    g = square_graph()
    w = np.array([0.1, 2.0, 3.0, 0.4])
    field = gradient_energy_field(g, 1.001, w)
    assert field[g.index("x")] == math.inf
    assert np.all(field >= 0.0)


# -- curvature forms -------------------------------------------------------


def test_curvature_form_two_point_oracle():
    g = complete_graph(2)
    assert curvature_form(g, 2.0, [1.0, 0.5], "x1") == pytest.approx(3.0, rel=1e-14)


def test_curvature_form_mixed_two_point_oracle():
    g = complete_graph(2)
    assert curvature_form_mixed(g, 2.0, 1.0, [1.0, 0.5], "x1") == pytest.approx(
        1.6875, rel=1e-14
    )


@given(st.integers(min_value=0, max_value=300))
@settings(max_examples=200, deadline=None)
def test_curvature_form_mixed_reduces_to_plain_form_at_alpha_zero(seed):
    rng = np.random.default_rng(seed)
    m = float(rng.uniform(1.05, 5.0))
    g = square_graph()
    u = rng.uniform(0.05, 5.0, g.n)
    for x in g.vertices:
        assert curvature_form_mixed(g, m, 0.0, u, x) == pytest.approx(
            curvature_form(g, m, u, x), rel=1e-11, abs=1e-11
        )


@given(st.integers(min_value=0, max_value=300))
@settings(max_examples=200, deadline=None)
def test_curvature_form_scales_like_u_to_the_two_m_minus_two(seed):
    rng = np.random.default_rng(seed + 7000)
    m = float(rng.uniform(1.05, 4.0))
    alpha = float(rng.uniform(0.0, 1.0))
    c = float(rng.uniform(0.2, 5.0))
    g = square_graph()
    u = rng.uniform(0.05, 5.0, g.n)
    for x in g.vertices:
        scaled = curvature_form_mixed(g, m, alpha, c * u, x)
        base = curvature_form_mixed(g, m, alpha, u, x)
        assert scaled == pytest.approx(c ** (2.0 * m - 2.0) * base, rel=1e-9, abs=1e-12)


def test_curvature_form_allows_zero_neighbors_only_for_m_at_least_two():
    g = path_graph(3)
    u = np.array([0.0, 1.0, 2.0])
    assert np.isfinite(curvature_form(g, 2.0, u, "2"))
    with pytest.raises(DomainError):
        curvature_form(g, 1.5, u, "2")


def test_curvature_form_mixed_needs_positive_base_value():
    g = path_graph(3)
    with pytest.raises(DomainError):
        curvature_form_mixed(g, 2.0, 0.5, np.array([1.0, 0.0, 1.0]), "2")


# -- pressure identity and mixed Laplacian ---------------------------------


@given(st.integers(min_value=0, max_value=300))
@settings(max_examples=200, deadline=None)
def test_pressure_identity_links_laplacians_and_gradient_energy(seed):
    # m u(x)^{m-2} L(u^m)(x) = (m-1) v(x) Lv(x) + tilde-psi(v)(x), v the pressure
    rng = np.random.default_rng(seed + 500)
    m = float(rng.uniform(1.05, 5.0))
    g = square_graph()
    u = rng.uniform(0.05, 5.0, g.n)
    v = pressure(m, u)
    lv = laplacian_field(g, v)
    for x in g.vertices:
        i = g.index(x)
        lhs = m * u[i] ** (m - 2.0) * laplacian(g, u**m, x)
        rhs = (m - 1.0) * v[i] * lv[i] + gradient_energy(g, m, v, x)
        assert lhs == pytest.approx(rhs, rel=1e-9, abs=1e-9)


@given(st.integers(min_value=0, max_value=300))
@settings(max_examples=150, deadline=None)
def test_mixed_laplacian_formula(seed):
    rng = np.random.default_rng(seed + 900)
    m = float(rng.uniform(1.05, 5.0))
    alpha = float(rng.uniform(0.0, 1.0))
    g = square_graph()
    u = rng.uniform(0.05, 5.0, g.n)
    v = pressure(m, u)
    for x in g.vertices:
        i = g.index(x)
        expected = laplacian(g, v, x) + alpha * gradient_energy(g, m, v, x) / ((m - 1.0) * v[i])
        assert mixed_laplacian(g, m, alpha, u, x) == pytest.approx(expected, rel=1e-10)


def test_mixed_laplacian_field_at_alpha_zero_is_pressure_laplacian():
    g = path_graph(4)
    u = np.array([1.0, 2.0, 0.5, 1.5])
    np.testing.assert_allclose(
        mixed_laplacian_field(g, 2.0, 0.0, u),
        laplacian_field(g, pressure(2.0, u)),
        rtol=1e-14,
    )


def test_mixed_laplacian_field_zero_pressure_limit():
    g = path_graph(3)
    u = np.array([0.0, 1.0, 1.0])
    out = mixed_laplacian_field(g, 2.0, 1.0, u)
    # positive pressure next door pushes the correction to +infinity
    assert out[0] == math.inf
    assert np.all(np.isfinite(out[1:]))


def test_field_length_validation():
    g = path_graph(3)
    with pytest.raises(ValidationError):
        laplacian_field(g, np.ones(4))
