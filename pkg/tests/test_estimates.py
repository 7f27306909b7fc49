"""Time-scaled regularity estimates, Harnack bounds and scalar lemmas."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pmelab import (
    ab_check,
    build_graph,
    complete_graph,
    counting_measure,
    diff_harnack_residual,
    graph_distance,
    harnack_check,
    harnack_rhs_distance,
    harnack_rhs_path,
    integral_min_inequality_check,
    integrate,
    minorant_ratio,
    path_graph,
    quadratic_minorant_check,
    square_graph,
)
from pmelab.errors import DomainError, LambdaOneError, NoPathError, ValidationError


def square_run(m=2.0, u0=(1.2, 0.9, 1.05, 0.8), t0=0.1, t1=2.0, points=40):
    g = square_graph()
    return integrate(g, m, np.array(u0), np.linspace(t0, t1, points))


# -- regularity along the flow ---------------------------------------------


def test_ab_estimate_holds_at_the_square_optimum():
    rep = ab_check(square_run(), 0.0, 4.0 / 3.0)
    assert rep.passed
    assert rep.min_slack >= -1e-8
    assert rep.points_checked > len(square_run().times)


def test_ab_estimate_fails_for_an_undersized_dimension():
    g = square_graph()
    traj = integrate(g, 2.0, {"x": 1.0, "y1": 0.05, "y2": 0.05, "z": 0.05}, np.linspace(0.05, 2.0, 40))
    rep = ab_check(traj, 0.0, 0.05)
    assert not rep.passed
    assert rep.min_slack < -1.0
    assert rep.argmin["vertex"] == "x"


def test_ab_report_records_parameters_and_argmin():
    rep = ab_check(square_run(), 0.0, 4.0 / 3.0)
    assert rep.kind == "ab"
    assert rep.parameters["d"] == pytest.approx(4.0 / 3.0)
    assert set(rep.argmin) >= {"t", "vertex", "form"}


def test_differential_harnack_follows_from_the_dimension_bound():
    traj = square_run()
    rep = diff_harnack_residual(traj, 0.0, 4.0 / 3.0)
    assert rep.passed
    assert rep.min_slack >= -1e-8


def test_differential_harnack_rejects_unit_lambda():
    with pytest.raises(LambdaOneError):
        diff_harnack_residual(square_run(), 1.0, 4.0 / 3.0)


# -- Harnack right-hand sides ----------------------------------------------


def test_distance_form_closed_formula():
    g = path_graph(3)
    value = harnack_rhs_distance(g, 0.5, 0.0, 1.0, 2.0, "1", "3")
    expected = 2.0 * 4 * (2.0**1.5 - 1.0) / (1.5 * 1.0 * 1.0)
    assert value == pytest.approx(expected, rel=1e-14)


def test_distance_form_vanishes_at_equal_vertices():
    g = path_graph(3)
    assert harnack_rhs_distance(g, 0.5, 0.0, 1.0, 2.0, "2", "2") == 0.0


def test_path_form_single_edge_formula():
    g = path_graph(3)
    value = harnack_rhs_path(g, 2.0, 0.5, 0.0, 1.0, 2.0, ["1", "2"])
    expected = 2.0 * 1 * (2.0**1.5 - 1.0) / (1.5 * 1.0 * 1.0)
    assert value == pytest.approx(expected, rel=1e-14)


def test_path_form_requires_consecutive_edges():
    g = path_graph(4)
    with pytest.raises(ValidationError):
        harnack_rhs_path(g, 2.0, 0.5, 0.0, 1.0, 2.0, ["1", "3"])


def test_rhs_forms_reject_unit_lambda():
    g = path_graph(3)
    with pytest.raises(LambdaOneError):
        harnack_rhs_distance(g, 0.5, 1.0, 1.0, 2.0, "1", "3")
    with pytest.raises(LambdaOneError):
        harnack_rhs_path(g, 2.0, 0.5, 1.0, 1.0, 2.0, ["1", "2"])


@given(st.integers(min_value=0, max_value=100))
@settings(max_examples=60, deadline=None)
def test_geodesic_path_never_beats_the_distance_form(seed):
    # the distance form is the geodesic path form with every edge weight
    # replaced by the global minimum, so it can only be larger
    rng = np.random.default_rng(seed)
    weights = rng.uniform(0.2, 2.0, 3)
    g = build_graph(
        [("1", "2", weights[0]), ("2", "3", weights[1]), ("3", "4", weights[2])],
        symmetrize=True,
    )
    t1, t2 = sorted(rng.uniform(0.2, 3.0, 2))
    if t2 - t1 < 0.05:
        return
    mu = float(rng.uniform(0.3, 2.0))
    path = ["1", "2", "3", "4"]
    path_value = harnack_rhs_path(g, 2.0, mu, 0.0, t1, t2, path)
    dist_value = harnack_rhs_distance(g, mu, 0.0, t1, t2, "1", "4")
    assert path_value <= dist_value * (1.0 + 1e-12)


def test_harnack_check_passes_on_the_square_and_reports_the_best_form():
    traj = square_run(t0=0.2, t1=2.5)
    rng = np.random.default_rng(1)
    pairs = []
    for _ in range(30):
        t1, t2 = np.sort(rng.uniform(0.2, 2.5, 2))
        if t2 - t1 < 0.02:
            t2 = t1 + 0.02
        x1, x2 = rng.choice(traj.graph.vertices, 2)
        pairs.append((float(t1), float(min(t2, 2.5)), str(x1), str(x2)))
    rep = harnack_check(traj, 4.0 / 3.0, 0.0, pairs)
    assert rep.passed
    assert rep.min_slack >= -1e-8
    assert rep.kind in ("harnack_distance", "harnack_path")


def test_harnack_check_validates_pair_times_and_symmetry():
    traj = square_run(t0=0.2, t1=2.0)
    with pytest.raises(ValidationError):
        harnack_check(traj, 1.0, 0.0, [(0.05, 1.0, "x", "z")])
    with pytest.raises(ValidationError):
        harnack_check(traj, 1.0, 0.0, [(1.0, 0.5, "x", "z")])
    g = build_graph([("a", "b", 1.0), ("b", "a", 2.0)])
    bad = integrate(g, 2.0, [1.0, 1.0], np.linspace(0.1, 1.0, 5))
    with pytest.raises(ValidationError):
        harnack_check(bad, 1.0, 0.0, [(0.2, 0.8, "a", "b")])


def test_harnack_check_rejects_unit_lambda():
    with pytest.raises(LambdaOneError):
        harnack_check(square_run(), 1.0, 1.0, [(0.2, 0.8, "x", "z")])


# -- scalar lemmas ---------------------------------------------------------


@pytest.mark.parametrize(
    "m,lo,hi",
    [(1.5, 1.0, 10.0), (2.0, 1e-4, 10.0), (3.0, 1e-4, 1.0)],
)
def test_quadratic_minorant_holds_on_its_regime(m, lo, hi):
    grid = np.linspace(lo, hi, 1000)
    assert quadratic_minorant_check(m, grid) >= -1e-12


def test_quadratic_minorant_regime_validation():
    with pytest.raises(ValidationError):
        quadratic_minorant_check(3.0, np.array([2.0]))
    with pytest.raises(ValidationError):
        quadratic_minorant_check(1.5, np.array([0.5]))
    with pytest.raises(ValidationError):
        quadratic_minorant_check(2.0, np.array([-1.0]))


def test_minorant_ratio_approaches_one_half_at_the_fixed_point():
    for m in (1.2, 1.5, 2.0, 3.0, 5.0):
        assert minorant_ratio(m, 1.0 - 1e-4) == pytest.approx(0.5, abs=1e-3)
        assert minorant_ratio(m, 1.0 + 1e-4) == pytest.approx(0.5, abs=1e-3)
    assert minorant_ratio(2.0, 1.0 - 1e-4) == 0.5
    assert minorant_ratio(2.0, 1.0 + 1e-4) == 0.5


def test_integral_min_inequality_on_constant_and_cubic_profiles():
    ts = np.linspace(0.5, 3.0, 2001)
    assert integral_min_inequality_check(0.5, 3.0, 2.0, 0.7, ts, np.ones_like(ts))
    assert integral_min_inequality_check(0.5, 3.0, 0.8, 0.4, ts, 1.0 + 0.3 * (ts - 1.0) ** 3)


def test_integral_min_inequality_on_seeded_random_cubics():
    rng = np.random.default_rng(5)
    ts = np.linspace(0.5, 3.0, 2001)
    for _ in range(50):
        coeffs = rng.uniform(-5.0, 5.0, 4)
        psi = np.polyval(coeffs, ts)
        assert integral_min_inequality_check(0.5, 3.0, 1.5, 1.0, ts, psi)


# -- report plumbing -------------------------------------------------------


def test_slack_csv_headers(tmp_path):
    rep = ab_check(square_run(), 0.0, 4.0 / 3.0)
    path = tmp_path / "slack.csv"
    rep.write_slack_csv(path)
    header = path.read_text().splitlines()[0]
    assert header == "t,x,slack"
    traj = square_run(t0=0.2, t1=2.0)
    hrep = harnack_check(traj, 1.0, 0.0, [(0.3, 1.5, "x", "z")])
    hrep.write_slack_csv(path)
    assert path.read_text().splitlines()[0] == "t1,t2,x1,x2,slack"


def test_report_passed_reflects_tolerance():
    rep = ab_check(square_run(), 0.0, 4.0 / 3.0, tol=1e-8)
    assert rep.passed == (rep.min_slack >= -rep.tolerance)
    assert rep.to_json_dict()["passed"] is rep.passed
