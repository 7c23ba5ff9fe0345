import math

import numpy as np
import pytest

from errors import ContractViolation, InvariantViolation
from services.geometry import Box, L2Ball, Simplex
from services.losses import LinearStream, QuadraticStream
from services.oracle import (
    ComparatorMethod,
    SurrogateGapMonitor,
    exact_surrogate_min_convex,
    exact_surrogate_min_sc,
    gap_bound_convex,
    gap_bound_sc,
    grid_line_search,
    offline_comparator,
    offline_frank_wolfe,
    reference_ofw_convex,
    reference_ofw_sc,
    regret_bound_general,
    surrogate_gap_convex,
    surrogate_gap_sc,
    surrogate_value_sc,
)
from services.solvers import ConvexOFWState, DelayedOFW, eta_general, line_search_convex


def test_exact_convex_minimizer_in_one_dimension():
    box = Box([-1.0], [1.0])
    # y + y^2 -> -1/2
    np.testing.assert_allclose(exact_surrogate_min_convex(box, [1.0], [0.0], 1.0), [-0.5])
    # 4y + y^2 -> -2, proyectado a -1
    np.testing.assert_allclose(exact_surrogate_min_convex(box, [4.0], [0.0], 1.0), [-1.0])


def test_convex_gap_is_non_negative(rng):
    ball = L2Ball(np.zeros(3), 1.0)
    y1 = ball.initial_point()
    for _ in range(50):
        gbar = 5.0 * rng.standard_normal(3)
        y_star = exact_surrogate_min_convex(ball, gbar, y1, 0.3)
        y = ball.sample(rng, 1)[0]
        assert surrogate_gap_convex(gbar, y1, 0.3, y, y_star) >= -1e-12


FIRST_ORDER_SETS = [
    Box(-np.ones(4), np.ones(4)),
    L2Ball(np.array([0.5, 0.0, 0.0, -0.5]), 1.0),
    Simplex(4, scale=2.0),
]


@pytest.mark.parametrize("feasible_set", FIRST_ORDER_SETS, ids=["box", "ball", "simplex"])
def test_exact_minimizers_satisfy_first_order_conditions(feasible_set, rng):
    candidates = feasible_set.sample(rng, 100)
    for _ in range(20):
        gbar = 4.0 * rng.standard_normal(4)
        y1 = feasible_set.sample(rng, 1)[0]
        y_star = exact_surrogate_min_convex(feasible_set, gbar, y1, 0.7)
        grad = 0.7 * gbar + 2.0 * (y_star - y1)
        assert np.min((candidates - y_star) @ grad) >= -1e-6

        tau = int(rng.integers(1, 12))
        ysum = feasible_set.sample(rng, tau).sum(axis=0)
        y_star = exact_surrogate_min_sc(feasible_set, gbar, ysum, tau, 1.3)
        grad = gbar + 1.3 * (tau * y_star - ysum)
        assert np.min((candidates - y_star) @ grad) >= -1e-6


def test_sc_gap_matches_explicit_history(rng):
    box = Box(-np.ones(3), np.ones(3))
    history = list(box.sample(rng, 6))
    gbar = rng.standard_normal(3)
    beta = 1.7
    y = box.sample(rng, 1)[0]
    y_star = exact_surrogate_min_sc(box, gbar, np.sum(history, axis=0), len(history), beta)
    explicit = surrogate_value_sc(gbar, history, beta, y) - surrogate_value_sc(gbar, history, beta, y_star)
    compact = surrogate_gap_sc(gbar, np.sum(history, axis=0), len(history), beta, y, y_star)
    assert compact == pytest.approx(explicit, rel=1e-9, abs=1e-9)
    assert compact >= -1e-12


def test_gap_bounds():
    assert gap_bound_convex(2.0, 2) == pytest.approx(16.0)
    assert gap_bound_sc(1.0, 1.0, 1.0, 2) == pytest.approx(144.0)
    assert gap_bound_sc(1.0, 1.0, 1.0, 9) == pytest.approx(144.0 * 2.0)
    with pytest.raises(ContractViolation):
        gap_bound_sc(1.0, 1.0, 1.0, 1)


def test_regret_bound_general():
    D, G, T, d = 2.0, 1.0, 16, 3
    GD = G * D
    r2 = math.sqrt(2.0)
    expected = (
        (3 + 8 * r2) * GD * d
        + 32 * r2 * GD * 8.0 / 3
        + 3 * GD * d * 2.0 / (2 * r2)
        + 11 * r2 * GD * 18 ** 0.75 / 3
        + GD * 2.0 / r2
    )
    assert regret_bound_general(D, G, T, d) == pytest.approx(expected)
    assert regret_bound_general(D, G, T, d + 1) > regret_bound_general(D, G, T, d)


def test_reference_trajectory_length():
    box = Box(-np.ones(2), np.ones(2))
    gradients = [np.array([1.0, -1.0])] * 5
    trajectory = reference_ofw_convex(box, gradients, eta=0.1)
    assert len(trajectory) == 6
    np.testing.assert_array_equal(trajectory[0], box.initial_point())


def test_reference_callable_requires_rounds():
    box = Box(-np.ones(2), np.ones(2))
    stream = QuadraticStream(box, 10, beta=1.0, rng_seed=0)
    with pytest.raises(ContractViolation):
        reference_ofw_sc(box, stream.gradient, beta=1.0)
    trajectory = reference_ofw_sc(box, stream.gradient, beta=1.0, rounds=10)
    assert len(trajectory) == 11
    assert all(box.contains(x) for x in trajectory)


def test_grid_line_search_agrees_with_closed_form(rng):
    for _ in range(20):
        dF = rng.standard_normal(4)
        direction = rng.standard_normal(4)
        assert abs(grid_line_search(dF, direction, 1.0) - line_search_convex(dF, direction)) <= 1e-4


def test_grid_line_search_rejects_flat_curvature():
    with pytest.raises(ContractViolation):
        grid_line_search(np.ones(2), np.ones(2), 0.0)


def test_linear_comparator_is_lmo_of_sum():
    box = Box(-np.ones(3), np.ones(3))
    stream = LinearStream.from_gradients([[1.0, -2.0, 0.5], [0.5, 1.0, -1.0]])
    result = offline_comparator(box, stream)
    assert result.method is ComparatorMethod.CLOSED_FORM_LINEAR
    np.testing.assert_array_equal(result.x_star, [-1.0, 1.0, 1.0])
    assert result.offline_total == pytest.approx(-3.0)


def test_quadratic_comparator_projects_mean():
    ball = L2Ball([0.0, 0.0], 1.0)
    stream = QuadraticStream.from_targets(ball, [[1.0, 0.0], [1.0, 0.0], [0.8, 0.6]], beta=1.0)
    result = offline_comparator(ball, stream)
    assert result.method is ComparatorMethod.CLOSED_FORM_QUADRATIC
    mean = np.array([2.8, 0.6]) / 3.0
    np.testing.assert_allclose(result.x_star, mean)


def test_offline_fw_requires_matching_stream_for_closed_forms():
    box = Box([0.0], [1.0])
    with pytest.raises(ContractViolation):
        offline_comparator(box, LinearStream(1, 3, 1.0, 0), ComparatorMethod.CLOSED_FORM_QUADRATIC)


def test_offline_fw_open_loop_step_reports_gap():
    ball = L2Ball(np.zeros(2), 1.0)
    stream = QuadraticStream(ball, 20, beta=1.0, rng_seed=1)
    result = offline_frank_wolfe(ball, stream, max_iter=50, line_search=False)
    assert result.iterations == 50
    assert result.certified_gap >= 0.0


def test_monitor_accepts_solver_states(box10, rng):
    eta = eta_general(box10.diameter, 1.0, 200)
    solver = DelayedOFW(box10, eta)
    monitor = SurrogateGapMonitor(box10, gradient_bound=1.0, strict=True)
    for _ in range(200):
        monitor.observe(solver.state)
        g = rng.standard_normal(10)
        solver.ingest(g / np.linalg.norm(g))
    assert len(monitor.records) == 200
    assert monitor.violations == []
    assert 0.0 <= monitor.worst_ratio < 1.0


def test_monitor_flags_violation():
    box = Box([-1.0, -1.0], [1.0, 1.0])
    state = ConvexOFWState.start(np.array([1.0, 1.0]), eta=1.0)
    state.gbar = np.array([1000.0, 1000.0])

    lenient = SurrogateGapMonitor(box, gradient_bound=1.0)
    record = lenient.observe(state)
    assert record.violated
    assert len(lenient.violations) == 1

    with pytest.raises(InvariantViolation):
        SurrogateGapMonitor(box, gradient_bound=1.0, strict=True).observe(state)
