import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fraqdyn.errors import DomainError, FraqdynError, SolverDivergence
from fraqdyn.fracsolve import (
    SolverConfig,
    Trajectory,
    VectorField,
    abm_weights,
    mittag_leffler,
    solve_caputo,
)

orders = st.floats(0.05, 1.0)


def _decay(t, x):
    return -x


# --- configuration -------------------------------------------------------


@pytest.mark.parametrize("q", [0.0, -0.1, 1.5, float("nan")])
def test_rejects_bad_order(q):
    with pytest.raises(DomainError):
        SolverConfig(q=q, step=0.1, horizon=1.0)


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(step=0.0, horizon=1.0),
        dict(step=-1e-3, horizon=1.0),
        dict(step=0.1, horizon=0.05),
        dict(step=0.1, horizon=float("inf")),
        dict(step=0.1, horizon=1.0, corrector_iterations=0),
        dict(step=0.1, horizon=1.0, corrector_iterations=1.5),
        dict(step=0.1, horizon=1.0, memory_window=0),
    ],
)
def test_rejects_bad_grid(kwargs):
    with pytest.raises(DomainError):
        SolverConfig(q=0.5, **kwargs)


def test_step_count_tolerates_rounding():
    assert SolverConfig(q=0.5, step=0.1, horizon=0.3).n_steps == 3
    assert SolverConfig(q=0.5, step=2e-2, horizon=600).n_steps == 30000


def test_dimension_mismatch_and_nonfinite_init():
    cfg = SolverConfig(q=0.5, step=0.1, horizon=1.0)
    with pytest.raises(DomainError):
        solve_caputo(VectorField(_decay, 2), [1.0], cfg)
    with pytest.raises(DomainError):
        solve_caputo(_decay, [float("nan")], cfg)


def test_divergence_is_reported():
    cfg = SolverConfig(q=0.9, step=0.01, horizon=5.0)
    with pytest.raises(SolverDivergence) as info:
        solve_caputo(lambda t, x: x * x, [1.0], cfg)
    assert info.value.step > 0
    assert isinstance(info.value, FraqdynError)


# --- weights -------------------------------------------------------------


@given(orders, st.integers(0, 400))
def test_weight_sums(q, n):
    # exact integration of f = 1 by both quadratures
    pred, corr = abm_weights(q, n)
    assert pred.sum() == pytest.approx((n + 1) ** q, rel=1e-10)
    assert corr.sum() + 1.0 == pytest.approx((q + 1) * (n + 1) ** q, rel=1e-10)


@given(orders, st.integers(1, 200))
def test_weights_positive(q, n):
    pred, corr = abm_weights(q, n)
    assert np.all(pred > 0)
    assert np.all(corr > 0)


def test_weights_at_integer_order():
    pred, corr = abm_weights(1.0, 5)
    np.testing.assert_allclose(pred, np.ones(6))
    np.testing.assert_allclose(corr, [1, 2, 2, 2, 2, 2])


def test_weights_reject_bad_index():
    with pytest.raises(DomainError):
        abm_weights(0.5, -1)


# --- exactness and oracles ---------------------------------------------------


@pytest.mark.parametrize("q", [0.3, 0.5, 0.8, 1.0])
def test_constant_forcing_exact(q):
    traj = solve_caputo(lambda t, x: np.array([math.gamma(q + 1.0)]), [0.0], SolverConfig(q, 0.01, 1.0))
    np.testing.assert_allclose(traj.x, traj.times**q, rtol=0, atol=1e-12)


@pytest.mark.parametrize("q", [0.3, 0.6, 0.9])
def test_linear_forcing_exact(q):
    # product trapezoid is exact for piecewise linear forcing
    traj = solve_caputo(lambda t, x: np.array([t]), [0.0], SolverConfig(q, 0.01, 1.0))
    want = traj.times ** (1.0 + q) / math.gamma(2.0 + q)
    np.testing.assert_allclose(traj.x, want, rtol=0, atol=1e-12)


@pytest.mark.parametrize("q", [0.5, 0.7, 0.9])
def test_mittag_leffler_oracle(q):
    traj = solve_caputo(_decay, [1.0], SolverConfig(q, 1e-2, 2.0))
    want = np.array([mittag_leffler(q, -(t**q)) for t in traj.times])
    assert np.max(np.abs(traj.x - want)) < 5e-3


def test_integer_order_matches_exponential():
    traj = solve_caputo(_decay, [1.0], SolverConfig(1.0, 1e-3, 1.0))
    np.testing.assert_allclose(traj.x, np.exp(-traj.times), atol=1e-6)


@pytest.mark.parametrize("q", [0.4, 0.7, 0.9])
def test_convergence_order_on_smooth_solution(q):
    # x = t^2 solves D^q x = Gamma(3)/Gamma(3-q) t^(2-q); the expected order is 1 + q
    c = 2.0 / math.gamma(3.0 - q)

    def err(h):
        traj = solve_caputo(lambda t, x: np.array([c * t ** (2.0 - q)]), [0.0], SolverConfig(q, h, 1.0))
        return abs(traj.x[-1] - 1.0)

    e1, e2 = err(1 / 64), err(1 / 128)
    assert math.log2(e1 / e2) > 1.0 + q - 0.15


def test_self_convergence_on_nonlinear_problem():
    f = lambda t, x: np.array([-x[0] ** 3 + math.sin(t)])  # noqa: E731
    sols = [solve_caputo(f, [0.5], SolverConfig(0.6, h, 2.0)).x[-1] for h in (0.02, 0.01, 0.005)]
    ratio = abs(sols[0] - sols[1]) / abs(sols[1] - sols[2])
    assert 2.0 ** 1.3 < ratio < 2.0 ** 2.2


# --- memory window -----------------------------------------------------------


def test_window_covering_history_is_exact():
    cfg = SolverConfig(0.7, 0.01, 3.0)
    full = solve_caputo(_decay, [1.0], cfg)
    wide = solve_caputo(_decay, [1.0], SolverConfig(0.7, 0.01, 3.0, memory_window=cfg.n_steps + 5))
    np.testing.assert_array_equal(full.states, wide.states)


def test_window_error_shrinks_with_length():
    base = SolverConfig(0.7, 0.01, 10.0)
    full = solve_caputo(_decay, [1.0], base).x
    errors = [
        np.max(np.abs(solve_caputo(_decay, [1.0], SolverConfig(0.7, 0.01, 10.0, memory_window=w)).x - full))
        for w in (50, 200, 800)
    ]
    assert errors[0] > errors[1] > errors[2] > 0.0


# --- trajectory object --------------------------------------------------------


def test_trajectory_shape_and_determinism():
    f = lambda t, x: np.array([x[1], -x[0]])  # noqa: E731
    cfg = SolverConfig(0.9, 0.05, 2.0)
    a = solve_caputo(VectorField(f, 2, "osc"), [1.0, 0.0], cfg)
    b = solve_caputo(VectorField(f, 2, "osc"), [1.0, 0.0], cfg)
    assert len(a) == cfg.n_steps + 1
    assert a.dimension == 2
    assert a.step == pytest.approx(0.05)
    np.testing.assert_array_equal(a.states, b.states)
    np.testing.assert_array_equal(a.component(1), a.states[:, 1])
    tail = a.tail(0.25)
    assert len(tail) == 11
    assert tail.times[-1] == a.times[-1]


def test_corrector_iterations_converge_to_implicit_scheme():
    cfg = lambda k: SolverConfig(0.8, 0.05, 2.0, corrector_iterations=k)  # noqa: E731
    f = lambda t, x: np.array([-2.0 * x[0] + 0.1 * x[0] ** 2])  # noqa: E731
    x8, x20 = (solve_caputo(f, [1.0], cfg(k)).x for k in (8, 20))
    np.testing.assert_allclose(x8, x20, atol=1e-12)


def test_trajectory_length_mismatch():
    with pytest.raises(ValueError):
        Trajectory(np.zeros(3), np.zeros((2, 2)))


# --- Mittag-Leffler series ----------------------------------------------------


@given(st.floats(-3, 3))
def test_mittag_leffler_integer_order_is_exp(z):
    assert mittag_leffler(1.0, z) == pytest.approx(math.exp(z), rel=1e-12, abs=1e-15)


@given(st.floats(-3, 3))
def test_mittag_leffler_half_order_closed_form(z):
    # E_{1/2}(z) = exp(z^2) erfc(-z)
    assert mittag_leffler(0.5, z) == pytest.approx(math.exp(z * z) * math.erfc(-z), rel=1e-10)


def test_mittag_leffler_rejects_cancellation():
    with pytest.raises(DomainError):
        mittag_leffler(0.5, -40.0)


def test_mittag_leffler_at_zero():
    assert mittag_leffler(0.3, 0.0) == 1.0
