"""Acceptance suite: one test per criterion, reference constants a=1, b=3, c=1, d=5.

The slow-fast system adds eps=0.005 and s=4.  A pass/fail line per
criterion is printed in the terminal summary.  The trajectory criteria
(7, 8, 9) run full-memory solves and take a few minutes in total.
"""

import math

import numpy as np
import pytest

from fraqdyn.bifurcation import HOPF_AT_QSTAR, STABLE_ALL_Q, UNSTABLE_ALL_Q, regime_boundaries_3d
from fraqdyn.csvio import emit_csv, read_csv
from fraqdyn.dynamics import BURSTING, EQUILIBRIUM, LIMIT_CYCLE, classify_attractor
from fraqdyn.equilibria import branch_codomain, branch_inverse_2d, equilibria_2d, inverse_big_h
from fraqdyn.fracsolve import SolverConfig, Trajectory, mittag_leffler, solve_caputo
from fraqdyn.hrmodels import (
    big_h,
    derive,
    h,
    hr2d_vector_field,
    hr3d_vector_field,
    reference_2d,
    reference_3d,
    resting_x0,
)
from fraqdyn.stability import (
    CharPoly3,
    Status,
    classify_char_poly,
    critical_q_2d,
    hopf_window_2d,
    stable_2x2,
)

P2 = reference_2d()
P3 = reference_3d()
X0 = resting_x0(P2)
RESTING_2D = (X0, P2.c - P2.d * X0 * X0)
RESTING_3D = RESTING_2D + (0.0,)


def _rk4(f, x0, h, n):
    x = np.array(x0, dtype=float)
    out = np.empty((n + 1, len(x)))
    out[0] = x
    for k in range(n):
        t = k * h
        k1 = f(t, x)
        k2 = f(t + h / 2, x + h / 2 * k1)
        k3 = f(t + h / 2, x + h / 2 * k2)
        k4 = f(t + h, x + h * k3)
        x = x + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        out[k + 1] = x
    return out


def _brute_status(eigs, q, guard):
    worst = Status.STABLE
    for lam in eigs:
        gap = abs(np.angle(lam)) - q * math.pi / 2
        if abs(lam) < guard or abs(gap) < guard:
            return None
        if gap < 0:
            worst = Status.UNSTABLE
    return worst


# --- analytic landmarks -------------------------------------------------------


def test_01_critical_order_at_r1(criterion):
    q = critical_q_2d(1.0, P2)
    assert criterion(1, abs(q - 0.730585) <= 1e-4, f"q*(1) = {q:.7f} (target 0.730585 +- 1e-4)")


def test_02_critical_order_at_r425(criterion):
    q = critical_q_2d(4.25, P2)
    assert criterion(2, abs(q - 0.78823) <= 1e-4, f"q*(4.25) = {q:.7f} (target 0.78823 +- 1e-4)")


def test_03_hopf_window(criterion):
    lo, hi = hopf_window_2d(P2)
    ok = abs(lo - 0.07353) <= 1e-3 and abs(hi - 12.5931) <= 1e-3
    assert criterion(3, ok, f"window = [{lo:.6f}, {hi:.5f}] (target [0.07353, 12.5931] +- 1e-3)")


def test_04_three_equilibria_window(criterion):
    lo, hi, _, _ = branch_codomain(2, derive(P2))
    ok = abs(lo - 0.0) <= 1e-4 and abs(hi - 1.18519) <= 1e-4
    assert criterion(4, ok, f"[h(0), h(2p/3)] = [{lo:.6f}, {hi:.6f}] (target [0, 1.18519] +- 1e-4)")


def test_05_slow_fast_landmarks(criterion):
    dq = derive(P2)
    got = {
        "H(alpha1)": big_h(dq.alpha1, P3),
        "H(alpha2)": big_h(dq.alpha2, P3),
        "H(gamma1)": big_h(dq.gamma1, P3),
        "H(gamma2)": big_h(dq.gamma2, P3),
        "H(2)": big_h(2.0, P3),
    }
    want = {"H(alpha1)": 2.32399, "H(alpha2)": 6.47214, "H(gamma1)": 7.27968, "H(gamma2)": 26.3313, "H(2)": 30.4721}
    worst = max(abs(got[k] - want[k]) for k in want)
    detail = ", ".join(f"{k}={v:.5f}" for k, v in got.items())
    assert criterion(5, worst <= 1e-3, f"{detail} (max dev {worst:.1e})")


def test_06_regime_table(criterion):
    table = regime_boundaries_3d(P3)
    b = table.boundaries
    inner_want = (1.41401, 2.31369, 5.07454, 5.46681, 6.25616, 25.3362)
    labels_want = (
        STABLE_ALL_Q,
        STABLE_ALL_Q,
        HOPF_AT_QSTAR,
        UNSTABLE_ALL_Q,
        HOPF_AT_QSTAR,
        STABLE_ALL_Q,
        HOPF_AT_QSTAR,
        STABLE_ALL_Q,
        STABLE_ALL_Q,
    )
    ok = len(b) == 8
    if ok:
        inner_dev = max(abs(x - y) for x, y in zip(b[1:-1], inner_want))
        outer_dev = max(abs(b[0] - 1.32399), abs(b[-1] - 29.4721))
        ok = inner_dev <= 5e-3 and outer_dev <= 1e-3 and table.labels == labels_want
        detail = f"inner max dev {inner_dev:.1e}, outer max dev {outer_dev:.1e}, labels {'match' if table.labels == labels_want else 'differ'}"
    else:
        detail = f"found {len(b)} boundaries, expected 8"
    assert criterion(6, ok, detail)


# --- trajectories ---------------------------------------------------------------


@pytest.fixture(scope="module")
def hopf_bracket_runs():
    p = reference_2d(0.0)
    e3 = equilibria_2d(p)[-1]
    init = (e3.x + 1e-2, e3.y)
    out = {}
    for q in (0.72, 0.75):
        traj = solve_caputo(hr2d_vector_field(p), init, SolverConfig(q, 5e-3, 400.0))
        out[q] = classify_attractor(traj, e3.state)
    return out


def test_07_dynamics_bracket_at_hopf_point(hopf_bracket_runs, criterion):
    below, above = hopf_bracket_runs[0.72], hopf_bracket_runs[0.75]
    ok = below.kind == EQUILIBRIUM and above.kind == LIMIT_CYCLE
    detail = (
        f"q=0.72 -> {below.kind} (tail amp {below.tail_amplitude:.1e}), "
        f"q=0.75 -> {above.kind} (tail amp {above.tail_amplitude:.3f})"
    )
    assert criterion(7, ok, detail)


@pytest.fixture(scope="module")
def relaxation_runs():
    # q = 0.75 relaxes algebraically (like t^-q); T = 1600 brings the tail inside the default tolerances
    p = reference_2d(3.25)
    e3 = equilibria_2d(p)[-1]
    field = hr2d_vector_field(p)
    slow = solve_caputo(field, RESTING_2D, SolverConfig(0.75, 5e-3, 1600.0))
    fast = solve_caputo(field, RESTING_2D, SolverConfig(0.80, 5e-3, 400.0))
    return e3, classify_attractor(slow, e3.state), classify_attractor(fast, e3.state), slow.states[-1]


def test_08_relaxation_and_cycle_at_r425(relaxation_runs, criterion):
    e3, slow, fast, end = relaxation_runs
    dist = float(np.linalg.norm(end - np.asarray(e3.state)))
    ok = slow.kind == EQUILIBRIUM and fast.kind == LIMIT_CYCLE
    detail = f"q=0.75 -> {slow.kind} (|x(T)-E3| = {dist:.1e}), q=0.80 -> {fast.kind}"
    assert criterion(8, ok, detail)


@pytest.fixture(scope="module")
def bursting_runs():
    # full memory, h = 0.02, T = 3000 gives at least 4 complete slow cycles at both orders
    field = hr3d_vector_field(P3.with_stimulus(3.25))
    out = {}
    for q in (0.8, 0.9):
        traj = solve_caputo(field, RESTING_3D, SolverConfig(q, 2e-2, 3000.0))
        out[q] = classify_attractor(traj)
    return out


def test_09_bursting_ordering(bursting_runs, criterion):
    a, b = bursting_runs[0.8], bursting_runs[0.9]
    both = a.kind == BURSTING and b.kind == BURSTING
    ok = both and a.bursts.spikes_per_burst_mean > b.bursts.spikes_per_burst_mean
    detail = f"q=0.8 -> {a.kind}"
    if a.bursts is not None:
        detail += f" ({a.bursts.spikes_per_burst_mean:.2f} spikes/burst)"
    detail += f", q=0.9 -> {b.kind}"
    if b.bursts is not None:
        detail += f" ({b.bursts.spikes_per_burst_mean:.2f} spikes/burst)"
    assert criterion(9, ok, detail)


# --- property-based -----------------------------------------------------------


def test_10_solver_oracles(criterion):
    ml_errors = {}
    for q in (0.5, 0.7, 0.9):
        traj = solve_caputo(lambda t, x: -x, [1.0], SolverConfig(q, 1e-3, 2.0))
        want = np.array([mittag_leffler(q, -(t**q)) for t in traj.times])
        ml_errors[q] = float(np.max(np.abs(traj.x - want)))
    power_errors = {}
    for q in (0.5, 0.7, 0.9):
        g = math.gamma(q + 1.0)
        traj = solve_caputo(lambda t, x: np.array([g]), [0.0], SolverConfig(q, 1e-3, 1.0))
        power_errors[q] = abs(traj.x[-1] - 1.0)
    ok = max(ml_errors.values()) < 5e-3 and max(power_errors.values()) < 1e-3
    detail = "ML sup err " + ", ".join(f"q={q}: {e:.1e}" for q, e in ml_errors.items())
    detail += f"; t^q err at t=1 max {max(power_errors.values()):.1e}"
    assert criterion(10, ok, detail)


def test_11_integer_order_consistency(criterion):
    # the scheme is second order at q = 1; h = 5e-4 keeps phase drift on the spiking cycle below 1e-3
    p = reference_2d(3.25)
    f = hr2d_vector_field(p)
    traj = solve_caputo(f, RESTING_2D, SolverConfig(1.0, 5e-4, 50.0))
    ref = _rk4(f, RESTING_2D, 1e-4, 500000)[::5]
    err = float(np.max(np.abs(traj.states - ref)))
    assert criterion(11, err <= 1e-3, f"sup |ABM - RK4| on [0, 50] = {err:.2e} (h = 5e-4)")


def test_12_stability_oracle_equivalence(criterion):
    rng = np.random.default_rng(12)
    mismatches = 0
    checked = 0
    for _ in range(500):
        A = rng.normal(scale=2.0, size=(2, 2))
        q = rng.uniform(0.05, 1.0)
        want = _brute_status(np.linalg.eigvals(A), q, 1e-8)
        if want is None:
            continue
        checked += 1
        mismatches += stable_2x2(np.trace(A), np.linalg.det(A), q).status is not want
    cubic_checked = 0
    for _ in range(200):
        poly = CharPoly3(
            tau=rng.uniform(-10, 5), delta=rng.uniform(-10, 20), eps=rng.uniform(1e-3, 0.5), s=rng.uniform(0.1, 10)
        )
        q = rng.uniform(0.05, 1.0)
        want = _brute_status(np.roots(poly.coefficients), q, 1e-7)
        if want is None:
            continue
        cubic_checked += 1
        mismatches += classify_char_poly(poly, q)[0] is not want
    lo, hi = hopf_window_2d(P2)
    worst_identity = 0.0
    for r in rng.uniform(lo, hi, size=100):
        p = P2.with_stimulus(P2.stimulus_for(r))
        x = equilibria_2d(p)[-1].x
        jac = np.array([[-3 * x * x + 2 * p.b * x, 1.0], [-2 * p.d * x, -1.0]])
        lam = np.linalg.eigvals(jac)[0]
        worst_identity = max(worst_identity, abs(abs(np.angle(lam)) - critical_q_2d(r, P2) * math.pi / 2))
    ok = mismatches == 0 and worst_identity < 1e-9
    detail = (
        f"{checked} matrices + {cubic_checked} cubics checked, {mismatches} mismatches; "
        f"max | |arg| - q* pi/2 | = {worst_identity:.1e}"
    )
    assert criterion(12, ok, detail)


def test_13_round_trips(criterion, tmp_path):
    rng = np.random.default_rng(13)
    dq = derive(P2)
    worst_h = 0.0
    for branch, (lo, hi) in {1: (-10.0, dq.alpha1), 2: (dq.alpha1, dq.alpha2), 3: (dq.alpha2, 10.0)}.items():
        for x in rng.uniform(lo + 1e-3, hi - 1e-3, size=1000):
            worst_h = max(worst_h, abs(branch_inverse_2d(branch, h(x, dq.p), dq) - x))
    worst_H = max(abs(inverse_big_h(big_h(x, P3), P3) - x) for x in rng.uniform(-4, 4, size=1000))
    traj = Trajectory(np.arange(500) * 0.02, rng.normal(size=(500, 3)) * 10.0 ** rng.integers(-300, 300, (500, 1)))
    path = tmp_path / "traj.csv"
    emit_csv(traj, path)
    back = read_csv(path)
    emit_csv(back, tmp_path / "again.csv")
    csv_exact = (
        back.states.tobytes() == traj.states.tobytes()
        and back.times.tobytes() == traj.times.tobytes()
        and path.read_bytes() == (tmp_path / "again.csv").read_bytes()
    )
    ok = worst_h < 1e-9 and worst_H < 1e-9 and csv_exact
    detail = f"h/h^-1 max err {worst_h:.1e}, H/H^-1 max err {worst_H:.1e}, CSV {'bit-exact' if csv_exact else 'NOT exact'}"
    assert criterion(13, ok, detail)
