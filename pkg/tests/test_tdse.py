import math

import numpy as np
import pytest

from deltawall import DEFAULT_CONFIG, BranchError, DomainError, NormDriftError, WallState, make_cx, make_cy, solve_spectrum
from deltawall.tdse import (
    Grid,
    Protocol,
    WaveField,
    discretize_hamiltonian,
    evolve,
    fidelity,
    fidelity_trace,
    gap_table,
    ground_state,
    instantaneous_levels,
    wall_weights,
)

GS = DEFAULT_CONFIG.g_star
E1 = DEFAULT_CONFIG.e_star


def test_grid():
    g = Grid(99)
    assert g.dx * (g.J + 1) == pytest.approx(1.0, rel=1e-15)
    assert g.x[0] == pytest.approx(0.01) and g.x[-1] == pytest.approx(0.99)
    with pytest.raises(DomainError):
        Grid(32)


def test_wall_weights():
    g = Grid(99)
    idx, w = wall_weights(0.41, g)
    assert list(idx) == [40] and list(w) == [1.0]
    idx, w = wall_weights(0.415, g)
    assert list(idx) == [40, 41]
    np.testing.assert_allclose(w, [0.5, 0.5])
    with pytest.raises(DomainError):
        wall_weights(0.005, g)


def test_operator_is_kinetic_without_wall():
    g = Grid(127)
    d, o = discretize_hamiltonian(WallState(0.0, 0.4), g)
    assert np.all(d == d[0]) and np.all(o == -d[0] / 2)
    with pytest.raises(BranchError):
        discretize_hamiltonian(WallState(math.inf, 0.4), g)


def test_free_levels_converge_at_second_order():
    errs = []
    for J in (127, 255, 511):
        e = instantaneous_levels(WallState(0.0, 0.5), Grid(J), 1)[0][1].energy
        errs.append(abs(e - E1))
    assert np.log2(errs[0] / errs[1]) > 1.9 and np.log2(errs[1] / errs[2]) > 1.9


def test_grid_levels_close_to_exact():
    wall = WallState(10 * GS, 0.41)
    grid_e = instantaneous_levels(wall, Grid(512), 4)[0].energies
    exact = solve_spectrum(wall, 4).energies
    assert np.max(np.abs(grid_e / exact - 1)) < 0.01


def test_midpoint_level_two_ignores_wall():
    for g in (GS, 10 * GS, 100 * GS):
        e2 = instantaneous_levels(WallState(g, 0.5), Grid(511), 2)[0][2].energy
        free = instantaneous_levels(WallState(0.0, 0.5), Grid(511), 2)[0][2].energy
        # decoupled exactly; agreement limited by eps * ||H|| with g/dx on the diagonal
        assert e2 == pytest.approx(free, rel=1e-9)
        assert e2 == pytest.approx(4 * E1, rel=1e-4)


def test_gap_shrinks_with_cap():
    rows = gap_table(0.5, [10 * GS, 20 * GS, 50 * GS, 100 * GS], Grid(512))
    gaps = [r["gap"] for r in rows]
    assert all(a > b for a, b in zip(gaps, gaps[1:]))


def test_fidelity_basics():
    g = Grid(127)
    _, v = instantaneous_levels(WallState(0.0, 0.5), g, 2)
    assert fidelity(v[:, 0], v[:, 0], g) == pytest.approx(1.0, abs=1e-12)
    assert fidelity(v[:, 0], v[:, 1], g) == pytest.approx(0.0, abs=1e-12)
    a = WaveField(g, v[:, 0] * np.exp(0.7j))
    assert fidelity(a, WaveField(g, v[:, 0])) == pytest.approx(1.0, abs=1e-12)
    assert a.norm() == pytest.approx(1.0, abs=1e-12)


def test_static_ground_state_stays_put():
    grid = Grid(255)
    psi0 = ground_state(grid)
    # a wall of zero cap is not allowed, so a cycle at tiny cap stands in for H0
    p = Protocol(make_cx(0.3, 0.37), 10 / E1, 1e-12)
    traj = evolve(p, psi0, 0.01, grid, n_records=5)
    for state in traj.states:
        assert fidelity(state, psi0) == pytest.approx(1.0, abs=1e-6)
    assert traj.max_norm_drift < 1e-10


def test_protocol_schedule():
    p = Protocol(make_cx(0.41, 0.59), 30.0, 50 * GS)
    assert p(0.0) == (0.0, 0.41)
    g, x = p(15.0)
    assert g == pytest.approx(50 * GS) and x == pytest.approx(0.5)
    assert p(30.0)[0] == pytest.approx(0.0, abs=1e-9)
    ts = np.linspace(0, 30, 301)
    vals = np.array([p(t) for t in ts])
    assert np.all(np.abs(vals[:, 0]) <= 50 * GS * (1 + 1e-12))
    # the fast window around X = L/2 takes exactly the configured time
    move = p.segments[1]
    assert move.knots_t[2] - move.knots_t[1] == pytest.approx(0.1)
    assert move.knots_x[1] == pytest.approx(0.42) and move.knots_x[2] == pytest.approx(0.58)


def test_protocol_fraction_mode():
    p = Protocol(make_cx(0.41, 0.59), 30.0, 50 * GS, cross_width=0.02, cross_duration=None)
    move = p.segments[1]
    assert move.knots_t[2] - move.knots_t[1] == pytest.approx(0.05 * 10.0)


def test_flip_leaves_state_unchanged():
    grid = Grid(256)
    p = Protocol(make_cy(0.41), 20.0, 50 * GS)
    assert p.flip_times == [10.0]
    traj = evolve(p, ground_state(grid), 0.01, grid, n_records=3)
    assert traj.flips == [(10.0, 1000)]
    g_before = p.evaluate(p.segments[0], 10.0)[0]
    g_after = p.evaluate(p.segments[2], 10.0)[0]
    assert g_before == pytest.approx(50 * GS) and g_after == pytest.approx(-50 * GS)


def test_cy_protocol_shifts_ground_state():
    grid = Grid(256)
    p = Protocol(make_cy(0.41), 60.0, 50 * GS)
    traj = evolve(p, ground_state(grid), 0.005, grid, n_records=2)
    f = fidelity_trace(traj, p, 3)[-1]
    assert f[1] > 0.95


def test_sudden_limit():
    grid = Grid(512)
    psi0 = ground_state(grid)
    p = Protocol(make_cx(0.41, 0.59), 1e-3, 50 * GS)
    traj = evolve(p, psi0, 1e-5, grid, n_records=2)
    assert fidelity(traj.final, psi0) > 0.95


def test_fast_crossing_is_more_diabatic():
    # population left in level 1 after the move shrinks as the crossing speeds up
    grid = Grid(512)
    left = []
    for cd in (0.8, 0.4, 0.2, 0.1):
        p = Protocol(make_cx(0.41, 0.59), 30.0, 50 * GS, cross_duration=cd)
        traj = evolve(p, ground_state(grid), 0.005, grid, n_records=2)
        left.append(fidelity_trace(traj, p, 1)[-1, 0])
    assert all(a > b for a, b in zip(left, left[1:]))


def test_norm_drift_is_reported():
    grid = Grid(128)
    p = Protocol(make_cx(0.41, 0.59), 1.0, 50 * GS)
    with pytest.raises(NormDriftError) as info:
        evolve(p, ground_state(grid), 0.01, grid, tolerance=1e-18)
    assert info.value.step >= 1


def test_bad_inputs():
    grid = Grid(128)
    p = Protocol(make_cx(0.41, 0.59), 1.0, 50 * GS)
    with pytest.raises(DomainError):
        evolve(p, ground_state(grid), 0.0, grid)
    with pytest.raises(DomainError):
        evolve(p, np.ones(10), 0.01, grid)
    with pytest.raises(DomainError):
        Protocol(make_cx(0.41, 0.59), 1.0, math.inf)
