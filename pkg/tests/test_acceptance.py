"""One check per acceptance criterion; each prints a PASS/FAIL line.

Tolerances and runtimes are the targets of the project brief, not tuned here.
"""

import math
import time

import numpy as np

from deltawall import (
    DEFAULT_CONFIG,
    WallState,
    compose,
    holonomy_permutation,
    make_cx,
    make_cy,
    plan_connection,
    plan_permutation,
    solve_spectrum,
    trace,
)
from deltawall.cycles import crossing_position, cx_window_for_level, swap_labels
from deltawall.oracle import oracle_eigenvalues
from deltawall.tdse import Grid, Protocol, evolve, fidelity_trace, gap_table, ground_state

GS = DEFAULT_CONFIG.g_star
L = DEFAULT_CONFIG.length


def test_criterion_01_midpoint_double_swap(report):
    t = time.perf_counter()
    flow = trace(make_cx(0.41, 0.59), 4)
    elapsed = time.perf_counter() - t
    pairs = sorted(tuple(ev.labels) for ev in flow.crossings())
    at_half = all(abs(ev.x - L / 2) <= 1e-9 * L for ev in flow.crossings())
    ok = str(flow.permutation) == "(1 2)(3 4)" and pairs == [("L1", "R1"), ("L2", "R2")] and at_half and elapsed < 5
    assert report(1, ok, f"permutation {flow.permutation}, crossings {pairs} at L/2: {at_half}, {elapsed:.2f} s")


def test_criterion_02_one_third_swap(report):
    t = time.perf_counter()
    flow = trace(make_cx(0.31, 0.36), 4)
    elapsed = time.perf_counter() - t
    xs = [ev.x for ev in flow.crossings()]
    p = flow.permutation
    ok = (
        str(p) == "(2 3)" and p(1) == 1 and p(4) == 4
        and len(xs) == 1 and abs(xs[0] - L / 3) <= 1e-9 * L and elapsed < 5
    )
    assert report(2, ok, f"permutation {p}, crossings at {xs}, {elapsed:.2f} s")


def test_criterion_03_flip_cycle_shift(report):
    t = time.perf_counter()
    flow = trace(make_cy(0.41), 5)
    elapsed = time.perf_counter() - t
    shift = all(flow.permutation(n) == n + 1 for n in range(1, 5))
    e = flow.energies()
    monotone = True
    for stage in (0, 2):
        seg = e[flow.stage_indices(stage)]
        seg = seg[np.all(np.isfinite(seg), axis=1)]
        monotone &= bool(np.all(np.diff(seg, axis=0) > 0))
    ok = shift and monotone and elapsed < 5
    assert report(3, ok, f"map {flow.permutation}, stage curves strictly monotone: {monotone}, {elapsed:.2f} s")


def test_criterion_04_oracle_equivalence(report):
    t = time.perf_counter()
    worst, worst_at, monotone = 0.0, None, True
    for x in (0.41, 0.31):
        for m in (1, -1, 10, -10):
            wall = WallState(m * GS, x)
            exact = solve_spectrum(wall, 6).energies
            prev = None
            for n in (512, 1024, 2048, 4096):
                vals = oracle_eigenvalues(wall, 6, n, method="rank_one")
                if prev is not None:
                    monotone &= bool(np.all(vals < prev))
                prev = vals
            rel = np.abs(prev / exact - 1)
            if rel.max() > worst:
                worst, worst_at = float(rel.max()), (m, x, int(rel.argmax()) + 1)
    elapsed = time.perf_counter() - t
    ok = worst <= 1e-3 and monotone and elapsed < 60
    m, x, n = worst_at
    detail = f"max relative gap {worst:.3e} (level {n}, g={m}g*, X={x}L), decreasing in N: {monotone}, {elapsed:.1f} s"
    assert report(4, ok, detail)


def test_criterion_05_exceptional_invariance(report):
    gs = np.linspace(-10, 10, 20) * GS
    devs = [abs(solve_spectrum(WallState(g, 0.5), 2)[2].energy - 2 * math.pi**2) for g in gs]
    ok = max(devs) <= 1e-10
    assert report(5, ok, f"max |E_2 - 2 pi^2| = {max(devs):.2e} over 20 strengths")


def test_criterion_06_negative_threshold(report):
    def e1(g):
        return solve_spectrum(WallState(g, 0.5), 1)[1].energy

    lo, hi = -3.0, -1.0
    assert e1(lo) < 0 < e1(hi)
    while hi - lo > 1e-9:
        mid = 0.5 * (lo + hi)
        if e1(mid) < 0:
            lo = mid
        else:
            hi = mid
    g_flip = 0.5 * (lo + hi)
    ok = abs(g_flip + 2.0) <= 1e-6
    assert report(6, ok, f"sign change of E_1 at g = {g_flip:.10f}")


def test_criterion_07_no_crossing_bounds(report):
    gs = np.concatenate([-np.geomspace(50, 1e-3, 30), [0.0], np.geomspace(1e-3, 200, 40)]) * GS
    table = np.array([solve_spectrum(WallState(g, 0.41), 6).energies for g in gs])
    upper = table.max(axis=0)
    lower = table.min(axis=0)
    margins = [lower[n] - upper[n - 1] for n in range(1, 6)]
    ok = all(m > 0 for m in margins)
    assert report(7, ok, "min E_{n+1} - max E_n for n=1..5: " + ", ".join(f"{m:.3g}" for m in margins))


def test_criterion_08_planner(report):
    t = time.perf_counter()
    bad = []
    for a in range(1, 7):
        for b in range(1, 7):
            plan = plan_connection(a, b)
            if plan_permutation(plan, 7)(a) != b:
                bad.append((a, b, "composition"))
            levels = range(a, b) if b > a else range(a - 1, b - 1, -1)
            for k, cyc in zip(levels, plan):
                base = cyc.parts[0] if cyc.tag == "inverse" else cyc
                x0, x1 = base.params["x0"], base.params["x1"]
                (a0, b0), (a1, b1) = cx_window_for_level(k)
                xc = crossing_position(*swap_labels(k))
                if not (a0 < x0 < b0 and a1 < x1 < b1 and x0 < xc < x1):
                    bad.append((a, b, f"window for level {k}"))
    elapsed = time.perf_counter() - t
    ok = not bad and elapsed < 10
    assert report(8, ok, f"36 pairs, failures {bad}, {elapsed:.2f} s")


def test_criterion_09_double_cycle(report):
    p = trace(make_cx(0.41, 0.59), 4).permutation
    twice = compose(p, p)
    ok = twice.is_identity() and holonomy_permutation(make_cx(0.41, 0.59), 4) == p
    assert report(9, ok, f"C_X(0.41, 0.59) twice gives {twice}")


def test_criterion_10_dynamics(report):
    grid = Grid(512)
    t_base = 100.0
    fids, drifts = [], []
    t = time.perf_counter()
    for T in (t_base, 2 * t_base, 4 * t_base):
        p = Protocol(make_cx(0.41, 0.59), T, 50 * GS)
        traj = evolve(p, ground_state(grid), 0.005, grid, n_records=2)
        fids.append(float(fidelity_trace(traj, p, 2)[-1, 1]))
        drifts.append(traj.max_norm_drift)
    elapsed = time.perf_counter() - t
    # nondecreasing up to the 1e-3 allowance for run-to-run interference
    nondecreasing = all(b >= a - 1e-3 for a, b in zip(fids, fids[1:]))
    gaps = [r["gap"] for r in gap_table(0.5, [c * GS for c in (10, 20, 50, 100)], grid)]
    gap_monotone = all(a > b for a, b in zip(gaps, gaps[1:]))
    ok = nondecreasing and fids[-1] > 0.8 and max(drifts) <= 1e-8 and gap_monotone and elapsed < 600
    detail = (
        f"T0={t_base:g}: F2 = {', '.join(f'{f:.5f}' for f in fids)}; max drift {max(drifts):.1e}; "
        f"gaps {', '.join(f'{g:.4g}' for g in gaps)}; {elapsed:.0f} s"
    )
    assert report(10, ok, detail)
