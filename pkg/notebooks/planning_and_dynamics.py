# coding: utf-8
"""
Planning level transfers and checking them with real-time dynamics
==================================================================

Run with ``python notebooks/planning_and_dynamics.py``.  The dynamics part
takes about half a minute.
"""

import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from deltawall import DEFAULT_CONFIG, make_cx, plan_connection, plan_permutation
from deltawall.tdse import Grid, Protocol, evolve, fidelity_trace, gap_table, ground_state

HERE = os.path.dirname(os.path.abspath(__file__))
GS = DEFAULT_CONFIG.g_star

# %% Plans between the six lowest levels
#
# Going up uses C_X cycles placed inside the crossing window of each level;
# going down runs the same cycles backwards.

for a, b in [(1, 4), (4, 1), (2, 5), (3, 3)]:
    plan = plan_connection(a, b)
    print(f"{a} -> {b}:", [str(c) for c in plan], "composite", plan_permutation(plan, 6))

# %% Ground state carried to the first excited state
#
# The grid wall has a finite cap, so the ideal crossings become small gaps.
# The protocol sweeps them fast and the rest slowly.

grid = Grid(512)
fig, ax = plt.subplots(figsize=(6, 4))
for T in (100.0, 200.0, 400.0):
    p = Protocol(make_cx(0.41, 0.59), T, 50 * GS)
    traj = evolve(p, ground_state(grid), 0.005, grid)
    fid = fidelity_trace(traj, p, 3)
    ax.plot(traj.record_times / T, fid[:, 1], label=f"T = {T:g}")
    print(f"T = {T:g}: final overlap with level 2 = {fid[-1, 1]:.5f}, norm drift {traj.max_norm_drift:.1e}")
ax.set_xlabel("t / T")
ax.set_ylabel("|<2(t)|psi(t)>|^2")
ax.legend()
fig.savefig(os.path.join(HERE, "fidelity_cx.png"), dpi=120)

# %% The gap that the fast window must beat

for row in gap_table(0.5, [c * GS for c in (10, 20, 50, 100)], grid):
    print(f"g = {row['g'] / GS:5.0f} g*: gap = {row['gap']:.4f}")
