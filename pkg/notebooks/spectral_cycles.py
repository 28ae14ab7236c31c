# coding: utf-8
"""
Level permutations from slow wall cycles
========================================

Run with ``python notebooks/spectral_cycles.py``.  Figures are written next to
this file.  Needs the optional ``notebooks`` extra (matplotlib).
"""

import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from deltawall import DEFAULT_CONFIG, WallState, make_cx, make_cy, solve_spectrum, trace

HERE = os.path.dirname(os.path.abspath(__file__))
ES = DEFAULT_CONFIG.e_star
GS = DEFAULT_CONFIG.g_star

# %% Spectrum against the wall strength at X = 0.41 L
#
# The levels rise with g and never touch: each one stays between its bare
# value and the next separated value.

gs = np.concatenate([-np.geomspace(20, 1e-3, 60), [0.0], np.geomspace(1e-3, 200, 80)]) * GS
table = np.array([solve_spectrum(WallState(g, 0.41), 5).energies for g in gs])
s = np.arctan(gs / GS) / (np.pi / 2)

fig, ax = plt.subplots(figsize=(6, 4))
ax.plot(s, table / ES)
ax.set_xlabel("(2/pi) atan(g / g*)")
ax.set_ylabel("E / E*")
ax.set_ylim(-5, 30)
fig.savefig(os.path.join(HERE, "levels_vs_strength.png"), dpi=120)


# %% Spectral flow along a cycle
#
# Each panel follows the states that start in levels 1..n through insertion
# of an impermeable wall, the move, and removal.

def plot_flow(flow, name):
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(flow.tracks / ES)
    stages = sorted({p.stage for p in flow.points})
    for i in [flow.stage_indices(k)[0] for k in stages[1:]]:
        ax.axvline(i, color="0.8", lw=0.8)
    ax.set_xlabel("path point")
    ax.set_ylabel("E / E*")
    ax.set_title(f"{flow.cycle}: {flow.permutation}")
    fig.savefig(os.path.join(HERE, name), dpi=120)
    return flow


for cyc, n, name in [
    (make_cx(0.41, 0.59), 4, "cx_041_059.png"),
    (make_cx(0.31, 0.36), 4, "cx_031_036.png"),
    (make_cy(0.41), 5, "cy_041.png"),
]:
    flow = plot_flow(trace(cyc, n, 128), name)
    print(cyc, "->", flow.permutation)
    for ev in flow.crossings():
        print("   crossing", "/".join(ev.labels), "at X/L =", round(ev.x, 12))
