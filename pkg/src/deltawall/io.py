"""Tabular JSON/CSV emission shared by the command line tools.

Every result is a ``Table``: named columns, rows of numbers or short strings,
plus run parameters and a summary.  JSON carries everything; CSV carries the
header and rows only, with the same text for every numeric cell.  Floats are
written with ``repr`` (shortest round-trip form) and infinities as the strings
"inf" and "-inf".
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .model import DEFAULT_CONFIG, WellConfig

SCHEMA_VERSION = 1


@dataclass
class Table:
    kind: str
    columns: list[str]
    rows: list[list]
    params: dict = field(default_factory=dict)
    summary: dict = field(default_factory=dict)


def encode(value):
    """JSON-safe, deterministic form of a scalar or container."""
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return value
    if isinstance(value, dict):
        return {str(k): encode(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, np.ndarray)):
        return [encode(v) for v in value]
    if value is None:
        return None
    return str(value)


def cell_text(value) -> str:
    value = encode(value)
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    return repr(value) if isinstance(value, float) else str(value)


def to_json(table: Table) -> str:
    doc = {
        "schema_version": SCHEMA_VERSION,
        "kind": table.kind,
        "params": table.params,
        "summary": table.summary,
        "columns": table.columns,
        "rows": table.rows,
    }
    return json.dumps(encode(doc), sort_keys=True, indent=1, allow_nan=False) + "\n"


def to_csv(table: Table) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(table.columns)
    for row in table.rows:
        writer.writerow([cell_text(v) for v in row])
    return buf.getvalue()


def render(table: Table, fmt: str) -> str:
    if fmt == "json":
        return to_json(table)
    if fmt == "csv":
        return to_csv(table)
    raise ValueError(f"unknown format {fmt!r}")


def parse_cell(text: str):
    """Inverse of ``cell_text`` for numeric cells; other text is returned as is."""
    if text == "":
        return None
    if text in ("true", "false"):
        return text == "true"
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


def read_csv(text: str) -> tuple[list[str], list[list]]:
    rows = list(csv.reader(io.StringIO(text)))
    return rows[0], [[parse_cell(c) for c in r] for r in rows[1:]]


def read_json(text: str) -> dict:
    doc = json.loads(text)
    doc["rows"] = [[decode(v) for v in row] for row in doc["rows"]]
    return doc


def decode(value):
    if value == "inf":
        return math.inf
    if value == "-inf":
        return -math.inf
    if value == "nan":
        return math.nan
    return value


# -- builders ------------------------------------------------------------------


def _well_params(cfg: WellConfig) -> dict:
    return {"L": cfg.length, "hbar": cfg.hbar, "mass": cfg.mass, "E_star": cfg.e_star, "g_star": cfg.g_star}


def spectrum_table(spec, cfg: WellConfig = DEFAULT_CONFIG) -> Table:
    rows = []
    for lv in spec.levels:
        rows.append([
            lv.n, lv.energy, lv.energy / cfg.e_star, lv.branch, lv.rate,
            str(lv.side) if lv.side is not None else "", lv.exceptional,
        ])
    params = {
        **_well_params(cfg),
        "g": spec.wall.g, "g_scaled": spec.wall.g / cfg.g_star,
        "x": spec.wall.x, "x_scaled": spec.wall.x / cfg.length, "n_max": len(spec),
    }
    summary = {"exceptional": sorted(spec.exceptional)}
    return Table("spectrum", ["n", "E", "E_scaled", "branch", "rate", "side", "exceptional"], rows, params, summary)


def flow_table(flow) -> Table:
    cfg = flow.cfg
    n = flow.n_max
    columns = ["stage", "kind", "s", "g", "g_scaled", "x", "x_scaled"]
    columns += [f"E{i}" for i in range(1, n + 1)] + [f"E{i}_scaled" for i in range(1, n + 1)]
    rows = []
    for p in flow.points:
        e = list(p.energies)
        rows.append([p.stage, p.kind, p.s, p.g, p.g / cfg.g_star, p.x, p.x / cfg.length] + e + [v / cfg.e_star for v in e])
    events = [
        {"kind": ev.kind, "stage": ev.stage, "x": ev.x, "g": ev.g, "labels": list(ev.labels), "levels": list(ev.levels), "detail": ev.detail}
        for ev in flow.events
    ]
    summary = {
        "permutation": str(flow.permutation),
        "images": list(flow.permutation.images),
        "partial": flow.partial,
        "events": events,
    }
    params = {**_well_params(cfg), "cycle": flow.cycle.describe(), "n_max": n, "steps": flow.steps}
    return Table("trace", columns, rows, params, summary)


def plan_table(source: int, target: int, plan, perm, cfg: WellConfig = DEFAULT_CONFIG) -> Table:
    rows = []
    level = source
    for i, cyc in enumerate(plan, start=1):
        base = cyc.parts[0] if cyc.tag == "inverse" else cyc
        after = level + 1 if cyc.tag == "cx" else level - 1
        rows.append([i, str(cyc), base.params["x0"], base.params["x1"], cyc.tag == "inverse", level, after])
        level = after
    summary = {
        "cycles": len(plan),
        "permutation": str(perm),
        "images": list(perm.images),
        "maps_source_to_target": perm(source) == target if perm.size >= source else None,
    }
    params = {**_well_params(cfg), "from": source, "to": target, "n_max": perm.size}
    return Table("plan", ["step", "cycle", "x0", "x1", "inverse", "level_before", "level_after"], rows, params, summary)


def evolution_table(traj, fidelities, protocol, target: int, params: dict) -> Table:
    cfg = protocol.cfg
    n = fidelities.shape[1]
    columns = ["t", "g", "g_scaled", "x", "x_scaled"] + [f"F{i}" for i in range(1, n + 1)]
    rows = []
    for t, f in zip(traj.record_times, fidelities):
        g, x = protocol(min(float(t), protocol.duration))
        rows.append([float(t), g, g / cfg.g_star, x, x / cfg.length] + [float(v) for v in f])
    summary = {
        "target_level": target,
        "final_target_fidelity": float(fidelities[-1, target - 1]) if 1 <= target <= n else None,
        "final_fidelities": [float(v) for v in fidelities[-1]],
        "max_norm_drift": traj.max_norm_drift,
        "steps": len(traj.times) - 1,
        "flips": [t for t, _ in traj.flips],
    }
    return Table("evolve", columns, rows, {**_well_params(cfg), **params}, summary)


def gaps_table(rows_in: list[dict], x: float, J: int, cfg: WellConfig = DEFAULT_CONFIG) -> Table:
    rows = [[r["g"], r["g"] / cfg.g_star, r["E1"], r["E2"], r["gap"], r["gap"] / cfg.e_star] for r in rows_in]
    gaps = [r["gap"] for r in rows_in]
    summary = {"monotone_decreasing": all(a > b for a, b in zip(gaps, gaps[1:]))}
    params = {**_well_params(cfg), "x": x, "x_scaled": x / cfg.length, "J": J}
    return Table("gaps", ["g", "g_scaled", "E1", "E2", "gap", "gap_scaled"], rows, params, summary)
