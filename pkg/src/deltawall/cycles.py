"""Adiabatic cycles of the delta wall and the level permutations they induce.

Two elementary closed cycles are built here:

* ``make_cx(x0, x1)``: insert the wall at x0 (g: 0 -> +inf), move the
  impermeable wall from x0 to x1, remove it at x1 (g: +inf -> 0).
* ``make_cy(x0)``: insert the wall at x0, flip it (g: +inf -> -inf in zero
  time), then raise g from -inf back to 0.

``holonomy_permutation`` predicts the induced permutation from closed-form
level ordering alone.  ``trace`` samples the eigenvalues along the path,
follows every initial level through it and extracts the permutation, which
must agree with the prediction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, ExceptionalConfigurationError
from .model import DEFAULT_CONFIG, INF, SideLabel, WallState, WellConfig
from .permutation import Permutation, compose_all, inverse
from .spectrum import TIE_RTOL, exceptional_levels, separated_wavenumbers, solve_spectrum

INSERT = "insert"
MOVE = "move"
REMOVE = "remove"
FLIP = "flip"


@dataclass(frozen=True)
class Stage:
    """One leg of a cycle.

    Insert and remove legs run g between 0 and +-inf at fixed X with
    g(s) = +-g* tan(pi s / 2) (mirrored for removal), so s is linear in
    arctan(g).  Move legs keep g = +inf and run X linearly.  Flip legs are
    instantaneous and only change the sign of the infinite strength.
    """

    kind: str
    x_start: float
    x_end: float
    g_start: float
    g_end: float

    def point(self, s: float, cfg: WellConfig = DEFAULT_CONFIG) -> tuple[float, float]:
        """(g, X) at path parameter s in [0, 1]."""
        if not 0.0 <= s <= 1.0:
            raise DomainError(f"stage parameter s={s!r} outside [0, 1]")
        if self.kind == INSERT:
            sign = math.copysign(1.0, self.g_end)
            g = sign * INF if s == 1.0 else sign * cfg.g_star * math.tan(0.5 * math.pi * s)
            return g, self.x_start
        if self.kind == REMOVE:
            sign = math.copysign(1.0, self.g_start)
            g = sign * INF if s == 0.0 else sign * cfg.g_star * math.tan(0.5 * math.pi * (1.0 - s))
            return (0.0 if s == 1.0 else g), self.x_start
        if self.kind == MOVE:
            return INF, self.x_start + s * (self.x_end - self.x_start)
        return (self.g_start if s < 1.0 else self.g_end), self.x_start

    def reversed(self) -> "Stage":
        kind = {INSERT: REMOVE, REMOVE: INSERT}.get(self.kind, self.kind)
        return Stage(kind, self.x_end, self.x_start, self.g_end, self.g_start)

    def describe(self) -> dict:
        return {
            "kind": self.kind,
            "x_start": self.x_start,
            "x_end": self.x_end,
            "g_start": self.g_start,
            "g_end": self.g_end,
        }


@dataclass(frozen=True)
class CyclePath:
    """Closed path in (g, X): a tagged sequence of stages.

    ``tag`` is "cx", "cy", "inverse" or "composite"; ``parts`` holds the base
    cycle of an inverse or the members of a composite.
    """

    stages: tuple[Stage, ...]
    tag: str
    params: dict = field(default_factory=dict)
    parts: tuple["CyclePath", ...] = ()

    def __post_init__(self):
        if not self.stages:
            raise DomainError("a cycle needs at least one stage")
        if self.stages[0].g_start != 0.0 or self.stages[-1].g_end != 0.0:
            raise DomainError("a cycle must start and end at g = 0")
        for a, b in zip(self.stages, self.stages[1:]):
            # without a wall (g = 0) the position is free to jump
            if a.g_end != b.g_start or (a.x_end != b.x_start and a.g_end != 0.0):
                raise DomainError("consecutive stages do not join")

    @property
    def positions(self) -> list[float]:
        """Wall positions at which g passes through finite values."""
        out = []
        for st in self.stages:
            if st.kind in (INSERT, REMOVE, FLIP) and st.x_start not in out:
                out.append(st.x_start)
        return out

    def describe(self) -> dict:
        out = {"tag": self.tag, **self.params, "stages": [st.describe() for st in self.stages]}
        if self.parts:
            out["parts"] = [p.describe() for p in self.parts]
        return out

    def __str__(self):
        if self.tag == "cx":
            return f"C_X({self.params['x0']!r}, {self.params['x1']!r})"
        if self.tag == "cy":
            return f"C_Y({self.params['x0']!r})"
        if self.tag == "inverse":
            return f"inverse {self.parts[0]}"
        return " then ".join(str(p) for p in self.parts)


def _check_position(x: float, cfg: WellConfig, name: str = "position") -> None:
    if not (math.isfinite(x) and 0.0 < x < cfg.length):
        raise DomainError(f"{name}={x!r} must lie strictly inside (0, {cfg.length!r})")


def make_cx(x0: float, x1: float, cfg: WellConfig = DEFAULT_CONFIG) -> CyclePath:
    _check_position(x0, cfg, "x0")
    _check_position(x1, cfg, "x1")
    if x0 == x1:
        raise DomainError("x0 and x1 must differ; the move stage would be empty")
    stages = (
        Stage(INSERT, x0, x0, 0.0, INF),
        Stage(MOVE, x0, x1, INF, INF),
        Stage(REMOVE, x1, x1, INF, 0.0),
    )
    return CyclePath(stages, "cx", {"x0": x0, "x1": x1})


def make_cy(x0: float, cfg: WellConfig = DEFAULT_CONFIG) -> CyclePath:
    _check_position(x0, cfg, "x0")
    stages = (
        Stage(INSERT, x0, x0, 0.0, INF),
        Stage(FLIP, x0, x0, INF, -INF),
        Stage(REMOVE, x0, x0, -INF, 0.0),
    )
    return CyclePath(stages, "cy", {"x0": x0})


def inverse_cycle(cycle: CyclePath) -> CyclePath:
    if cycle.tag == "inverse":
        return cycle.parts[0]
    stages = tuple(st.reversed() for st in reversed(cycle.stages))
    return CyclePath(stages, "inverse", {}, (cycle,))


def concatenate(*cycles: CyclePath) -> CyclePath:
    """Run the given cycles one after another."""
    if not cycles:
        raise DomainError("nothing to concatenate")
    stages = tuple(st for c in cycles for st in c.stages)
    return CyclePath(stages, "composite", {}, tuple(cycles))


# -- degeneracies of the separated boxes -------------------------------------


def crossing_position(m_left: int, m_right: int, cfg: WellConfig = DEFAULT_CONFIG) -> float:
    """Wall position where left level m_left and right level m_right are degenerate."""
    if m_left < 1 or m_right < 1:
        raise DomainError("quantum numbers must be >= 1")
    return m_left * cfg.length / (m_left + m_right)


def _xc(m_left: int, m_right: int, L: float) -> float:
    # degeneracy point with the conventions X_{0,m} = 0 and X_{m,0} = L
    if m_left == 0:
        return 0.0
    if m_right == 0:
        return L
    return m_left * L / (m_left + m_right)


def crossing_window(m_left: int, m_right: int, cfg: WellConfig = DEFAULT_CONFIG):
    """Open intervals for x0 and x1 such that C_X(x0, x1) passes the
    (m_left, m_right) degeneracy and no other degeneracy involving either label.
    """
    if m_left < 1 or m_right < 1:
        raise DomainError("quantum numbers must be >= 1")
    L = cfg.length
    xc = _xc(m_left, m_right, L)
    lo = max(_xc(m_left - 1, m_right, L), _xc(m_left, m_right + 1, L))
    hi = min(_xc(m_left + 1, m_right, L), _xc(m_left, m_right - 1, L))
    return (lo, xc), (xc, hi)


def swap_labels(n: int) -> tuple[int, int]:
    """(m_left, m_right) of the degeneracy used to exchange levels n and n+1."""
    if n < 1:
        raise DomainError("level index must be >= 1")
    m_right = (n + 1) // 2
    return n + 1 - m_right, m_right


def cx_window_for_level(n: int, cfg: WellConfig = DEFAULT_CONFIG):
    """x0 and x1 intervals for a C_X cycle exchanging levels n and n+1."""
    if n < 1:
        raise DomainError("level index must be >= 1")
    L = cfg.length
    if n % 2:
        return ((n + 1) * L / (2 * (n + 2)), L / 2), (L / 2, (n + 3) * L / (2 * (n + 2)))
    mid = (n + 2) * L / (2 * (n + 1))
    return (L / 2, mid), (mid, (n + 4) * L / (2 * (n + 2)))


# -- prediction ----------------------------------------------------------------


def label_energy(label: SideLabel, x: float, cfg: WellConfig = DEFAULT_CONFIG) -> float:
    width = x if label.side == "L" else cfg.length - x
    return cfg.energy_from_k(label.m * math.pi / width)


def label_rank(label: SideLabel, x: float, cfg: WellConfig = DEFAULT_CONFIG) -> int:
    """1-based position of ``label`` in the separated spectrum at X, counted in closed form."""
    L, m = cfg.length, label.m
    if label.side == "L":
        # right labels strictly below: m' X < m (L - X)
        bound = m * (L - x) / x
        below = math.ceil(bound * (1 - TIE_RTOL)) - 1
    else:
        # left labels at or below (ties sort Left first): m' (L - X) <= m X
        bound = m * x / (L - x)
        below = math.floor(bound * (1 + TIE_RTOL))
    return m + max(below, 0)


def check_positions(cycle: CyclePath, n_max: int, cfg: WellConfig = DEFAULT_CONFIG) -> None:
    """Reject cycles whose finite-g legs sit on a node of a tracked level.

    One level beyond the window is checked too, since a node of level n_max + 1
    makes the window's top ambiguous.
    """
    for x in cycle.positions:
        exc = exceptional_levels(x, n_max + 1, cfg)
        if exc:
            raise ExceptionalConfigurationError(min(exc), x)


def holonomy_permutation(cycle: CyclePath, n_max: int, cfg: WellConfig = DEFAULT_CONFIG) -> Permutation:
    """Permutation of levels 1..n_max predicted without tracing."""
    if n_max < 1:
        raise DomainError("n_max must be >= 1")
    check_positions(cycle, n_max, cfg)
    if cycle.tag == "cx":
        x0, x1 = cycle.params["x0"], cycle.params["x1"]
        images = []
        for _, label in separated_wavenumbers(x0, n_max, cfg):
            r = label_rank(label, x1, cfg)
            images.append(r if r <= n_max else None)
        return Permutation(images)
    if cycle.tag == "cy":
        return Permutation([n + 1 if n < n_max else None for n in range(1, n_max + 1)])
    if cycle.tag == "inverse":
        return inverse(holonomy_permutation(cycle.parts[0], n_max, cfg))
    if cycle.tag == "composite":
        return compose_all([holonomy_permutation(p, n_max, cfg) for p in cycle.parts])
    raise DomainError(f"no prediction rule for cycle tag {cycle.tag!r}")


# -- tracing -------------------------------------------------------------------


@dataclass(frozen=True)
class FlowPoint:
    stage: int
    kind: str
    s: float
    g: float
    x: float
    energies: tuple[float, ...]  # by global index 1..n_max


@dataclass(frozen=True)
class FlowEvent:
    """Something that happened along the path.

    ``kind`` is "crossing" (two separated levels degenerate at ``x``), "flip",
    "exit"/"enter" (a tracked state leaves/re-enters the n_max window) or
    "diverge" (the bound state is pushed to -inf energy).
    """

    kind: str
    stage: int
    x: float
    g: float
    labels: tuple[str, ...] = ()
    levels: tuple[int, ...] = ()
    detail: float = 0.0


@dataclass
class SpectralFlow:
    cycle: CyclePath
    n_max: int
    steps: int
    cfg: WellConfig
    points: list[FlowPoint]
    tracks: np.ndarray  # (n_points, n_max): energy of the state that started in level n
    events: list[FlowEvent]
    permutation: Permutation

    @property
    def partial(self) -> bool:
        return self.permutation.is_partial

    def stage_indices(self, stage: int) -> np.ndarray:
        return np.array([i for i, p in enumerate(self.points) if p.stage == stage], dtype=int)

    def energies(self) -> np.ndarray:
        return np.array([p.energies for p in self.points])

    def crossings(self) -> list[FlowEvent]:
        return [e for e in self.events if e.kind == "crossing"]


# identities of a tracked state
_INDEX, _LABEL, _BOUND, _LOST = "index", "label", "bound", "lost"


def _labels_to_rank(x, count, cfg):
    return [lab for _, lab in separated_wavenumbers(x, count, cfg)]


def _spectrum_energies(g, x, n_max, cfg):
    if g == INF:
        return tuple(cfg.energy_from_k(k) for k, _ in separated_wavenumbers(x, n_max, cfg))
    if g == -INF:
        rest = tuple(cfg.energy_from_k(k) for k, _ in separated_wavenumbers(x, n_max - 1, cfg)) if n_max > 1 else ()
        return (-INF,) + rest
    return tuple(float(e) for e in solve_spectrum(WallState(g, x), n_max, cfg).energies)


def _to_limit_identity(ident, g, x, cfg):
    """Convert an index identity into its label at g = +-inf."""
    kind, val = ident
    if kind != _INDEX:
        return ident
    if g == INF:
        return (_LABEL, _labels_to_rank(x, val, cfg)[val - 1])
    if val == 1:
        return (_BOUND, None)
    return (_LABEL, _labels_to_rank(x, val - 1, cfg)[val - 2])


def _to_index_identity(ident, limit, x, cfg):
    """Convert a label held at g = ``limit`` (+-inf) back into a global index."""
    kind, val = ident
    if kind == _LABEL:
        r = label_rank(val, x, cfg)
        return (_INDEX, r if limit == INF else r + 1)
    if kind == _BOUND:
        return (_INDEX, 1)
    return ident


def _move_crossings(tracked, x_from, x_to, n_max, cfg):
    """Degeneracies met while the impermeable wall moves from x_from to x_to.

    Considers every label whose energy stays below the cap E_cap (the highest
    energy a tracked or in-window label reaches on the path) somewhere on the
    path; any crossing involving a window label lies below the cap.  Crossing
    positions are exact, X = m_L L / (m_L + m_R).  Returns (x, left, right)
    tuples in path order.
    """
    L = cfg.length
    window = set(tracked)
    for x in (x_from, x_to):
        window.update(_labels_to_rank(x, n_max, cfg))
    e_cap = max(max(label_energy(lab, x_from, cfg), label_energy(lab, x_to, cfg)) for lab in window)
    k_cap = cfg.k_from_energy(e_cap)
    x_lo, x_hi = min(x_from, x_to), max(x_from, x_to)
    lefts = range(1, int(k_cap * x_hi / math.pi * (1 + TIE_RTOL)) + 1)
    rights = range(1, int(k_cap * (L - x_lo) / math.pi * (1 + TIE_RTOL)) + 1)

    found = []
    for ml in lefts:
        for mr in rights:
            a, b = SideLabel("L", ml), SideLabel("R", mr)
            xc = crossing_position(ml, mr, cfg)
            if label_energy(a, xc, cfg) > e_cap * (1 + TIE_RTOL):
                continue
            at_end = abs(xc - x_from) <= TIE_RTOL * L or abs(xc - x_to) <= TIE_RTOL * L
            # a tie at an endpoint only matters if it sits inside the window there
            if at_end and min(label_rank(a, xc, cfg), label_rank(b, xc, cfg)) <= n_max + 1:
                raise DomainError(f"move endpoint sits on the {a}/{b} degeneracy at X={xc!r}")
            if x_lo < xc < x_hi and not at_end:
                found.append((xc, a, b))
    direction = 1.0 if x_to > x_from else -1.0
    found.sort(key=lambda t: (direction * t[0], label_energy(t[1], t[0], cfg)))
    return found


def move_crossings(x_from: float, x_to: float, n_max: int, cfg: WellConfig = DEFAULT_CONFIG):
    """Exact crossings (x, left, right) met by the lowest ``n_max`` levels as the
    impermeable wall moves from x_from to x_to, in path order."""
    tracked = _labels_to_rank(x_from, n_max, cfg)
    found = _move_crossings(tracked, x_from, x_to, n_max, cfg)
    keep = set(tracked)
    return [c for c in found if c[1] in keep or c[2] in keep]


def trace(cycle: CyclePath, n_max: int, steps: int = 64, cfg: WellConfig = DEFAULT_CONFIG) -> SpectralFlow:
    """Sample the eigenvalues along ``cycle`` and follow each initial level.

    Finite-g legs are followed by global index (levels never cross there);
    at g = +-inf states carry their side label, which the impermeable wall
    conserves, and a flip leaves the state itself unchanged.  The extracted
    permutation is checked against ``holonomy_permutation``.
    """
    if n_max < 1:
        raise DomainError("n_max must be >= 1")
    if steps < 16:
        raise DomainError("need at least 16 steps per stage")
    check_positions(cycle, n_max, cfg)

    idents = [(_INDEX, n) for n in range(1, n_max + 1)]
    in_window = [True] * n_max
    points: list[FlowPoint] = []
    tracks: list[list[float]] = []
    events: list[FlowEvent] = []
    grid = np.linspace(0.0, 1.0, steps + 1)
    last_limit = [INF]

    def record(stage_id, st, s, g, x):
        energies = _spectrum_energies(g, x, n_max, cfg)
        row = []
        for n, ident in enumerate(idents):
            if math.isinf(g):
                last_limit[0] = g
                ident = idents[n] = _to_limit_identity(ident, g, x, cfg)
                kind, val = ident
                if kind == _LABEL:
                    r = label_rank(val, x, cfg) + (0 if g == INF else 1)
                    energy = label_energy(val, x, cfg)
                elif kind == _BOUND:
                    r, energy = 1, -INF
                else:
                    r, energy = n_max + 1, math.nan
            else:
                ident = idents[n] = _to_index_identity(ident, last_limit[0], x, cfg)
                kind, r = ident
                energy = energies[r - 1] if kind == _INDEX and r <= n_max else math.nan
                if kind == _LOST:
                    r = n_max + 1
            inside = r <= n_max
            if inside != in_window[n] and idents[n][0] != _LOST:
                events.append(FlowEvent("enter" if inside else "exit", stage_id, x, g, levels=(n + 1,)))
            in_window[n] = inside
            row.append(energy if inside else math.nan)
        points.append(FlowPoint(stage_id, st.kind, float(s), g, x, energies))
        tracks.append(row)

    for stage_id, st in enumerate(cycle.stages):
        if st.kind == FLIP:
            events.extend(_flip(stage_id, st, idents, n_max, steps, cfg))
            continue
        if st.kind == MOVE:
            tracked = [ident[1] for ident in (_to_limit_identity(i, INF, st.x_start, cfg) for i in idents) if ident[0] == _LABEL]
            found = _move_crossings(tracked, st.x_start, st.x_end, n_max, cfg)
            tracked_set = set(tracked)
            for xc, a, b in found:
                if a in tracked_set or b in tracked_set:
                    events.append(FlowEvent("crossing", stage_id, xc, INF, (str(a), str(b))))
        for s in grid:
            g, x = st.point(float(s), cfg)
            record(stage_id, st, s, g, x)

    images = []
    for kind, val in idents:
        images.append(val if kind == _INDEX and val <= n_max else None)
    perm = Permutation(images)
    predicted = holonomy_permutation(cycle, n_max, cfg)
    if perm != predicted:
        raise RuntimeError(f"traced permutation {perm} disagrees with prediction {predicted}")
    return SpectralFlow(cycle, n_max, steps, cfg, points, np.array(tracks, dtype=float), events, perm)


def _flip(stage_id, st, idents, n_max, steps, cfg):
    """Apply a flip in place; returns the events it produced.

    The state is unchanged by the flip, so labels carry over.  As a numerical
    check, each state is matched by energy across +-G and must land where the
    labels say.  G is chosen so the coupling dwarfs every wavenumber in the
    window, making the residual O(k/c) negligible against level spacings.
    """
    x = st.x_start
    k_top = separated_wavenumbers(x, n_max + 1, cfg)[-1][0]
    big = max(cfg.g_star * math.tan(0.5 * math.pi * (1.0 - 1.0 / steps)), 1e4 * cfg.hbar**2 * k_top / cfg.mass)
    sign = 1.0 if st.g_start == INF else -1.0
    before = solve_spectrum(WallState(sign * big, x), n_max + 1, cfg).energies
    after = solve_spectrum(WallState(-sign * big, x), n_max + 2, cfg).energies
    events = []
    for n, ident in enumerate(idents):
        ident = idents[n] = _to_limit_identity(ident, st.g_start, x, cfg)
        kind, val = ident
        if kind == _BOUND:
            idents[n] = (_LOST, None)
            events.append(FlowEvent("diverge", stage_id, x, st.g_end, levels=(n + 1,)))
            continue
        if kind != _LABEL:
            continue
        r_before = label_rank(val, x, cfg) + (0 if sign > 0 else 1)
        r_after = label_rank(val, x, cfg) + (1 if sign > 0 else 0)
        if r_before <= n_max:
            e = before[r_before - 1]
            nearest = int(np.argmin(np.abs(after - e))) + 1
            if nearest != r_after:
                raise RuntimeError(f"flip matching sends level {r_before} to {nearest}, labels say {r_after}")
            events.append(
                FlowEvent("flip", stage_id, x, st.g_end, (str(val),), (r_before, r_after), float(abs(after[r_after - 1] - e)))
            )
    return events


def flip_mismatch(x0: float, n: int, strengths, cfg: WellConfig = DEFAULT_CONFIG) -> np.ndarray:
    """|E_n(+G, x0) - E_{n+1}(-G, x0)| for each G in ``strengths``; tends to 0 as G grows."""
    out = []
    for big in strengths:
        up = solve_spectrum(WallState(big, x0), n, cfg)[n].energy
        down = solve_spectrum(WallState(-big, x0), n + 1, cfg)[n + 1].energy
        out.append(abs(up - down))
    return np.array(out)


# -- planning ------------------------------------------------------------------


def window_midpoints(n: int, cfg: WellConfig = DEFAULT_CONFIG) -> tuple[float, float]:
    (a0, b0), (a1, b1) = cx_window_for_level(n, cfg)
    return 0.5 * (a0 + b0), 0.5 * (a1 + b1)


def plan_connection(source: int, target: int, cfg: WellConfig = DEFAULT_CONFIG) -> list[CyclePath]:
    """C_X cycles (or their inverses) carrying level ``source`` to ``target``.

    Each step exchanges neighbours (k, k+1) with a C_X cycle placed at the
    midpoints of the level-k window; going down uses the inverse cycle.
    """
    if source < 1 or target < 1:
        raise DomainError("level indices must be >= 1")
    plan = []
    if target > source:
        for k in range(source, target):
            plan.append(make_cx(*window_midpoints(k, cfg), cfg))
    else:
        for k in range(source - 1, target - 1, -1):
            plan.append(inverse_cycle(make_cx(*window_midpoints(k, cfg), cfg)))

    level = source
    for cyc in plan:
        step_max = level + 1
        level = holonomy_permutation(cyc, step_max, cfg)(level)
    if level != target:
        raise RuntimeError(f"plan carries {source} to {level}, not {target}")
    return plan


def plan_permutation(plan: list[CyclePath], n_max: int, cfg: WellConfig = DEFAULT_CONFIG) -> Permutation:
    """Composite permutation of a plan on levels 1..n_max."""
    return compose_all([holonomy_permutation(c, n_max, cfg) for c in plan], n_max)
