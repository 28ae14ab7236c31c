"""Command line entry point: ``deltawall {spectrum,trace,plan,evolve,gaps}``.

Positions (--x, --x0, --x1) are given in units of L.  --g is the raw
strength and accepts "inf"/"-inf"; --g-cap and --g-caps are in units of g*.
Data goes to stdout unless -o is given, in which case stdout gets the one-line
summary instead of stderr.

Exit codes: 0 success, 2 invalid input, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import math
import sys

from . import io as tables
from .cycles import (
    concatenate,
    holonomy_permutation,
    inverse_cycle,
    make_cx,
    make_cy,
    plan_connection,
    plan_permutation,
    trace,
)
from .errors import DeltaWallError, NormDriftError
from .model import WallState, WellConfig
from .spectrum import solve_spectrum
from .tdse import Grid, Protocol, evolve, fidelity_trace, gap_table, instantaneous_levels

EXIT_OK, EXIT_INVALID, EXIT_NUMERIC = 0, 2, 3


class InputError(Exception):
    pass


def _strength(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if math.isnan(value):
        raise argparse.ArgumentTypeError("strength is NaN")
    return value


def _positive(kind):
    def parse(text):
        try:
            value = kind(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"not a number: {text!r}")
        if not (value > 0 and math.isfinite(value)):
            raise argparse.ArgumentTypeError(f"must be positive and finite: {text!r}")
        return value

    return parse


def _fraction(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not 0.0 < value < 1.0:
        raise argparse.ArgumentTypeError(f"position must lie in (0, 1) in units of L: {text!r}")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--L", type=_positive(float), default=1.0, help="box length")
    common.add_argument("--hbar", type=_positive(float), default=1.0)
    common.add_argument("--mass", type=_positive(float), default=1.0)
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("-o", "--output", help="write data here instead of stdout")

    parser = argparse.ArgumentParser(prog="deltawall", description="Box with a movable delta wall: spectra, cycles, dynamics.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", parents=[common], help="lowest levels at one (g, X)")
    p.add_argument("--g", type=_strength, required=True, help='raw strength, or "inf"')
    p.add_argument("--x", type=_fraction, required=True)
    p.add_argument("--n-max", type=_positive(int), default=6)

    def cycle_args(p, need_x1=True):
        p.add_argument("--cycle", choices=("cx", "cy"), required=True)
        p.add_argument("--x0", type=_fraction, required=True)
        p.add_argument("--x1", type=_fraction, help="end position of a cx move")
        p.add_argument("--inverse", action="store_true", help="run the cycle backwards")
        p.add_argument("--repeat", type=_positive(int), default=1, help="run the cycle this many times")

    p = sub.add_parser("trace", parents=[common], help="spectral flow along a cycle")
    cycle_args(p)
    p.add_argument("--n-max", type=_positive(int), default=4)
    p.add_argument("--steps", type=_positive(int), default=64)

    p = sub.add_parser("plan", parents=[common], help="cycles carrying one level to another")
    p.add_argument("--from", dest="source", type=_positive(int), required=True)
    p.add_argument("--to", dest="target", type=_positive(int), required=True)
    p.add_argument("--n-max", type=_positive(int))

    p = sub.add_parser("evolve", parents=[common], help="grid dynamics along a capped-strength cycle")
    cycle_args(p)
    p.add_argument("--T", type=_positive(float), required=True, help="total duration")
    p.add_argument("--g-cap", type=_positive(float), default=50.0, help="strength cap in units of g*")
    p.add_argument("--grid", type=_positive(int), default=512, help="interior grid points J")
    p.add_argument("--dt", type=_positive(float), default=0.005)
    p.add_argument("--n-max", type=_positive(int), default=3)
    p.add_argument("--start", type=_positive(int), default=1, help="initial grid level")
    p.add_argument("--records", type=_positive(int), default=101)
    p.add_argument("--cross-width", type=_fraction, default=0.16, help="fast window width in units of L")
    p.add_argument("--cross-duration", type=_positive(float), default=0.1, help="time spent in each fast window")

    p = sub.add_parser("gaps", parents=[common], help="splitting of the two lowest grid levels")
    p.add_argument("--x", type=_fraction, default=0.5)
    p.add_argument("--g-caps", default="10,20,50,100", help="comma separated, units of g*")
    p.add_argument("--grid", type=_positive(int), default=512)
    return parser


def _cycle(args, cfg):
    x0 = args.x0 * cfg.length
    if args.cycle == "cx":
        if args.x1 is None:
            raise InputError("--cycle cx needs --x1")
        cyc = make_cx(x0, args.x1 * cfg.length, cfg)
    else:
        if args.x1 is not None:
            raise InputError("--cycle cy takes no --x1")
        cyc = make_cy(x0, cfg)
    if args.inverse:
        cyc = inverse_cycle(cyc)
    if args.repeat > 1:
        cyc = concatenate(*([cyc] * args.repeat))
    return cyc


def cmd_spectrum(args, cfg):
    spec = solve_spectrum(WallState(args.g, args.x * cfg.length), args.n_max, cfg)
    table = tables.spectrum_table(spec, cfg)
    energies = ", ".join(f"{e:.10g}" for e in spec.energies)
    return table, f"E = [{energies}]"


def cmd_trace(args, cfg):
    cyc = _cycle(args, cfg)
    flow = trace(cyc, args.n_max, args.steps, cfg)
    crossings = ", ".join(f"{'/'.join(ev.labels)}@{ev.x / cfg.length:.12g}" for ev in flow.crossings())
    line = f"{cyc}: permutation {flow.permutation}"
    if crossings:
        line += f"; crossings {crossings}"
    return tables.flow_table(flow), line


def cmd_plan(args, cfg):
    n_max = args.n_max or max(args.source, args.target)
    if n_max < max(args.source, args.target):
        raise InputError("--n-max must cover both levels")
    plan = plan_connection(args.source, args.target, cfg)
    perm = plan_permutation(plan, n_max, cfg)
    if perm(args.source) != args.target:
        raise RuntimeError("composed plan does not reach the target")
    listing = "; ".join(str(c) for c in plan) or "no cycles needed"
    line = f"{args.source} -> {args.target}: {len(plan)} cycle(s): {listing}; composed permutation {perm}"
    return tables.plan_table(args.source, args.target, plan, perm, cfg), line


def cmd_evolve(args, cfg):
    cyc = _cycle(args, cfg)
    n_track = max(args.n_max, args.start + 1)
    target = holonomy_permutation(cyc, n_track, cfg)(args.start)
    grid = Grid(args.grid, cfg.length)
    protocol = Protocol(
        cyc, args.T, args.g_cap * cfg.g_star, cfg,
        cross_width=args.cross_width, cross_duration=args.cross_duration,
    )
    g0, x0 = protocol(0.0)
    _, vecs = instantaneous_levels(WallState(0.0, x0), grid, args.start, cfg)
    traj = evolve(protocol, vecs[:, args.start - 1].astype(complex), args.dt, grid, n_records=args.records)
    n_show = max(args.n_max, target or 1)
    fid = fidelity_trace(traj, protocol, n_show)
    params = {
        "cycle": cyc.describe(), "T": args.T, "g_cap": args.g_cap * cfg.g_star, "g_cap_scaled": args.g_cap,
        "J": args.grid, "dt": args.dt, "start": args.start,
        "cross_width": args.cross_width, "cross_duration": args.cross_duration,
    }
    table = tables.evolution_table(traj, fid, protocol, target or 0, params)
    if target is None:
        line = f"{cyc}: level {args.start} leaves the tracked window; final fidelities {fid[-1].round(6).tolist()}"
    else:
        line = f"{cyc}: final fidelity to level {target} = {fid[-1, target - 1]:.6f} (max norm drift {traj.max_norm_drift:.2e})"
    return table, line


def cmd_gaps(args, cfg):
    try:
        caps = [float(v) for v in args.g_caps.split(",")]
    except ValueError:
        raise InputError(f"bad --g-caps list {args.g_caps!r}")
    if not caps or any(not (c > 0 and math.isfinite(c)) for c in caps):
        raise InputError("--g-caps entries must be positive")
    grid = Grid(args.grid, cfg.length)
    x = args.x * cfg.length
    rows = gap_table(x, [c * cfg.g_star for c in caps], grid, cfg)
    table = tables.gaps_table(rows, x, args.grid, cfg)
    line = "gaps at X/L={}: {}".format(args.x, ", ".join(f"{c:g}g*: {r['gap']:.6g}" for c, r in zip(caps, rows)))
    return table, line


COMMANDS = {
    "spectrum": cmd_spectrum,
    "trace": cmd_trace,
    "plan": cmd_plan,
    "evolve": cmd_evolve,
    "gaps": cmd_gaps,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_INVALID
    try:
        cfg = WellConfig(args.L, args.hbar, args.mass)
        table, line = COMMANDS[args.command](args, cfg)
    except NormDriftError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (InputError, DeltaWallError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (RuntimeError, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC

    text = tables.render(table, args.format)
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        print(line)
    else:
        sys.stdout.write(text)
        print(line, file=sys.stderr)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
