"""
Command-line front end.

Subcommands: spectrum, scar, overlap-sweep, width-sweep, weyl, husimi,
orbits.  Exit codes: 0 success, 1 configuration / usage error, 2 numerical
failure.  All outputs land under --out (default: current directory) and are
written via temp-file + rename.
"""

import argparse
import json
import os
import sys

import numpy as np

from . import __version__
from .classical import DEFAULT_CAT_MAP, find_orbit, periodic_points
from .phasespace import husimi as husimi_grid
from .phasespace import write_grid
from .quantize import OpeningSpec, StateVector, build_closed_map, open_map
from .scar import ScarParams, scar_function
from .spectral import decompose
from . import experiments as ex

__all__ = ["main", "build_parser"]


def build_parser():
    parser = argparse.ArgumentParser(
        prog="opencat",
        description="Resonances and scarring in an opened quantized cat map.",
    )
    parser.add_argument("--version", action="version", version=f"opencat {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--jobs", type=int, default=os.cpu_count() or 1,
                       help="worker-thread cap for sweeps")

    p = sub.add_parser("spectrum", help="print the eigenvalue / decay-rate table")
    p.add_argument("--n", type=int, required=True, help="Hilbert-space dimension N")
    p.add_argument("--open", dest="opening", default=None,
                   help="opening as variant,q0,dq (omit for the closed map)")
    add_common(p)

    p = sub.add_parser("scar", help="build a scar function and its Husimi grid")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--orbit", required=True, help="orbit seed point as q,p")
    p.add_argument("--t", type=int, default=None, help="truncation time override")
    add_common(p)

    p = sub.add_parser("overlap-sweep", help="max scar overlap vs N")
    p.add_argument("--config", required=True)
    add_common(p)

    p = sub.add_parser("width-sweep", help="mean scar overlap vs opening width")
    p.add_argument("--config", required=True)
    add_common(p)

    p = sub.add_parser("weyl", help="fractal Weyl-law sweep and power-law fit")
    p.add_argument("--config", required=True)
    add_common(p)

    p = sub.add_parser("husimi", help="re-grid a stored state vector")
    p.add_argument("--state", required=True, help="state file written by `scar`")
    p.add_argument("--resolution", type=int, default=128)
    add_common(p)

    p = sub.add_parser("orbits", help="list periodic orbits with actions")
    p.add_argument("--period", type=int, required=True)
    add_common(p)

    return parser


def _parse_opening(text):
    parts = [s.strip() for s in text.split(",")]
    if len(parts) != 3:
        raise ValueError("opening must be variant,q0,dq")
    return OpeningSpec(parts[0], float(parts[1]), float(parts[2]))


def _parse_point(text):
    parts = [s.strip() for s in text.split(",")]
    if len(parts) != 2:
        raise ValueError("point must be q,p")
    return float(parts[0]), float(parts[1])


def _write_state(path, state):
    tmp = path + ".tmp"
    cols = np.column_stack([state.amplitudes.real, state.amplitudes.imag])
    np.savetxt(tmp, cols, fmt="%.17g", header="re im")
    os.replace(tmp, path)


def _read_state(path):
    data = np.loadtxt(path, ndmin=2)
    if data.shape[1] != 2:
        raise ValueError(f"{path}: expected two columns (re, im)")
    return StateVector(len(data), data[:, 0] + 1j * data[:, 1])


def _cmd_spectrum(args):
    m = build_closed_map(DEFAULT_CAT_MAP, args.n)
    if args.opening:
        m = open_map(m, _parse_opening(args.opening))
    res = decompose(m)
    print(f"# N={args.n} kind={m.kind} ({len(res.eigenvalues)} eigenvalues)")
    print(f"{'nu':>5} {'Re z':>24} {'Im z':>24} {'|z|':>24} {'Gamma':>24}")
    for i, z in enumerate(res.eigenvalues, 1):
        print(
            f"{i:>5} {z.real:>24.17g} {z.imag:>24.17g}"
            f" {abs(z):>24.17g} {res.decay_rates[i - 1]:>24.17g}"
        )
    return 0


def _cmd_scar(args):
    q, p = _parse_point(args.orbit)
    orbit = find_orbit(DEFAULT_CAT_MAP, q, p)
    m = build_closed_map(DEFAULT_CAT_MAP, args.n)
    scar = scar_function(ScarParams(orbit, args.n, args.t), m)
    os.makedirs(args.out, exist_ok=True)
    state_path = os.path.join(args.out, f"scar-N{args.n}.dat")
    _write_state(state_path, scar)
    grid = husimi_grid(scar, label=f"scar-N{args.n}")
    grid_path = os.path.join(args.out, f"scar-N{args.n}-husimi.dat")
    write_grid(grid, grid_path)
    print(f"wrote {state_path}")
    print(f"wrote {grid_path}")
    return 0


def _load_config(args):
    cfg = ex.parse_config(args.config)
    overrides = {"output_dir": args.out, "jobs": args.jobs}
    from dataclasses import replace

    return replace(cfg, **overrides)


def _report_failures(failures):
    for item, msg in failures:
        print(f"warning: skipped {item}: {msg}", file=sys.stderr)


def _cmd_overlap_sweep(args):
    cfg = _load_config(args)
    import time

    t0 = time.monotonic()
    rows, failures = ex.run_overlap_vs_N(cfg)
    _report_failures(failures)
    if not rows:
        print("error: every sweep point failed", file=sys.stderr)
        return 2
    os.makedirs(cfg.output_dir, exist_ok=True)
    csv_path = os.path.join(cfg.output_dir, "overlap_vs_N.csv")
    ex.write_rows_csv(rows, csv_path)
    ex.write_manifest(
        os.path.join(cfg.output_dir, "overlap_vs_N.manifest.json"),
        cfg,
        {"total": time.monotonic() - t0},
        extra={"rows": len(rows), "failures": len(failures)},
    )
    print(f"wrote {csv_path} ({len(rows)} rows)")
    return 0


def _cmd_width_sweep(args):
    cfg = _load_config(args)
    import time

    t0 = time.monotonic()
    rows, failures = ex.run_overlap_vs_width(cfg)
    _report_failures(failures)
    if not rows:
        print("error: every sweep point failed", file=sys.stderr)
        return 2
    os.makedirs(cfg.output_dir, exist_ok=True)
    csv_path = os.path.join(cfg.output_dir, "overlap_vs_width.csv")
    ex.write_rows_csv(rows, csv_path)
    ex.write_manifest(
        os.path.join(cfg.output_dir, "overlap_vs_width.manifest.json"),
        cfg,
        {"total": time.monotonic() - t0},
        extra={"rows": len(rows), "failures": len(failures)},
    )
    print(f"wrote {csv_path} ({len(rows)} rows)")
    return 0


def _cmd_weyl(args):
    cfg = _load_config(args)
    import time

    t0 = time.monotonic()
    fits, tables, failures = ex.run_weyl_vs_N(cfg)
    _report_failures(failures)
    os.makedirs(cfg.output_dir, exist_ok=True)
    payload = []
    for opening, fit in fits.items():
        print(
            f"{opening.variant} q0={opening.q0:g} dq={opening.delta_q:g}:"
            f" a={fit.a:.17g} b={fit.b:.17g} b_theory={fit.b_theory:.17g}"
        )
        payload.append(
            {
                "variant": opening.variant,
                "q0": opening.q0,
                "delta_q": opening.delta_q,
                "a": fit.a,
                "b": fit.b,
                "b_theory": fit.b_theory,
                "samples": [[int(n), f] for n, f in tables[opening]],
            }
        )
    out = os.path.join(cfg.output_dir, "weyl_fits.json")
    tmp = out + ".tmp"
    with open(tmp, "w") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")
    os.replace(tmp, out)
    ex.write_manifest(
        os.path.join(cfg.output_dir, "weyl.manifest.json"),
        cfg,
        {"total": time.monotonic() - t0},
        extra={"failures": len(failures)},
    )
    print(f"wrote {out}")
    return 0


def _cmd_husimi(args):
    state = _read_state(args.state)
    grid = husimi_grid(state, resolution=args.resolution,
                       label=os.path.basename(args.state))
    os.makedirs(args.out, exist_ok=True)
    base = os.path.splitext(os.path.basename(args.state))[0]
    out = os.path.join(args.out, f"{base}-husimi.dat")
    write_grid(grid, out)
    print(f"wrote {out}")
    return 0


def _cmd_orbits(args):
    if args.period < 1:
        raise ValueError("period must be >= 1")
    orbits = periodic_points(DEFAULT_CAT_MAP, args.period)
    print(f"# {len(orbits)} orbits of period dividing {args.period}")
    for orbit in orbits:
        pts = " ".join(f"({float(x.q):.17g},{float(x.p):.17g})" for x in orbit.points)
        print(
            f"period={orbit.period} action={orbit.action_per_period:.17g} points: {pts}"
        )
    return 0


_COMMANDS = {
    "spectrum": _cmd_spectrum,
    "scar": _cmd_scar,
    "overlap-sweep": _cmd_overlap_sweep,
    "width-sweep": _cmd_width_sweep,
    "weyl": _cmd_weyl,
    "husimi": _cmd_husimi,
    "orbits": _cmd_orbits,
}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors; map to the config-error code
        return 0 if exc.code == 0 else 1
    try:
        return _COMMANDS[args.command](args)
    except (ValueError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ArithmeticError, np.linalg.LinAlgError, RuntimeError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
