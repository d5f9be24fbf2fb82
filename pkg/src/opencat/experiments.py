"""
The three sweep experiments: maximum scar overlap vs N, overlap vs opening
width, and the fractal-Weyl-law fraction vs N, with caching, running
averages and power-law fit reporting.

Each sweep reads a plain "key = value" config (see parse_config) and writes
a CSV plus a JSON run manifest.  All pipelines are deterministic: fixed
solver, fixed ordering, fixed tie-breaks, no randomness anywhere.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, asdict
import csv
import json
import math
import os
import time

import numpy as np

from . import __version__
from .classical import DEFAULT_CAT_MAP, find_orbit, lyapunov_exponent
from .quantize import OpeningSpec, build_projector, open_map
from .scar import ScarParams, overlap_scan, overlap_scan_closed, scar_function
from . import spectral
from .spectral import (
    cache_key,
    decompose,
    eigenvalues_only,
    fit_weyl_law,
    load_resonances,
    save_resonances,
    weyl_fraction,
)

__all__ = [
    "SweepConfig",
    "SweepRow",
    "parse_config",
    "running_average",
    "run_overlap_vs_N",
    "run_overlap_vs_width",
    "run_weyl_vs_N",
    "write_rows_csv",
    "write_manifest",
]

DEFAULT_GAMMA_F = 0.71
DEFAULT_AVERAGE_WINDOW = 10


@dataclass(frozen=True)
class SweepConfig:
    """Shared configuration for the sweep experiments.

    n_start/n_stop are inclusive; openings is a list of OpeningSpec (one for
    the overlap sweeps, possibly several for the Weyl sweep); dq_grid is
    only used by the width sweep, where it overrides each opening's
    delta_q.
    """

    n_start: int
    n_stop: int
    n_step: int = 1
    openings: tuple = ()
    orbit_q: float = 0.5
    orbit_p: float = 0.5
    gamma_f: float = DEFAULT_GAMMA_F
    average_window: int = DEFAULT_AVERAGE_WINDOW
    dq_grid: tuple = ()
    cat = DEFAULT_CAT_MAP
    output_dir: str = "."
    cache_dir: str = None
    jobs: int = 1

    def __post_init__(self):
        if self.n_start > self.n_stop or self.n_step < 1:
            raise ValueError("empty N range")
        if self.average_window < 1:
            raise ValueError("average window must be >= 1")

    @property
    def n_values(self):
        return list(range(self.n_start, self.n_stop + 1, self.n_step))

    def resolved_cache_dir(self):
        if self.cache_dir:
            return self.cache_dir
        env = os.environ.get(spectral.CACHE_DIR_ENV)
        if env:
            return env
        return os.path.join(self.output_dir, "cache")


@dataclass(frozen=True)
class SweepRow:
    """One N-point of the overlap sweep (data behind the overlap figures)."""

    N: int
    x_max_closed: float
    x_max_right: float
    x_max_left: float
    nu_max_right: int
    nu_max_left: int
    weyl_fraction: float
    open_channels: int


_CONFIG_KEYS = {
    "n_start": int,
    "n_stop": int,
    "n_step": int,
    "variant": str,
    "q0": float,
    "delta_q": float,
    "gamma_f": float,
    "average_window": int,
    "orbit_q": float,
    "orbit_p": float,
    "dq_start": float,
    "dq_stop": float,
    "dq_step": float,
    "output_dir": str,
    "cache_dir": str,
    "jobs": int,
}


def parse_config(path):
    """Read a "key = value" config file into a SweepConfig.

    Recognized keys: n_start, n_stop, n_step, variant, q0, delta_q,
    gamma_f, average_window, orbit_q, orbit_p, dq_start, dq_stop, dq_step,
    output_dir, cache_dir, jobs.  Lines starting with '#' are comments.
    """
    raw = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value', got {line!r}")
            key, _, value = line.partition("=")
            key, value = key.strip(), value.strip()
            if key not in _CONFIG_KEYS:
                raise ValueError(f"{path}:{lineno}: unknown config key {key!r}")
            try:
                raw[key] = _CONFIG_KEYS[key](value)
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: bad value for {key!r}: {value!r}") from exc
    return config_from_dict(raw)


def config_from_dict(raw):
    """Build a SweepConfig from a flat dict of recognized keys."""
    openings = ()
    if "variant" in raw:
        openings = (
            OpeningSpec(raw["variant"], raw.get("q0", 0.225), raw.get("delta_q", 0.25)),
        )
    dq_grid = ()
    if "dq_start" in raw:
        step = raw.get("dq_step", 0.05)
        n = int(round((raw["dq_stop"] - raw["dq_start"]) / step)) + 1
        dq_grid = tuple(round(raw["dq_start"] + i * step, 12) for i in range(n))
    return SweepConfig(
        n_start=raw.get("n_start", 100),
        n_stop=raw.get("n_stop", 360),
        n_step=raw.get("n_step", 1),
        openings=openings,
        orbit_q=raw.get("orbit_q", 0.5),
        orbit_p=raw.get("orbit_p", 0.5),
        gamma_f=raw.get("gamma_f", DEFAULT_GAMMA_F),
        average_window=raw.get("average_window", DEFAULT_AVERAGE_WINDOW),
        dq_grid=dq_grid,
        output_dir=raw.get("output_dir", "."),
        cache_dir=raw.get("cache_dir"),
        jobs=raw.get("jobs", 1),
    )


def running_average(series, window):
    """Centered moving average: all samples with |N' - N| <= window / 2.

    Edges simply use the neighbors that exist.  The input must be sorted
    by N.
    """
    if not series:
        raise ValueError("empty series")
    ns = np.array([n for n, _ in series], dtype=float)
    vs = np.array([v for _, v in series], dtype=float)
    half = window / 2.0
    out = []
    for n in ns:
        mask = np.abs(ns - n) <= half
        out.append((int(n), float(vs[mask].mean())))
    return out


def _closed_propagator(cat, N):
    # local import: quantize_cat_map is chosen at package level
    from .quantize import build_closed_map

    return build_closed_map(cat, N)


def _decompose_cached(prop, cache_dir, eigenvalues_required_only=False):
    """Decompose with read-through disk caching."""
    key = cache_key(prop.dim, prop.opening, prop.order or "PM")
    if cache_dir:
        hit = load_resonances(cache_dir, key)
        if hit is not None:
            if eigenvalues_required_only or isinstance(hit, spectral.ResonanceSet):
                return hit
        # either a miss, or only eigenvalues cached but vectors needed
    if eigenvalues_required_only:
        result = eigenvalues_only(prop)
    else:
        result = decompose(prop)
    if cache_dir:
        save_resonances(cache_dir, key, result)
    return result


def _overlap_point(cat, N, opening, orbit, cache_dir):
    m = _closed_propagator(cat, N)
    scar = scar_function(ScarParams(orbit, N), m)
    closed = _decompose_cached(m, cache_dir)
    opened = _decompose_cached(open_map(m, opening), cache_dir)
    r_closed = overlap_scan_closed(scar, closed)
    r_right = overlap_scan(scar, opened, "right")
    r_left = overlap_scan(scar, opened, "left")
    return SweepRow(
        N=N,
        x_max_closed=r_closed.x_max,
        x_max_right=r_right.x_max,
        x_max_left=r_left.x_max,
        nu_max_right=r_right.nu_max,
        nu_max_left=r_left.nu_max,
        weyl_fraction=weyl_fraction(opened, DEFAULT_GAMMA_F),
        open_channels=build_projector(N, opening).open_channels,
    )


def _run_parallel(jobs, worker, items):
    """Run worker over items, preserving order; failures are logged and skipped."""
    results = {}
    failures = []

    def guarded(item):
        try:
            return item, worker(item), None
        except Exception as exc:  # per-point failure must not kill the sweep
            return item, None, exc

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            outs = list(pool.map(guarded, items))
    else:
        outs = [guarded(it) for it in items]
    for item, value, exc in outs:
        if exc is not None:
            failures.append((item, repr(exc)))
        else:
            results[item] = value
    return results, failures


def run_overlap_vs_N(config):
    """Overlap sweep vs N for the first configured opening.

    Returns (rows, failures); rows come back sorted by N regardless of
    completion order.
    """
    if not config.openings:
        raise ValueError("overlap sweep needs an opening")
    opening = config.openings[0]
    orbit = find_orbit(config.cat, config.orbit_q, config.orbit_p)
    cache_dir = config.resolved_cache_dir()

    def worker(n):
        return _overlap_point(config.cat, n, opening, orbit, cache_dir)

    results, failures = _run_parallel(config.jobs, worker, config.n_values)
    rows = [results[n] for n in sorted(results)]
    return rows, failures


@dataclass(frozen=True)
class WidthRow:
    """Mean x_max over the configured N window for one (variant, delta_q)."""

    variant: str
    q0: float
    delta_q: float
    mean_x_max_right: float
    mean_x_max_left: float
    mean_x_max_closed: float


def run_overlap_vs_width(config):
    """Overlap averages over the N window as a function of opening width.

    Every configured opening variant is swept over config.dq_grid; the
    closed-map reference is averaged over the same N window.
    """
    if not config.dq_grid:
        raise ValueError("width sweep needs a dq grid")
    if not config.openings:
        raise ValueError("width sweep needs at least one opening variant")
    orbit = find_orbit(config.cat, config.orbit_q, config.orbit_p)
    cache_dir = config.resolved_cache_dir()
    ns = config.n_values

    tasks = []
    for base in config.openings:
        for dq in config.dq_grid:
            tasks.append((base.variant, base.q0, dq))

    def worker(task):
        variant, q0, dq = task
        rights, lefts, closeds = [], [], []
        for n in ns:
            if dq == 0:
                m = _closed_propagator(config.cat, n)
                scar = scar_function(ScarParams(orbit, n), m)
                closed = _decompose_cached(m, cache_dir)
                x = overlap_scan_closed(scar, closed).x_max
                rights.append(x)
                lefts.append(x)
                closeds.append(x)
                continue
            row = _overlap_point(
                config.cat, n, OpeningSpec(variant, q0, dq), orbit, cache_dir
            )
            rights.append(row.x_max_right)
            lefts.append(row.x_max_left)
            closeds.append(row.x_max_closed)
        return WidthRow(
            variant=variant,
            q0=q0,
            delta_q=dq,
            mean_x_max_right=float(np.mean(rights)),
            mean_x_max_left=float(np.mean(lefts)),
            mean_x_max_closed=float(np.mean(closeds)),
        )

    results, failures = _run_parallel(config.jobs, worker, tasks)
    rows = [results[t] for t in tasks if t in results]
    return rows, failures


def run_weyl_vs_N(config):
    """Fractal-Weyl-law sweep: fraction of long-lived states vs N, per opening.

    Only eigenvalues are needed, so the decompositions are vector-free.
    Returns (fits, fraction_tables, failures): fits maps each opening to a
    WeylFit, fraction_tables to its [(N, fraction), ...] samples.
    """
    if not config.openings:
        raise ValueError("weyl sweep needs at least one opening")
    cache_dir = config.resolved_cache_dir()
    lam = lyapunov_exponent(config.cat)

    def worker(task):
        opening, n = task
        m = _closed_propagator(config.cat, n)
        z = _decompose_cached(
            open_map(m, opening), cache_dir, eigenvalues_required_only=True
        )
        if isinstance(z, spectral.ResonanceSet):
            z = z.eigenvalues
        return weyl_fraction(z, config.gamma_f)

    tasks = [(op, n) for op in config.openings for n in config.n_values]
    results, failures = _run_parallel(config.jobs, worker, tasks)
    fits, tables = {}, {}
    for opening in config.openings:
        samples = [
            (n, results[(opening, n)]) for n in config.n_values if (opening, n) in results
        ]
        tables[opening] = samples
        fits[opening] = fit_weyl_law(samples, config.gamma_f, opening.delta_q, lam)
    return fits, tables, failures


# ---------------------------------------------------------------------------
# output files
# ---------------------------------------------------------------------------


def _atomic_write(path, write_fn):
    tmp = str(path) + ".tmp"
    with open(tmp, "w", newline="") as fh:
        write_fn(fh)
    os.replace(tmp, path)


def write_rows_csv(rows, path):
    """Write dataclass rows as CSV with >= 15 significant digits."""
    if not rows:
        raise ValueError("no rows to write")
    fields = list(asdict(rows[0]).keys())

    def emit(fh):
        writer = csv.writer(fh)
        writer.writerow(fields)
        for row in rows:
            rec = asdict(row)
            writer.writerow(
                [f"{v:.17g}" if isinstance(v, float) else v for v in (rec[f] for f in fields)]
            )

    _atomic_write(path, emit)


def read_rows_csv(path):
    """Read back a CSV written by write_rows_csv as a list of dicts."""
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        out = []
        for rec in reader:
            parsed = {}
            for k, v in rec.items():
                try:
                    parsed[k] = int(v)
                except ValueError:
                    parsed[k] = float(v)
            out.append(parsed)
        return out


def write_manifest(path, config, timings, extra=None):
    """JSON run manifest: config echo, code version, wall-clock timings."""
    payload = {
        "code_version": __version__,
        "config": {
            k: v for k, v in asdict(config).items() if not k.startswith("_")
        },
        "timings_seconds": timings,
    }
    payload["config"]["openings"] = [
        {"variant": o.variant, "q0": o.q0, "delta_q": o.delta_q} for o in config.openings
    ]
    if extra:
        payload.update(extra)

    def emit(fh):
        json.dump(payload, fh, indent=2, default=str)
        fh.write("\n")

    _atomic_write(path, emit)
