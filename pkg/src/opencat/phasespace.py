"""
Husimi phase-space grids and manifold overlay polylines.

Grids are sampled at cell centers ((a+1/2)/G, (b+1/2)/G) so that no sample
falls exactly on a lattice site or strip edge.  Grids and polylines can be
written as plain text consumable by standard plotting tools.
"""

from dataclasses import dataclass
from functools import lru_cache
import json
import math
import os

import numpy as np

from .classical import manifold_directions
from .quantize import _PERIODIZATION_RANGE

__all__ = [
    "HusimiGrid",
    "husimi",
    "manifold_overlay",
    "write_grid",
    "write_polylines",
]

DEFAULT_RESOLUTION = 128
LOG_EPSILON_FRACTION = 1e-12  # epsilon for the log scale, relative to the max


@dataclass(frozen=True)
class HusimiGrid:
    """values[a][b] = normalized |<coh(q_a, p_b)|psi>|^2 on a G x G grid."""

    resolution: int
    values: np.ndarray
    scale: str = "linear"
    state_label: str = ""

    def cell_centers(self):
        g = self.resolution
        return (np.arange(g) + 0.5) / g

    def log_scaled(self):
        """Logarithmic version: ln(value + eps), eps = 1e-12 of the max."""
        if self.scale != "linear":
            raise ValueError("log_scaled expects a linear grid")
        eps = LOG_EPSILON_FRACTION * self.values.max()
        return HusimiGrid(
            resolution=self.resolution,
            values=np.log(self.values + eps),
            scale="log",
            state_label=self.state_label,
        )

    def argmax_cell(self):
        """(q, p) center of the brightest cell."""
        a, b = np.unravel_index(int(np.argmax(self.values)), self.values.shape)
        centers = self.cell_centers()
        return centers[a], centers[b]


@lru_cache(maxsize=8)
def _coherent_bank(N, G):
    """Conjugated coherent-state bank, shape (G, G, N): bank[a,b] = coh(q_a,p_b)^*."""
    centers = (np.arange(G) + 0.5) / G
    j = np.arange(N) / N
    bank = np.empty((G, G, N), dtype=np.complex128)
    ps = centers[:, None]
    for a, qa in enumerate(centers):
        amp = np.zeros((G, N), dtype=np.complex128)
        for nu in range(-_PERIODIZATION_RANGE, _PERIODIZATION_RANGE + 1):
            d = j - qa + nu
            amp += np.exp(-np.pi * N * d * d)[None, :] * np.exp(
                2j * np.pi * N * ps * d[None, :]
            )
        amp /= np.linalg.norm(amp, axis=1, keepdims=True)
        bank[a] = amp.conj()
    return bank


def husimi(state, resolution=DEFAULT_RESOLUTION, label=""):
    """Husimi grid of a state, max-normalized to 1."""
    bank = _coherent_bank(state.dim, resolution)
    values = np.abs(bank @ state.amplitudes) ** 2
    m = values.max()
    if m > 0:
        values = values / m
    return HusimiGrid(resolution=resolution, values=values, state_label=label)


def _wrap_segment(p0, p1):
    """Split the straight segment p0 -> p1 (unwrapped plane) at unit-cell
    boundaries and shift every piece into [0, 1)^2."""
    crossings = [0.0, 1.0]
    for dim in range(2):
        lo, hi = sorted((p0[dim], p1[dim]))
        k = math.floor(lo) + 1
        while k < hi:
            if abs(p1[dim] - p0[dim]) > 1e-300:
                crossings.append((k - p0[dim]) / (p1[dim] - p0[dim]))
            k += 1
    crossings = sorted(t for t in set(crossings) if 0.0 <= t <= 1.0)
    pieces = []
    for t0, t1 in zip(crossings[:-1], crossings[1:]):
        if t1 - t0 < 1e-12:
            continue
        mid_t = (t0 + t1) / 2
        mid = [p0[d] + mid_t * (p1[d] - p0[d]) for d in range(2)]
        shift = [math.floor(mid[d]) for d in range(2)]
        a = [p0[d] + t0 * (p1[d] - p0[d]) - shift[d] for d in range(2)]
        b = [p0[d] + t1 * (p1[d] - p0[d]) - shift[d] for d in range(2)]
        clip = lambda x: min(max(x, 0.0), math.nextafter(1.0, 0.0))
        pieces.append(((clip(a[0]), clip(a[1])), (clip(b[0]), clip(b[1]))))
    return pieces


def manifold_overlay(orbit, cat, length):
    """Torus-wrapped stable/unstable manifold segments through the orbit points.

    Each branch extends symmetrically to total arclength `length`; returns a
    list of polylines (lists of (q, p) vertices in [0, 1)^2).
    """
    unstable, stable = manifold_directions(cat)
    polylines = []
    for x in orbit.points:
        q, p = float(x.q), float(x.p)
        for direction in (unstable, stable):
            if length == 0:
                polylines.append([(q, p)])
                continue
            half = length / 2.0
            p0 = (q - half * direction[0], p - half * direction[1])
            p1 = (q + half * direction[0], p + half * direction[1])
            for a, b in _wrap_segment(p0, p1):
                polylines.append([a, b])
    return polylines


def write_grid(grid, path):
    """Write grid values as plain text (one row per line) plus a JSON sidecar."""
    np.savetxt(path, grid.values, fmt="%.17g")
    meta = {
        "state_label": grid.state_label,
        "scale": grid.scale,
        "resolution": grid.resolution,
    }
    with open(os.fspath(path) + ".meta.json", "w") as fh:
        json.dump(meta, fh, indent=2)
        fh.write("\n")


def write_polylines(polylines, path):
    """Write polylines as (x, y) pairs, blank lines separating segments."""
    with open(path, "w") as fh:
        for line in polylines:
            for x, y in line:
                fh.write(f"{x:.17g} {y:.17g}\n")
            fh.write("\n")
