"""
Non-Hermitian eigendecomposition of propagators, resonance bookkeeping
(decay rates, ascending-|z| ordering), fractal-Weyl-law statistics and an
on-disk decomposition cache.
"""

from dataclasses import dataclass, field
import math
import os
import struct

import numpy as np
import scipy.linalg as sla

from .quantize import Propagator

__all__ = [
    "ResonanceSet",
    "WeylFit",
    "decompose",
    "eigenvalues_only",
    "decay_rate",
    "weyl_fraction",
    "fit_weyl_law",
    "cache_key",
    "save_resonances",
    "load_resonances",
]

#: decay rate assigned to numerically vanished eigenvalues
GAMMA_INFINITE = math.inf

_MODULUS_TOL = 1e-8


def decay_rate(z):
    """Gamma = -2 ln|z| (so that |z|^2 = exp(-Gamma)), clamped at 0 from below."""
    az = abs(z)
    if az > 1.0 + _MODULUS_TOL:
        raise ValueError(f"|z| = {az} exceeds 1")
    if az < 1e-300:
        return GAMMA_INFINITE
    return max(0.0, -2.0 * math.log(az))


def _order_ascending(eigenvalues):
    """Permutation sorting by ascending |z|; ties by phase angle, then index."""
    mods = np.abs(eigenvalues)
    phases = np.angle(eigenvalues)
    return np.lexsort((np.arange(len(eigenvalues)), phases, mods))


@dataclass(frozen=True)
class ResonanceSet:
    """Eigendecomposition of a propagator, sorted by ascending |z|.

    Column i of right_vectors / left_vectors is the unit-norm right / left
    eigenvector of the i-th eigenvalue (left vector w satisfies
    w^H A = z w^H).  Order numbers reported elsewhere are 1-based positions
    in this ascending-|z| ordering.
    """

    dim: int
    eigenvalues: np.ndarray
    right_vectors: np.ndarray
    left_vectors: np.ndarray
    decay_rates: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.decay_rates is None:
            rates = np.array([decay_rate(z) for z in self.eigenvalues])
            object.__setattr__(self, "decay_rates", rates)

    def vectors(self, side):
        if side == "left":
            return self.left_vectors
        if side in ("right", "closed"):
            return self.right_vectors
        raise ValueError(f"unknown side {side!r}")


def decompose(prop):
    """Full eigendecomposition (eigenvalues, right and left eigenvectors).

    Uses LAPACK zgeev via scipy, which returns consistently paired left and
    right vectors in one call.  Vectors are normalized to unit 2-norm on
    both sides (not biorthogonally), so overlap magnitudes against unit-norm
    states are directly comparable between open and closed spectra.
    """
    a = prop.matrix
    try:
        w, vl, vr = sla.eig(a, left=True, right=True)
    except sla.LinAlgError as exc:  # pragma: no cover - zgeev hardly ever fails
        raise RuntimeError(
            f"eigensolver failed for N={prop.dim}, kind={prop.kind}"
        ) from exc
    vr = vr / np.linalg.norm(vr, axis=0, keepdims=True)
    vl = vl / np.linalg.norm(vl, axis=0, keepdims=True)
    order = _order_ascending(w)
    return ResonanceSet(
        dim=prop.dim,
        eigenvalues=w[order],
        right_vectors=vr[:, order],
        left_vectors=vl[:, order],
    )


def eigenvalues_only(prop):
    """Eigenvalues sorted ascending by |z| (no vectors; much faster)."""
    w = sla.eigvals(prop.matrix)
    return w[_order_ascending(w)]


def weyl_fraction(eigenvalues_or_set, gamma_f):
    """Fraction of states with decay rate Gamma < gamma_f."""
    if gamma_f <= 0:
        raise ValueError("gamma_f must be positive")
    if isinstance(eigenvalues_or_set, ResonanceSet):
        z = eigenvalues_or_set.eigenvalues
    else:
        z = np.asarray(eigenvalues_or_set)
    # Gamma < gamma_f  <=>  |z| > exp(-gamma_f / 2)
    return float(np.count_nonzero(np.abs(z) > math.exp(-gamma_f / 2.0))) / len(z)


@dataclass(frozen=True)
class WeylFit:
    """Power-law fit N_gamma/N = a N^(-b) with the theoretical exponent."""

    gamma_f: float
    samples: tuple  # ((N, fraction), ...)
    a: float
    b: float
    b_theory: float
    excluded: int = 0  # samples dropped because fraction <= 0
    residuals: tuple = ()


def fit_weyl_law(samples, gamma_f, delta_q, lyapunov):
    """Least-squares line fit of ln(fraction) vs ln(N).

    b_theory = delta_q / lyapunov: with O ~ delta_q * N open channels the
    predicted fraction O^(-1/(lyapunov * T_d)), T_d = N/O, is a pure power
    law in N with that exponent.
    """
    usable = [(n, f) for n, f in samples if f > 0]
    excluded = len(samples) - len(usable)
    if len(usable) < 5:
        raise ValueError("need at least 5 samples with positive fraction")
    ns = np.array([n for n, _ in usable], dtype=float)
    fs = np.array([f for _, f in usable])
    coeffs = np.polyfit(np.log(ns), np.log(fs), 1)
    b = -float(coeffs[0])
    a = float(np.exp(coeffs[1]))
    resid = np.log(fs) - np.polyval(coeffs, np.log(ns))
    return WeylFit(
        gamma_f=gamma_f,
        samples=tuple(usable),
        a=a,
        b=b,
        b_theory=delta_q / lyapunov,
        excluded=excluded,
        residuals=tuple(float(r) for r in resid),
    )


# ---------------------------------------------------------------------------
# on-disk cache
#
# Binary layout (little endian):
#   bytes 0..7   header: magic b"OQRC" + uint32 version (currently 1)
#   bytes 8..15  int64 N
#   bytes 16..23 int64 flags (bit 0: vectors present)
#   then complex128 eigenvalues (N entries, ascending |z| order)
#   then, if vectors present, right vectors (N*N, column major) and
#   left vectors (N*N, column major)
# ---------------------------------------------------------------------------

_CACHE_MAGIC = b"OQRC"
_CACHE_VERSION = 1

CACHE_DIR_ENV = "OPENCAT_CACHE_DIR"


def cache_key(N, opening=None, order="PM"):
    """Canonical cache key: cat-N{N}-{variant}-q0{q0}-dq{dq}-{PM|MP}."""
    if opening is None or opening.delta_q == 0:
        return f"cat-N{N}-closed"
    return f"cat-N{N}-{opening.variant}-q0{opening.q0:g}-dq{opening.delta_q:g}-{order}"


def _cache_path(cache_dir, key):
    return os.path.join(cache_dir, key + ".bin")


def save_resonances(cache_dir, key, res_or_eigenvalues):
    """Write a decomposition (or bare eigenvalue list) under the given key.

    Writes to a temp file and renames, so a crashed run never leaves a
    truncated record behind.
    """
    os.makedirs(cache_dir, exist_ok=True)
    path = _cache_path(cache_dir, key)
    if isinstance(res_or_eigenvalues, ResonanceSet):
        res = res_or_eigenvalues
        n, flags = res.dim, 1
        blobs = [
            np.ascontiguousarray(res.eigenvalues, dtype=np.complex128),
            np.asfortranarray(res.right_vectors, dtype=np.complex128),
            np.asfortranarray(res.left_vectors, dtype=np.complex128),
        ]
    else:
        z = np.ascontiguousarray(res_or_eigenvalues, dtype=np.complex128)
        n, flags = len(z), 0
        blobs = [z]
    tmp = path + ".tmp"
    with open(tmp, "wb") as fh:
        fh.write(_CACHE_MAGIC + struct.pack("<I", _CACHE_VERSION))
        fh.write(struct.pack("<qq", n, flags))
        for blob in blobs:
            fh.write(blob.tobytes(order="F"))
    os.replace(tmp, path)
    return path


def load_resonances(cache_dir, key):
    """Load a cached record; returns a ResonanceSet, a bare eigenvalue array,
    or None if the key is absent."""
    path = _cache_path(cache_dir, key)
    if not os.path.exists(path):
        return None
    with open(path, "rb") as fh:
        header = fh.read(8)
        if header[:4] != _CACHE_MAGIC:
            raise ValueError(f"not a resonance cache file: {path}")
        version = struct.unpack("<I", header[4:])[0]
        if version != _CACHE_VERSION:
            raise ValueError(f"unsupported cache version {version} in {path}")
        n, flags = struct.unpack("<qq", fh.read(16))
        z = np.frombuffer(fh.read(16 * n), dtype=np.complex128).copy()
        if not flags & 1:
            return z
        vr = np.frombuffer(fh.read(16 * n * n), dtype=np.complex128)
        vl = np.frombuffer(fh.read(16 * n * n), dtype=np.complex128)
        vr = vr.reshape((n, n), order="F").copy()
        vl = vl.reshape((n, n), order="F").copy()
    return ResonanceSet(dim=n, eigenvalues=z, right_vectors=vr, left_vectors=vl)
