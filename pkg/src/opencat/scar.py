"""
Tube and scar functions for periodic orbits of the quantized cat map, and
overlap scans against eigenstate / resonance sets.

The scar function is the dynamical average

    |scar> ~ sum_{l=-T..T} e^(i theta l) cos(pi l / 2T) M^l |tube>

truncated at the Ehrenfest time T ~ ln(2 pi N) / lambda.  The phase of the
l-th term is the Bohr-Sommerfeld action phase e^(-2 pi i N S_l), with S_l
the orbit's generating-function action accumulated over l steps (theta l =
-2 pi N S_mu l for a fixed point of action S_mu), so successive iterates of
the tube function interfere constructively along the orbit.
"""

from dataclasses import dataclass, field
import math

import numpy as np

from .classical import PeriodicOrbit, lyapunov_exponent
from .quantize import StateVector, coherent_state
from .spectral import ResonanceSet

__all__ = [
    "ScarParams",
    "OverlapResult",
    "default_truncation_time",
    "tube_function",
    "scar_function",
    "overlap_scan",
    "overlap_scan_closed",
]


def default_truncation_time(N, lyapunov):
    """Ehrenfest-time truncation T = round(ln(2 pi N) / lambda), at least 1.

    |ln hbar| = ln(2 pi N) for hbar = 1/(2 pi N); rounding is half-up so the
    choice is deterministic.
    """
    t = math.floor(math.log(2.0 * math.pi * N) / lyapunov + 0.5)
    return max(1, int(t))


@dataclass(frozen=True)
class ScarParams:
    orbit: PeriodicOrbit
    N: int
    T: int = None

    def __post_init__(self):
        if self.T is None:
            object.__setattr__(
                self, "T", default_truncation_time(self.N, self.orbit.lyapunov)
            )
        if self.T < 1:
            raise ValueError("truncation time T must be >= 1")


def tube_function(orbit, N):
    """Phased sum of coherent states over the orbit points, unit norm.

    Point k carries the phase e^(-2 pi i N S_k), with S_k the accumulated
    generating-function action from points[0] to points[k] (S_0 = 0), so all
    terms propagate coherently under the map.  A period-1 orbit gives back a
    single coherent state.
    """
    total = np.zeros(N, dtype=np.complex128)
    s_k = 0.0
    for k, x in enumerate(orbit.points):
        if k > 0:
            s_k += orbit.step_actions[k - 1]
        total += np.exp(-2j * np.pi * N * s_k) * coherent_state(N, x).amplitudes
    return StateVector(N, total / np.linalg.norm(total))


def _cumulative_actions(orbit, T):
    """Accumulated orbit action after 1..T forward and backward steps."""
    p = orbit.period
    fwd = np.zeros(T)
    bwd = np.zeros(T)
    s = 0.0
    for l in range(T):
        s += orbit.step_actions[l % p]
        fwd[l] = s
    s = 0.0
    for l in range(T):
        s += orbit.step_actions[(-1 - l) % p]
        bwd[l] = s
    return fwd, bwd


def scar_function(params, m_closed):
    """Scar function of Eq.-style dynamical averaging; unit norm.

    m_closed must be the closed (unitary) propagator at the same N; inverse
    iterations use its adjoint.
    """
    if m_closed.kind != "closed":
        raise ValueError("scar_function needs the closed propagator")
    if m_closed.dim != params.N:
        raise ValueError("dimension mismatch between params and propagator")
    tube = tube_function(params.orbit, params.N)
    T = params.T
    s_fwd, s_bwd = _cumulative_actions(params.orbit, T)
    m = m_closed.matrix
    m_inv = m.conj().T
    total = tube.amplitudes.copy()  # l = 0 term, weight cos(0) = 1
    fwd = tube.amplitudes.copy()
    bwd = tube.amplitudes.copy()
    two_pi_n = 2.0 * np.pi * params.N
    for l in range(1, T + 1):
        fwd = m @ fwd
        bwd = m_inv @ bwd
        w = math.cos(math.pi * l / (2.0 * T))
        if w == 0.0:
            continue
        total += w * (
            np.exp(-1j * two_pi_n * s_fwd[l - 1]) * fwd
            + np.exp(1j * two_pi_n * s_bwd[l - 1]) * bwd
        )
    return StateVector(params.N, total / np.linalg.norm(total))


@dataclass(frozen=True)
class OverlapResult:
    """Result of scanning |<scar|phi_i>| over an eigenvector set.

    nu_max is the 1-based order number of the maximizer in the ascending
    eigenvalue-modulus ordering.
    """

    x_max: float
    nu_max: int
    side: str
    all_overlaps: np.ndarray = field(repr=False, default=None)


def overlap_scan(scar, res, side="right"):
    """All overlap magnitudes of `scar` with one side's eigenvectors."""
    if side not in ("right", "left", "closed"):
        raise ValueError(f"unknown side {side!r}")
    if scar.dim != res.dim:
        raise ValueError("dimension mismatch")
    overlaps = np.abs(scar.amplitudes.conj() @ res.vectors(side))
    imax = int(np.argmax(overlaps))
    return OverlapResult(
        x_max=float(overlaps[imax]),
        nu_max=imax + 1,
        side=side,
        all_overlaps=overlaps,
    )


def overlap_scan_closed(scar, closed_res):
    """Overlap scan against the (orthonormal) eigenbasis of the closed map."""
    return overlap_scan(scar, closed_res, side="closed")
