"""
Quantization of the cat map on the torus: the closed unitary propagator,
position-strip projectors, opened (nonunitary) propagators and torus
coherent states.

Conventions: Hilbert-space dimension N corresponds to hbar = 1/(2*pi*N);
the position lattice is q_j = j/N; strip membership is half-open [lo, hi)
so the number of open channels O is deterministic when an edge hits a
lattice site.
"""

from dataclasses import dataclass
import math

import numpy as np

__all__ = [
    "OpeningSpec",
    "Projector",
    "Propagator",
    "StateVector",
    "build_closed_cat",
    "build_closed_map",
    "build_projector",
    "open_map",
    "coherent_state",
]

_PERIODIZATION_RANGE = 3  # |nu| <= 3 keeps Gaussian tails below ~1e-12 for N >= 20


def _union_measure(intervals):
    """Total length of a union of [lo, hi) intervals inside [0, 1)."""
    events = sorted(intervals)
    total, cur_lo, cur_hi = 0.0, None, None
    for lo, hi in events:
        if cur_hi is None or lo > cur_hi:
            if cur_hi is not None:
                total += cur_hi - cur_lo
            cur_lo, cur_hi = lo, hi
        else:
            cur_hi = max(cur_hi, hi)
    if cur_hi is not None:
        total += cur_hi - cur_lo
    return total


@dataclass(frozen=True)
class OpeningSpec:
    """Absorbing strip(s) in position.

    variant "single": one strip of width delta_q centered at q0.
    variant "symmetric": two strips of width delta_q/2 centered at q0 and 1-q0.
    """

    variant: str
    q0: float
    delta_q: float

    def __post_init__(self):
        if self.variant not in ("single", "symmetric"):
            raise ValueError(f"unknown opening variant {self.variant!r}")
        if not (0.0 < self.q0 < 1.0):
            raise ValueError("q0 must lie in (0, 1)")
        if not (0.0 <= self.delta_q < 1.0):
            raise ValueError("delta_q must lie in [0, 1)")
        if self.variant == "symmetric" and self.delta_q > 0:
            # overlap (incl. wraparound) shows up as lost total measure
            covered = _union_measure(self.strips())
            if covered < self.delta_q - 1e-12:
                raise ValueError("symmetric strips overlap")

    def _raw_intervals(self):
        if self.variant == "single":
            return [(self.q0 - self.delta_q / 2, self.q0 + self.delta_q / 2)]
        w = self.delta_q / 2
        ivs = [
            (self.q0 - w / 2, self.q0 + w / 2),
            (1.0 - self.q0 - w / 2, 1.0 - self.q0 + w / 2),
        ]
        return sorted(ivs)

    def strips(self):
        """Absorbing intervals as half-open [lo, hi) pieces reduced into [0, 1)."""
        out = []
        for lo, hi in self._raw_intervals():
            shift = math.floor(lo)
            lo, hi = lo - shift, hi - shift
            if hi <= 1.0:
                out.append((lo, hi))
            else:
                out.append((lo, 1.0))
                out.append((0.0, hi - 1.0))
        return out

    def contains(self, q):
        """Half-open membership of position q in an absorbing strip."""
        return any(lo <= q < hi for lo, hi in self.strips())

    def key_fragment(self):
        return f"{self.variant}-q0{self.q0:g}-dq{self.delta_q:g}"


@dataclass(frozen=True)
class Propagator:
    """Dense N x N one-step quantum map; closed (unitary) or opened (P M or M P)."""

    dim: int
    matrix: np.ndarray
    kind: str  # "closed" or "opened"
    opening: OpeningSpec = None
    order: str = None  # "PM" or "MP" for opened maps


@dataclass(frozen=True)
class Projector:
    """Diagonal 0/1 projector onto the complement of the opening."""

    dim: int
    keep: np.ndarray  # boolean, True on surviving lattice sites

    @property
    def open_channels(self):
        """O, the number of zeroed lattice sites."""
        return int(np.count_nonzero(~self.keep))

    @property
    def matrix(self):
        return np.diag(self.keep.astype(np.complex128))


@dataclass(frozen=True)
class StateVector:
    """Complex N-vector in the position representation on the lattice j/N."""

    dim: int
    amplitudes: np.ndarray

    @property
    def norm(self):
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self):
        return StateVector(self.dim, self.amplitudes / np.linalg.norm(self.amplitudes))

    def overlap(self, other):
        """<self|other>."""
        if self.dim != other.dim:
            raise ValueError("dimension mismatch")
        return complex(np.vdot(self.amplitudes, other.amplitudes))


def build_closed_cat(N):
    """Closed unitary propagator M_kj = (i/N)^(1/2) exp[(2 pi i/N)(k^2 - jk + j^2)].

    The principal branch is used for the prefactor, (i)^(1/2) = exp(i pi/4).
    Unitary for every N: the cross term makes rows an exact DFT family.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    k = np.arange(N)[:, None]
    j = np.arange(N)[None, :]
    phase = (k * k - j * k + j * j) % N  # integer arithmetic keeps the phase exact
    m = np.exp(1j * np.pi / 4) / np.sqrt(N) * np.exp(2j * np.pi / N * phase)
    return Propagator(dim=N, matrix=m, kind="closed")


def _jacobi_symbol(a, b):
    """Jacobi symbol (a/b) for odd positive b."""
    if b <= 0 or b % 2 == 0:
        raise ValueError("b must be positive and odd")
    out = 1
    a %= b
    while a != 0:
        while a % 2 == 0:
            a //= 2
            if b % 8 in (3, 5):
                out = -out
        if a % 4 == 3 and b % 4 == 3:
            out = -out
        a, b = b % a, a
    return out if b == 1 else 0


def build_closed_map(cat, N):
    """Gauss-sum quantization of a hyperbolic unit-determinant integer map.

    Propagates position kernels of exp[i pi (d q'^2 - 2 q' q + a q^2)/(N b)]
    with the quadratic Gauss sums evaluated in closed form, which keeps the
    matrix exactly unitary for every N (not just N divisible by b).  The
    quantum dynamics follows the same column convention as the classical
    module: x' = (a q + b p, c q + d p).

    For the default map this is the propagator used by the experiments; the
    simple one-line kernel of build_closed_cat quantizes the transposed
    matrix instead.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    a11, a12 = cat.a, cat.b
    a21, a22 = cat.c, cat.d
    if a12 == 0:
        raise ValueError("maps with b = 0 have no position-kernel quantization")
    g = math.gcd(N, a12)
    a = N * a11 // g
    b = a12 // g
    if math.gcd(a, b) != 1:
        raise ValueError("a and b must be coprime after reduction")
    pref = 1.0 / math.sqrt(b)
    if b % 2 == 0:
        pref *= _jacobi_symbol(b, a) * np.exp(1j * np.pi * (a % 8) / 4)
    else:
        pref *= _jacobi_symbol(a, b) * np.exp(-1j * np.pi * (b - 1) / 4)
    j = np.arange(N)[:, None]
    k = np.arange(N)[None, :]
    quad = np.pi * (a22 * j * j - 2 * j * k + a11 * k * k) / (N * a12)
    c_num = 2 * (a11 * k - j) + 0 * j
    ok = c_num % g == 0
    c = c_num // g
    ok &= (a * b + c) % 2 == 0
    if (a * b) % 2 == 0:
        a_inv = pow(a, -1, b) if b > 1 else 0
        num = ((a % (8 * b)) * (a_inv * (c % (8 * b))) ** 2) % (8 * b)
        gauss = np.where(ok, np.exp(-2j * np.pi * num / (8 * b)), 0)
    else:
        a4_inv = pow(4 * a, -1, b)
        num = (2 * (a % b) * (a4_inv * (c % b)) ** 2) % b
        gauss = np.where(ok, np.exp(-2j * np.pi * num / b), 0)
    m = np.sqrt(a12 / N) * np.exp(1j * quad) * pref * gauss
    return Propagator(dim=N, matrix=m, kind="closed")


def build_projector(N, opening):
    """0/1 diagonal projector killing lattice sites inside the absorbing strips."""
    q = np.arange(N) / N
    keep = np.array([not opening.contains(qj) for qj in q], dtype=bool)
    return Projector(dim=N, keep=keep)


def open_map(M, opening, order="PM"):
    """Opened propagator P M (default) or M P for the given opening."""
    if M.kind != "closed":
        raise ValueError("open_map expects the closed propagator")
    if order not in ("PM", "MP"):
        raise ValueError("order must be 'PM' or 'MP'")
    proj = build_projector(M.dim, opening)
    m = M.matrix.copy()
    if order == "PM":
        m[~proj.keep, :] = 0.0
    else:
        m[:, ~proj.keep] = 0.0
    return Propagator(dim=M.dim, matrix=m, kind="opened", opening=opening, order=order)


def coherent_state(N, center):
    """Periodized Gaussian on the position lattice, centered at (q0, p0).

    Amplitude at q_j is proportional to
        sum_nu exp[-pi N (q_j - q0 + nu)^2 + 2 pi i N p0 (q_j - q0 + nu)]
    with |nu| <= 3 and periodic (zero Floquet angle) boundary phases;
    normalized to unit norm.
    """
    q0, p0 = (float(center.q), float(center.p)) if hasattr(center, "q") else center
    j = np.arange(N)
    amp = np.zeros(N, dtype=np.complex128)
    for nu in range(-_PERIODIZATION_RANGE, _PERIODIZATION_RANGE + 1):
        d = j / N - q0 + nu
        amp += np.exp(-np.pi * N * d * d + 2j * np.pi * N * p0 * d)
    return StateVector(N, amp / np.linalg.norm(amp))
