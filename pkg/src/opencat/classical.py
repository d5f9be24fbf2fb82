"""
Classical cat-map dynamics on the 2-torus.

Exact arithmetic (fractions) is used wherever periodic points are involved:
the number of period-n points grows like |det(M^n - I)| and floating point
would start merging nearby lattice points already at moderate n.
"""

from dataclasses import dataclass
from fractions import Fraction
import math

__all__ = [
    "ClassicalCatMap",
    "TorusPoint",
    "PeriodicOrbit",
    "iterate",
    "periodic_points",
    "lyapunov_exponent",
    "manifold_directions",
    "orbit_action",
    "step_action",
    "find_orbit",
    "DEFAULT_CAT_MAP",
]

_SNAP = 1e-15


def _mod1(x):
    """Reduce a coordinate into [0, 1); exact for Fraction inputs."""
    if isinstance(x, Fraction):
        return x - (x // 1)
    y = x - math.floor(x)
    if y >= 1.0 - _SNAP or y < 0.0:
        y = 0.0
    return y


@dataclass(frozen=True)
class TorusPoint:
    """A point (q, p) on the unit 2-torus, coordinates reduced into [0,1)."""

    q: object
    p: object

    def __post_init__(self):
        object.__setattr__(self, "q", _mod1(self.q))
        object.__setattr__(self, "p", _mod1(self.p))

    def as_floats(self):
        return float(self.q), float(self.p)


@dataclass(frozen=True)
class ClassicalCatMap:
    """Integer unimodular matrix [[a, b], [c, d]] acting on column vectors (q, p)."""

    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        if self.a * self.d - self.b * self.c != 1:
            raise ValueError("cat map matrix must have determinant 1")

    @property
    def trace(self):
        return self.a + self.d

    @property
    def is_hyperbolic(self):
        return abs(self.trace) > 2

    def inverse(self):
        return ClassicalCatMap(self.d, -self.b, -self.c, self.a)

    def matrix_power(self, n):
        """Integer entries of the n-th power (n may be negative)."""
        m = self if n >= 0 else self.inverse()
        a, b, c, d = 1, 0, 0, 1
        for _ in range(abs(n)):
            a, b, c, d = (
                m.a * a + m.b * c,
                m.a * b + m.b * d,
                m.c * a + m.d * c,
                m.c * b + m.d * d,
            )
        return a, b, c, d


# The matrix of the model system: [[2, 3], [1, 2]].
DEFAULT_CAT_MAP = ClassicalCatMap(2, 3, 1, 2)


def iterate(cat, x, steps=1):
    """Apply the toral automorphism `steps` times (negative uses the exact inverse)."""
    a, b, c, d = cat.matrix_power(steps)
    return TorusPoint(a * x.q + b * x.p, c * x.q + d * x.p)


def _require_hyperbolic(cat):
    if not cat.is_hyperbolic:
        raise ValueError("map is not hyperbolic (|trace| <= 2)")


def lyapunov_exponent(cat):
    """ln of the larger eigenvalue modulus of the integer matrix."""
    _require_hyperbolic(cat)
    t = abs(cat.trace)
    return math.log((t + math.sqrt(t * t - 4)) / 2.0)


def manifold_directions(cat):
    """Unit eigenvectors (unstable, stable) of the matrix, as (dq, dp) tuples."""
    _require_hyperbolic(cat)
    t = cat.trace
    disc = math.sqrt(t * t - 4)
    lams = ((t + disc) / 2.0, (t - disc) / 2.0)
    if abs(lams[0]) < abs(lams[1]):
        lams = (lams[1], lams[0])
    out = []
    for lam in lams:
        if cat.b != 0:
            v = (cat.b, lam - cat.a)
        else:
            v = (lam - cat.d, cat.c)
        n = math.hypot(*v)
        out.append((v[0] / n, v[1] / n))
    return tuple(out)


@dataclass(frozen=True)
class PeriodicOrbit:
    """An orbit of the map: points[k+1] = M points[k] (mod 1), cyclically.

    step_actions[k] is the one-step generating-function action for the hop
    points[k] -> points[k+1]; their sum is action_per_period.
    """

    points: tuple
    period: int
    action_per_period: float
    lyapunov: float
    step_actions: tuple = None

    def __post_init__(self):
        if self.step_actions is None:
            per = self.action_per_period / self.period
            object.__setattr__(self, "step_actions", (per,) * self.period)

    def representative(self):
        return self.points[0]


def _fixed_points_of_power(cat, n):
    """All solutions of (M^n - I) x = 0 (mod 1), as exact TorusPoints."""
    a, b, c, d = cat.matrix_power(n)
    a, d = a - 1, d - 1
    det = a * d - b * c
    if det == 0:
        raise ValueError("M^n - I is singular; map is not hyperbolic")
    adet = abs(det)
    pts = set()
    # x = adj(A) m / det over integer vectors m; reducing mod 1 it is enough
    # to scan m in [0, |det|)^2.
    for m1 in range(adet):
        for m2 in range(adet):
            q = Fraction(d * m1 - b * m2, det)
            p = Fraction(-c * m1 + a * m2, det)
            pts.add((q - (q // 1), p - (p // 1)))
    return [TorusPoint(q, p) for q, p in sorted(pts)]


def periodic_points(cat, period):
    """All orbits among the fixed points of M^period, grouped by orbit.

    Each returned orbit carries its minimal period (a divisor of `period`),
    the accumulated action over that minimal period, and the map's Lyapunov
    exponent per step.
    """
    if period < 1:
        raise ValueError("period must be >= 1")
    _require_hyperbolic(cat)
    lam = lyapunov_exponent(cat)
    seen = set()
    orbits = []
    for x in _fixed_points_of_power(cat, period):
        key = (x.q, x.p)
        if key in seen:
            continue
        pts = [x]
        seen.add(key)
        y = iterate(cat, x)
        while (y.q, y.p) != key:
            seen.add((y.q, y.p))
            pts.append(y)
            y = iterate(cat, y)
        steps = tuple(step_action(cat, x) for x in pts)
        orb = PeriodicOrbit(
            points=tuple(pts),
            period=len(pts),
            action_per_period=math.fsum(steps),
            lyapunov=lam,
            step_actions=steps,
        )
        orbits.append(orb)
    return orbits


def step_action(cat, x):
    """One-step generating-function action from torus point x.

    The generating function for [[a, b], [c, d]] (b != 0) is
    S(q, q') = (a q^2 - 2 q q' + d q'^2) / (2 b), evaluated on the unwrapped
    image q' = a q + b p, minus the momentum-winding term m_p * (q' mod 1)
    with m_p = floor(c q + d p).  With that correction the one-step phase of
    the quantized map at a periodic point is exp(2*pi*i*N*S) times an
    N-independent factor, for every N (checked against coherent-state return
    amplitudes over many orbits).
    """
    if cat.b == 0:
        raise ValueError("generating function requires b != 0")
    q, p = Fraction(x.q), Fraction(x.p)
    qn = cat.a * q + cat.b * p  # unwrapped image position
    pn = cat.c * q + cat.d * p  # unwrapped image momentum
    s = (cat.a * q * q - 2 * q * qn + cat.d * qn * qn) / (2 * cat.b)
    s -= (pn - (pn % 1)) * (qn % 1)
    return float(s)


def orbit_action(cat, orbit):
    """Action S_mu of a periodic orbit of `cat` over one (minimal) period."""
    for k, x in enumerate(orbit.points):
        y = iterate(cat, x)
        nxt = orbit.points[(k + 1) % orbit.period]
        if not (
            abs(float(y.q) - float(nxt.q)) < 1e-9
            and abs(float(y.p) - float(nxt.p)) < 1e-9
        ):
            raise ValueError("orbit does not belong to this map")
    return math.fsum(step_action(cat, x) for x in orbit.points)


def find_orbit(cat, q, p, max_period=8, tol=1e-9):
    """Snap (q, p) to the nearest known periodic point with period <= max_period.

    Returns the orbit, rotated so the snapped point is the representative.
    Raises if no periodic point lies within `tol` (toroidal distance).
    """
    for n in range(1, max_period + 1):
        for orb in periodic_points(cat, n):
            if orb.period != n:
                continue
            for k, x in enumerate(orb.points):
                dq = abs(float(x.q) - q)
                dp = abs(float(x.p) - p)
                dq = min(dq, 1 - dq)
                dp = min(dp, 1 - dp)
                if math.hypot(dq, dp) <= tol:
                    pts = orb.points[k:] + orb.points[:k]
                    steps = orb.step_actions[k:] + orb.step_actions[:k]
                    return PeriodicOrbit(
                        points=pts,
                        period=orb.period,
                        action_per_period=orb.action_per_period,
                        lyapunov=orb.lyapunov,
                        step_actions=steps,
                    )
    raise ValueError(f"no periodic point of period <= {max_period} within {tol} of ({q}, {p})")
