"""
opencat: resonances and scarring in an opened quantized cat map.

The package quantizes a hyperbolic torus automorphism on an N-dimensional
Hilbert space, opens it with projective absorbing strips in position,
diagonalizes the resulting subunitary propagator, and measures how strongly
its resonance eigenstates concentrate on short periodic orbits via
scar-function overlaps.  Husimi distributions and a fractal Weyl-law sweep
round out the toolbox.
"""

__version__ = "1.0.0"

from .classical import (
    DEFAULT_CAT_MAP,
    ClassicalCatMap,
    PeriodicOrbit,
    TorusPoint,
    find_orbit,
    iterate,
    lyapunov_exponent,
    manifold_directions,
    orbit_action,
    periodic_points,
    step_action,
)
from .quantize import (
    OpeningSpec,
    Projector,
    Propagator,
    StateVector,
    build_closed_cat,
    build_closed_map,
    build_projector,
    coherent_state,
    open_map,
)
from .spectral import (
    ResonanceSet,
    WeylFit,
    decay_rate,
    decompose,
    eigenvalues_only,
    fit_weyl_law,
    weyl_fraction,
)
from .scar import (
    OverlapResult,
    ScarParams,
    default_truncation_time,
    overlap_scan,
    overlap_scan_closed,
    scar_function,
    tube_function,
)
from .phasespace import HusimiGrid, husimi, manifold_overlay

__all__ = [
    "__version__",
    "DEFAULT_CAT_MAP",
    "ClassicalCatMap",
    "PeriodicOrbit",
    "TorusPoint",
    "find_orbit",
    "iterate",
    "lyapunov_exponent",
    "manifold_directions",
    "orbit_action",
    "periodic_points",
    "step_action",
    "OpeningSpec",
    "Projector",
    "Propagator",
    "StateVector",
    "build_closed_cat",
    "build_closed_map",
    "build_projector",
    "coherent_state",
    "open_map",
    "ResonanceSet",
    "WeylFit",
    "decay_rate",
    "decompose",
    "eigenvalues_only",
    "fit_weyl_law",
    "weyl_fraction",
    "OverlapResult",
    "ScarParams",
    "default_truncation_time",
    "overlap_scan",
    "overlap_scan_closed",
    "scar_function",
    "tube_function",
    "HusimiGrid",
    "husimi",
    "manifold_overlay",
]
