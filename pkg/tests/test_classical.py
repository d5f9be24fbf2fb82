"""Classical cat-map dynamics: iteration, orbits, actions, manifolds."""

from fractions import Fraction
import math

import numpy as np
import pytest

from opencat.classical import (
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

CAT = DEFAULT_CAT_MAP


def brute_force_fixed_point_count(cat, n):
    """Independent oracle: |det(A^n - I)| counts fixed points of the n-th iterate."""
    a = np.linalg.matrix_power(np.array([[cat.a, cat.b], [cat.c, cat.d]]), n)
    return abs(round(np.linalg.det(a - np.eye(2))))


class TestIterate:
    def test_origin_fixed(self):
        x = iterate(CAT, TorusPoint(0, 0), 5)
        assert (float(x.q), float(x.p)) == (0.0, 0.0)

    def test_half_half_fixed(self):
        x = iterate(CAT, TorusPoint(0.5, 0.5), 1)
        assert (float(x.q), float(x.p)) == (0.5, 0.5)

    def test_sample_point(self):
        # (0.1, 0.2) -> (2*.1 + 3*.2, .1 + 2*.2) = (0.8, 0.5)
        x = iterate(CAT, TorusPoint(Fraction(1, 10), Fraction(1, 5)), 1)
        assert x.q == Fraction(4, 5)
        assert x.p == Fraction(1, 2)

    def test_inverse_round_trip(self):
        inv = CAT.inverse()
        x = TorusPoint(Fraction(3, 7), Fraction(2, 7))
        assert iterate(inv, iterate(CAT, x, 3), 3) == x


class TestPeriodicPoints:
    def test_fixed_points(self):
        orbits = periodic_points(CAT, 1)
        pts = sorted((float(o.points[0].q), float(o.points[0].p)) for o in orbits)
        assert pts == [(0.0, 0.0), (0.5, 0.5)]

    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_counts_match_determinant(self, n):
        orbits = periodic_points(CAT, n)
        total = sum(o.period for o in orbits)
        assert total == brute_force_fixed_point_count(CAT, n)

    def test_minimal_periods_divide_n(self):
        for o in periodic_points(CAT, 4):
            assert 4 % o.period == 0

    def test_points_actually_periodic(self):
        for o in periodic_points(CAT, 3):
            assert iterate(CAT, o.points[0], o.period) == o.points[0]


class TestLyapunov:
    def test_value(self):
        # eigenvalues of [[2,3],[1,2]] are 2 +- sqrt(3)
        assert lyapunov_exponent(CAT) == pytest.approx(math.log(2 + math.sqrt(3)),
                                                       abs=1e-12)
        assert round(lyapunov_exponent(CAT), 4) == 1.317

    def test_parabolic_rejected(self):
        with pytest.raises(ValueError):
            lyapunov_exponent(ClassicalCatMap(1, 1, 0, 1))


class TestManifolds:
    def test_slopes(self):
        unstable, stable = manifold_directions(CAT)
        assert unstable[1] / unstable[0] == pytest.approx(1 / math.sqrt(3), abs=1e-12)
        assert stable[1] / stable[0] == pytest.approx(-1 / math.sqrt(3), abs=1e-12)

    def test_unstable_is_eigenvector(self):
        unstable = np.array(manifold_directions(CAT)[0])
        a = np.array([[CAT.a, CAT.b], [CAT.c, CAT.d]], dtype=float)
        image = a @ unstable
        lam = 2 + math.sqrt(3)
        assert np.allclose(image, lam * unstable, atol=1e-12)


class TestActions:
    def test_origin_action_zero(self):
        orbit = find_orbit(CAT, 0.0, 0.0)
        assert orbit_action(CAT, orbit) == 0.0

    def test_half_half_action(self):
        # Unwrapped generating-function action of the (0.5,0.5) fixed point.
        # The propagator's return phase fixes it to 0.75 (mod 1); the raw
        # unwound value is 1.75 = (2/4 - 2*(1/2)*(5/2) + 2*(25/4)) / 6.
        orbit = find_orbit(CAT, 0.5, 0.5)
        s = orbit_action(CAT, orbit)
        assert s == pytest.approx(1.75, abs=1e-12)
        assert s % 1.0 == pytest.approx(0.75, abs=1e-12)

    def test_action_matches_step_sum(self):
        orbits = [o for o in periodic_points(CAT, 2) if o.period == 2]
        assert orbits
        for o in orbits:
            total = sum(step_action(CAT, o.points[k]) for k in range(o.period))
            assert orbit_action(CAT, o) == pytest.approx(float(total), abs=1e-12)

    def test_cyclic_invariance(self):
        orbit = next(o for o in periodic_points(CAT, 2) if o.period == 2)
        rotated = PeriodicOrbit(points=orbit.points[1:] + orbit.points[:1],
                                period=orbit.period,
                                action_per_period=orbit.action_per_period,
                                lyapunov=orbit.lyapunov)
        assert orbit_action(CAT, rotated) == pytest.approx(
            orbit_action(CAT, orbit), abs=1e-12
        )


class TestFindOrbit:
    def test_finds_fixed_point(self):
        orbit = find_orbit(CAT, 0.5, 0.5)
        assert orbit.period == 1
        assert float(orbit.points[0].q) == 0.5

    def test_rejects_non_periodic_seed(self):
        with pytest.raises(ValueError):
            find_orbit(CAT, 0.123456, 0.654321, max_period=4)


class TestMatrixValidation:
    def test_non_unimodular_rejected(self):
        with pytest.raises(ValueError):
            ClassicalCatMap(2, 0, 0, 2)

    def test_hyperbolic_flag(self):
        assert CAT.is_hyperbolic
        assert not ClassicalCatMap(0, -1, 1, 0).is_hyperbolic
