"""Quantization: closed propagators, projectors, opened maps, coherent states."""

import math

import numpy as np
import pytest

from opencat.classical import DEFAULT_CAT_MAP, ClassicalCatMap, TorusPoint, iterate
from opencat.quantize import (
    OpeningSpec,
    build_closed_cat,
    build_closed_map,
    build_projector,
    coherent_state,
    open_map,
)

CAT = DEFAULT_CAT_MAP
OPENING_A = OpeningSpec("single", 0.225, 0.25)
OPENING_B = OpeningSpec("symmetric", 0.1625, 0.25)


def unitarity_defect(m):
    n = m.shape[0]
    return np.abs(m.conj().T @ m - np.eye(n)).max()


class TestClosedCatKernel:
    def test_n1_entry(self):
        m = build_closed_cat(1).matrix
        assert m.shape == (1, 1)
        assert m[0, 0] == pytest.approx(np.exp(1j * np.pi / 4), abs=1e-15)

    def test_symmetric_matrix(self):
        m = build_closed_cat(30).matrix
        assert np.abs(m - m.T).max() < 1e-14

    @pytest.mark.parametrize("n", [7, 100, 225, 360])
    def test_unitary(self, n):
        assert unitarity_defect(build_closed_cat(n).matrix) < 1e-10


class TestClosedMapGauss:
    @pytest.mark.parametrize("n", [1, 2, 3, 7, 100, 225, 360])
    def test_unitary(self, n):
        assert unitarity_defect(build_closed_map(CAT, n).matrix) < 1e-10

    def test_quantum_classical_correspondence(self):
        # a coherent state must be transported to the classically mapped center
        n = 120
        m = build_closed_map(CAT, n).matrix
        x0 = TorusPoint(0.3, 0.1)
        x1 = iterate(CAT, x0, 1)
        moved = m @ coherent_state(n, x0).amplitudes
        target = coherent_state(n, x1).amplitudes
        assert abs(np.vdot(target, moved)) > 0.95

    def test_return_phase_matches_action(self):
        # <coh|M|coh> at the (0.5,0.5) fixed point carries the phase
        # 2*pi*N*S with S = 1.75, plus an N-independent offset.
        offsets = []
        for n in (150, 151, 225, 310):
            m = build_closed_map(CAT, n).matrix
            c = coherent_state(n, (0.5, 0.5)).amplitudes
            ret = np.vdot(c, m @ c)
            offsets.append((np.angle(ret) / (2 * np.pi) - n * 1.75) % 1.0)
        assert np.ptp(offsets) < 1e-3

    def test_rejects_b_zero(self):
        with pytest.raises(ValueError):
            build_closed_map(ClassicalCatMap(1, 0, 1, 1), 10)


class TestOpeningSpec:
    def test_zero_width_opens_nothing(self):
        opening = OpeningSpec("single", 0.3, 0.0)
        assert build_projector(100, opening).open_channels == 0

    def test_site_count_single(self):
        # strip [0.1, 0.35) at N=225: j = 23..78 inclusive on the j/225 lattice
        proj = build_projector(225, OPENING_A)
        expected = sum(1 for j in range(225) if 0.1 <= j / 225 < 0.35)
        assert proj.open_channels == expected == 56

    def test_symmetric_strips(self):
        strips = OPENING_B.strips()
        assert len(strips) == 2
        width = sum(hi - lo for lo, hi in strips)
        assert width == pytest.approx(0.25, abs=1e-12)
        centers = sorted((lo + hi) / 2 for lo, hi in strips)
        assert centers[0] == pytest.approx(0.1625, abs=1e-12)
        assert centers[1] == pytest.approx(0.8375, abs=1e-12)

    def test_half_open_membership(self):
        opening = OpeningSpec("single", 0.25, 0.1)  # strip [0.2, 0.3)
        assert opening.contains(0.2)
        assert not opening.contains(0.3)

    def test_bad_variant(self):
        with pytest.raises(ValueError):
            OpeningSpec("double", 0.2, 0.1)


class TestOpenMap:
    def test_zero_width_is_identity_opening(self):
        m = build_closed_map(CAT, 60)
        opened = open_map(m, OpeningSpec("single", 0.3, 0.0))
        assert np.array_equal(opened.matrix, m.matrix)

    def test_pm_zeroes_rows(self):
        m = build_closed_map(CAT, 225)
        opened = open_map(m, OPENING_A, order="PM")
        proj = build_projector(225, OPENING_A)
        assert np.all(opened.matrix[~proj.keep, :] == 0)
        assert np.array_equal(opened.matrix[proj.keep, :], m.matrix[proj.keep, :])

    def test_mp_zeroes_columns(self):
        m = build_closed_map(CAT, 225)
        opened = open_map(m, OPENING_A, order="MP")
        proj = build_projector(225, OPENING_A)
        assert np.all(opened.matrix[:, ~proj.keep] == 0)

    def test_rank_deficiency_is_exactly_o(self):
        m = build_closed_map(CAT, 225)
        opened = open_map(m, OPENING_A)
        s = np.linalg.svd(opened.matrix, compute_uv=False)
        o = build_projector(225, OPENING_A).open_channels
        assert np.sum(s < 1e-8) == o
        # surviving rows of a unitary stay orthonormal
        assert np.allclose(s[: 225 - o], 1.0, atol=1e-10)


class TestCoherentState:
    def test_unit_norm(self):
        assert coherent_state(225, (0.5, 0.5)).norm == pytest.approx(1.0, abs=1e-12)

    def test_distant_states_orthogonal(self):
        a = coherent_state(225, (0.0, 0.0))
        b = coherent_state(225, (0.5, 0.5))
        assert abs(a.overlap(b)) < 1e-10

    def test_translation_covariance(self):
        n = 90
        a = coherent_state(n, (0.3, 0.2)).amplitudes
        b = coherent_state(n, (0.3 + 1.0 / n, 0.2)).amplitudes
        assert abs(np.vdot(np.roll(a, 1), b)) == pytest.approx(1.0, abs=1e-10)

    def test_position_localization(self):
        c = coherent_state(225, (0.5, 0.5)).amplitudes
        assert np.argmax(np.abs(c)) == round(0.5 * 225)
