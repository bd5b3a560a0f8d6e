"""Tests for constellation construction and the component energy split."""

import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hmplan.constellation import (
    Constellation,
    build_hierarchical_16qam,
    build_reference,
    energy_split,
)
from hmplan.errors import InvalidParameterError

ALPHA_GRID = [0.5, 0.8, 1.0, 2.0, 4.0]


class TestHierarchical16QAM:
    def test_alpha_one_matches_uniform_grid(self):
        """alpha=1 must reproduce the uniform 16-QAM lattice."""
        c = build_hierarchical_16qam(1.0)
        got = sorted((round(p.real, 12), round(p.imag, 12)) for p in c.points)
        lattice = [
            (re / np.sqrt(10.0), im / np.sqrt(10.0))
            for re in (-3, -1, 1, 3)
            for im in (-3, -1, 1, 3)
        ]
        want = sorted((round(re, 12), round(im, 12)) for re, im in lattice)
        assert got == pytest.approx(want)

    @pytest.mark.parametrize("alpha", ALPHA_GRID + [2.0])
    def test_alpha_round_trip(self, alpha):
        """The built geometry must return the requested ratio d_h/d_l."""
        c = build_hierarchical_16qam(alpha)
        assert c.measured_alpha() == pytest.approx(alpha, abs=1e-12)

    @pytest.mark.parametrize("alpha", ALPHA_GRID)
    def test_unit_mean_energy(self, alpha):
        c = build_hierarchical_16qam(alpha)
        assert c.mean_energy() == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.parametrize("alpha", ALPHA_GRID)
    def test_quadrant_structure(self, alpha):
        """Exactly 16 points, 4 per quadrant, quadrant fixed by the HP pair."""
        c = build_hierarchical_16qam(alpha)
        assert len(c.points) == 16
        for idx in c.hp_groups():
            pts = c.point_array()[idx]
            assert len(pts) == 4
            assert len(set(np.sign(pts.real))) == 1
            assert len(set(np.sign(pts.imag))) == 1

    @pytest.mark.parametrize("alpha", ALPHA_GRID)
    def test_energy_split_matches_geometry(self, alpha):
        """The hp/lp split must equal ((d_h+d_l)/d_l)^2 from the built points."""
        c = build_hierarchical_16qam(alpha)
        d_l = c.min_in_quadrant_distance() / 2.0
        d_h = c.min_hp_distance() / 2.0
        hp, lp = energy_split(alpha)
        assert hp / lp == pytest.approx(((d_h + d_l) / d_l) ** 2, abs=1e-9)

    @pytest.mark.parametrize("alpha", [1.0, 2.0, 4.0])
    def test_overall_min_distance_is_in_quadrant_above_one(self, alpha):
        """For alpha >= 1 the overall minimum distance is the in-quadrant one."""
        c = build_hierarchical_16qam(alpha)
        assert c.min_distance() == pytest.approx(c.min_in_quadrant_distance(), abs=1e-12)

    def test_labels_cover_all_bit_strings(self):
        c = build_hierarchical_16qam(0.8)
        assert sorted(c.labels) == ["".join(b) for b in itertools.product("01", repeat=4)]

    def test_gray_labels_within_quadrant(self):
        """Nearest neighbours inside a quadrant differ in exactly one LP bit."""
        c = build_hierarchical_16qam(2.0)
        arr = c.point_array()
        for idx in c.hp_groups():
            for i in idx:
                others = [j for j in idx if j != i]
                nearest = min(others, key=lambda j: abs(arr[i] - arr[j]))
                diff = sum(a != b for a, b in zip(c.labels[i], c.labels[nearest]))
                assert diff == 1

    @pytest.mark.parametrize("alpha", [0.0, -1.0, float("nan"), float("inf")])
    def test_invalid_alpha_rejected(self, alpha):
        with pytest.raises(InvalidParameterError):
            build_hierarchical_16qam(alpha)

    @given(alpha=st.floats(min_value=0.05, max_value=20.0, allow_nan=False))
    @settings(max_examples=50, deadline=None)
    def test_normalization_for_any_alpha(self, alpha):
        c = build_hierarchical_16qam(alpha)
        assert c.mean_energy() == pytest.approx(1.0, abs=1e-12)
        assert c.measured_alpha() == pytest.approx(alpha, rel=1e-9)


class TestReferenceModulations:
    def test_qpsk_equal_energy_points(self, qpsk):
        assert len(qpsk.points) == 4
        assert np.allclose(np.abs(qpsk.point_array()) ** 2, 1.0)

    def test_qpsk_bits_per_symbol(self, qpsk):
        assert qpsk.bits_per_symbol == 2

    def test_uniform_16qam_equal_min_distances(self, qam16):
        """alpha=1 geometry: the cross-quadrant distance equals the overall minimum."""
        c = build_hierarchical_16qam(1.0)
        assert c.min_hp_distance() == pytest.approx(c.min_distance(), abs=1e-12)
        assert qam16.mean_energy() == pytest.approx(1.0, abs=1e-12)

    def test_unknown_id_rejected(self):
        with pytest.raises(InvalidParameterError):
            build_reference("8PSK")

    def test_stream_groups_need_16_points(self, qpsk):
        with pytest.raises(InvalidParameterError):
            qpsk.hp_groups()


class TestEnergySplit:
    @pytest.mark.parametrize(
        "alpha,hp_expected",
        [(2.0, 0.90), (4.0, 0.9615), (1.0, 0.80), (0.8, 0.7642), (0.5, 0.6923)],
    )
    def test_published_percentages(self, alpha, hp_expected):
        hp, lp = energy_split(alpha)
        assert hp == pytest.approx(hp_expected, abs=5e-4)
        assert hp + lp == pytest.approx(1.0, abs=1e-15)

    def test_ratio_identity(self):
        hp, lp = energy_split(3.0)
        assert hp / lp == pytest.approx(16.0, abs=1e-12)

    def test_invalid_alpha(self):
        with pytest.raises(InvalidParameterError):
            energy_split(-0.2)


class TestCsvExport:
    def test_round_trip_rows(self, tmp_path):
        c = build_hierarchical_16qam(2.0)
        path = tmp_path / "points.csv"
        c.write_csv(path)
        lines = path.read_text().strip().splitlines()
        assert lines[0] == "label,re,im"
        assert len(lines) == 17
        label, re, im = lines[1].split(",")
        i = c.labels.index(label)
        assert complex(float(re), float(im)) == pytest.approx(c.points[i])


class TestValidation:
    def test_duplicate_labels_rejected(self):
        c = build_hierarchical_16qam(1.0)
        broken = Constellation(
            kind=c.kind,
            points=c.points,
            labels=("0000",) * 16,
            bits_per_symbol=4,
            alpha=1.0,
        )
        with pytest.raises(InvalidParameterError):
            broken.validate()

    def test_unnormalized_points_rejected(self):
        c = build_hierarchical_16qam(1.0)
        broken = Constellation(
            kind=c.kind,
            points=tuple(2.0 * p for p in c.points),
            labels=c.labels,
            bits_per_symbol=4,
            alpha=1.0,
        )
        with pytest.raises(InvalidParameterError):
            broken.validate()
