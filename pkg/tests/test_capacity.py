"""Tests for stream capacities, their inverses and the integration back ends."""

import math

import numpy as np
import pytest

from hmplan.capacity import (
    GAUSS_HERMITE,
    MONTE_CARLO,
    IntegrationSpec,
    StreamSelector,
    inverse_capacity,
    normalized_capacity,
    stream_capacity,
)
from hmplan.constellation import build_hierarchical_16qam, energy_split
from hmplan.errors import CapacityRangeError, ConfigurationError, InvalidParameterError

S = StreamSelector
ALPHA_GRID = [0.5, 0.8, 1.0, 2.0, 4.0]


class TestKnownValues:
    def test_qpsk_high_snr_saturates(self, qpsk):
        assert stream_capacity(qpsk, S.FULL, 30.0) == pytest.approx(2.0, abs=1e-3)

    def test_qpsk_reference_operating_point(self, qpsk):
        """QPSK at -3.9 dB carries 0.4908 bits (normalized 0.2454)."""
        assert stream_capacity(qpsk, S.FULL, -3.9) == pytest.approx(0.4908, abs=0.01)
        assert normalized_capacity(qpsk, S.FULL, -3.9) == pytest.approx(0.2454, abs=0.005)

    def test_hp_operating_point_alpha1(self, hier_alpha1):
        assert normalized_capacity(hier_alpha1, S.HP, -2.46) == pytest.approx(0.2454, abs=0.005)

    def test_vanishing_snr(self, qpsk, hier_alpha1):
        assert normalized_capacity(qpsk, S.FULL, -60.0) == pytest.approx(0.0, abs=1e-3)
        assert normalized_capacity(hier_alpha1, S.LP_BLIND, -60.0) == pytest.approx(0.0, abs=1e-3)

    def test_full_16qam_saturates_at_4_bits(self, qam16):
        assert stream_capacity(qam16, S.FULL, 35.0) == pytest.approx(4.0, abs=1e-3)


class TestChainRule:
    def test_exact_on_alpha1_grid(self, hier_alpha1):
        """FULL - HP - LP vanishes to quadrature accuracy (LP is the conditional term)."""
        for snr in np.arange(-10.0, 21.0, 2.5):
            full = stream_capacity(hier_alpha1, S.FULL, snr)
            hp = stream_capacity(hier_alpha1, S.HP, snr)
            lp = stream_capacity(hier_alpha1, S.LP, snr)
            assert full - hp - lp == pytest.approx(0.0, abs=1e-9)

    def test_conditional_lp_equals_scaled_qpsk(self, qpsk):
        """Known-quadrant LP is exactly a QPSK at the LP component's energy share."""
        for alpha in ALPHA_GRID:
            c = build_hierarchical_16qam(alpha)
            _, lp_fraction = energy_split(alpha)
            shift_db = 10.0 * math.log10(lp_fraction)
            for snr in (0.0, 6.0, 12.0):
                direct = stream_capacity(c, S.LP, snr)
                scaled = stream_capacity(qpsk, S.FULL, snr + shift_db)
                assert direct == pytest.approx(scaled, abs=1e-9)

    def test_blind_lp_never_exceeds_conditional(self):
        for alpha in (0.5, 1.0, 4.0):
            c = build_hierarchical_16qam(alpha)
            for snr in (-2.0, 4.0, 10.0):
                blind = stream_capacity(c, S.LP_BLIND, snr)
                known = stream_capacity(c, S.LP, snr)
                assert blind <= known + 1e-9


def _axis_blind_lp_reference(c, es_n0_db, n_nodes=8000):
    """Independent 1-D oracle: the blind LP capacity factorizes per axis.

    The low-priority bit of one axis sees a 4-level PAM whose sign is
    unknown; I(bit; y) is integrated on a dense trapezoidal grid.
    """
    arr = c.point_array()
    levels = np.unique(np.round(arr.real, 12))
    inner, outer = sorted(np.abs(levels))[0], sorted(np.abs(levels))[2]
    n0 = 10.0 ** (-es_n0_db / 10.0)
    sigma = math.sqrt(n0 / 2.0)
    y = np.linspace(-outer - 8 * sigma, outer + 8 * sigma, n_nodes)

    def mixture(centers):
        return np.mean(
            [np.exp(-((y - c0) ** 2) / (2 * sigma**2)) / (sigma * math.sqrt(2 * math.pi)) for c0 in centers],
            axis=0,
        )

    p_inner = mixture([-inner, inner])
    p_outer = mixture([-outer, outer])
    p_y = 0.5 * (p_inner + p_outer)
    integrand = 0.5 * (
        np.where(p_inner > 0, p_inner * np.log2(np.maximum(p_inner, 1e-300) / p_y), 0.0)
        + np.where(p_outer > 0, p_outer * np.log2(np.maximum(p_outer, 1e-300) / p_y), 0.0)
    )
    return 2.0 * np.trapezoid(integrand, y)


class TestBlindLpOracle:
    @pytest.mark.parametrize("alpha", [0.5, 1.0, 2.0])
    @pytest.mark.parametrize("snr", [0.0, 3.72, 9.0])
    def test_blind_lp_matches_per_axis_integration(self, alpha, snr):
        """2-D mixture integration agrees with the per-axis factorization.

        The tolerance is the default rule's quadrature residue (~2e-5 bits,
        about 1e-4 dB at threshold slopes).
        """
        c = build_hierarchical_16qam(alpha)
        got = stream_capacity(c, S.LP_BLIND, snr)
        want = _axis_blind_lp_reference(c, snr)
        assert got == pytest.approx(want, abs=5e-5)


class TestOrderingInAlpha:
    @pytest.mark.parametrize("snr", [-2.0, 4.0, 10.0])
    def test_hp_easier_lp_harder_as_alpha_grows(self, snr):
        """At fixed SNR, HP capacity rises with alpha while LP capacity falls."""
        hp = [stream_capacity(build_hierarchical_16qam(a), S.HP, snr) for a in ALPHA_GRID]
        lp = [stream_capacity(build_hierarchical_16qam(a), S.LP, snr) for a in ALPHA_GRID]
        lpb = [stream_capacity(build_hierarchical_16qam(a), S.LP_BLIND, snr) for a in ALPHA_GRID]
        assert all(b >= a - 1e-9 for a, b in zip(hp, hp[1:]))
        assert all(b <= a + 1e-9 for a, b in zip(lp, lp[1:]))
        assert all(b <= a + 1e-9 for a, b in zip(lpb, lpb[1:]))


class TestMonotonicity:
    @pytest.mark.parametrize("selector", [S.FULL, S.HP, S.LP, S.LP_BLIND])
    def test_strictly_increasing_in_snr(self, hier_alpha1, selector):
        grid = np.arange(-30.0, 40.5, 0.5)
        values = [normalized_capacity(hier_alpha1, selector, snr) for snr in grid]
        diffs = np.diff(values)
        assert np.all(diffs > -1e-12)
        # strict growth away from the saturated tails
        mid = (np.asarray(values[:-1]) > 1e-6) & (np.asarray(values[:-1]) < 1.0 - 1e-6)
        assert np.all(diffs[mid] > 0)


class TestInverseCapacity:
    def test_qpsk_reference_anchor(self, qpsk):
        assert inverse_capacity(qpsk, S.FULL, 0.2454) == pytest.approx(-3.9, abs=0.1)

    def test_blind_lp_alpha1_anchor(self, hier_alpha1):
        assert inverse_capacity(hier_alpha1, S.LP_BLIND, 0.2454) == pytest.approx(3.72, abs=0.1)

    def test_round_trip(self, hier_alpha1):
        for snr in (-4.0, 2.0, 11.0):
            level = normalized_capacity(hier_alpha1, S.HP, snr)
            assert inverse_capacity(hier_alpha1, S.HP, level) == pytest.approx(snr, abs=0.02)

    def test_unreachable_target(self, qpsk):
        with pytest.raises(CapacityRangeError):
            inverse_capacity(qpsk, S.FULL, 0.999999, hi_db=0.0)

    def test_target_bounds_checked(self, qpsk):
        with pytest.raises(InvalidParameterError):
            inverse_capacity(qpsk, S.FULL, 1.2)


class TestIntegrationSpecs:
    def test_gh_node_floor(self):
        with pytest.raises(ConfigurationError):
            IntegrationSpec(nodes_per_axis=8)

    def test_mc_sample_floor(self):
        with pytest.raises(ConfigurationError):
            IntegrationSpec(method=MONTE_CARLO, sample_count=1000)

    def test_unknown_method(self):
        with pytest.raises(ConfigurationError):
            IntegrationSpec(method="simpson")

    def test_selector_constellation_mismatch(self, qpsk):
        with pytest.raises(InvalidParameterError):
            stream_capacity(qpsk, S.HP, 0.0)

    def test_monte_carlo_deterministic(self, hier_alpha1):
        spec = IntegrationSpec(method=MONTE_CARLO, sample_count=100_000, rng_seed=42)
        a = stream_capacity(hier_alpha1, S.HP, 3.0, spec)
        b = stream_capacity(hier_alpha1, S.HP, 3.0, spec)
        assert a == b

    @pytest.mark.parametrize("selector", [S.FULL, S.HP, S.LP_BLIND])
    def test_methods_agree(self, hier_alpha1, selector):
        """Gauss-Hermite and a 1e6-sample Monte Carlo agree to 3e-3 bits."""
        mc = IntegrationSpec(method=MONTE_CARLO, sample_count=1_000_000, rng_seed=123)
        gh_value = stream_capacity(hier_alpha1, selector, 4.0)
        mc_value = stream_capacity(hier_alpha1, selector, 4.0, mc)
        assert mc_value == pytest.approx(gh_value, abs=3e-3)

    def test_gh_nodes_converged(self, hier_alpha1):
        dense = IntegrationSpec(nodes_per_axis=64)
        for snr in (-3.9, 3.72, 10.0):
            coarse = stream_capacity(hier_alpha1, S.LP_BLIND, snr)
            fine = stream_capacity(hier_alpha1, S.LP_BLIND, snr, dense)
            assert coarse == pytest.approx(fine, abs=1e-7)
