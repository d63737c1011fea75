"""
Tests for field representations and norms.

Validates:
- FourierCoeffs storage invariants
- Synthesis/analysis on the uniform grid
- L^2, H^s, L^p and X^{s,b} norms
"""
import logging

import numpy as np
import pytest

from src.models import FourierCoeffs, GridField, SpaceTimeCoeffs
from src.propagator import free_evolution_spacetime
from src.spectrum import (
    analyze,
    difference,
    hs_norm,
    l2_norm,
    lp_spatial_norm,
    synthesize,
    xsb_norm,
)


class TestFourierCoeffs:

    def test_entries_are_sorted(self):
        c = FourierCoeffs.from_entries(3, {(2, 1): 1.0, (-1, 3): 2.0, (0, 0): 3.0})
        assert c.freqs.tolist() == [[-1, 3], [0, 0], [2, 1]]
        assert c.amps.tolist() == [2.0, 3.0, 1.0]

    def test_box_is_half_open(self):
        FourierCoeffs.from_entries(2, {(2, 2): 1.0})
        with pytest.raises(ValueError, match="outside box"):
            FourierCoeffs.from_entries(2, {(-2, 0): 1.0})

    def test_repeated_frequency_rejected(self):
        with pytest.raises(ValueError, match="Repeated"):
            FourierCoeffs(2, [[1, 1], [1, 1]], [1.0, 2.0])

    def test_non_finite_rejected(self):
        with pytest.raises(ValueError, match="finite"):
            FourierCoeffs.from_entries(2, {(0, 0): np.nan})

    def test_arrays_are_read_only(self):
        c = FourierCoeffs.from_entries(2, {(0, 0): 1.0})
        with pytest.raises(ValueError):
            c.amps[0] = 2.0

    def test_dense_round_trip(self, make_field):
        c = make_field(3, seed=4)
        back = FourierCoeffs.from_dense(3, c.to_dense())
        np.testing.assert_array_equal(back.freqs, c.freqs)
        np.testing.assert_array_equal(back.amps, c.amps)

    def test_with_box(self, single_mode):
        c = single_mode((3, -2), N=4)
        assert c.with_box(10).N == 10
        with pytest.raises(ValueError):
            c.with_box(2)

    def test_amplitude_lookup(self, single_mode):
        c = single_mode((1, 2), amplitude=2 - 1j)
        assert c.amplitude((1, 2)) == 2 - 1j
        assert c.amplitude((0, 0)) == 0


class TestTransforms:

    def test_single_mode_samples(self, single_mode):
        grid = synthesize(single_mode((1, 2)), 8)
        j, k = np.meshgrid(np.arange(8), np.arange(8), indexing="ij")
        np.testing.assert_allclose(grid.values, np.exp(2j * np.pi * (j + 2 * k) / 8), atol=1e-14)

    @pytest.mark.parametrize("M", [8, 9, 16])
    def test_analysis_inverts_synthesis(self, make_field, M):
        c = make_field(4, seed=1)
        back = analyze(synthesize(c, M), 4)
        np.testing.assert_allclose(back.to_dense(), c.to_dense(), atol=1e-12)

    def test_grid_too_small(self, make_field):
        with pytest.raises(ValueError, match="Grid too small"):
            synthesize(make_field(4), 7)

    def test_grid_must_be_square(self):
        with pytest.raises(ValueError, match="square"):
            GridField(np.zeros((4, 5)))


class TestNorms:

    def test_parseval(self, make_field):
        c = make_field(4, seed=2, amplitude=0.3)
        grid = synthesize(c, 16)
        assert l2_norm(c) == pytest.approx(np.sqrt(np.mean(np.abs(grid.values) ** 2)), rel=1e-12)
        assert lp_spatial_norm(grid, 2) == pytest.approx(l2_norm(c), rel=1e-12)

    def test_hs_weights(self, single_mode):
        c = single_mode((1, 1), amplitude=2.0)
        assert hs_norm(c, 0.0) == pytest.approx(2.0)
        assert hs_norm(c, 1.0) == pytest.approx(2.0 * np.sqrt(3.0))
        assert hs_norm(c, -1.0) == pytest.approx(2.0 / np.sqrt(3.0))

    def test_l4_of_single_mode(self, single_mode):
        assert lp_spatial_norm(synthesize(single_mode((2, -1), amplitude=2.0), 9), 4) == pytest.approx(2.0)

    def test_l4_exact_above_threshold(self, make_field):
        # |u|^4 has half-width 4B, so M = 4B + 1 and any larger grid agree
        c = make_field(2, seed=3)
        exact = lp_spatial_norm(synthesize(c, 9), 4, band_limit=2)
        assert lp_spatial_norm(synthesize(c, 20), 4) == pytest.approx(exact, rel=1e-12)

    def test_l4_advisory_when_grid_too_small(self, make_field, caplog):
        with caplog.at_level(logging.WARNING, logger="src.spectrum"):
            lp_spatial_norm(synthesize(make_field(4), 8), 4, band_limit=4)
        assert "not exact" in caplog.text

    @pytest.mark.parametrize("p", [3, 0, 2.5])
    def test_only_even_exponents(self, single_mode, p):
        with pytest.raises(ValueError, match="even"):
            lp_spatial_norm(synthesize(single_mode((0, 0)), 8), p)

    def test_xsb_of_free_wave_is_hs(self, make_field):
        c = make_field(3, seed=5)
        u = free_evolution_spacetime(c)
        assert xsb_norm(u, 1.0, 0.5) == pytest.approx(hs_norm(c, 1.0), rel=1e-12)

    def test_xsb_modulation_weight(self):
        u = SpaceTimeCoeffs.from_entries({(1, (0, 0)): 1.0})
        assert xsb_norm(u, 0.0, 0.5) == pytest.approx(np.sqrt(2.0))
        assert xsb_norm(u, 3.0, 1.0) == pytest.approx(2.0)

    def test_difference(self, make_field):
        c = make_field(3, seed=6)
        assert len(difference(c, c)) == 0
        assert l2_norm(difference(c, c.scaled(0.5))) == pytest.approx(0.5 * l2_norm(c))
