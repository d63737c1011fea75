import numpy as np
import pytest

from src.extremals import make_phi
from src.lattice import gamma_diag_counts
from src.models import DiagonalSpec, FourierCoeffs, Normalization, PicardConfig
from src.picard import (
    diagonal_quadrature_check,
    growth_experiment,
    low_frequency_part,
    picard_closed_form,
    picard_quadrature,
)
from src.spectrum import l2_norm


class TestClosedForm:

    def test_N1_norm(self):
        iterate = picard_closed_form(1, PicardConfig(t=1.0, mu=1.0))
        assert iterate.N == 4
        assert l2_norm(iterate) == pytest.approx(np.sqrt(141.0))

    def test_amplitudes(self):
        N, t, mu = 5, 0.3, -2.0
        iterate = picard_closed_form(N, PicardConfig(t=t, mu=mu))
        q = np.arange(-3 * N, 3 * N + 1)
        assert iterate.freqs.tolist() == [[k, k] for k in q]
        expected = -1j * mu * t * N ** -1.5 * gamma_diag_counts(N, q)
        np.testing.assert_allclose(iterate.amps, expected, rtol=1e-15)

    def test_linear_in_t_and_mu(self):
        base = picard_closed_form(3, PicardConfig(t=0.5, mu=1.0))
        scaled = picard_closed_form(3, PicardConfig(t=1.5, mu=-2.0))
        np.testing.assert_allclose(scaled.amps, -6.0 * base.amps)

    @pytest.mark.parametrize("cfg", [PicardConfig(t=0.0), PicardConfig(mu=0.0)])
    def test_vanishing(self, cfg):
        assert len(picard_closed_form(4, cfg)) == 0

    def test_N_positive(self):
        with pytest.raises(ValueError):
            picard_closed_form(0, PicardConfig())


class TestQuadrature:

    @pytest.mark.parametrize("N", [1, 2, 4])
    def test_matches_closed_form_on_diagonal(self, N):
        assert diagonal_quadrature_check(N, PicardConfig(t=0.7, quadrature_steps=2)) < 1e-12

    @pytest.mark.parametrize("n, t", [((0, 0), 0.4), ((2, 1), 1.0), ((3, 3), 0.37), ((1, 2), 0.3)])
    def test_single_mode_is_self_resonant(self, single_mode, n, t):
        mu = 1.5
        iterate = picard_quadrature(single_mode(n), PicardConfig(t=t, mu=mu, quadrature_steps=3))
        # the cubic of one unimodular mode is the mode itself, so only the free phase remains
        h = n[0] ** 2 - n[1] ** 2
        expected = -1j * mu * t * np.exp(-2j * np.pi * h * t)
        assert abs(iterate.amplitude(n) - expected) < 1e-10
        assert l2_norm(iterate) == pytest.approx(abs(mu) * t, rel=1e-10)

    def test_simpson_is_fourth_order(self, make_field):
        phi = make_field(2, seed=8)
        reference = picard_quadrature(phi, PicardConfig(t=0.01, quadrature_steps=256)).to_dense()

        def error(steps):
            approx = picard_quadrature(phi, PicardConfig(t=0.01, quadrature_steps=steps)).to_dense(6)
            return np.linalg.norm(approx - reference)

        e4, e8, e16 = error(4), error(8), error(16)
        assert np.log2(e4 / e8) > 3.5
        assert np.log2(e8 / e16) > 3.5

    def test_output_box(self, make_field):
        iterate = picard_quadrature(make_field(3, seed=1), PicardConfig(t=0.1))
        assert iterate.N == 9
        assert iterate.bandwidth() <= 9

    def test_grid_too_small(self, make_field):
        with pytest.raises(ValueError, match="Grid too small"):
            picard_quadrature(make_field(2), PicardConfig(grid_size=12))

    def test_zero_time(self, make_field):
        assert len(picard_quadrature(make_field(2), PicardConfig(t=0.0))) == 0

    def test_small_time_is_linear(self, make_field):
        # A(t) = -i mu t |phi|^2 phi + O(t^2)
        phi = make_field(2, seed=4)
        first = picard_quadrature(phi, PicardConfig(t=1e-4))
        second = picard_quadrature(phi, PicardConfig(t=2e-4))
        assert l2_norm(second) / l2_norm(first) == pytest.approx(2.0, rel=1e-2)

    def test_threads(self, make_field):
        phi = make_field(2, seed=5)
        cfg = PicardConfig(t=0.2, quadrature_steps=4)
        serial = picard_quadrature(phi, cfg, threads=1)
        threaded = picard_quadrature(phi, cfg, threads=4)
        np.testing.assert_array_equal(serial.amps, threaded.amps)


class TestGrowth:

    def test_slope_is_one_plus_s(self):
        report = growth_experiment(list(range(64, 513, 32)), PicardConfig(t=1.0, s=0.5))
        assert report.slopes["hs_norm"] == pytest.approx(1.5, abs=0.03)
        assert "projected_hs_norm" in report.slopes

    @pytest.mark.parametrize("s", [0.0, 0.25, 0.5])
    def test_slope_over_full_range(self, s):
        # dyadic N alone fit about 0.968 at s = 0
        report = growth_experiment(list(range(8, 513)), PicardConfig(t=1.0, s=s))
        assert report.slopes["hs_norm"] == pytest.approx(1.0 + s, abs=0.03)

    def test_ratio_to_n_one_plus_s_is_flat(self):
        report = growth_experiment([128, 256, 512], PicardConfig(t=0.5, s=0.0))
        ratios = [row.ratio_to_N1plus_s for row in report.rows]
        assert max(ratios) / min(ratios) < 1.05

    def test_rows(self):
        report = growth_experiment([4, 8], PicardConfig(t=2.0, s=0.25))
        assert [row.N for row in report.rows] == [4, 8]
        for row in report.rows:
            assert row.projected_hs_norm <= row.hs_norm
            assert row.ratio_to_N3s == pytest.approx(row.hs_norm / row.N ** 0.75)

    @pytest.mark.parametrize("s, diverges, below", [(0.2, True, True), (0.3, True, False), (0.6, False, False)])
    def test_threshold_notes(self, s, diverges, below):
        report = growth_experiment([4], PicardConfig(s=s))
        assert ("diverges" in report.threshold_half) is diverges
        assert ("is below" in report.threshold_quarter) is below
        assert report.slopes == {}

    def test_positive_time(self):
        with pytest.raises(ValueError, match="t > 0"):
            growth_experiment([4], PicardConfig(t=0.0))


def test_low_frequency_part():
    phi = make_phi(DiagonalSpec(N=8, normalization=Normalization.MASS_NORMALIZED))
    low = low_frequency_part(phi, 2.5)
    assert low.freqs[:, 0].tolist() == [-2, -1, 0, 1, 2]
    assert len(low_frequency_part(FourierCoeffs.zeros(3), 1)) == 0
