"""
Tests for exact space-time norms by pair binning.

Validates:
- L^4 and bilinear L^2 against brute-force space-time quadrature
- Bitwise independence of the thread count
- Orthogonality over box tilings, resonance decomposition and Galilean invariance
"""
import numpy as np
import pytest

from src.extremals import make_phi
from src.models import Ensemble, SymbolKind
from src.propagator import evolve_linear, project_box
from src.resonance import (
    bilinear_l2_conjugated,
    bilinear_l2_exact,
    bilinear_sweep,
    box_tiles,
    galilean_check,
    l4_spacetime_exact,
    l4_spacetime_quadrature,
    orthogonality_defect,
    pair_bins,
    resonance_decomposition,
    strichartz_sweep,
)
from src.spectrum import l2_norm, synthesize


def _bilinear_quadrature(c1, c2, t_sign=1, conjugate=False, Mx=16, Mt=61):
    total = 0.0
    for j in range(Mt):
        t = j / Mt
        u1 = synthesize(evolve_linear(c1, t_sign * t), Mx).values
        u2 = synthesize(evolve_linear(c2, t), Mx).values
        product = u1 * (np.conj(u2) if conjugate else u2)
        total += float(np.mean(np.abs(product) ** 2))
    return np.sqrt(total / Mt)


class TestPairBins:

    def test_single_pair(self, single_mode):
        bins = pair_bins(single_mode((1, 2), amplitude=2.0), single_mode((0, 3), amplitude=1j))
        assert bins.a.tolist() == [[1, 5]]
        assert bins.k.tolist() == [(1 - 4) + (0 - 9)]
        assert bins.sums.tolist() == [2j]

    def test_conjugate_second(self, single_mode):
        bins = pair_bins(single_mode((1, 2)), single_mode((0, 3), amplitude=1j),
                         phase_signs=(1, -1), conjugate_second=True)
        assert bins.a.tolist() == [[1, -1]]
        assert bins.k.tolist() == [(1 - 4) - (0 - 9)]
        assert bins.sums.tolist() == [-1j]

    def test_thread_count_is_invisible(self, make_field):
        c = make_field(6, seed=11)
        serial = pair_bins(c, c, threads=1, chunk_size=7)
        threaded = pair_bins(c, c, threads=4, chunk_size=7)
        np.testing.assert_array_equal(serial.a, threaded.a)
        np.testing.assert_array_equal(serial.k, threaded.k)
        np.testing.assert_array_equal(serial.sums, threaded.sums)

    def test_exact_norm_bitwise_across_threads(self, make_field):
        c = make_field(10, seed=12, ensemble=Ensemble.GAUSSIAN)
        assert l4_spacetime_exact(c, threads=1) == l4_spacetime_exact(c, threads=3)

    def test_empty_factor(self, single_mode):
        from src.models import FourierCoeffs

        bins = pair_bins(FourierCoeffs.zeros(2), single_mode((0, 0)))
        assert bins.sum_of_squares() == 0.0


class TestL4:

    def test_single_mode(self, single_mode):
        assert l4_spacetime_exact(single_mode((2, 1), amplitude=3.0)) == pytest.approx(3.0)

    @pytest.mark.parametrize("N, seed", [(1, 0), (2, 1), (3, 2)])
    def test_exact_matches_quadrature(self, make_field, N, seed):
        c = make_field(N, seed=seed)
        assert l4_spacetime_exact(c) == pytest.approx(l4_spacetime_quadrature(c), rel=1e-10)

    @pytest.mark.slow
    def test_exact_matches_fine_quadrature_at_N8(self, make_field):
        N = 8
        for seed in range(20):
            c = make_field(N, seed=seed)
            quadrature = l4_spacetime_quadrature(c, Mx=4 * N + 1, Mt=8 * N * N + 1)
            assert l4_spacetime_exact(c) == pytest.approx(quadrature, rel=1e-9), f"seed={seed}"

    def test_elliptic_matches_quadrature(self, make_field):
        c = make_field(2, seed=3, ensemble=Ensemble.GAUSSIAN)
        exact = l4_spacetime_exact(c, SymbolKind.ELLIPTIC)
        assert exact == pytest.approx(l4_spacetime_quadrature(c, symbol=SymbolKind.ELLIPTIC), rel=1e-10)

    def test_diagonal_matches_quadrature(self):
        phi = make_phi(2)
        assert l4_spacetime_exact(phi) == pytest.approx(l4_spacetime_quadrature(phi), rel=1e-10)

    def test_invariant_under_free_evolution(self, make_field):
        c = make_field(4, seed=5)
        assert l4_spacetime_exact(evolve_linear(c, 0.31)) == pytest.approx(l4_spacetime_exact(c), rel=1e-12)


class TestBilinear:

    def test_sign_validation(self, single_mode):
        with pytest.raises(ValueError, match="sign"):
            bilinear_l2_exact(single_mode((0, 0)), single_mode((0, 0)), sign="*")

    def test_single_modes(self, single_mode):
        assert bilinear_l2_exact(single_mode((1, 0), 2.0), single_mode((0, 1), 0.5)) == pytest.approx(1.0)

    @pytest.mark.parametrize("sign, t_sign", [("+", 1), ("-", -1)])
    def test_exact_matches_quadrature(self, make_field, sign, t_sign):
        c1 = make_field(3, seed=1)
        c2 = make_field(2, seed=2, ensemble=Ensemble.GAUSSIAN)
        expected = _bilinear_quadrature(c1, c2, t_sign=t_sign)
        assert bilinear_l2_exact(c1, c2, sign=sign) == pytest.approx(expected, rel=1e-10)

    def test_conjugated_matches_quadrature(self, make_field):
        c1 = make_field(3, seed=3)
        c2 = make_field(2, seed=4)
        expected = _bilinear_quadrature(c1, c2, conjugate=True)
        assert bilinear_l2_conjugated(c1, c2) == pytest.approx(expected, rel=1e-10)

    def test_conjugated_square_is_l4(self, make_field):
        c = make_field(3, seed=5)
        assert bilinear_l2_conjugated(c, c) == pytest.approx(l4_spacetime_exact(c) ** 2, rel=1e-12)


class TestOrthogonality:

    def test_tiles_cover_support(self, make_field):
        tiles = box_tiles(make_field(4, seed=1), 2)
        assert len(tiles) == 9
        assert all(abs(x) in (0, 4) for tile in tiles for x in tile)

    def test_single_tile(self, make_field):
        c1 = make_field(2, seed=1)
        c2 = make_field(2, seed=2)
        assert orthogonality_defect(c1, c2, 2) == pytest.approx(1.0)

    def test_tile_pieces_add_up(self, make_field):
        c1 = make_field(6, seed=3)
        pieces = [project_box(c1, tuple(a), 3) for a in box_tiles(c1, 3)]
        assert sum(l2_norm(p) ** 2 for p in pieces) == pytest.approx(l2_norm(c1) ** 2)

    @pytest.mark.parametrize("N1, N2, seed", [(8, 2, 0), (8, 4, 1), (12, 3, 2)])
    def test_defect_is_bounded(self, make_field, N1, N2, seed):
        defect = orthogonality_defect(make_field(N1, seed=seed), make_field(N2, seed=seed + 100), N2)
        assert 0.0 < defect < 4.0

    def test_invalid_half_width(self, make_field):
        with pytest.raises(ValueError, match="positive"):
            orthogonality_defect(make_field(2), make_field(1), 0)


class TestResonanceDecomposition:

    @pytest.mark.parametrize("N, seed", [(2, 0), (4, 1), (6, 2)])
    def test_bound_holds(self, make_field, N, seed):
        c = make_field(N, seed=seed)
        split = resonance_decomposition(c)
        assert split.exact == pytest.approx(l4_spacetime_exact(c) ** 2)
        assert split.exact <= split.bound * (1 + 1e-12)
        assert split.resonant <= split.resonant_cs_bound * (1 + 1e-12)

    def test_diagonal_is_resonant(self):
        # every pair on the diagonal has 2n - a on the diagonal, where H vanishes
        split = resonance_decomposition(make_phi(4))
        assert split.resonant == pytest.approx(split.exact, rel=1e-12)

    def test_single_mode(self, single_mode):
        split = resonance_decomposition(single_mode((1, 1), amplitude=2.0))
        assert split.resonant_multiplicity == 1
        assert split.resonant == pytest.approx(4.0)

    def test_threads(self, make_field):
        c = make_field(5, seed=9)
        assert resonance_decomposition(c, threads=1) == resonance_decomposition(c, threads=4)


class TestSweeps:

    def test_strichartz_sweep_rows(self):
        report = strichartz_sweep([2, 4, 8], trials=3, seed=7)
        assert [row.N for row in report.rows] == [2, 4, 8]
        for row in report.rows:
            assert row.mean_ratio <= row.max_ratio <= row.extremizer_ratio
        assert report.slope < report.extremizer_slope

    def test_strichartz_sweep_is_reproducible(self):
        first = strichartz_sweep([3, 5], trials=2, seed=1, threads=1)
        again = strichartz_sweep([3, 5], trials=2, seed=1, threads=4)
        assert first.rows == again.rows

    def test_single_N_has_no_slope(self):
        report = strichartz_sweep([4], trials=1, seed=0)
        assert np.isnan(report.slope)

    def test_diagonal_sweep_slope(self):
        report = strichartz_sweep([8, 16, 32, 64], trials=1, seed=0, ensemble="diagonal")
        assert report.slope == pytest.approx(0.25, abs=0.02)

    def test_trials_positive(self):
        with pytest.raises(ValueError, match="trials"):
            strichartz_sweep([2], trials=0, seed=0)

    def test_bilinear_sweep(self):
        report = bilinear_sweep(8, [1, 2, 4], trials=2, seed=3)
        assert len(report.rows) == 6
        assert set(report.max_ratio_by_N2) == {1, 2, 4}
        assert 0.0 < report.max_ratio < 2.0

    def test_bilinear_sweep_orders_scales(self):
        with pytest.raises(ValueError, match="N2 <= N1"):
            bilinear_sweep(2, [4], trials=1, seed=0)


class TestGalilean:

    def test_recentring_preserves_l4(self):
        rows = galilean_check(4, pairs=3, seed=5, shift_range=20)
        assert len(rows) == 3
        for row in rows:
            assert abs(row.m1) <= 20 and abs(row.m2) <= 20
            assert row.relative_difference < 1e-12

    def test_ten_pairs_at_N8(self):
        rows = galilean_check(8, pairs=10, seed=11)
        assert len(rows) == 10
        assert max(row.relative_difference for row in rows) < 1e-10
