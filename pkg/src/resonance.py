"""
Exact space-time norms of free waves by resonance-pair binning.

The product of two free waves is a trigonometric polynomial in (t, x) whose
coefficient at (a, k) collects every pair of input frequencies with output
frequency a and total phase level k. Plancherel on [0, 1] x T^2 turns its L^2
norm into the l^2 norm of the binned sums, so L^4 of one wave and L^2 of a
product of two are computed exactly, with no grid in time or space.

The pair loop is O(S1 * S2); it runs over fixed chunks of the first factor's
support (lexicographic order) and merges chunk bins in chunk order.
"""
import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Union

import numpy as np

from .ensembles import make_rng, random_field
from .lattice import max_A_l
from .models import (
    BilinearReport,
    BilinearRow,
    Ensemble,
    FourierCoeffs,
    GalileanRow,
    ResonanceDecomposition,
    StrichartzReport,
    StrichartzRow,
    SymbolKind,
)
from .parallel import accumulate_bins, chunked_map, merge_bins
from .propagator import evolve_linear, project_box, recentre, symbol_values
from .regression import fit_loglog
from .spectrum import l2_norm, synthesize

logger = logging.getLogger(__name__)

_KEY_LIMIT = 2 ** 62


@dataclass(frozen=True)
class PairBins:
    """Binned pair sums: output frequency a, phase level k, accumulated f1(n) f2(n')"""
    a: np.ndarray
    k: np.ndarray
    sums: np.ndarray

    def sum_of_squares(self) -> float:
        return float(np.sum(np.abs(self.sums) ** 2))


def pair_bins(
    c1: FourierCoeffs,
    c2: FourierCoeffs,
    phase_signs: Sequence[int] = (1, 1),
    conjugate_second: bool = False,
    symbol: SymbolKind = SymbolKind.HYPERBOLIC,
    threads: Optional[int] = None,
    chunk_size: Optional[int] = None,
) -> PairBins:
    """
    Bin all pairs (n, n') by a = n + n' and k = s1 H(n) + s2 H(n').

    With conjugate_second the second factor enters as its complex conjugate:
    frequency -n' and amplitude conj(f2(n')).
    """
    if not len(c1) or not len(c2):
        empty = np.zeros(0, dtype=np.int64)
        return PairBins(np.zeros((0, 2), dtype=np.int64), empty, np.zeros(0, dtype=np.complex128))

    s1, s2 = phase_signs
    f1, w1 = c1.freqs, c1.amps
    f2, w2 = c2.freqs, c2.amps
    h1 = s1 * symbol_values(f1, symbol)
    h2 = s2 * symbol_values(f2, symbol)
    if conjugate_second:
        f2, w2 = -f2, np.conj(w2)

    lo_a = f1.min(axis=0) + f2.min(axis=0)
    span_a = f1.max(axis=0) + f2.max(axis=0) - lo_a + 1
    lo_k = h1.min() + h2.min()
    span_k = h1.max() + h2.max() - lo_k + 1
    if int(span_a[0]) * int(span_a[1]) * int(span_k) >= _KEY_LIMIT:
        raise ValueError("Pair key range exceeds 64 bits")

    def bin_chunk(lo: int, hi: int):
        a1 = f1[lo:hi, 0, None] + f2[None, :, 0] - lo_a[0]
        a2 = f1[lo:hi, 1, None] + f2[None, :, 1] - lo_a[1]
        k = h1[lo:hi, None] + h2[None, :] - lo_k
        keys = (a1 * span_a[1] + a2) * span_k + k
        return accumulate_bins(keys.ravel(), (w1[lo:hi, None] * w2[None, :]).ravel())

    keys, sums = merge_bins(chunked_map(bin_chunk, len(c1), threads, chunk_size))
    k = keys % span_k + lo_k
    rest = keys // span_k
    a = np.stack([rest // span_a[1] + lo_a[0], rest % span_a[1] + lo_a[1]], axis=1)
    return PairBins(a, k, sums)


def l4_spacetime_exact(
    coeffs: FourierCoeffs,
    symbol: SymbolKind = SymbolKind.HYPERBOLIC,
    threads: Optional[int] = None,
) -> float:
    """||e^{it box} f||_{L^4([0,1] x T^2)} = (sum_{a,k} |sum_{H(n)+H(a-n)=k} f(n) f(a-n)|^2)^(1/4)"""
    bins = pair_bins(coeffs, coeffs, symbol=symbol, threads=threads)
    return bins.sum_of_squares() ** 0.25


def l4_spacetime_quadrature(
    coeffs: FourierCoeffs,
    Mx: Optional[int] = None,
    Mt: Optional[int] = None,
    symbol: SymbolKind = SymbolKind.HYPERBOLIC,
) -> float:
    """Brute-force uniform space-time rule; exact once Mx >= 4B + 1 and Mt exceeds the time band of |u|^4"""
    if not len(coeffs):
        return 0.0
    B = int(np.abs(coeffs.freqs).max())
    h = symbol_values(coeffs.freqs, symbol)
    Mx = Mx or max(4 * B + 1, 2 * coeffs.N)
    Mt = Mt or int(2 * (h.max() - h.min()) + 1)
    total = 0.0
    for j in range(Mt):
        values = synthesize(evolve_linear(coeffs, j / Mt, symbol), Mx).values
        total += float(np.mean(np.abs(values) ** 4))
    return (total / Mt) ** 0.25


def bilinear_l2_exact(
    c1: FourierCoeffs,
    c2: FourierCoeffs,
    sign: str = "+",
    symbol: SymbolKind = SymbolKind.HYPERBOLIC,
    threads: Optional[int] = None,
) -> float:
    """||e^{+-it box} phi1 * e^{it box} phi2||_{L^2([0,1] x T^2)}, no conjugation on either factor"""
    if sign not in ("+", "-"):
        raise ValueError(f"sign must be '+' or '-', got {sign!r}")
    s1 = 1 if sign == "+" else -1
    bins = pair_bins(c1, c2, phase_signs=(s1, 1), symbol=symbol, threads=threads)
    return float(np.sqrt(bins.sum_of_squares()))


def bilinear_l2_conjugated(
    c1: FourierCoeffs,
    c2: FourierCoeffs,
    symbol: SymbolKind = SymbolKind.HYPERBOLIC,
    threads: Optional[int] = None,
) -> float:
    """||e^{it box} phi1 * conj(e^{it box} phi2)||_{L^2}; bins by a = n1 - n2, k = H(n1) - H(n2)"""
    bins = pair_bins(c1, c2, phase_signs=(1, -1), conjugate_second=True, symbol=symbol, threads=threads)
    return float(np.sqrt(bins.sum_of_squares()))


def box_tiles(coeffs: FourierCoeffs, N2: int) -> List[np.ndarray]:
    """Centres a in 2*N2*Z^2 of the tiles a + (-N2, N2]^2 that meet the support"""
    tile = np.floor_divide(coeffs.freqs + N2 - 1, 2 * N2)
    return [row * 2 * N2 for row in np.unique(tile, axis=0)]


def orthogonality_defect(
    c1: FourierCoeffs,
    c2: FourierCoeffs,
    N2: int,
    symbol: SymbolKind = SymbolKind.HYPERBOLIC,
    threads: Optional[int] = None,
) -> float:
    """
    ||sum_a e^{it box} P_a c1 * e^{it box} c2||^2 / sum_a ||e^{it box} P_a c1 * e^{it box} c2||^2
    over the disjoint tiling by boxes a + (-N2, N2]^2.
    """
    if N2 < 1:
        raise ValueError(f"Tile half-width must be positive, got N2={N2}")
    whole = bilinear_l2_exact(c1, c2, symbol=symbol, threads=threads) ** 2
    pieces = sum(
        bilinear_l2_exact(project_box(c1, tuple(a), N2), c2, symbol=symbol, threads=threads) ** 2
        for a in box_tiles(c1, N2)
    )
    if pieces == 0.0:
        raise ValueError("Orthogonality defect of a vanishing product is undefined")
    return whole / pieces


def resonance_decomposition(coeffs: FourierCoeffs, threads: Optional[int] = None) -> ResonanceDecomposition:
    """
    Split the pairs (n, a - n) by l = H(2n - a): the resonant level l = 0 and the rest.

    resonant     = (sum_a [sum_{H(2n-a)=0} |f(n)||f(a-n)|]^2)^(1/2)
    off_resonant = sup_{l != 0} #A_l^(1/2) * ||f||_2^2, counted in the box [-2B, 2B]^2
    which holds every difference 2n - a when the support lies in [-B, B]^2.
    """
    exact = l4_spacetime_exact(coeffs, threads=threads) ** 2
    mass = l2_norm(coeffs)
    if not len(coeffs):
        return ResonanceDecomposition(exact=0.0, resonant=0.0, off_resonant=0.0, max_off_resonant_count=0,
                                      resonant_multiplicity=0, resonant_cs_bound=0.0)

    freqs, weights = coeffs.freqs, np.abs(coeffs.amps)
    lo = 2 * freqs.min(axis=0)
    span = 2 * freqs.max(axis=0) - lo + 1

    def resonant_chunk(start: int, stop: int):
        diff = freqs[start:stop, None, :] - freqs[None, :, :]
        resonant = (diff[..., 0] ** 2 - diff[..., 1] ** 2) == 0
        total = freqs[start:stop, None, :] + freqs[None, :, :] - lo
        keys = (total[..., 0] * span[1] + total[..., 1])[resonant]
        values = (weights[start:stop, None] * weights[None, :])[resonant]
        return accumulate_bins(keys, values), accumulate_bins(keys, np.ones(keys.size))

    partials = chunked_map(resonant_chunk, len(coeffs), threads)
    _, sums = merge_bins([p[0] for p in partials])
    _, multiplicity = merge_bins([p[1] for p in partials])

    B = int(np.abs(freqs).max())
    _, max_count = max_A_l(2 * B, (2 * B) ** 2) if B > 0 else (0, 0)
    mult = int(round(multiplicity.real.max())) if multiplicity.size else 0
    return ResonanceDecomposition(
        exact=exact,
        resonant=float(np.sqrt(np.sum(sums.real ** 2))),
        off_resonant=float(np.sqrt(max_count) * mass ** 2),
        max_off_resonant_count=max_count,
        resonant_multiplicity=mult,
        resonant_cs_bound=float(np.sqrt(mult) * mass ** 2),
    )


def _sweep_field(N: int, ensemble: Ensemble, seed: int, trial: int) -> FourierCoeffs:
    from .extremals import make_phi

    if ensemble is Ensemble.DIAGONAL:
        return make_phi(N)
    return random_field(N, ensemble, make_rng(seed, N, trial))


def strichartz_sweep(
    N_list: Sequence[int],
    trials: int,
    seed: int,
    ensemble: Union[Ensemble, str] = Ensemble.UNIMODULAR,
    symbol: SymbolKind = SymbolKind.HYPERBOLIC,
    threads: Optional[int] = None,
) -> StrichartzReport:
    """Max/mean Strichartz ratio of seeded random fields on (-N, N]^2 against the diagonal extremizer"""
    from .extremals import make_phi, strichartz_ratio

    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    ensemble = Ensemble(ensemble)
    rows = []
    for N in N_list:
        ratios = [strichartz_ratio(_sweep_field(N, ensemble, seed, trial), symbol, threads)
                  for trial in range(trials)]
        extremizer = strichartz_ratio(make_phi(N), symbol, threads)
        rows.append(StrichartzRow(N=N, ensemble=ensemble, trials=trials, max_ratio=max(ratios),
                                  mean_ratio=float(np.mean(ratios)), extremizer_ratio=extremizer))
        logger.info(f"Strichartz sweep N={N}: max={max(ratios):.6f}, extremizer={extremizer:.6f}")

    if len(rows) >= 2:
        fit = fit_loglog([r.N for r in rows], [r.max_ratio for r in rows])
        extremizer_fit = fit_loglog([r.N for r in rows], [r.extremizer_ratio for r in rows])
        slope, residual, extremizer_slope = fit.slope, fit.residual, extremizer_fit.slope
    else:
        slope = residual = extremizer_slope = float("nan")
    return StrichartzReport(rows=rows, symbol=symbol, seed=seed, slope=slope, residual=residual,
                            extremizer_slope=extremizer_slope)


def bilinear_sweep(
    N1: int,
    N2_list: Sequence[int],
    trials: int,
    seed: int,
    threads: Optional[int] = None,
) -> BilinearReport:
    """Ratio ||e^{it box}phi1 e^{it box}phi2||_2 / (||phi1|| ||phi2|| N2^(1/2)) over unimodular data"""
    rows = []
    for N2 in N2_list:
        if N2 > N1:
            raise ValueError(f"Dyadic sweep expects N2 <= N1, got N2={N2} > N1={N1}")
        for trial in range(trials):
            c1 = random_field(N1, Ensemble.UNIMODULAR, make_rng(seed, N1, N2, trial, 1))
            c2 = random_field(N2, Ensemble.UNIMODULAR, make_rng(seed, N1, N2, trial, 2))
            value = bilinear_l2_exact(c1, c2, threads=threads)
            ratio = value / (l2_norm(c1) * l2_norm(c2) * np.sqrt(N2))
            rows.append(BilinearRow(N1=N1, N2=N2, trial=trial, bilinear=value, ratio=ratio))
        logger.info(f"Bilinear sweep N1={N1}, N2={N2}: {trials} trials done")

    by_N2 = {N2: max(r.ratio for r in rows if r.N2 == N2) for N2 in N2_list}
    return BilinearReport(rows=rows, seed=seed, max_ratio=max(by_N2.values()) if by_N2 else 0.0,
                          max_ratio_by_N2=by_N2)


def galilean_check(
    N: int,
    pairs: int,
    seed: int,
    shift_range: int = 64,
    threads: Optional[int] = None,
) -> List[GalileanRow]:
    """Exact L^4 of random f on m + (-N, N]^2 against its recentred copy, for random shifts m"""
    rows = []
    for pair in range(pairs):
        rng = make_rng(seed, N, pair)
        m = rng.integers(-shift_range, shift_range + 1, size=2)
        f = random_field(N, Ensemble.UNIMODULAR, rng, center=(int(m[0]), int(m[1])))
        original = l4_spacetime_exact(f, threads=threads)
        shifted = l4_spacetime_exact(recentre(f, (int(m[0]), int(m[1]))), threads=threads)
        rows.append(GalileanRow(pair=pair, m1=int(m[0]), m2=int(m[1]), l4_original=original,
                                l4_recentred=shifted,
                                relative_difference=abs(original - shifted) / original))
    return rows
