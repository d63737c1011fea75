"""
The first Picard iterate

    A[phi](t) = -i mu int_0^t e^{i(t - t') box} [ |e^{it' box} phi|^2 e^{it' box} phi ] dt'

in closed form for the diagonal family and by Simpson quadrature for general data,
plus the H^s growth experiment.
"""
import logging
from typing import List, Optional, Sequence

import numpy as np
from scipy.integrate import simpson

from .extremals import make_phi
from .lattice import gamma_diag_counts
from .models import (
    DiagonalSpec,
    FourierCoeffs,
    GridField,
    GrowthReport,
    GrowthRow,
    Normalization,
    PicardConfig,
    SymbolKind,
)
from .parallel import chunked_map
from .propagator import evolve_linear
from .regression import fit_loglog
from .spectrum import analyze, hs_norm, synthesize

logger = logging.getLogger(__name__)


def picard_closed_form(N: int, cfg: PicardConfig) -> FourierCoeffs:
    """
    A[phi_N](t) for the mass-normalized diagonal phi_N.

    Every diagonal phase vanishes, so the integrand is constant in time and
    A^((q, q)) = -i mu t N^(-3/2) #Gamma((q, q)) for |q| <= 3N. Stored in box 3N + 1.
    """
    if N < 1:
        raise ValueError(f"N must be positive, got {N}")
    if cfg.t == 0.0 or cfg.mu == 0.0:
        return FourierCoeffs.zeros(3 * N + 1)
    q = np.arange(-3 * N, 3 * N + 1, dtype=np.int64)
    counts = gamma_diag_counts(N, q)
    amps = -1j * cfg.mu * cfg.t * N ** -1.5 * counts.astype(np.float64)
    return FourierCoeffs(3 * N + 1, np.stack([q, q], axis=1), amps)


def picard_quadrature(
    phi: FourierCoeffs,
    cfg: PicardConfig,
    symbol: SymbolKind = SymbolKind.HYPERBOLIC,
    threads: Optional[int] = None,
) -> FourierCoeffs:
    """
    Composite Simpson over 2 * quadrature_steps + 1 nodes in [0, t].

    At each node t' the cubic is formed on a grid of at least 6N + 1 points
    (N the input box), so the product is the exact band-limited cubic on
    (-3N, 3N]^2, then carried to time t by the free flow.
    """
    N = phi.N
    out_box = 3 * N
    M = cfg.grid_size or 6 * N + 1
    if M < 6 * N + 1:
        raise ValueError(f"Grid too small for the cubic: M={M} < 6N+1={6 * N + 1}")
    if cfg.t == 0.0:
        return FourierCoeffs.zeros(out_box)

    nodes = np.linspace(0.0, cfg.t, 2 * cfg.quadrature_steps + 1)

    def integrand(tau: float) -> np.ndarray:
        v = synthesize(evolve_linear(phi, tau, symbol), M).values
        cubic = analyze(GridField(np.abs(v) ** 2 * v), out_box)
        return evolve_linear(cubic, cfg.t - tau, symbol).to_dense(out_box)

    def node_chunk(lo: int, hi: int) -> List[np.ndarray]:
        return [integrand(tau) for tau in nodes[lo:hi]]

    samples = [s for chunk in chunked_map(node_chunk, nodes.size, threads, chunk_size=1) for s in chunk]
    integral = simpson(np.stack(samples), x=nodes, axis=0)
    logger.debug(f"Picard quadrature: N={N}, M={M}, nodes={nodes.size}")
    return FourierCoeffs.from_dense(out_box, -1j * cfg.mu * integral)


def low_frequency_part(coeffs: FourierCoeffs, K: float) -> FourierCoeffs:
    """P_{<=K}: keep the frequencies with max(|n1|, |n2|) <= K"""
    mask = np.max(np.abs(coeffs.freqs), axis=1) <= K
    return FourierCoeffs(coeffs.N, coeffs.freqs[mask], coeffs.amps[mask])


def _threshold_notes(s: float):
    growth = "diverges" if s < 0.5 else "stays bounded"
    half = f"s={s:g}: N^(1+s)/N^(3s) {growth}; boundedness of A in H^s needs s >= 1/2"
    quarter = f"s={s:g} is {'below' if s < 0.25 else 'not below'} 1/4, the range where ill-posedness is claimed"
    return half, quarter


def growth_experiment(N_list: Sequence[int], cfg: PicardConfig) -> GrowthReport:
    """||A[phi_N](t)||_{H^s} against t N^(1+s) and N^(3s), with log-log slopes over N"""
    if cfg.t <= 0.0:
        raise ValueError(f"Growth experiment needs t > 0, got t={cfg.t}")
    s, t = cfg.s, cfg.t
    rows = []
    for N in N_list:
        iterate = picard_closed_form(N, cfg)
        norm = hs_norm(iterate, s)
        rows.append(GrowthRow(
            N=N, s=s, t=t, hs_norm=norm,
            ratio_to_N1plus_s=norm / (t * N ** (1.0 + s)),
            ratio_to_N3s=norm / N ** (3.0 * s),
            projected_hs_norm=hs_norm(low_frequency_part(iterate, N / 4.0), s),
        ))

    slopes, residuals = {}, {}
    if len(rows) >= 2:
        Ns = [r.N for r in rows]
        for column in ("hs_norm", "projected_hs_norm"):
            values = [getattr(r, column) for r in rows]
            if min(values) > 0.0:
                fit = fit_loglog(Ns, values)
                slopes[column], residuals[column] = fit.slope, fit.residual
    logger.info(f"Picard growth s={s}: slopes {slopes}")
    half, quarter = _threshold_notes(s)
    return GrowthReport(rows=rows, slopes=slopes, residuals=residuals,
                        threshold_half=half, threshold_quarter=quarter)


def diagonal_quadrature_check(N: int, cfg: PicardConfig, threads: Optional[int] = None) -> float:
    """Relative l^2 gap between the quadrature and the closed form on mass-normalized phi_N"""
    phi = make_phi(DiagonalSpec(N=N, normalization=Normalization.MASS_NORMALIZED))
    quad = picard_quadrature(phi, cfg.model_copy(update={"grid_size": None}), threads=threads)
    closed = picard_closed_form(N, cfg)
    box = max(quad.N, closed.N)
    gap = np.linalg.norm(quad.to_dense(box) - closed.to_dense(box))
    scale = np.linalg.norm(closed.amps)
    return float(gap / scale) if scale else float(gap)
