"""
Field representations on T^2 and the norms used throughout the laboratory.

Convention: f^(n) = int_{T^2} f(x) e^{-2 pi i x.n} dx with n in Z^2 and a torus of
side 1, so a band-limited field is sum_n f^(n) e^{2 pi i n.x}.
"""
import logging
from typing import Optional

import numpy as np

from .models import FourierCoeffs, GridField, SpaceTimeCoeffs
from .propagator import symbol_values

logger = logging.getLogger(__name__)


def _box_indices(N: int, M: int) -> np.ndarray:
    """FFT indices of the frequencies -N+1, ..., N on an M-point grid"""
    return np.arange(-N + 1, N + 1) % M


def synthesize(coeffs: FourierCoeffs, M: int) -> GridField:
    """Evaluate sum_n f^(n) e^{2 pi i n.x} at x = (j/M, k/M)"""
    if M < 2 * coeffs.N:
        raise ValueError(f"Grid too small: M={M} < 2N={2 * coeffs.N} would alias the box")
    spectrum = np.zeros((M, M), dtype=np.complex128)
    spectrum[coeffs.freqs[:, 0] % M, coeffs.freqs[:, 1] % M] = coeffs.amps
    return GridField(np.fft.ifft2(spectrum, norm="forward"))


def analyze(grid: GridField, N: int) -> FourierCoeffs:
    """Discrete Fourier coefficients for n in (-N, N]^2; inverse of synthesize on band-limited fields"""
    M = grid.M
    if M < 2 * N:
        raise ValueError(f"Grid too small: M={M} < 2N={2 * N}")
    spectrum = np.fft.fft2(grid.values, norm="forward")
    idx = _box_indices(N, M)
    return FourierCoeffs.from_dense(N, spectrum[np.ix_(idx, idx)])


def l2_norm(coeffs: FourierCoeffs) -> float:
    return float(np.sqrt(np.sum(np.abs(coeffs.amps) ** 2)))


def sobolev_weights(freqs: np.ndarray, s: float) -> np.ndarray:
    """(1 + |n|^2)^s, the squared H^s weight"""
    freqs = np.asarray(freqs, dtype=np.float64).reshape(-1, 2)
    return (1.0 + np.sum(freqs ** 2, axis=1)) ** s


def hs_norm(coeffs: FourierCoeffs, s: float) -> float:
    """(sum_n (1 + |n|^2)^s |f^(n)|^2)^(1/2); s = 0 is the L^2 norm"""
    return float(np.sqrt(np.sum(sobolev_weights(coeffs.freqs, s) * np.abs(coeffs.amps) ** 2)))


def lp_spatial_norm(grid: GridField, p: int, band_limit: Optional[int] = None) -> float:
    """
    Uniform-rule L^p(T^2) norm for even p.

    Exact for trigonometric polynomials of half-width band_limit once M >= p*band_limit + 1,
    since |u|^p is then a trigonometric polynomial the rule integrates exactly.
    """
    if int(p) != p or p <= 0 or p % 2:
        raise ValueError(f"Only even positive integer exponents are supported, got p={p}")
    p = int(p)
    if band_limit is not None and grid.M < p * band_limit + 1:
        logger.warning(f"L^{p} quadrature not exact: M={grid.M} < {p}*{band_limit}+1")
    return float(np.mean(np.abs(grid.values) ** p) ** (1.0 / p))


def xsb_norm(u: SpaceTimeCoeffs, s: float, b: float) -> float:
    """Bourgain norm with weight (1 + |m + H(n)|)^b (1 + |n|^2)^(s/2)"""
    modulation = (1.0 + np.abs(u.times + symbol_values(u.freqs))) ** (2.0 * b)
    weights = modulation * sobolev_weights(u.freqs, s)
    return float(np.sqrt(np.sum(weights * np.abs(u.amps) ** 2)))


def difference(c1: FourierCoeffs, c2: FourierCoeffs) -> FourierCoeffs:
    """c1 - c2 in the larger of the two boxes"""
    N = max(c1.N, c2.N)
    return FourierCoeffs.from_dense(N, c1.to_dense(N) - c2.to_dense(N))
