"""The diagonal family phi_N that saturates the N^(1/4) loss of the L^4 Strichartz estimate"""
import logging
from typing import Optional, Union

import numpy as np

from .models import DiagonalSpec, FourierCoeffs, Normalization, SymbolKind
from .resonance import l4_spacetime_exact
from .spectrum import l2_norm

logger = logging.getLogger(__name__)


def make_phi(spec: Union[DiagonalSpec, int]) -> FourierCoeffs:
    """
    phi_N = sum_{|k| <= N} e^{2 pi i k(x1 + x2)}, optionally scaled by N^(-1/2).

    The diagonal reaches (-N, -N), outside (-N, N]^2, so the box half-width is N + 1.
    """
    if isinstance(spec, int):
        spec = DiagonalSpec(N=spec)
    N = spec.N
    k = np.arange(-N, N + 1, dtype=np.int64)
    amplitude = 1.0
    if spec.normalization is Normalization.MASS_NORMALIZED:
        if N == 0:
            raise ValueError("The N^(-1/2) normalization needs N >= 1")
        amplitude = N ** -0.5
    return FourierCoeffs(N + 1, np.stack([k, k], axis=1), np.full(k.size, amplitude, dtype=np.complex128))


def phi_l4_exact_sum(N: int) -> int:
    """||phi_N||_4^4 = sum_{|j| <= 2N} (2N + 1 - |j|)^2 = (2N + 1)(8N^2 + 8N + 3)/3"""
    if N < 0:
        raise ValueError(f"N must be non-negative, got {N}")
    return (2 * N + 1) * (8 * N * N + 8 * N + 3) // 3


def phi_l4_closed_form(N: int) -> float:
    return float(phi_l4_exact_sum(N)) ** 0.25


def strichartz_ratio(
    coeffs: FourierCoeffs,
    symbol: SymbolKind = SymbolKind.HYPERBOLIC,
    threads: Optional[int] = None,
) -> float:
    """||e^{it box} f||_{L^4([0,1] x T^2)} / ||f||_{L^2}"""
    mass = l2_norm(coeffs)
    if mass == 0.0:
        raise ValueError("Strichartz ratio of the zero field is undefined")
    return l4_spacetime_exact(coeffs, symbol=symbol, threads=threads) / mass


def extremizer_ratio_closed_form(N: int) -> float:
    return phi_l4_closed_form(N) / np.sqrt(2 * N + 1)
