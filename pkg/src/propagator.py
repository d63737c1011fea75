"""Free hyperbolic/elliptic Schrödinger flows in frequency space, box projectors and recentering"""
import logging
from typing import Union

import numpy as np

from .models import FourierCoeffs, FreqPoint, PointLike, SpaceTimeCoeffs, SymbolKind

logger = logging.getLogger(__name__)

SymbolLike = Union[SymbolKind, str]


def symbol_values(freqs: np.ndarray, symbol: SymbolLike = SymbolKind.HYPERBOLIC) -> np.ndarray:
    """Integer symbol at each frequency: H(n) = n1^2 - n2^2, or |n|^2 for the elliptic control"""
    freqs = np.asarray(freqs, dtype=np.int64).reshape(-1, 2)
    n1, n2 = freqs[:, 0], freqs[:, 1]
    if SymbolKind(symbol) is SymbolKind.HYPERBOLIC:
        return n1 * n1 - n2 * n2
    return n1 * n1 + n2 * n2


def hyperbolic_symbol(n: PointLike) -> int:
    n1, n2 = FreqPoint.of(n)
    return n1 * n1 - n2 * n2


def phase_factor(freqs: np.ndarray, t: float, symbol: SymbolLike = SymbolKind.HYPERBOLIC) -> np.ndarray:
    """e^{-2 pi i symbol(n) t}, with the phase reduced mod 1 so integer times give exactly 1"""
    phase = np.mod(symbol_values(freqs, symbol) * float(t), 1.0)
    return np.exp(-2j * np.pi * phase)


def evolve_linear(coeffs: FourierCoeffs, t: float, symbol: SymbolLike = SymbolKind.HYPERBOLIC) -> FourierCoeffs:
    """Apply the free propagator at time t; the support is unchanged"""
    return coeffs.with_amps(coeffs.amps * phase_factor(coeffs.freqs, t, symbol))


def project_box(coeffs: FourierCoeffs, a: PointLike, N: int) -> FourierCoeffs:
    """Keep only the frequencies in a + (-N, N]^2"""
    if N < 1:
        raise ValueError(f"Projection box half-width must be positive, got N={N}")
    a = np.array(tuple(FreqPoint.of(a)), dtype=np.int64)
    shifted = coeffs.freqs - a
    mask = np.all((shifted > -N) & (shifted <= N), axis=1)
    return FourierCoeffs(coeffs.N, coeffs.freqs[mask], coeffs.amps[mask])


def dual_reflect(m: PointLike) -> FreqPoint:
    """The dual m-bar = (m1, -m2); H(n) = n . n-bar"""
    m = FreqPoint.of(m)
    return FreqPoint(m.n1, -m.n2)


def recentre(coeffs: FourierCoeffs, m: PointLike) -> FourierCoeffs:
    """
    Translate the spectrum by -m: g^(n - m) = f^(n).

    The phase identity x.n + tH(n) = x.m + tH(m) + (x + 2t m-bar).(n - m) + tH(n - m)
    makes space-time Lebesgue norms of the free evolution invariant under this shift.
    """
    shift = np.array(tuple(FreqPoint.of(m)), dtype=np.int64)
    freqs = coeffs.freqs - shift
    needed = 1 if not len(coeffs) else int(max(1, freqs.max(), 1 - freqs.min()))
    return FourierCoeffs(max(coeffs.N, needed), freqs, coeffs.amps)


def free_evolution_spacetime(coeffs: FourierCoeffs, symbol: SymbolLike = SymbolKind.HYPERBOLIC) -> SpaceTimeCoeffs:
    """Space-time coefficients of t -> e^{it box} f on [0, 1]: one time frequency m = -symbol(n) per mode"""
    return SpaceTimeCoeffs(-symbol_values(coeffs.freqs, symbol), coeffs.freqs, coeffs.amps)
