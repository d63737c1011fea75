"""
Seeded random fields.

Every stream is numpy's PCG64 bit generator seeded through
SeedSequence([seed, *stream]), e.g. [seed, N, trial] in sweeps, so a run is
fully determined by its integer seed and the sweep coordinates.
"""
import logging
from typing import Union

import numpy as np

from .models import Ensemble, FourierCoeffs, FreqPoint, PointLike

logger = logging.getLogger(__name__)


def make_rng(seed: int, *stream: int) -> np.random.Generator:
    entropy = [int(seed)] + [int(x) for x in stream]
    if any(x < 0 for x in entropy):
        raise ValueError(f"Seed and stream coordinates must be non-negative, got {entropy}")
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy)))


def box_frequencies(N: int) -> np.ndarray:
    """All n in (-N, N]^2, lexicographic"""
    axis = np.arange(-N + 1, N + 1, dtype=np.int64)
    n1, n2 = np.meshgrid(axis, axis, indexing="ij")
    return np.stack([n1.ravel(), n2.ravel()], axis=1)


def random_field(
    N: int,
    ensemble: Union[Ensemble, str],
    rng: np.random.Generator,
    center: PointLike = (0, 0),
) -> FourierCoeffs:
    """Random coefficients on every frequency of center + (-N, N]^2"""
    ensemble = Ensemble(ensemble)
    freqs = box_frequencies(N) + np.array(tuple(FreqPoint.of(center)), dtype=np.int64)
    size = freqs.shape[0]
    if ensemble is Ensemble.UNIMODULAR:
        amps = np.exp(1j * rng.uniform(0.0, 2.0 * np.pi, size))
    elif ensemble is Ensemble.GAUSSIAN:
        amps = (rng.standard_normal(size) + 1j * rng.standard_normal(size)) / np.sqrt(2.0)
    else:
        raise ValueError("The diagonal ensemble is deterministic; use extremals.make_phi")
    box = int(max(N, freqs.max(), 1 - freqs.min()))
    return FourierCoeffs(box, freqs, amps)
