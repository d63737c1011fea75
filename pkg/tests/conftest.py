import pytest

from src.ensembles import make_rng, random_field
from src.models import Ensemble, FourierCoeffs


@pytest.fixture
def make_field():
    """Seeded unimodular field on (-N, N]^2, optionally scaled"""
    def _make(N: int, seed: int = 0, amplitude: float = 1.0, ensemble: Ensemble = Ensemble.UNIMODULAR) -> FourierCoeffs:
        return random_field(N, ensemble, make_rng(seed, N)).scaled(amplitude)
    return _make


@pytest.fixture
def single_mode():
    def _make(n, amplitude: complex = 1.0, N: int = 4) -> FourierCoeffs:
        return FourierCoeffs.from_entries(N, {tuple(n): amplitude})
    return _make

