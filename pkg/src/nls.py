"""
Strang split-step solver for the cubic hyperbolic NLS

    i d_t u = 2 pi H(D) u + mu |u|^2 u   on T^2,

i.e. (i d_t + box) u = mu |u|^2 u with the free flow e^{-2 pi i H(n) t} of
propagator.evolve_linear. The state is the full spectrum of the M x M grid.
"""
import logging
import math
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .config import MASS_DRIFT_WARN
from .ensembles import make_rng, random_field
from .models import (
    Dealias,
    Ensemble,
    EvolutionTrace,
    FourierCoeffs,
    GridField,
    LipschitzRow,
    NumericalFailure,
    SolverConfig,
    SymbolKind,
    TraceRecord,
)
from .propagator import evolve_linear, symbol_values
from .spectrum import analyze, difference, hs_norm, l2_norm, lp_spatial_norm, synthesize

logger = logging.getLogger(__name__)


def mass(coeffs: FourierCoeffs) -> float:
    """M(u) = int |u|^2 dx = sum |u^(n)|^2"""
    return float(np.sum(np.abs(coeffs.amps) ** 2))


def _quartic(coeffs: FourierCoeffs, grid_size: Optional[int] = None) -> float:
    """||u||_4^4; exact on the default grid 4B + 1"""
    M = grid_size or max(4 * coeffs.bandwidth() + 1, 2 * coeffs.N)
    return lp_spatial_norm(synthesize(coeffs, M), 4) ** 4


def hyperbolic_energy(
    coeffs: FourierCoeffs,
    mu: float,
    symbol: SymbolKind = SymbolKind.HYPERBOLIC,
    grid_size: Optional[int] = None,
) -> float:
    """
    E(u) = pi sum H(n)|u^(n)|^2 + (mu/4) ||u||_4^4, conserved by the flow above.

    Indefinite: H vanishes on the diagonals and is negative when |n2| > |n1|.
    The derivative form with the 2 pi^2 factor is `gradient_energy`.
    `grid_size` selects the quadrature grid of the quartic term.
    """
    kinetic = np.pi * np.sum(symbol_values(coeffs.freqs, symbol) * np.abs(coeffs.amps) ** 2)
    return float(kinetic + 0.25 * mu * _quartic(coeffs, grid_size))


def gradient_energy(coeffs: FourierCoeffs, mu: float, symbol: SymbolKind = SymbolKind.HYPERBOLIC) -> float:
    """int (1/2)(|d1 u|^2 - |d2 u|^2) + (mu/4)|u|^4 dx = 2 pi^2 sum H(n)|u^(n)|^2 + (mu/4)||u||_4^4"""
    kinetic = 2.0 * np.pi ** 2 * np.sum(symbol_values(coeffs.freqs, symbol) * np.abs(coeffs.amps) ** 2)
    return float(kinetic + 0.25 * mu * _quartic(coeffs))


def _nonlinear_grid(cfg: SolverConfig) -> int:
    if cfg.dealias is Dealias.NONE:
        return cfg.M
    padded = int(math.ceil(cfg.padding * cfg.M))
    return padded + padded % 2


def _nonlinear_substep(state: FourierCoeffs, h: float, cfg: SolverConfig, t: float) -> Tuple[FourierCoeffs, float]:
    """u <- u exp(-i mu |u|^2 h) pointwise; |u| is invariant so the rotation is exact"""
    values = synthesize(state, _nonlinear_grid(cfg)).values
    rotated = values * np.exp(-1j * cfg.mu * np.abs(values) ** 2 * h)
    if not np.all(np.isfinite(rotated)):
        raise NumericalFailure("Non-finite values in the nonlinear substep", t=t)
    updated = analyze(GridField(rotated), cfg.box)
    truncated = mass(state) - mass(updated) if cfg.dealias is Dealias.PADDED else 0.0
    return updated, truncated


def _strang(state: FourierCoeffs, dt: float, cfg: SolverConfig, t: float = 0.0) -> Tuple[FourierCoeffs, float]:
    if cfg.mu == 0.0:
        return evolve_linear(state, dt, cfg.symbol), 0.0
    state, lost_first = _nonlinear_substep(state, dt / 2, cfg, t)
    state = evolve_linear(state, dt, cfg.symbol)
    state, lost_second = _nonlinear_substep(state, dt / 2, cfg, t + dt)
    return state, lost_first + lost_second


def step_strang(state: FourierCoeffs, dt: float, cfg: SolverConfig) -> FourierCoeffs:
    """Half nonlinear step, full linear step, half nonlinear step; dt may be negative"""
    state, _ = _strang(state.with_box(cfg.box), dt, cfg)
    return state


def _record(state: FourierCoeffs, t: float, cfg: SolverConfig, truncated: float) -> TraceRecord:
    grid = _nonlinear_grid(cfg)
    return TraceRecord(
        t=t,
        mass=mass(state),
        energy=hyperbolic_energy(state, cfg.mu, cfg.symbol, grid_size=grid),
        l2=l2_norm(state),
        hs=hs_norm(state, cfg.s),
        l4=lp_spatial_norm(synthesize(state, 4 * cfg.box + 1), 4),
        truncated_mass=truncated,
    )


def evolve(u0: FourierCoeffs, cfg: SolverConfig) -> Tuple[FourierCoeffs, EvolutionTrace]:
    """
    Step to T_end with fixed dt; diagnostics at t = 0, every record_every steps and at T_end.

    The trace energy evaluates the quartic on the grid the nonlinearity uses, the
    quantity the semi-discrete scheme conserves.
    """
    n_steps = cfg.n_steps
    if abs(n_steps * cfg.dt - cfg.T_end) > 1e-9 * max(1.0, cfg.T_end):
        raise ValueError(f"T_end={cfg.T_end} is not a multiple of dt={cfg.dt}")
    if u0.bandwidth() > cfg.box:
        raise ValueError(f"Initial bandwidth {u0.bandwidth()} needs M >= {2 * u0.bandwidth()}, got M={cfg.M}")

    state = u0.with_box(cfg.box)
    truncated = 0.0
    records = [_record(state, 0.0, cfg, truncated)]
    logger.info(f"Evolving: M={cfg.M}, dt={cfg.dt}, steps={n_steps}, mu={cfg.mu}, dealias={cfg.dealias.value}")

    for step in range(1, n_steps + 1):
        state, lost = _strang(state, cfg.dt, cfg, t=(step - 1) * cfg.dt)
        truncated += lost
        if step % cfg.record_every == 0 or step == n_steps:
            records.append(_record(state, step * cfg.dt, cfg, truncated))
            logger.debug(f"step {step}/{n_steps}: mass={records[-1].mass:.15g}")

    trace = EvolutionTrace(records=records, s=cfg.s)
    initial = records[0].mass
    if initial > 0.0:
        drift = abs(records[-1].mass + truncated - initial) / initial
        if drift > MASS_DRIFT_WARN:
            logger.warning(f"Relative mass drift {drift:.3e} exceeds {MASS_DRIFT_WARN:.0e}")
    return state, trace


def lipschitz_probe(
    N: int,
    cfg: SolverConfig,
    deltas: Sequence[float] = (1e-2, 1e-3),
    epsilon: float = 1e-2,
    s: float = 0.75,
    seed: int = 0,
) -> List[LipschitzRow]:
    """Paired runs from delta*w and delta*(w + epsilon*v), w and v of unit H^s norm on (-N, N]^2"""
    w = random_field(N, Ensemble.UNIMODULAR, make_rng(seed, N, 0))
    v = random_field(N, Ensemble.UNIMODULAR, make_rng(seed, N, 1))
    w, v = w.scaled(1.0 / hs_norm(w, s)), v.scaled(1.0 / hs_norm(v, s))
    rows = []
    for delta in deltas:
        u0 = w.scaled(delta)
        u0_perturbed = u0.with_amps(delta * (w.amps + epsilon * v.amps))
        final, _ = evolve(u0, cfg)
        final_perturbed, _ = evolve(u0_perturbed, cfg)
        before = hs_norm(difference(u0, u0_perturbed), s)
        after = hs_norm(difference(final, final_perturbed), s)
        rows.append(LipschitzRow(delta=delta, epsilon=epsilon, initial_distance=before,
                                 final_distance=after, ratio=after / before))
        logger.info(f"Lipschitz probe delta={delta:g}: ratio={after / before:.6f}")
    return rows
