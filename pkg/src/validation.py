"""
Validation utilities for experiment inputs and outputs.
Provides input validation for the commands and sanity checks for finished runs.
"""
import logging
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from .config import MASS_DRIFT_WARN, QUADRATURE_RTOL, ROUNDTRIP_RTOL
from .lattice import MAX_BOX
from .models import Dealias, EvolutionTrace, FourierCoeffs, GrowthReport, PicardConfig, SolverConfig

logger = logging.getLogger(__name__)

# Powyżej tych rozmiarów obliczenia trwają minuty, nie sekundy
LARGE_BRUTE_BOX = 4096
LARGE_PAIR_SUPPORT = 1 << 14


def _result(errors: List[str], warnings: List[str]) -> Dict[str, Any]:
    return {"valid": not errors, "errors": errors, "warnings": warnings}


def validate_lattice(N: int, level_bound: int, method: str) -> Dict[str, Any]:
    """
    Waliduj parametry zliczania punktów kratowych A_l.

    Sprawdza:
    - Zakres N (dodatnie, w zakresie 64-bitowym)
    - Zakres poziomów 0 <= |l| <= N^2
    - Koszt metody brute dla dużych pudełek

    Returns:
        Dict z kluczami valid, errors, warnings
    """
    errors: List[str] = []
    warnings: List[str] = []

    if N < 1:
        errors.append(f"N must be positive, got {N}")
    elif N > MAX_BOX:
        errors.append(f"N={N} exceeds the 64-bit level range")
    if level_bound < 0:
        errors.append(f"Level bound must be non-negative, got {level_bound}")
    elif N >= 1 and level_bound > N * N:
        warnings.append(f"Levels beyond N^2={N * N} are empty")

    if method not in ("brute", "divisor", "both"):
        errors.append(f"Unknown counting method {method!r}")
    elif method in ("brute", "both") and N > LARGE_BRUTE_BOX:
        warnings.append(f"Brute-force scan of a {2 * N + 1}^2 box will be slow")
    if method in ("divisor", "both") and level_bound > 100000:
        warnings.append(f"{2 * level_bound + 1} divisor enumerations requested")

    return _result(errors, warnings)


def validate_sweep(N_list: Sequence[int], trials: int, needs_fit: bool = True) -> Dict[str, Any]:
    """Waliduj listę N i liczbę prób dla przeglądów Monte Carlo"""
    errors: List[str] = []
    warnings: List[str] = []

    if not N_list:
        errors.append("N list is empty")
    elif min(N_list) < 1:
        errors.append(f"Every N must be positive, got {min(N_list)}")
    elif len(set(N_list)) != len(N_list):
        errors.append("N list contains repeated values")
    elif needs_fit and len(N_list) < 2:
        warnings.append("A slope fit needs at least two values of N; slope will be NaN")

    if trials < 1:
        errors.append(f"trials must be >= 1, got {trials}")

    if N_list and min(N_list) >= 1 and (2 * max(N_list)) ** 2 > LARGE_PAIR_SUPPORT:
        warnings.append(f"Support size {(2 * max(N_list)) ** 2} makes the O(S^2) pair binning expensive")

    return _result(errors, warnings)


def validate_picard(N_list: Sequence[int], cfg: PicardConfig) -> Dict[str, Any]:
    """Waliduj parametry eksperymentu wzrostu iteraty Picarda"""
    result = validate_sweep(N_list, trials=1)
    if cfg.t <= 0:
        result["errors"].append(f"Growth experiment needs t > 0, got t={cfg.t}")
    if cfg.s < 0:
        result["warnings"].append(f"Negative Sobolev index s={cfg.s}")
    if cfg.mu not in (1.0, -1.0):
        result["warnings"].append(f"mu={cfg.mu} is neither +1 nor -1")
    result["valid"] = not result["errors"]
    return result


def validate_solver_config(cfg: SolverConfig, u0: Optional[FourierCoeffs] = None) -> Dict[str, Any]:
    """
    Waliduj konfigurację solvera split-step.

    Sprawdza:
    - Czy T_end jest wielokrotnością dt
    - Czy siatka mieści pasmo danych początkowych (M >= 2N)
    - Stabilność fazy nieliniowej (mu |u|^2 dt)
    """
    errors: List[str] = []
    warnings: List[str] = []

    n_steps = cfg.n_steps
    if abs(n_steps * cfg.dt - cfg.T_end) > 1e-9 * max(1.0, cfg.T_end):
        errors.append(f"T_end={cfg.T_end} is not a multiple of dt={cfg.dt}")
    if cfg.mu not in (1.0, -1.0, 0.0):
        warnings.append(f"mu={cfg.mu} is not one of 0, +1, -1")

    if u0 is not None and len(u0):
        bandwidth = u0.bandwidth()
        if 2 * bandwidth > cfg.M:
            errors.append(f"Grid M={cfg.M} cannot hold initial bandwidth N={bandwidth} (need M >= {2 * bandwidth})")
        elif cfg.dealias is Dealias.NONE and 4 * bandwidth + 1 > cfg.M:
            warnings.append("Without padding the cubic aliases onto the grid from the first step")
        peak = float(np.sum(np.abs(u0.amps)))
        if abs(cfg.mu) * peak ** 2 * cfg.dt > 0.5:
            warnings.append(f"Nonlinear phase per step up to {abs(cfg.mu) * peak ** 2 * cfg.dt:.2f} rad; reduce dt")

    if cfg.T_end > 0 and n_steps > 10 ** 6:
        warnings.append(f"{n_steps} steps requested")

    return _result(errors, warnings)


def sanity_check_trace(trace: EvolutionTrace, cfg: SolverConfig) -> Dict[str, Any]:
    """
    Sprawdź poprawność przebiegu ewolucji.

    Ocenia dryf masy (uwzględniając masę obciętą przy dealiasingu) i dryf energii.

    Returns:
        Dict zawierający status (ok/warning/uncertain/error), diagnostic i details
    """
    status = "ok"
    diagnostics: List[str] = []
    details: Dict[str, Any] = {}

    if not trace.records:
        return {"status": "error", "diagnostic": "Empty trace", "details": details}

    first, last = trace.records[0], trace.records[-1]
    details["records"] = len(trace.records)

    if first.mass > 0:
        drift = abs(last.mass + last.truncated_mass - first.mass) / first.mass
        details["mass_drift"] = drift
        if drift > MASS_DRIFT_WARN:
            status = "warning"
            diagnostics.append(f"Relative mass drift {drift:.2e}")
        if cfg.dealias is Dealias.PADDED:
            details["truncated_fraction"] = last.truncated_mass / first.mass
            if last.truncated_mass / first.mass > 1e-3:
                status = "uncertain"
                diagnostics.append("More than 0.1% of the mass was truncated; raise M")

    energy_scale = max(abs(first.energy), 1e-300)
    details["energy_drift"] = abs(last.energy - first.energy) / energy_scale
    if details["energy_drift"] > 1e-2:
        if status == "ok":
            status = "warning"
        diagnostics.append(f"Relative energy drift {details['energy_drift']:.2e}; reduce dt")

    diagnostic_message = "; ".join(diagnostics) if diagnostics else "Conserved quantities within tolerance"
    logger.info(f"Trace sanity check: {status.upper()} - {diagnostic_message}")
    return {"status": status, "diagnostic": diagnostic_message, "details": details}


def sanity_check_growth(report: GrowthReport, tolerance: float = 0.03) -> Dict[str, Any]:
    """Porównaj dopasowane nachylenie log-log z przewidywanym 1 + s"""
    details: Dict[str, Any] = {}
    if not report.rows or "hs_norm" not in report.slopes:
        return {"status": "uncertain", "diagnostic": "No slope fitted", "details": details}

    s = report.rows[0].s
    slope = report.slopes["hs_norm"]
    details.update(expected_slope=1.0 + s, slope=slope, deviation=slope - (1.0 + s))
    if abs(slope - (1.0 + s)) <= tolerance:
        status, message = "ok", f"Growth slope {slope:.4f} matches 1+s={1.0 + s:g}"
    else:
        status, message = "warning", f"Growth slope {slope:.4f} deviates from 1+s={1.0 + s:g} by more than {tolerance}"
    logger.info(f"Growth sanity check: {status.upper()} - {message}")
    return {"status": status, "diagnostic": message, "details": details}


def sanity_check_agreement(relative_gap: float, label: str, tolerance: float = ROUNDTRIP_RTOL) -> Dict[str, Any]:
    """
    Compare two evaluations of the same quantity.

    ROUNDTRIP_RTOL applies to exact identities (closed forms, recentring),
    QUADRATURE_RTOL to grid quadrature oracles.
    """
    details = {"relative_gap": relative_gap, "tolerance": tolerance}
    if not np.isfinite(relative_gap):
        status, message = "error", f"{label}: non-finite gap"
    elif relative_gap <= tolerance:
        status, message = "ok", f"{label} agree to {relative_gap:.2e}"
    else:
        status, message = "warning", f"{label} differ by {relative_gap:.2e} > {tolerance:.0e}"
    logger.info(f"Agreement check: {status.upper()} - {message}")
    return {"status": status, "diagnostic": message, "details": details}


def sanity_check_quadrature(relative_gap: float) -> Dict[str, Any]:
    return sanity_check_agreement(relative_gap, "Closed form and quadrature", QUADRATURE_RTOL)
