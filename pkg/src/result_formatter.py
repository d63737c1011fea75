"""
Result formatting utilities for experiment reports.
Provides standardized JSON summaries and CSV tables for every command.
"""
import csv
import json
import logging
import math
import os
from datetime import datetime
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence

from .config import CODE_VERSION
from .models import RunManifest

logger = logging.getLogger(__name__)

# Kolumny raportów CSV, w kolejności zapisu
LATTICE_COLUMNS = ["N", "l", "count", "method"]
STRICHARTZ_COLUMNS = ["N", "ensemble", "trials", "max_ratio", "mean_ratio", "extremizer_ratio"]
GROWTH_COLUMNS = ["N", "s", "t", "hs_norm", "ratio_to_N1plus_s", "ratio_to_N3s", "projected_hs_norm"]
TRACE_COLUMNS = ["t", "mass", "energy", "l2", "hs", "l4", "truncated_mass"]
BILINEAR_COLUMNS = ["N1", "N2", "trial", "bilinear", "ratio"]
GALILEAN_COLUMNS = ["pair", "m1", "m2", "l4_original", "l4_recentred", "relative_difference"]


def _json_safe(value: Any) -> Any:
    """NaN/Inf nie są poprawnym JSON - zamień na None"""
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, Mapping):
        return {str(k): _json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_safe(v) for v in value]
    if hasattr(value, "value") and isinstance(getattr(value, "value"), str):
        return value.value
    return value


def build_report_json(
    command: str,
    summary: Dict[str, Any],
    manifest: RunManifest,
    diagnostics: Optional[Dict[str, Any]] = None,
) -> Dict[str, Any]:
    """
    Stwórz jednolity wynik JSON dla każdej komendy.

    Args:
        command: Nazwa komendy (lattice, strichartz, ...)
        summary: Kluczowe wartości wyniku (nachylenia, maksima, stałe)
        manifest: Manifest przebiegu (parametry, ziarno, wersja)
        diagnostics: Opcjonalny wynik sanity_check_*

    Returns:
        Ustandaryzowany dict z wynikami i metadanymi
    """
    result = {
        "command": command,
        "summary": _json_safe(summary),
        "metadata": {
            "timestamp": manifest.timestamp,
            "seed": manifest.seed,
            "version": manifest.code_version or CODE_VERSION,
            "parameters": _json_safe(manifest.parameters),
        },
    }
    if diagnostics:
        result["sanity_check"] = _json_safe(diagnostics)
    logger.debug(f"Built report JSON for {command}")
    return result


def format_error(error_message: str, error_type: str = "numerical_error") -> Dict[str, Any]:
    """
    Formatuj błąd w standardowym formacie.

    Args:
        error_message: Komunikat błędu
        error_type: Typ błędu (validation_error, numerical_error, io_error)
    """
    logger.error(f"Command error [{error_type}]: {error_message}")
    return {
        "error": True,
        "error_type": error_type,
        "error_message": error_message,
        "metadata": {"timestamp": datetime.now().isoformat(), "status": "error"},
    }


def format_validation_errors(validation_result: Dict[str, Any]) -> Dict[str, Any]:
    """Formatuj wynik walidacji (valid/errors/warnings) w standardowym formacie"""
    if validation_result.get("valid"):
        return {
            "error": False,
            "warnings": validation_result.get("warnings", []),
            "metadata": {"timestamp": datetime.now().isoformat(), "status": "validated"},
        }

    logger.warning(f"Validation failed: {len(validation_result.get('errors', []))} errors")
    return {
        "error": True,
        "error_type": "validation_error",
        "error_message": "Invalid command parameters",
        "validation_errors": validation_result.get("errors", []),
        "validation_warnings": validation_result.get("warnings", []),
        "metadata": {"timestamp": datetime.now().isoformat(), "status": "validation_failed"},
    }


def _ensure_parent(path: str) -> None:
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)


def write_csv(path: str, rows: Iterable[Mapping[str, Any]], columns: Sequence[str]) -> str:
    """Zapisz wiersze jako CSV; liczby zmiennoprzecinkowe z pełną precyzją (repr)"""
    _ensure_parent(path)
    rows = list(rows)
    try:
        with open(path, "w", newline="", encoding="utf-8") as handle:
            writer = csv.DictWriter(handle, fieldnames=list(columns), extrasaction="ignore")
            writer.writeheader()
            for row in rows:
                writer.writerow({k: _cell(v) for k, v in row.items()})
    except OSError as e:
        raise OSError(f"Cannot write {path}: {e}") from e
    logger.info(f"Wrote {len(rows)} rows to {path}")
    return path


def _cell(value: Any) -> Any:
    if isinstance(value, float):
        return repr(value)
    if hasattr(value, "value") and isinstance(getattr(value, "value"), str):
        return value.value
    return value


def write_json(path: str, payload: Dict[str, Any]) -> str:
    _ensure_parent(path)
    try:
        with open(path, "w", encoding="utf-8") as handle:
            json.dump(_json_safe(payload), handle, indent=2, sort_keys=True)
            handle.write("\n")
    except OSError as e:
        raise OSError(f"Cannot write {path}: {e}") from e
    logger.info(f"Wrote {path}")
    return path


def rows_as_dicts(models: Iterable[Any]) -> List[Dict[str, Any]]:
    return [m.model_dump(mode="json") if hasattr(m, "model_dump") else dict(m) for m in models]
