"""
Reading and writing coefficient files.

Line-oriented text format:

    # comment lines and blank lines are ignored
    N 8
    n1 n2 re im
    ...

The header `N <int>` gives the box half-width; every following line holds one
frequency of (-N, N]^2 and its complex amplitude.
"""
import logging
import os
import re
from typing import Dict, Tuple

from .models import FourierCoeffs

logger = logging.getLogger(__name__)

_HEADER = re.compile(r"^N\s+([+-]?\d+)$")
_FLOAT = r"[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?|[+-]?(?:nan|inf)"
_ENTRY = re.compile(rf"^([+-]?\d+)\s+([+-]?\d+)\s+({_FLOAT})\s+({_FLOAT})$", re.IGNORECASE)


def read_coeffs(path: str) -> FourierCoeffs:
    """
    Load a coefficient file.

    Raises:
        FileNotFoundError: if the file does not exist
        ValueError: on a missing header, a malformed line, an out-of-box or
            repeated frequency, or a non-finite amplitude (path and line number in the message)
    """
    logger.info(f"Loading coefficients from: {path}")
    if not os.path.exists(path):
        logger.error(f"Coefficient file not found: {path}")
        raise FileNotFoundError(f"Coefficient file not found: {path}")

    N = None
    entries: Dict[Tuple[int, int], complex] = {}
    with open(path, "r", encoding="utf-8") as handle:
        for line_no, raw in enumerate(handle, 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue

            if N is None:
                header = _HEADER.match(line)
                if not header:
                    raise ValueError(f"{path}:{line_no}: expected header 'N <int>', got {line!r}")
                N = int(header.group(1))
                if N < 1:
                    raise ValueError(f"{path}:{line_no}: box half-width must be positive, got N={N}")
                continue

            entry = _ENTRY.match(line)
            if not entry:
                raise ValueError(f"{path}:{line_no}: malformed coefficient line {line!r}")
            n = (int(entry.group(1)), int(entry.group(2)))
            if not all(-N < c <= N for c in n):
                raise ValueError(f"{path}:{line_no}: frequency {n} outside box (-{N}, {N}]^2")
            if n in entries:
                raise ValueError(f"{path}:{line_no}: repeated frequency {n}")
            amp = complex(float(entry.group(3)), float(entry.group(4)))
            if amp != amp or abs(amp) == float("inf"):
                raise ValueError(f"{path}:{line_no}: non-finite amplitude at {n}")
            entries[n] = amp

    if N is None:
        raise ValueError(f"{path}: missing header 'N <int>'")

    coeffs = FourierCoeffs.from_entries(N, entries)
    logger.info(f"Loaded {len(coeffs)} coefficients, N={N}")
    return coeffs


def write_coeffs(path: str, coeffs: FourierCoeffs, comment: str = "") -> str:
    """Write in the format read_coeffs accepts; amplitudes with 17 significant digits"""
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, "w", encoding="utf-8") as handle:
        for line in comment.splitlines():
            handle.write(f"# {line}\n")
        handle.write(f"N {coeffs.N}\n")
        for (n1, n2), amp in zip(coeffs.freqs, coeffs.amps):
            handle.write(f"{int(n1)} {int(n2)} {amp.real:.17g} {amp.imag:.17g}\n")
    logger.info(f"Wrote {len(coeffs)} coefficients to {path}")
    return path
