"""
Integer lattice counting.

A_l = {(n1, n2) in [-N, N]^2 : n1^2 - n2^2 = l} and the diagonal triple counts
Gamma((q, q)) of the first Picard iterate.
"""
import logging
from typing import Dict, Tuple, Union

import numpy as np
from sympy import divisors, factorint

from .models import CountMethod, LatticeReport

logger = logging.getLogger(__name__)

# Levels are bounded by N^2; keep N^2 and products of box coordinates inside int64
MAX_BOX = 2 ** 30


def _check_box(N: int) -> None:
    if N < 1:
        raise ValueError(f"Box half-width must be positive, got N={N}")
    if N > MAX_BOX:
        raise ValueError(f"N={N} exceeds the 64-bit level range")


def _isqrt(values: np.ndarray) -> np.ndarray:
    """Floor square root of non-negative int64 values, corrected after the float estimate"""
    root = np.floor(np.sqrt(values.astype(np.float64))).astype(np.int64)
    root -= (root * root > values).astype(np.int64)
    root += ((root + 1) * (root + 1) <= values).astype(np.int64)
    return root


def count_A_l_brute(N: int, l: int) -> int:
    """Scan n2 over [-N, N] and test whether l + n2^2 is a perfect square n1^2 with |n1| <= N"""
    _check_box(N)
    n2 = np.arange(-N, N + 1, dtype=np.int64)
    target = int(l) + n2 * n2
    target = target[target >= 0]
    root = _isqrt(target)
    hit = (root * root == target) & (root <= N)
    # n1 = 0 is one point, n1 = +-r two
    return int(np.sum(np.where(root[hit] == 0, 1, 2)))


def count_A_l_divisor(N: int, l: int) -> int:
    """
    Count factorizations l = m1*m2 with m1 = m2 (mod 2), |m1 + m2| <= 2N, |m1 - m2| <= 2N.

    Each such pair is exactly one point (n1, n2) = ((m1 + m2)/2, (m1 - m2)/2) of A_l.
    """
    _check_box(N)
    l = int(l)
    if l == 0:
        raise ValueError("l = 0 has infinitely many factorizations; use count_A_0")
    count = 0
    for d in divisors(abs(l)):
        for m1 in (d, -d):
            m2 = l // m1
            if (m1 - m2) % 2 == 0 and abs(m1 + m2) <= 2 * N and abs(m1 - m2) <= 2 * N:
                count += 1
    return count


def count_A_0(N: int) -> int:
    """#A_0 = 4N + 1 (both diagonals), checked against the exhaustive scan"""
    closed = 4 * N + 1
    brute = count_A_l_brute(N, 0)
    if brute != closed:
        raise AssertionError(f"#A_0 mismatch for N={N}: closed form {closed}, scan {brute}")
    return closed


def divisor_count(n: int) -> int:
    """d(n) from the prime factorization"""
    if n < 1:
        raise ValueError(f"divisor_count needs n >= 1, got {n}")
    return int(np.prod([e + 1 for e in factorint(int(n)).values()], dtype=np.int64))


def level_counts_brute(N: int, level_bound: int) -> Dict[int, int]:
    """
    Exhaustive scan of the whole box, binned by level l in [-level_bound, level_bound].

    Each row keeps only its in-range differences, so the work is O(N^2) whatever the bound.
    """
    _check_box(N)
    if level_bound < 0:
        raise ValueError(f"level_bound must be non-negative, got {level_bound}")
    axis = np.arange(-N, N + 1, dtype=np.int64)
    squares = axis * axis
    reach = min(int(level_bound), N * N)
    counts = np.zeros(2 * reach + 1, dtype=np.int64)
    for row in squares:
        levels = row - squares
        levels = levels[np.abs(levels) <= reach]
        counts += np.bincount(levels + reach, minlength=counts.size)
    return {l: int(counts[l + reach]) if abs(l) <= reach else 0
            for l in range(-level_bound, level_bound + 1)}


def _divisor_sieve(N: int, level_bound: int) -> np.ndarray:
    """
    counts[l] = #A_l for 0 < l <= level_bound from positive factor pairs.

    For l > 0 both factors share a sign; positive pairs need m1 + m2 <= 2N
    (then |m1 - m2| <= 2N holds too) and every positive pair has a negative twin.
    """
    products = []
    for m1 in range(1, 2 * N):
        m2 = np.arange(2 - m1 % 2, 2 * N - m1 + 1, 2, dtype=np.int64)
        level = m1 * m2
        products.append(level[level <= level_bound])
    counts = np.zeros(level_bound + 1, dtype=np.int64)
    if products:
        flat = np.concatenate(products)
        counts += 2 * np.bincount(flat, minlength=level_bound + 1)[: level_bound + 1]
    counts[0] = 0
    return counts


def max_A_l(N: int, level_bound: int) -> Tuple[int, int]:
    """
    Largest #A_l over 0 < |l| <= level_bound.

    Ties go to the smallest |l|, then to positive l; #A_l = #A_{-l} by swapping n1 and n2,
    so the winner is always positive.
    """
    _check_box(N)
    if not 1 <= level_bound <= N * N:
        raise ValueError(f"level_bound must lie in [1, N^2={N * N}], got {level_bound}")
    counts = _divisor_sieve(N, level_bound)
    level = int(np.argmax(counts[1:])) + 1
    logger.debug(f"max #A_l for N={N}, |l|<={level_bound}: l={level}, count={counts[level]}")
    return level, int(counts[level])


def count_A_l_table(N: int, level_bound: int, method: Union[CountMethod, str]) -> LatticeReport:
    """Counts for every level in [-level_bound, level_bound]; l = 0 always uses the closed form"""
    _check_box(N)
    method = CountMethod(method)
    if method is CountMethod.BRUTE:
        counts = level_counts_brute(N, level_bound)
    elif method is CountMethod.DIVISOR:
        counts = {l: (count_A_0(N) if l == 0 else count_A_l_divisor(N, l))
                  for l in range(-level_bound, level_bound + 1)}
    else:
        raise ValueError("closed_form only exists for l = 0")

    report = LatticeReport(N=N, counts=counts, method=method)
    nonzero = [l for l in counts if l != 0]
    if nonzero:
        best = max(nonzero, key=lambda l: (counts[l], -abs(l), l))
        report.argmax_level, report.max_count = best, counts[best]
    return report


def gamma_diag_counts(N: int, q: np.ndarray) -> np.ndarray:
    """
    #Gamma((q, q)) = sum over s in [q-N, q+N] and [-2N, 2N] of (2N + 1 - |s|).

    s = k1 + k3 runs over the pair sums, each hit 2N + 1 - |s| times; k2 = s - q.
    """
    q = np.asarray(q, dtype=np.int64)
    lo = np.maximum(q - N, -2 * N)
    hi = np.minimum(q + N, 2 * N)
    empty = lo > hi
    lo, hi = np.where(empty, 0, lo), np.where(empty, -1, hi)

    def tri(x):
        return x * (x + 1) // 2

    abs_sum = np.where(
        lo >= 0, tri(hi) - tri(lo - 1),
        np.where(hi <= 0, tri(-lo) - tri(-hi - 1), tri(-lo) + tri(hi)),
    )
    return (hi - lo + 1) * (2 * N + 1) - abs_sum


def gamma_diag_count(N: int, q: int) -> int:
    if N < 0:
        raise ValueError(f"N must be non-negative, got {N}")
    return int(gamma_diag_counts(N, np.array([q]))[0])


def gamma_diag_count_brute(N: int, q: int) -> int:
    """Exhaustive count of triples (k1, k2, k3) in [-N, N]^3 with k1 - k2 + k3 = q"""
    k = np.arange(-N, N + 1, dtype=np.int64)
    total = k[:, None, None] - k[None, :, None] + k[None, None, :]
    return int(np.count_nonzero(total == q))
