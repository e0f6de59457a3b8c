"""Ground truth: brute-force avoidance counts, closed forms for the solved
classes 1234 and 1342, and evaluation of stretched-exponential asymptotics."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import comb, factorial
from typing import Sequence

from ._backend import kernel
from .errors import DomainError, SizeTooLarge

BRUTE_MAX_N = 12


def _check_pattern(pattern: Sequence[int]) -> tuple:
    pat = tuple(int(v) for v in pattern)
    if len(pat) < 2 or sorted(pat) != list(range(1, len(pat) + 1)):
        raise ValueError(f"{pattern!r} is not a permutation of 1..k with k >= 2")
    if len(pat) > 16:
        raise ValueError("patterns longer than 16 are not supported")
    return pat


def contains_pattern(perm: Sequence[int], pattern: Sequence[int]) -> bool:
    """True iff some subsequence of perm is order-isomorphic to pattern."""
    k = len(pattern)
    order = sorted(range(k), key=lambda i: pattern[i])
    for sub in combinations(perm, k):
        if all(sub[order[i]] < sub[order[i + 1]] for i in range(k - 1)):
            return True
    return False


def brute_count(pattern: Sequence[int], n: int, backend=None) -> int:
    """Number of permutations of [n] avoiding pattern, by pruned prefix search."""
    pat = _check_pattern(pattern)
    if n < 0:
        raise ValueError("n must be non-negative")
    if n > BRUTE_MAX_N:
        raise SizeTooLarge(f"brute force is limited to n <= {BRUTE_MAX_N}")
    if n == 0:
        return 1
    return int((backend or kernel).brute_count(n, pat))


def p1234(n: int) -> int:
    """Gessel's closed form for 1234-avoiders."""
    if n == 0:
        return 1
    s = sum(comb(2 * k, k) * comb(n + 1, k + 1) * comb(n + 2, k + 1) for k in range(n + 1))
    q, r = divmod(s, (n + 1) ** 2 * (n + 2))
    assert r == 0
    return q


def p1342(n: int) -> int:
    """Bona's closed form for 1342-avoiders, summed over i = 2..n."""
    if n == 0:
        return 1
    s = Fraction((-1) ** (n - 1) * (7 * n * n - 3 * n - 2), 2)
    s += 3 * sum(Fraction((-1) ** (n - i) * 2 ** (i + 1) * factorial(2 * i - 4) * comb(n - i + 2, 2),
                          factorial(i) * factorial(i - 2))
                 for i in range(2, n + 1))
    assert s.denominator == 1
    return int(s)


@dataclass(frozen=True)
class AsymptoticParams:
    """b_n ~ B * mu**n * mu1**(n**sigma) * n**g."""

    B: float
    mu: float
    mu1: float = 1.0
    sigma: float = 0.0
    g: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.sigma < 1.0:
            raise DomainError("sigma must lie in [0, 1)")

    def log(self, n: float) -> float:
        """Natural log of the asymptotic form at n."""
        if min(self.B, self.mu, self.mu1) <= 0:
            raise DomainError("B, mu and mu1 must be positive")
        return math.fsum((math.log(self.B), n * math.log(self.mu),
                          n ** self.sigma * math.log(self.mu1), self.g * math.log(n)))


def asym_eval(params: AsymptoticParams, n: int) -> tuple:
    """(log10 value, mantissa in [1, 10)) of the asymptotic form at n."""
    if n < 1:
        raise DomainError("n must be at least 1")
    lg = params.log(n) / math.log(10)
    return lg, 10 ** (lg - math.floor(lg))
