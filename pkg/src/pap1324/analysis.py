"""Ratio-method series analysis: extrapolated ratios, sigma estimators,
windowed linear fits, the log-scale renormalization and Bulirsch-Stoer tableaux.

Series arguments may be a SeriesTable, a plain sequence of coefficients
indexed from 0, or a RealSeries.  Exact integer inputs are kept exact until
the final conversion to floating point.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence, Union

import mpmath

from .errors import DomainError, SingularWindow
from .oracles import AsymptoticParams


@dataclass(frozen=True)
class RealSeries:
    """Values s_n for n = start, start + 1, ..."""

    values: tuple
    start: int = 0

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(self.values))

    def __len__(self):
        return len(self.values)

    def __getitem__(self, n: int):
        i = n - self.start
        if not 0 <= i < len(self.values):
            raise IndexError(n)
        return self.values[i]

    @property
    def end(self) -> int:
        return self.start + len(self.values) - 1

    def indices(self) -> range:
        return range(self.start, self.start + len(self.values))

    def items(self):
        return list(zip(self.indices(), self.values))

    def last(self):
        return self.values[-1]

    def floats(self) -> "RealSeries":
        return RealSeries([float(v) for v in self.values], self.start)


SeriesLike = Union[RealSeries, Sequence]


def _series(series) -> RealSeries:
    if isinstance(series, RealSeries):
        return series
    coeffs = getattr(series, "coefficients", series)
    return RealSeries(list(coeffs), 0)


def exact_rational(v):
    """Exact rational value of an int, float, Fraction or mpf."""
    if isinstance(v, (int, Fraction)):
        return Fraction(v)
    if isinstance(v, mpmath.mpf):
        sign, man, exp, _ = v._mpf_
        if not man and exp:
            raise DomainError("infinite or undefined value")
        x = Fraction(int(man)) * Fraction(2) ** int(exp)
        return -x if sign else x
    return Fraction(float(v))


def _log(v, prec: int = 0):
    """Natural log; mpf at `prec` bits when prec > 0, else float."""
    if v <= 0:
        raise DomainError("log of a non-positive value")
    if prec:
        with mpmath.workprec(prec):
            if isinstance(v, Fraction):
                return mpmath.log(v.numerator) - mpmath.log(v.denominator)
            return mpmath.log(v)
    if isinstance(v, Fraction):
        return math.log(v.numerator) - math.log(v.denominator)
    return math.log(v)


# ---------------------------------------------------------------------------
# ratios and simple extrapolants

def ratios(series: SeriesLike) -> RealSeries:
    """r_n = s_n / s_{n-1}, correctly rounded when the inputs are exact integers."""
    s = _series(series)
    out = []
    for n in range(s.start + 1, s.end + 1):
        a, b = s[n], s[n - 1]
        if b == 0:
            raise DomainError(f"zero coefficient at n={n - 1}")
        out.append(a / b if isinstance(a, int) and isinstance(b, int) else float(a / b))
    return RealSeries(out, s.start + 1)


def pair_extrapolate(seq: SeriesLike, t: float) -> RealSeries:
    """Intercept at x = 0 of the line through consecutive points (n**-t, s_n)."""
    if t <= 0:
        raise ValueError("t must be positive")
    s = _series(seq)
    out = []
    for n in range(max(s.start + 1, 2), s.end + 1):
        a, b = n ** t, (n - 1) ** t
        out.append((a * float(s[n]) - b * float(s[n - 1])) / (a - b))
    return RealSeries(out, max(s.start + 1, 2))


def sigma_local_given_mu(rat: SeriesLike, mu: float) -> RealSeries:
    """Local estimates of 1 - sigma from the decay of 1 - r_n/mu."""
    s = _series(rat)
    lg = {}
    for n in s.indices():
        x = 1.0 - float(s[n]) / mu
        if x <= 0:
            raise DomainError(f"r_{n} >= mu")
        lg[n] = math.log(x)
    out = [(lg[n - 1] - lg[n]) / (math.log(n) - math.log(n - 1))
           for n in range(max(s.start + 1, 2), s.end + 1)]
    return RealSeries(out, max(s.start + 1, 2))


def sigma_free(series: SeriesLike) -> RealSeries:
    """r_sigma_n = b_n b_{n-2} / b_{n-1}**2, which needs no estimate of mu."""
    s = _series(series)
    out = []
    for n in range(s.start + 2, s.end + 1):
        a, b, c = exact_rational(s[n]), exact_rational(s[n - 1]), exact_rational(s[n - 2])
        if b == 0:
            raise DomainError(f"zero coefficient at n={n - 1}")
        out.append(float(a * c / (b * b)))
    return RealSeries(out, s.start + 2)


def loglog_gradient(seq: SeriesLike) -> RealSeries:
    """Local slope of log|s_n - 1| against log n (tends to sigma - 2 for r_sigma)."""
    s = _series(seq)
    lg = {}
    for n in s.indices():
        x = abs(float(s[n]) - 1.0)
        if x == 0:
            raise DomainError(f"value at n={n} is exactly 1")
        lg[n] = math.log(x)
    start = max(s.start + 1, 2)
    return RealSeries([(lg[n] - lg[n - 1]) / (math.log(n) - math.log(n - 1))
                       for n in range(start, s.end + 1)], start)


# ---------------------------------------------------------------------------
# windowed fits

@dataclass
class FitResult:
    """Coefficient estimates per window, keyed by the window's label index."""

    basis: tuple
    windows: dict = field(default_factory=dict)

    def last(self) -> tuple:
        return self.windows[max(self.windows)]

    def column(self, i: int) -> RealSeries:
        ks = sorted(self.windows)
        return RealSeries([self.windows[k][i] for k in ks], ks[0])


def solve_exact(rows: Sequence[Sequence[Fraction]], rhs: Sequence[Fraction]) -> list:
    """Gauss-Jordan elimination over the rationals."""
    n = len(rows)
    a = [[Fraction(x) for x in r] + [Fraction(y)] for r, y in zip(rows, rhs)]
    for c in range(n):
        p = next((i for i in range(c, n) if a[i][c] != 0), None)
        if p is None:
            raise SingularWindow("window system is singular")
        a[c], a[p] = a[p], a[c]
        inv = 1 / a[c][c]
        a[c] = [x * inv for x in a[c]]
        for i in range(n):
            if i != c and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[c])]
    return [a[i][n] for i in range(n)]


_PREC = 160  # bits for transcendental basis values fed to the exact solver


def _fit(indices: Sequence[int], basis: Sequence[Callable], target: Callable, width: int,
         offset: int, names: tuple) -> FitResult:
    """Solve target(j) = sum_i c_i basis_i(j) on windows j = k-offset .. k-offset+width-1."""
    res = FitResult(names)
    lo, hi = min(indices), max(indices)
    with mpmath.workprec(_PREC):
        cache = {j: ([exact_rational(f(j)) for f in basis], exact_rational(target(j))) for j in indices}
    for k in range(lo + offset, hi - (width - 1 - offset) + 1):
        js = range(k - offset, k - offset + width)
        c = solve_exact([cache[j][0] for j in js], [cache[j][1] for j in js])
        res.windows[k] = tuple(float(x) for x in c)
    return res


def _logn(j):
    return mpmath.log(j)


def fit_ratio_triple(rat: SeriesLike, mu: float) -> FitResult:
    """r_j/mu = 1 + c1 j^-1/2 + c2 j^-1 + c3 j^-3/2 on j = k-1, k, k+1."""
    if mu <= 0:
        raise DomainError("mu must be positive")
    s = _series(rat)
    idx = [j for j in s.indices() if j >= 1]
    m = exact_rational(mu)
    return _fit(idx, [lambda j: 1 / mpmath.sqrt(j), lambda j: Fraction(1, j),
                      lambda j: mpmath.mpf(j) ** -1.5],
                lambda j: exact_rational(s[j]) / m - 1, 3, 1, ("c1", "c2", "c3"))


def _log_values(series: SeriesLike) -> tuple:
    s = _series(series)
    idx = [j for j in s.indices() if j >= 1]
    with mpmath.workprec(_PREC):
        lg = {j: _log(exact_rational(s[j]), _PREC) for j in idx}
    return idx, lg


def fit_log_quad(series: SeriesLike, sigma: float = 0.5) -> FitResult:
    """log b_k = c1 k + c2 k^sigma + c3 log k + c4 on k = n-2 .. n+1."""
    idx, lg = _log_values(series)
    return _fit(idx, [lambda j: j, lambda j: mpmath.mpf(j) ** sigma, _logn, lambda j: 1],
                lambda j: lg[j], 4, 2, ("c1", "c2", "c3", "c4"))


def fit_log_triple_mu(series: SeriesLike, mu: float, sigma: float = 0.5) -> FitResult:
    """log b_n - n log mu = c1 n^sigma + c2 log n + c3 on n-1, n, n+1."""
    if mu <= 0:
        raise DomainError("mu must be positive")
    idx, lg = _log_values(series)
    with mpmath.workprec(_PREC):
        lmu = _log(exact_rational(mu), _PREC)
    return _fit(idx, [lambda j: mpmath.mpf(j) ** sigma, _logn, lambda j: 1],
                lambda j: lg[j] - j * lmu, 3, 1, ("c1", "c2", "c3"))


# ---------------------------------------------------------------------------
# renormalization and amplitudes

def renormalize(series: SeriesLike, dps: Optional[int] = None, log: bool = False) -> RealSeries:
    """d_n = exp(c_n), c_n = 2 n^{3/2} (log b_n / sqrt n - log b_{n-1} / sqrt(n-1)).

    Removes the mu1**sqrt(n) factor, leaving an algebraic singularity.  Values
    are floats unless `dps` asks for mpmath numbers at that many digits;
    ``log=True`` returns c_n, which never overflows.
    """
    s = _series(series)
    work = max(dps or 0, 40)
    out = []
    start = max(s.start + 1, 2)
    with mpmath.workdps(work):
        bt = {}
        for n in range(start - 1, s.end + 1):
            bt[n] = _log(exact_rational(s[n]), mpmath.mp.prec) / mpmath.sqrt(n)
        for n in range(start, s.end + 1):
            c = 2 * mpmath.mpf(n) ** 1.5 * (bt[n] - bt[n - 1])
            v = c if log else mpmath.exp(c)
            out.append(+v if dps else float(v))
    if not log and any(math.isinf(v) for v in out if isinstance(v, float)):
        raise OverflowError("renormalized value exceeds float range; use log=True")
    return RealSeries(out, start)


def amplitude_sequence(series: SeriesLike, params: AsymptoticParams) -> RealSeries:
    """B_n = b_n / (mu^n mu1^(n^sigma) n^g), formed in log space."""
    s = _series(series)
    p = params
    if min(p.mu, p.mu1) <= 0:
        raise DomainError("mu and mu1 must be positive")
    out = []
    for n in s.indices():
        if n < 1:
            continue
        lb = _log(exact_rational(s[n]))
        out.append(math.exp(lb - n * math.log(p.mu) - n ** p.sigma * math.log(p.mu1)
                            - p.g * math.log(n)))
    return RealSeries(out, max(s.start, 1))


# ---------------------------------------------------------------------------
# Bulirsch-Stoer

@dataclass
class BSTableau:
    """Rows T(L, n) for L = 0..Lmax; row L starts at the input's first index.

    Cells whose denominator vanished are NaN.
    """

    w: float
    rows: list

    def row(self, L: int) -> RealSeries:
        return self.rows[L]

    def last(self, L: int) -> float:
        return self.rows[L].last()

    def valid(self, L: int, n: int) -> bool:
        return not math.isnan(self.rows[L][n])


def bs_tableau(seq: SeriesLike, w: float, Lmax: int) -> BSTableau:
    """Rational extrapolation assuming s_n ~ s_inf + c n^-w, with x_n = n^-w."""
    s = _series(seq)
    if w <= 0:
        raise ValueError("w must be positive")
    if len(s) < Lmax + 1:
        raise ValueError("sequence too short for the requested depth")
    if s.start < 1:
        raise ValueError("indices must start at 1 or later")
    x = [n ** -w for n in s.indices()]
    prev2 = [0.0] * (len(s) + 1)
    prev = [float(v) for v in s.values]
    rows = [RealSeries(prev, s.start)]
    for L in range(1, Lmax + 1):
        cur = []
        for i in range(len(prev) - 1):
            a, b, c = prev[i + 1], prev[i], prev2[i + 1]
            try:
                d = a - b
                den = (x[i] / x[i + L]) * (1 - d / (a - c)) - 1
                v = a + d / den
            except ZeroDivisionError:
                v = math.nan
            cur.append(v)
        rows.append(RealSeries(cur, s.start))
        prev2, prev = prev, cur
    return BSTableau(w, rows)
