"""Differential approximants: fit sum_i Q_i(x) F^(i)(x) = P(x) to a series
exactly, then read singularities off the roots of Q_K.

Fitting is exact (fraction-free Gauss-Jordan over the integers); only root
finding and exponent evaluation use floating point, refined in mpmath.
"""
from __future__ import annotations

import csv
import io
import itertools
import math
import statistics
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Optional, Sequence, Union

import mpmath
import numpy as np

from .analysis import exact_rational
from .errors import (DegenerateSystem, InsufficientCoefficients, MultipleRoot,
                     NoPhysicalRoot)

try:
    from gmpy2 import mpz as _bigint
except ImportError:  # plain ints are ~3x slower but exact all the same
    _bigint = int

MANTISSA_BITS = 100  # inexact inputs are rounded to this many bits first


@dataclass
class DAModel:
    """Q[i][j] is the x^j coefficient of Q_i; P likewise (empty when homogeneous)."""

    K: int
    Q: list
    P: list
    n_used: int

    @property
    def degrees(self) -> tuple:
        return tuple(len(q) - 1 for q in self.Q)

    @property
    def L(self) -> Optional[int]:
        return len(self.P) - 1 if self.P else None

    def residuals(self, coeffs: Sequence) -> list:
        """Exact coefficients of sum_i Q_i F^(i) - P through x^(n_used - 1)."""
        a = [Fraction(c) for c in _exact_list(coeffs)]
        out = []
        for m in range(self.n_used):
            s = -(self.P[m] if m < len(self.P) else 0)
            for i, q in enumerate(self.Q):
                for j, c in enumerate(q):
                    if c and m - j >= 0:
                        n = m - j + i
                        if n >= len(a):
                            raise InsufficientCoefficients("series too short for the check")
                        s += c * a[n] * math.perm(n, i)
            out.append(s)
        return out


@dataclass(frozen=True)
class Singularity:
    x: complex
    rho: complex
    physical: bool = False

    @property
    def is_real(self) -> bool:
        return abs(self.x.imag) <= 1e-9 * abs(self.x)


def _exact_list(coeffs) -> list:
    vals = list(getattr(coeffs, "coefficients", None) or getattr(coeffs, "values", coeffs))
    out = []
    for v in vals:
        if isinstance(v, (int, Fraction)):
            out.append(Fraction(v))
        else:
            out.append(_round_mantissa(v))
    return out


def _round_mantissa(v) -> Fraction:
    """Exact rational of v rounded to MANTISSA_BITS significant bits."""
    x = exact_rational(v)
    if x == 0:
        return x
    e = abs(x.numerator).bit_length() - x.denominator.bit_length() - MANTISSA_BITS
    scale = Fraction(2) ** -e
    return Fraction(round(x * scale)) / scale


def _integerize(fr: Sequence[Fraction]) -> tuple:
    """(integers, den) with integers[i] == fr[i] * den."""
    den = 1
    for f in fr:
        den = den * f.denominator // math.gcd(den, f.denominator)
    return [_bigint(f.numerator * (den // f.denominator)) for f in fr], den


def nullspace_vector(rows: list, ncols: int) -> list:
    """The unique (up to scale) integer null vector, by fraction-free elimination.

    Raises DegenerateSystem unless the nullspace is one-dimensional.
    """
    A = [list(r) for r in rows]
    m = len(A)
    piv, r, prev = [], 0, _bigint(1)
    for c in range(ncols):
        p = next((i for i in range(r, m) if A[i][c] != 0), None)
        if p is None:
            continue
        A[r], A[p] = A[p], A[r]
        pr, pc = A[r], A[r][c]
        for i in range(m):
            if i == r:
                continue
            Ai = A[i]
            f = Ai[c]
            for j in range(ncols):
                if j != c:
                    Ai[j] = (pc * Ai[j] - f * pr[j]) // prev
            Ai[c] = 0
        prev = pc
        piv.append(c)
        r += 1
        if r == m:
            break
    free = [c for c in range(ncols) if c not in set(piv)]
    if len(free) != 1:
        raise DegenerateSystem(f"nullspace has dimension {len(free)}")
    f = free[0]
    x = [_bigint(0)] * ncols
    x[f] = prev
    for i, c in enumerate(piv):
        x[c] = -A[i][f]
    g = 0
    for v in x:
        g = math.gcd(g, int(v))
    return [int(v) // g for v in x]


def fit_da(coeffs, K: int, degrees: Sequence[int], L: Optional[int]) -> DAModel:
    """Fit an order-K approximant with deg Q_i = degrees[i] and deg P = L.

    L = None (or negative) gives the homogeneous equation.
    """
    if K < 1 or len(degrees) != K + 1 or min(degrees) < 0:
        raise ValueError("need K >= 1 and K + 1 non-negative degrees")
    if L is not None and L < 0:
        L = None
    nP = 0 if L is None else L + 1
    U = sum(d + 1 for d in degrees) + nP
    E = U - 1
    a, den = _integerize(_exact_list(coeffs))
    if E - 1 + K >= len(a):
        raise InsufficientCoefficients(f"need {E + K} coefficients, have {len(a)}")
    rows = []
    for m in range(E):
        row = []
        for i in range(K + 1):
            for j in range(degrees[i] + 1):
                if m - j < 0:
                    row.append(0)
                else:
                    n = m - j + i
                    row.append(a[n] * math.perm(n, i))
        row += [-1 if l == m else 0 for l in range(nP)]
        rows.append(row)
    x = nullspace_vector(rows, U)
    Q, k = [], 0
    for d in degrees:
        Q.append(x[k:k + d + 1])
        k += d + 1
    P = x[k:]
    lead = next((c for c in Q[K] if c), None)
    if lead is None:
        raise DegenerateSystem("Q_K vanishes identically")
    Q = [[Fraction(c, lead) for c in q] for q in Q]
    P = [Fraction(c, lead * den) for c in P]  # P was fitted against den * F
    return DAModel(K, Q, P, E)


# ---------------------------------------------------------------------------
# singularities

def _trim(q: Sequence[Fraction]) -> list:
    q = list(q)
    while q and q[-1] == 0:
        q.pop()
    return q


def _polyval(q, x):
    """Horner in mpmath; q lowest degree first."""
    v = mpmath.mpc(0)
    for c in reversed(q):
        v = v * x + mpmath.mpf(c.numerator) / c.denominator
    return v


def _deriv(q):
    return [c * i for i, c in enumerate(q)][1:]


def _refine(q, dq, x0, dps: int):
    with mpmath.workdps(dps):
        x = mpmath.mpc(x0)
        for _ in range(60):
            step = _polyval(q, x) / _polyval(dq, x)
            x -= step
            if abs(step) <= abs(x) * mpmath.mpf(10) ** (-dps + 5):
                break
        return x


def exponent_at(model: DAModel, x_c, dps: int = 40) -> complex:
    """rho = K - 1 - Q_{K-1}(x_c) / Q_K'(x_c); F behaves like (1 - x/x_c)**rho."""
    K = model.K
    q = _trim(model.Q[K])
    dq = _deriv(q)
    with mpmath.workdps(dps):
        x = mpmath.mpc(x_c)
        d = _polyval(dq, x)
        scale = max(abs(mpmath.mpf(c.numerator) / c.denominator) for c in q)
        if abs(d) * max(1, abs(x)) <= scale * mpmath.mpf(10) ** -12:
            raise MultipleRoot(f"Q_K' vanishes at {complex(x)}")
        rho = K - 1 - _polyval(_trim(model.Q[K - 1]) or [Fraction(0)], x) / d
        return complex(rho)


def singularities(model: DAModel, dps: int = 40) -> list:
    """All roots of Q_K with exponents, sorted by modulus; the smallest
    positive real root is flagged physical."""
    q = _trim(model.Q[model.K])
    if len(q) < 2:
        return []
    big = max(abs(c) for c in q)
    approx = np.roots([float(c / big) for c in reversed(q)])
    dq = _deriv(q)
    found = []
    for r in approx:
        x = _refine(q, dq, complex(r), dps)
        xc = complex(x)
        if abs(xc.imag) <= 1e-9 * abs(xc):
            xc = complex(xc.real, 0.0)
        try:
            rho = exponent_at(model, xc, dps)
        except MultipleRoot:
            rho = complex(math.nan, math.nan)
        found.append((xc, rho))
    found.sort(key=lambda t: (abs(t[0]), t[0].imag))
    out, flagged = [], False
    for xc, rho in found:
        phys = not flagged and xc.imag == 0 and xc.real > 0
        flagged = flagged or phys
        out.append(Singularity(xc, rho, phys))
    return out


def physical_root(model: DAModel, band: Optional[float] = None) -> Singularity:
    """Smallest positive real root, optionally requiring |rho| <= band."""
    for s in singularities(model):
        if s.x.imag == 0 and s.x.real > 0 and (band is None or abs(s.rho.real) <= band):
            return s
    raise NoPhysicalRoot("no positive real root" + ("" if band is None else " within band"))


# ---------------------------------------------------------------------------
# scans

def balanced_degrees(n_unknowns_q: int, K: int) -> list:
    """Every degree tuple with max - min <= 1 whose sizes sum to n_unknowns_q."""
    base, rem = divmod(n_unknowns_q, K + 1)
    if base < 1:
        return []
    out = []
    for hi in itertools.combinations(range(K + 1), rem):
        out.append(tuple(base - 1 + (i in hi) for i in range(K + 1)))
    return out


def high_degrees(n_unknowns_q: int, K: int) -> list:
    """Single balanced tuple with the remainder given to the highest orders."""
    base, rem = divmod(n_unknowns_q, K + 1)
    if base < 1:
        return []
    return [tuple(base - 1 + (i > K - rem) for i in range(K + 1))]


DEGREE_POLICIES = {"balanced": balanced_degrees, "high": high_degrees}


def family(N: int, K: int, L: Optional[int], spread: int = 8,
           policy: Union[str, Callable] = "balanced") -> list:
    """Degree tuples for approximants using between N-K-spread and N-K equations."""
    pick = DEGREE_POLICIES[policy] if isinstance(policy, str) else policy
    nP = 0 if L is None or L < 0 else L + 1
    out = []
    for E in range(max(1, N - K - spread), N - K + 1):
        nq = E + 1 - nP
        out += pick(nq, K)
    return out


def fit_exact_reduced(coeffs, K: int, degrees: Sequence[int], L: Optional[int]) -> DAModel:
    """Resolve a degenerate fit: an over-parameterized system means a smaller
    approximant already matches the series exactly.  Search smaller balanced
    degree tuples (same K and L) for one whose model has zero residual on
    every equation of the original system."""
    a = _exact_list(coeffs)
    nP = 0 if L is None or L < 0 else L + 1
    E = sum(d + 1 for d in degrees) + nP - 1
    for nq in range(sum(d + 1 for d in degrees) - 1, K, -1):
        for deg in balanced_degrees(nq, K):
            try:
                m = fit_da(a, K, deg, L)
            except DegenerateSystem:
                continue
            check = DAModel(m.K, m.Q, m.P, E)
            if not any(check.residuals(a)):
                return check
            break
    raise DegenerateSystem("no exact reduced approximant")


def _mad_clip(vals: list, k: float) -> list:
    if len(vals) < 3:
        return list(range(len(vals)))
    med = statistics.median(vals)
    mad = statistics.median(abs(v - med) for v in vals)
    if mad == 0:
        return [i for i, v in enumerate(vals) if v == med]
    return [i for i, v in enumerate(vals) if abs(v - med) <= k * 1.4826 * mad]


@dataclass
class ScanRow:
    L: Optional[int]
    fitted: int
    accepted: int
    kept: int
    mean_x: float
    mean_rho: float
    sd_x: float
    sd_rho: float
    rel_spread: float  # 1.4826 * MAD / median of accepted roots
    picks: list = field(default_factory=list, repr=False)


@dataclass
class ScanResult:
    K: int
    rows: list
    canary: bool
    rel_spread: float
    defective_fraction: float

    def verdict(self) -> str:
        return "non-algebraic singularity suspected" if self.canary else "algebraic singularity"

    def to_csv(self, digits: int = 12) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["L", "mean_x", "mean_rho", "accepted", "fitted", "sd_x", "sd_rho", "rel_spread"])
        f = lambda v: format(v, f".{digits}g")
        for r in self.rows:
            w.writerow(["none" if r.L is None else r.L, f(r.mean_x), f(r.mean_rho), r.kept,
                        r.fitted, f(r.sd_x), f(r.sd_rho), f(r.rel_spread)])
        return buf.getvalue()


def scan(coeffs, K: int, L_range: Iterable, degree_policy: Union[str, Callable] = "balanced",
         spread: int = 8, band: float = 10.0, clip: float = 3.0,
         spread_limit: float = 1e-2, defect_limit: float = 0.5) -> ScanResult:
    """Fit a family of approximants for each L and summarise the physical root.

    A degenerate system is replaced by the smallest exact approximant it
    contains.  An approximant is defective when that fails or it has no
    positive real root with |rho| <= band.  Accepted roots are MAD-clipped (first on x, then
    on rho) before averaging.  The canary fires when the pooled accepted roots
    scatter by more than `spread_limit` (robust relative spread) or more than
    `defect_limit` of the approximants are defective.
    """
    a = _exact_list(coeffs)
    N = len(a)
    rows, pooled, n_fit, n_bad = [], [], 0, 0
    for L in L_range:
        picks, fitted = [], 0
        for deg in family(N, K, L, spread, degree_policy):
            fitted += 1
            try:
                try:
                    m = fit_da(a, K, deg, L)
                except DegenerateSystem:
                    m = fit_exact_reduced(a, K, deg, L)
                s = physical_root(m, band)
            except (DegenerateSystem, NoPhysicalRoot, InsufficientCoefficients):
                continue
            picks.append((s.x.real, s.rho.real))
        n_fit += fitted
        n_bad += fitted - len(picks)
        pooled += [x for x, _ in picks]
        keep = [picks[i] for i in _mad_clip([x for x, _ in picks], clip)]
        keep = [keep[i] for i in _mad_clip([r for _, r in keep], clip)]
        xs = [x for x, _ in keep]
        rs = [r for _, r in keep]
        nan = math.nan
        rows.append(ScanRow(
            L, fitted, len(picks), len(keep),
            statistics.fmean(xs) if xs else nan, statistics.fmean(rs) if rs else nan,
            statistics.pstdev(xs) if xs else nan, statistics.pstdev(rs) if rs else nan,
            _rel_spread([x for x, _ in picks]), picks))
    rel = _rel_spread(pooled)
    bad = n_bad / n_fit if n_fit else 1.0
    canary = not (rel <= spread_limit) or bad > defect_limit
    return ScanResult(K, rows, canary, rel, bad)


def _rel_spread(xs: list) -> float:
    if len(xs) < 2:
        return math.nan
    med = statistics.median(xs)
    return 1.4826 * statistics.median(abs(x - med) for x in xs) / abs(med)
