"""Memoized counting of 1324-avoiders, per-prime runs and CRT reconstruction."""
from __future__ import annotations

import math
from importlib import resources
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence, Union

from . import _pykernel
from ._backend import kernel as _default_kernel
from .errors import (BoundExceeded, CheckFailed, EncodingOverflow, InsufficientPrimes,
                     ModulusClash, ParseError)
from .signature import MAX_TOTAL, Signature, encode, to_tokens

# Upper bound on the growth rate, as the exact ratio 1373718 / 100000.
BOUND_NUM, BOUND_DEN = 1373718, 100000

# The eight largest primes below 2**62, in decreasing order.
DEFAULT_PRIMES = (
    4611686018427387847,
    4611686018427387817,
    4611686018427387787,
    4611686018427387761,
    4611686018427387751,
    4611686018427387737,
    4611686018427387733,
    4611686018427387709,
)

PathLike = Union[str, Path]


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin for n < 3.3e24."""
    if n < 2:
        return False
    small = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
    for p in small:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in small:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def within_bound(value: int, n: int) -> bool:
    """value <= 13.73718**n, compared exactly."""
    return value * BOUND_DEN ** n <= BOUND_NUM ** n


# ---------------------------------------------------------------------------
# memo store

@dataclass(frozen=True)
class ModularValue:
    residue: int
    modulus: int  # 0 means exact

    def __int__(self):
        return self.residue


class MemoStore:
    """Map from 128-bit signature keys to counts modulo one prime.

    ``modulus=0`` counts exactly (128-bit in the compiled kernel, unbounded in
    the Python one).  With ``store_probability < 1`` a computed value is kept
    only when a hash of (seed, key) falls below the threshold, so the set of
    stored keys is reproducible.
    """

    def __init__(self, modulus: int, store_probability: float = 1.0, seed: int = 0,
                 backend: Optional[str] = None):
        if modulus < 0 or modulus >= 1 << 62:
            raise ValueError("modulus must be 0 or below 2**62")
        if not 0.0 < store_probability <= 1.0:
            raise ValueError("store_probability must be in (0, 1]")
        if not 0 <= seed < 1 << 64:
            raise ValueError("seed must fit in 64 bits")
        if backend is None:
            k = _default_kernel
        elif backend == "python":
            k = _pykernel
        elif backend == "cython":
            from . import _ckernel as k
        else:
            raise ValueError(f"unknown backend {backend!r}")
        self.modulus = modulus
        self.store_probability = store_probability
        self.seed = seed
        self.backend = k.NAME
        self._store = k.Store(modulus, store_probability, seed)

    def count(self, below: int, tokens, factorize: bool = True) -> int:
        try:
            return self._store.count(below, tokens, factorize)
        except OverflowError as e:
            if "count" in str(e):
                raise
            raise EncodingOverflow(str(e)) from None

    @property
    def counters(self) -> dict:
        return self._store.counters()

    def __len__(self):
        return len(self._store)


def count_signature(sig: Signature, store: MemoStore, factorize: bool = True) -> ModularValue:
    encode(sig)  # raises EncodingOverflow early
    return ModularValue(store.count(sig.below, tuple(to_tokens(sig)), factorize), store.modulus)


# ---------------------------------------------------------------------------
# runs

@dataclass
class RunOptions:
    store_probability: float = 1.0
    factorize: bool = True
    seed: int = 0
    backend: Optional[str] = None


@dataclass
class RunManifest:
    N: int
    prime: int
    residues: list
    options: RunOptions = field(default_factory=RunOptions)
    counters: dict = field(default_factory=dict)

    def __post_init__(self):
        if len(self.residues) != self.N + 1:
            raise ValueError("need one residue per n = 0..N")
        if any(not 0 <= r < self.prime for r in self.residues):
            raise ValueError("residue out of range for the prime")


def _check_n(N: int):
    if not 0 <= N <= MAX_TOTAL:
        raise EncodingOverflow(f"N must be in 0..{MAX_TOTAL}")


def _run(N: int, modulus: int, opts: RunOptions):
    store = MemoStore(modulus, opts.store_probability, opts.seed, opts.backend)
    vals = [store.count(n, (), opts.factorize) for n in range(N + 1)]
    return vals, store


def series_mod(N: int, prime: int, options: Optional[RunOptions] = None) -> RunManifest:
    """Residues of p_0..p_N modulo `prime` from one shared memo store."""
    _check_n(N)
    if prime >= 1 << 62 or not is_prime(prime):
        raise ValueError(f"{prime} is not a prime below 2**62")
    opts = options or RunOptions()
    vals, store = _run(N, prime, opts)
    return RunManifest(N, prime, vals, opts, store.counters)


def required_prime_count(N: int, primes: Sequence[int] = DEFAULT_PRIMES) -> int:
    """Fewest leading primes whose product exceeds 13.73718**N."""
    if len(set(primes)) != len(primes):
        raise ModulusClash("primes must be distinct")
    prod = 1
    for k, m in enumerate(primes, 1):
        prod *= m
        if prod * BOUND_DEN ** N > BOUND_NUM ** N:
            return k
    raise InsufficientPrimes(f"{len(primes)} primes cannot cover 13.73718**{N}")


def crt_pair(r1: int, m1: int, r2: int, m2: int) -> tuple:
    """Combine x = r1 (mod m1), x = r2 (mod m2) for coprime moduli."""
    if math.gcd(m1, m2) != 1:
        raise ModulusClash(f"moduli {m1} and {m2} are not coprime")
    t = (r2 - r1) * pow(m1, -1, m2) % m2
    return r1 + m1 * t, m1 * m2


@dataclass
class SeriesTable:
    coefficients: list
    pattern: str = "1324"
    moduli: tuple = ()
    created: Optional[str] = None  # left out of files unless set, to keep output reproducible

    @property
    def N(self) -> int:
        return len(self.coefficients) - 1

    def entries(self):
        return list(enumerate(self.coefficients))

    def validate(self, bound: bool = True) -> None:
        c = self.coefficients
        if not c or c[0] != 1:
            raise ValueError("p_0 must be 1")
        for n in range(2, len(c)):
            if c[n] <= c[n - 1]:
                raise ValueError(f"p_{n} is not larger than p_{n - 1}")
        if bound:
            for n in range(1, len(c)):
                if not within_bound(c[n], n):
                    raise BoundExceeded(f"p_{n} exceeds 13.73718**{n}")


def crt_combine(manifests: Sequence[RunManifest], check: Optional[RunManifest] = None,
                pattern: str = "1324") -> SeriesTable:
    if len(manifests) < 2:
        raise ValueError("need at least two manifests")
    N = manifests[0].N
    primes = [m.prime for m in manifests] + ([check.prime] if check else [])
    if len(set(primes)) != len(primes):
        raise ModulusClash("manifests share a prime")
    if any(m.N != N for m in manifests) or (check and check.N != N):
        raise ValueError("manifests cover different N")
    prod = math.prod(m.prime for m in manifests)
    if prod * BOUND_DEN ** N <= BOUND_NUM ** N:
        raise BoundExceeded(f"prime product is too small for N={N}")
    coeffs = []
    for n in range(N + 1):
        x, m = manifests[0].residues[n], manifests[0].prime
        for other in manifests[1:]:
            x, m = crt_pair(x, m, other.residues[n], other.prime)
        coeffs.append(x)
    if check:
        for n, x in enumerate(coeffs):
            if x % check.prime != check.residues[n]:
                raise CheckFailed(f"p_{n} disagrees with the residue mod {check.prime}")
    table = SeriesTable(coeffs, pattern, tuple(primes))
    table.validate(bound=pattern == "1324")
    return table


def enumerate_series(N: int, mode: str = "crt", options: Optional[RunOptions] = None,
                     primes: Optional[Sequence[int]] = None, check: bool = True,
                     manifest_dir: Optional[PathLike] = None) -> SeriesTable:
    """Exact p_0..p_N, either by CRT over per-prime runs or by exact counting."""
    _check_n(N)
    opts = options or RunOptions()
    if mode == "bigint":
        vals, _ = _run(N, 0, opts)
        table = SeriesTable(vals)
    elif mode == "crt":
        plist = list(primes) if primes else list(DEFAULT_PRIMES)
        k = required_prime_count(N, plist)
        use = plist[:max(k, 2)]
        extra = plist[len(use):len(use) + 1] if check else []
        if check and not extra:
            raise InsufficientPrimes("no prime left over for the check run")
        runs = [series_mod(N, p, opts) for p in use + extra]
        if manifest_dir is not None:
            d = Path(manifest_dir)
            d.mkdir(parents=True, exist_ok=True)
            for r in runs:
                write_manifest(r, d / f"residues_{r.prime}.txt")
        table = crt_combine(runs[:len(use)], runs[len(use)] if extra else None)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    table.validate()
    return table


# ---------------------------------------------------------------------------
# files

def _data_lines(text: str):
    for i, line in enumerate(text.splitlines(), 1):
        s = line.strip()
        if s:
            yield i, s


def _parse_row(s: str, i: int, expect: int) -> int:
    parts = s.split("\t")
    if len(parts) != 2:
        raise ParseError("expected 'n<TAB>value'", i)
    try:
        n, v = int(parts[0]), int(parts[1])
    except ValueError:
        raise ParseError("non-integer field", i) from None
    if n != expect:
        raise ParseError(f"expected n={expect}, found n={n}", i)
    if v < 0:
        raise ParseError("negative value", i)
    return v


def format_series(table: SeriesTable) -> str:
    lines = [f"#pattern {table.pattern}"]
    if table.moduli:
        lines.append("#moduli " + ",".join(map(str, table.moduli)))
    if table.created:
        lines.append(f"#created {table.created}")
    lines += [f"{n}\t{v}" for n, v in table.entries()]
    return "\n".join(lines) + "\n"


def parse_series(text: str) -> SeriesTable:
    meta, vals = {}, []
    for i, s in _data_lines(text):
        if s.startswith("#"):
            key, _, val = s[1:].partition(" ")
            meta[key] = val.strip()
            continue
        vals.append(_parse_row(s, i, len(vals)))
    if not vals:
        raise ParseError("no coefficients")
    try:
        moduli = tuple(int(x) for x in meta["moduli"].split(",")) if meta.get("moduli") else ()
    except ValueError:
        raise ParseError("bad #moduli header") from None
    return SeriesTable(vals, meta.get("pattern", "1324"), moduli, meta.get("created"))


def write_series(table: SeriesTable, path: PathLike) -> None:
    Path(path).write_text(format_series(table), encoding="utf-8")


def read_series(path: PathLike) -> SeriesTable:
    return parse_series(Path(path).read_text(encoding="utf-8"))


def format_manifest(man: RunManifest) -> str:
    o = man.options
    lines = [f"#prime {man.prime}", f"#maxn {man.N}", f"#seed {o.seed}",
             f"#p {o.store_probability!r}", f"#factorize {'on' if o.factorize else 'off'}"]
    lines += [f"{n}\t{r}" for n, r in enumerate(man.residues)]
    return "\n".join(lines) + "\n"


def parse_manifest(text: str, expected_prime: Optional[int] = None) -> RunManifest:
    head, res = {}, []
    for i, s in _data_lines(text):
        if s.startswith("#"):
            key, _, val = s[1:].partition(" ")
            head[key] = (val.strip(), i)
            continue
        res.append((_parse_row(s, i, len(res)), i))
    for key in ("prime", "maxn"):
        if key not in head:
            raise ParseError(f"missing #{key} header")
    try:
        prime = int(head["prime"][0])
        N = int(head["maxn"][0])
        seed = int(head.get("seed", ("0", 0))[0])
        prob = float(head.get("p", ("1.0", 0))[0])
    except ValueError:
        raise ParseError("malformed header value") from None
    fact = head.get("factorize", ("on", 0))[0] != "off"
    if expected_prime is not None and prime != expected_prime:
        raise ParseError(f"header prime {prime} differs from expected {expected_prime}",
                         head["prime"][1])
    if len(res) != N + 1:
        raise ParseError(f"#maxn {N} but {len(res)} residues")
    for r, i in res:
        if r >= prime:
            raise ParseError("residue not below the prime", i)
    return RunManifest(N, prime, [r for r, _ in res], RunOptions(prob, fact, seed))


def write_manifest(man: RunManifest, path: PathLike) -> None:
    Path(path).write_text(format_manifest(man), encoding="utf-8")


def read_manifest(path: PathLike, expected_prime: Optional[int] = None) -> RunManifest:
    return parse_manifest(Path(path).read_text(encoding="utf-8"), expected_prime)


def reference_table() -> SeriesTable:
    """p_0..p_36 for 1324, shipped with the package."""
    text = resources.files("pap1324").joinpath("data/reference_1324.txt").read_text(encoding="utf-8")
    return parse_series(text)


def naive_count(sig: Signature, factorize: bool = False) -> int:
    """Unmemoized recursion over the signature model; for cross-checking only."""
    from .signature import children, factor_split
    if sig.total == 0:
        return 1
    if factorize:
        parts = factor_split(sig)
        if len(parts) > 1:
            return math.prod(naive_count(p, True) for p in parts)
    return sum(naive_count(c, factorize) for c in children(sig))

