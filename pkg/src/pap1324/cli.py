"""Command-line workbench: enumeration, verification, signature tools, analysis.

Exit codes: 0 success, 1 verification mismatch, 2 usage error, 3 integrity failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import sys
from typing import List, Optional

from . import BACKEND
from . import analysis as A
from . import diffapprox as DA
from . import enumerator as E
from . import oracles as O
from . import signature as S
from .errors import (BlockedPrefix, BoundExceeded, CheckFailed, DomainError, EmptySignature,
                     EncodingOverflow, InsufficientPrimes, MalformedKey, ModulusClash, ParseError,
                     SignatureSyntaxError, SizeTooLarge)

OK, MISMATCH, USAGE, INTEGRITY = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _fmt(v, digits: int) -> str:
    if isinstance(v, int):
        return str(v)
    return format(float(v), f".{digits}g")


def _csv(header: List[str], rows, digits: int, out=None) -> None:
    w = csv.writer(out or sys.stdout, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(v, digits) if not isinstance(v, str) else v for v in r])


def _floats(text: str, name: str, count: Optional[int] = None) -> list:
    try:
        vals = [float(x) for x in text.split(",")]
    except ValueError:
        raise UsageError(f"--{name} expects comma-separated numbers") from None
    if count is not None and len(vals) != count:
        raise UsageError(f"--{name} expects {count} values")
    return vals


# ---------------------------------------------------------------------------
# enumerate / crt-combine

def run_enumerate(args) -> int:
    if not 0 <= args.n <= S.MAX_TOTAL:
        raise UsageError(f"--n must be in 0..{S.MAX_TOTAL}")
    if not 0.0 < args.memo_prob <= 1.0:
        raise UsageError("--memo-prob must be in (0, 1]")
    if not 0 <= args.seed < 1 << 64:
        raise UsageError("--seed must fit in 64 bits")
    opts = E.RunOptions(args.memo_prob, args.factorize == "on", args.seed, args.backend)
    if args.mode == "bigint":
        table = E.enumerate_series(args.n, "bigint", opts)
    else:
        if args.primes == "auto":
            primes = list(E.DEFAULT_PRIMES)
        else:
            try:
                primes = [int(p) for p in args.primes.split(",")]
            except ValueError:
                raise UsageError("--primes expects comma-separated integers or 'auto'") from None
            for p in primes:
                if p >= 1 << 62 or not E.is_prime(p):
                    raise UsageError(f"{p} is not a prime below 2**62")
        need = max(E.required_prime_count(args.n, primes), 2)
        table = E.enumerate_series(args.n, "crt", opts, primes, check=len(primes) > need,
                                   manifest_dir=args.manifest_dir)
    text = E.format_series(table)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return OK


def run_crt_combine(args) -> int:
    mans = [E.read_manifest(p) for p in args.inputs]
    check = E.read_manifest(args.check) if args.check else None
    table = E.crt_combine(mans, check)
    text = E.format_series(table)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return OK


# ---------------------------------------------------------------------------
# verify

PATTERNS = {"1324": (1, 3, 2, 4), "1234": (1, 2, 3, 4), "1342": (1, 3, 4, 2)}


def run_verify(args) -> int:
    if not 0 <= args.max_n <= O.BRUTE_MAX_N:
        raise UsageError(f"--max-n must be in 0..{O.BRUTE_MAX_N} (brute-force bound)")
    pat = PATTERNS[args.pattern]
    if args.pattern == "1324":
        store = E.MemoStore(0)
        fast = lambda n: store.count(n, ())
        label = "engine"
    else:
        fast = O.p1234 if args.pattern == "1234" else O.p1342
        label = "formula"
    rows, first_bad = [], None
    for n in range(args.max_n + 1):
        a, b = fast(n), O.brute_count(pat, n)
        rows.append((n, a, b, "yes" if a == b else "NO"))
        if a != b and first_bad is None:
            first_bad = n
    _csv(["n", label, "brute", "match"], rows, 12)
    if first_bad is not None:
        print(f"mismatch first at n={first_bad}", file=sys.stderr)
        return MISMATCH
    return OK


# ---------------------------------------------------------------------------
# sig

def run_sig(args) -> int:
    act = args.action
    if act == "from-prefix":
        if args.n is None or args.prefix is None:
            raise UsageError("from-prefix needs --n and --prefix")
        try:
            prefix = [int(v) for v in args.prefix.split(",")]
        except ValueError:
            raise UsageError("--prefix expects comma-separated integers") from None
        print(S.format_signature(S.prefix_to_signature(args.n, prefix)))
        return OK
    if args.text is None:
        raise UsageError(f"sig {act} needs a signature argument")
    if act == "decode":
        print(S.format_signature(S.decode(args.text)))
        return OK
    sig = S.parse(args.text)
    if act == "canonical":
        print(S.format_signature(sig))
    elif act == "children":
        for c in S.children(sig):
            print(S.format_signature(c))
    elif act == "count":
        print(E.count_signature(sig, E.MemoStore(0)).residue)
    elif act == "encode":
        print(S.encode(sig).hex())
    return OK


# ---------------------------------------------------------------------------
# analyze

def read_series_input(path: Optional[str]) -> A.RealSeries:
    """Series file (n<TAB>value) or CSV with an (n, value) header, from a path or stdin."""
    if path in (None, "-"):
        text = sys.stdin.read()
    else:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines:
        raise ParseError("empty input")
    if "," in lines[0]:
        rows = list(csv.reader(io.StringIO("\n".join(lines))))
        body = rows[1:] if not rows[0][0].strip().lstrip("-").isdigit() else rows
        ns, vals = [], []
        for i, r in enumerate(body, 1):
            try:
                ns.append(int(r[0]))
                vals.append(float(r[1]))
            except (ValueError, IndexError):
                raise ParseError("expected 'n,value' rows", i) from None
        if ns != list(range(ns[0], ns[0] + len(ns))):
            raise ParseError("indices are not contiguous")
        return A.RealSeries(vals, ns[0])
    table = E.parse_series(text)
    return A.RealSeries(table.coefficients, 0)


def _need(args, *names):
    for n in names:
        if getattr(args, n) is None:
            raise UsageError(f"analyze {args.what} needs --{n.replace('_', '-')}")


def run_analyze(args) -> int:
    d = args.digits
    what = args.what
    if what == "asym":
        _need(args, "params", "n")
        B, mu, mu1, sigma, g = _floats(args.params, "params", 5)
        lg, mant = O.asym_eval(O.AsymptoticParams(B, mu, mu1, sigma, g), args.n)
        _csv(["n", "log10", "mantissa"], [(args.n, lg, mant)], d)
        print(f"~{mant:.2f}x10^{int(lg // 1)} (10^{lg:.1f})", file=sys.stderr)
        return OK
    s = read_series_input(args.input)
    if args.renormalize:
        s = A.renormalize(s, dps=60)
    if what == "ratios":
        _csv(["n", "value"], A.ratios(s).items(), d)
    elif what == "intercepts":
        _csv(["n", "value"], A.pair_extrapolate(A.ratios(s), args.t).items(), d)
    elif what == "sigma":
        if args.mu is not None:
            _csv(["n", "one_minus_sigma"], A.sigma_local_given_mu(A.ratios(s), args.mu).items(), d)
        else:
            rs = A.sigma_free(s)
            grad = dict(A.loglog_gradient(rs).items())
            _csv(["n", "r_sigma", "gradient"],
                 [(n, v, grad.get(n, "")) for n, v in rs.items()], d)
    elif what in ("fit3", "fit4", "fitlog3"):
        if what == "fit3":
            _need(args, "mu")
            res = A.fit_ratio_triple(A.ratios(s), args.mu)
        elif what == "fit4":
            res = A.fit_log_quad(s, args.sigma)
        else:
            _need(args, "mu")
            res = A.fit_log_triple_mu(s, args.mu, args.sigma)
        _csv(["k", *res.basis], [(k, *res.windows[k]) for k in sorted(res.windows)], d)
    elif what == "transform":
        _csv(["n", "value"], A.renormalize(s).items(), d)
    elif what == "bs":
        _need(args, "w")
        tab = A.bs_tableau(A.ratios(s), args.w, args.lmax)
        rows = [(L, n, v) for L, row in enumerate(tab.rows) for n, v in row.items()]
        _csv(["L", "n", "value"], rows, d)
    elif what == "amplitude":
        _need(args, "params")
        B, mu, mu1, sigma, g = _floats(args.params, "params", 5)
        amp = A.amplitude_sequence(s, O.AsymptoticParams(B, mu, mu1, sigma, g))
        ext = dict(A.pair_extrapolate(amp, 1.0).items())
        _csv(["n", "amplitude", "extrapolated"], [(n, v, ext.get(n, "")) for n, v in amp.items()], d)
    elif what == "da":
        coeffs = s.values
        lo = 0 if args.lmin is None else args.lmin
        Ls = [None] if args.homogeneous else range(lo, args.lmax + 1)
        res = DA.scan(coeffs, args.order, Ls, spread=args.spread)
        sys.stdout.write(res.to_csv(d))
        print(f"verdict: {res.verdict()} (relative spread {res.rel_spread:.3g}, "
              f"defective {res.defective_fraction:.2f})", file=sys.stderr)
    return OK


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="pap1324", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s ({BACKEND} kernel)")
    sub = p.add_subparsers(dest="cmd", required=True)

    e = sub.add_parser("enumerate", help="count 1324-avoiders p_0..p_N")
    e.add_argument("--n", type=int, required=True)
    e.add_argument("--mode", choices=["crt", "bigint"], default="crt")
    e.add_argument("--primes", default="auto")
    e.add_argument("--memo-prob", type=float, default=1.0)
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--factorize", choices=["on", "off"], default="on")
    e.add_argument("--backend", choices=["cython", "python"], default=None)
    e.add_argument("--out")
    e.add_argument("--manifest-dir")
    e.set_defaults(func=run_enumerate)

    v = sub.add_parser("verify", help="compare against brute force")
    v.add_argument("--max-n", type=int, required=True)
    v.add_argument("--pattern", choices=sorted(PATTERNS), default="1324")
    v.set_defaults(func=run_verify)

    s = sub.add_parser("sig", help="signature tools")
    s.add_argument("action", choices=["canonical", "children", "count", "encode", "decode",
                                      "from-prefix"])
    s.add_argument("text", nargs="?")
    s.add_argument("--n", type=int)
    s.add_argument("--prefix")
    s.set_defaults(func=run_sig)

    a = sub.add_parser("analyze", help="series analysis (CSV to stdout)")
    a.add_argument("what", choices=["ratios", "intercepts", "sigma", "fit3", "fit4", "fitlog3",
                                    "transform", "bs", "da", "amplitude", "asym"])
    a.add_argument("--in", dest="input", help="series file or CSV; stdin when omitted")
    a.add_argument("--mu", type=float)
    a.add_argument("--w", type=float)
    a.add_argument("--t", type=float, default=0.5)
    a.add_argument("--sigma", type=float, default=0.5)
    a.add_argument("--order", type=int, default=3)
    a.add_argument("--lmax", type=int, default=4)
    a.add_argument("--lmin", type=int)
    a.add_argument("--spread", type=int, default=8, help="DA: range of equation counts")
    a.add_argument("--homogeneous", action="store_true", help="DA: no inhomogeneous term")
    a.add_argument("--renormalize", action="store_true",
                   help="apply the log-scale renormalization (60 digits) first")
    a.add_argument("--params", help="B,mu,mu1,sigma,g")
    a.add_argument("--n", type=int)
    a.add_argument("--digits", type=int, default=12)
    a.set_defaults(func=run_analyze)

    c = sub.add_parser("crt-combine", help="reconstruct exact counts from residue manifests")
    c.add_argument("--in", dest="inputs", nargs="+", required=True)
    c.add_argument("--check")
    c.add_argument("--out")
    c.set_defaults(func=run_crt_combine)
    return p


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)  # exits with 2 on bad flags
    if getattr(args, "digits", 12) < 1 or getattr(args, "digits", 12) > 40:
        parser.error("--digits must be in 1..40")
    try:
        return args.func(args)
    except CheckFailed as e:
        print(f"integrity failure: {e}", file=sys.stderr)
        return INTEGRITY
    except (UsageError, SignatureSyntaxError, EmptySignature, BlockedPrefix, EncodingOverflow,
            MalformedKey, ModulusClash, BoundExceeded, InsufficientPrimes, ParseError,
            SizeTooLarge, DomainError, OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
