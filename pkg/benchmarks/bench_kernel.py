"""Compare the compiled and pure-Python counting kernels.

    python benchmarks/bench_kernel.py [--max-n 14] [--repeat 3]

Times a full p_0..p_n run (exact arithmetic, fresh memo store) and the brute
force oracle on each backend, and prints one CSV row per measurement.
"""
import argparse
import csv
import sys
import time

from pap1324 import _pykernel

try:
    from pap1324 import _ckernel
except ImportError:
    _ckernel = None


def time_series(k, n, repeat):
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        st = k.Store(0)
        value = [st.count(m, ()) for m in range(n + 1)][-1]
        best = min(best, time.perf_counter() - t)
    return best, value, len(st)


def time_brute(k, n, repeat):
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        value = k.brute_count(n, (1, 3, 2, 4))
        best = min(best, time.perf_counter() - t)
    return best, value


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--max-n", type=int, default=14)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    kernels = [_pykernel] + ([_ckernel] if _ckernel else [])
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["task", "n", "backend", "seconds", "value", "speedup"])
    for n in range(10, args.max_n + 1, 2):
        res = {k.NAME: time_series(k, n, args.repeat) for k in kernels}
        assert len({v for _, v, _ in res.values()}) == 1
        base = res["python"][0]
        for name, (sec, val, size) in res.items():
            w.writerow(["series", n, name, f"{sec:.4f}", val, f"{base / sec:.1f}"])
    for n in (8, 9):
        res = {k.NAME: time_brute(k, n, args.repeat) for k in kernels}
        base = res["python"][0]
        for name, (sec, val) in res.items():
            w.writerow(["brute", n, name, f"{sec:.4f}", val, f"{base / sec:.1f}"])


if __name__ == "__main__":
    main()
