"""Pure-Python counting kernels; same algorithms and keys as the compiled core.

Signatures are flat here: ``below`` plus a tuple of ``(open, value, close)``
tokens.  Used when the extension is not built or PAP1324_PURE_PYTHON is set.
"""
from __future__ import annotations

import sys

NAME = "python"

_M64 = (1 << 64) - 1
_INT128 = (1 << 128) - 1


def mix64(z: int) -> int:
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _M64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _M64
    return z ^ (z >> 31)


def store_hash(seed: int, key: int) -> int:
    h = mix64((seed ^ 0x9E3779B97F4A7C15) & _M64)
    h = mix64(h ^ (key >> 64))
    return mix64(h ^ (key & _M64))


def _int_code(v):
    if v == 1:
        return 0, 2
    if v == 2:
        return 1, 2
    if v <= 10:
        return (2 << 3) | (v - 3), 5
    if v <= 74:
        return (3 << 6) | (v - 11), 8
    raise OverflowError("gap exceeds 74")


def key_of(below, tokens):
    t = below + sum(v for _, v, _ in tokens)
    if t > 63:
        raise OverflowError("total exceeds 63")
    bits, n = t, 6
    if t:
        bits, n = (bits << 1) | (below == 0), n + 1
        if below:
            code, k = _int_code(below)
            bits, n = ((bits << (k + 1)) | code) << 1, n + k + 2
        for o, v, c in tokens:
            code, k = _int_code(v)
            bits = (((bits << 1 | o) << k | code) << 1) | c
            n += k + 2
    if n > 128:
        raise OverflowError("signature needs more than 128 bits")
    return bits << (128 - n)


def _layout(tokens):
    gaps, open_of, top = [], {}, set()
    depth, start = 0, -1
    for i, (o, _, c) in enumerate(tokens):
        if o:
            if depth == 0:
                start = i
            depth += o
        elif depth == 0:
            gaps.append(i)
            top.add(i)
        if c:
            depth -= c
            if depth == 0:
                open_of[i] = start
    return gaps, open_of, top


def _below_child(below, tokens, a):
    b = below - 1 - a
    if b == 0:
        return a, tokens
    if tokens and tokens[0][0] == 0:
        return a, ((0, tokens[0][1] + b, 0),) + tokens[1:]
    return a, ((0, b, 0),) + tokens


def _gap_child(below, tokens, lay, j, a):
    gaps, open_of, top = lay
    g = tokens[j][1]
    b = g - 1 - a
    tail = b == 0 and j == len(tokens) - 1
    out = []
    if j > 0 or a > 0:
        out = [list(t) for t in tokens[:j]]
        if a > 0:
            out.append([0, a, 0])
        else:
            last = j - 1
            k = open_of[last]
            out[k][0] = 0
            if tail:
                out[last][2] = 0
            if k > 0 and (k - 1) in top:
                out[k - 1][1] += out[k][1]
                out[k - 1][2] = out[k][2]
                del out[k]
        if not tail:
            depth = 0
            for t in out:
                if t[0] == 0 and depth == 0:
                    t[0] = 1
                    break
                depth += t[0] - t[2]
            out[-1][2] = 1
    if b > 0:
        out.append([0, b, 0])
    return below, tuple(tuple(t) for t in out) + tokens[j + 1:]


def children_of(below, tokens):
    tokens = tuple(tuple(t) for t in tokens)
    out = [_below_child(below, tokens, a) for a in range(below)]
    lay = _layout(tokens)
    for j in lay[0]:
        for a in range(tokens[j][1]):
            out.append(_gap_child(below, tokens, lay, j, a))
    return out


class Store:
    """Memo table for one modulus (0 selects exact integer counting)."""

    def __init__(self, modulus: int, prob: float = 1.0, seed: int = 0):
        self.modulus = modulus
        self._table: dict = {}
        self._always = prob >= 1.0
        self._thresh = min(_M64, int(prob * 2.0 ** 64))
        self._seed = seed & _M64
        self.lookups = self.hits = self.stores = self.skips = 0

    def __len__(self):
        return len(self._table)

    def counters(self):
        return {"lookups": self.lookups, "hits": self.hits,
                "stores": self.stores, "skips": self.skips}

    def count(self, below, tokens, factorize=True):
        limit = sys.getrecursionlimit()
        if limit < 1000:
            sys.setrecursionlimit(1000)
        return self._count(below, tuple(tuple(t) for t in tokens), factorize)

    def _count(self, below, tokens, factorize):
        m = self.modulus
        if below == 0 and not tokens:
            return 1 % m if m else 1
        if factorize and below == 0 and tokens[0][0]:
            depth = 0
            for e, (o, _, c) in enumerate(tokens):
                depth += o - c
                if depth == 0:
                    break
            head = list(tokens[: e + 1])
            head[0] = (0,) + head[0][1:]
            head[e] = head[e][:2] + (0,)
            x = self._count(0, tuple(head), True) * self._count(0, tokens[e + 1:], True)
            return x % m if m else x
        key = key_of(below, tokens)
        self.lookups += 1
        val = self._table.get(key)
        if val is not None:
            self.hits += 1
            return val
        total = 0
        for a in range(below):
            total += self._count(*_below_child(below, tokens, a), factorize)
        lay = _layout(tokens)
        for j in lay[0]:
            for a in range(tokens[j][1]):
                total += self._count(*_gap_child(below, tokens, lay, j, a), factorize)
        if m:
            total %= m
        elif total > _INT128:
            raise OverflowError("count exceeds 128 bits")
        if self._always or store_hash(self._seed, key) < self._thresh:
            self._table[key] = total
            self.stores += 1
        else:
            self.skips += 1
        return total


def brute_count(n, pattern):
    pat = list(pattern)
    k = len(pat)
    head = [1 + sum(pat[j] < pat[i] for j in range(k - 1)) for i in range(k - 1)]
    max_last = pat[-1] == k
    perm = [0] * n
    used = [False] * (n + 1)

    def ends_at(p, t, ub):
        kp = len(p)
        last = perm[t]
        if last >= ub:
            return False
        chosen = [0] * kp

        def search(idx, start):
            if idx == kp - 1:
                return True
            for pos in range(start, t):
                val = perm[pos]
                if val >= ub or (val < last) != (p[idx] < p[-1]):
                    continue
                if all((chosen[q] < val) == (p[q] < p[idx]) for q in range(idx)):
                    chosen[idx] = val
                    if search(idx + 1, pos + 1):
                        return True
            return False

        return search(0, 0)

    def rec(t):
        if t == n:
            return 1
        count = 0
        for x in range(1, n + 1):
            if used[x]:
                continue
            perm[t] = x
            used[x] = True
            dead = t + 1 >= k and ends_at(pat, t, n + 1)
            if not dead and max_last and t + 2 >= k:
                maxrem = next((y for y in range(n, 0, -1) if not used[y]), 0)
                if maxrem:
                    dead = ends_at(head, t, maxrem)
            if not dead:
                count += rec(t + 1)
            used[x] = False
        return count

    return rec(0)
