"""Canonical signatures for prefixes of 1324-avoiding permutations.

A signature ``below,rest`` records how the values not yet placed relate to the
prefix:

* ``below`` counts the remaining values smaller than the prefix minimum;
* ``rest`` lists the remaining values above the minimum in increasing order,
  as a sequence of items.  An ``int`` item is a run of available values (a
  gap); a ``tuple`` item is a bracket of values blocked by a 13 pair until
  every value to its right has been placed.

Text form follows the usual notation: ``4,[3]1[2]6``, ``,3``, ``2[1]1``.  The
comma is dropped when a bracket follows it immediately, and a signature with
an empty ``rest`` is written as a bare integer (a fresh problem).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence, Union

from .errors import (
    BlockedPrefix,
    EmptySignature,
    EncodingOverflow,
    MalformedKey,
    SignatureSyntaxError,
)

Item = Union[int, tuple]

MAX_TOTAL = 63
MAX_GAP = 74
KEY_BITS = 128


@dataclass(frozen=True)
class Signature:
    below: int
    rest: tuple = ()

    @property
    def total(self) -> int:
        return self.below + _items_total(self.rest)

    @property
    def is_fresh(self) -> bool:
        return not self.rest

    def __str__(self) -> str:
        return format_signature(self)

    def __repr__(self) -> str:
        return f"Signature({format_signature(self)!r})"


def _items_total(items: Iterable[Item]) -> int:
    s = 0
    for it in items:
        s += it if isinstance(it, int) else _items_total(it)
    return s


def total(sig: Signature) -> int:
    return sig.total


# ---------------------------------------------------------------------------
# canonical form

def _append_gap(out: list, g: int) -> None:
    if g == 0:
        return
    if out and isinstance(out[-1], int):
        out[-1] += g
    else:
        out.append(g)


def _extend(out: list, items: Iterable[Item]) -> None:
    for it in items:
        if isinstance(it, int):
            _append_gap(out, it)
        else:
            out.append(it)


def _norm_level(items: Iterable[Item]) -> list:
    out: list = []
    for it in items:
        if isinstance(it, int):
            if it < 0:
                raise ValueError(f"negative gap {it}")
            _append_gap(out, it)
        else:
            out.extend(_norm_bracket(it))
    return out


def _norm_bracket(contents: Iterable[Item]) -> list:
    """Normalise one bracket; returns the list of brackets replacing it."""
    inner = _norm_level(contents)
    if not inner:
        return []
    # [b[c]] -> [bc]
    while isinstance(inner[-1], tuple):
        last = inner.pop()
        _extend(inner, last)
    # [[b]c] -> [b][c]
    out = []
    start = 0
    while isinstance(inner[start], tuple):
        out.append(inner[start])
        start += 1
    out.append(tuple(inner[start:]))
    return out


def canonicalize(raw) -> Signature:
    """Bring a raw ``(below, items)`` pair (or a Signature) to canonical form.

    Items may be nested lists or tuples with zero gaps, adjacent gaps, empty
    or redundant brackets and a trailing bracket; all are normalised away.
    """
    if isinstance(raw, Signature):
        below, items = raw.below, raw.rest
    else:
        below, items = raw
    if below < 0:
        raise ValueError(f"negative below count {below}")
    rest = _norm_level(items)
    while rest and isinstance(rest[-1], tuple):
        last = rest.pop()
        _extend(rest, last)
    return Signature(int(below), tuple(rest))


def is_canonical(sig: Signature) -> bool:
    return canonicalize(sig) == sig


# ---------------------------------------------------------------------------
# transitions

def _sizes(rest: Sequence[Item]) -> list:
    return [it if isinstance(it, int) else _items_total(it) for it in rest]


def place(sig: Signature, rank: int) -> Signature:
    """Child obtained by placing the remaining value of the given rank (0-based)."""
    if not 0 <= rank < sig.total:
        raise IndexError(f"rank {rank} out of range for total {sig.total}")
    if rank < sig.below:
        a, b = rank, sig.below - 1 - rank
        return canonicalize((a, (b,) + sig.rest))
    pos = rank - sig.below
    for j, (item, size) in enumerate(zip(sig.rest, _sizes(sig.rest))):
        if pos < size:
            if not isinstance(item, int):
                raise BlockedPrefix(f"rank {rank} is blocked in {sig}")
            a, b = pos, item - 1 - pos
            wrapped = sig.rest[:j] + (a,)
            return canonicalize((sig.below, (wrapped, b) + sig.rest[j + 1:]))
        pos -= size
    raise AssertionError("unreachable")


def available_ranks(sig: Signature) -> list:
    ranks = list(range(sig.below))
    pos = sig.below
    for item, size in zip(sig.rest, _sizes(sig.rest)):
        if isinstance(item, int):
            ranks.extend(range(pos, pos + size))
        pos += size
    return ranks


def children(sig: Signature) -> list:
    """One child per legal placement; duplicates are kept."""
    if sig.total == 0:
        raise EmptySignature("the empty signature has no children")
    return [place(sig, r) for r in available_ranks(sig)]


def factor_split(sig: Signature) -> list:
    """Split ``[a]b`` into independent factors ``,a`` and ``,b``."""
    if sig.below == 0 and sig.rest and isinstance(sig.rest[0], tuple):
        head = canonicalize((0, sig.rest[0]))
        tail = canonicalize((0, sig.rest[1:]))
        return factor_split(head) + factor_split(tail)
    return [sig]


def prefix_to_signature(n: int, prefix: Sequence[int]) -> Signature:
    if n > MAX_TOTAL:
        raise EncodingOverflow(f"n={n} exceeds {MAX_TOTAL}")
    if len(set(prefix)) != len(prefix) or any(not 1 <= v <= n for v in prefix):
        raise ValueError("prefix must hold distinct values in 1..n")
    sig = Signature(n)
    remaining = list(range(1, n + 1))
    for v in prefix:
        rank = remaining.index(v)
        sig = place(sig, rank)
        remaining.pop(rank)
    return sig


def all_signatures(n: int) -> set:
    """Every canonical signature reachable from the fresh signature ``n``."""
    seen = {Signature(n)}
    frontier = [Signature(n)]
    while frontier:
        nxt = []
        for s in frontier:
            if s.total == 0:
                continue
            for c in children(s):
                if c not in seen:
                    seen.add(c)
                    nxt.append(c)
        frontier = nxt
    return seen


# ---------------------------------------------------------------------------
# text form

def _format_items(items: Sequence[Item]) -> str:
    parts = []
    for it in items:
        if isinstance(it, int):
            parts.append(str(it))
        else:
            parts.append("[" + _format_items(it) + "]")
    return "".join(parts)


def format_signature(sig: Signature) -> str:
    if not sig.rest:
        return str(sig.below) if sig.below else ","
    head = str(sig.below) if sig.below else ""
    body = _format_items(sig.rest)
    if isinstance(sig.rest[0], tuple):
        return head + body
    return head + "," + body


def _tokenize(text: str) -> list:
    toks = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch.isdigit():
            j = i
            while j < len(text) and text[j].isdigit():
                j += 1
            toks.append(int(text[i:j]))
            i = j
        elif ch in "[],":
            toks.append(ch)
            i += 1
        else:
            raise SignatureSyntaxError(f"unexpected character {ch!r} at {i}")
    return toks


def parse(text: str) -> Signature:
    """Parse signature text (comma optional before a bracket); canonicalises."""
    toks = _tokenize(text.strip())
    if not toks:
        raise SignatureSyntaxError("empty signature text")
    below = 0
    i = 0
    if isinstance(toks[0], int):
        below = toks[0]
        i = 1
        if i < len(toks) and toks[i] == ",":
            i += 1
        elif i < len(toks) and toks[i] != "[":
            raise SignatureSyntaxError(f"expected ',' or '[' after {below}")
    elif toks[0] == ",":
        i = 1
    stack: list = [[]]
    for t in toks[i:]:
        if t == "[":
            stack.append([])
        elif t == "]":
            if len(stack) == 1:
                raise SignatureSyntaxError("unbalanced ']'")
            inner = stack.pop()
            if not inner:
                raise SignatureSyntaxError("empty bracket")
            stack[-1].append(tuple(inner))
        elif t == ",":
            raise SignatureSyntaxError("misplaced ','")
        else:
            if stack[-1] and isinstance(stack[-1][-1], int):
                raise SignatureSyntaxError("adjacent integers")
            stack[-1].append(t)
    if len(stack) != 1:
        raise SignatureSyntaxError("unbalanced '['")
    return canonicalize((below, stack[0]))


# ---------------------------------------------------------------------------
# flat token form: one (open, value, close) triple per integer of ``rest``

def to_tokens(sig: Signature) -> list:
    out: list = []

    def walk(items):
        for it in items:
            if isinstance(it, int):
                out.append([0, it, 0])
            else:
                first = len(out)
                walk(it)
                out[first][0] += 1
                out[-1][2] += 1

    walk(sig.rest)
    return [tuple(t) for t in out]


def from_tokens(below: int, tokens: Iterable[Sequence[int]]) -> Signature:
    stack: list = [[]]
    for o, v, c in tokens:
        for _ in range(o):
            stack.append([])
        stack[-1].append(v)
        for _ in range(c):
            if len(stack) == 1:
                raise MalformedKey("unbalanced closing bracket")
            inner = stack.pop()
            stack[-1].append(tuple(inner))
    if len(stack) != 1:
        raise MalformedKey("unbalanced opening bracket")
    return Signature(below, tuple(stack[0]))


# ---------------------------------------------------------------------------
# binary codec

@dataclass(frozen=True)
class BitKey:
    """Bit string of at most 128 bits, most significant bit first."""

    bits: int
    length: int

    def as_int(self) -> int:
        """Left-aligned 128-bit integer; unique per signature."""
        return self.bits << (KEY_BITS - self.length)

    def hex(self) -> str:
        return f"{self.as_int():032x}"

    def bitstring(self) -> str:
        return format(self.bits, f"0{self.length}b") if self.length else ""

    @classmethod
    def from_hex(cls, text: str) -> "BitKey":
        try:
            value = int(text, 16)
        except ValueError as exc:
            raise MalformedKey(f"not hexadecimal: {text!r}") from exc
        if value >> KEY_BITS:
            raise MalformedKey("key wider than 128 bits")
        return cls(value, KEY_BITS)


def _int_code(v: int) -> tuple:
    if v == 1:
        return 0b00, 2
    if v == 2:
        return 0b01, 2
    if v <= 10:
        return (0b10 << 3) | (v - 3), 5
    if v <= MAX_GAP:
        return (0b11 << 6) | (v - 11), 8
    raise EncodingOverflow(f"gap {v} exceeds {MAX_GAP}")


def encode(sig: Signature) -> BitKey:
    t = sig.total
    if t > MAX_TOTAL:
        raise EncodingOverflow(f"total {t} exceeds {MAX_TOTAL}")
    bits, length = t, 6
    if t:
        bits = (bits << 1) | (sig.below == 0)
        length += 1
        toks = to_tokens(sig)
        if sig.below:
            toks.insert(0, (0, sig.below, 0))
        for o, v, c in toks:
            code, n = _int_code(v)
            bits = (((bits << 1 | o) << n | code) << 1) | c
            length += n + 2
    if length > KEY_BITS:
        raise EncodingOverflow(f"{sig} needs {length} bits")
    return BitKey(bits, length)


class _Reader:
    def __init__(self, value: int, length: int):
        self.value, self.length, self.pos = value, length, 0

    def take(self, n: int) -> int:
        if self.pos + n > self.length:
            raise MalformedKey("key ends mid-field")
        self.pos += n
        return (self.value >> (self.length - self.pos)) & ((1 << n) - 1)


def decode(key: Union[BitKey, int, str]) -> Signature:
    if isinstance(key, str):
        key = BitKey.from_hex(key)
    elif isinstance(key, int):
        key = BitKey(key, KEY_BITS)
    r = _Reader(key.bits, key.length)
    t = r.take(6)
    toks = []
    if t:
        comma_first = r.take(1)
        s = 0
        while s < t:
            o = r.take(1)
            head = r.take(2)
            if head < 2:
                v = head + 1
            elif head == 2:
                v = 3 + r.take(3)
            else:
                v = 11 + r.take(6)
            c = r.take(1)
            toks.append((o, v, c))
            s += v
        if s != t:
            raise MalformedKey("integers overrun the recorded total")
    if r.pos < r.length and key.bits & ((1 << (r.length - r.pos)) - 1):
        raise MalformedKey("trailing bits after the last integer")
    below = 0
    if t and not comma_first:
        o, below, c = toks.pop(0)
        if o or c:
            raise MalformedKey("bracket flags on the below count")
    sig = from_tokens(below, toks)
    if not is_canonical(sig):
        raise MalformedKey(f"key decodes to non-canonical {sig}")
    return sig

