# distutils: language = c++
# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled counting kernels (C++ core in _core/engine.hpp)."""

from libc.stdint cimport uint8_t, uint64_t
from libcpp cimport bool as cbool
from libcpp.vector cimport vector

NAME = "cython"


cdef extern from "_core/engine.hpp" namespace "pap":

    cdef cppclass Sig:
        int below
        int m
        int total
        uint8_t v[64]
        uint8_t o[64]
        uint8_t c[64]

    cdef cppclass Counters:
        uint64_t lookups, hits, stores, skips

    cdef cppclass Counter:
        Counter(uint64_t modulus, double prob, uint64_t seed) except +
        Counters& counters()
        size_t size()

    cdef cppclass Brute:
        Brute(int n, vector[int]& pat) except +
        uint64_t run() nogil

    void children(const Sig& s, vector[Sig]& out) except +


cdef extern from *:
    """
    static inline void pap_count_split(pap::Counter* c, const pap::Sig& s, bool f,
                                       uint64_t* hi, uint64_t* lo) {
        pap::u128 r = c->count(s, f);
        *hi = (uint64_t)(r >> 64);
        *lo = (uint64_t)r;
    }
    static inline void pap_key_split(const pap::Sig& s, uint64_t* hi, uint64_t* lo) {
        pap::u128 r = pap::encode(s);
        *hi = (uint64_t)(r >> 64);
        *lo = (uint64_t)r;
    }
    """
    void pap_count_split(Counter* c, const Sig& s, cbool f, uint64_t* hi, uint64_t* lo) except +
    void pap_key_split(const Sig& s, uint64_t* hi, uint64_t* lo) except +


cdef int _fill(Sig* s, int below, tokens) except -1:
    cdef int i = 0
    cdef int tot = below
    if len(tokens) > 63:
        raise OverflowError("too many tokens")
    s.below = below
    for o, v, c in tokens:
        s.o[i] = o
        s.v[i] = v
        s.c[i] = c
        tot += v
        i += 1
    s.m = i
    s.total = tot
    return 0


cdef tuple _unfill(Sig& s):
    cdef int i
    toks = []
    for i in range(s.m):
        toks.append((s.o[i], s.v[i], s.c[i]))
    return s.below, tuple(toks)


def key_of(int below, tokens):
    """Left-aligned 128-bit memo key of a flat signature."""
    cdef Sig s
    cdef uint64_t hi, lo
    _fill(&s, below, tokens)
    pap_key_split(s, &hi, &lo)
    return (int(hi) << 64) | int(lo)


def children_of(int below, tokens):
    cdef Sig s
    cdef vector[Sig] out
    _fill(&s, below, tokens)
    children(s, out)
    return [_unfill(out[i]) for i in range(out.size())]


cdef class Store:
    """Memo table for one modulus (0 selects exact 128-bit counting)."""

    cdef Counter* ptr
    cdef readonly uint64_t modulus

    def __cinit__(self, uint64_t modulus, double prob=1.0, uint64_t seed=0):
        self.ptr = new Counter(modulus, prob, seed)
        self.modulus = modulus

    def __dealloc__(self):
        del self.ptr

    def count(self, int below, tokens, bint factorize=True):
        cdef Sig s
        cdef uint64_t hi, lo
        _fill(&s, below, tokens)
        pap_count_split(self.ptr, s, factorize, &hi, &lo)
        return (int(hi) << 64) | int(lo)

    def __len__(self):
        return self.ptr.size()

    def counters(self):
        cdef Counters c = self.ptr.counters()
        return {"lookups": c.lookups, "hits": c.hits, "stores": c.stores, "skips": c.skips}


def brute_count(int n, pattern):
    cdef vector[int] pat = list(pattern)
    cdef Brute* b = new Brute(n, pat)
    cdef uint64_t r
    try:
        with nogil:
            r = b.run()
    finally:
        del b
    return r
