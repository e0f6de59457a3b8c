// Memoised signature counting and brute-force pattern counting.
//
// A signature is held flat: `below` plus one (open, value, close) token per
// integer of the bracketed part, in increasing-value order.  Canonical form
// guarantees open/close are 0 or 1 per token.
#pragma once

#include <cstdint>
#include <cstring>
#include <memory>
#include <stdexcept>
#include <vector>

namespace pap {

typedef unsigned __int128 u128;

const int MAX_TOTAL = 63;
const int MAX_GAP = 74;

struct Sig {
    int below;
    int m;
    int total;
    uint8_t v[MAX_TOTAL + 1];
    uint8_t o[MAX_TOTAL + 1];
    uint8_t c[MAX_TOTAL + 1];
};

inline uint64_t mix64(uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline uint64_t store_hash(uint64_t seed, u128 key) {
    uint64_t h = mix64(seed ^ 0x9E3779B97F4A7C15ULL);
    h = mix64(h ^ (uint64_t)(key >> 64));
    return mix64(h ^ (uint64_t)key);
}

struct BitWriter {
    u128 acc = 0;
    int len = 0;
    void put(uint64_t bits, int n) {
        acc = (acc << n) | (u128)bits;
        len += n;
    }
};

inline int int_bits(int v) { return v <= 2 ? 2 : (v <= 10 ? 5 : 8); }

inline void put_int(BitWriter& w, int v) {
    if (v == 1) w.put(0, 2);
    else if (v == 2) w.put(1, 2);
    else if (v <= 10) w.put((2u << 3) | (unsigned)(v - 3), 5);
    else if (v <= MAX_GAP) w.put((3u << 6) | (unsigned)(v - 11), 8);
    else throw std::overflow_error("gap exceeds 74");
}

// Left-aligned 128-bit key; layout matches signature.encode.
inline u128 encode(const Sig& s) {
    if (s.total > MAX_TOTAL) throw std::overflow_error("total exceeds 63");
    BitWriter w;
    w.put((uint64_t)s.total, 6);
    if (s.total) {
        w.put(s.below == 0, 1);
        if (s.below) {
            w.put(0, 1);
            put_int(w, s.below);
            w.put(0, 1);
        }
        for (int i = 0; i < s.m; ++i) {
            if (w.len + int_bits(s.v[i]) + 2 > 128) throw std::overflow_error("signature needs more than 128 bits");
            w.put(s.o[i], 1);
            put_int(w, s.v[i]);
            w.put(s.c[i], 1);
        }
    }
    if (w.len > 128) throw std::overflow_error("signature needs more than 128 bits");
    return w.acc << (128 - w.len);
}

inline void push_tok(Sig& d, int v, int o, int c) {
    d.v[d.m] = (uint8_t)v;
    d.o[d.m] = (uint8_t)o;
    d.c[d.m] = (uint8_t)c;
    d.m++;
}

// Placement of a value below the current minimum, with a values under it.
inline void below_child(const Sig& s, int a, Sig& d) {
    int b = s.below - 1 - a;
    d.below = a;
    d.total = s.total - 1;
    d.m = 0;
    int i = 0;
    if (b > 0) {
        if (s.m > 0 && s.o[0] == 0) {
            // first token is a top-level gap: merge
            push_tok(d, s.v[0] + b, 0, 0);
            i = 1;
        } else {
            push_tok(d, b, 0, 0);
        }
    }
    for (; i < s.m; ++i) push_tok(d, s.v[i], s.o[i], s.c[i]);
}

// Top-level structure of a signature: gap tokens and bracket spans.
struct Layout {
    int ngaps;
    int gap[MAX_TOTAL + 1];           // token index of each top-level gap
    int open_of[MAX_TOTAL + 1];       // for a token closing a top-level bracket: its opening token
    bool top_gap[MAX_TOTAL + 1];
};

inline void layout(const Sig& s, Layout& L) {
    L.ngaps = 0;
    int depth = 0, start = -1;
    for (int i = 0; i < s.m; ++i) {
        L.open_of[i] = -1;
        L.top_gap[i] = false;
        if (s.o[i]) {
            if (depth == 0) start = i;
            depth += s.o[i];
        } else if (depth == 0) {
            L.gap[L.ngaps++] = i;
            L.top_gap[i] = true;
        }
        if (s.c[i]) {
            depth -= s.c[i];
            if (depth == 0) L.open_of[i] = start;
        }
    }
}

// Placement inside the top-level gap at token j, with a values of the gap under it.
inline void gap_child(const Sig& s, const Layout& L, int j, int a, Sig& d) {
    int b = s.v[j] - 1 - a;
    bool tail = (b == 0 && j == s.m - 1);
    d.below = s.below;
    d.total = s.total - 1;
    d.m = 0;
    if (j > 0 || a > 0) {
        // wrapped part: tokens[0..j-1] followed by gap a
        for (int i = 0; i < j; ++i) push_tok(d, s.v[i], s.o[i], s.c[i]);
        int last;
        if (a > 0) {
            push_tok(d, a, 0, 0);
            last = d.m - 1;
        } else {
            // wrapped part ends with a bracket: drop it ([b[c]] -> [bc])
            last = j - 1;
            int k = L.open_of[last];
            d.o[k] = 0;
            if (tail) d.c[last] = 0;
            if (k > 0 && L.top_gap[k - 1]) {
                // the unwrapped contents start with a gap that meets a top-level gap
                d.v[k - 1] = (uint8_t)(d.v[k - 1] + d.v[k]);
                d.c[k - 1] = d.c[k];
                for (int i = k; i < d.m - 1; ++i) {
                    d.v[i] = d.v[i + 1];
                    d.o[i] = d.o[i + 1];
                    d.c[i] = d.c[i + 1];
                }
                d.m--;
                last--;
            }
        }
        if (!tail) {
            // new bracket opens at the first top-level gap of the wrapped part ([[b]c] -> [b][c])
            int depth = 0, first = -1;
            for (int i = 0; i <= last; ++i) {
                if (d.o[i] == 0 && depth == 0) { first = i; break; }
                depth += d.o[i];
                depth -= d.c[i];
            }
            d.o[first] = 1;
            d.c[last] = 1;
        }
    }
    if (b > 0) push_tok(d, b, 0, 0);
    for (int i = j + 1; i < s.m; ++i) push_tok(d, s.v[i], s.o[i], s.c[i]);
}

// All children in placement order (below values first, then top-level gaps).
inline void children(const Sig& s, std::vector<Sig>& out) {
    out.clear();
    Sig d;
    for (int a = 0; a < s.below; ++a) {
        below_child(s, a, d);
        out.push_back(d);
    }
    Layout L;
    layout(s, L);
    for (int g = 0; g < L.ngaps; ++g) {
        int j = L.gap[g];
        for (int a = 0; a < s.v[j]; ++a) {
            gap_child(s, L, j, a, d);
            out.push_back(d);
        }
    }
}

// ---------------------------------------------------------------------------
// open-addressing table keyed by non-zero 128-bit keys

template <class V>
class Table {
public:
    Table() { rehash(1 << 12); }
    size_t size() const { return count_; }

    bool find(u128 key, V& out) const {
        size_t i = slot(key);
        while (true) {
            const u128 k = keys_[i];
            if (k == key) { out = vals_[i]; return true; }
            if (k == 0) return false;
            i = (i + 1) & mask_;
        }
    }

    void insert(u128 key, V val) {
        if ((count_ + 1) * 10 > keys_.size() * 7) rehash(keys_.size() * 2);
        size_t i = slot(key);
        while (keys_[i] != 0 && keys_[i] != key) i = (i + 1) & mask_;
        if (keys_[i] == 0) count_++;
        keys_[i] = key;
        vals_[i] = val;
    }

private:
    std::vector<u128> keys_;
    std::vector<V> vals_;
    size_t mask_ = 0, count_ = 0;

    size_t slot(u128 key) const {
        return (size_t)mix64((uint64_t)(key >> 64) ^ mix64((uint64_t)key)) & mask_;
    }

    void rehash(size_t cap) {
        std::vector<u128> ok;
        std::vector<V> ov;
        ok.swap(keys_);
        ov.swap(vals_);
        keys_.assign(cap, 0);
        vals_.assign(cap, V());
        mask_ = cap - 1;
        count_ = 0;
        for (size_t i = 0; i < ok.size(); ++i)
            if (ok[i] != 0) insert(ok[i], ov[i]);
    }
};

struct ModArith {
    typedef uint64_t V;
    uint64_t p;
    V add(V a, V b) const { V s = a + b; return s >= p ? s - p : s; }
    V mul(V a, V b) const { return (V)(((u128)a * b) % p); }
    V one() const { return 1 % p; }
};

struct ExactArith {
    typedef u128 V;
    V add(V a, V b) const {
        V s;
        if (__builtin_add_overflow(a, b, &s)) throw std::overflow_error("count exceeds 128 bits");
        return s;
    }
    V mul(V a, V b) const {
        V s;
        if (__builtin_mul_overflow(a, b, &s)) throw std::overflow_error("count exceeds 128 bits");
        return s;
    }
    V one() const { return 1; }
};

struct Counters {
    uint64_t lookups = 0, hits = 0, stores = 0, skips = 0;
};

template <class A>
class Engine {
public:
    typedef typename A::V V;

    Engine(A arith, double prob, uint64_t seed) : ar_(arith), seed_(seed) {
        always_ = prob >= 1.0;
        long double t = (long double)prob * 18446744073709551616.0L;
        thresh_ = t >= 18446744073709551615.0L ? ~0ULL : (uint64_t)t;
    }

    V count(const Sig& s, bool factorize) {
        if (s.total == 0) return ar_.one();
        if (factorize && s.below == 0 && s.m > 0 && s.o[0]) {
            int depth = 0, e = 0;
            for (int i = 0; i < s.m; ++i) {
                depth += s.o[i] - s.c[i];
                if (depth == 0) { e = i; break; }
            }
            Sig head, tail;
            head.below = tail.below = 0;
            head.m = tail.m = 0;
            head.total = 0;
            for (int i = 0; i <= e; ++i) {
                push_tok(head, s.v[i], s.o[i], s.c[i]);
                head.total += s.v[i];
            }
            head.o[0] = 0;
            head.c[e] = 0;
            for (int i = e + 1; i < s.m; ++i) push_tok(tail, s.v[i], s.o[i], s.c[i]);
            tail.total = s.total - head.total;
            V x = count(head, true);
            return ar_.mul(x, count(tail, true));
        }
        u128 key = encode(s);
        V val;
        ctr.lookups++;
        if (table.find(key, val)) {
            ctr.hits++;
            return val;
        }
        V sum = V();
        Sig d;
        for (int a = 0; a < s.below; ++a) {
            below_child(s, a, d);
            sum = ar_.add(sum, count(d, factorize));
        }
        Layout L;
        layout(s, L);
        for (int g = 0; g < L.ngaps; ++g) {
            int j = L.gap[g];
            for (int a = 0; a < s.v[j]; ++a) {
                gap_child(s, L, j, a, d);
                sum = ar_.add(sum, count(d, factorize));
            }
        }
        if (always_ || store_hash(seed_, key) < thresh_) {
            table.insert(key, sum);
            ctr.stores++;
        } else {
            ctr.skips++;
        }
        return sum;
    }

    Table<V> table;
    Counters ctr;

private:
    A ar_;
    uint64_t seed_;
    uint64_t thresh_;
    bool always_;
};

// Runtime-selected modular (modulus > 0) or exact 128-bit (modulus == 0) counting.
class Counter {
public:
    Counter(uint64_t modulus, double prob, uint64_t seed) : modulus_(modulus) {
        if (modulus) mod_.reset(new Engine<ModArith>(ModArith{modulus}, prob, seed));
        else exact_.reset(new Engine<ExactArith>(ExactArith(), prob, seed));
    }

    u128 count(const Sig& s, bool factorize) {
        if (mod_) return mod_->count(s, factorize);
        return exact_->count(s, factorize);
    }

    const Counters& counters() const { return mod_ ? mod_->ctr : exact_->ctr; }
    size_t size() const { return mod_ ? mod_->table.size() : exact_->table.size(); }
    uint64_t modulus() const { return modulus_; }

private:
    uint64_t modulus_;
    std::unique_ptr<Engine<ModArith>> mod_;
    std::unique_ptr<Engine<ExactArith>> exact_;
};

// ---------------------------------------------------------------------------
// brute-force pattern-avoidance counting over the prefix tree

class Brute {
public:
    Brute(int n, const std::vector<int>& pat) : n_(n), pat_(pat), k_((int)pat.size()) {
        max_last_ = pat_[k_ - 1] == k_;
        // pattern prefix without its last element, standardised
        for (int i = 0; i + 1 < k_; ++i) {
            int r = 1;
            for (int j = 0; j + 1 < k_; ++j)
                if (pat_[j] < pat_[i]) r++;
            head_.push_back(r);
        }
    }

    uint64_t run() {
        perm_.assign(n_, 0);
        used_.assign(n_ + 1, 0);
        return rec(0);
    }

private:
    int n_;
    std::vector<int> pat_, head_;
    int k_;
    bool max_last_;
    std::vector<int> perm_, used_;
    int chosen_[16];

    // Is there an occurrence of pattern p (length kp) whose last element is
    // perm[t], with every value below ub?
    bool ends_at(const std::vector<int>& p, int kp, int t, int ub) {
        if (perm_[t] >= ub) return false;
        chosen_[kp - 1] = perm_[t];
        return search(p, kp, 0, 0, t, ub);
    }

    bool search(const std::vector<int>& p, int kp, int idx, int from, int t, int ub) {
        if (idx == kp - 1) return true;
        for (int pos = from; pos < t; ++pos) {
            int val = perm_[pos];
            if (val >= ub) continue;
            bool ok = (val < chosen_[kp - 1]) == (p[idx] < p[kp - 1]);
            for (int q = 0; ok && q < idx; ++q)
                ok = (chosen_[q] < val) == (p[q] < p[idx]);
            if (!ok) continue;
            chosen_[idx] = val;
            if (search(p, kp, idx + 1, pos + 1, t, ub)) return true;
        }
        return false;
    }

    uint64_t rec(int t) {
        if (t == n_) return 1;
        uint64_t total = 0;
        for (int x = 1; x <= n_; ++x) {
            if (used_[x]) continue;
            perm_[t] = x;
            used_[x] = 1;
            bool dead = t + 1 >= k_ && ends_at(pat_, k_, t, n_ + 1);
            if (!dead && max_last_ && k_ >= 2) {
                int maxrem = 0;
                for (int y = n_; y >= 1; --y)
                    if (!used_[y]) { maxrem = y; break; }
                // an occurrence of the head below a remaining value is completed later
                if (maxrem && t + 2 >= k_) dead = ends_at(head_, k_ - 1, t, maxrem);
            }
            if (!dead) total += rec(t + 1);
            used_[x] = 0;
        }
        return total;
    }
};

}  // namespace pap
