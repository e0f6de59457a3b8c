from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pap1324.errors import (BlockedPrefix, EmptySignature, EncodingOverflow, MalformedKey,
                            SignatureSyntaxError)
from pap1324.signature import (BitKey, Signature, all_signatures, canonicalize, children,
                               decode, encode, factor_split, format_signature, is_canonical,
                               parse, prefix_to_signature, to_tokens, total)

from .conftest import COUNT_TRACE, PREFIX_ROWS


def sigs(text):
    return Counter(parse(t.strip()) for t in text.split("+"))


# --- canonical form -------------------------------------------------------

@pytest.mark.parametrize("raw,expected", [
    ((4, ((3,), 1, (2,)), 5), "4,[3][3]5"),
    ((0, (2, (1,))), ",3"),
    ((0, (((1,),), 1)), "[1]1"),
])
def test_canonicalize_examples(raw, expected):
    assert canonicalize((raw[0], raw[1:])) == parse(expected)


def test_canonicalize_from_text():
    assert format_signature(parse("4,[[3]1[2]]5")) == "4[3][3]5"
    assert parse("4,[[3]1[2]]5") == parse("4,[3][3]5")


def test_zero_gaps_and_empty_brackets_vanish():
    assert canonicalize((2, (0, (), 3, 0))) == Signature(2, (3,))
    assert canonicalize((0, ())) == Signature(0)


# random raw signatures: nested lists with zeros, empties and tail brackets
raw_items = st.recursive(
    st.integers(0, 4),
    lambda inner: st.lists(inner, max_size=4).map(tuple),
    max_leaves=12,
)
raw_sigs = st.tuples(st.integers(0, 5), st.lists(raw_items, max_size=5).map(tuple))


@settings(max_examples=300)
@given(raw_sigs)
def test_canonicalize_idempotent(raw):
    s = canonicalize(raw)
    assert canonicalize(s) == s
    assert is_canonical(s)


@settings(max_examples=300)
@given(raw_sigs)
def test_canonicalize_preserves_total(raw):
    def tot(items):
        return sum(i if isinstance(i, int) else tot(i) for i in items)
    assert total(canonicalize(raw)) == raw[0] + tot(raw[1])


# --- transitions ------------------------------------------------------------

@pytest.mark.parametrize("sig,comp,_", [r for r in COUNT_TRACE if r[1] != ","])
def test_children_match_trace(sig, comp, _):
    assert Counter(children(parse(sig))) == sigs(comp)


def test_children_examples():
    assert Counter(children(parse("3"))) == sigs(",2 + 1,1 + 2")
    assert Counter(children(parse(",4"))) == sigs(",3 + [1]2 + [2]1 + ,3")
    assert Counter(children(parse("2[1]1"))) == sigs(",1[1]1 + 1[1]1 + 2,1")


def test_children_of_empty_rejected():
    with pytest.raises(EmptySignature):
        children(Signature(0))


def top_gap_sum(s):
    return sum(i for i in s.rest if isinstance(i, int))


@pytest.mark.parametrize("n", range(1, 9))
def test_children_counting_law(n):
    for s in all_signatures(n):
        if s.total == 0:
            continue
        kids = children(s)
        assert len(kids) == s.below + top_gap_sum(s)
        assert all(k.total == s.total - 1 and is_canonical(k) for k in kids)


def test_factor_split_examples():
    assert factor_split(parse("[1]1")) == [parse(",1"), parse(",1")]
    assert factor_split(parse("[2]1")) == [parse(",2"), parse(",1")]  # head first
    assert factor_split(parse("1[1]1")) == [parse("1[1]1")]


@pytest.mark.parametrize("prefix,expected", PREFIX_ROWS)
def test_prefix_rows(prefix, expected):
    assert prefix_to_signature(20, prefix) == parse(expected)


def test_blocked_prefix():
    # 1,3 then 2 sits between them while 4 remains
    with pytest.raises(BlockedPrefix):
        prefix_to_signature(4, (1, 3, 2))


def test_all_signatures_grow():
    sizes = [len(all_signatures(n)) for n in range(1, 10)]
    assert sizes == sorted(sizes) and len(set(sizes)) == len(sizes)


# --- text form --------------------------------------------------------------

def test_parse_format_examples():
    assert parse("1[1]1") == parse("1,[1]1")
    assert format_signature(parse("1,[1]1")) == "1[1]1"
    assert format_signature(Signature(0, (2,))) == ",2"
    assert format_signature(Signature(5)) == "5"
    assert total(parse(",3")) == 3
    assert total(parse("4,[3][3]5")) == 15


@pytest.mark.parametrize("bad", ["", "[", "1[2", "1]2", "a", "1,,2", "[]]"])
def test_parse_errors(bad):
    with pytest.raises(SignatureSyntaxError):
        parse(bad)


@pytest.mark.parametrize("n", range(1, 11))
def test_parse_format_identity_exhaustive(n):
    for s in all_signatures(n):
        assert parse(format_signature(s)) == s


def test_token_order_single_brackets():
    for s in all_signatures(10):
        for o, v, c in to_tokens(s):
            assert o in (0, 1) and c in (0, 1) and v >= 1


# --- codec --------------------------------------------------------------------

def test_encode_examples():
    assert encode(parse("2")).bitstring() == "00001000010"
    assert encode(parse(",2")).bitstring() == "00001010010"
    assert encode(parse("2")).hex() == "084" + "0" * 29


def test_encode_limits():
    with pytest.raises(EncodingOverflow):
        encode(Signature(64))
    with pytest.raises(EncodingOverflow):
        encode(Signature(0, (1, (75,), 1)))


@pytest.mark.parametrize("n", range(0, 11))
def test_codec_roundtrip_exhaustive(n):
    keys = set()
    for s in all_signatures(n):
        k = encode(s)
        assert decode(k) == s
        assert decode(k.hex()) == s
        assert decode(BitKey.from_hex(k.hex())) == s
        keys.add(k.as_int())
    assert len(keys) == len(all_signatures(n))


def random_walk(n, choices):
    s = Signature(n)
    for c in choices:
        if s.total == 0:
            break
        kids = children(s)
        s = kids[c % len(kids)]
    return s


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 63), st.lists(st.integers(0, 10 ** 6), max_size=40))
def test_codec_roundtrip_random(n, choices):
    s = random_walk(n, choices)
    try:
        k = encode(s)
    except EncodingOverflow:
        return  # possible only for very long token lists
    assert decode(k) == s
    assert parse(format_signature(s)) == s


def test_decode_rejects_garbage():
    with pytest.raises(MalformedKey):
        decode("f" * 32)
    with pytest.raises(MalformedKey):
        decode("zz")
