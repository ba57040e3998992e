"""Type and value layer: parsing, rendering, sizes, enumeration, encodings."""
import random

import pytest

from helpers import AB, CD, DEEP_MIX_TYPE, sym_list
from listfn.types import (
    BOT,
    Bot,
    EncodingError,
    FinSet,
    InL,
    InR,
    List,
    ListV,
    PairV,
    ParseError,
    Prod,
    Sum,
    Sym,
    TypeMismatch,
    check_value,
    default_value,
    enumerate_values,
    min_size,
    parse_type,
    parse_value,
    random_value,
    render_type,
    render_value,
    require_value,
    string_decode,
    string_encode,
    value_size,
)

TYPE_TEXTS = [
    "{a}",
    "{a,b}",
    "bot",
    "{a,b}^*",
    "({a,b}^*)^*",
    "{a,b}×{c,d}",
    "{a,b}+{c,d}",
    "({a,b}^*+{c})^*×({a}×{b}^*)^*",
    "({a,b}+bot)^*",
    "{a,b}×({c}+{d}^*)",
]


@pytest.mark.parametrize("text", TYPE_TEXTS)
def test_type_text_round_trip(text):
    t = parse_type(text)
    assert parse_type(render_type(t)) == t
    # rendering is canonical: a second pass changes nothing
    assert render_type(parse_type(render_type(t))) == render_type(t)


def test_render_type_canonical_forms():
    assert render_type(List(AB)) == "{a,b}^*"
    assert render_type(List(List(AB))) == "{a,b}^*^*"
    assert render_type(Prod(AB, CD)) == "{a,b}×{c,d}"
    assert render_type(Sum(AB, Prod(CD, AB))) == "{a,b}+{c,d}×{a,b}"
    assert render_type(Prod(Sum(AB, CD), AB)) == "({a,b}+{c,d})×{a,b}"


def test_parse_type_whitespace_and_nesting():
    assert parse_type(" { a , b } ^* ") == List(AB)
    assert parse_type("(({a}))") == FinSet(("a",))
    # × binds tighter than +
    assert parse_type("{a}+{b}×{c}") == Sum(
        FinSet(("a",)), Prod(FinSet(("b",)), FinSet(("c",))))


@pytest.mark.parametrize(
    "text", ["", "{a", "{}", "{a,b}^", "{a}+", "{a}++{b}", "{a,}", "()*"])
def test_parse_type_rejects(text):
    with pytest.raises(ParseError):
        parse_type(text)


def test_render_deeply_mixed_type():
    assert render_type(DEEP_MIX_TYPE) == "({a,b}^*+{c})^*×({a}×{b}^*)^*"


def test_value_text_round_trip_exhaustive():
    for text in TYPE_TEXTS:
        t = parse_type(text)
        for v in enumerate_values(t, 5):
            assert parse_value(render_value(v), t) == v


def test_render_value_spot_checks():
    assert render_value(sym_list("ab")) == "[a,b]"
    assert render_value(PairV(Sym("a"), sym_list("ba"))) == "(a,[b,a])"
    assert render_value(InL(PairV(Sym("a"), sym_list("ba")))) == "inl (a,[b,a])"
    assert render_value(BOT) == "bot"
    assert render_value(ListV(())) == "[]"


def test_parse_value_against_type():
    t = Sum(AB, CD)
    assert parse_value("inl a", t) == InL(Sym("a"))
    assert parse_value("inr d", t) == InR(Sym("d"))
    with pytest.raises(ParseError):
        parse_value("inl (a", t)
    with pytest.raises(TypeMismatch):
        parse_value("inl c", t)


def test_check_value_and_require():
    assert check_value(sym_list("ab"), List(AB))
    assert not check_value(sym_list("ac"), List(AB))
    assert not check_value(Sym("a"), List(AB))
    assert check_value(BOT, Bot())
    require_value(InL(Sym("a")), Sum(AB, CD))
    with pytest.raises(TypeMismatch):
        require_value(InR(Sym("a")), Sum(AB, CD))


def test_value_size_counts_structure():
    assert value_size(Sym("a")) == 1
    assert value_size(sym_list("ab")) == 3
    assert value_size(ListV(())) == 1
    assert value_size(PairV(Sym("a"), Sym("b"))) == 3
    # injections are transparent
    assert value_size(InL(InR(Sym("a")))) == 1


def test_default_value_is_minimal():
    for text in TYPE_TEXTS:
        t = parse_type(text)
        v = default_value(t)
        assert check_value(v, t)
        assert value_size(v) == min_size(t)


def test_enumerate_values_sound_and_complete():
    vals = list(enumerate_values(List(AB), 4))
    assert len(vals) == len(set(vals))
    assert all(check_value(v, List(AB)) for v in vals)
    assert all(value_size(v) <= 4 for v in vals)
    # lists of length <= 3 over two letters
    assert len(vals) == 1 + 2 + 4 + 8


def test_random_value_fits_and_is_seeded():
    for text in TYPE_TEXTS:
        t = parse_type(text)
        rng = random.Random(7)
        vals = [random_value(t, 25, rng) for _ in range(50)]
        assert all(check_value(v, t) for v in vals)
        assert all(value_size(v) <= 25 for v in vals)
        again = random.Random(7)
        assert vals == [random_value(t, 25, again) for _ in range(50)]


def test_string_encoding_round_trip():
    for text in TYPE_TEXTS:
        t = parse_type(text)
        for v in enumerate_values(t, 5):
            assert string_decode(string_encode(v, t), t) == v


def test_string_encoding_rejects_corrupt_text():
    t = List(AB)
    good = string_encode(sym_list("ab"), t)
    with pytest.raises(EncodingError):
        string_decode(good + good, t)
    with pytest.raises(EncodingError):
        string_decode(good[:-1], t)
