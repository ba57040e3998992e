"""Letterwise rational functions and their compiled pipelines."""
import itertools
import random

import pytest

from listfn.rational import (
    DEAD,
    compile_rational,
    eval_pipeline,
    eval_rational_direct,
    output_table,
    triple_alphabet,
    triple_name,
)
from listfn.samples import SAMPLE_RATIONALS

NAMES = sorted(SAMPLE_RATIONALS)


def all_words(letters, max_len):
    for n in range(max_len + 1):
        for tup in itertools.product(letters, repeat=n):
            yield "".join(tup)


def test_direct_evaluator_point_values():
    keep_a = SAMPLE_RATIONALS["keep-a"]
    assert eval_rational_direct(keep_a, "abab") == ("a", "b", "b")
    assert eval_rational_direct(keep_a, "") == ()
    mark = SAMPLE_RATIONALS["mark-after-ab"]
    assert eval_rational_direct(mark, "abab") == ("a", "b", "A", "B")
    dbl = SAMPLE_RATIONALS["double-last-b"]
    assert eval_rational_direct(dbl, "abab") == ("a", "b", "a", "b", "b")
    assert eval_rational_direct(dbl, "b") == ("b", "b")


@pytest.mark.parametrize("name", NAMES)
def test_pipeline_matches_direct_exhaustively(name):
    r = SAMPLE_RATIONALS[name]
    p = compile_rational(r)
    for w in all_words(r.input_letters, 7):
        assert eval_pipeline(p, w) == eval_rational_direct(r, w), w


@pytest.mark.parametrize("name", NAMES)
def test_pipeline_matches_direct_on_random_words(name):
    r = SAMPLE_RATIONALS[name]
    p = compile_rational(r)
    rng = random.Random(41)
    for _ in range(200):
        n = rng.randrange(0, 80)
        w = "".join(rng.choice(r.input_letters) for _ in range(n))
        assert eval_pipeline(p, w) == eval_rational_direct(r, w)


def test_empty_word_maps_to_empty_word():
    for name in NAMES:
        r = SAMPLE_RATIONALS[name]
        assert eval_rational_direct(r, "") == ()
        assert eval_pipeline(compile_rational(r), "") == ()


def test_output_table_covers_every_context():
    r = SAMPLE_RATIONALS["keep-a"]
    table = output_table(r)
    assert table[DEAD] == ()
    for m in r.monoid.elements:
        for a in r.input_letters:
            for mr in r.monoid.elements:
                assert triple_name(m, a, mr) in table
    assert set(table) == set(triple_alphabet(r).names)


def test_compile_honours_a_supplied_table():
    r = SAMPLE_RATIONALS["keep-a"]
    table = output_table(r)
    # the triple that fires on the first letter of "abab"
    suffix = r.monoid.identity
    for c in "bab":
        suffix = r.monoid.mult(suffix, r.h[c])
    live = triple_name(r.monoid.identity, "a", suffix)
    assert table[live] == ("a",)
    tampered = dict(table)
    tampered[live] = ("b",)
    p = compile_rational(r, table=tampered)
    assert eval_pipeline(p, "abab") != eval_rational_direct(r, "abab")
    assert eval_pipeline(p, "abab") == ("b", "b", "b")


def test_pipeline_reports_its_stage_bound():
    for name in NAMES:
        p = compile_rational(SAMPLE_RATIONALS[name])
        assert p.bound >= 1
        assert p.stages
