"""Term layer: typing, evaluation against definitional oracles, guards."""
import random

import pytest

from helpers import AB, BASICS, CD, sym_list
from listfn.stdlib import is_nonempty
from listfn.terms import (
    Block,
    CoAppend,
    Compose,
    Const,
    EvalError,
    FinSplit,
    Flat,
    GroupSpec,
    GuardViolation,
    Guarded,
    Map,
    Pair,
    PrefixGroupMult,
    Proj1,
    Reverse,
    TermTypeError,
    Union,
    eval_term,
    infer_type,
    is_first_order,
    subterms,
)
from listfn.samples import SAMPLE_GROUPS
from listfn.types import (
    List,
    ListV,
    Prod,
    Sum,
    Sym,
    enumerate_values,
    random_value,
    render_type,
)


@pytest.mark.parametrize("label,term,oracle", BASICS,
                         ids=[b[0] for b in BASICS])
def test_basics_match_oracle(label, term, oracle):
    dom, cod = infer_type(term)
    from listfn.types import check_value
    count = 0
    for v in enumerate_values(dom, 6):
        got = eval_term(term, v)
        assert got == oracle(v), f"{label} on {v}"
        assert check_value(got, cod)
        count += 1
    assert count > 0
    rng = random.Random(11)
    for _ in range(300):
        v = random_value(dom, 30, rng)
        assert eval_term(term, v) == oracle(v)


def test_infer_type_spot_checks():
    assert infer_type(Reverse(AB)) == (List(AB), List(AB))
    assert infer_type(Flat(AB)) == (List(List(AB)), List(AB))
    from listfn.types import Bot
    assert infer_type(CoAppend(AB)) == (
        List(AB), Sum(Prod(AB, List(AB)), Bot()))
    dom, cod = infer_type(Block(AB, CD))
    assert render_type(dom) == "({a,b}+{c,d})^*"
    assert render_type(cod) == "({a,b}^*+{c,d}^*)^*"


def test_infer_type_rejects_bad_compose():
    with pytest.raises(TermTypeError):
        infer_type(Compose(Reverse(AB), Proj1(AB, CD)))
    # Union branches must share a codomain
    with pytest.raises(TermTypeError):
        infer_type(Union(Reverse(AB), Reverse(CD)))


def test_finsplit_requires_disjoint_names():
    with pytest.raises(TermTypeError):
        infer_type(FinSplit(("a",), ("a", "b")))


def test_eval_rejects_ill_shaped_values():
    with pytest.raises(EvalError):
        eval_term(Reverse(AB), Sym("a"))
    with pytest.raises(EvalError):
        eval_term(Proj1(AB, CD), sym_list("ab"))


def test_guarded_enforces_domain_predicate():
    g = Guarded(Reverse(AB), is_nonempty(AB), is_nonempty(AB))
    assert eval_term(g, sym_list("ab")) == sym_list("ba")
    with pytest.raises(GuardViolation):
        eval_term(g, ListV(()))


def test_group_spec_validates_laws():
    with pytest.raises(ValueError):
        GroupSpec(("1", "g"), (("1", "g"), ("g", "g")), "1")  # no inverse for g
    with pytest.raises(ValueError):
        GroupSpec(("1", "g"), (("1", "g"),), "1")  # not square
    with pytest.raises(ValueError):
        GroupSpec(("1", "g"), (("g", "1"), ("1", "g")), "1")  # identity law


@pytest.mark.parametrize("name", ["z2", "z3"])
def test_group_prefix_matches_fold(name):
    g = SAMPLE_GROUPS[name]
    term = PrefixGroupMult(g)
    rng = random.Random(5)
    for _ in range(300):
        word = [rng.choice(g.elements) for _ in range(rng.randrange(0, 30))]
        acc, expected = g.identity, []
        for x in word:
            acc = g.mult(acc, x)
            expected.append(Sym(acc))
        got = eval_term(term, ListV(tuple(Sym(x) for x in word)))
        assert got == ListV(tuple(expected))


def test_is_first_order_flags_group_prefix():
    fo = Compose(Reverse(AB), Reverse(AB))
    assert is_first_order(fo)
    reg = Map(PrefixGroupMult(SAMPLE_GROUPS["z2"]))
    assert not is_first_order(reg)
    assert not is_first_order(Pair(fo, Compose(reg, Const(
        ListV(()), List(AB), List(SAMPLE_GROUPS["z2"].carrier)))))


def test_subterms_walks_the_tree():
    t = Compose(Map(Reverse(AB)), Flat(AB))
    names = [type(s).__name__ for s in subterms(t)]
    assert names.count("Reverse") == 1
    assert names.count("Map") == 1
    assert names.count("Flat") == 1
    assert names.count("Compose") == 1
