"""Shared builders and definitional oracles used across the test modules.

The oracles here restate the intended meaning of each primitive in plain
Python, independently of the evaluator, so agreement checks are two-sided.
"""
from __future__ import annotations

from listfn.terms import (
    Append,
    Block,
    CoAppend,
    CoProjL,
    CoProjR,
    Compose,
    Const,
    Distribute,
    FinSplit,
    Flat,
    Map,
    Pair,
    Proj1,
    Proj2,
    Reverse,
    Union,
)
from listfn.types import (
    BOT,
    FinSet,
    InL,
    InR,
    List,
    ListV,
    PairV,
    Prod,
    Sum,
    Sym,
)

AB = FinSet(("a", "b"))
CD = FinSet(("c", "d"))
ABC = FinSet(("a", "b", "c"))
DE = FinSet(("d", "e"))
HASH = FinSet(("#",))

DEEP_MIX_TYPE = Prod(
    List(Sum(List(AB), FinSet(("c",)))),
    List(Prod(FinSet(("a",)), List(FinSet(("b",))))),
)


def sym_list(text: str) -> ListV:
    return ListV(tuple(Sym(c) for c in text))


def word_of(v: ListV) -> str:
    return "".join(x.name for x in v.items)


def mixed_list(text: str, left: str) -> ListV:
    """Letters in ``left`` become inl, the rest inr."""
    return ListV(tuple(
        InL(Sym(c)) if c in left else InR(Sym(c)) for c in text))


def _oracle_block(v):
    runs = []
    for x in v.items:
        side = InL if isinstance(x, InL) else InR
        if runs and runs[-1][0] is side:
            runs[-1][1].append(x.value)
        else:
            runs.append([side, [x.value]])
    return ListV(tuple(side(ListV(tuple(items))) for side, items in runs))


def _oracle_coappend(v):
    if not v.items:
        return InR(BOT)
    return InL(PairV(v.items[0], ListV(v.items[1:])))


def _oracle_distribute(v):
    side = InL if isinstance(v.fst, InL) else InR
    return side(PairV(v.fst.value, v.snd))


# label, term, independent semantics. Domains come from infer_type.
BASICS = [
    ("const", Const(Sym("c"), List(AB), CD), lambda v: Sym("c")),
    ("proj1", Proj1(AB, CD), lambda v: v.fst),
    ("proj2", Proj2(AB, CD), lambda v: v.snd),
    ("coprojl", CoProjL(AB, CD), InL),
    ("coprojr", CoProjR(AB, CD), InR),
    ("distribute", Distribute(AB, CD, List(AB)), _oracle_distribute),
    ("reverse", Reverse(AB), lambda v: ListV(v.items[::-1])),
    ("flat", Flat(AB),
     lambda v: ListV(tuple(x for row in v.items for x in row.items))),
    ("append", Append(AB), lambda v: ListV((v.fst,) + v.snd.items)),
    ("coappend", CoAppend(AB), _oracle_coappend),
    ("block", Block(AB, CD), _oracle_block),
    ("finsplit", FinSplit(("a",), ("b",)),
     lambda v: InL(v) if v.name == "a" else InR(v)),
    ("map-reverse", Map(Reverse(AB)),
     lambda v: ListV(tuple(ListV(x.items[::-1]) for x in v.items))),
    ("pair-swap", Pair(Proj2(AB, CD), Proj1(AB, CD)),
     lambda v: PairV(v.snd, v.fst)),
    ("union-reverse-id", Union(Reverse(AB), Flat(AB)),
     lambda v: ListV(v.value.items[::-1]) if isinstance(v, InL)
     else ListV(tuple(x for row in v.value.items for x in row.items))),
    ("compose-rev-rev", Compose(Reverse(AB), Reverse(AB)), lambda v: v),
]
