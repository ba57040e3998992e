"""Finite semigroups, homomorphisms and bounded-depth factorisation trees.

The tree builder follows the ideal-splitting induction for aperiodic
semigroups: a single generator gives one flat node, otherwise a strict
one-sided ideal is used to colour the word, pair adjacent runs and recurse in
a smaller semigroup.  The achieved depth depends on the semigroup only, never
on the length of the word.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Hashable, Iterable, Sequence


class NotAperiodicError(ValueError):
    """Raised when a construction needs an aperiodic semigroup but got none."""


class FiniteSemigroup:
    """Finite set of named elements with an associative product table."""

    def __init__(self, elements: Sequence[str], mult: dict[tuple[str, str], str]):
        self.elements = tuple(elements)
        if len(set(self.elements)) != len(self.elements) or not self.elements:
            raise ValueError("elements must be distinct and nonempty")
        self._mult = dict(mult)
        self._check_table()

    def _check_table(self) -> None:
        els = self.elements
        index = {e: i for i, e in enumerate(els)}
        n = len(els)
        table = [[0] * n for _ in range(n)]
        for a in els:
            for b in els:
                c = self._mult.get((a, b))
                if c is None:
                    raise ValueError(f"product {a}·{b} missing from the table")
                if c not in index:
                    raise ValueError(f"product {a}·{b}={c} outside the elements")
                table[index[a]][index[b]] = index[c]
        for i in range(n):
            row = table[i]
            for j in range(n):
                ij = row[j]
                tij = table[ij]
                tj = table[j]
                for k in range(n):
                    if tij[k] != table[i][tj[k]]:
                        raise ValueError(
                            "associativity fails at "
                            f"({els[i]},{els[j]},{els[k]})")

    def mult(self, a: str, b: str) -> str:
        return self._mult[(a, b)]

    def product(self, items: Iterable[str]) -> str:
        """Variadic product; the empty product needs an identity."""
        acc: str | None = None
        for x in items:
            acc = x if acc is None else self.mult(acc, x)
        if acc is None:
            raise ValueError("empty product in a semigroup without identity")
        return acc

    def power(self, a: str, n: int) -> str:
        if n < 1:
            raise ValueError("semigroup powers start at 1")
        acc = a
        for _ in range(n - 1):
            acc = self.mult(acc, a)
        return acc

    def __contains__(self, a: str) -> bool:
        return a in self.elements

    def __len__(self) -> int:
        return len(self.elements)


class FiniteMonoid(FiniteSemigroup):
    def __init__(self, elements: Sequence[str],
                 mult: dict[tuple[str, str], str], identity: str):
        super().__init__(elements, mult)
        self.identity = identity
        if identity not in self.elements:
            raise ValueError("identity not among the elements")
        for a in self.elements:
            if self.mult(identity, a) != a or self.mult(a, identity) != a:
                raise ValueError(f"identity law fails at {a}")

    def product(self, items: Iterable[str]) -> str:
        acc = self.identity
        for x in items:
            acc = self.mult(acc, x)
        return acc


def aperiodicity_index(s: FiniteSemigroup) -> int | None:
    """Least n with mⁿ = mⁿ⁺¹ for every m, or None when powers keep cycling."""
    worst = 1
    for m in s.elements:
        power = m
        n = 1
        while n <= len(s):
            nxt = s.mult(power, m)
            if nxt == power:
                break
            power = nxt
            n += 1
        else:
            return None
        worst = max(worst, n)
    return worst


def is_aperiodic(s: FiniteSemigroup) -> bool:
    return aperiodicity_index(s) is not None


@dataclass(frozen=True)
class Homomorphism:
    """Letter-to-element map extended multiplicatively to words."""
    target: FiniteSemigroup
    letter_map: Callable[[Hashable], str] | dict

    def __call__(self, letter: Hashable) -> str:
        if callable(self.letter_map):
            return self.letter_map(letter)
        return self.letter_map[letter]

    def image(self, word: Sequence[Hashable]) -> str:
        return self.target.product(self(a) for a in word)


# ---------------------------------------------------------------- fact trees

@dataclass(frozen=True)
class Leaf:
    letter: Hashable


@dataclass(frozen=True)
class Node:
    label: str
    children: tuple["FactTree", ...]


FactTree = Leaf | Node


def tree_yield(t: FactTree) -> list:
    collected: list = []
    work: list[FactTree] = [t]
    while work:
        cur = work.pop()
        if isinstance(cur, Leaf):
            collected.append(cur.letter)
        else:
            work.extend(reversed(cur.children))
    return collected


def tree_depth(t: FactTree) -> int:
    if isinstance(t, Leaf):
        return 0
    return 1 + max(tree_depth(c) for c in t.children)


@dataclass(frozen=True)
class ValidationResult:
    ok: bool
    message: str | None = None

    def __bool__(self) -> bool:
        return self.ok


def validate_factorisation(h: Homomorphism, t: FactTree) -> ValidationResult:
    """Check the shape rules; reports the first violation found."""
    s = h.target

    def walk(t: FactTree) -> str | None:
        if isinstance(t, Leaf):
            return "a leaf appears without its unary parent"
        if not t.children:
            return "node without children"
        if any(isinstance(c, Leaf) for c in t.children):
            if len(t.children) != 1:
                return "a leaf has siblings"
            leaf = t.children[0]
            if t.label != h(leaf.letter):
                return (f"leaf parent labelled {t.label}, "
                        f"letter maps to {h(leaf.letter)}")
            return None
        if len(t.children) < 2:
            return "unary node above non-leaves"
        labels = [c.label for c in t.children]
        if t.label != s.product(labels):
            return f"label {t.label} differs from the product of child labels"
        if len(labels) >= 3 and len(set(labels)) != 1:
            return "node of degree three or more with unequal child labels"
        for c in t.children:
            bad = walk(c)
            if bad:
                return bad
        return None

    msg = walk(t)
    return ValidationResult(msg is None, msg)


# ------------------------------------------------------------------- builder

def _closure(s: FiniteSemigroup, gens: Iterable[str]) -> frozenset[str]:
    seen = set(gens)
    frontier = list(seen)
    while frontier:
        nxt = []
        for a in frontier:
            for b in list(seen):
                for c in (s.mult(a, b), s.mult(b, a)):
                    if c not in seen:
                        seen.add(c)
                        nxt.append(c)
        frontier = nxt
    return frozenset(seen)


def build_factorisation(h: Homomorphism, word: Sequence[Hashable]) -> FactTree:
    """Bounded-depth factorisation tree of a nonempty word under ``h``."""
    s = h.target
    if aperiodicity_index(s) is None:
        raise NotAperiodicError("factorisation trees need an aperiodic target")
    if not word:
        raise ValueError("cannot factorise the empty word")
    items = [(Node(h(a), (Leaf(a),)), h(a)) for a in word]
    tree, _ = _combine(s, items)
    return tree


def _order_key(s: FiniteSemigroup):
    index = {e: i for i, e in enumerate(s.elements)}
    return lambda e: index[e]


def _combine(s: FiniteSemigroup,
             items: list[tuple[FactTree, str]]) -> tuple[FactTree, str]:
    if len(items) == 1:
        return items[0]
    gens = sorted({v for _, v in items}, key=_order_key(s))
    if len(gens) == 1:
        label = s.power(gens[0], len(items))
        return (Node(label, tuple(t for t, _ in items)), label)
    active = _closure(s, gens)
    for right in (True, False):
        for g in gens:
            ideal = frozenset(s.mult(t, g) if right else s.mult(g, t)
                              for t in active)
            if ideal < active:
                return _split(s, items, g, right)
    raise AssertionError("no strict ideal found; semigroup is not aperiodic")


def _binary(s: FiniteSemigroup, a: tuple[FactTree, str],
            b: tuple[FactTree, str]) -> tuple[FactTree, str]:
    label = s.mult(a[1], b[1])
    return (Node(label, (a[0], b[0])), label)


def _split(s: FiniteSemigroup, items: list[tuple[FactTree, str]],
           g: str, right: bool) -> tuple[FactTree, str]:
    runs: list[list[tuple[FactTree, str]]] = []
    for item in items:
        red = item[1] == g
        if runs and (runs[-1][0][1] == g) == red:
            runs[-1].append(item)
        else:
            runs.append([item])

    # a pair is blue·red for a right ideal, red·blue for a left one
    pre = post = None
    first_is_red = runs[0][0][1] == g
    last_is_red = runs[-1][0][1] == g
    if right:
        if first_is_red:
            pre = runs.pop(0)
        if runs and runs[-1][0][1] != g:
            post = runs.pop()
    else:
        if not first_is_red:
            pre = runs.pop(0)
        if runs and runs[-1][0][1] == g:
            post = runs.pop()

    assert len(runs) % 2 == 0
    pairs = []
    for i in range(0, len(runs), 2):
        a = _combine(s, runs[i])
        b = _combine(s, runs[i + 1])
        pairs.append(_binary(s, a, b))

    mid = _combine(s, pairs) if pairs else None
    if pre is not None:
        pre_c = _combine(s, pre)
        mid = pre_c if mid is None else _binary(s, pre_c, mid)
    if post is not None:
        post_c = _combine(s, post)
        mid = post_c if mid is None else _binary(s, mid, post_c)
    assert mid is not None
    return mid


@lru_cache(maxsize=None)
def _combine_depth_bound(n: int, g: int) -> int:
    """Levels added above the combined items, by semigroup size and generators."""
    if g <= 1 or n <= 1:
        return 1
    blue = _combine_depth_bound(n, g - 1)
    pair = 1 + max(blue, 1)
    mid = pair + _combine_depth_bound(n - 1, n - 1)
    return max(mid, blue, 1) + 2


def forest_depth_bound(s: FiniteSemigroup, generators: int) -> int:
    """Depth bound for trees built over ``s``; independent of word length."""
    g = max(1, min(generators, len(s)))
    return 1 + _combine_depth_bound(len(s), g)


def eval_hom_via_forest(h: Homomorphism, word: Sequence[Hashable]) -> str:
    """Image of a word computed through a factorisation tree."""
    if not word:
        target = h.target
        if isinstance(target, FiniteMonoid):
            return target.identity
        raise ValueError("empty word under a semigroup homomorphism")
    tree = build_factorisation(h, word)
    assert isinstance(tree, Node)
    return tree.label


def regular_membership(h: Homomorphism, accepting: Iterable[str],
                       word: Sequence[Hashable],
                       accept_empty: bool = False) -> int:
    """0/1 membership of the language recognised through ``h``."""
    if not word:
        return int(accept_empty)
    return int(eval_hom_via_forest(h, word) in set(accepting))
