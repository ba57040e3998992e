"""Nested-list types and their values.

Types are built from one-element sets (atoms), finite sets, sums, products,
lists and an empty type.  Values are checked against types structurally; both
have a text syntax and a bracketed string encoding used by the logic layer.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator


class ParseError(ValueError):
    """Raised on malformed type, value, term or formula text."""


class TypeMismatch(TypeError):
    """Raised when a value does not inhabit the expected type."""


class EncodingError(ValueError):
    """Raised when a string is not a valid encoding at the given type."""


# ---------------------------------------------------------------- type exprs

@dataclass(frozen=True)
class Atom:
    """One-element set; its single value is the symbol of the same name."""
    name: str


@dataclass(frozen=True)
class FinSet:
    """Finite set of named symbols, kept flat rather than as nested sums."""
    names: tuple[str, ...]

    def __post_init__(self) -> None:
        if not self.names:
            raise ValueError("finite set needs at least one name")
        if len(set(self.names)) != len(self.names):
            raise ValueError("finite set names must be distinct")


@dataclass(frozen=True)
class Sum:
    left: "TypeExpr"
    right: "TypeExpr"


@dataclass(frozen=True)
class Prod:
    left: "TypeExpr"
    right: "TypeExpr"


@dataclass(frozen=True)
class List:
    elem: "TypeExpr"


@dataclass(frozen=True)
class Bot:
    """Empty type; inhabited only by the error value."""


TypeExpr = Atom | FinSet | Sum | Prod | List | Bot

BOT_T = Bot()


# ------------------------------------------------------------------- values

@dataclass(frozen=True)
class Sym:
    name: str


@dataclass(frozen=True)
class PairV:
    fst: "Value"
    snd: "Value"


@dataclass(frozen=True)
class InL:
    value: "Value"


@dataclass(frozen=True)
class InR:
    value: "Value"


@dataclass(frozen=True)
class ListV:
    items: tuple["Value", ...]


@dataclass(frozen=True)
class BotV:
    pass


Value = Sym | PairV | InL | InR | ListV | BotV

BOT = BotV()


def list_of(*items: Value) -> ListV:
    return ListV(tuple(items))


def check_value(v: Value, t: TypeExpr) -> bool:
    """Does ``v`` inhabit ``t``?"""
    if isinstance(t, Atom):
        return isinstance(v, Sym) and v.name == t.name
    if isinstance(t, FinSet):
        return isinstance(v, Sym) and v.name in t.names
    if isinstance(t, Sum):
        if isinstance(v, InL):
            return check_value(v.value, t.left)
        if isinstance(v, InR):
            return check_value(v.value, t.right)
        return False
    if isinstance(t, Prod):
        return (isinstance(v, PairV) and check_value(v.fst, t.left)
            and check_value(v.snd, t.right))
    if isinstance(t, List):
        return isinstance(v, ListV) and all(check_value(x, t.elem) for x in v.items)
    if isinstance(t, Bot):
        return isinstance(v, BotV)
    raise TypeError(f"not a type expression: {t!r}")


def first_mismatch(v: Value, t: TypeExpr) -> tuple[Value, TypeExpr] | None:
    """Leftmost innermost subvalue that fails its expected type, or None."""
    if isinstance(t, Sum):
        if isinstance(v, InL):
            return first_mismatch(v.value, t.left)
        if isinstance(v, InR):
            return first_mismatch(v.value, t.right)
        return (v, t)
    if isinstance(t, Prod) and isinstance(v, PairV):
        return first_mismatch(v.fst, t.left) or first_mismatch(v.snd, t.right)
    if isinstance(t, List) and isinstance(v, ListV):
        for x in v.items:
            bad = first_mismatch(x, t.elem)
            if bad is not None:
                return bad
        return None
    if check_value(v, t):
        return None
    return (v, t)


def require_value(v: Value, t: TypeExpr) -> Value:
    bad = first_mismatch(v, t)
    if bad is not None:
        raise TypeMismatch(
            f"value {render_value(bad[0])} does not fit type {render_type(bad[1])}")
    return v


# ---------------------------------------------------------------- type nodes

@dataclass(frozen=True)
class TypeNode:
    """Node of a type's parse tree, addressed by its path from the root."""
    path: tuple[int, ...]
    label: TypeExpr


def type_children(t: TypeExpr) -> tuple[TypeExpr, ...]:
    if isinstance(t, (Sum, Prod)):
        return (t.left, t.right)
    if isinstance(t, List):
        return (t.elem,)
    return ()


def type_nodes(t: TypeExpr) -> list[TypeNode]:
    """All parse-tree nodes of ``t`` in preorder.  Finite sets are single nodes."""
    out: list[TypeNode] = []

    def walk(sub: TypeExpr, path: tuple[int, ...]) -> None:
        out.append(TypeNode(path, sub))
        for i, c in enumerate(type_children(sub)):
            walk(c, path + (i,))

    walk(t, ())
    return out


def type_depth(t: TypeExpr) -> int:
    kids = type_children(t)
    return 1 + max((type_depth(c) for c in kids), default=0)


# ------------------------------------------------------------------- parsing

_IDENT_RE = re.compile(r"[A-Za-z0-9_#'.]+")
_RESERVED_TYPE = {"bot"}
_RESERVED_VALUE = {"bot", "inl", "inr"}


def _tokenize(text: str, symbols: tuple[str, ...]) -> list[tuple[str, str, int]]:
    """Split into (kind, text, pos) tokens; kind is 'id' or the symbol itself."""
    toks = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        m = _IDENT_RE.match(text, i)
        if m:
            toks.append(("id", m.group(), i))
            i = m.end()
            continue
        for sym in symbols:
            if text.startswith(sym, i):
                toks.append((sym, sym, i))
                i += len(sym)
                break
        else:
            raise ParseError(f"unexpected character {ch!r} at position {i}")
    return toks


_TYPE_SYMBOLS = ("^*", "{", "}", ",", "+", "*", "×", "[", "]", "(", ")")
_TYPE_STARTERS = {"{", "(", "["}


class _TypeParser:
    def __init__(self, text: str) -> None:
        self.toks = _tokenize(text, _TYPE_SYMBOLS)
        self.i = 0

    def peek(self, ahead: int = 0) -> str | None:
        j = self.i + ahead
        return self.toks[j][0] if j < len(self.toks) else None

    def next(self) -> tuple[str, str, int]:
        if self.i >= len(self.toks):
            raise ParseError("unexpected end of type")
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, kind: str) -> None:
        tok = self.next()
        if tok[0] != kind:
            raise ParseError(f"expected {kind!r} at position {tok[2]}, got {tok[1]!r}")

    def parse(self) -> TypeExpr:
        t = self.sum()
        if self.i != len(self.toks):
            tok = self.toks[self.i]
            raise ParseError(f"trailing {tok[1]!r} at position {tok[2]}")
        return t

    def sum(self) -> TypeExpr:
        t = self.prod()
        while self.peek() == "+":
            self.next()
            t = Sum(t, self.prod())
        return t

    def prod(self) -> TypeExpr:
        t = self.post()
        while self.peek() in ("*", "×"):
            self.next()
            t = Prod(t, self.post())
        return t

    def post(self) -> TypeExpr:
        t = self.atom()
        while True:
            nxt = self.peek()
            if nxt == "^*":
                self.next()
                t = List(t)
            elif nxt == "*" and not (self.peek(1) in _TYPE_STARTERS or self.peek(1) == "id"):
                # a star with no operand after it closes a list type
                self.next()
                t = List(t)
            else:
                return t

    def atom(self) -> TypeExpr:
        kind, text, pos = self.next()
        if kind == "{":
            names = []
            while True:
                tok = self.next()
                if tok[0] != "id":
                    raise ParseError(f"expected name at position {tok[2]}")
                if tok[1] in _RESERVED_VALUE:
                    raise ParseError(f"reserved word {tok[1]!r} cannot name a symbol")
                names.append(tok[1])
                tok = self.next()
                if tok[0] == "}":
                    return FinSet(tuple(names))
                if tok[0] != ",":
                    raise ParseError(f"expected ',' or '}}' at position {tok[2]}")
        if kind == "(":
            t = self.sum()
            self.expect(")")
            return t
        if kind == "[":
            t = self.sum()
            self.expect("]")
            return List(t)
        if kind == "id":
            if text == "bot":
                return BOT_T
            if text in _RESERVED_VALUE:
                raise ParseError(f"reserved word {text!r} cannot name a type")
            return Atom(text)
        raise ParseError(f"unexpected {text!r} at position {pos}")


def parse_type(text: str) -> TypeExpr:
    return _TypeParser(text).parse()


def render_type(t: TypeExpr, prec: int = 0) -> str:
    """Text for ``t``; ``prec`` is the binding strength of the context."""
    if isinstance(t, Atom):
        return t.name
    if isinstance(t, FinSet):
        return "{" + ",".join(t.names) + "}"
    if isinstance(t, Bot):
        return "bot"
    if isinstance(t, List):
        return render_type(t.elem, 2) + "^*"
    if isinstance(t, Prod):
        s = render_type(t.left, 1) + "×" + render_type(t.right, 2)
        return "(" + s + ")" if prec > 1 else s
    if isinstance(t, Sum):
        s = render_type(t.left, 0) + "+" + render_type(t.right, 1)
        return "(" + s + ")" if prec > 0 else s
    raise TypeError(f"not a type expression: {t!r}")


_VALUE_SYMBOLS = ("(", ")", "[", "]", ",")


class _ValueParser:
    def __init__(self, text: str) -> None:
        self.toks = _tokenize(text, _VALUE_SYMBOLS)
        self.i = 0

    def peek(self) -> str | None:
        return self.toks[self.i][0] if self.i < len(self.toks) else None

    def next(self) -> tuple[str, str, int]:
        if self.i >= len(self.toks):
            raise ParseError("unexpected end of value")
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, kind: str) -> None:
        tok = self.next()
        if tok[0] != kind:
            raise ParseError(f"expected {kind!r} at position {tok[2]}, got {tok[1]!r}")

    def parse(self) -> Value:
        v = self.value()
        if self.i != len(self.toks):
            tok = self.toks[self.i]
            raise ParseError(f"trailing {tok[1]!r} at position {tok[2]}")
        return v

    def value(self) -> Value:
        kind, text, pos = self.next()
        if kind == "id":
            if text == "bot":
                return BOT
            if text == "inl":
                return InL(self.value())
            if text == "inr":
                return InR(self.value())
            return Sym(text)
        if kind == "(":
            fst = self.value()
            self.expect(",")
            snd = self.value()
            self.expect(")")
            return PairV(fst, snd)
        if kind == "[":
            if self.peek() == "]":
                self.next()
                return ListV(())
            items = [self.value()]
            while True:
                tok = self.next()
                if tok[0] == "]":
                    return ListV(tuple(items))
                if tok[0] != ",":
                    raise ParseError(f"expected ',' or ']' at position {tok[2]}")
                items.append(self.value())
        raise ParseError(f"unexpected {text!r} at position {pos}")


def parse_value(text: str, t: TypeExpr | None = None) -> Value:
    """Parse a value; when a type is given, check the value against it."""
    v = _ValueParser(text).parse()
    if t is not None:
        require_value(v, t)
    return v


def render_value(v: Value) -> str:
    if isinstance(v, Sym):
        return v.name
    if isinstance(v, PairV):
        return f"({render_value(v.fst)},{render_value(v.snd)})"
    if isinstance(v, InL):
        return "inl " + render_value(v.value)
    if isinstance(v, InR):
        return "inr " + render_value(v.value)
    if isinstance(v, ListV):
        return "[" + ",".join(render_value(x) for x in v.items) + "]"
    if isinstance(v, BotV):
        return "bot"
    raise TypeError(f"not a value: {v!r}")


# ---------------------------------------------------------- string encoding

def string_encode(v: Value, t: TypeExpr) -> str:
    """Flatten ``v`` into a bracketed string.

    Lists are wrapped in <l>...</l>, pairs in <p>...<m>...</p>, sum injections
    become L:/R: prefixes and symbol names appear verbatim.  Decoding a merged
    run of names is driven by the type, longest name first.
    """
    require_value(v, t)
    parts: list[str] = []

    def enc(v: Value, t: TypeExpr) -> None:
        if isinstance(t, (Atom, FinSet)):
            parts.append(v.name)  # type: ignore[union-attr]
        elif isinstance(t, Bot):
            parts.append("bot")
        elif isinstance(t, Sum):
            if isinstance(v, InL):
                parts.append("L:")
                enc(v.value, t.left)
            else:
                parts.append("R:")
                enc(v.value, t.right)  # type: ignore[union-attr]
        elif isinstance(t, Prod):
            parts.append("<p>")
            enc(v.fst, t.left)  # type: ignore[union-attr]
            parts.append("<m>")
            enc(v.snd, t.right)  # type: ignore[union-attr]
            parts.append("</p>")
        elif isinstance(t, List):
            parts.append("<l>")
            for x in v.items:  # type: ignore[union-attr]
                enc(x, t.elem)
            parts.append("</l>")

    enc(v, t)
    return "".join(parts)


def string_decode(text: str, t: TypeExpr) -> Value:
    """Inverse of :func:`string_encode` at type ``t``."""
    pos = 0

    def fail(msg: str) -> EncodingError:
        return EncodingError(f"{msg} at position {pos} in {text!r}")

    def eat(token: str) -> None:
        nonlocal pos
        if not text.startswith(token, pos):
            raise fail(f"expected {token!r}")
        pos += len(token)

    def dec(t: TypeExpr) -> Value:
        nonlocal pos
        if isinstance(t, Atom):
            eat(t.name)
            return Sym(t.name)
        if isinstance(t, FinSet):
            for name in sorted(t.names, key=len, reverse=True):
                if text.startswith(name, pos):
                    pos += len(name)
                    return Sym(name)
            raise fail(f"expected one of {t.names}")
        if isinstance(t, Bot):
            eat("bot")
            return BOT
        if isinstance(t, Sum):
            if text.startswith("L:", pos):
                pos += 2
                return InL(dec(t.left))
            if text.startswith("R:", pos):
                pos += 2
                return InR(dec(t.right))
            raise fail("expected L: or R:")
        if isinstance(t, Prod):
            eat("<p>")
            fst = dec(t.left)
            eat("<m>")
            snd = dec(t.right)
            eat("</p>")
            return PairV(fst, snd)
        if isinstance(t, List):
            eat("<l>")
            items = []
            while not text.startswith("</l>", pos):
                if pos >= len(text):
                    raise fail("unterminated list")
                items.append(dec(t.elem))
            pos += len("</l>")
            return ListV(tuple(items))
        raise TypeError(f"not a type expression: {t!r}")

    v = dec(t)
    if pos != len(text):
        raise fail("trailing text")
    return v


# ----------------------------------------------------- enumeration & random

def value_size(v: Value) -> int:
    """Number of structural nodes; sum injections are transparent."""
    if isinstance(v, (Sym, BotV)):
        return 1
    if isinstance(v, (InL, InR)):
        return value_size(v.value)
    if isinstance(v, PairV):
        return 1 + value_size(v.fst) + value_size(v.snd)
    if isinstance(v, ListV):
        return 1 + sum(value_size(x) for x in v.items)
    raise TypeError(f"not a value: {v!r}")


@lru_cache(maxsize=None)
def min_size(t: TypeExpr) -> int:
    if isinstance(t, (Atom, FinSet, Bot)):
        return 1
    if isinstance(t, Sum):
        return min(min_size(t.left), min_size(t.right))
    if isinstance(t, Prod):
        return 1 + min_size(t.left) + min_size(t.right)
    if isinstance(t, List):
        return 1
    raise TypeError(f"not a type expression: {t!r}")


def enumerate_values(t: TypeExpr, max_size: int) -> Iterator[Value]:
    """All values of ``t`` up to the given size, in a fixed order."""
    if max_size < 1:
        return
    if isinstance(t, Atom):
        yield Sym(t.name)
    elif isinstance(t, FinSet):
        for name in t.names:
            yield Sym(name)
    elif isinstance(t, Bot):
        yield BOT
    elif isinstance(t, Sum):
        for v in enumerate_values(t.left, max_size):
            yield InL(v)
        for v in enumerate_values(t.right, max_size):
            yield InR(v)
    elif isinstance(t, Prod):
        for fst in enumerate_values(t.left, max_size - 1 - min_size(t.right)):
            rest = max_size - 1 - value_size(fst)
            for snd in enumerate_values(t.right, rest):
                yield PairV(fst, snd)
    elif isinstance(t, List):
        for items in _enumerate_seqs(t.elem, max_size - 1):
            yield ListV(items)
    else:
        raise TypeError(f"not a type expression: {t!r}")


def _enumerate_seqs(elem: TypeExpr, budget: int) -> Iterator[tuple[Value, ...]]:
    yield ()
    if budget < min_size(elem):
        return
    for first in enumerate_values(elem, budget - 0):
        rest = budget - value_size(first)
        if rest < 0:
            continue
        for tail in _enumerate_seqs(elem, rest):
            yield (first,) + tail


def default_value(t: TypeExpr) -> Value:
    """Some inhabitant of ``t``; every type expression has one."""
    if isinstance(t, Atom):
        return Sym(t.name)
    if isinstance(t, FinSet):
        return Sym(t.names[0])
    if isinstance(t, Bot):
        return BOT
    if isinstance(t, Sum):
        return InL(default_value(t.left))
    if isinstance(t, Prod):
        return PairV(default_value(t.left), default_value(t.right))
    if isinstance(t, List):
        return ListV(())
    raise TypeError(f"not a type expression: {t!r}")


def random_value(t: TypeExpr, budget: int, rng) -> Value:
    """Random inhabitant of ``t`` with size roughly bounded by ``budget``."""
    if isinstance(t, Atom):
        return Sym(t.name)
    if isinstance(t, FinSet):
        return Sym(rng.choice(t.names))
    if isinstance(t, Bot):
        return BOT
    if isinstance(t, Sum):
        left_ok = min_size(t.left) <= budget
        right_ok = min_size(t.right) <= budget
        if left_ok and (not right_ok or rng.random() < 0.5):
            return InL(random_value(t.left, budget, rng))
        return InR(random_value(t.right, budget, rng))
    if isinstance(t, Prod):
        share = max(min_size(t.left), (budget - 1) // 2)
        fst = random_value(t.left, share, rng)
        return PairV(fst, random_value(t.right, budget - 1 - value_size(fst), rng))
    if isinstance(t, List):
        room = budget - 1
        per = min_size(t.elem)
        max_len = max(0, room // max(per, 1))
        n = rng.randint(0, max_len)
        items = []
        for _ in range(n):
            if room < per:
                break
            v = random_value(t.elem, max(per, room // max(n, 1)), rng)
            room -= value_size(v)
            items.append(v)
        return ListV(tuple(items))
    raise TypeError(f"not a type expression: {t!r}")
