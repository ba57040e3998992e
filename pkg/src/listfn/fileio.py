"""Line-oriented files for persisting and exchanging artifacts.

Every file opens with a one-line header naming its format and version, for
example ``listfn-rational 1``.  Later lines hold whitespace-separated fields;
a field containing spaces is shell-quoted, and ``#`` starts a comment line.
Term files are the exception: after the header the rest of the file is raw
term text, since terms carry their own quoting.

A pipeline file stores both the source rational function and the compiled
position-class table.  Loading rebuilds the pipeline around the stored table,
so a hand-edited table row changes what the pipeline computes and is caught
when its output is compared against direct evaluation.
"""
from __future__ import annotations

import shlex
from dataclasses import dataclass, field
from pathlib import Path

from .algebra import FiniteMonoid
from .logic import (
    FOTransduction,
    Interpretation1D,
    Structure,
    parse_formula,
    render_formula,
)
from .rational import (
    Pipeline,
    RationalFn,
    compile_rational,
    output_table,
    triple_alphabet,
)
from .registers import SSTSpec, UpdateError, parse_update, render_update
from .syntax import parse_term, render_term
from .terms import GroupSpec, Term
from .types import ParseError, TypeExpr, parse_type, render_type


class FileFormatError(ParseError):
    """A persisted artifact does not match its declared format."""


_HEADER_PREFIX = "listfn-"
_VERSION = "1"


def _fields(line: str, where: str) -> list[str]:
    try:
        return shlex.split(line, comments=False)
    except ValueError as e:
        raise FileFormatError(f"{where}: {e} in {line!r}") from None


def _line(*fields: object) -> str:
    return " ".join(shlex.quote(str(f)) for f in fields)


def _read_body(path: str | Path, kind: str | None,
               raw: bool = False) -> tuple[str, list[str]]:
    """Check the header, return (kind, body lines); raw keeps comment lines."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise FileFormatError(f"{path}: {e}") from None
    lines = text.splitlines()
    if not lines:
        raise FileFormatError(f"{path}: empty file")
    header = lines[0].split()
    if len(header) != 2 or not header[0].startswith(_HEADER_PREFIX):
        raise FileFormatError(f"{path}: missing listfn format header")
    found = header[0][len(_HEADER_PREFIX):]
    if kind is not None and found != kind:
        raise FileFormatError(
            f"{path}: expected {_HEADER_PREFIX}{kind}, found {header[0]}")
    if header[1] != _VERSION:
        raise FileFormatError(f"{path}: unsupported version {header[1]}")
    body = lines[1:]
    if not raw:
        body = [ln for ln in body
                if ln.strip() and not ln.lstrip().startswith("#")]
    return found, body


def _write(path: str | Path, kind: str, body: list[str]) -> None:
    text = "\n".join([f"{_HEADER_PREFIX}{kind} {_VERSION}", *body]) + "\n"
    Path(path).write_text(text, encoding="utf-8")


class _Body:
    """Keyword-line cursor over a parsed body."""

    def __init__(self, body: list[str], where: str) -> None:
        self.rows = [_fields(ln, where) for ln in body]
        self.where = where

    def take(self, keyword: str, count: int | None = None) -> list[str]:
        """The fields after the single required line starting with keyword."""
        hits = [r for r in self.rows if r and r[0] == keyword]
        if len(hits) != 1:
            raise FileFormatError(
                f"{self.where}: need exactly one {keyword!r} line")
        args = hits[0][1:]
        if count is not None and len(args) != count:
            raise FileFormatError(
                f"{self.where}: {keyword!r} takes {count} field(s)")
        return args

    def all(self, keyword: str) -> list[list[str]]:
        return [r[1:] for r in self.rows if r and r[0] == keyword]

    def check_keywords(self, allowed: set[str]) -> None:
        for r in self.rows:
            if r and r[0] not in allowed:
                raise FileFormatError(
                    f"{self.where}: unknown line keyword {r[0]!r}")


# ------------------------------------------------------------------- types

def save_type(path: str | Path, t: TypeExpr) -> None:
    _write(path, "type", [render_type(t)])


def load_type(path: str | Path) -> TypeExpr:
    _, body = _read_body(path, "type")
    if len(body) != 1:
        raise FileFormatError(f"{path}: a type file holds one line")
    return parse_type(body[0].strip())


# ------------------------------------------------------------------- terms

def save_term(path: str | Path, t: Term) -> None:
    _write(path, "term", [render_term(t)])


def load_term(path: str | Path, groups=None) -> Term:
    _, body = _read_body(path, "term", raw=True)
    text = "\n".join(body).strip()
    if not text:
        raise FileFormatError(f"{path}: term file has no term")
    return parse_term(text, groups)


# ----------------------------------------------------------------- monoids

def save_monoid(path: str | Path, m: FiniteMonoid,
                letters: dict[str, str] | None = None) -> None:
    body = [_line("elements", *m.elements), _line("identity", m.identity)]
    for a in m.elements:
        body.append(_line("row", a, *(m.mult(a, b) for b in m.elements)))
    for a, img in (letters or {}).items():
        body.append(_line("letter", a, img))
    _write(path, "monoid", body)


def _parse_monoid(b: _Body) -> tuple[FiniteMonoid, dict[str, str] | None]:
    b.check_keywords({"elements", "identity", "row", "letter"})
    m = _parse_monoid_rows(b)
    if any(len(r) != 2 for r in b.all("letter")):
        raise FileFormatError(f"{b.where}: letter lines take 2 fields")
    letters = {r[0]: r[1] for r in b.all("letter")}
    for a, img in letters.items():
        if img not in m.elements:
            raise FileFormatError(f"{b.where}: letter {a} maps outside")
    return m, (letters or None)


def load_monoid(path: str | Path) -> tuple[FiniteMonoid, dict[str, str] | None]:
    _, body = _read_body(path, "monoid")
    return _parse_monoid(_Body(body, str(path)))


# ------------------------------------------------------------------ groups

def save_group(path: str | Path, g: GroupSpec) -> None:
    body = [_line("elements", *g.elements), _line("identity", g.identity)]
    for a, row in zip(g.elements, g.rows):
        body.append(_line("row", a, *row))
    _write(path, "group", body)


def _parse_group(b: _Body) -> GroupSpec:
    b.check_keywords({"elements", "identity", "row"})
    elements = tuple(b.take("elements"))
    identity = b.take("identity", 1)[0]
    by_first = {}
    for row in b.all("row"):
        if len(row) != len(elements) + 1:
            raise FileFormatError(f"{b.where}: row needs 1+{len(elements)} fields")
        by_first[row[0]] = tuple(row[1:])
    if set(by_first) != set(elements):
        raise FileFormatError(f"{b.where}: need one row per element")
    try:
        return GroupSpec(elements, tuple(by_first[a] for a in elements), identity)
    except ValueError as e:
        raise FileFormatError(f"{b.where}: {e}") from None


def load_group(path: str | Path) -> GroupSpec:
    _, body = _read_body(path, "group")
    return _parse_group(_Body(body, str(path)))


# --------------------------------------------------------------- rationals

def _rational_body(r: RationalFn) -> list[str]:
    body = [
        _line("name", r.name),
        _line("input", *r.input_letters),
        _line("output", *r.output_letters),
        _line("empty", *r.empty_output),
        _line("elements", *r.monoid.elements),
        _line("identity", r.monoid.identity),
    ]
    for a in r.monoid.elements:
        body.append(_line("row", a,
                          *(r.monoid.mult(a, b) for b in r.monoid.elements)))
    for a in r.input_letters:
        body.append(_line("h", a, r.h[a]))
    for (m, a, mr), block in sorted(r.out.items()):
        body.append(_line("out", m, a, mr, *block))
    return body


def save_rational(path: str | Path, r: RationalFn) -> None:
    _write(path, "rational", _rational_body(r))


_RATIONAL_KEYWORDS = {"name", "input", "output", "empty", "elements",
                      "identity", "row", "h", "out"}


def _parse_rational(b: _Body, extra_keywords: set[str] = frozenset()) -> RationalFn:
    b.check_keywords(_RATIONAL_KEYWORDS | extra_keywords)
    monoid = _parse_monoid_rows(b)
    name = b.take("name", 1)[0]
    inputs = tuple(b.take("input"))
    outputs = tuple(b.take("output"))
    empty = tuple(b.take("empty"))
    h = {}
    for row in b.all("h"):
        if len(row) != 2:
            raise FileFormatError(f"{b.where}: h lines take 2 fields")
        h[row[0]] = row[1]
    out: dict[tuple[str, str, str], tuple[str, ...]] = {}
    for row in b.all("out"):
        if len(row) < 3:
            raise FileFormatError(f"{b.where}: out lines need m, letter, m'")
        out[(row[0], row[1], row[2])] = tuple(row[3:])
    try:
        return RationalFn(name, inputs, outputs, monoid, h, out, empty)
    except ValueError as e:
        raise FileFormatError(f"{b.where}: {e}") from None


def _parse_monoid_rows(b: _Body) -> FiniteMonoid:
    elements = tuple(b.take("elements"))
    identity = b.take("identity", 1)[0]
    table: dict[tuple[str, str], str] = {}
    for row in b.all("row"):
        if len(row) != len(elements) + 1:
            raise FileFormatError(f"{b.where}: row needs 1+{len(elements)} fields")
        for y, product in zip(elements, row[1:]):
            table[(row[0], y)] = product
    try:
        return FiniteMonoid(elements, table, identity)
    except ValueError as e:
        raise FileFormatError(f"{b.where}: {e}") from None


def load_rational(path: str | Path) -> RationalFn:
    _, body = _read_body(path, "rational")
    return _parse_rational(_Body(body, str(path)))


# --------------------------------------------------------------- pipelines

def save_pipeline(path: str | Path, p: Pipeline) -> None:
    body = _rational_body(p.rational)
    body.append(_line("bound", p.bound))
    table = output_table(p.rational)
    for name in triple_alphabet(p.rational).names:
        body.append(_line("table", name, *table[name]))
    _write(path, "pipeline", body)


def load_pipeline(path: str | Path) -> Pipeline:
    _, body = _read_body(path, "pipeline")
    b = _Body(body, str(path))
    r = _parse_rational(b, extra_keywords={"bound", "table"})
    if not b.take("bound", 1)[0].isdigit():
        raise FileFormatError(f"{path}: bound must be a number")
    table: dict[str, tuple[str, ...]] = {}
    for row in b.all("table"):
        if not row:
            raise FileFormatError(f"{path}: table lines name a triple")
        table[row[0]] = tuple(row[1:])
    missing = [n for n in triple_alphabet(r).names if n not in table]
    if missing:
        raise FileFormatError(f"{path}: table misses triple {missing[0]}")
    return compile_rational(r, table=table)


# -------------------------------------------------------------------- SSTs

def save_sst(path: str | Path, sst: SSTSpec) -> None:
    body = [
        _line("name", sst.name),
        _line("input", *sst.input_letters),
        _line("states", *sst.states),
        _line("initial", sst.initial),
        _line("registers", sst.registers),
        _line("output-register", sst.output_register),
    ]
    for (state, letter), (target, eta) in sorted(sst.transitions.items()):
        body.append(_line("trans", state, letter, target, render_update(eta)))
    _write(path, "sst", body)


def _parse_sst(b: _Body) -> SSTSpec:
    b.check_keywords({"name", "input", "states", "initial", "registers",
                      "output-register", "trans"})
    transitions = {}
    for row in b.all("trans"):
        if len(row) != 4:
            raise FileFormatError(
                f"{b.where}: trans lines take state, letter, target, update")
        try:
            eta = parse_update(row[3])
        except UpdateError as e:
            raise FileFormatError(f"{b.where}: {e}") from None
        transitions[(row[0], row[1])] = (row[2], eta)
    registers = b.take("registers", 1)[0]
    output_register = b.take("output-register", 1)[0]
    if not (registers.isdigit() and output_register.isdigit()):
        raise FileFormatError(f"{b.where}: register counts must be numbers")
    try:
        return SSTSpec(
            name=b.take("name", 1)[0],
            input_letters=tuple(b.take("input")),
            states=tuple(b.take("states")),
            initial=b.take("initial", 1)[0],
            registers=int(registers),
            transitions=transitions,
            output_register=int(output_register))
    except UpdateError as e:
        raise FileFormatError(f"{b.where}: {e}") from None


def load_sst(path: str | Path) -> SSTSpec:
    _, body = _read_body(path, "sst")
    return _parse_sst(_Body(body, str(path)))


# -------------------------------------------------------------- structures

def _structure_body(s: Structure) -> list[str]:
    body = [_line("universe", *s.universe)]
    for name in sorted(s.vocabulary):
        body.append(_line("rel", name, s.vocabulary[name]))
        for row in sorted(s.relations.get(name, frozenset())):
            body.append(_line("tuple", *row))
    return body


def format_structure(s: Structure) -> str:
    """The full file text for a structure, header included."""
    return "\n".join([f"{_HEADER_PREFIX}structure {_VERSION}",
                      *_structure_body(s)]) + "\n"


def save_structure(path: str | Path, s: Structure) -> None:
    _write(path, "structure", _structure_body(s))


def _int_fields(row: list[str], where: str) -> tuple[int, ...]:
    try:
        return tuple(int(f) for f in row)
    except ValueError:
        raise FileFormatError(f"{where}: elements must be integers") from None


def _parse_structure(b: _Body) -> Structure:
    universe: tuple[int, ...] | None = None
    vocabulary: dict[str, int] = {}
    relations: dict[str, set] = {}
    current: str | None = None
    for row in b.rows:
        if not row:
            continue
        if row[0] == "universe":
            if universe is not None:
                raise FileFormatError(f"{b.where}: repeated universe line")
            universe = _int_fields(row[1:], b.where)
        elif row[0] == "rel":
            if len(row) != 3 or not row[2].isdigit():
                raise FileFormatError(f"{b.where}: rel lines take name, arity")
            current = row[1]
            if current in vocabulary:
                raise FileFormatError(f"{b.where}: repeated relation {current}")
            vocabulary[current] = int(row[2])
            relations[current] = set()
        elif row[0] == "tuple":
            if current is None:
                raise FileFormatError(f"{b.where}: tuple before any rel line")
            items = _int_fields(row[1:], b.where)
            if len(items) != vocabulary[current]:
                raise FileFormatError(
                    f"{b.where}: tuple arity mismatch under {current}")
            relations[current].add(items)
        else:
            raise FileFormatError(f"{b.where}: unknown line keyword {row[0]!r}")
    if universe is None:
        raise FileFormatError(f"{b.where}: missing universe line")
    try:
        return Structure(universe, vocabulary,
                         {n: frozenset(rows) for n, rows in relations.items()})
    except ValueError as e:
        raise FileFormatError(f"{b.where}: {e}") from None


def load_structure(path: str | Path) -> Structure:
    _, body = _read_body(path, "structure")
    return _parse_structure(_Body(body, str(path)))


# ------------------------------------------------------------ transductions

def save_fot(path: str | Path, t: FOTransduction) -> None:
    interp = t.interp
    body = [_line("copies", t.k)]
    for name in sorted(interp.input_vocab):
        body.append(_line("input", name, interp.input_vocab[name]))
    for name in sorted(interp.output_vocab):
        body.append(_line("output", name, interp.output_vocab[name]))
    body.append(_line("universe", interp.universe_var,
                      render_formula(interp.universe_formula)))
    for name in sorted(interp.relation_formulas):
        phi, order = interp.relation_formulas[name]
        body.append(_line("rel", name, *order, render_formula(phi)))
    _write(path, "fot", body)


def _vocab(rows: list[list[str]], where: str, keyword: str) -> dict[str, int]:
    vocab = {}
    for row in rows:
        if len(row) != 2 or not row[1].isdigit():
            raise FileFormatError(f"{where}: {keyword} lines take name, arity")
        vocab[row[0]] = int(row[1])
    return vocab


def _parse_fot(b: _Body) -> FOTransduction:
    b.check_keywords({"copies", "input", "output", "universe", "rel"})
    copies = b.take("copies", 1)[0]
    if not copies.isdigit() or int(copies) < 1:
        raise FileFormatError(f"{b.where}: copies must be a positive number")
    input_vocab = _vocab(b.all("input"), b.where, "input")
    output_vocab = _vocab(b.all("output"), b.where, "output")
    uni = b.take("universe", 2)
    tables: dict[str, tuple] = {}
    for row in b.all("rel"):
        if len(row) < 2:
            raise FileFormatError(
                f"{b.where}: rel lines take name, variables, formula")
        tables[row[0]] = (parse_formula(row[-1]), tuple(row[1:-1]))
    try:
        interp = Interpretation1D(input_vocab, output_vocab, uni[0],
                                  parse_formula(uni[1]), tables)
    except ValueError as e:
        raise FileFormatError(f"{b.where}: {e}") from None
    return FOTransduction(int(copies), interp)


def load_fot(path: str | Path) -> FOTransduction:
    _, body = _read_body(path, "fot")
    return _parse_fot(_Body(body, str(path)))


# --------------------------------------------------------------- workspace

_LOADERS = {
    "type": load_type,
    "term": load_term,
    "monoid": load_monoid,
    "group": load_group,
    "rational": load_rational,
    "pipeline": load_pipeline,
    "sst": load_sst,
    "structure": load_structure,
    "fot": load_fot,
}


def load_artifact(path: str | Path) -> tuple[str, object]:
    """Load any artifact file, dispatching on its header."""
    kind, _ = _read_body(path, None, raw=True)
    if kind not in _LOADERS:
        raise FileFormatError(f"{path}: unknown format listfn-{kind}")
    return kind, _LOADERS[kind](path)


@dataclass
class Workspace:
    """Artifacts loaded from files, keyed by file stem; names are unique."""

    artifacts: dict[str, tuple[str, object]] = field(default_factory=dict)

    @classmethod
    def load(cls, paths) -> "Workspace":
        ws = cls()
        for path in paths:
            ws.add_file(path)
        return ws

    def add_file(self, path: str | Path) -> str:
        name = Path(path).stem
        if name in self.artifacts:
            raise FileFormatError(f"duplicate artifact name {name!r}")
        self.artifacts[name] = load_artifact(path)
        return name

    def get(self, kind: str, name: str):
        if name not in self.artifacts:
            raise FileFormatError(f"no artifact named {name!r}")
        found, obj = self.artifacts[name]
        if found != kind:
            raise FileFormatError(f"{name!r} is a {found}, not a {kind}")
        return obj

    def names(self, kind: str) -> list[str]:
        return sorted(n for n, (k, _) in self.artifacts.items() if k == kind)
