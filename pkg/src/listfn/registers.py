"""Register updates over a monoid, their products, and streaming evaluation.

A k-register update rewrites every register to a word of monoid literals and
register reads.  Monotone nonduplicating updates form a monoid under
substitution whose register-only abstractions give a finite monoid T_k, so a
long product can be computed through a bounded-depth factorisation tree:
binary products at small nodes, and a window construction at wide nodes where
all children share one abstraction.  Temporary registers (those that do not
feed back into themselves) are fully determined by the last k updates, which
is what keeps the wide-node construction local.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations, combinations_with_replacement
from typing import Hashable, Iterable, Sequence

from .algebra import (FiniteMonoid, Homomorphism, Leaf, Node, FactTree,
                      build_factorisation)
from .rational import RationalFn, eval_rational_direct


class UpdateError(ValueError):
    pass


@dataclass(frozen=True)
class Reg:
    """Read of register ``index`` (registers are named 1..k)."""
    index: int


@dataclass(frozen=True)
class Lit:
    """A monoid element; for free monoids, a tuple of letters."""
    value: Hashable


Item = Reg | Lit
Rhs = tuple[Item, ...]
RegUpdate = tuple[Rhs, ...]


class FreeMonoid:
    """Words with concatenation; elements are tuples of letters."""
    identity: tuple = ()

    def mult(self, a, b):
        return tuple(a) + tuple(b)

    def product(self, items):
        out: list = []
        for w in items:
            out.extend(w)
        return tuple(out)

    def __contains__(self, w) -> bool:
        return isinstance(w, tuple)


FREE = FreeMonoid()


def identity_update(k: int) -> RegUpdate:
    return tuple(((Reg(i),)) for i in range(1, k + 1))


def _check_update(eta: RegUpdate) -> int:
    k = len(eta)
    for rhs in eta:
        for item in rhs:
            if isinstance(item, Reg) and not 1 <= item.index <= k:
                raise UpdateError(f"register {item.index} out of range 1..{k}")
    return k


def normalise(eta: RegUpdate, monoid=FREE) -> RegUpdate:
    """Merge adjacent literals and drop identity literals."""
    out = []
    for rhs in eta:
        items: list[Item] = []
        for item in rhs:
            if isinstance(item, Lit):
                if item.value == monoid.identity:
                    continue
                if items and isinstance(items[-1], Lit):
                    items[-1] = Lit(monoid.mult(items[-1].value, item.value))
                    continue
            items.append(item)
        out.append(tuple(i for i in items
                         if not (isinstance(i, Lit)
                                 and i.value == monoid.identity)))
    return tuple(out)


def apply_update(v: tuple, eta: RegUpdate, monoid=FREE) -> tuple:
    """Right action: entry i becomes the i-th right-hand side evaluated at v."""
    k = _check_update(eta)
    if len(v) != k:
        raise UpdateError(f"valuation has {len(v)} entries, update has {k}")
    result = []
    for rhs in eta:
        result.append(monoid.product(
            v[item.index - 1] if isinstance(item, Reg) else item.value
            for item in rhs))
    return tuple(result)


def empty_valuation(k: int, monoid=FREE) -> tuple:
    return (monoid.identity,) * k


def update_product(eta1: RegUpdate, eta2: RegUpdate, monoid=FREE) -> RegUpdate:
    """The update acting like eta1 followed by eta2."""
    if len(eta1) != len(eta2):
        raise UpdateError("register counts differ")
    out = []
    for rhs in eta2:
        items: list[Item] = []
        for item in rhs:
            if isinstance(item, Reg):
                items.extend(eta1[item.index - 1])
            else:
                items.append(item)
        out.append(tuple(items))
    return normalise(tuple(out), monoid)


def is_nonduplicating(eta: RegUpdate) -> bool:
    seen = set()
    for rhs in eta:
        for item in rhs:
            if isinstance(item, Reg):
                if item.index in seen:
                    return False
                seen.add(item.index)
    return True


def is_monotone(eta: RegUpdate) -> bool:
    """Register reads strictly increase across the concatenated sides."""
    last = 0
    for rhs in eta:
        for item in rhs:
            if isinstance(item, Reg):
                if item.index <= last:
                    return False
                last = item.index
    return True


def abstraction(eta: RegUpdate) -> RegUpdate:
    """Erase all monoid literals, keeping only register reads."""
    return tuple(tuple(i for i in rhs if isinstance(i, Reg)) for rhs in eta)


# ------------------------------------------------------- abstraction monoid

def abstraction_name(tau: RegUpdate) -> str:
    return ";".join(",".join(str(i.index) for i in rhs) for rhs in tau)


def enumerate_abstractions(k: int) -> list[RegUpdate]:
    """All monotone nonduplicating k-register abstractions."""
    out = []
    for j in range(k + 1):
        for kept in combinations(range(1, k + 1), j):
            for cuts in combinations_with_replacement(range(j + 1), k - 1):
                bounds = (0,) + cuts + (j,)
                rhss = tuple(tuple(Reg(i) for i in kept[bounds[c]:bounds[c + 1]])
                             for c in range(k))
                out.append(rhss)
    return out


@lru_cache(maxsize=None)
def t_k_monoid(k: int) -> tuple[FiniteMonoid, dict[str, RegUpdate]]:
    """The finite monoid T_k of abstractions, with a name-to-abstraction map."""
    abstractions = enumerate_abstractions(k)
    by_name = {abstraction_name(t): t for t in abstractions}
    table = {}
    for n1, t1 in by_name.items():
        for n2, t2 in by_name.items():
            prod = update_product(t1, t2)
            name = abstraction_name(prod)
            if name not in by_name:
                raise AssertionError("abstraction product left the universe")
            table[(n1, n2)] = name
    identity = abstraction_name(identity_update(k))
    return FiniteMonoid(tuple(by_name), table, identity), by_name


# ------------------------------------------------- homogeneous products

def leftsub(eta: RegUpdate) -> list:
    """Literals before the read of register 1 in a 1-register update."""
    return _around_reg1(eta)[0]


def rightsub(eta: RegUpdate) -> list:
    return _around_reg1(eta)[1]


def _around_reg1(eta: RegUpdate) -> tuple[list, list]:
    if len(eta) != 1:
        raise UpdateError("leftsub/rightsub apply to 1-register updates")
    rhs = eta[0]
    positions = [p for p, item in enumerate(rhs) if isinstance(item, Reg)]
    if len(positions) != 1 or rhs[positions[0]].index != 1:
        raise UpdateError("right-hand side must read register 1 exactly once")
    p = positions[0]
    return ([i.value for i in rhs[:p]], [i.value for i in rhs[p + 1:]])


def _require_homogeneous(etas: Sequence[RegUpdate], tau: RegUpdate) -> None:
    for eta in etas:
        if abstraction(eta) != tau:
            raise UpdateError("sequence is not homogeneous for the given "
                              "abstraction")


def homogeneous_product_1reg(etas: Sequence[RegUpdate],
                             tau: RegUpdate, monoid=FREE) -> RegUpdate:
    """Product of same-abstraction 1-register updates.

    Keep case: literals to the left of the register pile up in reverse order,
    literals to the right in forward order.  Discard case: the last update
    wins outright.
    """
    if not etas:
        raise UpdateError("empty homogeneous product")
    _require_homogeneous(etas, tau)
    if tau == ((),):
        return normalise(etas[-1], monoid)
    if tau != ((Reg(1),),):
        raise UpdateError("not a 1-register abstraction")
    items: list[Item] = []
    for eta in reversed(etas):
        items.extend(Lit(v) for v in leftsub(eta))
    items.append(Reg(1))
    for eta in etas:
        items.extend(Lit(v) for v in rightsub(eta))
    return normalise((tuple(items),), monoid)


def dependency_graph(tau: RegUpdate) -> set[tuple[int, int]]:
    """Edges (i, j) meaning the i-th side reads register j."""
    return {(i + 1, item.index)
            for i, rhs in enumerate(tau) for item in rhs}


def temporary_registers(tau: RegUpdate) -> set[int]:
    """Registers without a self-loop: their content never feeds back."""
    return {i for i in range(1, len(tau) + 1)
            if (i, i) not in dependency_graph(tau)}


def _window_products(etas: Sequence[RegUpdate], k: int,
                     monoid) -> list[RegUpdate]:
    """Entry i: product of the up-to-k updates before position i."""
    out = []
    for i in range(len(etas) + 1):
        window = etas[max(0, i - k):i]
        acc = identity_update(len(etas[0]))
        for eta in window:
            acc = update_product(acc, eta, monoid)
        out.append(normalise(acc, monoid))
    return out


def prefix_products_temporary(etas: Sequence[RegUpdate],
                              monoid=FREE) -> list[RegUpdate]:
    """For all-temporary abstractions each prefix product is a window product.

    Entry i equals the product of the first i+1 updates: only the last k
    matter because temporary content is rewritten from scratch within any k
    consecutive steps.
    """
    if not etas:
        return []
    tau = abstraction(etas[0])
    _require_homogeneous(etas, tau)
    if temporary_registers(tau) != set(range(1, len(tau) + 1)):
        raise UpdateError("an update feeds a register back into itself")
    k = len(etas[0])
    windows = _window_products(etas, k, monoid)
    return windows[1:]


def homogeneous_product(etas: Sequence[RegUpdate], tau: RegUpdate | None = None,
                        monoid=FREE) -> RegUpdate:
    """Product of a same-abstraction sequence using k-bounded windows.

    Temporary registers come straight from the final window product.  A
    register that feeds back into itself accumulates: at each step the
    literals and resolved temporaries around its read are attached to the
    left and right of what was built so far.
    """
    if not etas:
        raise UpdateError("empty homogeneous product")
    if tau is None:
        tau = abstraction(etas[0])
    _require_homogeneous(etas, tau)
    k = len(tau)
    n = len(etas)
    temps = temporary_registers(tau)
    windows = _window_products(etas, k, monoid)
    final: list[Rhs] = [()] * k

    def resolve(items: Iterable[Item], window: RegUpdate) -> list[Item]:
        out: list[Item] = []
        for item in items:
            if isinstance(item, Reg):
                if item.index not in temps:
                    raise AssertionError("foreign self-feeding register read")
                out.extend(window[item.index - 1])
            else:
                out.append(item)
        return out

    for t in temps:
        final[t - 1] = windows[n][t - 1]

    for r in range(1, k + 1):
        if r in temps:
            continue
        body = list(etas[0][r - 1])
        for i in range(1, n):
            rhs = etas[i][r - 1]
            pos = next(p for p, item in enumerate(rhs)
                       if isinstance(item, Reg) and item.index == r)
            before = resolve(rhs[:pos], windows[i])
            after = resolve(rhs[pos + 1:], windows[i])
            body = before + body + after
        final[r - 1] = tuple(body)

    return normalise(tuple(final), monoid)


def product_list_updates(etas: Sequence[RegUpdate], k: int | None = None,
                         monoid=FREE) -> RegUpdate:
    """Product of any update list, structured by a factorisation tree.

    The tree is built over T_k through the abstraction homomorphism; wide
    nodes have same-abstraction children and use the window construction.
    """
    if not etas:
        if k is None:
            raise UpdateError("register count needed for an empty product")
        return identity_update(k)
    k = len(etas[0])
    for eta in etas:
        _check_update(eta)
        if len(eta) != k:
            raise UpdateError("register counts differ across the sequence")
        if not (is_nonduplicating(eta) and is_monotone(eta)):
            raise UpdateError("updates must be nonduplicating and monotone")
    if len(etas) == 1:
        return normalise(etas[0], monoid)
    t_k, _ = t_k_monoid(k)
    hom = Homomorphism(t_k, lambda eta: abstraction_name(abstraction(eta)))
    tree = build_factorisation(hom, list(etas))

    def evaluate(t: FactTree) -> RegUpdate:
        assert isinstance(t, Node)
        if len(t.children) == 1 and isinstance(t.children[0], Leaf):
            return normalise(t.children[0].letter, monoid)
        parts = [evaluate(c) for c in t.children]
        if len(parts) == 2:
            return update_product(parts[0], parts[1], monoid)
        return homogeneous_product(parts, None, monoid)

    return evaluate(tree)


def apply_update_sequence(etas: Sequence[RegUpdate], k: int | None = None,
                          monoid=FREE) -> tuple:
    """Product applied to the all-identity valuation."""
    total = product_list_updates(etas, k, monoid)
    return apply_update(empty_valuation(len(total), monoid), total, monoid)


def random_abstraction(k: int, rng) -> RegUpdate:
    """Uniformly shaped monotone nonduplicating abstraction."""
    kept = sorted(rng.sample(range(1, k + 1), rng.randint(0, k)))
    cuts = sorted(rng.randint(0, len(kept)) for _ in range(k - 1))
    bounds = [0, *cuts, len(kept)]
    return tuple(tuple(Reg(i) for i in kept[bounds[c]:bounds[c + 1]])
                 for c in range(k))


def random_update_like(tau: RegUpdate, rng, letters=("a", "b"),
                       max_lit: int = 3) -> RegUpdate:
    """Random update with abstraction ``tau``: literals around each read."""
    def lit() -> Lit:
        return Lit(tuple(rng.choice(letters)
                         for _ in range(rng.randint(0, max_lit))))

    out = []
    for rhs in tau:
        items: list[Item] = [lit()]
        for item in rhs:
            items.append(item)
            items.append(lit())
        out.append(tuple(items))
    return normalise(tuple(out))


def random_update(k: int, rng, letters=("a", "b"), max_lit: int = 3) -> RegUpdate:
    return random_update_like(random_abstraction(k, rng), rng, letters, max_lit)


def output_first(etas: Sequence[RegUpdate], k: int | None = None,
                 monoid=FREE) -> tuple:
    if not etas and k is None:
        raise UpdateError("register count needed for an empty sequence")
    return apply_update_sequence(etas, k, monoid)[0]


# --------------------------------------------------------------- update text

_COMPONENT_RE = re.compile(r"^\s*(\d+)\s*:=\s*\[(.*)\]\s*$")
_ITEM_RE = re.compile(r'\s*(?:\$(\d+)|"([^"]*)"|([A-Za-z0-9_#\'.]+))\s*$')


def parse_update(text: str, monoid=FREE) -> RegUpdate:
    """Parse `1 := ["ab", $2]; 2 := []` into an update.

    Quoted literals are free-monoid words read letter by letter; bare names
    are elements of a finite monoid.
    """
    rhss = []
    components = text.split(";")
    for expected, component in enumerate(components, start=1):
        m = _COMPONENT_RE.match(component)
        if not m:
            raise UpdateError(f"bad update component: {component.strip()!r}")
        if int(m.group(1)) != expected:
            raise UpdateError(
                f"components must name registers 1..{len(components)} in "
                f"order, got {m.group(1)}")
        body = m.group(2).strip()
        items: list[Item] = []
        if body:
            for piece in body.split(","):
                im = _ITEM_RE.match(piece)
                if not im:
                    raise UpdateError(f"bad update item: {piece.strip()!r}")
                reg, quoted, bare = im.groups()
                if reg is not None:
                    items.append(Reg(int(reg)))
                elif quoted is not None:
                    items.append(Lit(tuple(quoted)))
                else:
                    if isinstance(monoid, FreeMonoid):
                        raise UpdateError(
                            f"free-monoid literals must be quoted: {bare!r}")
                    items.append(Lit(bare))
        rhss.append(tuple(items))
    update = tuple(rhss)
    _check_update(update)
    return update


def render_update(eta: RegUpdate, monoid=FREE) -> str:
    parts = []
    for i, rhs in enumerate(eta, start=1):
        items = []
        for item in rhs:
            if isinstance(item, Reg):
                items.append(f"${item.index}")
            elif isinstance(monoid, FreeMonoid):
                items.append('"' + "".join(item.value) + '"')
            else:
                items.append(str(item.value))
        parts.append(f"{i} := [" + ", ".join(items) + "]")
    return "; ".join(parts)


# ----------------------------------------------------------------------- SST

@dataclass(frozen=True)
class SSTSpec:
    """Deterministic streaming transducer with copyless register updates."""
    name: str
    input_letters: tuple[str, ...]
    states: tuple[str, ...]
    initial: str
    registers: int
    transitions: dict[tuple[str, str], tuple[str, RegUpdate]]
    output_register: int = 1

    def __post_init__(self) -> None:
        if self.initial not in self.states:
            raise UpdateError("initial state unknown")
        if not 1 <= self.output_register <= self.registers:
            raise UpdateError("output register out of range")
        for (state, letter), (target, eta) in self.transitions.items():
            if state not in self.states or target not in self.states:
                raise UpdateError(f"unknown state in transition {state},{letter}")
            if letter not in self.input_letters:
                raise UpdateError(f"unknown letter {letter}")
            if len(eta) != self.registers:
                raise UpdateError("transition update has wrong register count")
            if not (is_nonduplicating(eta) and is_monotone(eta)):
                raise UpdateError("transition updates must be copyless and "
                                  "monotone")

    def _updates_along(self, word: Sequence[str]) -> list[RegUpdate]:
        state = self.initial
        etas = []
        for a in word:
            try:
                state, eta = self.transitions[(state, a)]
            except KeyError:
                raise UpdateError(f"missing transition from {state} on {a!r}")
            etas.append(eta)
        return etas


def run_sst_naive(sst: SSTSpec, word: Sequence[str]) -> tuple:
    """Stepwise run: apply every transition update to the valuation."""
    v = empty_valuation(sst.registers)
    for eta in sst._updates_along(word):
        v = apply_update(v, eta)
    return v[sst.output_register - 1]


def run_sst_structured(sst: SSTSpec, word: Sequence[str]) -> tuple:
    """Collect the update stream, take one structured product, apply once."""
    etas = sst._updates_along(word)
    total = product_list_updates(etas, sst.registers)
    v = apply_update(empty_valuation(sst.registers), total)
    return v[sst.output_register - 1]


def fot_pipeline_eval(g: RationalFn, k: int, word: Sequence[str]) -> tuple:
    """Evaluate a rational function whose output letters are update text.

    The emitted updates are multiplied out and applied to the all-empty
    valuation; the first register is the output word.
    """
    letters = eval_rational_direct(g, word)
    etas = []
    for letter in letters:
        eta = parse_update(letter)
        if len(eta) != k:
            raise UpdateError(f"update {letter!r} is not over {k} registers")
        if not (is_nonduplicating(eta) and is_monotone(eta)):
            raise UpdateError(f"update {letter!r} not copyless and monotone")
        etas.append(eta)
    return output_first(etas, k)
