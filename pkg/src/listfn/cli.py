"""Command-line front end for the list-function toolkit.

Subcommands::

    typecheck TERM                     print a term's domain and codomain
    eval TERM VALUE                    run a term on a value
    forest MONOID WORD                 factorisation tree, validity, depth
    compile-rational RAT [-o FILE]     compile to a pipeline file
    run-pipeline FILE WORD             run a pipeline, cross-check against
                                       direct evaluation
    check WHICH [TARGET]               randomized equivalence checks
    sst SST WORD [--mode ...]          run a streaming transducer
    encode VALUE TYPE [-o FILE]        value to relational structure
    decode FILE TYPE                   structure back to a value
    fot TRANS [FILE] [-o FILE]         apply a transduction to a structure

TERM, MONOID, RAT, SST and TRANS arguments may name a file or a built-in
sample; anything that is not an existing file is parsed as inline text or
looked up by name.  Words are written as plain strings of one-letter symbols
("abab") or comma-separated ("a,b,ab").

Exit codes: 0 success, 2 syntax error, 3 type or runtime error, 4 a
cross-check found disagreeing routes.  ``--seed N`` (or the ``LISTFN_SEED``
environment variable) fixes the randomized checks; reports repeat the seed
they used.  ``--format json-lines`` switches every command to one JSON
record per result with keys ``kind``, ``input``, ``output``, ``status``.
"""
from __future__ import annotations

import argparse
import json
import os
import random
import sys
from functools import reduce
from pathlib import Path

from . import fileio
from .algebra import (
    FactTree,
    Homomorphism,
    Leaf,
    NotAperiodicError,
    build_factorisation,
    eval_hom_via_forest,
    forest_depth_bound,
    tree_depth,
    tree_yield,
    validate_factorisation,
)
from .logic import (
    LogicError,
    apply_transduction,
    builtin_fot,
    builtin_names,
    builtin_term,
    check_commutes,
    decode_structure,
    decode_word_structure,
    encode_value,
    word_structure,
)
from .rational import compile_rational, eval_pipeline, eval_rational_direct
from .registers import (
    UpdateError,
    homogeneous_product,
    normalise,
    product_list_updates,
    random_abstraction,
    random_update,
    random_update_like,
    run_sst_naive,
    run_sst_structured,
    update_product,
)
from .samples import (
    SAMPLE_MONOIDS,
    SAMPLE_RATIONALS,
    SAMPLE_SSTS,
)
from .stdlib import CATALOG
from .syntax import _split_args, parse_term
from .terms import EvalError, TermTypeError, infer_type, eval_term
from .types import (
    EncodingError,
    ParseError,
    TypeMismatch,
    enumerate_values,
    parse_type,
    parse_value,
    random_value,
    render_type,
    render_value,
)

DEFAULT_COUNT = 1000

_FOREST_HOMS = {"u1": {"a": "1", "b": "0"}, "contains-ab": {"a": "a", "b": "b"}}


class Reporter:
    """Prints either human-readable text or one JSON record per result."""

    def __init__(self, fmt: str) -> None:
        self.json = fmt == "json-lines"

    def emit(self, kind: str, input_: object, output: object,
             status: str = "ok") -> None:
        if self.json:
            record = {"kind": kind, "input": input_, "output": output,
                      "status": status}
            print(json.dumps(record, ensure_ascii=False, default=str))
            return
        stream = sys.stdout if status in ("ok", "pass") else sys.stderr
        if isinstance(output, dict):
            for key, value in output.items():
                text = str(value)
                if "\n" in text:
                    print(f"{key}:", file=stream)
                    print(text, file=stream)
                else:
                    print(f"{key}: {text}", file=stream)
        else:
            print(output, file=stream)


# ------------------------------------------------------- argument resolution

def _is_file(text: str) -> bool:
    try:
        return Path(text).is_file()
    except OSError:
        return False


def _word_arg(text: str) -> tuple[str, ...]:
    if not text:
        return ()
    return tuple(text.split(",")) if "," in text else tuple(text)


def _show_word(letters) -> str:
    letters = tuple(letters)
    if any(len(a) != 1 for a in letters):
        return ",".join(letters)
    return "".join(letters)


def _term_arg(text: str):
    if _is_file(text):
        return fileio.load_term(text)
    return parse_term(text)


def _monoid_arg(text: str):
    """Returns (monoid, letter map or None)."""
    if text in SAMPLE_MONOIDS:
        return SAMPLE_MONOIDS[text], _FOREST_HOMS.get(text)
    if _is_file(text):
        return fileio.load_monoid(text)
    raise ParseError(
        f"{text!r} is neither a monoid file nor one of "
        f"{', '.join(SAMPLE_MONOIDS)}")


def _rational_arg(text: str):
    if text in SAMPLE_RATIONALS:
        return SAMPLE_RATIONALS[text]
    if _is_file(text):
        return fileio.load_rational(text)
    raise ParseError(
        f"{text!r} is neither a rational-function file nor one of "
        f"{', '.join(SAMPLE_RATIONALS)}")


def _sst_arg(text: str):
    if text in SAMPLE_SSTS:
        return SAMPLE_SSTS[text]
    if _is_file(text):
        return fileio.load_sst(text)
    raise ParseError(
        f"{text!r} is neither an SST file nor one of {', '.join(SAMPLE_SSTS)}")


def _fot_arg(text: str, type_texts: list[str] | None):
    """Builtin name (types after ``@`` or via --type) or a transduction file."""
    if _is_file(text):
        return fileio.load_fot(text)
    name, sep, annotation = text.partition("@")
    texts = list(type_texts or [])
    if sep:
        texts = _split_args(annotation) + texts
    arities = builtin_names()
    if name in arities:
        return builtin_fot(name, *[parse_type(t) for t in texts])
    raise ParseError(
        f"{text!r} is neither a transduction file nor one of "
        f"{', '.join(arities)}")


def _hom_map(text: str) -> dict[str, str]:
    mapping = {}
    for part in text.split(","):
        letter, sep, image = part.partition("=")
        if not sep or not letter or not image:
            raise ParseError(f"--hom expects letter=element pairs, got {part!r}")
        mapping[letter] = image
    return mapping


def _resolve_seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("LISTFN_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise ParseError(f"LISTFN_SEED must be an integer, got {env!r}")
    return 0


def _ramp(i: int, count: int, lo: int, hi: int) -> int:
    """Linear size ramp from lo to hi across case indices."""
    if count <= 1:
        return hi
    return lo + (hi - lo) * i // (count - 1)


# ----------------------------------------------------------------- commands

def cmd_typecheck(args, rep: Reporter) -> int:
    term = _term_arg(args.term)
    dom, cod = infer_type(term)
    rep.emit("typecheck", args.term,
             f"{render_type(dom)} -> {render_type(cod)}")
    return 0


def cmd_eval(args, rep: Reporter) -> int:
    term = _term_arg(args.term)
    dom, _ = infer_type(term)
    value = parse_value(args.value, dom)
    result = eval_term(term, value)
    rep.emit("eval", {"term": args.term, "value": args.value},
             render_value(result))
    return 0


def _render_tree(t: FactTree, indent: str = "") -> list[str]:
    if isinstance(t, Leaf):
        return [f"{indent}leaf {t.letter}"]
    lines = [f"{indent}node {t.label}"]
    for c in t.children:
        lines.extend(_render_tree(c, indent + "  "))
    return lines


def cmd_forest(args, rep: Reporter) -> int:
    monoid, letters = _monoid_arg(args.monoid)
    if args.hom:
        letters = _hom_map(args.hom)
    if letters is None:
        raise ParseError("no letter images: pass --hom a=x,b=y or use a "
                         "monoid file with letter lines")
    word = _word_arg(args.word)
    if not word:
        raise ValueError("factorisation needs a nonempty word")
    for a in word:
        if letters.get(a) not in monoid.elements:
            raise ParseError(f"letter {a!r} has no image in the monoid")
    hom = Homomorphism(monoid, letters)
    tree = build_factorisation(hom, list(word))
    result = validate_factorisation(hom, tree)
    bound = forest_depth_bound(monoid, len(set(letters.values())))
    output = {
        "value": hom.image(word),
        "depth": tree_depth(tree),
        "bound": bound,
        "valid": "yes" if result.ok else f"no: {result.message}",
        "yield": "preserved" if tree_yield(tree) == list(word) else "changed",
    }
    if args.audit:
        recheck = validate_factorisation(hom, tree)
        via_forest = eval_hom_via_forest(hom, list(word))
        agree = recheck.ok and via_forest == output["value"]
        output["audit"] = ("revalidated, consistent" if agree
                           else "INCONSISTENT on revalidation")
    output["tree"] = "\n".join(_render_tree(tree))
    bad = (not result.ok or output["yield"] != "preserved"
           or output.get("audit", "").startswith("INCONSISTENT"))
    rep.emit("forest", {"monoid": args.monoid, "word": args.word}, output,
             status="ok" if not bad else "mismatch")
    return 4 if bad else 0


def cmd_compile_rational(args, rep: Reporter) -> int:
    r = _rational_arg(args.rational)
    pipeline = compile_rational(r)
    out_path = args.output or f"{r.name}.lpipe"
    fileio.save_pipeline(out_path, pipeline)
    rep.emit("compile-rational", args.rational,
             {"rational": r.name, "bound": pipeline.bound,
              "stages": len(pipeline.stages), "pipeline": str(out_path)})
    return 0


def cmd_run_pipeline(args, rep: Reporter) -> int:
    pipeline = fileio.load_pipeline(args.pipeline)
    word = _word_arg(args.word)
    for a in word:
        if a not in pipeline.rational.input_letters:
            raise TypeMismatch(f"letter {a!r} is not in the input alphabet")
    got = eval_pipeline(pipeline, word)
    want = eval_rational_direct(pipeline.rational, word)
    if got != want:
        cut = next((i for i, (x, y) in enumerate(zip(got, want)) if x != y),
                   min(len(got), len(want)))
        rep.emit("run-pipeline", {"pipeline": args.pipeline, "word": args.word},
                 {"pipeline-output": _show_word(got),
                  "direct-output": _show_word(want),
                  "first-difference": f"position {cut}"},
                 status="mismatch")
        return 4
    rep.emit("run-pipeline", {"pipeline": args.pipeline, "word": args.word},
             _show_word(got))
    return 0


def cmd_sst(args, rep: Reporter) -> int:
    sst = _sst_arg(args.sst)
    word = _word_arg(args.word)
    run = run_sst_structured if args.mode == "structured" else run_sst_naive
    out = run(sst, list(word))
    rep.emit("sst", {"sst": sst.name, "word": args.word, "mode": args.mode},
             _show_word(out))
    return 0


def cmd_encode(args, rep: Reporter) -> int:
    t = parse_type(args.type)
    v = parse_value(args.value, t)
    s = encode_value(v, t)
    if args.output:
        fileio.save_structure(args.output, s)
        rep.emit("encode", {"value": args.value, "type": args.type},
                 {"structure": str(args.output), "universe": len(s.universe)})
    else:
        rep.emit("encode", {"value": args.value, "type": args.type},
                 fileio.format_structure(s).rstrip("\n"))
    return 0


def cmd_decode(args, rep: Reporter) -> int:
    s = fileio.load_structure(args.structure)
    t = parse_type(args.type)
    v = decode_structure(s, t)
    rep.emit("decode", {"structure": args.structure, "type": args.type},
             render_value(v))
    return 0


def cmd_fot(args, rep: Reporter) -> int:
    transduction = _fot_arg(args.transduction, args.types)
    if args.word is not None:
        s = word_structure(args.word)
        out_s = apply_transduction(transduction, s)
        rep.emit("fot", {"transduction": args.transduction, "word": args.word},
                 decode_word_structure(out_s))
        return 0
    if args.structure is None:
        raise ParseError("fot needs a structure file or --word")
    s = fileio.load_structure(args.structure)
    out_s = apply_transduction(transduction, s)
    if args.decode:
        v = decode_structure(out_s, parse_type(args.decode))
        rep.emit("fot", {"transduction": args.transduction,
                         "structure": args.structure}, render_value(v))
    elif args.output:
        fileio.save_structure(args.output, out_s)
        rep.emit("fot", {"transduction": args.transduction,
                         "structure": args.structure},
                 {"structure": str(args.output),
                  "universe": len(out_s.universe)})
    else:
        rep.emit("fot", {"transduction": args.transduction,
                         "structure": args.structure},
                 fileio.format_structure(out_s).rstrip("\n"))
    return 0


# ------------------------------------------------------------------- checks

def _check_rational(seed: int, count: int) -> dict:
    rng = random.Random(seed)
    cases = 0
    failures = []
    for name, r in SAMPLE_RATIONALS.items():
        pipeline = compile_rational(r)
        for i in range(count):
            n = _ramp(i, count, 0, 200)
            word = [rng.choice(r.input_letters) for _ in range(n)]
            cases += 1
            if eval_pipeline(pipeline, word) != eval_rational_direct(r, word):
                failures.append(f"{name} on {_show_word(word)}")
    return {"functions": ", ".join(SAMPLE_RATIONALS), "cases": cases,
            "failures": failures}


def _check_registers_fold(seed: int, count: int) -> dict:
    rng = random.Random(seed)
    failures = []
    for i in range(count):
        k = rng.randint(1, 4)
        n = _ramp(i, count, 1, 200)
        if i % 2 == 0:
            tau = random_abstraction(k, rng)
            etas = [random_update_like(tau, rng) for _ in range(n)]
            got = homogeneous_product(etas, tau)
        else:
            etas = [random_update(k, rng) for _ in range(n)]
            got = product_list_updates(etas, k)
        want = normalise(reduce(update_product, etas))
        if got != want:
            failures.append(f"case {i} (k={k}, n={n})")
    return {"cases": count, "failures": failures}


def _sorted_ab(word: str) -> str:
    return ("".join(c for c in word if c == "a")
            + "".join(c for c in word if c == "b"))


def _check_fot_commute(name: str, seed: int, count: int,
                       type_texts: list[str] | None) -> dict:
    rng = random.Random(seed)
    if name == "ab_example":
        transduction = builtin_fot(name)
        failures = []
        for i in range(count):
            n = _ramp(i, count, 0, 60)
            word = "".join(rng.choice("ab") for _ in range(n))
            got = decode_word_structure(
                apply_transduction(transduction, word_structure(word)))
            if got != _sorted_ab(word):
                failures.append(f"{word} -> {got}")
        return {"builtin": name, "cases": count, "failures": failures}
    defaults = {"block": ["{a,b}", "{c,d}"]}
    texts = type_texts or defaults.get(name, ["{a,b}"])
    types = [parse_type(t) for t in texts]
    term = builtin_term(name, *types)
    transduction = builtin_fot(name, *types)
    dom, _ = infer_type(term)
    samples = []
    for v in enumerate_values(dom, 4):
        samples.append(v)
        if len(samples) >= 100:
            break
    for i in range(count):
        samples.append(random_value(dom, _ramp(i, count, 1, 24), rng))
    report = check_commutes(term, transduction, samples)
    failures = [f"input {render_value(v)}" for v, _, _ in report.failures]
    return {"builtin": name, "types": ", ".join(texts),
            "cases": report.total, "failures": failures}


def _check_sst(seed: int, count: int) -> dict:
    rng = random.Random(seed)
    cases = 0
    failures = []
    for name, sst in SAMPLE_SSTS.items():
        for i in range(count):
            n = _ramp(i, count, 0, 200)
            word = [rng.choice(sst.input_letters) for _ in range(n)]
            cases += 1
            if run_sst_naive(sst, word) != run_sst_structured(sst, word):
                failures.append(f"{name} on {_show_word(word)}")
    return {"ssts": ", ".join(SAMPLE_SSTS), "cases": cases,
            "failures": failures}


def _check_forest(seed: int, count: int) -> dict:
    rng = random.Random(seed)
    cases = 0
    failures = []
    for name, monoid in SAMPLE_MONOIDS.items():
        letters = _FOREST_HOMS[name]
        hom = Homomorphism(monoid, letters)
        bound = forest_depth_bound(monoid, len(set(letters.values())))
        for i in range(count):
            n = _ramp(i, count, 1, 300)
            word = [rng.choice(list(letters)) for _ in range(n)]
            cases += 1
            tree = build_factorisation(hom, word)
            ok = (validate_factorisation(hom, tree).ok
                  and tree_yield(tree) == word
                  and tree_depth(tree) <= bound)
            if not ok:
                failures.append(f"{name} on {_show_word(word)}")
    return {"monoids": ", ".join(SAMPLE_MONOIDS), "cases": cases,
            "failures": failures}


def _check_stdlib(seed: int, count: int) -> dict:
    rng = random.Random(seed)
    cases = 0
    failures = []
    pairs = [(entry, instance) for entry in CATALOG.values()
             for instance in entry.instances]
    per_pair = max(1, count // len(pairs))
    for entry, instance in pairs:
        term = entry.build(*instance)
        oracle = entry.oracle(*instance)
        dom, _ = infer_type(term)
        for i in range(per_pair):
            v = random_value(dom, _ramp(i, per_pair, 1, 25), rng)
            cases += 1
            if eval_term(term, v) != oracle(v):
                failures.append(f"{entry.name} on {render_value(v)}")
    return {"entries": len(CATALOG), "cases": cases, "failures": failures}


_CHECKS = ["rational", "registers-fold", "fot-commute", "sst", "forest",
           "stdlib"]


def cmd_check(args, rep: Reporter) -> int:
    seed = _resolve_seed(args)
    count = args.count
    which = _CHECKS if args.which == "all" else [args.which]
    if args.which == "fot-commute" and args.target is None:
        raise ParseError(
            f"check fot-commute needs a builtin name: "
            f"{', '.join(builtin_names())}")
    worst = 0
    for check in which:
        if check == "rational":
            report = _check_rational(seed, count)
        elif check == "registers-fold":
            report = _check_registers_fold(seed, count)
        elif check == "fot-commute":
            targets = ([args.target] if args.target
                       else list(builtin_names()))
            report = {"cases": 0, "failures": []}
            for target in targets:
                sub = _check_fot_commute(target, seed, count, args.types)
                report["cases"] += sub["cases"]
                report["failures"].extend(
                    f"{target}: {f}" for f in sub["failures"])
            report["builtins"] = ", ".join(targets)
        elif check == "sst":
            report = _check_sst(seed, count)
        elif check == "forest":
            report = _check_forest(seed, count)
        else:
            report = _check_stdlib(seed, count)
        failures = report.pop("failures")
        status = "pass" if not failures else "fail"
        output = {"check": check, **report, "seed": seed,
                  "result": status if not failures else
                  f"fail ({len(failures)} case(s); first: {failures[0]})"}
        rep.emit("check", check, output, status=status)
        if failures:
            worst = 4
    return worst


# -------------------------------------------------------------------- main

def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["text", "json-lines"],
                        default="text", help="output format")
    common.add_argument("--seed", type=int, default=None,
                        help="seed for randomized parts (default: "
                             "LISTFN_SEED or 0)")

    parser = argparse.ArgumentParser(
        prog="listfn",
        description="First-order and regular list functions: evaluation, "
                    "factorisation forests, rational-function compilation, "
                    "streaming transducers, and logic transductions.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("typecheck", parents=[common],
                       help="infer a term's type")
    p.add_argument("term", help="term file or inline term text")
    p.set_defaults(func=cmd_typecheck)

    p = sub.add_parser("eval", parents=[common], help="evaluate a term")
    p.add_argument("term", help="term file or inline term text")
    p.add_argument("value", help="input value text")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("forest", parents=[common],
                       help="build and validate a factorisation tree")
    p.add_argument("monoid", help="monoid file or sample name "
                                  "(u1, contains-ab)")
    p.add_argument("word")
    p.add_argument("--hom", help="letter images, e.g. a=1,b=0")
    p.add_argument("--audit", action="store_true",
                   help="re-validate and cross-check the root value")
    p.set_defaults(func=cmd_forest)

    p = sub.add_parser("compile-rational", parents=[common],
                       help="compile a rational function to a pipeline file")
    p.add_argument("rational", help="rational file or sample name "
                                    f"({', '.join(SAMPLE_RATIONALS)})")
    p.add_argument("-o", "--output", help="pipeline file to write "
                                          "(default NAME.lpipe)")
    p.set_defaults(func=cmd_compile_rational)

    p = sub.add_parser("run-pipeline", parents=[common],
                       help="run a compiled pipeline on a word")
    p.add_argument("pipeline", help="pipeline file")
    p.add_argument("word")
    p.set_defaults(func=cmd_run_pipeline)

    p = sub.add_parser("check", parents=[common],
                       help="randomized equivalence checks")
    p.add_argument("which", choices=_CHECKS + ["all"])
    p.add_argument("target", nargs="?",
                   help="builtin name for fot-commute")
    p.add_argument("--count", type=int, default=DEFAULT_COUNT,
                   help="cases per check (sizes ramp linearly)")
    p.add_argument("--type", dest="types", action="append",
                   help="element type(s) for fot-commute")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("sst", parents=[common],
                       help="run a streaming transducer")
    p.add_argument("sst", help="SST file or sample name "
                               f"({', '.join(SAMPLE_SSTS)})")
    p.add_argument("word")
    p.add_argument("--mode", choices=["naive", "structured"],
                   default="naive")
    p.set_defaults(func=cmd_sst)

    p = sub.add_parser("encode", parents=[common],
                       help="encode a value as a relational structure")
    p.add_argument("value")
    p.add_argument("type")
    p.add_argument("-o", "--output", help="structure file to write "
                                          "(default: print)")
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("decode", parents=[common],
                       help="decode a structure file back to a value")
    p.add_argument("structure", help="structure file")
    p.add_argument("type")
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("fot", parents=[common],
                       help="apply a first-order transduction")
    p.add_argument("transduction", help="transduction file or builtin name "
                                        f"({', '.join(builtin_names())})")
    p.add_argument("structure", nargs="?", help="structure file")
    p.add_argument("--type", dest="types", action="append",
                   help="element type(s) for a builtin")
    p.add_argument("--word", help="run on a word structure instead of a file")
    p.add_argument("--decode", help="decode the output at this type")
    p.add_argument("-o", "--output", help="structure file to write")
    p.set_defaults(func=cmd_fot)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    rep = Reporter(args.format)
    try:
        return args.func(args, rep) or 0
    except ParseError as e:
        rep.emit(args.command, None, str(e), status="syntax-error")
        return 2
    except (TermTypeError, TypeMismatch, EvalError, UpdateError, LogicError,
            EncodingError, NotAperiodicError) as e:
        rep.emit(args.command, None, str(e), status="error")
        return 3
    except ValueError as e:
        rep.emit(args.command, None, str(e), status="error")
        return 3


if __name__ == "__main__":
    raise SystemExit(main())
