"""On-disk formats: round trips, tamper detection, and the workspace index."""
import pytest

from helpers import AB, CD, DEEP_MIX_TYPE, sym_list
from listfn.fileio import (
    FileFormatError,
    Workspace,
    format_structure,
    load_artifact,
    load_monoid,
    load_pipeline,
    load_rational,
    load_sst,
    load_structure,
    load_term,
    load_type,
    save_fot,
    save_group,
    save_monoid,
    save_pipeline,
    save_rational,
    save_sst,
    save_structure,
    save_term,
    save_type,
    load_fot,
    load_group,
)
from listfn.logic import encode_value, fot_ab_example
from listfn.rational import compile_rational, eval_pipeline, eval_rational_direct
from listfn.samples import (
    CONTAINS_AB,
    SAMPLE_GROUPS,
    SAMPLE_RATIONALS,
    SAMPLE_SSTS,
)
from listfn.stdlib import comma
from listfn.terms import eval_term, infer_type
from listfn.types import FinSet, List, enumerate_values


def test_type_file_round_trip(tmp_path):
    p = tmp_path / "deep.ltype"
    save_type(p, DEEP_MIX_TYPE)
    assert load_type(p) == DEEP_MIX_TYPE


def test_term_file_round_trip(tmp_path):
    term = comma(AB, FinSet(("#",)))
    p = tmp_path / "comma.lterm"
    save_term(p, term)
    back = load_term(p)
    assert back == term
    dom, _ = infer_type(term)
    for v in enumerate_values(dom, 5):
        assert eval_term(back, v) == eval_term(term, v)


def test_monoid_file_round_trip(tmp_path):
    p = tmp_path / "cab.lmon"
    save_monoid(p, CONTAINS_AB, letters=None)
    back, letters = load_monoid(p)
    assert letters is None
    assert set(back.elements) == set(CONTAINS_AB.elements)
    assert back.identity == CONTAINS_AB.identity
    for x in back.elements:
        for y in back.elements:
            assert back.mult(x, y) == CONTAINS_AB.mult(x, y)


def test_group_file_round_trip(tmp_path):
    p = tmp_path / "z3.lgroup"
    save_group(p, SAMPLE_GROUPS["z3"])
    assert load_group(p) == SAMPLE_GROUPS["z3"]


def test_rational_file_round_trip(tmp_path):
    r = SAMPLE_RATIONALS["mark-after-ab"]
    p = tmp_path / "mark.lrat"
    save_rational(p, r)
    back = load_rational(p)
    for w in ["", "a", "ab", "abab", "bbaab"]:
        assert eval_rational_direct(back, w) == eval_rational_direct(r, w)


def test_pipeline_file_round_trip(tmp_path):
    r = SAMPLE_RATIONALS["keep-a"]
    p = tmp_path / "keepa.lpipe"
    save_pipeline(p, compile_rational(r))
    pipe = load_pipeline(p)
    for w in ["", "a", "abab", "babba"]:
        assert eval_pipeline(pipe, w) == eval_rational_direct(r, w)


def test_pipeline_tamper_changes_the_compiled_function(tmp_path):
    r = SAMPLE_RATIONALS["keep-a"]
    p = tmp_path / "keepa.lpipe"
    save_pipeline(p, compile_rational(r))
    lines = p.read_text().splitlines()
    patched = ["table 1.a.0 b" if ln.startswith("table 1.a.0") else ln
               for ln in lines]
    assert patched != lines
    p.write_text("\n".join(patched) + "\n")
    pipe = load_pipeline(p)
    assert eval_pipeline(pipe, "abab") != eval_rational_direct(r, "abab")


def test_pipeline_missing_table_row_is_rejected(tmp_path):
    r = SAMPLE_RATIONALS["keep-a"]
    p = tmp_path / "keepa.lpipe"
    save_pipeline(p, compile_rational(r))
    lines = [ln for ln in p.read_text().splitlines()
             if not ln.startswith("table 1.a.0")]
    p.write_text("\n".join(lines) + "\n")
    with pytest.raises(FileFormatError):
        load_pipeline(p)


def test_sst_file_round_trip(tmp_path):
    sst = SAMPLE_SSTS["reverse"]
    p = tmp_path / "rev.lsst"
    save_sst(p, sst)
    assert load_sst(p) == sst


def test_structure_file_round_trip(tmp_path):
    t = List(AB)
    s = encode_value(sym_list("abba"), t)
    p = tmp_path / "w.lstruct"
    save_structure(p, s)
    assert load_structure(p) == s
    # format_structure is the same text that save writes
    assert format_structure(s) in p.read_text()


def test_fot_file_round_trip(tmp_path):
    t = fot_ab_example()
    p = tmp_path / "sort.lfot"
    save_fot(p, t)
    back = load_fot(p)
    assert back == t


def test_header_and_kind_mismatch_are_rejected(tmp_path):
    p = tmp_path / "x.ltype"
    p.write_text("listfn-type 99\n{a}\n")
    with pytest.raises(FileFormatError):
        load_type(p)
    q = tmp_path / "y.ltype"
    save_type(q, AB)
    with pytest.raises(FileFormatError):
        load_term(q)
    with pytest.raises(FileFormatError):
        load_type(tmp_path / "missing.ltype")


def test_load_artifact_dispatches_on_header(tmp_path):
    save_type(tmp_path / "t.ltype", AB)
    save_group(tmp_path / "g.lgroup", SAMPLE_GROUPS["z2"])
    kind, obj = load_artifact(tmp_path / "t.ltype")
    assert (kind, obj) == ("type", AB)
    kind, obj = load_artifact(tmp_path / "g.lgroup")
    assert kind == "group"


def test_workspace_indexes_by_stem(tmp_path):
    save_type(tmp_path / "ab.ltype", AB)
    save_sst(tmp_path / "rev.lsst", SAMPLE_SSTS["reverse"])
    ws = Workspace.load([tmp_path / "ab.ltype", tmp_path / "rev.lsst"])
    assert ws.get("type", "ab") == AB
    assert ws.get("sst", "rev") == SAMPLE_SSTS["reverse"]
    assert ws.names("type") == ["ab"]
    with pytest.raises(FileFormatError):
        ws.get("term", "ab")  # wrong kind
    with pytest.raises(FileFormatError):
        ws.get("type", "zz")  # unknown name
    save_type(tmp_path / "rev.ltype", CD)
    with pytest.raises(FileFormatError):
        ws.add_file(tmp_path / "rev.ltype")  # duplicate stem
