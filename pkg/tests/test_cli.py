"""Command-line interface: outputs, exit codes, and seeded checks."""
import json

import pytest

from listfn.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_typecheck_prints_the_arrow_type(capsys):
    code, out, _ = run(capsys, "typecheck", "reverse@{a,b}")
    assert code == 0
    assert out.strip() == "{a,b}^* -> {a,b}^*"


def test_typecheck_rejects_ill_typed_terms(capsys):
    code, _, err = run(capsys, "typecheck",
                       "(compose reverse@{a,b} proj1@{a,b},{c,d})")
    assert code == 3
    assert err


def test_syntax_errors_exit_2(capsys):
    code, _, err = run(capsys, "typecheck", "(compose reverse@{a,b}")
    assert code == 2
    assert err


def test_eval_basic_term(capsys):
    code, out, _ = run(capsys, "eval", "reverse@{a,b}", "[a,b]")
    assert code == 0
    assert out.strip() == "[b,a]"


def test_eval_catalog_name(capsys):
    code, out, _ = run(capsys, "eval", "std:len_upto@2,{a,b}", "[a,b,a]")
    assert (code, out.strip()) == (0, "2")


def test_eval_value_outside_domain_exits_3(capsys):
    code, _, err = run(capsys, "eval", "reverse@{a,b}", "[c]")
    assert code == 3
    assert err


def test_eval_term_from_file(capsys, tmp_path):
    p = tmp_path / "t.lterm"
    p.write_text("listfn-term 1\n(compose reverse@{a,b}\n  reverse@{a,b})\n")
    code, out, _ = run(capsys, "eval", str(p), "[a,b]")
    assert (code, out.strip()) == (0, "[a,b]")


def test_forest_reports_validity_and_audit(capsys):
    code, out, _ = run(capsys, "forest", "contains-ab", "abab", "--audit")
    assert code == 0
    assert "valid: yes" in out
    assert "yield: preserved" in out
    assert "audit: revalidated, consistent" in out
    depth = int(next(ln.split()[1] for ln in out.splitlines()
                     if ln.startswith("depth:")))
    bound = int(next(ln.split()[1] for ln in out.splitlines()
                     if ln.startswith("bound:")))
    assert depth <= bound


def test_forest_rejects_empty_word(capsys):
    code, _, err = run(capsys, "forest", "u1", "")
    assert code == 3
    assert err


def test_compile_and_run_pipeline(capsys, tmp_path):
    pipe = tmp_path / "keepa.lpipe"
    code, _, _ = run(capsys, "compile-rational", "keep-a", "-o", str(pipe))
    assert code == 0
    assert pipe.exists()
    code, out, _ = run(capsys, "run-pipeline", str(pipe), "abab")
    assert code == 0
    assert out.strip() == "abb"
    code, out, _ = run(capsys, "run-pipeline", str(pipe), "")
    assert code == 0
    assert out.strip() == ""


def test_tampered_pipeline_is_caught(capsys, tmp_path):
    pipe = tmp_path / "keepa.lpipe"
    run(capsys, "compile-rational", "keep-a", "-o", str(pipe))
    lines = pipe.read_text().splitlines()
    patched = ["table 1.a.0 b" if ln.startswith("table 1.a.0") else ln
               for ln in lines]
    assert patched != lines
    pipe.write_text("\n".join(patched) + "\n")
    code, _, err = run(capsys, "run-pipeline", str(pipe), "abab")
    assert code == 4
    assert "difference" in err or "mismatch" in err


def test_sst_modes_agree(capsys):
    code, out, _ = run(capsys, "sst", "reverse", "abb")
    assert (code, out.strip()) == (0, "bba")
    code, out, _ = run(capsys, "sst", "reverse", "abb", "--mode", "naive")
    assert (code, out.strip()) == (0, "bba")
    code, out, _ = run(capsys, "sst", "drop-last", "ab")
    assert (code, out.strip()) == (0, "a")


def test_encode_decode_round_trip(capsys, tmp_path):
    f = tmp_path / "v.lstruct"
    code, _, _ = run(capsys, "encode", "[a,b,a]", "{a,b}^*", "-o", str(f))
    assert code == 0
    code, out, _ = run(capsys, "decode", str(f), "{a,b}^*")
    assert (code, out.strip()) == (0, "[a,b,a]")


def test_fot_on_word_structures(capsys):
    code, out, _ = run(capsys, "fot", "ab_example", "--word", "ababa")
    assert (code, out.strip()) == (0, "aaabb")


def test_fot_builtin_on_structure_file(capsys, tmp_path):
    f = tmp_path / "v.lstruct"
    run(capsys, "encode", "[[a,b],[b]]", "({a,b}^*)^*", "-o", str(f))
    code, out, _ = run(capsys, "fot", "flat@{a,b}", str(f),
                       "--decode", "{a,b}^*")
    assert (code, out.strip()) == (0, "[a,b,b]")


def test_check_passes_and_reports_json(capsys):
    code, out, _ = run(capsys, "check", "sst", "--count", "20",
                       "--format", "json-lines")
    assert code == 0
    records = [json.loads(ln) for ln in out.splitlines() if ln.strip()]
    assert records
    for rec in records:
        assert set(rec) == {"kind", "input", "output", "status"}
        assert rec["status"] == "pass"


@pytest.mark.parametrize("which", ["rational", "forest", "registers-fold"])
def test_check_families_pass_at_small_counts(capsys, which):
    code, out, _ = run(capsys, "check", which, "--count", "25")
    assert code == 0
    assert "pass" in out


def test_check_seed_env_is_deterministic(capsys, monkeypatch):
    monkeypatch.setenv("LISTFN_SEED", "99")
    _, out1, _ = run(capsys, "check", "rational", "--count", "10",
                     "--format", "json-lines")
    _, out2, _ = run(capsys, "check", "rational", "--count", "10",
                     "--format", "json-lines")
    assert out1 == out2
    assert '"seed": 99' in out1
    monkeypatch.setenv("LISTFN_SEED", "100")
    _, out3, _ = run(capsys, "check", "rational", "--count", "10",
                     "--format", "json-lines")
    assert '"seed": 100' in out3


def test_missing_file_exits_2(capsys, tmp_path):
    code, _, err = run(capsys, "run-pipeline",
                       str(tmp_path / "nope.lpipe"), "ab")
    assert code == 2
    assert err
