import csv
import io
import json
import re

import pytest

from ultraortho.cli import main, parse_range
from ultraortho.extremal import definitional_oracle
from ultraortho.linalg_k import parse_vector
from ultraortho.valued import laurent


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    monkeypatch.delenv("ULTRAORTHO_CONFIG", raising=False)
    monkeypatch.delenv("ULTRAORTHO_CACHE", raising=False)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def jsonl(text):
    return [json.loads(line) for line in text.splitlines() if line.strip()]


def test_field_info_and_arithmetic(capsys):
    code, out, _ = run(capsys, "field", "info", "--base", "4", "--format", "jsonl")
    assert code == 0
    row = jsonl(out)[0]
    assert row["residue_order"] == 4 and row["characteristic"] == 2
    code, out, _ = run(capsys, "field", "mul", "1+x^-1", "1+x^-1", "--format", "jsonl")
    assert code == 0 and jsonl(out)[0]["value"] == "x^0*(1 + 1*x^-2)"
    code, out, _ = run(capsys, "field", "div", "1", "3", "--backend", "padic", "--base", "5",
                       "--precision", "4", "--format", "jsonl")
    row = jsonl(out)[0]
    assert code == 0 and row["valuation"] == 0 and "O(p^4)" in row["value"]


def test_field_precision_error_exits_one(capsys):
    code, _, err = run(capsys, "field", "sub", "1 + x^-1 + O(x^-2)", "1 + x^-1", "--format", "jsonl")
    assert code == 1 and "precision" in err


def test_ortho_modes(capsys):
    code, out, _ = run(capsys, "ortho", "wedge", "(1,1)", "(1,1+x^-1)", "--format", "jsonl")
    row = jsonl(out)[0]
    assert code == 0 and row["wedge_norm"] == "2^-1" and row["orthogonal"] is False
    code, out, _ = run(capsys, "ortho", "pair", "(1,0)", "(0,1)", "--format", "jsonl")
    assert jsonl(out)[0]["verdict"] == "orthogonal"
    code, out, _ = run(capsys, "ortho", "set", "(1,0,0)", "(0,1,0)", "(1,1,0)", "--base", "3", "--format", "jsonl")
    row = jsonl(out)[0]
    assert row["residue_rank"] == 2 and row["minor_criterion"] is False
    code, out, _ = run(capsys, "ortho", "falsify", "(1,1)", "(1,1+x^-1)", "--format", "jsonl")
    assert jsonl(out)[0]["found"] is True


def test_extremal_values(capsys):
    cases = [
        (["delta", "2", "2", "3", "2"], 6),
        (["omega", "2", "3", "1", "4", "3"], 8),
        (["ind", "2", "3", "4", "3"], 7),
        (["indpro", "2", "3", "3", "3"], 4),
        (["theta", "2", "2", "3", "2"], 6),
        (["gamma", "2", "3", "3", "3"], 4),
    ]
    for argv, value in cases:
        code, out, _ = run(capsys, "extremal", *argv, "--format", "jsonl", "--profile", "tiny")
        assert code == 0, argv
        assert jsonl(out)[0]["value"] == value, argv


def test_witness_roundtrip(capsys):
    code, out, _ = run(capsys, "extremal", "delta", "2", "2", "3", "2", "--witness", "--format", "jsonl")
    row = jsonl(out)[0]
    K = laurent(2, 4)
    S = [parse_vector(K, t) for t in row["witness"]["vectors"]]
    assert len(S) == row["value"]
    assert definitional_oracle("delta", 3, 2, S)


def test_witness_markdown_block(capsys):
    code, out, _ = run(capsys, "extremal", "ind", "2", "3", "4", "3", "--witness")
    assert code == 0
    block = re.search(r"```json\n(.*)\n```", out, re.S).group(1)
    assert len(json.loads(block)) == 7


def test_table_formats(capsys):
    code, out, _ = run(capsys, "table", "delta", "--k", "2..6", "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and [r["value"] for r in rows] == ["3", "6", "9", "12", "15"]
    assert {"lower", "upper"} <= set(rows[0])
    code, out, _ = run(capsys, "table", "theta", "--k", "2..3")
    assert code == 0 and out.startswith("| quantity") and "ratio" in out
    code, out, _ = run(capsys, "table", "ind", "--n", "3", "--l", "3", "--k", "3..4", "--format", "jsonl")
    assert [r["value"] for r in jsonl(out)] == [4, 7]


def test_parse_range():
    assert parse_range("2..4") == [2, 3, 4]
    assert parse_range("2,5") == [2, 5]
    with pytest.raises(ValueError):
        parse_range("")


def test_bad_subcommand_exits_64(capsys):
    with pytest.raises(SystemExit) as info:
        main(["bogus"])
    assert info.value.code == 64


@pytest.mark.parametrize("argv", [
    ["extremal", "delta", "2", "2", "3"],
    ["extremal", "nope", "2", "2", "3", "2"],
    ["extremal", "delta", "2", "2", "2", "3"],
    ["extremal", "ind", "6", "2", "3", "2"],
    ["field", "eval", "1 $"],
    ["field", "info", "--base", "6"],
    ["ortho", "set", "(x^-1, 0)"],
    ["ortho", "pair", "(1,1)", "(1,1,1)"],
    ["verify", "--profile", "nope"],
    ["verify", "--check", "no-such-check"],
    ["table", "delta", "--k", "a..b"],
])
def test_usage_errors_exit_64(capsys, argv):
    assert main(argv) == 64


def test_budget_exit_two(capsys):
    code, _, err = run(capsys, "extremal", "ind", "3", "3", "6", "3", "--profile", "tiny")
    assert code == 2 and "budget" in err


def test_verify_commands(capsys):
    code, out, _ = run(capsys, "verify", "--list", "--format", "jsonl")
    assert code == 0 and any(r["check"] == "delta-pairs-formula" for r in jsonl(out))
    code, out, _ = run(capsys, "verify", "--profile", "tiny", "--check", "delta-pairs-formula")
    assert code == 0 and "delta-pairs-formula" in out
    code, out, _ = run(capsys, "verify", "--check", "theta-ind-equality-threshold",
                       "--params", '{"q": 3, "n": 2, "k": 3, "l": 2}', "--format", "jsonl")
    rec = jsonl(out)[0]
    assert code == 1 and rec["status"] == "fail"


def test_config_precedence(tmp_path, capsys, monkeypatch):
    cfg = tmp_path / "u.cfg"
    cfg.write_text("# defaults for this run\nbase = 3\nformat=jsonl\n")
    code, out, _ = run(capsys, "field", "info", "--config", str(cfg))
    assert jsonl(out)[0]["residue_order"] == 3
    monkeypatch.setenv("ULTRAORTHO_CONFIG", str(cfg))
    code, out, _ = run(capsys, "field", "info", "--base", "5")
    assert jsonl(out)[0]["residue_order"] == 5
    bad = tmp_path / "bad.cfg"
    bad.write_text("colour = blue\n")
    code, _, _ = run(capsys, "field", "info", "--config", str(bad))
    assert code == 64


def test_cache_flag_and_env(tmp_path, capsys, monkeypatch):
    path = tmp_path / "cache.csv"
    monkeypatch.setenv("ULTRAORTHO_CACHE", str(path))
    code, out, _ = run(capsys, "extremal", "ind", "2", "3", "4", "3", "--format", "jsonl")
    assert code == 0 and jsonl(out)[0]["validation"] == "definitional"
    assert path.exists()
    code, out, _ = run(capsys, "extremal", "ind", "2", "3", "4", "3", "--format", "jsonl")
    assert jsonl(out)[0]["validation"] == "cache-reverified"
