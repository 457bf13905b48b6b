import json
import os
import subprocess
import sys

import pytest

from eadistinct.metrics import expected_distinct_upper


def write(path, text):
    path.write_text(text, encoding="utf-8")
    return path


def test_score_json(tmp_path, run_cli):
    f = write(tmp_path / "r.txt", "a b a c\n")
    code, out = run_cli("score", f, "--vocab", 5, "--format", "json")
    assert code == 0
    d = json.loads(out)
    assert d["distinct"] == 0.75
    assert d["ead"] == pytest.approx(3 / expected_distinct_upper(5, 4), rel=1e-12)
    assert d["vocab_size"] == 5 and d["vocab_source"] == "fixed" and d["n_order"] == 1


def test_score_table_matches_json(tmp_path, run_cli):
    f = write(tmp_path / "r.txt", "a b a c\nc d\n")
    _, js = run_cli("score", f, "--vocab", 5, "--format", "json")
    _, table = run_cli("score", f, "--vocab", 5)
    d = json.loads(js)
    row = table.strip().splitlines()[-1].split()
    assert float(row[-2]) == pytest.approx(d["distinct"], rel=1e-11)
    assert float(row[-1]) == pytest.approx(d["ead"], rel=1e-11)
    assert "vocab_source=fixed" in table


def test_score_json_has_12_significant_digits(tmp_path, run_cli):
    f = write(tmp_path / "r.txt", "a b a c d e f g a\n")
    _, js = run_cli("score", f, "--format", "json")
    ead = json.loads(js)["ead"]
    digits = repr(ead).replace("0.", "", 1).lstrip("0").replace(".", "")
    assert len(digits) >= 12


def test_score_percent_flag(tmp_path, run_cli):
    f = write(tmp_path / "r.txt", "a b a c\n")
    _, js = run_cli("score", f, "--vocab", 5, "--format", "json", "--percent")
    assert json.loads(js)["distinct"] == 75.0


def test_score_missing_file(tmp_path, run_cli, capsys):
    code, _ = run_cli("score", tmp_path / "nope.txt")
    assert code == 2
    assert "nope.txt" in capsys.readouterr().err


def test_score_empty_set(tmp_path, run_cli, capsys):
    f = write(tmp_path / "e.txt", "\n\n")
    code, _ = run_cli("score", f)
    assert code == 1
    assert "e.txt" in capsys.readouterr().err


def test_score_jsonl_parse_error_reports_line(tmp_path, run_cli, capsys):
    f = write(tmp_path / "r.jsonl", '{"response": "a b"}\n{broken\n')
    code, _ = run_cli("score", f)
    assert code == 2
    assert "line 2" in capsys.readouterr().err
    code, out = run_cli("score", f, "--lenient", "--format", "json")
    assert code == 0 and json.loads(out)["n_total"] == 2


def test_vocab_source_precedence(tmp_path, run_cli, monkeypatch):
    f = write(tmp_path / "r.txt", "a b\n")
    corpus = write(tmp_path / "c.txt", "a b\nb c d\n")
    monkeypatch.setenv("EAD_DEFAULT_VOCAB", "777")
    d = json.loads(run_cli("score", f, "--format", "json")[1])
    assert (d["vocab_size"], d["vocab_origin"]) == (777, "env:EAD_DEFAULT_VOCAB")
    d = json.loads(run_cli("score", f, "--format", "json", "--vocab", 9)[1])
    assert d["vocab_size"] == 9
    d = json.loads(run_cli("score", f, "--format", "json", "--vocab-from", corpus)[1])
    assert (d["vocab_size"], d["vocab_source"]) == (4, "counted-from-corpus")
    code, _ = run_cli("score", f, "--vocab", 9, "--vocab-from", corpus)
    assert code == 2
    monkeypatch.delenv("EAD_DEFAULT_VOCAB")
    d = json.loads(run_cli("score", f, "--format", "json")[1])
    assert d["vocab_size"] == 30522


def test_score_bigram_vocab_from_corpus(tmp_path, run_cli):
    f = write(tmp_path / "r.txt", "a b a b\n")
    corpus = write(tmp_path / "c.txt", "a b c\nb a\n")
    d = json.loads(run_cli("score", f, "-n", 2, "--format", "json", "--vocab-from", corpus)[1])
    assert (d["n_order"], d["vocab_source"], d["vocab_size"]) == (2, "ngram-derived", 3)
    assert d["distinct"] == pytest.approx(2 / 3)


def test_vocab_command(tmp_path, run_cli):
    f = write(tmp_path / "c.txt", "a b\nb c\n")
    assert run_cli("vocab", f) == (0, "3\n")
    assert run_cli("vocab", write(tmp_path / "x.txt", "x x x\n"), "--top", 1) == (0, "1\nx\t3\n")
    assert run_cli("vocab", write(tmp_path / "e.txt", "")) == (0, "0\n")
    assert run_cli("vocab", write(tmp_path / "A.txt", "A a\n"), "--mode", "lowercase-whitespace") == (0, "1\n")


def test_correlate_all_methods(data_dir, run_cli):
    code, out = run_cli("correlate", os.path.join(data_dir, "human_eval_dailydialog.csv"),
                        "--x", "ead", "--y", "human")
    assert code == 0
    res = {r["method"]: r for r in json.loads(out)}
    assert set(res) == {"pearson", "spearman", "kendall"}
    for r in res.values():
        assert set(r) == {"method", "coefficient", "p_value", "n", "flags"}
        assert r["n"] == 10


def test_correlate_errors(tmp_path, run_cli, capsys):
    short = write(tmp_path / "s.csv", "a,b\n1,2\n2,3\n")
    assert run_cli("correlate", short, "--x", "a", "--y", "b")[0] == 1
    assert "at least 3" in capsys.readouterr().err
    code, _ = run_cli("correlate", short, "--x", "aa", "--y", "b")
    assert code == 2
    err = capsys.readouterr().err
    assert "aa" in err and "available: a, b" in err


def test_sweep_designated_deterministic(tmp_path, run_cli):
    args = ["sweep", "--source", "designated", "--v", 30522, "--lengths", "5,10,20",
            "--set-size", 200, "--trials", 3, "--seed", 7]
    assert run_cli(*args, "--out", tmp_path / "a")[0] == 0
    assert run_cli(*args, "--out", tmp_path / "b")[0] == 0
    for name in ("sweep_detail.csv", "sweep_summary.csv", "bias_summary.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    summary = (tmp_path / "a" / "sweep_summary.csv").read_text().strip().splitlines()
    assert len(summary) == 1 + 3


def test_sweep_corpus_shortfall(tmp_path, run_cli, capsys):
    corpus = write(tmp_path / "c.txt", "".join(f"w{i} v\n" for i in range(30)))
    code, _ = run_cli("sweep", "--source", "corpus", "--corpus", corpus, "--lengths", "2,3,5",
                      "--set-size", 20, "--trials", 1, "--out", tmp_path / "o")
    assert code == 1
    assert "lengths 3,5" in capsys.readouterr().err
    assert (tmp_path / "o" / "sweep_detail.csv").read_text().count("\n") == 2


def test_sweep_dump_sets(tmp_path, run_cli):
    code, _ = run_cli("sweep", "--v", 50, "--lengths", "2", "--set-size", 4, "--trials", 2,
                      "--out", tmp_path / "o", "--dump-sets", tmp_path / "d")
    assert code == 0
    dumped = sorted(os.listdir(tmp_path / "d"))
    assert dumped == ["set_L2_t0.jsonl", "set_L2_t1.jsonl"]
    rows = [json.loads(l) for l in (tmp_path / "d" / dumped[0]).read_text().splitlines()]
    assert len(rows) == 4 and all(len(r["response"].split()) == 2 for r in rows)
    assert not (tmp_path / "o" / "bias_summary.json").exists()


def test_sweep_bad_lengths(tmp_path, run_cli):
    assert run_cli("sweep", "--lengths", "10,5", "--out", tmp_path)[0] == 2


@pytest.mark.parametrize("sub", ["score", "sweep"])
def test_help_documents_default_vocab(sub):
    out = subprocess.run([sys.executable, "-m", "eadistinct.cli", sub, "--help"],
                         capture_output=True, text=True, check=True).stdout
    assert "30522" in out and "BERT" in out
