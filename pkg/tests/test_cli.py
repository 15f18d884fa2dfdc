from importlib import resources
from pathlib import Path

import pytest

from qdisco import circuit as circ
from qdisco import diagram as dg
from qdisco import zx
from qdisco.cli import main

GOLDEN = Path(__file__).parent / "golden"
LEX = str(GOLDEN / "lexicon.tsv")
DATA = resources.files("qdisco") / "data"


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def golden(name):
    return (GOLDEN / name).read_text()


def test_parse_golden(capsys):
    code, out, _ = run(capsys, "parse", LEX, "Alice hates Bob")
    assert code == 0 and out == golden("parse_alice_hates_bob.txt")


def test_parse_failure_reports_residue(capsys):
    code, _, err = run(capsys, "parse", LEX, "hates Alice")
    assert code == 3 and err == golden("parse_hates_alice.err")


def test_empty_sentence_is_usage_error(capsys):
    assert run(capsys, "parse", LEX, "")[0] == 2


def test_unknown_flag_is_usage_error(capsys):
    assert run(capsys, "compile", LEX, "Alice hates Bob", "--mode", "diagonal")[0] == 2


@pytest.mark.parametrize("mode,name", [("parallel", "compile_tv_parallel.txt"), ("sequential", "compile_tv_sequential.txt")])
def test_compile_golden(capsys, mode, name):
    code, out, _ = run(capsys, "compile", LEX, "Alice hates Bob", "--ansatz", "bell", "--mode", mode)
    assert code == 0 and out == golden(name)


def test_compile_writes_round_trippable_file(tmp_path, capsys):
    path = tmp_path / "c.txt"
    code, _, err = run(capsys, "compile", LEX, "Alice gives Bob flowers", "--ansatz", "svd", "--out", str(path), "--stats")
    assert code == 0 and "qubits" in err
    text = path.read_text()
    assert circ.to_text(circ.from_text(text)) == text


def test_compile_unknown_word(capsys):
    code, _, err = run(capsys, "compile", LEX, "Alice eats Bob")
    assert code == 3 and "unknown word" in err


def test_compile_inconsistent_sentence_width(capsys):
    assert run(capsys, "compile", LEX, "Alice hates Bob", "--s-qubits", "3")[0] == 3


def test_export_formats(capsys):
    code, out, _ = run(capsys, "export", LEX, "black hat")
    assert code == 0 and out == golden("export_black_hat.txt")
    assert dg.to_text(dg.from_text(out)) == out
    code, out, _ = run(capsys, "export", LEX, "Alice hates Bob", "--format", "dot")
    assert code == 0 and out.startswith("digraph")
    code, out, _ = run(capsys, "export", LEX, "Alice hates Bob", "--format", "zx", "--fuse")
    assert code == 0 and zx.ZxGraph.from_text(out).to_text() == out


def test_train_is_byte_identical(tmp_path, capsys):
    lex, corpus = str(DATA / "toy_lexicon.tsv"), str(DATA / "toy_corpus.tsv")
    files = []
    for k in range(2):
        p, t = tmp_path / f"p{k}.json", tmp_path / f"t{k}.csv"
        code, _, _ = run(capsys, "train", lex, corpus, "--iterations", "15", "--params-out", str(p), "--trace-out", str(t))
        assert code == 0
        files.append((p.read_bytes(), t.read_bytes()))
    assert files[0] == files[1]
    assert files[0][1].startswith(b"iter,loss,accuracy\n")


def test_train_rejects_zero_iterations(capsys):
    lex, corpus = str(DATA / "toy_lexicon.tsv"), str(DATA / "toy_corpus.tsv")
    assert run(capsys, "train", lex, corpus, "--iterations", "0")[0] == 2


def test_ask_and_classify(tmp_path, capsys):
    lex, corpus = str(DATA / "toy_lexicon.tsv"), str(DATA / "toy_corpus.tsv")
    params = tmp_path / "p.json"
    run(capsys, "train", lex, corpus, "--iterations", "5", "--params-out", str(params))
    code, out, _ = run(capsys, "ask", lex, str(params), str(GOLDEN / "queries.txt"))
    assert code == 0
    rows = [line.split("\t") for line in out.splitlines() if not line.startswith("#")]
    assert [r[0] for r in rows] == ["1", "2"] and {r[1] for r in rows} == {"Alice", "Claire"}
    code, out, _ = run(capsys, "classify", lex, str(params), "Alice likes Bob", "--labels", "Claire,Dave", "--side", "object")
    assert code == 0 and len(out.splitlines()) == 2


def test_missing_params_file(capsys):
    code, _, err = run(capsys, "ask", LEX, "/nonexistent/p.json", str(GOLDEN / "queries.txt"))
    assert code == 2 and "params" in err


def test_simulation_cap_is_numeric_failure(capsys, tmp_path):
    params = tmp_path / "p.json"
    table = {f"{w}.{k}": 0.0 for w, n in (("Alice", 18), ("Bob", 18), ("hates", 27)) for k in range(n)}
    params.write_text(circ.ParamTable({tuple(key.split(".")): v for key, v in table.items()}).to_json())
    queries = tmp_path / "q.txt"
    queries.write_text("QUESTION who hates Bob\nCANDIDATES Alice\n")
    code, _, _ = run(capsys, "ask", LEX, str(params), str(queries), "--noun-qubits", "9")
    assert code == 4
