"""Command-line interface: exit-code contract and report schema."""

import json

from gffdecide.cli import (
    EXIT_BOUNDED,
    EXIT_FAILS,
    EXIT_NOT_UNIV_EXIST,
    EXIT_OK,
    EXIT_PARSE,
    SCHEMA,
    main,
)

from conftest import sentence_path


def run(tmp_path, *argv):
    out = tmp_path / "report.json"
    code = main(list(argv) + ["--out", str(out)])
    doc = json.loads(out.read_text()) if out.exists() else None
    return code, doc


def test_places_report(tmp_path):
    code, doc = run(tmp_path, "places", "--q", "5", "--curve", "x^2 - t", "--deg", "1")
    assert code == EXIT_OK
    assert doc["schema"] == SCHEMA
    assert doc["status"] == "ok"
    assert doc["command"] == "places"
    for group in doc["evidence"]["groups"]:
        total = sum(p["e"] * p["f_res"] for p in group["places"])
        assert total == 2


def test_spectrum_report(tmp_path):
    code, doc = run(tmp_path, "spectrum", "--q", "5", "--curve", "x - t")
    assert code == EXIT_OK
    assert doc["evidence"]["a"]["1"] == 6
    assert doc["evidence"]["E"] == []
    assert "eta" in doc["evidence"]


def test_decide_holds(tmp_path):
    code, doc = run(
        tmp_path, "decide", "--q", "5", "--curve", "x - t",
        "--sentence", str(sentence_path("quadform-1-1-t")),
        "--mode", "all", "--scan-bound", "1",
    )
    assert code == EXIT_OK
    assert doc["status"] == "HoldsCertified"


def test_decide_fails(tmp_path):
    code, doc = run(
        tmp_path, "decide", "--q", "5", "--curve", "x - t",
        "--sentence", str(sentence_path("quadform-1-neg-t")),
        "--mode", "all", "--scan-bound", "1",
    )
    assert code == EXIT_FAILS
    assert doc["status"] == "FailsAt"


def test_decide_bounded(tmp_path):
    code, doc = run(
        tmp_path, "decide", "--q", "5", "--curve", "x - t",
        "--sentence", str(sentence_path("sqrt-t")),
        "--mode", "aa", "--scan-bound", "1",
    )
    assert code == EXIT_BOUNDED
    assert doc["status"] == "Unknown"


def test_decide_rejects_nested_quantifiers(tmp_path):
    nested = tmp_path / "nested.sexp"
    nested.write_text("(forall (y) (exists (z) (= (- z y) 0)))\n")
    code, doc = run(
        tmp_path, "decide", "--q", "5", "--curve", "x - t",
        "--sentence", str(nested),
    )
    assert code == EXIT_NOT_UNIV_EXIST
    assert doc["status"] == "not-universal-existential"


def test_parse_errors(tmp_path):
    code, doc = run(tmp_path, "places", "--q", "5", "--curve", "x -")
    assert code == EXIT_PARSE
    code, doc = run(tmp_path, "places", "--q", "6", "--curve", "x - t")
    assert code == EXIT_PARSE
    code, doc = run(tmp_path, "places", "--q", "5", "--curve", "x^2 - t^2")
    assert code == EXIT_PARSE


def test_missing_sentence_file(tmp_path):
    code, doc = run(
        tmp_path, "decide", "--q", "5", "--curve", "x - t",
        "--sentence", str(tmp_path / "nope.sexp"),
    )
    assert code == EXIT_PARSE


def test_ur_report(tmp_path):
    code, doc = run(tmp_path, "ur", "--q", "5", "--curve", "x^2 - t", "--samples", "2")
    assert code == EXIT_OK
    ev = doc["evidence"]
    assert len(ev["ramified"]) == 2  # (T) and infinity
    for rec in ev["ramified_ur"]:
        if rec["ur"] == "False":
            assert "s" in rec and "r" in rec
    assert ev["violation"] is None or ev["violation"]["self_validates"]


def test_reports_byte_identical(tmp_path):
    argv = [
        "decide", "--q", "5", "--curve", "x - t",
        "--sentence", str(sentence_path("sqrt-t")),
        "--mode", "all", "--scan-bound", "1",
    ]
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    main(argv + ["--out", str(a)])
    main(argv + ["--out", str(b)])
    assert a.read_bytes() == b.read_bytes()
