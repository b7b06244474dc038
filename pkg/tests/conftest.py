"""Shared fixtures: base fields and the shipped curve corpus."""

import json
import pathlib

import pytest

from gffdecide.ffield import ff_make
from gffdecide.funcfield import FunctionField

ROOT = pathlib.Path(__file__).resolve().parents[1]
CORPUS = ROOT / "corpus"


@pytest.fixture(scope="session")
def F2():
    return ff_make(2, 1)


@pytest.fixture(scope="session")
def F3():
    return ff_make(3, 1)


@pytest.fixture(scope="session")
def F5():
    return ff_make(5, 1)


def load_corpus_entries():
    return json.loads((CORPUS / "curves.json").read_text())


@pytest.fixture(scope="session")
def corpus_fields():
    """name -> FunctionField for every curve shipped in corpus/curves.json."""
    out = {}
    for entry in load_corpus_entries():
        field = ff_make(*_pe(entry["q"]))
        out[entry["name"]] = FunctionField.from_text(field, entry["curve"])
    return out


def _pe(q):
    from gffdecide.ffield import PrimePower

    pp = PrimePower.from_q(q)
    return pp.p, pp.e


@pytest.fixture(scope="session")
def rational_f5(corpus_fields):
    return corpus_fields["rational-f5"]


def sentence_path(name):
    return CORPUS / "sentences" / f"{name}.sexp"


def load_sentence(name):
    from gffdecide.sentences import parse_sentence

    return parse_sentence(sentence_path(name).read_text())
