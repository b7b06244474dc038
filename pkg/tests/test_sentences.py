"""Sentence layer: s-expression parsing, normalization, finite-field semantics."""

from types import SimpleNamespace

import pytest

from gffdecide.errors import NotUnivExist, SentenceSyntaxError
from gffdecide.ffield import ff_make
from gffdecide.sentences import (
    build_chi,
    build_eta,
    build_psi,
    build_ur,
    eval_finite_field,
    normalize,
    parse_sentence,
    print_sentence,
)

from conftest import load_sentence, sentence_path

CORPUS_SENTENCES = [
    "exists-zero",
    "sqrt-t",
    "quadform-1-1-t",
    "quadform-1-neg-t",
    "quadform-1-2-t-2t",
    "cubic-diagonal",
    "psi-25",
    "chi-5",
    "ur-p5",
    "eta-16",
]


@pytest.mark.parametrize("name", CORPUS_SENTENCES)
def test_corpus_round_trip(name):
    text = sentence_path(name).read_text()
    s = parse_sentence(text)
    printed = print_sentence(s)
    assert parse_sentence(printed).key() == s.key()


def test_parse_rejects_malformed():
    for bad in ("", "(exists (y)", "(exists (y) (= y))", "(foo (y) (= y 0))",
                "(exists (y) (= y 0) extra)"):
        with pytest.raises(SentenceSyntaxError):
            parse_sentence(bad)


def test_normalize_exists_shape():
    systems, skeleton = normalize(parse_sentence("(exists (y) (= (- (^ y 2) t) 0))"))
    assert len(systems) == 1
    assert systems[0].vars == ("y",)
    assert len(systems[0].disjuncts) == 1


def test_normalize_or_becomes_disjuncts():
    s = parse_sentence("(exists (y) (or (= y 0) (= (- y 1) 0)))")
    systems, _ = normalize(s)
    assert len(systems[0].disjuncts) == 2


def test_normalize_rejects_nested_quantifiers():
    s = parse_sentence("(forall (y) (exists (z) (= (- z y) 0)))")
    with pytest.raises(NotUnivExist):
        normalize(s)


def test_psi_semantics_in_finite_fields():
    # psi_q says the model contains F_q
    F4 = ff_make(2, 2)
    F8 = ff_make(2, 3)
    assert eval_finite_field(build_psi(4), F4) is True
    assert eval_finite_field(build_psi(2), F8) is True
    assert eval_finite_field(build_psi(4), F8) is False


def test_chi_semantics_in_finite_fields():
    # chi_q' says the model is exactly F_q'
    F9 = ff_make(3, 2)
    F3 = ff_make(3, 1)
    assert eval_finite_field(build_chi(9), F9) is True
    assert eval_finite_field(build_chi(9), F3) is False
    assert eval_finite_field(build_chi(3), F9) is False


def test_eta_excludes_exceptional_sizes():
    eta = build_eta(SimpleNamespace(E=[4]))
    assert eval_finite_field(eta, ff_make(2, 2)) is False
    assert eval_finite_field(eta, ff_make(2, 3)) is True
    # empty exceptional set: eta is vacuous
    empty = build_eta(SimpleNamespace(E=[]))
    assert eval_finite_field(empty, ff_make(2, 1)) is True


def test_ur_sentence_shape():
    ur = build_ur(5)
    text = print_sentence(ur)
    assert "forall" in text
    systems, skeleton = normalize(ur)
    assert all(len(sys.vars) == 2 for sys in systems)


def test_corpus_files_match_builders():
    assert load_sentence("psi-25").key() == build_psi(25).key()
    assert load_sentence("chi-5").key() == build_chi(5).key()
    assert load_sentence("ur-p5").key() == build_ur(5).key()
    assert load_sentence("eta-16").key() == build_eta(SimpleNamespace(E=[16])).key()
