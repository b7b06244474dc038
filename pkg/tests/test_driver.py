"""Global decision driver: criteria, scans, verdict statuses, reports."""

import json

import pytest

from gffdecide.driver import (
    DriverConfig,
    decide_all,
    decide_almost_all,
    eval_sentence_at,
    exceptional_places,
    report,
)
from gffdecide.ffield import ff_make
from gffdecide.funcfield import FunctionField, rational_places
from gffdecide.localeval import completion_handle
from gffdecide.sentences import build_chi, build_psi, build_ur, parse_sentence

from conftest import load_sentence

CFG = DriverConfig(scan_bound=1)


def test_exists_zero_everywhere(rational_f5):
    v = decide_all(rational_f5, load_sentence("exists-zero"), CFG)
    assert v.status == "HoldsCertified"
    assert v.exceptional == []


def test_ternary_quadform_holds(rational_f5):
    quad = load_sentence("quadform-1-1-t")
    va = decide_almost_all(rational_f5, quad, CFG)
    assert va.status == "HoldsCertified"
    assert va.criterion == "quadform-chevalley-warning"
    vall = decide_all(rational_f5, quad, CFG)
    assert vall.status == "HoldsCertified"
    # the exceptional places were actually checked
    assert vall.records
    bases = {repr(cp.base) for cp, _ in vall.records}
    assert "(T)" in bases and "oo" in bases


def test_binary_quadform_fails(rational_f5):
    v = decide_all(rational_f5, load_sentence("quadform-1-neg-t"), CFG)
    assert v.status == "FailsAt"
    assert v.failures


def test_sqrt_t_modes(rational_f5):
    sq = load_sentence("sqrt-t")
    assert decide_all(rational_f5, sq, CFG).status == "FailsAt"
    va = decide_almost_all(rational_f5, sq, CFG)
    # a finite scan cannot certify an infinite failing set
    assert va.status == "Unknown"
    assert va.failures


def test_ur_criterion(rational_f5, corpus_fields):
    ur = build_ur(5)
    v = decide_all(rational_f5, ur, CFG)
    assert v.status == "HoldsCertified"
    assert v.criterion == "ur-unramified"
    E = corpus_fields["elliptic-f5"]
    assert decide_all(E, ur, CFG).status == "FailsAt"
    assert decide_almost_all(E, ur, CFG).status == "HoldsCertified"


def test_constant_univariate_criterion(rational_f5):
    holds = parse_sentence("(exists (y) (= (- (^ y 2) 4) 0))")
    v = decide_all(rational_f5, holds, CFG)
    assert v.status == "HoldsCertified"
    assert v.criterion == "constant-univariate"
    fails = parse_sentence("(exists (y) (= (- (^ y 2) 3) 0))")
    v = decide_all(rational_f5, fails, CFG)
    assert v.status == "FailsAt"
    assert decide_almost_all(rational_f5, fails, CFG).status == "FailsAt"


def test_closed_sentences(rational_f5):
    assert decide_all(rational_f5, build_psi(5), CFG).status == "HoldsUpToBound"
    assert decide_all(rational_f5, build_psi(25), CFG).status == "FailsAt"
    assert decide_all(rational_f5, build_chi(5), CFG).status == "FailsAt"


def test_eval_sentence_at_matches_driver(rational_f5):
    sq = load_sentence("sqrt-t")
    from gffdecide.sentences import normalize

    normalized = normalize(sq)
    outcomes = {}
    for bp in rational_places(rational_f5.field, 1):
        cp = rational_f5.places_above(bp)[0]
        h = completion_handle(rational_f5, cp)
        o, _ = eval_sentence_at(rational_f5, h, sq, normalized)
        outcomes[repr(bp)] = o
    assert outcomes["(T)"] == "False"
    assert outcomes["(T + 1)"] == "True"
    assert outcomes["(T + 2)"] == "False"


def test_exceptional_places_cover_coefficient_support(rational_f5):
    quad = load_sentence("quadform-1-1-t")
    places = exceptional_places(rational_f5, quad)
    names = {repr(cp.base) for cp in places}
    # the divisor of the coefficient t, plus infinity
    assert "(T)" in names and "oo" in names


def test_report_is_deterministic_and_json(rational_f5):
    quad = load_sentence("quadform-1-1-t")
    r1 = report(decide_all(rational_f5, quad, CFG))
    # a fresh function field object must give the identical report
    F2 = FunctionField.from_text(ff_make(5, 1), "x - t")
    r2 = report(decide_all(F2, quad, CFG))
    assert json.dumps(r1, sort_keys=True) == json.dumps(r2, sort_keys=True)
    assert r1["status"] in ("HoldsCertified", "FailsAt", "HoldsUpToBound", "Unknown")


def test_scan_respects_place_budget(rational_f5):
    tight = DriverConfig(scan_bound=2, place_budget=3)
    v = decide_all(rational_f5, build_psi(5), tight)
    assert v.status in ("HoldsUpToBound", "Unknown")
    assert len(v.records) <= 3


def test_almost_all_tolerates_finite_failures(rational_f5):
    # y^2 = t fails at (T) but the aa-driver must not claim FailsAt from a scan
    va = decide_almost_all(rational_f5, load_sentence("sqrt-t"), CFG)
    assert va.status != "FailsAt"
