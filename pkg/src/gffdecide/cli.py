"""Command-line front end.

Subcommands: places, spectrum, decide, ur.  Every run emits one JSON report
with a stable schema; exit codes are a contract (0 success / holds,
2 parse error, 3 budget exhausted, 4 not universal/existential,
10 decision fails, 20 bounded or unknown decision).
"""

from __future__ import annotations

import argparse
import json
import sys

from .driver import (
    DEFAULT_SCAN_BOUND,
    DriverConfig,
    decide_all,
    decide_almost_all,
    report as driver_report,
)
from .errors import (
    BudgetExceeded,
    CurveParseError,
    GffError,
    IrreducibilityUnknown,
    NotPrime,
    NotUnivExist,
    PrecisionExhausted,
    ReducibleCurve,
    SentenceSyntaxError,
)
from .ffield import PrimePower, ff_make
from .funcfield import FunctionField, rational_places
from .localeval import check_ur, completion_handle, make_ur_violation
from .sentences import build_eta, parse_sentence, print_sentence

SCHEMA = "gffdecide-report/1"

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_BUDGET = 3
EXIT_NOT_UNIV_EXIST = 4
EXIT_FAILS = 10
EXIT_BOUNDED = 20


def _emit(doc, out_path):
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _make_report(command, input_echo, status, evidence):
    return {
        "schema": SCHEMA,
        "command": command,
        "input_echo": input_echo,
        "status": status,
        "evidence": evidence,
        "timings": None,
    }


def _field_from_q(q):
    pp = PrimePower.from_q(q)
    return ff_make(pp.p, pp.e)


def _load_function_field(args):
    field = _field_from_q(args.q)
    return FunctionField.from_text(field, args.curve)


# ---------------------------------------------------------------------------
# subcommands


def cmd_places(args):
    F = _load_function_field(args)
    groups = []
    total = 0
    for d in range(1, args.deg + 1):
        for bp in rational_places(F.field, d):
            cps = F.places_above(bp)
            total += len(cps)
            groups.append(
                {
                    "base": repr(bp),
                    "base_degree": d,
                    "places": [
                        {"index": cp.index, "e": cp.e, "f_res": cp.f_res, "degree": cp.degree}
                        for cp in cps
                    ],
                }
            )
    doc = _make_report(
        "places",
        {"q": args.q, "curve": args.curve, "deg": args.deg},
        "ok",
        {"groups": groups, "count": total},
    )
    _emit(doc, args.out)
    return EXIT_OK


def cmd_spectrum(args):
    F = _load_function_field(args)
    spec = F.residue_spectrum()
    eta = build_eta(spec)
    doc = _make_report(
        "spectrum",
        {"q": args.q, "curve": args.curve},
        "ok",
        {
            "a": {str(n): spec.a[n] for n in sorted(spec.a)},
            "E": spec.E,
            "eta": print_sentence(eta),
            "genus_bound": spec.genus_bound,
            "hasse_weil_threshold": spec.hasse_weil_threshold,
            "bound": spec.bound,
        },
    )
    _emit(doc, args.out)
    return EXIT_OK


def cmd_decide(args):
    F = _load_function_field(args)
    with open(args.sentence) as fh:
        text = fh.read()
    sentence = parse_sentence(text)
    config = DriverConfig(scan_bound=args.scan_bound, place_budget=args.place_budget)
    if args.mode == "all":
        verdict = decide_all(F, sentence, config)
    else:
        verdict = decide_almost_all(F, sentence, config)
    doc = _make_report(
        "decide",
        {
            "q": args.q,
            "curve": args.curve,
            "sentence": print_sentence(sentence),
            "mode": args.mode,
            "scan_bound": args.scan_bound,
        },
        verdict.status,
        driver_report(verdict),
    )
    _emit(doc, args.out)
    if verdict.status == "HoldsCertified":
        return EXIT_OK
    if verdict.status == "FailsAt":
        return EXIT_FAILS
    return EXIT_BOUNDED


def cmd_ur(args):
    F = _load_function_field(args)
    ramified = F.ramified_places()
    ram_bases = {cp.base for cp in ramified}
    witnesses = []
    sampled = 0
    for bp in rational_places(F.field, 1):
        if bp in ram_bases or sampled >= args.samples:
            continue
        w = F.ur_witness(bp)
        entry = {
            "base": repr(bp),
            "infinite": w.infinite_case,
            "multiplicity": w.multiplicity,
            "g": None if w.g is None else repr(w.g),
            "local": [],
        }
        for cp in F.places_above(bp):
            h = completion_handle(F, cp)
            entry["local"].append({"place": repr(cp), "ur": check_ur(h).outcome})
        witnesses.append(entry)
        sampled += 1
    violation = _ur_violation_section(F, ram_bases)
    doc = _make_report(
        "ur",
        {"q": args.q, "curve": args.curve},
        "ok",
        {
            "ramified": [repr(cp) for cp in ramified],
            "ramified_ur": _ramified_ur(F, ramified),
            "witnesses": witnesses,
            "violation": violation,
        },
    )
    _emit(doc, args.out)
    return EXIT_OK


def _ramified_ur(F, ramified):
    out = []
    for cp in ramified:
        try:
            h = completion_handle(F, cp)
            v = check_ur(h)
            rec = {"place": repr(cp), "ur": v.outcome}
            if v.is_false:
                rec["s"] = str(v.certificate["s"])
                rec["r"] = str(v.certificate["r"])
            out.append(rec)
        except (PrecisionExhausted, BudgetExceeded) as ex:
            out.append({"place": repr(cp), "ur": "Unknown", "error": str(ex)})
    return out


def _ur_violation_section(F, ram_bases):
    """Adjoin a square root of a uniformizer somewhere and exhibit the
    violating (s, r) pair; the section self-validates."""
    for bp in rational_places(F.field, 1):
        if bp in ram_bases or bp.is_infinite:
            continue
        for cp in F.places_above(bp):
            try:
                h = completion_handle(F, cp)
                ext = make_ur_violation(h)
            except GffError:
                continue
            v = check_ur(ext)
            if not v.is_false:
                continue
            s, r = v.certificate["s"], v.certificate["r"]
            p = F.field.p
            w = (ext.t_image - s**p) * r * r
            valid = (
                r.valuation() < 0
                and (w.indistinguishable_from_zero() or w.valuation() >= 0)
            )
            return {
                "base": repr(bp),
                "place": repr(cp),
                "s": str(s),
                "r": str(r),
                "value_group_index": 2,
                "self_validates": valid,
            }
    return None


# ---------------------------------------------------------------------------
# entry point


def build_parser():
    ap = argparse.ArgumentParser(
        prog="gffdecide",
        description="places, spectra and sentence decisions for global function fields",
    )
    sub = ap.add_subparsers(dest="subcommand", required=True)

    def common(p):
        p.add_argument("--q", type=int, required=True, help="field size (prime power)")
        p.add_argument("--curve", required=True, help="defining polynomial f(t, x)")
        p.add_argument("--out", default=None, help="write the JSON report here")

    p = sub.add_parser("places", help="list places by base place")
    common(p)
    p.add_argument("--deg", type=int, default=1, help="max base-place degree")
    p.set_defaults(fn=cmd_places)

    p = sub.add_parser("spectrum", help="residue spectrum and eta sentence")
    common(p)
    p.set_defaults(fn=cmd_spectrum)

    p = sub.add_parser("decide", help="decide a sentence over all/almost all completions")
    common(p)
    p.add_argument("--sentence", required=True, help="file holding one sentence")
    p.add_argument("--mode", choices=("all", "aa"), default="all")
    p.add_argument("--scan-bound", type=int, default=DEFAULT_SCAN_BOUND)
    p.add_argument("--place-budget", type=int, default=5000)
    p.set_defaults(fn=cmd_decide)

    p = sub.add_parser("ur", help="audit the UR(t) axiom over the places of K")
    common(p)
    p.add_argument("--samples", type=int, default=4, help="unramified witnesses to list")
    p.set_defaults(fn=cmd_ur)

    return ap


def main(argv=None):
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as ex:
        return EXIT_PARSE if ex.code not in (0, None) else 0
    try:
        return args.fn(args)
    except (
        CurveParseError,
        ReducibleCurve,
        IrreducibilityUnknown,
        SentenceSyntaxError,
        NotPrime,
        FileNotFoundError,
    ) as ex:
        _emit(
            _make_report(args.subcommand, {"q": args.q, "curve": args.curve},
                         "parse-error", {"error": str(ex)}),
            args.out,
        )
        return EXIT_PARSE
    except NotUnivExist as ex:
        _emit(
            _make_report(args.subcommand, {"q": args.q, "curve": args.curve},
                         "not-universal-existential", {"error": str(ex)}),
            args.out,
        )
        return EXIT_NOT_UNIV_EXIST
    except (PrecisionExhausted, BudgetExceeded) as ex:
        _emit(
            _make_report(args.subcommand, {"q": args.q, "curve": args.curve},
                         "budget-exhausted", {"error": str(ex)}),
            args.out,
        )
        return EXIT_BUDGET


if __name__ == "__main__":
    sys.exit(main())
