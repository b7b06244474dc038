"""Exact arithmetic and decision procedures for global function fields.

The package computes places, residue spectra and ramification data of a
global function field K = Quot(F_q[t,x]/(f)), checks the UR(t) condition in
completions, and decides universal/existential valued-field sentences in
all or almost all completions, with certificates or honest bounded
statuses.
"""

from . import errors
from .driver import (
    DriverConfig,
    GlobalVerdict,
    decide_all,
    decide_almost_all,
    eval_sentence_at,
    exceptional_places,
    report,
)
from .ffield import FField, FFElem, PrimePower, ff_embed, ff_make
from .fpoly import BiPoly, FPoly
from .funcfield import (
    CurvePlace,
    FunctionField,
    RationalPlace,
    ResidueSpectrum,
    completion_embed,
    rational_places,
)
from .localeval import (
    CompletionHandle,
    Verdict3,
    WitnessCertificate,
    check_ur,
    completion_handle,
    decide_quadform,
    decide_univar,
    eval_exist_local,
    make_ur_violation,
)
from .localfield import LocalFactor, SPoly, local_decompose, local_embeddings
from .sentences import (
    build_chi,
    build_eta,
    build_psi,
    build_ur,
    normalize,
    parse_sentence,
    print_sentence,
)
from .series import LaurentSeries

__all__ = [
    "errors",
    "BiPoly",
    "CompletionHandle",
    "CurvePlace",
    "DriverConfig",
    "FField",
    "FFElem",
    "FPoly",
    "FunctionField",
    "GlobalVerdict",
    "LaurentSeries",
    "LocalFactor",
    "PrimePower",
    "RationalPlace",
    "ResidueSpectrum",
    "SPoly",
    "Verdict3",
    "WitnessCertificate",
    "build_chi",
    "build_eta",
    "build_psi",
    "build_ur",
    "check_ur",
    "completion_embed",
    "completion_handle",
    "decide_all",
    "decide_almost_all",
    "decide_quadform",
    "decide_univar",
    "eval_exist_local",
    "eval_sentence_at",
    "exceptional_places",
    "ff_embed",
    "ff_make",
    "local_decompose",
    "local_embeddings",
    "make_ur_violation",
    "normalize",
    "parse_sentence",
    "print_sentence",
    "rational_places",
    "report",
]
__version__ = "0.1.0"
