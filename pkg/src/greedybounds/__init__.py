"""Two-sided numerical bounds for greedy-type constants of bases in Banach spaces."""

from .weights import WeightSeq, combos, combo_table, dual, summing, difference, parse_weight
from .lorentz import CoefVec, norm_l1, norm_l1_hat, norm_lr, norm_m, parse_coefvec
from .spaces import SpaceModel, make_space, dual_norm
from .greedy import greedy_residual, greedy_sets, sigma_tilde, sigma_upper
from .constants import (
    BoundRecord,
    combined_bounds,
    democracy,
    dual_democracy,
    k_constant,
    lebesgue_bounds,
    qg_constants,
    superdemocracy,
    upper_weights,
)
from .harness import CaseSpec, ReportRow, default_case, emit, run_case

__all__ = [
    "WeightSeq", "combos", "combo_table", "dual", "summing", "difference", "parse_weight",
    "CoefVec", "norm_l1", "norm_l1_hat", "norm_lr", "norm_m", "parse_coefvec",
    "SpaceModel", "make_space", "dual_norm",
    "greedy_residual", "greedy_sets", "sigma_tilde", "sigma_upper",
    "BoundRecord", "combined_bounds", "democracy", "dual_democracy", "k_constant",
    "lebesgue_bounds", "qg_constants", "superdemocracy", "upper_weights",
    "CaseSpec", "ReportRow", "default_case", "emit", "run_case",
]
__version__ = "0.1.0"
