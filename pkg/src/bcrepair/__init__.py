"""Storage / repair-bandwidth trade-off for regenerating codes with partial failures."""

from .flowgraph import SystemParams, build_initial, apply_repair_round, attach_collector, canonical_worst_case
from .galois import GF, FieldElement, FieldMatrix, FieldSpec, mat_mul, mat_rank, solve_linear
from .mds import MdsCode, Placement, decode_any_k, encode, make_mds
from .oracle import max_flow, oracle_alpha_star, worst_case_mincut
from .tradeoff import (
    alpha_star,
    alpha_star_div,
    alpha_star_nondiv,
    bound_sum,
    capacity_piecewise,
    gamma_star,
    mbr_point,
    msr_point,
    sample_curve,
)
from .xrational import ExtendedRational, xr

__all__ = [
    "ExtendedRational", "xr", "SystemParams", "build_initial", "apply_repair_round", "attach_collector",
    "canonical_worst_case", "GF", "FieldSpec", "FieldElement", "FieldMatrix", "mat_mul", "mat_rank",
    "solve_linear", "MdsCode", "Placement", "make_mds", "encode", "decode_any_k", "max_flow",
    "worst_case_mincut", "oracle_alpha_star", "alpha_star", "alpha_star_div", "alpha_star_nondiv",
    "bound_sum", "capacity_piecewise", "gamma_star", "msr_point", "mbr_point", "sample_curve",
]
