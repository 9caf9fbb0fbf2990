"""Certified real-root isolation for sparse integer polynomials."""

from .dyadic import Dyadic
from .errors import (
    BoundOverflowError,
    ChainError,
    ContractError,
    DegenerateMultipointError,
    DensifyError,
    InvariantViolation,
    ParseError,
    SparseRootsError,
    ZeroPolynomialError,
)
from .isolate import IsolatedRoot, isolate_all, isolate_positive
from .numeric import (
    BoundSet,
    MultipointSet,
    admissible_point,
    certified_sign,
    chain_bound,
    eval_approx,
    eval_sep_bound,
)
from .poly import (
    SparsePolynomial,
    clear_denominators,
    derivative_chain,
    eval_exact,
    parse,
    parse_rational,
    reflect,
    sign_variations,
    strip_power,
)
from .refine import RefineState, refine_root
from .stats import Stats

__all__ = [
    "BoundOverflowError", "BoundSet", "ChainError", "ContractError",
    "DegenerateMultipointError", "DensifyError", "Dyadic", "InvariantViolation",
    "IsolatedRoot", "MultipointSet", "ParseError", "RefineState", "SparsePolynomial",
    "SparseRootsError", "Stats", "ZeroPolynomialError", "admissible_point",
    "certified_sign", "chain_bound", "clear_denominators", "derivative_chain",
    "eval_approx", "eval_exact", "eval_sep_bound", "isolate_all", "isolate_positive",
    "parse", "parse_rational", "reflect", "refine_root", "sign_variations", "strip_power",
]
