"""Rank-1 lattice rules by component-by-component construction with exclusion sets."""

from ._accel import BACKEND
from .bounds import (
    BoundReport,
    BoundViolation,
    corollary_bound,
    optimize_lambda,
    theorem_bound,
    verify_construction,
)
from .cbc import (
    CbcResult,
    CbcState,
    EmptySearchSpace,
    FastPathUnavailable,
    candidate_error_sweep,
    cbc_construct,
    fast_sweep_prime,
    select_component,
)
from .exclusions import BudgetExceeded, ExclusionPolicy, Exhausted, build_exclusions
from .korobov import SmoothnessAlpha, Weights, error_sq, error_sq_bruteforce, omega, zeta
from .numtheory import ModulusContext, euler_phi, primitive_root, units

__version__ = "0.1.0"
