"""Verification suite for the range of perturbed lattice random walks.

Exact rational dynamic programming, a coupled-walk checker, and seeded
Monte Carlo for the continuous-time moving-trap survival comparison.
"""

__version__ = "0.1.0"

from .engine import (
    check_sym_domination,
    evolve_survival,
    hit_mass,
    moreau_engine,
    range_via_hits,
    verify_decomposition,
    verify_pascal,
    verify_w_recursion,
)
from .kernels import (
    check_mono_conditions,
    check_moreau_conditions,
    fourier_crosscheck,
    n_step_kernel,
    paired_kernel,
    tail_sum,
)
from .perturb import (
    InsertionPath,
    TrapTrajectory,
    alternating_phi,
    contract,
    random_phi,
    trap_field,
)
from .pmf import (
    IncrementPmf,
    WalkClass,
    lazy_walk,
    simple_random_walk,
    uniform_three,
    validate_class,
)

__all__ = [
    "IncrementPmf",
    "InsertionPath",
    "TrapTrajectory",
    "WalkClass",
    "alternating_phi",
    "check_mono_conditions",
    "check_moreau_conditions",
    "check_sym_domination",
    "contract",
    "evolve_survival",
    "fourier_crosscheck",
    "hit_mass",
    "lazy_walk",
    "moreau_engine",
    "n_step_kernel",
    "paired_kernel",
    "random_phi",
    "range_via_hits",
    "simple_random_walk",
    "tail_sum",
    "trap_field",
    "uniform_three",
    "validate_class",
    "verify_decomposition",
    "verify_pascal",
    "verify_w_recursion",
]
