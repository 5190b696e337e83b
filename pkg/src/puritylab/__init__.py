"""Purity-number separability analysis for multi-qudit states."""

__version__ = "0.1.0"

from .dsl import evaluate, parse, state
from .rate import factor_rate, pair_count, total_rate
from .separability import (
    finest_factorization,
    fully_entangled,
    gamma,
    gamma_max_pure,
    is_separable_pure,
    np_mixed,
    purity_profile,
)
from .states import (
    DensityMatrix,
    LocalDims,
    PureState,
    SiteSubset,
    density_from_pure,
    dim_cap,
    mix,
    partial_trace,
    purity,
    tensor_product,
    validate,
)
