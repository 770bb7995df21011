"""Split-sample identification testing for structural VARs.

The package tests whether a one-break variance shift is informative
enough to identify the structural parameters of a VAR: the null is
that all relative shock variances are distinct (identification), the
alternative that some coincide.  It ships the reduced-form VAR layer,
the closed-form two-regime ML estimator, the split-sample Wald test
with multi-split harmonic-mean combination, the Monte Carlo harness
for the size/power study, and a CLI.
"""

from .dgp import (
    DEFAULT_BURN_IN,
    BUILTIN_DGPS,
    DgpConfig,
    break_index_for,
    dgp1,
    dgp2,
    dgp3,
    dgp4,
    draw_shocks,
    get_dgp,
    parse_distribution,
    simulate_sample,
)
from .estimators import ReducedFormVAR, SplitIdentificationTest, VarianceShiftSVAR
from .monte_carlo import (
    NOMINAL_LEVEL,
    GridSpec,
    McReport,
    McRow,
    parse_grid,
    run_cell,
    run_grid,
)
from .split_test import (
    MultiSplitResult,
    SplitAssignment,
    SplitTestResult,
    chi_square_sf,
    combine_p_values,
    multi_split_test,
    scaling_factor,
    single_split_test,
    stratified_split,
)
from .structural import (
    RegimeCovariances,
    StructuralEstimate,
    hessian,
    kurtosis_estimate,
    log_likelihood,
    normalize_structure,
    pack_theta,
    regime_covariances,
    structural_decompose,
    structural_shocks,
    unpack_theta,
)
from .var import TimeSeriesSample, VarEstimate, VarSpec, estimate_var, simulate_var

__version__ = "0.1.0"

__all__ = [
    "BUILTIN_DGPS",
    "DEFAULT_BURN_IN",
    "DgpConfig",
    "GridSpec",
    "McReport",
    "McRow",
    "MultiSplitResult",
    "NOMINAL_LEVEL",
    "ReducedFormVAR",
    "RegimeCovariances",
    "SplitAssignment",
    "SplitIdentificationTest",
    "SplitTestResult",
    "StructuralEstimate",
    "TimeSeriesSample",
    "VarEstimate",
    "VarSpec",
    "VarianceShiftSVAR",
    "break_index_for",
    "chi_square_sf",
    "combine_p_values",
    "dgp1",
    "dgp2",
    "dgp3",
    "dgp4",
    "draw_shocks",
    "estimate_var",
    "get_dgp",
    "hessian",
    "kurtosis_estimate",
    "log_likelihood",
    "multi_split_test",
    "normalize_structure",
    "pack_theta",
    "parse_distribution",
    "parse_grid",
    "regime_covariances",
    "run_cell",
    "run_grid",
    "scaling_factor",
    "simulate_sample",
    "simulate_var",
    "single_split_test",
    "stratified_split",
    "structural_decompose",
    "structural_shocks",
    "unpack_theta",
    "__version__",
]
