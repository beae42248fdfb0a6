"""momentrec: recover functions, planar images, and discrete
distributions from finite geometric moment sequences.

The public surface re-exported here covers the typical flow: build a
moment rectangle (``polynomial_moments``, ``region_moments``,
``empirical_moments``, ``discrete_moments``), invert it (``invert_grid``,
``invert_point``, ``extrapolated_grid``), and measure or threshold the
result (``sup_error``, ``l1_error``, ``level_set_mask``).
"""

from .errors import (
    InvalidRadius,
    InvalidRegion,
    MomentRecoveryError,
    NonIntegerScaledOrder,
    OutOfDomain,
    PrecisionInsufficient,
    ResolutionMismatch,
    UnsortedSupport,
)
from .policy import (
    DOUBLE,
    EXACT,
    NumericPolicy,
    bigfloat,
    default_policy,
    parse_policy,
)
from .regions import HalfDisc, ParabolicLens, Polygon, QuarterDisc, UnionRegion
from .moments import (
    DiscreteMeasure,
    DiscreteMeasure2D,
    MomentGrid,
    MomentVector,
    SampleSet,
    discrete_moments,
    discrete_moments_2d,
    empirical_moments,
    polynomial_moments,
    region_moments,
)
from .inversion import (
    Approximant,
    InversionParams,
    beta_kernel_cells,
    beta_kernel_estimate,
    beta_kernel_pdf,
    beta_tail_bound,
    beta_tail_mass,
    check_precision_escalation,
    extrapolated_grid,
    extrapolated_point,
    extrapolated_staircase,
    invert_grid,
    invert_point,
    kernel_density_grid,
    kernel_offpeak_ratio,
    sharp_tail_bound,
    staircase_cells,
)
from .discrete import (
    RecoveredCDF,
    binomial_cdf,
    cdf_recover_1d,
    cdf_recover_2d,
    cdf_weights,
    pmf_recover,
    recover_cdf_1d,
)
from .imaging import (
    RasterMask,
    level_set_mask,
    rasterize_region,
    recover_region_mask,
    render_pgm,
    symmetric_difference,
)
from .metrics import ErrorReport, l1_error, rate_table, sup_error, write_reports_csv

__version__ = "0.1.0"

__all__ = [
    "MomentRecoveryError",
    "OutOfDomain",
    "PrecisionInsufficient",
    "NonIntegerScaledOrder",
    "InvalidRadius",
    "ResolutionMismatch",
    "UnsortedSupport",
    "InvalidRegion",
    "NumericPolicy",
    "EXACT",
    "DOUBLE",
    "bigfloat",
    "default_policy",
    "parse_policy",
    "Polygon",
    "QuarterDisc",
    "HalfDisc",
    "ParabolicLens",
    "UnionRegion",
    "MomentGrid",
    "MomentVector",
    "SampleSet",
    "DiscreteMeasure",
    "DiscreteMeasure2D",
    "polynomial_moments",
    "region_moments",
    "empirical_moments",
    "discrete_moments",
    "discrete_moments_2d",
    "InversionParams",
    "Approximant",
    "invert_point",
    "invert_grid",
    "staircase_cells",
    "extrapolated_point",
    "extrapolated_grid",
    "extrapolated_staircase",
    "beta_kernel_pdf",
    "beta_kernel_cells",
    "beta_kernel_estimate",
    "kernel_density_grid",
    "beta_tail_mass",
    "beta_tail_bound",
    "kernel_offpeak_ratio",
    "sharp_tail_bound",
    "check_precision_escalation",
    "cdf_weights",
    "binomial_cdf",
    "cdf_recover_1d",
    "recover_cdf_1d",
    "RecoveredCDF",
    "pmf_recover",
    "cdf_recover_2d",
    "RasterMask",
    "level_set_mask",
    "rasterize_region",
    "recover_region_mask",
    "symmetric_difference",
    "render_pgm",
    "ErrorReport",
    "sup_error",
    "l1_error",
    "rate_table",
    "write_reports_csv",
]
