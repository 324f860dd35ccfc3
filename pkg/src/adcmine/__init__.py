"""Mining of minimal approximate denial constraints from tabular data."""

from .approx import (
    ApproxFunction,
    FnKind,
    f1_score,
    f2_score,
    greedy_f3_accept,
    greedy_removals,
    int_cutoff,
    prefilter_2eps,
    problematic_count,
)
from .dataset import Column, ColumnKind, DataError, Dataset, from_cells, load_csv
from .enumeration import EmittedDC, EnumStats, InternalError, adc_enum, enumerate_dcs, mmcs
from .evidence import (
    EvidenceSet,
    Vios,
    build_evidence,
    load_cache,
    sat,
    save_cache,
    uncovered_mask,
    uncovered_weight,
)
from .predicates import (
    Op,
    Pattern,
    Predicate,
    PredicateSpace,
    generate_predicate_space,
)
from .sampling import (
    Estimate,
    SampleSpec,
    accept_on_sample,
    adjusted_f1,
    chebyshev_tail_bound,
    draw_sample,
    estimate_p,
    normal_ci_halfwidth,
    z_quantile,
)

__version__ = "0.1.0"

__all__ = [
    "ApproxFunction", "FnKind", "f1_score", "f2_score", "greedy_f3_accept",
    "greedy_removals", "int_cutoff", "prefilter_2eps", "problematic_count",
    "Column", "ColumnKind", "DataError", "Dataset", "from_cells", "load_csv",
    "EmittedDC", "EnumStats", "InternalError", "adc_enum", "enumerate_dcs", "mmcs",
    "EvidenceSet", "Vios", "build_evidence", "load_cache", "sat", "save_cache",
    "uncovered_mask", "uncovered_weight",
    "Op", "Pattern", "Predicate", "PredicateSpace", "generate_predicate_space",
    "Estimate", "SampleSpec", "accept_on_sample", "adjusted_f1",
    "chebyshev_tail_bound", "draw_sample", "estimate_p", "normal_ci_halfwidth",
    "z_quantile",
    "__version__",
]
