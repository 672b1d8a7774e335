"""Row-column design toolkit: enumeration, constructions, admissibility,
heuristic search, satisfiability models, and Youden-rectangle bridges."""

from .core import (
    RowColumnArray,
    DesignClassification,
    IntersectionProfile,
    ValidationReport,
    classify,
    connectivity,
    format_array,
    format_array_list,
    from_matrix,
    intersections,
    isotope,
    parse_array,
    parse_array_list,
    transpose,
    validate,
)
from .canonical import (
    CanonicalForm,
    canonical,
    canonical_key,
    is_isotopic,
    trisotopic_classes,
)
from .params import (
    ComponentBIBDParams,
    ParameterSet,
    PYDParameterSet,
    component_bibds,
    derive,
    enumerate_admissible,
    pyd_admissible_search,
    pyd_main_series,
    search_small_v,
)
from .enumeration import (
    BudgetExceeded,
    EnumerationReport,
    SearchTarget,
    ao_target,
    autotopism_histogram,
    cc_target,
    enumerate_designs,
    enumerate_via_sdr,
    inadmissible_cc_target,
    reports_agree,
)

__version__ = "0.1.0"
