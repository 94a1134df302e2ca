"""Set-cover local computation toolkit.

Core pieces: a set-system query layer with accounting (:mod:`setsystem`),
a deterministic shared random tape (:mod:`tape`), global simulations of the
algorithm ladder (:mod:`simulate`), per-query oracles matching them bit for
bit (:mod:`lca`), and exact/greedy baselines (:mod:`baselines`).
"""

from .baselines import OptBound, exact_min_cover, greedy_cover
from .errors import (
    BudgetExceededError,
    ConstructionError,
    DomainError,
    InvariantError,
    LcaCoverError,
    ParseError,
    StateError,
)
from .lca import (
    OracleContext,
    QueryProfile,
    oracle_recsplit_element,
    oracle_recsplit_set,
    oracle_sqrt_element,
    oracle_sqrt_set,
    profile,
    verify_against_global,
)
from .setsystem import (
    InstanceSpec,
    QueryMeter,
    SetSystem,
    generate,
    query_element,
    query_set,
    read_instance,
    write_instance,
)
from .simulate import (
    AlgoParams,
    CoverState,
    GenericTrace,
    RunReport,
    detect_bad_element,
    detect_bad_set,
    estimate_degree,
    f_seq,
    polylog_params,
    run_base,
    run_generic,
    run_generic_traced,
    run_recsplit,
    run_sqrt,
    scan_bad_events,
    stage1_coverage_multiplicity,
    validate_cover,
)
from .tape import ElemSample, RandomTape, SetSample

__all__ = [
    "AlgoParams",
    "BudgetExceededError",
    "ConstructionError",
    "CoverState",
    "DomainError",
    "ElemSample",
    "GenericTrace",
    "InstanceSpec",
    "InvariantError",
    "LcaCoverError",
    "OptBound",
    "OracleContext",
    "ParseError",
    "QueryMeter",
    "QueryProfile",
    "RandomTape",
    "RunReport",
    "SetSample",
    "SetSystem",
    "StateError",
    "detect_bad_element",
    "detect_bad_set",
    "estimate_degree",
    "exact_min_cover",
    "f_seq",
    "generate",
    "greedy_cover",
    "oracle_recsplit_element",
    "oracle_recsplit_set",
    "oracle_sqrt_element",
    "oracle_sqrt_set",
    "polylog_params",
    "profile",
    "query_element",
    "query_set",
    "read_instance",
    "run_base",
    "run_generic",
    "run_generic_traced",
    "run_recsplit",
    "run_sqrt",
    "scan_bad_events",
    "stage1_coverage_multiplicity",
    "validate_cover",
    "verify_against_global",
    "write_instance",
]
