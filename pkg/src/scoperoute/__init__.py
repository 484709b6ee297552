"""Scope-based route planning with detour handling under dynamic road closures."""

from .network import (
    INF,
    ContractionResult,
    NetworkError,
    RoadNetwork,
    ScopeMapping,
    Walk,
    balance_to_proper,
    build_network,
    contract_degree2_chains,
    is_proper,
    is_routing_connected,
    make_scope,
    reverse,
    s_draw,
    scope_from_labels,
)
from .search import (
    BudgetExceeded,
    bidirectional_s_dijkstra,
    brute_force_optimal_admissible,
    dijkstra,
    is_saturated,
    oracle_settled_labels,
    s_dijkstra,
    validate_s_admissible,
    validate_split_admissible,
)
from .detour import (
    ClosureSet,
    DetourResult,
    ObstructionRecord,
    build_detour_context,
    derive_closures,
    enhanced_detour_route,
    find_obstructed,
    qc_closure,
    simple_detour_route,
    validate_simple_detour,
)
from .fulldetour import (
    Decomposition,
    FullVerdict,
    SearchBudgetExceeded,
    brute_force_full_optimum,
    validate_full_detour,
)
from .netio import (
    NetworkFile,
    ParseError,
    assign_scope_from_categories,
    dump_network,
    export_route,
    generate_synthetic,
    load_network,
    parse_closures,
    parse_network,
    save_network,
)
from .bench import BenchConfig, BenchReport, place_random_closures, run_benchmark

__version__ = "0.1.0"

__all__ = [
    "INF",
    "BenchConfig",
    "BenchReport",
    "BudgetExceeded",
    "ClosureSet",
    "ContractionResult",
    "Decomposition",
    "DetourResult",
    "FullVerdict",
    "NetworkError",
    "NetworkFile",
    "ObstructionRecord",
    "ParseError",
    "RoadNetwork",
    "ScopeMapping",
    "SearchBudgetExceeded",
    "Walk",
    "assign_scope_from_categories",
    "balance_to_proper",
    "bidirectional_s_dijkstra",
    "brute_force_full_optimum",
    "brute_force_optimal_admissible",
    "build_detour_context",
    "build_network",
    "contract_degree2_chains",
    "derive_closures",
    "dijkstra",
    "dump_network",
    "enhanced_detour_route",
    "export_route",
    "find_obstructed",
    "generate_synthetic",
    "is_proper",
    "is_routing_connected",
    "is_saturated",
    "load_network",
    "make_scope",
    "oracle_settled_labels",
    "parse_closures",
    "parse_network",
    "place_random_closures",
    "qc_closure",
    "reverse",
    "s_dijkstra",
    "s_draw",
    "save_network",
    "scope_from_labels",
    "simple_detour_route",
    "validate_full_detour",
    "validate_s_admissible",
    "validate_simple_detour",
    "validate_split_admissible",
]
