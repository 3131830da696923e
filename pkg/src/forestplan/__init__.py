"""Multi-goal path planning with space-filling forests.

Grow one tree per target, connect the trees with virtual edges instead of
merging them, extract a roadmap, and solve the visiting order on top of it.
Includes merging multi-tree RRT / RRT* / lazy-tour baselines, map
generators and a deterministic benchmark harness.
"""
from .geometry import (
    CollisionMeter,
    Configuration,
    Polygon,
    Workspace,
    distance,
    point_free,
    segment_free,
    segment_points,
)
from .forest import Forest, Node, PlannerParams, VirtualEdge, plan
from .baselines import (
    LazyResult,
    MergeForest,
    PathResult,
    PlanningFailure,
    lazy_tsp,
    multi_t_rrt,
    rrt_star,
)
from .roadmap import (
    DistanceMatrix,
    RoadmapGraph,
    all_target_distances,
    build_graph,
    cumulative_cost,
    extract_path,
    path_length,
)
from .tsp import Tour, held_karp, heuristic_tour, solve_tour, tour_cost
from .planners import (
    LazyTSP,
    MultiTreeRRT,
    PLANNER_NAMES,
    SpaceFillingForest,
    make_planner,
    parse_planner_name,
)
from .maps import (
    MAP_KINDS,
    MapGenerationError,
    free_space_connected,
    generate_map,
    sample_free_targets,
)
from .bench import (
    RunStats,
    Scenario,
    ScenarioError,
    SeedRecord,
    TTestResult,
    compare_runs,
    histogram_csv,
    run_experiment,
    welch_t_test,
    write_run_artifacts,
)
from .render import render_svg

__version__ = "0.1.0"

__all__ = [
    "CollisionMeter",
    "Configuration",
    "DistanceMatrix",
    "Forest",
    "LazyResult",
    "LazyTSP",
    "MAP_KINDS",
    "MapGenerationError",
    "MergeForest",
    "MultiTreeRRT",
    "Node",
    "PLANNER_NAMES",
    "PathResult",
    "PlannerParams",
    "PlanningFailure",
    "Polygon",
    "RoadmapGraph",
    "RunStats",
    "Scenario",
    "ScenarioError",
    "SeedRecord",
    "SpaceFillingForest",
    "TTestResult",
    "Tour",
    "VirtualEdge",
    "Workspace",
    "all_target_distances",
    "build_graph",
    "compare_runs",
    "cumulative_cost",
    "distance",
    "extract_path",
    "free_space_connected",
    "generate_map",
    "held_karp",
    "heuristic_tour",
    "histogram_csv",
    "lazy_tsp",
    "make_planner",
    "multi_t_rrt",
    "parse_planner_name",
    "path_length",
    "plan",
    "point_free",
    "render_svg",
    "rrt_star",
    "run_experiment",
    "sample_free_targets",
    "segment_free",
    "segment_points",
    "solve_tour",
    "tour_cost",
    "welch_t_test",
    "write_run_artifacts",
    "__version__",
]
