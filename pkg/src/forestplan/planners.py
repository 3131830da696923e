"""Scikit-learn style planner estimators.

Each planner follows the estimator protocol: constructor arguments are
stored verbatim (so ``get_params``/``set_params``/``clone`` work), and
``fit(X)`` — where ``X`` is an (n, 2) array of target coordinates — runs
the full pipeline: grow the planner's structure over the targets, extract
the roadmap, compute the target-to-target cost matrix and solve the
visiting order.  Results land in trailing-underscore attributes:

==================  =====================================================
``forest_``         raw planner state (`Forest` or `MergeForest`)
``graph_``          extracted `RoadmapGraph`
``matrix_``         `DistanceMatrix` (costs + predecessors)
``cost_matrix_``    (n, n) ndarray view of the costs
``cumulative_cost_``sum of shortest-path costs over unordered target pairs
``tour_``           optimal/heuristic `Tour` over the cost matrix
``iterations_``     the planner's headline iteration count (see each class)
``point_checks_``   total point-collision checks spent
==================  =====================================================

``fit`` raises :class:`~forestplan.baselines.PlanningFailure` when some
target pair ends up unreachable in the roadmap.
"""
from __future__ import annotations

import math
import random
from dataclasses import replace

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError
from sklearn.utils.validation import check_array

from .baselines import MergeForest, PlanningFailure, lazy_tsp
from .forest import Forest, PlannerParams
from .geometry import Workspace
from .roadmap import all_target_distances, build_graph, cumulative_cost, extract_path
from .tsp import solve_tour


def check_target_array(X) -> np.ndarray:
    """Validate targets as a finite (n, 2) float array."""
    X = check_array(X, dtype=np.float64, ensure_2d=True)
    if X.shape[1] != 2:
        raise ValueError(f"targets must have shape (n, 2), got {X.shape}")
    return X


class _RoadmapPlanner(BaseEstimator):
    """Shared fit plumbing for planners that produce a full roadmap."""

    workspace: Workspace | None
    step: float
    connect_radius: float | None
    max_iterations: int
    check_points: int
    random_state: int

    def _base_params(self, seed: int) -> PlannerParams:
        if self.workspace is None:
            raise ValueError("workspace must be set before fitting")
        connect = self.connect_radius if self.connect_radius is not None else 2.0 * self.step
        return PlannerParams(
            step=self.step,
            connect_radius=connect,
            samples=getattr(self, "samples", 10),
            queue_bias=getattr(self, "queue_bias", 0.95),
            max_iterations=self.max_iterations,
            rewire=getattr(self, "rewire", True),
            use_queues=getattr(self, "use_queues", True),
            check_points=self.check_points,
            seed=seed,
        )

    def _finish_fit(self, forest) -> None:
        self.forest_ = forest
        self.graph_ = build_graph(forest)
        self.matrix_ = all_target_distances(self.graph_)
        self.cost_matrix_ = self.matrix_.costs
        n = len(forest.targets)
        off_diagonal = self.cost_matrix_[~np.eye(n, dtype=bool)]
        if off_diagonal.size and not np.isfinite(off_diagonal).all():
            bad = np.argwhere(~np.isfinite(self.cost_matrix_))
            i, j = (int(v) for v in bad[0])
            raise PlanningFailure(
                f"targets {i} and {j} ended up unreachable after "
                f"{forest.iterations_used} iterations"
            )
        self.cumulative_cost_ = cumulative_cost(self.matrix_) if n > 1 else 0.0
        self.tour_ = solve_tour(self.cost_matrix_) if n > 1 else None

    def _check_fitted(self) -> None:
        if not hasattr(self, "cost_matrix_"):
            raise NotFittedError(f"{type(self).__name__} is not fitted yet; call fit(X) first")

    def path(self, i: int, j: int):
        """Configurations along the roadmap shortest path between targets i and j."""
        self._check_fitted()
        return extract_path(self.graph_, self.matrix_, i, j)

    def tour_paths(self) -> list:
        """Per-leg configuration paths following the fitted tour."""
        self._check_fitted()
        if self.tour_ is None:
            return []
        seq = self.tour_.sequence
        return [self.path(seq[k], seq[(k + 1) % len(seq)]) for k in range(len(seq))]


class SpaceFillingForest(_RoadmapPlanner):
    """Multi-goal planner growing one tree per target, linked by virtual edges.

    Parameters
    ----------
    workspace : Workspace
        Bounds, obstacles and robot radius to plan in.
    step : float, default=1.0
        Expansion sampling radius (new nodes appear at this distance).
    connect_radius : float or None, default=None
        Inter-tree connection range; ``None`` means ``2 * step``.
    samples : int, default=10
        Candidate samples per expansion and rewiring neighbourhood size.
    queue_bias : float, default=0.95
        Probability of picking the expansion node from the distance-to-target
        priority queues rather than uniformly from the open list.
    max_iterations : int, default=10000
        Iteration budget.
    rewire : bool, default=True
        Reparent nodes when that strictly shortens a root path.  Disable to
        get the non-rewiring variant.
    use_queues : bool, default=True
        Keep per-target priority queues.  Disabling this as well degrades
        selection to uniform open-list picks (the simplest variant).
    check_points : int, default=3
        Sample points per segment collision check.
    random_state : int, default=0
        Seed of the planner's random stream.

    Attributes
    ----------
    See the module docstring.  ``iterations_`` is the iteration at which all
    trees first formed a single component (the full budget may run longer to
    keep improving paths).
    """

    def __init__(
        self,
        workspace: Workspace | None = None,
        step: float = 1.0,
        connect_radius: float | None = None,
        samples: int = 10,
        queue_bias: float = 0.95,
        max_iterations: int = 10_000,
        rewire: bool = True,
        use_queues: bool = True,
        check_points: int = 3,
        random_state: int = 0,
    ):
        self.workspace = workspace
        self.step = step
        self.connect_radius = connect_radius
        self.samples = samples
        self.queue_bias = queue_bias
        self.max_iterations = max_iterations
        self.rewire = rewire
        self.use_queues = use_queues
        self.check_points = check_points
        self.random_state = random_state

    def fit(self, X, y=None):
        X = check_target_array(X)
        params = self._base_params(seed=self.random_state)
        forest = Forest(self.workspace, X.tolist(), params).run()
        self._finish_fit(forest)
        its = forest.iterations_to_single_component
        self.iterations_ = its if its is not None else forest.iterations_used
        self.point_checks_ = forest.meter.point_checks
        return self


class MultiTreeRRT(_RoadmapPlanner):
    """Merging multi-tree RRT baseline, optionally best-of-``restarts``.

    With ``restarts > 1`` the planner runs that many times on sub-seeds
    drawn from ``random.Random(random_state)`` and keeps the run with the
    cheapest tour (with ``restarts=1`` the seed is ``random_state`` itself,
    matching :func:`forestplan.multi_t_rrt` exactly).  ``iterations_`` is
    the winning run's iteration count at full merge; ``point_checks_`` sums
    the effort across all restarts.  ``restart_costs_`` lists each
    restart's tour cost.
    """

    def __init__(
        self,
        workspace: Workspace | None = None,
        step: float = 1.0,
        connect_radius: float | None = None,
        max_iterations: int = 10_000,
        check_points: int = 3,
        restarts: int = 1,
        random_state: int = 0,
    ):
        self.workspace = workspace
        self.step = step
        self.connect_radius = connect_radius
        self.max_iterations = max_iterations
        self.check_points = check_points
        self.restarts = restarts
        self.random_state = random_state

    def fit(self, X, y=None):
        X = check_target_array(X)
        if self.restarts < 1:
            raise ValueError(f"restarts must be >= 1, got {self.restarts}")
        if self.restarts == 1:
            seeds = [self.random_state]
        else:
            rng = random.Random(self.random_state)
            seeds = [rng.randrange(2**63) for _ in range(self.restarts)]
        params = self._base_params(seed=0)
        best = None
        total_checks = 0
        costs: list[float] = []
        failure: PlanningFailure | None = None
        for seed in seeds:
            forest = MergeForest(self.workspace, X.tolist(), replace(params, seed=seed)).run()
            total_checks += forest.meter.point_checks
            try:
                trial = _FittedTrial(forest)
            except PlanningFailure as exc:
                costs.append(math.inf)
                failure = exc
                continue
            costs.append(trial.tour_cost)
            if best is None or trial.tour_cost < best.tour_cost:
                best = trial
        self.restart_costs_ = costs
        self.point_checks_ = total_checks
        if best is None:
            raise failure if failure is not None else PlanningFailure("all restarts failed")
        self._finish_fit(best.forest)
        self.iterations_ = best.forest.iterations_used
        return self


class _FittedTrial:
    """One MergeForest run taken through roadmap + tour, kept if it wins."""

    def __init__(self, forest: MergeForest):
        self.forest = forest
        graph = build_graph(forest)
        matrix = all_target_distances(graph)
        n = len(forest.targets)
        off = matrix.costs[~np.eye(n, dtype=bool)]
        if off.size and not np.isfinite(off).all():
            raise PlanningFailure(
                f"trees never fully merged within {forest.iterations_used} iterations"
            )
        self.tour_cost = solve_tour(matrix.costs).cost if n > 1 else 0.0


class LazyTSP(BaseEstimator):
    """Lazy tour planner: solve on straight-line costs, verify only tour edges.

    ``fit(X)`` leaves ``tour_``, the partially verified ``cost_matrix_``,
    ``paths_`` (configurations per verified pair), ``verified_``,
    ``iterations_`` (total iterations across all point-to-point queries)
    and ``point_checks_``.  No full roadmap exists, so pairwise costs
    outside the tour stay straight-line estimates and there is no
    ``cumulative_cost_``.
    """

    def __init__(
        self,
        workspace: Workspace | None = None,
        step: float = 1.0,
        connect_radius: float | None = None,
        samples: int = 10,
        max_iterations: int = 10_000,
        check_points: int = 3,
        random_state: int = 0,
    ):
        self.workspace = workspace
        self.step = step
        self.connect_radius = connect_radius
        self.samples = samples
        self.max_iterations = max_iterations
        self.check_points = check_points
        self.random_state = random_state

    def fit(self, X, y=None):
        X = check_target_array(X)
        if self.workspace is None:
            raise ValueError("workspace must be set before fitting")
        connect = self.connect_radius if self.connect_radius is not None else 2.0 * self.step
        params = PlannerParams(
            step=self.step,
            connect_radius=connect,
            samples=self.samples,
            max_iterations=self.max_iterations,
            check_points=self.check_points,
            seed=self.random_state,
        )
        result = lazy_tsp(self.workspace, X.tolist(), params)
        self.tour_ = result.tour
        self.cost_matrix_ = result.cost_matrix
        self.verified_ = result.verified
        self.paths_ = result.paths
        self.iterations_ = result.total_iterations
        self.point_checks_ = result.point_checks
        self.cumulative_cost_ = None
        return self

    def path(self, i: int, j: int):
        """The planned path for a verified pair (tour edges only)."""
        if not hasattr(self, "paths_"):
            raise NotFittedError("LazyTSP is not fitted yet; call fit(X) first")
        pair = (min(i, j), max(i, j))
        if pair not in self.paths_:
            raise ValueError(f"no planned path for pair {pair}; only tour edges are verified")
        path = self.paths_[pair]
        return path if i <= j else list(reversed(path))

    def tour_paths(self) -> list:
        if not hasattr(self, "paths_"):
            raise NotFittedError("LazyTSP is not fitted yet; call fit(X) first")
        seq = self.tour_.sequence
        return [self.path(seq[k], seq[(k + 1) % len(seq)]) for k in range(len(seq))]


_SFF_VARIANTS = {
    "sff-star": {"rewire": True, "use_queues": True},
    "nr-sff-star": {"rewire": False, "use_queues": True},
    "simple-sff": {"rewire": False, "use_queues": False},
}

PLANNER_NAMES = tuple(_SFF_VARIANTS) + ("multi-t-rrt", "lazy-tsp")


def parse_planner_name(name: str) -> tuple[str, int]:
    """Split a planner name string into (base name, restarts).

    ``multi-t-rrt-20`` means the multi-tree baseline run best-of-20.
    """
    if name in _SFF_VARIANTS or name in ("multi-t-rrt", "lazy-tsp"):
        return name, 1
    if name.startswith("multi-t-rrt-"):
        suffix = name[len("multi-t-rrt-"):]
        if suffix.isdigit() and int(suffix) >= 1:
            return "multi-t-rrt", int(suffix)
    raise ValueError(
        f"unknown planner {name!r}; expected one of {', '.join(PLANNER_NAMES)} "
        "or multi-t-rrt-<restarts>"
    )


def make_planner(name: str, workspace: Workspace, params: PlannerParams, random_state: int):
    """Build the estimator for a planner name from shared parameters.

    For the forest variants the name decides `rewire`/`use_queues`,
    overriding whatever `params` carries for those two flags.
    """
    base, restarts = parse_planner_name(name)
    if base in _SFF_VARIANTS:
        flags = _SFF_VARIANTS[base]
        return SpaceFillingForest(
            workspace=workspace,
            step=params.step,
            connect_radius=params.connect_radius,
            samples=params.samples,
            queue_bias=params.queue_bias,
            max_iterations=params.max_iterations,
            rewire=flags["rewire"],
            use_queues=flags["use_queues"],
            check_points=params.check_points,
            random_state=random_state,
        )
    if base == "multi-t-rrt":
        return MultiTreeRRT(
            workspace=workspace,
            step=params.step,
            connect_radius=params.connect_radius,
            max_iterations=params.max_iterations,
            check_points=params.check_points,
            restarts=restarts,
            random_state=random_state,
        )
    return LazyTSP(
        workspace=workspace,
        step=params.step,
        connect_radius=params.connect_radius,
        samples=params.samples,
        max_iterations=params.max_iterations,
        check_points=params.check_points,
        random_state=random_state,
    )
