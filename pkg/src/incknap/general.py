"""Full approximation scheme: clustering, cluster DP, and solution gluing.

Periods are grouped into geometric bands of the suffix-lambda value; under a
derandomized offset xi, every 1/eps-th band is discarded and the remaining
maximal runs form clusters whose internal suffix ratio is small enough for
the bounded inverse solver.  A near-optimal solution then assigns disjoint,
order-aligned profit-class ranges to clusters (uncrossing stars), which a
minimum-weight DP over (cluster, top class, accumulated profit) recovers on
a discretized profit grid.  The per-cluster subproblems are inverse solves
with capacities reduced by the weight already committed below.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .bounded import InverseFrontier, InverseResult, rescaled_third
from .classes import ProfitClasses, build_classes
from .model import (
    AllLambdasZero,
    Instance,
    Solution,
    check_feasible,
    objective,
    preprocess,
    remap_solution,
    validate,
)


class EmptyCluster(ValueError):
    pass


class NoFeasibleState(RuntimeError):
    pass


@dataclass(frozen=True)
class ClusterPlan:
    """Band index per period plus the clusters surviving offset xi."""

    xi: int
    inv_eps: int
    interval_of: tuple[int, ...]  # 1-based band index per period
    clusters: tuple[tuple[int, ...], ...]

    @property
    def num_clusters(self) -> int:
        return len(self.clusters)

    def is_bad(self, interval_index: int) -> bool:
        return interval_index % self.inv_eps == self.xi

    def cluster_of_period(self, t: int) -> Optional[int]:
        """1-based cluster index containing period t, if any."""
        for m, periods in enumerate(self.clusters, start=1):
            if t in periods:
                return m
        return None


def build_plan(instance: Instance, eps: Fraction, xi: int) -> ClusterPlan:
    """Assign periods to geometric suffix-lambda bands and form clusters.

    Band m collects periods whose suffix value lies in
    ((eps/n)^m, (eps/n)^(m-1)] times the first suffix value.  Bands with
    index xi modulo 1/eps are dropped; maximal runs of surviving bands whose
    periods are non-empty become the clusters, in period order.
    """
    inv_eps = int(1 / eps)
    if not 0 <= xi < inv_eps:
        raise ValueError(f"xi must lie in [0, {inv_eps - 1}]")
    if instance.n == 0:
        return ClusterPlan(xi=xi, inv_eps=inv_eps, interval_of=(), clusters=())
    suffix = instance.suffix_lambdas
    shrink = eps / instance.n
    first = suffix.values[0]
    interval_of = []
    for t in range(1, instance.horizon + 1):
        m = 1
        bound = shrink * first
        while suffix.at(t) <= bound:
            bound *= shrink
            m += 1
        interval_of.append(m)

    by_band: dict[int, list[int]] = {}
    for t, m in enumerate(interval_of, start=1):
        by_band.setdefault(m, []).append(t)

    clusters: list[tuple[int, ...]] = []
    run: list[int] = []
    for m in range(1, max(by_band) + 1):
        if m % inv_eps == xi:
            if run:
                clusters.append(tuple(run))
            run = []
        else:
            run.extend(by_band.get(m, ()))
    if run:
        clusters.append(tuple(run))
    return ClusterPlan(xi=xi, inv_eps=inv_eps, interval_of=tuple(interval_of), clusters=tuple(clusters))


def drop_bad_periods(plan: ClusterPlan, solution: Solution) -> Solution:
    """Delete every item introduced in a period of a dropped band."""
    return Solution(
        tuple(
            None if t is not None and plan.is_bad(plan.interval_of[t - 1]) else t
            for t in solution.intro
        )
    )


@dataclass(frozen=True)
class ProfitGrid:
    """Geometric profit discretization: 0 plus delta*(1+eps/M)^k."""

    delta: Fraction
    values: tuple[Fraction, ...]


def build_grid(eps: Fraction, num_clusters: int, lam_last: Fraction, p_max: Fraction, psi_cap: Fraction) -> ProfitGrid:
    """Grid from delta = eps/M * lambda_T * p_max up to the profit ceiling.

    The top exponent is chosen exactly so the grid covers every achievable
    profit (suffix-lambda of period 1 times the total profit mass); a cap
    short of that would silently truncate the DP's reachable states.
    """
    delta = eps / num_clusters * lam_last * p_max
    values = [Fraction(0)]
    step = 1 + eps / num_clusters
    v = delta
    while True:
        values.append(v)
        if v >= psi_cap:
            break
        v *= step
    return ProfitGrid(delta=delta, values=tuple(values))


@dataclass(frozen=True)
class SingleClusterInstance:
    """One cluster's inverse subproblem, with maps back to the parent."""

    instance: Instance
    item_ids: tuple[int, ...]  # local item -> parent item
    periods: tuple[int, ...]  # local period -> parent period


def single_cluster_instance(
    parent: Instance,
    classes: ProfitClasses,
    plan: ClusterPlan,
    m: int,
    class_lo: int,
    class_hi: int,
    omega: Fraction,
) -> SingleClusterInstance:
    """Restrict to cluster m's periods and classes [class_lo, class_hi].

    Capacities shrink by the weight omega committed in earlier clusters.
    The local lambda of a cluster period covers the stretch up to the next
    cluster period (the last one takes the whole tail), so local suffix
    values equal the parent's and profit accounting stays exact across the
    final gluing.
    """
    if omega < 0:
        raise ValueError("omega must be nonnegative")
    periods = plan.clusters[m - 1] if 1 <= m <= plan.num_clusters else ()
    if not periods:
        raise EmptyCluster(f"cluster {m} has no periods")
    item_ids = tuple(
        i
        for level in sorted(classes.members)
        if class_lo <= level <= class_hi
        for i in classes.members[level]
    )
    item_ids = tuple(sorted(item_ids))
    suffix = parent.suffix_lambdas
    lambdas = []
    for idx, t in enumerate(periods):
        if idx + 1 < len(periods):
            lambdas.append(suffix.at(t) - suffix.at(periods[idx + 1]))
        else:
            lambdas.append(suffix.at(t))
    sub = Instance(
        items=tuple(parent.items[i] for i in item_ids),
        capacities=tuple(max(parent.capacities[t - 1] - omega, Fraction(0)) for t in periods),
        lambdas=tuple(lambdas),
    )
    return SingleClusterInstance(instance=sub, item_ids=item_ids, periods=periods)


@dataclass
class ClusterDPTable:
    """Lazily evaluated min-weight table over (cluster, class, grid profit)."""

    instance: Instance
    classes: ProfitClasses
    plan: ClusterPlan
    grid: ProfitGrid
    eps: Fraction

    def __post_init__(self):
        self._values: dict[tuple[int, int, int], Optional[Fraction]] = {}
        self._back: dict[tuple[int, int, int], tuple[int, int, InverseResult, SingleClusterInstance]] = {}
        self._frontiers: dict[
            tuple[int, int, int, Fraction], tuple[InverseFrontier, SingleClusterInstance]
        ] = {}
        self._sub_eps = rescaled_third(self.eps)
        self._ell_states = (-1,) + self.classes.indices

    def _frontier(self, m: int, lo: int, hi: int, omega: Fraction) -> tuple[InverseFrontier, SingleClusterInstance]:
        key = (m, lo, hi, omega)
        if key not in self._frontiers:
            sub = single_cluster_instance(self.instance, self.classes, self.plan, m, lo, hi, omega)
            self._frontiers[key] = (InverseFrontier(sub.instance, self._sub_eps), sub)
        return self._frontiers[key]

    def value(self, m: int, ell: int, phi_idx: int) -> Optional[Fraction]:
        """Minimum achievable weight, or None when the state is infeasible."""
        phi = self.grid.values[phi_idx]
        if phi == 0:
            return Fraction(0)
        if m == 0 or ell == -1:
            return None
        key = (m, ell, phi_idx)
        if key in self._values:
            return self._values[key]
        self._values[key] = None  # cycle guard; states only reference m-1
        step = 1 + self.eps / self.plan.num_clusters
        best: Optional[Fraction] = None
        best_back = None
        for ell_prev in (l for l in self._ell_states if l <= ell):
            for idx_prev in range(phi_idx + 1):
                prev = self.value(m - 1, ell_prev, idx_prev)
                if prev is None:
                    continue
                phi_prev = self.grid.values[idx_prev]
                phi_req = phi - step * phi_prev - self.grid.delta
                if phi_req < 0:
                    phi_req = Fraction(0)
                frontier, sub = self._frontier(m, ell_prev + 1, ell, prev)
                res = frontier.query(phi_req)
                if res is None:
                    continue
                cand = prev + res.weight
                if best is None or cand < best:
                    best = cand
                    best_back = (ell_prev, idx_prev, res, sub)
        self._values[key] = best
        if best_back is not None:
            self._back[key] = best_back
        return best

    def backpointer(self, m: int, ell: int, phi_idx: int):
        return self._back.get((m, ell, phi_idx))


def cluster_dp(
    instance: Instance,
    classes: ProfitClasses,
    plan: ClusterPlan,
    grid: ProfitGrid,
    eps: Fraction,
) -> ClusterDPTable:
    """Build the lazy cluster DP; states are evaluated on demand."""
    if plan.num_clusters < 1:
        raise ValueError("plan must contain at least one cluster")
    return ClusterDPTable(instance=instance, classes=classes, plan=plan, grid=grid, eps=eps)


def glue(plan: ClusterPlan, table: ClusterDPTable, n_items: int) -> tuple[Solution, Fraction]:
    """Trace back from the most profitable feasible final state.

    Each traversed backpointer contributes one single-cluster solution; the
    union over clusters, re-indexed to parent periods and items, is the
    glued solution.  Returns it with the certified grid profit.
    """
    top = max(table.classes.indices)
    grid = table.grid
    target_idx = None
    for idx in range(len(grid.values) - 1, -1, -1):
        if table.value(plan.num_clusters, top, idx) is not None:
            target_idx = idx
            break
    if target_idx is None:
        raise NoFeasibleState("zero-profit state missing; grid must contain 0")
    intro: list[Optional[int]] = [None] * n_items
    m, ell, idx = plan.num_clusters, top, target_idx
    while m >= 1 and grid.values[idx] > 0:
        ptr = table.backpointer(m, ell, idx)
        if ptr is None:
            break
        ell_prev, idx_prev, res, sub = ptr
        for local_item, local_t in res.solution.introduced():
            intro[sub.item_ids[local_item]] = sub.periods[local_t - 1]
        m, ell, idx = m - 1, ell_prev, idx_prev
    return Solution(tuple(intro)), grid.values[target_idx]


def star_graph_edges(
    classes: ProfitClasses, plan: ClusterPlan, solution: Solution
) -> set[tuple[int, int]]:
    """Bipartite (cluster, class) edges induced by a solution's introductions."""
    item_class = {i: l for l, ids in classes.members.items() for i in ids}
    edges = set()
    for i, t in solution.introduced():
        m = plan.cluster_of_period(t)
        if m is None:
            raise ValueError(f"item {i} introduced outside every cluster (period {t})")
        edges.add((m, item_class[i]))
    return edges


def audit_uncrossing(edges: set[tuple[int, int]]) -> bool:
    """Class degrees at most one and no crossing pair across clusters."""
    by_class: dict[int, set[int]] = {}
    for m, level in edges:
        by_class.setdefault(level, set()).add(m)
    if any(len(ms) > 1 for ms in by_class.values()):
        return False
    ordered = sorted((level, next(iter(ms))) for level, ms in by_class.items())
    return all(a[1] <= b[1] for a, b in zip(ordered, ordered[1:]))


@dataclass(frozen=True)
class GeneralResult:
    """Winning solution plus the diagnostics of the offset that produced it."""

    solution: Solution  # over the original instance
    profit: Fraction
    eps_int: Fraction
    xi: Optional[int]
    plan: Optional[ClusterPlan]
    grid: Optional[ProfitGrid]
    phi_target: Optional[Fraction]
    classes: Optional[ProfitClasses]
    core_instance: Optional[Instance]  # preprocessed, unfittable items removed
    core_solution: Optional[Solution]


def internal_eps(eps_public: Fraction) -> Fraction:
    """Rescale a public accuracy so the (1-7*eps) end bound meets it."""
    eps_public = Fraction(eps_public)
    if eps_public <= 0:
        raise ValueError("eps must be positive")
    return Fraction(1, max(5, math.ceil(7 / eps_public)))


def solve_detailed(instance: Instance, eps_public: Fraction) -> GeneralResult:
    """Run every offset xi, solve each distinct plan once, keep the best."""
    validate(instance)
    eps = internal_eps(eps_public)
    empty = GeneralResult(
        solution=Solution.empty(instance.n),
        profit=Fraction(0),
        eps_int=eps,
        xi=None,
        plan=None,
        grid=None,
        phi_target=None,
        classes=None,
        core_instance=None,
        core_solution=None,
    )
    try:
        pre, remap = preprocess(instance)
    except AllLambdasZero:
        return empty

    # Items heavier than the final capacity can never be introduced; dropping
    # them keeps delta = eps/M * lambda_T * p_max below eps/M times the optimum.
    fit_ids = tuple(i for i, (_, w) in enumerate(pre.items) if w <= pre.capacities[-1])
    if not fit_ids:
        return empty
    core = Instance(
        items=tuple(pre.items[i] for i in fit_ids),
        capacities=pre.capacities,
        lambdas=pre.lambdas,
    )
    classes = build_classes(core, eps)
    profits = [p for p, _ in core.items]
    p_max = max(profits)
    psi_cap = core.suffix_lambdas.values[0] * sum(profits)

    best: Optional[GeneralResult] = None
    seen_plans: set[tuple[tuple[int, ...], ...]] = set()
    for xi in range(int(1 / eps)):
        plan = build_plan(core, eps, xi)
        if plan.clusters in seen_plans:
            continue
        seen_plans.add(plan.clusters)
        if plan.num_clusters == 0:
            candidate = empty
        else:
            grid = build_grid(eps, plan.num_clusters, core.lambdas[-1], p_max, psi_cap)
            table = cluster_dp(core, classes, plan, grid, eps)
            core_solution, phi_target = glue(plan, table, core.n)
            assert check_feasible(core, core_solution) is None
            intro_pre: list[Optional[int]] = [None] * pre.n
            for j, t in core_solution.introduced():
                intro_pre[fit_ids[j]] = t
            pre_solution = Solution(tuple(intro_pre))
            candidate = GeneralResult(
                solution=remap_solution(pre_solution, remap),
                profit=objective(core, core_solution),
                eps_int=eps,
                xi=xi,
                plan=plan,
                grid=grid,
                phi_target=phi_target,
                classes=classes,
                core_instance=core,
                core_solution=core_solution,
            )
        if best is None or candidate.profit > best.profit:
            best = candidate
    assert best is not None
    return best


def solve(instance: Instance, eps_public: Fraction) -> Solution:
    """Approximate the optimum within factor (1 - eps_public)."""
    return solve_detailed(instance, eps_public).solution
