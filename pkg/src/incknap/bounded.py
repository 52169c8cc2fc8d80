"""Inverse solver over the pruned family, plus the forward bounded solver.

The inverse problem asks for the minimum total weight achieving a profit
floor phi.  The restricted DP walks utilization vectors of the enumerated
family period by period; among final vectors clearing (1-3*eps)*phi in the
rounded-profit metric it keeps the lightest, which is super-optimal against
the exact inverse optimum while violating the floor by at most that factor.

The DP table is kept in integer-rescaled units (profits share the common
denominator (1/eps)**l_top, lambdas their own lcm) because all inner-loop
arithmetic then runs on plain ints; Fractions reappear only at the surface.
"""

from __future__ import annotations

import math
from bisect import bisect_left
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .classes import ClassInterval, ProfitClasses, build_classes, candidate_intervals
from .model import Instance, Solution, SuffixLambdas, objective
from .statespace import UtilizationVector, enumerate_family


class ChainNotMonotone(ValueError):
    pass


def check_internal_eps(eps: Fraction) -> Fraction:
    """Internal accuracy must be a unit fraction at most 1/5."""
    eps = Fraction(eps)
    if eps <= 0 or eps > Fraction(1, 5) or (1 / eps).denominator != 1:
        raise ValueError(f"internal eps must be 1/k with k >= 5, got {eps}")
    return eps


def rescaled_third(eps: Fraction) -> Fraction:
    """Wrapper accuracy: internal eps delivering a (1-eps) profit floor."""
    return Fraction(1, max(5, math.ceil(3 / Fraction(eps))))


@dataclass
class BoundedDPTable:
    """Restricted DP values per (period, family index), with backpointers.

    ``raw[t][j]`` holds the value scaled by ``value_den`` (None = unreachable);
    ``value`` converts back to the exact rounded-profit rational.
    """

    interval: ClassInterval
    family: list[UtilizationVector]
    raw: list[list[Optional[int]]]
    back: list[list[Optional[int]]]
    value_den: int

    def value(self, t: int, j: int) -> Optional[Fraction]:
        v = self.raw[t][j]
        return None if v is None else Fraction(v, self.value_den)

    def chain(self, j: int) -> list[tuple[int, ...]]:
        """Counts per period of the optimal path ending at family index j."""
        horizon = len(self.raw) - 1
        out: list[tuple[int, ...]] = []
        cur = j
        for t in range(horizon, 0, -1):
            out.append(self.family[cur].counts)
            cur = self.back[t][cur]
        out.reverse()
        return out


def _dominates(small: tuple[int, ...], big: tuple[int, ...]) -> bool:
    for a, b in zip(small, big):
        if a > b:
            return False
    return True


def dp_solve(
    classes: ProfitClasses,
    interval: ClassInterval,
    family: Sequence[UtilizationVector],
    capacities: Sequence[Fraction],
    suffix: SuffixLambdas,
) -> BoundedDPTable:
    """Run the family-restricted DP over the horizon.

    Transition: a vector extends any coordinatewise-smaller reachable vector,
    paying the marginal count difference at the period's suffix-lambda rate.
    The family is pre-sorted by total count so the predecessor scan can stop
    once predecessors outgrow the current vector.
    """
    q = int(1 / classes.eps)
    active = interval.active
    ltop = max(active) if active else 0
    rp_int = [(q + 1) ** l * q ** (ltop - l) for l in active]

    d_lam = math.lcm(*(v.denominator for v in suffix.values), 1)
    lam_int = [int(v * d_lam) for v in suffix.values]
    value_den = q**ltop * d_lam

    order = sorted(range(len(family)), key=lambda j: (sum(family[j].counts), family[j].counts))
    fam = [family[j] for j in order]
    counts = [v.counts for v in fam]
    sums = [sum(c) for c in counts]
    profits = [sum(r * c for r, c in zip(rp_int, v.counts)) for v in fam]
    weights = [v.weight for v in fam]

    zero = counts.index((0,) * len(active))
    horizon = len(capacities)
    raw: list[list[Optional[int]]] = [[None] * len(fam) for _ in range(horizon + 1)]
    back: list[list[Optional[int]]] = [[None] * len(fam) for _ in range(horizon + 1)]
    raw[0][zero] = 0

    for t in range(1, horizon + 1):
        lam = lam_int[t - 1]
        cap = capacities[t - 1]
        prev_row = raw[t - 1]
        # G value of each reachable predecessor, in family order (sums ascending)
        preds: list[tuple[int, int]] = []  # (family index, prev - lam*profit)
        for j, v in enumerate(prev_row):
            if v is not None:
                preds.append((j, v - lam * profits[j]))
        cur_row = raw[t]
        back_row = back[t]
        for j in range(len(fam)):
            if weights[j] > cap:
                continue
            s = sums[j]
            c = counts[j]
            best = None
            best_j = None
            for pj, g in preds:
                if sums[pj] > s:
                    break
                if _dominates(counts[pj], c) and (best is None or g > best):
                    best = g
                    best_j = pj
            if best is not None:
                cur_row[j] = lam * profits[j] + best
                back_row[j] = best_j
    return BoundedDPTable(interval=interval, family=fam, raw=raw, back=back, value_den=value_den)


def prefix_to_solution(
    classes: ProfitClasses,
    interval: ClassInterval,
    chain: Sequence[tuple[int, ...]],
    n_items: int,
) -> Solution:
    """Turn a nondecreasing count chain into introduction times.

    The k-th lightest item of a class enters at the first period whose count
    reaches k; items outside the chain's interval stay out.
    """
    for prev, cur in zip(chain, chain[1:]):
        if not _dominates(prev, cur):
            raise ChainNotMonotone(f"{prev} -> {cur}")
    intro: list[Optional[int]] = [None] * n_items
    for pos, level in enumerate(interval.active):
        members = classes.members[level]
        final = chain[-1][pos] if chain else 0
        for k in range(1, final + 1):
            for t, cts in enumerate(chain, start=1):
                if cts[pos] >= k:
                    intro[members[k - 1]] = t
                    break
    return Solution(tuple(intro))


@dataclass(frozen=True)
class InverseResult:
    """Inverse-solver outcome: a feasible solution plus its exact metrics."""

    solution: Solution
    rounded_profit: Fraction  # rounded-class metric, scaled back to true units
    true_profit: Fraction
    weight: Fraction


class InverseFrontier:
    """All Pareto-optimal (weight, rounded profit) endpoints of one instance.

    Built once per instance and accuracy; a profit requirement is then a
    binary search.  The frontier always contains the empty solution, so a
    query fails only when even the best value misses the threshold.
    """

    def __init__(self, instance: Instance, eps: Fraction):
        if instance.suffix_lambdas.values[-1] <= 0:
            raise ValueError("instance must be preprocessed: trailing lambdas are zero")
        self.instance = instance
        self.eps = check_internal_eps(eps)
        entries: list[tuple[Fraction, Fraction, Optional[BoundedDPTable], Optional[int]]] = [
            (Fraction(0), Fraction(0), None, None)
        ]
        if instance.n > 0:
            classes = build_classes(instance, self.eps)
            rho = instance.suffix_lambdas.ratio
            horizon = instance.horizon
            for interval in candidate_intervals(classes, self.eps, rho):
                item_weights = [
                    instance.items[i][1] for l in interval.active for i in classes.members[l]
                ]
                wrange = (min(item_weights), max(item_weights))
                family = enumerate_family(classes, interval, self.eps, wrange, len(item_weights))
                table = dp_solve(classes, interval, family, instance.capacities, instance.suffix_lambdas)
                for j in range(len(table.family)):
                    v = table.raw[horizon][j]
                    if v is None:
                        continue
                    value = classes.scale * Fraction(v, table.value_den)
                    entries.append((table.family[j].weight, value, table, j))
            self.classes = classes
        else:
            self.classes = None
        entries.sort(key=lambda e: (e[0], -e[1]))
        frontier = []
        best = None
        for e in entries:
            if best is None or e[1] > best:
                frontier.append(e)
                best = e[1]
        self._frontier = frontier
        self._values = [e[1] for e in frontier]
        self._cache: dict[int, InverseResult] = {}

    def query(self, phi: Fraction) -> Optional[InverseResult]:
        """Lightest endpoint whose rounded profit clears (1-3*eps)*phi."""
        if phi < 0:
            raise ValueError("profit requirement must be nonnegative")
        threshold = (1 - 3 * self.eps) * Fraction(phi)
        idx = bisect_left(self._values, threshold)
        if idx == len(self._frontier):
            return None
        if idx not in self._cache:
            weight, value, table, j = self._frontier[idx]
            if table is None:
                solution = Solution.empty(self.instance.n)
            else:
                solution = prefix_to_solution(
                    self.classes, table.interval, table.chain(j), self.instance.n
                )
            self._cache[idx] = InverseResult(
                solution=solution,
                rounded_profit=value,
                true_profit=objective(self.instance, solution),
                weight=weight,
            )
        return self._cache[idx]


def solve_inverse(instance: Instance, phi: Fraction, eps: Fraction) -> Optional[InverseResult]:
    """Super-optimal inverse solve: weight never above the exact optimum's,
    true profit at least (1-3*eps)*phi.  None signals an infeasible floor."""
    return InverseFrontier(instance, eps).query(phi)


def solve_bounded(instance: Instance, eps: Fraction) -> Solution:
    """Forward solver for preprocessed instances: sweep a geometric profit
    grid through the inverse solver and keep the most profitable answer.

    The grid spans [lambda_min * p_min, n * lambda_max * p_max] with the
    widest reading of the endpoint coefficients (plain lambdas or suffix
    sums), plus the zero requirement.
    """
    eps = check_internal_eps(eps)
    if instance.n == 0:
        return Solution.empty(0)
    frontier = InverseFrontier(instance, eps)
    profits = [p for p, _ in instance.items]
    # widest grid reading; a zero coefficient cannot anchor a geometric grid
    lam_lo = min(v for v in instance.lambdas if v > 0)
    lam_hi = instance.suffix_lambdas.values[0]
    lo = lam_lo * min(profits)
    hi = instance.n * lam_hi * max(profits)
    grid = [Fraction(0)]
    v = lo
    while v <= hi:
        grid.append(v)
        v *= 1 + eps
    best_profit = Fraction(0)
    best = Solution.empty(instance.n)
    for phi in grid:
        res = frontier.query(phi)
        if res is not None and res.true_profit > best_profit:
            best_profit = res.true_profit
            best = res.solution
    return best
