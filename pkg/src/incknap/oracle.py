"""Brute-force exact solvers for desk-scale verification.

Every solver here enumerates the full assignment space (one introduction
period or NEVER per item), so results are ground truth the approximation
pipeline is checked against.  Internally all scalars are rescaled to
integers (exactness preserved) because Python int arithmetic is an order of
magnitude faster than Fraction churn in these inner loops.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .classes import ClassInterval, ProfitClasses, prefix_weight
from .model import Instance, Solution

DEFAULT_BUDGET = 2_000_000


class BudgetExceeded(RuntimeError):
    def __init__(self, required: int, budget: int):
        super().__init__(f"enumeration of {required} states exceeds budget {budget}")
        self.required = required
        self.budget = budget


@dataclass
class _Scaled:
    """Instance rescaled to integer weights/capacities and contributions."""

    contrib: list[list[int]]  # contrib[i][t-1] = scaled p_i * suffix_lambda(t)
    weights: list[int]
    caps: list[int]
    profit_den: int  # divide integer profit by this to recover the Fraction
    weight_den: int


def _scale(instance: Instance) -> _Scaled:
    suffix = instance.suffix_lambdas.values
    d_profit = math.lcm(
        *(p.denominator for p, _ in instance.items),
        *(s.denominator for s in suffix),
        1,
    )
    d_weight = math.lcm(
        *(w.denominator for _, w in instance.items),
        *(c.denominator for c in instance.capacities),
        1,
    )
    contrib = [
        [int(p * s * d_profit) for s in suffix]
        for p, _ in instance.items
    ]
    weights = [int(w * d_weight) for _, w in instance.items]
    caps = [int(c * d_weight) for c in instance.capacities]
    return _Scaled(contrib, weights, caps, d_profit, d_weight)


def _check_budget(instance: Instance, budget: int) -> None:
    required = (instance.horizon + 1) ** instance.n
    if required > budget:
        raise BudgetExceeded(required, budget)


def exact_opt(instance: Instance, budget: int = DEFAULT_BUDGET) -> tuple[Fraction, Solution]:
    """Maximum objective over all feasible assignments, ties lexicographic.

    NEVER sorts after every period when comparing assignment vectors, so the
    reported optimum is deterministic for golden tests.
    """
    _check_budget(instance, budget)
    horizon = instance.horizon
    sc = _scale(instance)
    best_profit: Optional[int] = None
    best_intro: tuple[Optional[int], ...] = (None,) * instance.n
    cur: list[Optional[int]] = [None] * instance.n
    cum = [0] * (horizon + 1)  # cum[t] = packed weight at period t

    def rec(i: int, profit: int) -> None:
        nonlocal best_profit, best_intro
        if i == instance.n:
            if best_profit is None or profit > best_profit:
                best_profit = profit
                best_intro = tuple(cur)
            return
        w = sc.weights[i]
        for t in range(1, horizon + 1):
            ok = True
            for tau in range(t, horizon + 1):
                if cum[tau] + w > sc.caps[tau - 1]:
                    ok = False
                    break
            if ok:
                for tau in range(t, horizon + 1):
                    cum[tau] += w
                cur[i] = t
                rec(i + 1, profit + sc.contrib[i][t - 1])
                cur[i] = None
                for tau in range(t, horizon + 1):
                    cum[tau] -= w
        rec(i + 1, profit)

    rec(0, 0)
    return Fraction(best_profit or 0, sc.profit_den), Solution(best_intro)


def exact_inverse(
    instance: Instance, phi: Fraction, budget: int = DEFAULT_BUDGET
) -> Optional[tuple[Fraction, Solution]]:
    """Minimum total weight achieving objective >= phi, or None if impossible."""
    _check_budget(instance, budget)
    horizon = instance.horizon
    sc = _scale(instance)
    phi_scaled = Fraction(phi) * sc.profit_den
    best_weight: Optional[int] = None
    best_intro: tuple[Optional[int], ...] = (None,) * instance.n
    cur: list[Optional[int]] = [None] * instance.n
    cum = [0] * (horizon + 1)

    def rec(i: int, profit: int) -> None:
        nonlocal best_weight, best_intro
        if best_weight is not None and cum[horizon] >= best_weight:
            return
        if i == instance.n:
            if profit >= phi_scaled:
                best_weight = cum[horizon]
                best_intro = tuple(cur)
            return
        w = sc.weights[i]
        for t in range(1, horizon + 1):
            ok = True
            for tau in range(t, horizon + 1):
                if cum[tau] + w > sc.caps[tau - 1]:
                    ok = False
                    break
            if ok:
                for tau in range(t, horizon + 1):
                    cum[tau] += w
                cur[i] = t
                rec(i + 1, profit + sc.contrib[i][t - 1])
                cur[i] = None
                for tau in range(t, horizon + 1):
                    cum[tau] -= w
        rec(i + 1, profit)

    rec(0, 0)
    if best_weight is None:
        return None
    return Fraction(best_weight, sc.weight_den), Solution(best_intro)


def exact_restricted_dp(
    instance: Instance,
    classes: ProfitClasses,
    interval: ClassInterval,
    budget: int = DEFAULT_BUDGET,
) -> dict[tuple[int, tuple[int, ...]], Optional[Fraction]]:
    """Exact DP over ALL prefix-like count vectors of the interval's classes.

    Value of (t, counts) is the maximum rounded-profit contribution of a
    feasible t-period chain ending at that vector, or None when unreachable.
    This is the unpruned reference the family-restricted DP is compared to.
    """
    sizes = [classes.size(l) for l in interval.active]
    required = 1
    for s in sizes:
        required *= s + 1
    if required > budget:
        raise BudgetExceeded(required, budget)

    vectors: list[tuple[int, ...]] = [()]
    for s in sizes:
        vectors = [v + (k,) for v in vectors for k in range(s + 1)]

    def weight(counts: tuple[int, ...]) -> Fraction:
        return sum(
            (prefix_weight(classes, l, 1, c) for l, c in zip(interval.active, counts) if c),
            Fraction(0),
        )

    def rounded(counts: tuple[int, ...]) -> Fraction:
        return sum(
            (classes.rounded_profit(l) * c for l, c in zip(interval.active, counts) if c),
            Fraction(0),
        )

    weights = {v: weight(v) for v in vectors}
    profits = {v: rounded(v) for v in vectors}
    suffix = instance.suffix_lambdas

    table: dict[tuple[int, tuple[int, ...]], Optional[Fraction]] = {}
    for v in vectors:
        table[(0, v)] = Fraction(0) if all(c == 0 for c in v) else None
    for t in range(1, instance.horizon + 1):
        lam = suffix.at(t)
        cap = instance.capacities[t - 1]
        for v in vectors:
            if weights[v] > cap:
                table[(t, v)] = None
                continue
            best: Optional[Fraction] = None
            for u in vectors:
                if table[(t - 1, u)] is None:
                    continue
                if all(a <= b for a, b in zip(u, v)):
                    cand = table[(t - 1, u)] + lam * (profits[v] - profits[u])
                    if best is None or cand > best:
                        best = cand
            table[(t, v)] = best
    return table
