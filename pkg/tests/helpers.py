"""Shared builders for the test suite.

The brute-force helpers here are deliberately written from the raw instance
numbers (plain loops over periods and items) so they stay independent of
the library code they check.
"""

from __future__ import annotations

import itertools
import random
from fractions import Fraction
from typing import Optional

from incknap.model import Instance, Solution


def e1() -> Instance:
    """Two items (p=2,w=1),(p=3,w=2), capacities (2,3), unit lambdas."""
    return Instance.build(items=[(2, 1), (3, 2)], capacities=[2, 3], lambdas=[1, 1])


def brute_profit(instance: Instance, intro: tuple[Optional[int], ...]) -> Optional[Fraction]:
    """Objective by direct definition, or None when infeasible."""
    total = Fraction(0)
    for t in range(1, instance.horizon + 1):
        weight = Fraction(0)
        profit = Fraction(0)
        for i, ti in enumerate(intro):
            if ti is not None and ti <= t:
                profit += instance.items[i][0]
                weight += instance.items[i][1]
        if weight > instance.capacities[t - 1]:
            return None
        total += instance.lambdas[t - 1] * profit
    return total


def brute_all_assignments(instance: Instance):
    """Yield every intro tuple over periods 1..T plus NEVER."""
    choices = list(range(1, instance.horizon + 1)) + [None]
    yield from itertools.product(choices, repeat=instance.n)


def brute_opt(instance: Instance) -> Fraction:
    """Exhaustive maximum objective, straight from the definition."""
    best = Fraction(0)
    for intro in brute_all_assignments(instance):
        value = brute_profit(instance, intro)
        if value is not None and value > best:
            best = value
    return best


def brute_inverse(instance: Instance, phi: Fraction) -> Optional[Fraction]:
    """Exhaustive minimum weight meeting the profit floor, or None."""
    best = None
    for intro in brute_all_assignments(instance):
        value = brute_profit(instance, intro)
        if value is None or value < phi:
            continue
        weight = sum(
            (instance.items[i][1] for i, t in enumerate(intro) if t is not None),
            Fraction(0),
        )
        if best is None or weight < best:
            best = weight
    return best


def random_instance(
    rng: random.Random,
    n_max: int = 7,
    t_max: int = 3,
    positive_lambdas: bool = True,
) -> Instance:
    n = rng.randint(1, n_max)
    t = rng.randint(1, t_max)
    items = [(rng.randint(1, 10), rng.randint(1, 10)) for _ in range(n)]
    caps = []
    acc = 0
    for _ in range(t):
        acc += rng.randint(1, 10)
        caps.append(acc)
    low = 1 if positive_lambdas else 0
    lambdas = [rng.randint(low, 5) for _ in range(t)]
    if not positive_lambdas and all(v == 0 for v in lambdas):
        lambdas[-1] = 1
    return Instance.build(items=items, capacities=caps, lambdas=lambdas)


def class_structure(*weight_lists, eps=Fraction(1, 5)):
    """Instance whose profits land exactly on consecutive powers of 1+eps,
    so class membership is fixed by construction."""
    from incknap.classes import build_classes, make_interval

    items = []
    for level, weights in enumerate(weight_lists):
        for w in weights:
            items.append(((1 + eps) ** level, w))
    cap = sum(Fraction(w) for _, w in items) if items else Fraction(1)
    instance = Instance.build(items=items, capacities=[cap], lambdas=[1])
    classes = build_classes(instance, eps)
    interval = make_interval(classes, 0, len(weight_lists) - 1)
    return instance, classes, interval


def random_class_structure(rng: random.Random, eps: Fraction, max_classes=4, max_items=12):
    weight_lists = [
        [rng.randint(1, 10) for _ in range(rng.randint(1, max_items))]
        for _ in range(rng.randint(1, max_classes))
    ]
    return class_structure(*weight_lists, eps=eps)


def random_vector_pair(rng: random.Random, classes, interval):
    """Coordinatewise-ordered random count pair over the interval."""
    hi = [classes.size(l) for l in interval.active]
    big = tuple(rng.randint(0, h) for h in hi)
    small = tuple(rng.randint(0, b) for b in big)
    return small, big


def random_feasible_solution(rng: random.Random, instance: Instance) -> Solution:
    """Random intro map kept feasible by greedy acceptance."""
    intro: list[Optional[int]] = [None] * instance.n
    for i in rng.sample(range(instance.n), instance.n):
        t = rng.randint(1, instance.horizon + 1)
        if t > instance.horizon:
            continue
        intro[i] = t
        if brute_profit(instance, tuple(intro)) is None:
            intro[i] = None
    return Solution(tuple(intro))
