"""Instance/solution data model for the incremental knapsack problem.

An instance packs n items (profit, weight) into a knapsack whose capacity
grows over T periods; items, once introduced, stay.  The objective weights
each period's packed profit by a nonnegative coefficient, so a solution is
fully described by one introduction period (or NEVER) per item.

All scalars are exact rationals (fractions.Fraction).  Floating point is
never used: the solvers rely on exact weight comparisons and exact
super-optimality statements that are meaningless under rounding error.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Optional, Sequence

#: Introduction time of an item that is never packed.
NEVER = None


class ValidationError(ValueError):
    """An instance violates a structural invariant.

    ``index`` is the first offending 1-based period or 0-based item index.
    """

    def __init__(self, message: str, index: int):
        super().__init__(f"{message} (index {index})")
        self.index = index


class NonPositiveProfit(ValidationError):
    pass


class NonPositiveWeight(ValidationError):
    pass


class DecreasingCapacity(ValidationError):
    pass


class NegativeCapacity(ValidationError):
    pass


class NegativeLambda(ValidationError):
    pass


class EmptyHorizon(ValidationError):
    pass


class HorizonMismatch(ValidationError):
    pass


class AllLambdasZero(ValueError):
    """Every period coefficient is zero; only the empty solution has value."""


class InfeasibleSolution(ValueError):
    def __init__(self, period: int):
        super().__init__(f"capacity exceeded at period {period}")
        self.period = period


class ItemNotIntroduced(ValueError):
    def __init__(self, item: int):
        super().__init__(f"item {item} is never introduced")
        self.item = item


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


@dataclass(frozen=True)
class SuffixLambdas:
    """Suffix sums lam[t-1] = sum of lambda_t..lambda_T, nonincreasing in t."""

    values: tuple[Fraction, ...]

    def at(self, t: int) -> Fraction:
        """Suffix sum at 1-based period t."""
        return self.values[t - 1]

    @property
    def ratio(self) -> Fraction:
        """Boundedness ratio: first suffix over last suffix."""
        return self.values[0] / self.values[-1]


@dataclass(frozen=True)
class Instance:
    """Immutable problem instance; safe to share across solver tasks."""

    items: tuple[tuple[Fraction, Fraction], ...]  # (profit, weight)
    capacities: tuple[Fraction, ...]
    lambdas: tuple[Fraction, ...]

    @staticmethod
    def build(items: Sequence[tuple], capacities: Sequence, lambdas: Sequence) -> "Instance":
        """Coerce arbitrary rational-like scalars into an Instance."""
        return Instance(
            items=tuple((_frac(p), _frac(w)) for p, w in items),
            capacities=tuple(_frac(c) for c in capacities),
            lambdas=tuple(_frac(v) for v in lambdas),
        )

    @property
    def n(self) -> int:
        return len(self.items)

    @property
    def horizon(self) -> int:
        return len(self.capacities)

    @cached_property
    def suffix_lambdas(self) -> SuffixLambdas:
        values = []
        acc = Fraction(0)
        for v in reversed(self.lambdas):
            acc += v
            values.append(acc)
        return SuffixLambdas(tuple(reversed(values)))


@dataclass(frozen=True)
class Solution:
    """Introduction period per item (1-based), or NEVER.

    The induced sets S_t = {i : intro[i] <= t} are nested by construction,
    so only the capacity constraints need checking.
    """

    intro: tuple[Optional[int], ...]

    @staticmethod
    def empty(n: int) -> "Solution":
        return Solution((NEVER,) * n)

    def introduced(self):
        """Yield (item, period) for every introduced item."""
        for i, t in enumerate(self.intro):
            if t is not None:
                yield i, t

    def weights_by_period(self, instance: Instance) -> tuple[Fraction, ...]:
        """Total packed weight at each period (cumulative)."""
        horizon = instance.horizon
        added = [Fraction(0)] * (horizon + 1)
        for i, t in self.introduced():
            added[t] += instance.items[i][1]
        out = []
        acc = Fraction(0)
        for t in range(1, horizon + 1):
            acc += added[t]
            out.append(acc)
        return tuple(out)


def validate(instance: Instance) -> None:
    """Raise a ValidationError naming the first offending index, else return."""
    if instance.horizon < 1:
        raise EmptyHorizon("horizon must contain at least one period", 0)
    if len(instance.lambdas) != instance.horizon:
        raise HorizonMismatch("capacities and lambdas differ in length", 0)
    for i, (p, w) in enumerate(instance.items):
        if p <= 0:
            raise NonPositiveProfit("item profit must be positive", i)
        if w <= 0:
            raise NonPositiveWeight("item weight must be positive", i)
    for t, cap in enumerate(instance.capacities, start=1):
        if cap < 0:
            raise NegativeCapacity("capacity must be nonnegative", t)
        if t > 1 and cap < instance.capacities[t - 2]:
            raise DecreasingCapacity("capacities must be nondecreasing", t)
    for t, lam in enumerate(instance.lambdas, start=1):
        if lam < 0:
            raise NegativeLambda("lambda must be nonnegative", t)


def preprocess(instance: Instance) -> tuple[Instance, tuple[int, ...]]:
    """Drop zero-lambda periods; they never contribute to the objective.

    Returns the reduced instance plus a remap: remap[k-1] is the original
    period of reduced period k.  Raises AllLambdasZero when nothing remains.
    """
    keep = [t for t in range(1, instance.horizon + 1) if instance.lambdas[t - 1] > 0]
    if not keep:
        raise AllLambdasZero("no period with positive lambda")
    if len(keep) == instance.horizon:
        return instance, tuple(keep)
    reduced = Instance(
        items=instance.items,
        capacities=tuple(instance.capacities[t - 1] for t in keep),
        lambdas=tuple(instance.lambdas[t - 1] for t in keep),
    )
    return reduced, tuple(keep)


def remap_solution(solution: Solution, remap: tuple[int, ...]) -> Solution:
    """Translate a reduced-horizon solution back to original periods."""
    return Solution(tuple(None if t is None else remap[t - 1] for t in solution.intro))


def check_feasible(instance: Instance, solution: Solution) -> Optional[int]:
    """Return None when every period's capacity holds, else the first bad period."""
    weights = solution.weights_by_period(instance)
    for t in range(1, instance.horizon + 1):
        if weights[t - 1] > instance.capacities[t - 1]:
            return t
    return None


def objective(instance: Instance, solution: Solution) -> Fraction:
    """Lambda-averaged profit: sum over periods of lambda_t * packed profit."""
    bad = check_feasible(instance, solution)
    if bad is not None:
        raise InfeasibleSolution(bad)
    horizon = instance.horizon
    added = [Fraction(0)] * (horizon + 1)
    for i, t in solution.introduced():
        added[t] += instance.items[i][0]
    total = Fraction(0)
    packed = Fraction(0)
    for t in range(1, horizon + 1):
        packed += added[t]
        total += instance.lambdas[t - 1] * packed
    return total


def objective_by_contributions(instance: Instance, solution: Solution) -> Fraction:
    """Equivalent objective form: sum of p_i times the lambda suffix at intro.

    Kept as an independent computation; the two forms must agree exactly.
    """
    bad = check_feasible(instance, solution)
    if bad is not None:
        raise InfeasibleSolution(bad)
    suffix = instance.suffix_lambdas
    return sum(
        (instance.items[i][0] * suffix.at(t) for i, t in solution.introduced()),
        Fraction(0),
    )


def item_contribution(instance: Instance, solution: Solution, item: int) -> Fraction:
    """Contribution p_i * suffix-lambda at the item's introduction period."""
    t = solution.intro[item]
    if t is None:
        raise ItemNotIntroduced(item)
    return instance.items[item][0] * instance.suffix_lambdas.at(t)
