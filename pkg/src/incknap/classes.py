"""Profit classes: geometric rounding of profits and weight-sorted prefixes.

Profits are scaled so the minimum becomes 1 and rounded down to powers of
(1+eps).  Items of equal rounded profit form a class, kept sorted by weight
with exact prefix sums, so the lightest k items of a class are O(1) to
weigh.  Near-optimal solutions only need a short interval of classes; the
candidate intervals enumerated here turn that existence statement into a
search.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .model import Instance


class ClassIndexOutOfRange(ValueError):
    pass


class CountOutOfRange(ValueError):
    pass


@dataclass(frozen=True)
class ProfitClasses:
    """Sparse map from class index to its weight-sorted items.

    members[l] lists item indices by nondecreasing weight (ties by index);
    prefix[l][k] is the exact weight of the k lightest items of class l.
    The rounded profit of class l is scale * (1+eps)**l.
    """

    eps: Fraction
    scale: Fraction
    members: dict[int, tuple[int, ...]]
    prefix: dict[int, tuple[Fraction, ...]]

    @property
    def indices(self) -> tuple[int, ...]:
        """Non-empty class indices, ascending."""
        return tuple(sorted(self.members))

    @property
    def total_items(self) -> int:
        return sum(len(v) for v in self.members.values())

    def size(self, index: int) -> int:
        return len(self.members.get(index, ()))

    def rounded_profit(self, index: int) -> Fraction:
        """Class profit in scaled units: (1+eps)**index."""
        return (1 + self.eps) ** index


def build_classes(instance: Instance, eps: Fraction) -> ProfitClasses:
    """Assign each item the largest l with (1+eps)**l <= p_i / min profit.

    Exponents are found by repeated exact multiplication, never by logs, so
    profits landing exactly on a power of (1+eps) classify correctly.
    Returns an empty class map for an itemless instance.
    """
    if eps <= 0 or Fraction(1, 1) / eps != int(1 / eps):
        raise ValueError("eps must be a unit fraction")
    if not instance.items:
        return ProfitClasses(eps=eps, scale=Fraction(1), members={}, prefix={})
    scale = min(p for p, _ in instance.items)
    one_plus = 1 + eps
    members: dict[int, list[int]] = {}
    for i, (p, _) in enumerate(instance.items):
        ratio = p / scale
        level = 0
        power = one_plus
        while power <= ratio:
            power *= one_plus
            level += 1
        members.setdefault(level, []).append(i)

    ordered: dict[int, tuple[int, ...]] = {}
    prefix: dict[int, tuple[Fraction, ...]] = {}
    for level, ids in members.items():
        ids.sort(key=lambda i: (instance.items[i][1], i))
        sums = [Fraction(0)]
        for i in ids:
            sums.append(sums[-1] + instance.items[i][1])
        ordered[level] = tuple(ids)
        prefix[level] = tuple(sums)
    return ProfitClasses(eps=eps, scale=scale, members=ordered, prefix=prefix)


def prefix_weight(classes: ProfitClasses, index: int, k1: int, k2: int) -> Fraction:
    """Weight of the k1-th through k2-th lightest items of a class (exact)."""
    if index < 0:
        raise ClassIndexOutOfRange(f"class {index}")
    if k1 > k2:
        return Fraction(0)
    sums = classes.prefix.get(index)
    size = len(sums) - 1 if sums else 0
    if k1 < 1 or k2 > size:
        raise CountOutOfRange(f"range [{k1},{k2}] outside class of {size} items")
    return sums[k2] - sums[k1 - 1]


@dataclass(frozen=True)
class ClassInterval:
    """Contiguous class-index window [lo, hi] the DP state vector lives on.

    ``active`` lists the non-empty class indices inside the window; vectors
    carry one coordinate per active class (empty classes can hold nothing).
    """

    lo: int
    hi: int
    active: tuple[int, ...]

    @property
    def length(self) -> int:
        """Window length counting empty classes; scales the rounding base."""
        return self.hi - self.lo + 1


def make_interval(classes: ProfitClasses, lo: int, hi: int) -> ClassInterval:
    return ClassInterval(lo=lo, hi=hi, active=tuple(l for l in classes.indices if lo <= l <= hi))


def interval_length_cap(eps: Fraction, n: int, rho: Fraction, max_useful: int) -> int:
    """Smallest L with (1+eps)**L >= n*rho/eps, capped at max_useful.

    Any value beyond max_useful produces the same intervals, so the exact
    power loop stops early instead of grinding huge exponents.
    """
    target = Fraction(n) * rho / eps
    power = Fraction(1)
    length = 0
    while power < target:
        if length >= max_useful:
            return max_useful
        power *= 1 + eps
        length += 1
    return max(length, 1)


def candidate_intervals(
    classes: ProfitClasses,
    eps: Fraction,
    rho: Fraction,
    class_range: Optional[tuple[int, int]] = None,
) -> list[ClassInterval]:
    """One interval per candidate top class.

    The near-optimal prefix-like solution lives on an interval ending at the
    (unknown) highest used class; enumerating every non-empty class as that
    endpoint covers all cases.  rho is the suffix-lambda boundedness ratio
    of the (sub-)instance.
    """
    if rho < 1:
        raise ValueError("rho must be at least 1")
    indices = classes.indices
    if class_range is not None:
        lo_bound, hi_bound = class_range
        indices = tuple(l for l in indices if lo_bound <= l <= hi_bound)
    else:
        lo_bound = 0
    if not indices:
        return []
    width = interval_length_cap(eps, classes.total_items, rho, max_useful=indices[-1] - lo_bound + 1)
    out = []
    for top in indices:
        lo = max(top - width + 1, 0, lo_bound)
        out.append(make_interval(classes, lo, top))
    return out


def ceil_fraction(x: Fraction) -> int:
    return math.ceil(x)
