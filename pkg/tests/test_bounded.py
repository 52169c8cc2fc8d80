import random
from fractions import Fraction

import pytest

from helpers import e1, random_instance
from incknap.bounded import (
    ChainNotMonotone,
    InverseFrontier,
    check_internal_eps,
    dp_solve,
    prefix_to_solution,
    rescaled_third,
    solve_bounded,
    solve_inverse,
)
from incknap.classes import build_classes, make_interval, candidate_intervals
from incknap.model import Instance, check_feasible, objective, preprocess
from incknap.oracle import exact_inverse, exact_opt, exact_restricted_dp
from incknap.statespace import enumerate_family

EPS = Fraction(1, 5)


def family_for(instance, classes, interval, eps=EPS):
    weights = [instance.items[i][1] for l in interval.active for i in classes.members[l]]
    return enumerate_family(classes, interval, eps, (min(weights), max(weights)), len(weights))


def test_check_internal_eps():
    assert check_internal_eps(Fraction(1, 8)) == Fraction(1, 8)
    for bad in (Fraction(1, 4), Fraction(2, 7), Fraction(0)):
        with pytest.raises(ValueError):
            check_internal_eps(bad)


def test_rescaled_third():
    assert rescaled_third(Fraction(1, 5)) == Fraction(1, 15)
    assert rescaled_third(Fraction(1, 14)) == Fraction(1, 42)
    assert rescaled_third(Fraction(1)) == Fraction(1, 5)


def test_dp_solve_hand_rollout():
    # single class, weights [1,2], W=(1,3), unit lambdas: F(2,(2)) = 2 + 1 = 3
    instance = Instance.build(items=[(1, 1), (1, 2)], capacities=[1, 3], lambdas=[1, 1])
    classes = build_classes(instance, EPS)
    interval = make_interval(classes, 0, 0)
    family = family_for(instance, classes, interval)
    table = dp_solve(classes, interval, family, instance.capacities, instance.suffix_lambdas)
    by_counts = {v.counts: j for j, v in enumerate(table.family)}
    assert table.value(2, by_counts[(2,)]) == 3
    assert table.value(1, by_counts[(2,)]) is None  # weight 3 over W_1
    assert table.value(2, by_counts[(0,)]) == 0
    assert table.chain(by_counts[(2,)]) == [(1,), (2,)]


def test_dp_zero_vector_reachable_every_period():
    rng = random.Random(2)
    for _ in range(10):
        instance = random_instance(rng, n_max=5, t_max=3)
        classes = build_classes(instance, EPS)
        for interval in candidate_intervals(classes, EPS, instance.suffix_lambdas.ratio):
            family = family_for(instance, classes, interval)
            table = dp_solve(classes, interval, family, instance.capacities, instance.suffix_lambdas)
            zero = next(j for j, v in enumerate(table.family) if all(c == 0 for c in v.counts))
            for t in range(instance.horizon + 1):
                assert table.value(t, zero) == 0


def test_dp_restricted_below_exact():
    # family-restricted values never exceed the full-family DP values
    rng = random.Random(8)
    for _ in range(15):
        instance = random_instance(rng, n_max=5, t_max=3)
        classes = build_classes(instance, EPS)
        top = max(classes.indices)
        interval = make_interval(classes, 0, top)
        family = family_for(instance, classes, interval)
        table = dp_solve(classes, interval, family, instance.capacities, instance.suffix_lambdas)
        exact = exact_restricted_dp(instance, classes, interval, budget=200_000)
        for j, vec in enumerate(table.family):
            approx = table.value(instance.horizon, j)
            full = exact[(instance.horizon, vec.counts)]
            if approx is not None:
                assert full is not None
                assert approx <= full


def test_prefix_to_solution_unfolds_counts():
    instance = Instance.build(items=[(1, 1), (1, 2)], capacities=[3, 3, 3], lambdas=[1, 1, 1])
    classes = build_classes(instance, EPS)
    interval = make_interval(classes, 0, 0)
    solution = prefix_to_solution(classes, interval, [(0,), (1,), (2,)], 2)
    assert solution.intro == (2, 3)
    solution = prefix_to_solution(classes, interval, [(2,), (2,), (2,)], 2)
    assert solution.intro == (1, 1)
    with pytest.raises(ChainNotMonotone):
        prefix_to_solution(classes, interval, [(2,), (1,)], 2)


def test_solve_inverse_phi_zero():
    pre, _ = preprocess(e1())
    result = solve_inverse(pre, Fraction(0), EPS)
    assert result.weight == 0
    assert result.solution.intro == (None, None)


def test_solve_inverse_e1_super_optimal():
    pre, _ = preprocess(e1())
    result = solve_inverse(pre, Fraction(8), EPS)
    assert result is not None
    assert result.weight <= 3  # exact inverse optimum weighs 3
    assert result.true_profit >= (1 - 3 * EPS) * 8


def test_solve_inverse_infeasible():
    pre, _ = preprocess(e1())
    assert solve_inverse(pre, Fraction(100), EPS) is None


def test_solve_inverse_super_optimality_sweep():
    rng = random.Random(14)
    for _ in range(30):
        instance = random_instance(rng, n_max=6, t_max=3)
        opt, _ = exact_opt(instance)
        if opt == 0:
            continue
        frontier = InverseFrontier(instance, EPS)
        for quarter in (1, 2, 3, 4):
            phi = opt * quarter / 4
            oracle_res = exact_inverse(instance, phi)
            approx = frontier.query(phi)
            if oracle_res is not None:
                assert approx is not None
                assert approx.weight <= oracle_res[0]
            if approx is not None:
                assert approx.true_profit >= (1 - 3 * EPS) * phi
                assert check_feasible(instance, approx.solution) is None
                assert approx.weight == approx.solution.weights_by_period(instance)[-1]


def test_backpointer_chains_monotone_and_feasible():
    rng = random.Random(27)
    for _ in range(15):
        instance = random_instance(rng, n_max=5, t_max=3)
        classes = build_classes(instance, EPS)
        for interval in candidate_intervals(classes, EPS, instance.suffix_lambdas.ratio):
            family = family_for(instance, classes, interval)
            table = dp_solve(classes, interval, family, instance.capacities, instance.suffix_lambdas)
            for j in range(len(table.family)):
                if table.raw[instance.horizon][j] is None:
                    continue
                chain = table.chain(j)
                by_counts = {v.counts: v.weight for v in table.family}
                for t, (prev, cur) in enumerate(zip([(0,) * len(interval.active)] + chain, chain)):
                    assert all(a <= b for a, b in zip(prev, cur))
                    assert by_counts[cur] <= instance.capacities[t]


def test_solve_inverse_result_metrics_consistent():
    rng = random.Random(4)
    for _ in range(10):
        instance = random_instance(rng, n_max=5, t_max=2)
        opt, _ = exact_opt(instance)
        res = solve_inverse(instance, opt, EPS)
        if res is None:
            continue
        assert res.true_profit == objective(instance, res.solution)
        assert res.rounded_profit <= res.true_profit


def test_solve_bounded_e1():
    pre, _ = preprocess(e1())
    solution = solve_bounded(pre, EPS)
    assert objective(pre, solution) >= (1 - 5 * EPS) * 8


def test_solve_bounded_no_items():
    instance = Instance.build(items=[], capacities=[1], lambdas=[1])
    assert solve_bounded(instance, EPS).intro == ()


def test_solve_bounded_single_item():
    instance = Instance.build(items=[(1, 1)], capacities=[1], lambdas=[1])
    solution = solve_bounded(instance, EPS)
    assert solution.intro == (1,)
    assert objective(instance, solution) == 1


def test_solve_inverse_heavy_classes_super_optimal():
    # many equal-profit items force classes past the 1/eps threshold, so the
    # inverse DP runs on genuinely pruned (up-rounded, truncated) vectors
    rng = random.Random(71)
    heavy_runs = 0
    for _ in range(12):
        n = rng.randint(8, 10)
        t = rng.randint(1, 2)
        profit = rng.randint(1, 10)
        items = [(profit, rng.randint(1, 6)) for _ in range(n)]
        if rng.random() < 0.5:
            items += [(profit * 3, rng.randint(1, 6)) for _ in range(rng.randint(1, 2))]
        caps = []
        acc = 0
        for _ in range(t):
            acc += rng.randint(6, 30)
            caps.append(acc)
        instance = Instance.build(
            items=items, capacities=caps, lambdas=[rng.randint(1, 5) for _ in range(t)]
        )
        classes = build_classes(instance, EPS)
        assert any(classes.size(l) > int(1 / EPS) for l in classes.indices)
        frontier = InverseFrontier(instance, EPS)
        if any(
            any(c > int(1 / EPS) for c in vec.counts)
            for entry in frontier._frontier
            if entry[2] is not None
            for vec in entry[2].family
        ):
            heavy_runs += 1
        opt, _ = exact_opt(instance)
        for quarter in (1, 2, 3, 4):
            phi = opt * quarter / 4
            oracle_res = exact_inverse(instance, phi)
            approx = frontier.query(phi)
            if oracle_res is not None:
                assert approx is not None
                assert approx.weight <= oracle_res[0]
            if approx is not None:
                assert approx.true_profit >= (1 - 3 * EPS) * phi
                assert check_feasible(instance, approx.solution) is None
    assert heavy_runs >= 8  # the pruned vectors really appeared in the DP


def test_solve_bounded_tolerates_zero_middle_lambda():
    # not a preprocessed instance, but the grid must still anchor on a
    # positive coefficient rather than looping on zero
    instance = Instance.build(items=[(2, 1), (3, 2)], capacities=[2, 3, 3], lambdas=[1, 0, 1])
    solution = solve_bounded(instance, EPS)
    assert check_feasible(instance, solution) is None
    assert objective(instance, solution) >= (1 - 5 * EPS) * exact_opt(instance)[0]


def test_solve_bounded_guarantee_sweep():
    rng = random.Random(31)
    for _ in range(25):
        instance = random_instance(rng, n_max=6, t_max=3)
        opt, _ = exact_opt(instance)
        solution = solve_bounded(instance, EPS)
        assert check_feasible(instance, solution) is None
        assert objective(instance, solution) >= (1 - 5 * EPS) * opt
