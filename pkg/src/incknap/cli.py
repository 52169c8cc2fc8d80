"""Command line interface: instance I/O, generation, solving, batch eval.

Instances travel as JSON with every scalar written as an exact decimal
string (or "a/b" when the denominator is not a power of 2 and 5), so a
parse/serialize round trip is value-identical and float contamination is
impossible.  Exit codes: 0 success, 2 validation or parse error, 3 oracle
budget exceeded.
"""

from __future__ import annotations

import argparse
import csv
import json
import random
import sys
import time
from fractions import Fraction
from pathlib import Path
from typing import Optional

from . import bounded, general, oracle
from .model import (
    Instance,
    Solution,
    ValidationError,
    objective,
    preprocess,
    remap_solution,
    validate,
)

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_BUDGET = 3

PROFILES = ("uniform", "geometric-lambda", "subset-sum")


def parse_rational(text: str) -> Fraction:
    """Accept decimal strings and a/b ratios; reject floats elsewhere."""
    return Fraction(str(text).strip())


def format_rational(x: Fraction) -> str:
    """Exact decimal string when the denominator is 2^a*5^b, else a/b."""
    den = x.denominator
    twos = fives = 0
    while den % 2 == 0:
        den //= 2
        twos += 1
    while den % 5 == 0:
        den //= 5
        fives += 1
    if den != 1:
        return f"{x.numerator}/{x.denominator}"
    shift = max(twos, fives)
    if shift == 0:
        return str(x.numerator)
    scaled = abs(x.numerator) * 10**shift // x.denominator
    digits = str(scaled).rjust(shift + 1, "0")
    sign = "-" if x.numerator < 0 else ""
    return f"{sign}{digits[:-shift]}.{digits[-shift:]}"


def instance_to_json(instance: Instance) -> str:
    doc = {
        "items": [
            {"p": format_rational(p), "w": format_rational(w)} for p, w in instance.items
        ],
        "capacities": [format_rational(c) for c in instance.capacities],
        "lambdas": [format_rational(v) for v in instance.lambdas],
    }
    return json.dumps(doc, indent=2) + "\n"


def instance_from_json(text: str) -> Instance:
    doc = json.loads(text)
    return Instance.build(
        items=[(parse_rational(it["p"]), parse_rational(it["w"])) for it in doc["items"]],
        capacities=[parse_rational(c) for c in doc["capacities"]],
        lambdas=[parse_rational(v) for v in doc["lambdas"]],
    )


def generate_instance(seed: int, n: int, t: int, profile: str = "uniform") -> Instance:
    """Deterministic random instance; identical seeds give identical bytes.

    uniform: integer profits/weights in [1,10], lambdas in [1,5], capacities
    as partial sums of increments in [1,10].  geometric-lambda: lambdas
    decaying fast enough that consecutive suffix ratios exceed the band
    threshold, which forces multiple clusters.  subset-sum: profit = weight.
    """
    if n < 1 or t < 1:
        raise ValueError("n and t must be at least 1")
    if profile not in PROFILES:
        raise ValueError(f"unknown profile {profile!r}")
    rng = random.Random(seed)
    weights = [rng.randint(1, 10) for _ in range(n)]
    if profile == "subset-sum":
        profits = list(weights)
    else:
        profits = [rng.randint(1, 10) for _ in range(n)]
    increments = [rng.randint(1, 10) for _ in range(t)]
    capacities = []
    acc = 0
    for inc in increments:
        acc += inc
        capacities.append(acc)
    if profile == "geometric-lambda":
        # factor 6n beats the band threshold n/eps at the default eps = 1/5
        factor = 6 * n
        lambdas = [(factor - 1) * factor ** (t - k - 2) if k < t - 1 else 1 for k in range(t)]
    else:
        lambdas = [rng.randint(1, 5) for _ in range(t)]
    return Instance.build(
        items=list(zip(profits, weights)), capacities=capacities, lambdas=lambdas
    )


def solution_to_json(instance: Instance, solution: Solution, profit: Fraction) -> str:
    doc = {
        "intro": list(solution.intro),
        "profit": format_rational(profit),
        "weights_by_period": [
            format_rational(w) for w in solution.weights_by_period(instance)
        ],
    }
    return json.dumps(doc, indent=2) + "\n"


def _solve_mode(instance: Instance, mode: str, eps: Fraction) -> tuple[Solution, Fraction]:
    if mode == "exact":
        profit, solution = oracle.exact_opt(instance)
        return solution, profit
    if mode == "bounded":
        pre, remap = preprocess(instance)
        eps_int = Fraction(1, max(5, _ceil_div(5, eps)))
        solution = remap_solution(bounded.solve_bounded(pre, eps_int), remap)
        return solution, objective(instance, solution)
    if mode == "general":
        result = general.solve_detailed(instance, eps)
        return result.solution, objective(instance, result.solution)
    raise ValueError(f"unknown mode {mode!r}")


def _ceil_div(k: int, eps: Fraction) -> int:
    q = Fraction(k) / eps
    return -(-q.numerator // q.denominator)


def cmd_solve(args) -> int:
    try:
        instance = instance_from_json(Path(args.path).read_text())
        validate(instance)
    except (ValidationError, ValueError, KeyError, json.JSONDecodeError) as exc:
        print(f"invalid instance: {exc}", file=sys.stderr)
        return EXIT_INVALID
    try:
        solution, profit = _solve_mode(instance, args.mode, parse_rational(args.eps))
    except oracle.BudgetExceeded as exc:
        print(f"oracle budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    text = solution_to_json(instance, solution, profit)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_gen(args) -> int:
    try:
        instance = generate_instance(args.seed, args.n, args.t, args.profile)
    except ValueError as exc:
        print(f"cannot generate: {exc}", file=sys.stderr)
        return EXIT_INVALID
    text = instance_to_json(instance)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_validate(args) -> int:
    try:
        instance = instance_from_json(Path(args.path).read_text())
        validate(instance)
    except (ValidationError, ValueError, KeyError, json.JSONDecodeError) as exc:
        print(f"invalid instance: {exc}", file=sys.stderr)
        return EXIT_INVALID
    print(f"ok: {instance.n} items, {instance.horizon} periods")
    return EXIT_OK


def cmd_eval(args) -> int:
    """Batch evaluation against the exact oracle, one CSV row per run."""
    eps_list = [parse_rational(e) for e in args.eps]
    modes = args.modes.split(",")
    rows = []
    failures = 0
    for seed in range(args.seed_start, args.seed_start + args.seeds):
        instance = generate_instance(seed, args.n, args.t, args.profile)
        name = f"{args.profile}-{seed}"
        try:
            opt_profit, _ = oracle.exact_opt(instance, budget=args.budget)
        except oracle.BudgetExceeded as exc:
            failures += 1
            for mode in modes:
                for eps in eps_list:
                    rows.append([name, mode, format_rational(eps), "", "", "", "", "", str(exc)])
            continue
        for mode in modes:
            for eps in eps_list:
                start = time.perf_counter()
                try:
                    solution, profit = _solve_mode(instance, mode, eps)
                except Exception as exc:  # pragma: no cover - defensive row
                    failures += 1
                    rows.append([name, mode, format_rational(eps), "", "", "", "", "", str(exc)])
                    continue
                ms = (time.perf_counter() - start) * 1000
                weight = solution.weights_by_period(instance)[-1] if instance.horizon else Fraction(0)
                assert profit <= opt_profit
                ratio = profit / opt_profit if opt_profit > 0 else Fraction(1)
                if mode != "exact" and ratio < 1 - eps:
                    failures += 1
                rows.append(
                    [
                        name,
                        mode,
                        format_rational(eps),
                        format_rational(profit),
                        format_rational(opt_profit),
                        format_rational(ratio),
                        format_rational(weight),
                        f"{ms:.1f}",
                        "",
                    ]
                )
    out = Path(args.out)
    with out.open("w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["id", "mode", "eps", "solver_profit", "oracle_profit", "ratio", "weight", "ms", "error"])
        writer.writerows(rows)
    print(f"wrote {len(rows)} rows to {out}")
    return EXIT_OK if failures == 0 else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="inc-knap", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="solve an instance file")
    p_solve.add_argument("path")
    p_solve.add_argument("--mode", choices=("exact", "bounded", "general"), default="general")
    p_solve.add_argument("--eps", default="0.5")
    p_solve.add_argument("--out", default=None)
    p_solve.set_defaults(func=cmd_solve)

    p_gen = sub.add_parser("gen", help="generate a random instance")
    p_gen.add_argument("--seed", type=int, required=True)
    p_gen.add_argument("--n", type=int, required=True)
    p_gen.add_argument("--t", type=int, required=True)
    p_gen.add_argument("--profile", choices=PROFILES, default="uniform")
    p_gen.add_argument("--out", default=None)
    p_gen.set_defaults(func=cmd_gen)

    p_val = sub.add_parser("validate", help="parse and validate an instance file")
    p_val.add_argument("path")
    p_val.set_defaults(func=cmd_validate)

    p_eval = sub.add_parser("eval", help="batch-evaluate solvers against the oracle")
    p_eval.add_argument("--seeds", type=int, default=10)
    p_eval.add_argument("--seed-start", type=int, default=0)
    p_eval.add_argument("--n", type=int, default=5)
    p_eval.add_argument("--t", type=int, default=2)
    p_eval.add_argument("--profile", choices=PROFILES, default="uniform")
    p_eval.add_argument("--eps", action="append", default=None)
    p_eval.add_argument("--modes", default="general")
    p_eval.add_argument("--budget", type=int, default=oracle.DEFAULT_BUDGET)
    p_eval.add_argument("--out", required=True)
    p_eval.set_defaults(func=cmd_eval)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "eps", None) is None and args.command == "eval":
        args.eps = ["0.5"]
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
