import csv
import json
from fractions import Fraction

import pytest

from incknap.cli import (
    format_rational,
    generate_instance,
    instance_from_json,
    instance_to_json,
    main,
    parse_rational,
)
from incknap.model import validate
from incknap.oracle import exact_opt


def test_format_rational_decimal_forms():
    assert format_rational(Fraction(8)) == "8"
    assert format_rational(Fraction(3, 2)) == "1.5"
    assert format_rational(Fraction(1, 8)) == "0.125"
    assert format_rational(Fraction(-3, 4)) == "-0.75"
    assert format_rational(Fraction(1, 3)) == "1/3"
    assert format_rational(Fraction(7, 10)) == "0.7"


def test_parse_rational_forms():
    assert parse_rational("1.5") == Fraction(3, 2)
    assert parse_rational("3/5") == Fraction(3, 5)
    assert parse_rational("7") == 7


@pytest.mark.parametrize("value", [Fraction(1, 3), Fraction(22, 7), Fraction(-5, 16), Fraction(9)])
def test_format_parse_round_trip(value):
    assert parse_rational(format_rational(value)) == value


def test_gen_deterministic_bytes():
    a = instance_to_json(generate_instance(1, 3, 2, "uniform"))
    b = instance_to_json(generate_instance(1, 3, 2, "uniform"))
    assert a == b


def test_gen_subset_sum_profile():
    instance = generate_instance(7, 5, 2, "subset-sum")
    assert all(p == w for p, w in instance.items)


def test_gen_singleton():
    instance = generate_instance(0, 1, 1, "uniform")
    validate(instance)
    assert instance.n == 1 and instance.horizon == 1


def test_gen_geometric_lambda_ratios():
    instance = generate_instance(3, 4, 3, "geometric-lambda")
    validate(instance)
    suffix = instance.suffix_lambdas.values
    for a, b in zip(suffix, suffix[1:]):
        assert b / a < Fraction(1, 5) / instance.n  # steep enough to split bands


def test_instance_json_round_trip():
    instance = generate_instance(5, 4, 3, "uniform")
    again = instance_from_json(instance_to_json(instance))
    assert again == instance


def test_cmd_gen_and_solve_exact(tmp_path, capsys):
    path = tmp_path / "e1.json"
    doc = {
        "items": [{"p": "2", "w": "1"}, {"p": "3", "w": "2"}],
        "capacities": ["2", "3"],
        "lambdas": ["1", "1"],
    }
    path.write_text(json.dumps(doc))
    out = tmp_path / "sol.json"
    code = main(["solve", str(path), "--mode", "exact", "--out", str(out)])
    assert code == 0
    solution = json.loads(out.read_text())
    assert solution["profit"] == "8"
    assert solution["intro"] == [2, 1]
    assert solution["weights_by_period"] == ["2", "3"]


def test_cmd_solve_general_guarantee(tmp_path):
    path = tmp_path / "inst.json"
    path.write_text(instance_to_json(generate_instance(11, 5, 2, "uniform")))
    out = tmp_path / "sol.json"
    assert main(["solve", str(path), "--mode", "general", "--eps", "0.5", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    instance = instance_from_json(path.read_text())
    opt, _ = exact_opt(instance)
    assert parse_rational(doc["profit"]) >= opt / 2


def test_cmd_solve_bounded_mode(tmp_path):
    path = tmp_path / "inst.json"
    path.write_text(instance_to_json(generate_instance(13, 4, 2, "uniform")))
    out = tmp_path / "sol.json"
    assert main(["solve", str(path), "--mode", "bounded", "--eps", "0.5", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    instance = instance_from_json(path.read_text())
    opt, _ = exact_opt(instance)
    assert parse_rational(doc["profit"]) >= opt / 2


def test_cmd_validate_mismatched_lengths(tmp_path):
    path = tmp_path / "bad.json"
    doc = {"items": [], "capacities": ["1", "2"], "lambdas": ["1"]}
    path.write_text(json.dumps(doc))
    assert main(["validate", str(path)]) == 2


def test_cmd_solve_malformed_json(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    assert main(["solve", str(path)]) == 2


def test_cmd_solve_invalid_instance(tmp_path):
    path = tmp_path / "bad.json"
    doc = {"items": [{"p": "1", "w": "0"}], "capacities": ["1"], "lambdas": ["1"]}
    path.write_text(json.dumps(doc))
    assert main(["solve", str(path)]) == 2


def test_cmd_solve_budget_exceeded(tmp_path):
    path = tmp_path / "big.json"
    path.write_text(instance_to_json(generate_instance(1, 14, 3, "uniform")))
    assert main(["solve", str(path), "--mode", "exact"]) == 3


def test_cmd_validate(tmp_path, capsys):
    path = tmp_path / "inst.json"
    path.write_text(instance_to_json(generate_instance(2, 3, 2, "uniform")))
    assert main(["validate", str(path)]) == 0
    assert "ok" in capsys.readouterr().out


def test_cmd_eval_batch(tmp_path):
    out = tmp_path / "report.csv"
    code = main(
        [
            "eval",
            "--seeds", "4",
            "--n", "4",
            "--t", "2",
            "--eps", "0.5",
            "--out", str(out),
        ]
    )
    assert code == 0
    with out.open() as handle:
        rows = list(csv.DictReader(handle))
    assert len(rows) == 4
    for row in rows:
        assert row["error"] == ""
        ratio = parse_rational(row["ratio"])
        assert Fraction(1, 2) <= ratio <= 1


def test_cmd_eval_header_and_empty_batch(tmp_path):
    out = tmp_path / "empty.csv"
    assert main(["eval", "--seeds", "0", "--out", str(out)]) == 0
    header = out.read_text().splitlines()[0]
    assert header == "id,mode,eps,solver_profit,oracle_profit,ratio,weight,ms,error"


def test_cmd_eval_budget_error_rows(tmp_path):
    out = tmp_path / "over.csv"
    code = main(
        ["eval", "--seeds", "1", "--n", "12", "--t", "3", "--budget", "100", "--out", str(out)]
    )
    assert code == 1
    with out.open() as handle:
        rows = list(csv.DictReader(handle))
    assert rows and rows[0]["error"] != ""
