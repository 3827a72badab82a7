import os
from fractions import Fraction
from pathlib import Path

import pytest

import roughgroups as rg

SCENARIOS = Path(os.environ.get("ROUGH_SCENARIOS", Path(__file__).resolve().parents[2] / "scenarios"))


def test_cyclic_basics():
    g = rg.Group.cyclic(12)
    assert g.order == 12
    assert g.ball(2) == [0, 1, 2, 10, 11]
    assert g.dist(1, 11) == Fraction(2)
    assert g.product([0, 1], [0, 3]) == [0, 1, 3, 4]
    assert g.inv(5) == 7


def test_measure_and_thickness():
    g = rg.Group.cyclic(12)
    assert g.packing_number(g.ball(4), 1) == 5
    assert g.min_thickness(g.ball(2), g.ball(4)) == 3


def test_approximate():
    g = rg.Group.cyclic(12)
    holds, e = g.is_rough_approximate(g.ball(4), 2, [0])
    assert holds and len(e) <= 2
    assert not g.is_rough_approximate(g.ball(4), 0, [0])[0]


def test_run_dict_scenario():
    doc = rg.run({"group": {"kind": "cyclic", "n": 12}, "A": {"ball": 2},
                  "chain": {"radii": [4, 2, 1, 0]}, "operations": [{"op": "validate"}]})
    assert doc["exit_code"] == 0
    assert doc["verdict"] == "pass"


def test_run_scenario_file():
    doc = rg.run_scenario(str(SCENARIOS / "broken_chain.json"))
    assert doc["exit_code"] == 1


def test_input_error():
    with pytest.raises(ValueError):
        rg.run({"group": {"kind": "cyclic", "n": 12}, "A": {"ball": 2}, "chain": {"radii": [1, 2]}})
    with pytest.raises(ValueError):
        rg.Group.cyclic(5).ball("x")
