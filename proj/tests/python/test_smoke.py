import json
from fractions import Fraction
from pathlib import Path

import pytest

import agentex

DATA = Path(__file__).resolve().parents[2] / "data"
POSITIONS = [0, 10, 20, 30, 40]
ENERGIES = [0, 24, 10, 40, 0]


def line_doc(positions, energies, task=None):
    doc = {"kind": "line", "agents": [{"position": p, "energy": e} for p, e in zip(positions, energies)]}
    if task:
        doc["task"] = task
    return doc


def test_example1_potentials():
    assert agentex.forward_potentials(POSITIONS, ENERGIES) == [0, 4, -2, 18, 8]


def test_example1_broadcast_tables():
    assert agentex.broadcast_potentials(POSITIONS, ENERGIES) == [0, 14, 7, Fraction(67, 2), Fraction(27, 2)]
    assert agentex.broadcast_potentials_back(POSITIONS, ENERGIES) == [4, 24, 20, 30, 0]


def test_delivery_schedule_validates():
    feasible, surplus = agentex.delivery_decide(POSITIONS, ENERGIES, 0, 40)
    assert feasible and surplus == 8
    schedule = agentex.plan_delivery(POSITIONS, ENERGIES, 0, 40)
    task = {"type": "delivery", "source": 0, "target": 40}
    report = agentex.validate(line_doc(POSITIONS, ENERGIES, task), schedule)
    assert report["ok"] and report["task_achieved"]
    assert report["surplus"] == 8


def test_convergecast_two_agents():
    assert agentex.convergecast_decide([0, 10], [7, 7]) == (True, 0, 4)
    feasible, _, _ = agentex.convergecast_decide([0, 10], [4, 4])
    assert not feasible


def test_broadcast_boundary():
    assert agentex.broadcast_set([0, 10], [10, 10]) == [0, 1]
    assert agentex.broadcast_set([0, 10], [10, Fraction(39, 4)]) == []


def test_fractions_and_strings_accepted():
    assert agentex.forward_potentials(["0", "5/2"], [Fraction(3), 1]) == [3, Fraction(3, 2)]


def test_floats_rejected():
    with pytest.raises(TypeError):
        agentex.forward_potentials([0.0, 1.0], [1, 1])


def test_bad_line_rejected():
    with pytest.raises(agentex.InvalidInstance):
        agentex.forward_potentials([3, 1], [1, 1])


def test_tree_path_matches_line():
    tree = {
        "kind": "tree",
        "nodes": ["a", "b", "c"],
        "edges": [{"u": "a", "v": "b", "length": 10}, {"u": "b", "v": "c", "length": 10}],
        "agents": [{"node": "a", "energy": 10}, {"node": "b", "energy": 10}, {"node": "c", "energy": 10}],
    }
    feasible, intervals = agentex.tree_convergecast(json.dumps(tree))
    assert feasible == agentex.convergecast_decide([0, 10, 20], [10, 10, 10])[0]
    assert intervals
    assert agentex.edge_potentials(json.dumps(tree))[0][0] == agentex.forward_potentials([0], [10])[0]


def test_partition():
    assert agentex.partition_exists([1, 1]) and agentex.analytic_feasible([1, 1])
    assert not agentex.partition_exists([1, 2]) and not agentex.analytic_feasible([1, 2])


def test_cli_solve_example1():
    code, doc, _ = agentex.run(["solve", "--task", "delivery", str(DATA / "example1.json")])
    assert code == 0
    assert doc["feasible"] and doc["surplus_or_deficit"] == 8


def test_cli_convergecast_infeasible():
    code, doc, _ = agentex.run(["solve", "--task", "convergecast", str(DATA / "two-agents-4-4.json")])
    assert code == 1 and not doc["feasible"]


def test_cli_partition_pipeline():
    code, generated, _ = agentex.run(["gen", "partition-digraph", "--weights", "1,2"])
    assert code == 0
    code, doc, _ = agentex.run(["solve", "--task", "delivery", "-"], generated)
    assert code == 1 and not doc["feasible"]


def test_cli_usage_error():
    code, _, err = agentex.run(["solve", "/nonexistent.json"])
    assert code == 2 and "cannot read" in err
