"""Exact solvers for energy-constrained mobile agents on lines, trees and graphs."""

import json as _json

from . import _core
from ._core import (
    AgentexError,
    BudgetExhausted,
    InvalidInstance,
    PreconditionError,
    analytic_feasible,
    backward_potentials,
    broadcast_potentials,
    broadcast_potentials_back,
    broadcast_set,
    convergecast_decide,
    delivery_decide,
    edge_potentials,
    forward_potentials,
    partition_exists,
    tree_broadcast_sources,
    tree_convergecast,
)

__all__ = [
    "AgentexError",
    "BudgetExhausted",
    "InvalidInstance",
    "PreconditionError",
    "analytic_feasible",
    "backward_potentials",
    "broadcast_potentials",
    "broadcast_potentials_back",
    "broadcast_schedule",
    "broadcast_set",
    "convergecast_decide",
    "delivery_decide",
    "edge_potentials",
    "forward_potentials",
    "partition_exists",
    "plan_delivery",
    "run",
    "tree_broadcast_sources",
    "tree_convergecast",
    "validate",
]


def _text(doc):
    return doc if isinstance(doc, str) else _json.dumps(doc)


def plan_delivery(positions, energies, source, target):
    """Delivery schedule as a dict with a "steps" list."""
    return _json.loads(_core.plan_delivery(positions, energies, source, target))


def broadcast_schedule(positions, energies, source):
    return _json.loads(_core.broadcast_schedule(positions, energies, source))


def validate(instance, schedule):
    """Replay a schedule (dict or JSON text) against an instance that carries a task."""
    return _core.validate(_text(instance), _text(schedule))


def run(args, stdin=""):
    """Run a command-line invocation. Returns (exit code, parsed stdout or None, stderr)."""
    code, out, err = _core.run(list(args), _text(stdin))
    try:
        parsed = _json.loads(out) if out.strip() else None
    except ValueError:
        parsed = None
    return code, parsed, err
