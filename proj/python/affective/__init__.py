"""Purely affective interaction models.

The heavy lifting happens in the compiled ``_affective`` extension; results
come back as plain dictionaries.
"""

import json as _json

from . import _affective
from ._affective import Model, ModelError, builtin_names

__all__ = [
    "Model",
    "ModelError",
    "builtin_names",
    "load",
    "builtin",
    "solve_consistency",
    "induced_game",
    "check_assumption",
    "find_equilibrium",
    "pareto_search",
    "welfare_weights",
    "economy",
    "reproduce",
    "run",
]


def load(text):
    """Parse a model document."""
    return Model.load(text)


def builtin(name):
    return Model.builtin(name)


def solve_consistency(model, x, guess=None):
    return _json.loads(_affective.solve_consistency(model, list(x), None if guess is None else list(guess)))


def induced_game(model, x):
    return _json.loads(_affective.induced_game(model, list(x)))


def check_assumption(model, assumption, samples=1000, seed=42):
    return _json.loads(_affective.check_assumption(model, assumption, samples, seed))


def find_equilibrium(model, start=None):
    return _json.loads(_affective.find_equilibrium(model, None if start is None else list(start)))


def pareto_search(model, x, u, per_axis=64, seed=42):
    return _json.loads(_affective.pareto_search(model, list(x), list(u), per_axis, seed))


def welfare_weights(b):
    """Weights lambda >> 0 with lambda B >> 0, or None."""
    out = _affective.welfare_weights([list(row) for row in b])
    return None if out is None else _json.loads(out)


def economy(a=2.0, b=0.25, money=100.0, weights=(1.0, 1.0)):
    return _json.loads(_affective.economy(a, b, money, list(weights)))


def reproduce(example, seed=42):
    return _json.loads(_affective.reproduce(example, seed))


def run(args):
    """Run a CLI subcommand; returns (exit_code, stdout, stderr)."""
    return _affective.run([str(a) for a in args])
