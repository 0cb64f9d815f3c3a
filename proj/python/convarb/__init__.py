"""Python bindings for the convarb analyzer."""

import json

from ._core import (
    ConstructionRefused,
    DomainError,
    InvariantViolation,
    IoError,
    PreconditionError,
    __version__,
    analyze,
    simulate,
    verify_density,
)
from . import _core


def models():
    return json.loads(_core.models_json())


def oracle(path, out_dir=None):
    """Solve a tree file, or the oracle section of an experiment config."""
    return json.loads(_core.oracle_json(path, out_dir))


def solve_tree(tree):
    """Solve a tree given as a dict with a "nodes" list."""
    return json.loads(_core.solve_tree_json(json.dumps(tree)))


def discretize(name, params=None, periods=3, branching=1, horizon=1.0):
    return json.loads(_core.discretize_json(name, params or {}, periods, branching, horizon))


def validate_config(path):
    return json.loads(_core.validate_config_json(str(path)))


def run_experiment(config, out_dir=None, seed=None, threads=1):
    return json.loads(_core.run_experiment_json(str(config), None if out_dir is None else str(out_dir), seed, threads))


__all__ = [
    "ConstructionRefused",
    "DomainError",
    "InvariantViolation",
    "IoError",
    "PreconditionError",
    "__version__",
    "analyze",
    "discretize",
    "models",
    "oracle",
    "run_experiment",
    "simulate",
    "solve_tree",
    "validate_config",
    "verify_density",
]
