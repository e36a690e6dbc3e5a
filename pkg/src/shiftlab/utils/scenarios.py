# Embedded scenario configurations: task defaults and the named example scenarios

import copy
from typing import Any, Dict

from shiftlab.exceptions import ConfigurationError

SPLIT_WEIGHTS = [
    {"if": "<n>=0", "w": 0.5},
    {"if": "default", "w": 3},
]

UNIT_WEIGHTS = [{"if": "default", "w": 1}]

# T forward with 3 | 1/2 | 3 plateaus; its adjoint is checked far to the right
ADJOINT_PAIR_WEIGHTS = [
    {"if": "range [-100, -1]", "w": 3},
    {"if": "range [0, 100]", "w": 0.5},
    {"if": "range [101, 199]", "w": 0.5},
    {"if": "range [200, 300]", "w": 3},
    {"if": "default", "w": 1},
]

EVEN_ZERO = {"mod": 2, "residues": [1]}
ODD_ZERO = {"mod": 2, "residues": [0]}

_SPLIT_FORWARD = {"direction": "forward", "weights": SPLIT_WEIGHTS}
_EVEN_SCHEDULE = {"a": 2, "b": 0, "k_max": 20}

TASK_DEFAULTS: Dict[str, Dict[str, Any]] = {
    "criterion": {
        "operator": _SPLIT_FORWARD,
        "subspace": EVEN_ZERO,
        "schedule": _EVEN_SCHEDULE,
        "criterion": {"i_index": 1},
    },
    "lemma5": {
        "operator": _SPLIT_FORWARD,
        "subspace": EVEN_ZERO,
        "schedule": _EVEN_SCHEDULE,
        "lemma5": {"i_index": 1, "other_indices": [3, -1, 5]},
    },
    "mhc": {
        "operator": _SPLIT_FORWARD,
        "subspace": EVEN_ZERO,
        "schedule": _EVEN_SCHEDULE,
        "mhc": {"dense_indices": [1, 3, -1]},
    },
    "witness": {
        "witness": {
            "x_pairs": [{"coefficient": 1, "lambda": 0.3, "index": 0}, {"coefficient": 1, "lambda": 0.7, "index": 2}],
            "y_pairs": [{"coefficient": 1, "lambda": 1.5, "index": 1}, {"coefficient": 1, "lambda": 4, "index": 3}],
            "p": 1,
            "n_max": 40,
        },
    },
    "eigen-scan": {
        "operator": _SPLIT_FORWARD,
        "subspace": EVEN_ZERO,
        "eigen_scan": {"p": 2, "grid": "annulus(0.1, 16, 24 points)", "half_widths": [50, 100, 200, 400]},
    },
    "orbit": {
        "operator": _SPLIT_FORWARD,
        "subspace": EVEN_ZERO,
        "orbit": {"x": {"lo": 1, "coeffs": [1]}, "N": 20, "power": 2},
    },
    "coverage": {
        "subspace": dict(ODD_ZERO, one_sided=True),
        "constructor": {"lambda": 2, "targets": 10, "span": 8, "epsilon": 1e-3},
    },
    "compression": {
        "operator": dict(_SPLIT_FORWARD, power=2),
        "subspace": EVEN_ZERO,
        "compression": {"samples": 50, "N": 30, "support": [-10, 10]},
    },
    "quotient": {
        "operator": dict(_SPLIT_FORWARD, power=2),
        "subspace": EVEN_ZERO,
        "quotient": {"x": {"lo": 0, "coeffs": [1, 1]}, "N": 30},
    },
}

NAMED_SCENARIOS: Dict[str, Dict[str, Any]] = {
    "example1": {
        "task": "example1",
        "subspace": dict(ODD_ZERO, one_sided=True),
        "constructor": {"lambda": 2, "targets": 10, "span": 8, "epsilon": 1e-3},
    },
    "example3": {
        "task": "example3",
        "operator": _SPLIT_FORWARD,
        "subspace": EVEN_ZERO,
        "schedule": _EVEN_SCHEDULE,
        "criterion": {"i_index": 1},
        "lemma5": {"i_index": 1, "other_indices": [3, -1, 5]},
        "mhc": {"dense_indices": [1, 3, -1]},
    },
    "adjoint-pair": {
        "task": "adjoint-pair",
        "operator": {"direction": "forward", "weights": ADJOINT_PAIR_WEIGHTS},
        "subspace": EVEN_ZERO,
        "schedule": _EVEN_SCHEDULE,
        "adjoint": {"i_index": 1, "adjoint_index": 201, "adjoint_subspace": EVEN_ZERO},
    },
}

TASKS = tuple(TASK_DEFAULTS) + tuple(NAMED_SCENARIOS)


def scenario_defaults(name: str) -> Dict[str, Any]:
    """
    Embedded configuration for a task or named scenario.

    Args:
        name: Task name or named scenario

    Returns:
        A fresh copy of the configuration mapping, with "task" filled in
    """
    if name in NAMED_SCENARIOS:
        config = copy.deepcopy(NAMED_SCENARIOS[name])
    elif name in TASK_DEFAULTS:
        config = copy.deepcopy(TASK_DEFAULTS[name])
        config["task"] = name
    else:
        raise ConfigurationError(f"unknown task or scenario '{name}' (choose from {', '.join(TASKS)})", field="task")
    config.setdefault("name", name)
    return config
