# Configuration settings for shiftlab

import copy
import os
from pathlib import Path
from typing import Any, Dict, Optional

import yaml

from shiftlab.exceptions import ConfigurationError

# Truncation window
DEFAULT_HALF_WIDTH = 64
LEAKAGE_TOLERANCE = 1e-9

# Operator parameters
INVERTIBILITY_FLOOR = 1e-9
MAX_POWER = 10_000

# Checker tolerances
MEMBERSHIP_TOLERANCE = 1e-9
LIMIT_TOLERANCE = 1e-6
IDENTITY_TOLERANCE = 1e-12
TREND_WINDOW = 5
K_MAX = 20

# Eigen scan
DIVERGENCE_GROWTH = 1 + 1e-6
DIVERGENCE_RUN = 3
STABILITY_TOLERANCE = 1e-6
HALF_WIDTHS = (50, 100, 200, 400)

# Orbits
OVERFLOW_MODULUS = 1e300

# Output
DEFAULT_OUTPUT_DIR = "shiftlab_out"
OUTPUT_ENV_VAR = "SHIFTLAB_OUT"
REPORT_FILENAME = "report.json"
DEFAULT_SEED = 0


def resolve_output_dir(cli_value: Optional[str] = None) -> Path:
    """
    Pick the output directory.

    Args:
        cli_value: Value of --out, if given

    Returns:
        --out, else $SHIFTLAB_OUT, else the default directory
    """
    if cli_value:
        return Path(cli_value)
    env_value = os.environ.get(OUTPUT_ENV_VAR)
    if env_value:
        return Path(env_value)
    return Path(DEFAULT_OUTPUT_DIR)


def load_config_file(path: str) -> Dict[str, Any]:
    """
    Load a scenario file. YAML is accepted, and JSON loads unchanged as YAML.

    Args:
        path: Path to the scenario file

    Returns:
        The parsed mapping
    """
    file_path = Path(path)
    if not file_path.exists():
        raise ConfigurationError(f"config file does not exist: {path}")
    text = file_path.read_text()
    try:
        data = yaml.safe_load(text)
    except yaml.MarkedYAMLError as e:
        line = e.problem_mark.line + 1 if e.problem_mark is not None else None
        raise ConfigurationError(f"cannot parse {path}: {e.problem}", line=line) from e
    except yaml.YAMLError as e:
        raise ConfigurationError(f"cannot parse {path}: {e}") from e
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigurationError(f"top level of {path} must be a mapping")
    return data


def merge_blocks(base: Dict[str, Any], override: Dict[str, Any]) -> Dict[str, Any]:
    """Recursively merge two config mappings; values in `override` win."""
    merged = copy.deepcopy(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = merge_blocks(merged[key], value)
        else:
            merged[key] = value
    return merged
