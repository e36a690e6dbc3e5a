"""
Service for writing and reading run reports and tables
"""
import json
import logging
import math
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
import pandas as pd

logger = logging.getLogger(__name__)


def to_jsonable(value: Any) -> Any:
    """
    Convert a report value into plain JSON types.

    Complex numbers become [re, im]; non-finite floats become the strings
    "inf", "-inf" and "nan"; objects with to_dict are expanded.
    """
    if isinstance(value, Enum):
        return value.value
    if callable(getattr(value, "to_dict", None)):
        return to_jsonable(value.to_dict())
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, set)):
        items = sorted(value) if isinstance(value, set) else value
        return [to_jsonable(v) for v in items]
    if isinstance(value, np.ndarray):
        return [to_jsonable(v) for v in value.tolist()]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (complex, np.complexfloating)):
        return [_finite_or_text(float(value.real)), _finite_or_text(float(value.imag))]
    if isinstance(value, (float, np.floating)):
        return _finite_or_text(float(value))
    if isinstance(value, Path):
        return str(value)
    return value


def _finite_or_text(x: float) -> Any:
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


class Storage:
    def __init__(self, storage_path):
        self.storage_path = Path(storage_path)
        self.storage_path.mkdir(parents=True, exist_ok=True)

    def save_report(self, filename: str, report: Dict[str, Any]) -> Path:
        """
        Write a report as JSON with sorted keys.

        Args:
            filename: Name inside the storage directory
            report: Report mapping; converted with to_jsonable

        Returns:
            Path of the written file
        """
        file_path = self.storage_path / filename
        text = json.dumps(to_jsonable(report), sort_keys=True, indent=2)
        with open(file_path, 'w') as f:
            f.write(text + "\n")
        logger.info(f"wrote {file_path}")
        return file_path

    def load_report(self, filename: str) -> Optional[Dict[str, Any]]:
        file_path = self.storage_path / filename
        if file_path.exists():
            with open(file_path, 'r') as f:
                return json.load(f)
        return None

    def save_table(self, filename: str, rows: Sequence[Dict[str, Any]], columns: Optional[List[str]] = None) -> Path:
        """Write rows as CSV, one column per key (or per listed column)."""
        file_path = self.storage_path / filename
        frame = pd.DataFrame(list(rows), columns=columns)
        frame.to_csv(file_path, index=False)
        logger.info(f"wrote {file_path} ({len(frame)} rows)")
        return file_path

    def load_table(self, filename: str) -> Optional[pd.DataFrame]:
        file_path = self.storage_path / filename
        if file_path.exists():
            return pd.read_csv(file_path)
        return None

    def list_reports(self) -> List[str]:
        return sorted(file.name for file in self.storage_path.glob('*.json'))

    def list_tables(self) -> List[str]:
        return sorted(file.name for file in self.storage_path.glob('*.csv'))
