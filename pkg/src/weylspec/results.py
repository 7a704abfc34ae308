"""
Result containers and file emission for weylspec tasks.

Tables become versioned CSV files (first line ``# weylspec-<name> v1``,
numbers at 17 significant digits); scalar summaries become JSON. A run
directory additionally holds manifest.json, or diagnostic.json when the
run failed numerically.
"""

import json
import os
import time
from typing import Any, Dict, List, Optional

import numpy as np

FORMAT_VERSION = 1


def to_jsonable(obj: Any) -> Any:
    """numpy scalars / arrays, complex numbers and tuples -> plain JSON types."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    return obj


class TaskResult:
    """
    Output of one task: named tables plus a scalar summary.

    Attributes:
        task: Task name.
        tables: {name: {column: 1-d array}}; each becomes <name>.csv.
        summary: JSON-serializable scalars and small lists.
        properties: {invariant name: passed} for the manifest.
    """

    def __init__(
        self,
        task: str,
        tables: Optional[Dict[str, Dict[str, np.ndarray]]] = None,
        summary: Optional[Dict[str, Any]] = None,
        properties: Optional[Dict[str, bool]] = None,
    ):
        self.task = task
        self.tables = tables or {}
        self.summary = summary or {}
        self.properties = properties or {}

    def __getitem__(self, key):
        """result['<table>'] returns the column dict; otherwise a summary entry."""
        if key in self.tables:
            return self.tables[key]
        if key in self.summary:
            return self.summary[key]
        raise KeyError(key)

    def __len__(self):
        return len(self.tables)

    def __repr__(self):
        return (
            f"TaskResult({self.task}: {len(self.tables)} tables, "
            f"{len(self.summary)} summary keys)"
        )

    def to_dataframe(self, name: Optional[str] = None):
        """
        Convert one table to a pandas DataFrame.

        Args:
            name: Table name; may be omitted when there is exactly one.

        Returns:
            DataFrame with the table's columns in insertion order.
        """
        try:
            import pandas as pd
        except ImportError:
            raise ImportError(
                "pandas is required for to_dataframe(). "
                "Install with: pip install pandas"
            )
        if name is None:
            if len(self.tables) != 1:
                raise KeyError(f"Choose a table: {', '.join(self.tables)}")
            name = next(iter(self.tables))
        columns = self.tables[name]
        return pd.DataFrame({k: np.asarray(v) for k, v in columns.items()})

    def write(self, directory: str, precision: int = 17, formats=("csv", "json")) -> List[str]:
        """Write every table as CSV and the summary as <task>.json; returns file paths."""
        os.makedirs(directory, exist_ok=True)
        written = []
        if "csv" in formats:
            for name in self.tables:
                path = os.path.join(directory, f"{name}.csv")
                write_csv(path, name, self.to_dataframe(name), precision)
                written.append(path)
        if "json" in formats:
            path = os.path.join(directory, f"{self.task}.json")
            write_json(path, self.summary)
            written.append(path)
        return written


def write_csv(path: str, kind: str, frame, precision: int = 17) -> None:
    """CSV with a versioned comment header and %.<precision>g numbers."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(f"# weylspec-{kind} v{FORMAT_VERSION}\n")
        frame.to_csv(fh, index=False, float_format=f"%.{precision}g", lineterminator="\n")


def write_json(path: str, payload: Dict[str, Any]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(to_jsonable(payload), fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_manifest(
    directory: str,
    config: Dict[str, Any],
    result: TaskResult,
    wall_time: float,
    files: List[str],
) -> str:
    """manifest.json: config echo, version, wall time, error estimates, property statuses."""
    from . import __version__

    manifest = {
        "format_version": FORMAT_VERSION,
        "package_version": __version__,
        "task": result.task,
        "config": config,
        "created": time.strftime("%Y-%m-%dT%H:%M:%S", time.gmtime()),
        "wall_time_s": wall_time,
        "summary": result.summary,
        "properties": [
            {"name": name, "status": "pass" if ok else "fail"}
            for name, ok in result.properties.items()
        ],
        "files": sorted(os.path.basename(f) for f in files),
    }
    path = os.path.join(directory, "manifest.json")
    write_json(path, manifest)
    return path


def write_diagnostic(directory: str, task: str, config: Dict[str, Any], error: Exception) -> str:
    """diagnostic.json for a run that stopped on a numerical failure."""
    from . import __version__

    os.makedirs(directory, exist_ok=True)
    payload = {
        "format_version": FORMAT_VERSION,
        "package_version": __version__,
        "task": task,
        "config": config,
        "error": type(error).__name__,
        "message": str(error),
        "location": getattr(error, "location", None),
    }
    path = os.path.join(directory, "diagnostic.json")
    write_json(path, payload)
    return path
