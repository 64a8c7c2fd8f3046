"""
Result files: deterministic CSV tables, JSON reports and SVG plots
"""

import json
from enum import Enum
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence, Union

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
import pandas as pd  # noqa: E402

CSV_FLOAT_FORMAT = "%.17g"

PathLike = Union[str, Path]


def _flatten(row: Dict[str, Any]) -> Dict[str, Any]:
    flat: Dict[str, Any] = {}
    for key, value in row.items():
        if isinstance(value, Enum):
            value = value.value
        if isinstance(value, (complex, np.complexfloating)):
            flat[f"{key}_re"] = float(value.real)
            flat[f"{key}_im"] = float(value.imag)
        elif isinstance(value, np.generic):
            flat[key] = value.item()
        else:
            flat[key] = value
    return flat


def flatten_rows(rows: Iterable[Dict[str, Any]]) -> List[Dict[str, Any]]:
    """Split complex values into <name>_re / <name>_im columns."""
    return [_flatten(row) for row in rows]


def write_csv(rows: Sequence[Dict[str, Any]], path: PathLike, columns: Optional[List[str]] = None) -> Path:
    """
    Write rows as CSV with one header row and 17 significant digits.

    Column order is the first-seen order of keys unless given explicitly.

    Args:
        rows: Result rows; complex values become two columns
        path: Output file
        columns: Optional explicit column order (after flattening)

    Returns:
        Path of the written file
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    flat = flatten_rows(rows)
    if columns is None:
        columns = []
        for row in flat:
            columns.extend(key for key in row if key not in columns)
    frame = pd.DataFrame(flat, columns=columns)
    frame.to_csv(path, index=False, float_format=CSV_FLOAT_FORMAT, lineterminator="\n")
    return path


def write_json(payload: Dict[str, Any], path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True, default=str) + "\n", encoding="utf-8")
    return path


def plot_rows(
    rows: Sequence[Dict[str, Any]],
    x: str,
    ys: Sequence[str],
    path: PathLike,
    group: Optional[str] = None,
    title: str = "",
    log_y: bool = False,
) -> Path:
    """
    Line plot of flattened rows saved as SVG; one line per (y column, group value).

    Returns:
        Path of the written file
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame = pd.DataFrame(flatten_rows(rows))
    fig, ax = plt.subplots(figsize=(6, 4), constrained_layout=True)
    groups = [(None, frame)] if group is None or group not in frame else list(frame.groupby(group, sort=True))
    for value, part in groups:
        for column in ys:
            if column not in part:
                continue
            label = column if value is None else f"{column} ({group}={value})"
            ax.plot(part[x], part[column], label=label)
    ax.set_xlabel(x)
    if log_y:
        ax.set_yscale("log")
    if title:
        ax.set_title(title)
    ax.grid(True, alpha=0.3)
    ax.legend(loc="best", fontsize=8)
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    return path
