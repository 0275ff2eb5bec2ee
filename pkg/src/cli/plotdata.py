"""
Tidy CSV tables from stored result records.

Columns by payload kind, after a leading ``record`` index:

    fit      x, y, fit_y
    radial   r, u, flux
    grid     x, y, value
    report   theorem, relation, lhs, rhs, slack, tolerance, passed

A verify record counts as ``fit`` when it carries a fit, else ``report``.
"""

import io
import logging
from typing import Any, Dict, List

import numpy as np
import pandas as pd

from src.utils.validators import ConfigError

logger = logging.getLogger(__name__)

COLUMNS = {
    "fit": ["x", "y", "fit_y"],
    "radial": ["r", "u", "flux"],
    "grid": ["x", "y", "value"],
    "report": ["theorem", "relation", "lhs", "rhs", "slack", "tolerance", "passed"],
}


def plot_kind(payload: Dict[str, Any]) -> str:
    """Table kind of a record payload."""
    kind = payload.get("kind")
    if kind == "check":
        return "fit" if payload.get("fit") else "report"
    if kind in COLUMNS:
        return kind
    raise ConfigError(f"payload kind '{kind}' has no plot table", "kind")


def _rows(payload: Dict[str, Any], kind: str) -> Dict[str, List[Any]]:
    if kind == "fit":
        fit = payload["fit"] if payload.get("kind") == "check" else payload
        xs = np.asarray(fit["xs"], dtype=float)
        fitted = np.exp(fit["intercept"]) * xs ** fit["slope"]
        return {"x": xs, "y": fit["ys"], "fit_y": fitted}
    if kind == "radial":
        profile = payload["profile"]
        return {"r": profile["r"], "u": profile["u"], "flux": profile["flux"]}
    if kind == "grid":
        field = payload["field"]
        return {"x": field["x"], "y": field["y"], "value": field["value"]}
    reports = payload.get("reports", [])
    return {col: [r[col] for r in reports] for col in COLUMNS["report"]}


def emit_plotdata(records: List[Dict[str, Any]]) -> pd.DataFrame:
    """Concatenate records of one payload kind into a single table.

    Raises:
        ConfigError: records of different kinds
    """
    if not records:
        return pd.DataFrame(columns=["record"])

    kinds = [plot_kind(record["payload"]) for record in records]
    if len(set(kinds)) > 1:
        raise ConfigError(f"records mix payload kinds {sorted(set(kinds))}", "inputs")

    kind = kinds[0]
    frames = []
    for index, record in enumerate(records):
        frame = pd.DataFrame(_rows(record["payload"], kind), columns=COLUMNS[kind])
        frame.insert(0, "record", index)
        frames.append(frame)
    logger.debug(f"  plot data: {len(records)} {kind} record(s)")
    return pd.concat(frames, ignore_index=True)


def to_csv_text(frame: pd.DataFrame) -> str:
    buffer = io.StringIO()
    frame.to_csv(buffer, index=False, float_format="%.17g", lineterminator="\n")
    return buffer.getvalue()
