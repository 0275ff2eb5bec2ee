"""
Result records: payload conversion, canonical digests and JSON emission.

Numbers are written with Python's shortest round-trip float repr (at most
17 significant digits), so identical results serialize to identical bytes.
Non-finite values become null.
"""

import json
import hashlib
import logging
import math
from dataclasses import asdict
from datetime import datetime, timezone
from enum import Enum
from typing import Any, Dict

import numpy as np

from src.models.entities import (
    CellClass,
    ComparisonReport,
    EigenResult,
    EigenResult2D,
    FitReport,
    RadialProfile,
    ResultRecord,
)

logger = logging.getLogger(__name__)

TOOL_VERSION = "1.0.0"


def sanitize(obj: Any) -> Any:
    """Plain JSON types: numpy to Python, tuples to lists, non-finite to None."""
    if isinstance(obj, dict):
        return {str(k): sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [sanitize(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [sanitize(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        value = float(obj)
        return value if math.isfinite(value) else None
    if isinstance(obj, Enum):
        return obj.value
    return obj


def canonical(obj: Any) -> Any:
    """Digest form: sorted keys, every number as a float."""
    obj = sanitize(obj)
    if isinstance(obj, dict):
        return {k: canonical(obj[k]) for k in sorted(obj)}
    if isinstance(obj, list):
        return [canonical(v) for v in obj]
    if isinstance(obj, int) and not isinstance(obj, bool):
        return float(obj)
    return obj


def config_digest(command: str, parameters: Dict[str, Any]) -> str:
    """SHA-256 of the canonical command and parameters."""
    text = json.dumps(
        {"command": command, "parameters": canonical(parameters)},
        sort_keys=True,
        separators=(",", ":"),
    )
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def profile_payload(profile: RadialProfile) -> Dict[str, Any]:
    return {"r": profile.r, "u": profile.value, "flux": profile.flux}


def radial_payload(result: EigenResult) -> Dict[str, Any]:
    return {
        "kind": "radial",
        "problem": result.problem.value,
        "eigenvalue": result.eigenvalue,
        "p": result.p,
        "n": result.space_form.n,
        "kappa": result.space_form.kappa,
        "r1": result.inner_radius,
        "r2": result.outer_radius,
        "boundary_residual": result.boundary_residual,
        "ode_residual": result.ode_residual,
        "iterations": result.bisection_iterations,
        "normalization": result.normalization,
        "bracket": list(result.bracket),
        "profile": profile_payload(result.profile),
    }


def grid_payload(result: EigenResult2D) -> Dict[str, Any]:
    domain = result.field.domain
    X, Y = domain.coordinates()
    keep = domain.cell_class != CellClass.EXTERIOR.value
    shape = domain.shape
    return {
        "kind": "grid",
        "eigenvalue": result.eigenvalue,
        "p": result.p,
        "method": result.method,
        "iterations": result.iterations,
        "final_step": result.final_step,
        "energy_history": result.energy_history,
        "domain": {
            "shape": shape.kind.value,
            "dims": list(shape.dims),
            "offset": shape.hole_offset,
            "layout": shape.layout.value,
            "metric": domain.metric.value,
            "h": domain.h,
            "nx": domain.nx,
            "ny": domain.ny,
            "volume": domain.volume(),
            "hole_volume": domain.hole_volume(),
        },
        "field": {"x": X[keep], "y": Y[keep], "value": np.asarray(result.field.values)[keep]},
    }


def report_payload(report: ComparisonReport) -> Dict[str, Any]:
    data = asdict(report)
    data["relation"] = report.relation.value
    data["as_expected"] = report.as_expected
    return data


def fit_payload(fit: FitReport) -> Dict[str, Any]:
    return {"kind": "fit", **asdict(fit)}


def make_record(command: str, parameters: Dict[str, Any], payload: Dict[str, Any]) -> ResultRecord:
    """Wrap a payload with its digest, tool version and UTC timestamp."""
    return ResultRecord(
        config_digest=config_digest(command, parameters),
        tool_version=TOOL_VERSION,
        timestamp=datetime.now(timezone.utc).isoformat(timespec="seconds"),
        command=command,
        payload=sanitize(payload),
    )


def dumps_record(record: ResultRecord) -> str:
    return json.dumps(sanitize(asdict(record)), sort_keys=True, indent=2, allow_nan=False) + "\n"


def dumps_payload(payload: Dict[str, Any]) -> str:
    """Payload bytes compared by determinism checks."""
    return json.dumps(sanitize(payload), sort_keys=True, separators=(",", ":"), allow_nan=False)
