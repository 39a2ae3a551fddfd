"""Report assembly and JSON/CSV emission."""

from __future__ import annotations

import csv
import io
import json
import math
from datetime import datetime, timezone

import numpy as np

REPORT_SCHEMA = "lambertlab.report/1"


def jsonable(obj):
    """Plain-Python copy of `obj`; non-finite floats become None."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else None
    if hasattr(obj, "to_dict"):
        return jsonable(obj.to_dict())
    return obj


def result(name: str, inputs: dict, values: dict, passed: bool, tolerances: dict | None = None,
           error: str | None = None) -> dict:
    out = {"name": name, "inputs": inputs, "values": values, "passed": bool(passed),
           "tolerances": tolerances or {}}
    if error is not None:
        out["error"] = error
    return out


def make_report(command: str, inputs: dict, results: list, timestamp: bool = False,
                **extra) -> dict:
    rep = {"schema": REPORT_SCHEMA, "command": command, "inputs": inputs,
           "results": results, "passed": all(r["passed"] for r in results)}
    rep.update(extra)
    if timestamp:
        rep["generated_at"] = datetime.now(timezone.utc).isoformat(timespec="seconds")
    return jsonable(rep)


def dumps(report: dict) -> str:
    return json.dumps(report, indent=2, allow_nan=False) + "\n"


def bands_csv(report: dict) -> str:
    """Flatten every fredholm band table in `report` to rows check,n,measure."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["check", "n", "measure"])
    for r in report["results"]:
        bands = r.get("values", {}).get("bands")
        if not bands:
            continue
        for n, m in bands:
            w.writerow([r["name"], n, repr(m)])
        w.writerow([r["name"], "residual", repr(r["values"].get("residual_measure", 0.0))])
    return buf.getvalue()
