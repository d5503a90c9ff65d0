"""Report serialization: JSON (full) and CSV (one row per estimate or test)."""

from __future__ import annotations

import csv
import io
import json
import math
import os
from pathlib import Path

from .experiments import Estimate, ExperimentReport, TestOutcome

SIG_DIGITS = 9


def fmt(x) -> str:
    """Decimal with 9 significant digits, independent of locale."""
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, int):
        return str(x)
    if isinstance(x, float):
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return f"{x:.{SIG_DIGITS}g}"
    return str(x)


def _round(obj):
    if isinstance(obj, float):
        return float(f"{obj:.{SIG_DIGITS}g}") if math.isfinite(obj) else str(obj)
    if isinstance(obj, dict):
        return {k: _round(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round(v) for v in obj]
    return obj


def report_json(report: ExperimentReport) -> str:
    return json.dumps(_round(report.to_dict()), indent=2, sort_keys=False)


def _num_or_none(v):
    if v is None or v == "":
        return None
    return float(v)


def report_from_dict(obj: dict) -> ExperimentReport:
    """Inverse of :func:`report_json` (values keep their 9-digit rounding)."""
    try:
        est = {k: Estimate(_num_or_none(e["value"]), _num_or_none(e.get("stderr")))
               for k, e in obj["estimates"].items()}
        tests = {k: TestOutcome(_num_or_none(t["statistic"]), bool(t["passed"]),
                                _num_or_none(t.get("p_value")), t.get("threshold"), t.get("detail", ""))
                 for k, t in obj["tests"].items()}
        return ExperimentReport(obj["experiment_id"], est, tests, obj["verdict"],
                                obj.get("provenance", {}), obj.get("params", {}), obj.get("notes", []))
    except (KeyError, TypeError, AttributeError, ValueError) as exc:
        raise ValueError(f"not an experiment report: {exc!r}") from None


def report_csv(report: ExperimentReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["experiment_id", "kind", "name", "value", "stderr", "p_value", "threshold", "passed"])
    for name, e in report.estimates.items():
        w.writerow([report.experiment_id, "estimate", name, fmt(e.value), fmt(e.stderr), "", "", ""])
    for name, t in report.tests.items():
        thr = t.threshold
        if isinstance(thr, (list, tuple)):
            thr = "[" + ", ".join(fmt(float(v)) for v in thr) + "]"
        w.writerow([report.experiment_id, "test", name, fmt(t.statistic), "", fmt(t.p_value),
                    fmt(thr), fmt(t.passed)])
    w.writerow([report.experiment_id, "verdict", "verdict", report.verdict, "", "", "", ""])
    return buf.getvalue()


def summary_lines(report: ExperimentReport) -> list:
    lines = []
    for name, e in report.estimates.items():
        se = "" if e.stderr is None else f" +/- {fmt(e.stderr)}"
        lines.append(f"estimate {name} = {fmt(e.value)}{se}")
    for name, t in report.tests.items():
        pv = "" if t.p_value is None else f" p={fmt(t.p_value)}"
        thr = "" if t.threshold is None else f" [{t.threshold if isinstance(t.threshold, str) else fmt(t.threshold) if not isinstance(t.threshold, (list, tuple)) else ', '.join(fmt(float(v)) for v in t.threshold)}]"
        lines.append(f"test {name}: {'PASS' if t.passed else 'FAIL'} stat={fmt(t.statistic)}{pv}{thr}")
    lines.append(f"verdict {report.experiment_id}: {report.verdict.upper()}")
    return lines


def write_report(report: ExperimentReport, out_dir, fmt_: str = "both") -> list:
    """Write ``<id>.json`` and/or ``<id>.csv`` into ``out_dir``; returns the paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    if fmt_ in ("json", "both"):
        p = out / f"{report.experiment_id}.json"
        p.write_text(report_json(report), encoding="utf-8")
        paths.append(p)
    if fmt_ in ("csv", "both"):
        p = out / f"{report.experiment_id}.csv"
        p.write_text(report_csv(report), encoding="utf-8")
        paths.append(p)
    return paths
