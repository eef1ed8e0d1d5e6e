"""
Serialize tables, series and verification reports.

JSON table layout (symbolic, one object per multi-index in graded-lex order):

    {"format": "multicharlier-table/1",
     "params": {"r": 2, "sigma": ["1", "2"]},
     "max_total_degree": 2,
     "entries": [{"index": [1, 1], "coeffs": ["2", "-4", "1"], "display": "k^2 - 4*k + 2"}, ...]}

coeffs are ascending powers of k as exact rational strings. CSV tables hold
values at k = 0..kmax instead. Output is byte-deterministic for a given table.
"""

import csv
import io
import json

from charlier import CharlierTable
from series import MSeries

TABLE_FORMAT = "multicharlier-table/1"


def table_to_dict(table: CharlierTable) -> dict:
    return {
        "format": TABLE_FORMAT,
        "params": table.params.to_dict(),
        "max_total_degree": table.max_total_degree,
        "entries": [
            {"index": list(n), "coeffs": table[n].to_strings(), "display": str(table[n])}
            for n in table.indices()
        ],
    }


def table_to_json(table: CharlierTable) -> str:
    return json.dumps(table_to_dict(table), indent=2) + "\n"


def table_to_csv(table: CharlierTable, kmax: int) -> str:
    """Header n1..nr,k=0..k=kmax; one row per index with values C_n(k)."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([f"n{j}" for j in range(1, table.params.r + 1)] + [f"k={k}" for k in range(kmax + 1)])
    for n in table.indices():
        poly = table[n]
        writer.writerow(list(n) + [str(poly.evaluate(k)) for k in range(kmax + 1)])
    return buf.getvalue()


def series_to_dict(f: MSeries) -> dict:
    return {
        "r": f.r,
        "cutoff": f.cutoff,
        "terms": [{"exp": list(m), "coeff": str(c)} for m, c in f.terms()],
    }


def series_to_json(f: MSeries) -> str:
    return json.dumps(series_to_dict(f), indent=2) + "\n"


# ============================================================================
# Reports
# ============================================================================

def _failure_count(check: dict) -> int:
    if "failures" in check:
        return len(check["failures"])
    return sum(1 for c in check.get("conditions", []) if not c["pass"])


def report_to_json(report: dict) -> str:
    return json.dumps(report, indent=2) + "\n"


def report_to_csv(report: dict) -> str:
    """One summary row per check: suite, check, pass, checked, failures."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["suite", "check", "pass", "checked", "failures"])
    for suite in report["suites"]:
        for check in suite["checks"]:
            checked = check.get("checked", check.get("probes", len(check.get("conditions", []))))
            writer.writerow([suite["suite"], check["check"], str(check["pass"]).lower(), checked, _failure_count(check)])
    return buf.getvalue()


def report_to_text(report: dict) -> str:
    lines = ["", "[multicharlier verification]", ""]
    for suite in report["suites"]:
        failing = [c for c in suite["checks"] if not c["pass"]]
        mark = "PASS" if not failing else "FAIL"
        lines.append(f"{mark}  {suite['suite']} ({len(suite['checks'])} checks)")
        for check in failing:
            lines.append(f"  {check['check']}: {_failure_count(check)} failure(s)")
            first = (check.get("failures") or [c for c in check.get("conditions", []) if not c["pass"]])[:1]
            if first:
                lines.append(f"    first: {json.dumps(first[0])}")
    lines.append("")
    lines.append("PASSED: all assertions hold" if report["pass"] else "FAILED: see failing checks above")
    return "\n".join(lines) + "\n"


def render_report(report: dict, fmt: str) -> str:
    if fmt == "json":
        return report_to_json(report)
    if fmt == "csv":
        return report_to_csv(report)
    return report_to_text(report)
