"""Deterministic report serialization: JSON, CSV and markdown.

Every number is an exact rational string; ordering is fixed (graded-lex
monomials, sorted prime pairs), so identical configs give identical bytes.
"""

from __future__ import annotations

import io
import json


def to_json(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


def _flatten(prefix: str, value, rows: list) -> None:
    if isinstance(value, dict):
        for k in sorted(value):
            _flatten(f"{prefix}.{k}" if prefix else str(k), value[k], rows)
    elif isinstance(value, list):
        if value and all(isinstance(v, dict) for v in value):
            for i, v in enumerate(value):
                _flatten(f"{prefix}[{i}]", v, rows)
        else:
            rows.append((prefix, json.dumps(value)))
    else:
        rows.append((prefix, "" if value is None else str(value)))


def to_csv(report: dict) -> str:
    rows: list = []
    _flatten("", report, rows)
    buf = io.StringIO()
    buf.write("key,value\n")
    for key, val in rows:
        val = val.replace('"', '""')
        buf.write(f'{key},"{val}"\n')
    return buf.getvalue()


def _md_table(headers: list, rows: list) -> str:
    out = ["| " + " | ".join(headers) + " |",
           "| " + " | ".join("---" for _ in headers) + " |"]
    for row in rows:
        out.append("| " + " | ".join(str(c) for c in row) + " |")
    return "\n".join(out) + "\n"


def to_markdown(report: dict) -> str:
    cmd = report.get("command", "report")
    lines = [f"# arithchern report: {cmd}", ""]
    meta = {k: v for k, v in sorted(report.items())
            if not isinstance(v, (dict, list))}
    if meta:
        lines.append(_md_table(["field", "value"], sorted(meta.items())))
    if "results" in report and isinstance(report["results"], list):
        for item in report["results"]:
            title = item.get("title") or item.get("form") or item.get("p") or ""
            lines.append(f"## {title}")
            lines.append("")
            scalars = {k: v for k, v in sorted(item.items())
                       if not isinstance(v, (dict, list)) and k != "title"}
            if scalars:
                lines.append(_md_table(["field", "value"], sorted(scalars.items())))
            coeffs = item.get("coefficients")
            if coeffs:
                lines.append(_md_table(
                    ["entry", "monomial", "degree", "value"],
                    [(c["entry"], c["monomial"], c["degree"], c["value"]) for c in coeffs],
                ))
            witness = item.get("divisibility_witness")
            if witness:
                lines.append("### divisibility witnesses")
                lines.append(_md_table(
                    ["entry", "monomial", "val_p", "val_p2"],
                    [(w["entry"], w["monomial"], w["valuation_p"], w["valuation_p2"])
                     for w in witness],
                ))
            lines.append("")
    return "\n".join(lines)


def render(report: dict, fmt: str) -> str:
    if fmt == "json":
        return to_json(report)
    if fmt == "csv":
        return to_csv(report)
    if fmt == "markdown":
        return to_markdown(report)
    raise ValueError(f"unknown format {fmt!r}")
