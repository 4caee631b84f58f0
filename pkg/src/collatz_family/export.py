"""Serialization of trajectories, reports and matrices (CSV, JSON, HTML, text)."""
from __future__ import annotations

import html
import json
from fractions import Fraction

from .conjugacy import VerificationReport
from .dynamics import CollatzT, FamilyF, MapKind, StopReason, Trajectory
from .matrix import COLORS, HALF, AffineEntry, GenMatrix, MatrixRow, Mode, cell_chroma

# --- maps and trajectories -----------------------------------------------------


def kind_to_dict(kind: MapKind) -> dict:
    if isinstance(kind, FamilyF):
        return {"map": "F", "n": kind.n}
    return {"map": "T", "n": None}


def kind_from_dict(data: dict) -> MapKind:
    if data["map"] == "F":
        return FamilyF.of(int(data["n"]))
    return CollatzT()


def trajectory_to_dict(traj: Trajectory) -> dict:
    return {
        **kind_to_dict(traj.kind),
        "start": traj.start,
        "terms": list(traj.terms),
        "steps": traj.steps,
        "stop": traj.stop.value,
        "cycle": list(traj.cycle) if traj.cycle is not None else None,
    }


def trajectory_from_dict(data: dict) -> Trajectory:
    cycle = data.get("cycle")
    return Trajectory(
        kind_from_dict(data),
        data["start"],
        tuple(data["terms"]),
        StopReason(data["stop"]),
        tuple(cycle) if cycle is not None else None,
    )


def dumps(obj: dict) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False)


def report_to_json(report: VerificationReport) -> str:
    return dumps(report.to_dict())


def report_from_json(text: str) -> VerificationReport:
    return VerificationReport.from_dict(json.loads(text))


def report_to_text(report: VerificationReport) -> str:
    status = "PASS" if report.passed else "FAIL"
    params = ", ".join(f"{k}={v}" for k, v in report.params.items())
    lines = [f"{status} {report.identity.value} [{params}] checked={report.checked} failures={report.failure_count}"]
    for key, value in report.observed.items():
        lines.append(f"  {key}: {value}")
    for failure in report.failures:
        lines.append("  counterexample: " + " ".join(map(str, failure)))
    return "\n".join(lines)


# --- matrices ------------------------------------------------------------------


def _n_to_json(n):
    if n is None:
        return None
    if isinstance(n, Fraction):
        return "-1/2" if n == HALF else str(n)
    return n


def _n_from_json(value):
    if value is None:
        return None
    if value == "-1/2":
        return HALF
    return int(value)


def format_cell(cell) -> str:
    return str(cell)


def matrix_to_csv(m: GenMatrix) -> str:
    """One line per row, comma-separated, no header. Symbolic cells render as ``2n+c``."""
    return "".join(",".join(format_cell(c) for c in row.cells) + "\n" for row in m.rows)


def matrix_to_text(m: GenMatrix) -> str:
    cells = [[format_cell(c) for c in row.cells] for row in m.rows]
    width = max((len(c) for row in cells for c in row), default=1)
    return "".join(" ".join(c.rjust(width) for c in row) + "\n" for row in cells)


def matrix_to_dict(m: GenMatrix) -> dict:
    key = "offset" if m.mode is Mode.SYMBOLIC else "value"

    def raw(cell):
        return cell.offset if isinstance(cell, AffineEntry) else cell

    return {
        "mode": m.mode.value,
        "M": m.M,
        "k": m.k,
        "n": _n_to_json(m.n),
        "descending": m.descending,
        "rows": [
            {
                "start": raw(row.start),
                "cells": [{key: raw(c), "chroma": cell_chroma(m, c).residue} for c in row.cells],
            }
            for row in m.rows
        ],
    }


def matrix_from_dict(data: dict) -> GenMatrix:
    mode = Mode(data["mode"])
    rows = []
    for row in data["rows"]:
        if mode is Mode.SYMBOLIC:
            rows.append(
                MatrixRow(AffineEntry(row["start"]), tuple(AffineEntry(c["offset"]) for c in row["cells"]))
            )
        else:
            rows.append(MatrixRow(row["start"], tuple(c["value"] for c in row["cells"])))
    return GenMatrix(mode, data["M"], data["k"], tuple(rows), _n_from_json(data["n"]), data["descending"])


def matrix_to_json(m: GenMatrix) -> str:
    return dumps(matrix_to_dict(m))


def matrix_from_json(text: str) -> GenMatrix:
    return matrix_from_dict(json.loads(text))


_CSS = """
body { font-family: sans-serif; margin: 1.5em; }
table.matrix { border-collapse: collapse; }
table.matrix td { border: 1px solid #555; padding: 3px 8px; text-align: right; font-family: monospace; }
.chroma-0 { background: #7fd67f; }
.chroma-1 { background: #7fa8e6; }
.chroma-2 { background: #f2e36b; }
.chroma-3 { background: #e67f7f; }
table.legend td { padding: 2px 10px; }
"""

_LEGEND_FORMS = ("2n+4j+1", "2n+4j+2", "2n+4j+3", "2n+4j+4")
_COLLATZ_FORMS = ("4j", "4j+1", "4j+2", "4j+3")


def _title(m: GenMatrix) -> str:
    if m.mode is Mode.SYMBOLIC:
        return f"Generalized Collatz matrix T_n(2n+2, 2n+{m.M}, {m.k})"
    if m.mode is Mode.COLLATZ_HALF:
        return f"Collatz matrix T_-1/2(1, {m.M - 1}, {m.k})"
    return f"Matrix T_{m.n}({2 * m.n + 2}, {2 * m.n + m.M}, {m.k})"


def matrix_to_html(m: GenMatrix) -> str:
    """Single HTML5 page, inline CSS, one ``<td class="chroma-r">`` per cell."""
    title = html.escape(_title(m))
    body = []
    for row in m.rows:
        tds = "".join(
            f'<td class="chroma-{cell_chroma(m, c).residue}">{html.escape(format_cell(c))}</td>' for c in row.cells
        )
        body.append(f"<tr>{tds}</tr>")
    legend = "".join(
        f'<tr><td class="chroma-{r}">{COLORS[r]}</td><td>{_LEGEND_FORMS[r]}</td><td>{_COLLATZ_FORMS[r]}</td></tr>'
        for r in range(4)
    )
    return (
        "<!DOCTYPE html>\n"
        '<html lang="en">\n<head>\n<meta charset="utf-8">\n'
        f"<title>{title}</title>\n<style>{_CSS}</style>\n</head>\n<body>\n"
        f"<h1>{title}</h1>\n"
        '<table class="matrix">\n' + "\n".join(body) + "\n</table>\n"
        "<h2>Legend</h2>\n"
        f'<table class="legend">\n{legend}\n</table>\n'
        "</body>\n</html>\n"
    )


def render_matrix(m: GenMatrix, fmt: str) -> str:
    if fmt == "csv":
        return matrix_to_csv(m)
    if fmt == "json":
        return matrix_to_json(m) + "\n"
    if fmt == "html":
        return matrix_to_html(m)
    return matrix_to_text(m)
