"""Table reports and their CSV / Markdown serialization."""
from __future__ import annotations

import csv
import io
import json
import numbers
from dataclasses import dataclass, field


@dataclass
class TableReport:
    label: str
    headers: list
    rows: list
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        for row in self.rows:
            if len(row) != len(self.headers):
                raise ValueError(f"{self.label}: row {row!r} does not match {len(self.headers)} headers")

    def column(self, name: str) -> list:
        i = self.headers.index(name)
        return [row[i] for row in self.rows]


def _cell(value, fmt: str) -> str:
    if isinstance(value, bool):
        return "pass" if value else "FAIL"
    if isinstance(value, numbers.Integral):
        return str(value)
    if isinstance(value, numbers.Real):
        return fmt % value
    return str(value)


def emit(report: TableReport, format: str = "csv", precision: str = "table") -> bytes:
    """Serialize a report; ``precision='full'`` writes ``%.17g`` cells."""
    if format == "csv":
        fmt = "%.17g" if precision == "full" else "%.4e"
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(report.headers)
        for row in report.rows:
            writer.writerow([_cell(v, fmt) for v in row])
        return buf.getvalue().encode()
    if format == "md":
        fmt = "%.17g" if precision == "full" else "%.2e"
        lines = [f"### {report.label}", ""]
        lines.append("| " + " | ".join(str(h) for h in report.headers) + " |")
        lines.append("|" + "|".join("---" for _ in report.headers) + "|")
        for row in report.rows:
            lines.append("| " + " | ".join(_cell(v, fmt) for v in row) + " |")
        return ("\n".join(lines) + "\n").encode()
    raise ValueError(f"unknown format {format!r}")


def emit_all(reports: list, format: str = "csv") -> bytes:
    """Concatenate several reports; CSV blocks are introduced by ``# label`` lines."""
    chunks = []
    for rep in reports:
        body = emit(rep, format)
        chunks.append((f"# {rep.label}\n".encode() + body) if format == "csv" else body)
    return b"\n".join(chunks)


def write_reports(reports: list, out: str, format: str = "csv") -> list:
    """Write each report to ``<out>/<label>.<ext>`` plus a full-precision CSV sidecar
    and a provenance JSON file. Returns the written paths."""
    import os

    os.makedirs(out, exist_ok=True)
    ext = "csv" if format == "csv" else "md"
    paths = []
    for rep in reports:
        base = os.path.join(out, rep.label)
        with open(f"{base}.{ext}", "wb") as fh:
            fh.write(emit(rep, format))
        with open(f"{base}.full.csv", "wb") as fh:
            fh.write(emit(rep, "csv", precision="full"))
        with open(f"{base}.provenance.json", "w") as fh:
            json.dump(rep.provenance, fh, indent=2, sort_keys=True, default=str)
            fh.write("\n")
        paths.append(f"{base}.{ext}")
    return paths
