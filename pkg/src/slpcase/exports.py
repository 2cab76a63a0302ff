"""Case exporters: canonical JSON, flat CSV, and printable text."""

from __future__ import annotations

import csv
import io

from .casefile import CaseFile, serialize_case
from .errors import UnknownFormat

EXPORT_FORMATS = ("canonical_json", "csv_flat", "printable_text")

CSV_COLUMNS = ("section", "index", "field", "value")


def _csv_flat(case: CaseFile) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(CSV_COLUMNS)
    for key in ("name", "age", "grade", "gender", "background"):
        writer.writerow(["demographics", 0, key, getattr(case, key)])
    for i, a in enumerate(case.assessment_results):
        for key, value in a.to_dict().items():
            writer.writerow(["assessment_results", i, key, value])
    for i, g in enumerate(case.annual_goals):
        for key, value in g.to_dict().items():
            writer.writerow(["annual_goals", i, key, value])
    for i, n in enumerate(case.session_notes):
        for key, value in n.to_dict().items():
            writer.writerow(["session_notes", i, key, value])
    return buf.getvalue()


def _printable(case: CaseFile) -> str:
    lines = [
        "STUDENT CASE FILE",
        "=" * 60,
        f"Name:   {case.name}",
        f"Age:    {case.age}",
        f"Grade:  {case.grade}",
        f"Gender: {case.gender}",
        "",
        "BACKGROUND",
        "-" * 60,
        str(case.background or ""),
        "",
        "ASSESSMENT RESULTS",
        "-" * 60,
    ]
    for a in case.assessment_results:
        lines.append(
            f"{a.assessment_name} ({a.domain}): standard score {a.standard_score}, "
            f"percentile {a.percentile}, severity {a.severity}"
        )
    lines += ["", "ANNUAL GOALS", "-" * 60]
    for g in case.annual_goals:
        lines.append(f"Goal {g.goal_number}: {g.goal_brief}")
        lines.append(f"  {g.goal_annual}")
    lines += ["", "SESSION NOTES", "-" * 60]
    for n in case.session_notes:
        lines.append(f"{n.date} | {n.duration} | {n.setting} | {n.goal_addressed}")
        lines.append(f"  {n.note}")
    lines.append("")
    return "\n".join(lines)


def export_case(case: CaseFile, format: str) -> bytes:
    if format == "canonical_json":
        return serialize_case(case).encode()
    if format == "csv_flat":
        return _csv_flat(case).encode()
    if format == "printable_text":
        return _printable(case).encode()
    raise UnknownFormat(f"format must be one of {EXPORT_FORMATS}, got {format!r}")
