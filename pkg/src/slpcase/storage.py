"""Single-file SQLite store for cases, feedback, and error tags.

Cases are stored as canonical JSON so a loaded case re-serializes to the
same bytes. Referential integrity is enforced: feedback and error tags
require an existing case, and case deletion is refused while dependents
exist.
"""

from __future__ import annotations

import json
import sqlite3
import uuid
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from .casefile import CaseFile, parse_case_json, serialize_case
from .errors import IntegrityError, InvalidParameters, NotFound, StorageIO
from .orchestrator import Provenance
from .taxonomy import DisorderType, GradeLevel

ERROR_TAG_CATEGORIES = (
    "developmental_inappropriateness",
    "disorder_goal_misalignment",
    "internal_inconsistency",
    "documentation_violation",
    "cultural_insensitivity",
)

RATING_FIELDS = (
    "clinical_accuracy",
    "documentation_quality",
    "educational_utility",
    "cultural_appropriateness",
)

_SCHEMA = """
CREATE TABLE IF NOT EXISTS cases (
    case_id TEXT PRIMARY KEY,
    case_json TEXT NOT NULL,
    provenance_json TEXT NOT NULL,
    disorders TEXT NOT NULL,
    grade_index INTEGER,
    severity TEXT,
    model_id TEXT,
    created_at TEXT NOT NULL
);
CREATE TABLE IF NOT EXISTS feedback (
    feedback_id TEXT PRIMARY KEY,
    case_id TEXT NOT NULL REFERENCES cases(case_id),
    reviewer_id TEXT NOT NULL,
    clinical_accuracy INTEGER NOT NULL,
    documentation_quality INTEGER NOT NULL,
    educational_utility INTEGER NOT NULL,
    cultural_appropriateness INTEGER NOT NULL,
    free_text TEXT,
    created_at TEXT NOT NULL
);
CREATE TABLE IF NOT EXISTS error_tags (
    tag_id TEXT PRIMARY KEY,
    case_id TEXT NOT NULL REFERENCES cases(case_id),
    category TEXT NOT NULL,
    severe INTEGER NOT NULL DEFAULT 0,
    source TEXT NOT NULL,
    created_at TEXT NOT NULL
);
"""


@dataclass
class CaseRecord:
    case_id: str
    case: CaseFile
    provenance: Provenance
    disorders: list[DisorderType]
    created_at: str


@dataclass
class FeedbackRecord:
    feedback_id: str
    case_id: str
    reviewer_id: str
    ratings: dict[str, int]
    free_text: str = ""
    created_at: str = ""


@dataclass
class ErrorTag:
    tag_id: str
    case_id: str
    category: str
    severe: bool = False
    source: str = "automated"
    created_at: str = ""


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


def _case_severity(case: CaseFile) -> str:
    for a in case.assessment_results:
        if isinstance(a.severity, str):
            return a.severity
    return ""


def _grade_index(case: CaseFile) -> int | None:
    try:
        return GradeLevel.from_name(case.grade).index
    except (ValueError, TypeError):
        return None


class CaseStore:
    def __init__(self, path: str | Path):
        self.path = str(path)
        try:
            self._conn = sqlite3.connect(self.path, check_same_thread=False)
        except sqlite3.Error as exc:
            raise StorageIO(f"cannot open store at {self.path}: {exc}") from exc
        self._conn.row_factory = sqlite3.Row
        self._conn.execute("PRAGMA foreign_keys = ON")
        self._conn.executescript(_SCHEMA)
        self._conn.commit()

    def close(self) -> None:
        self._conn.close()

    # --- cases ---------------------------------------------------------------

    def save_case(
        self,
        case: CaseFile,
        provenance: Provenance,
        disorders: list[DisorderType],
        case_id: str | None = None,
        created_at: str | None = None,
    ) -> str:
        case_id = case_id or uuid.uuid4().hex
        self._conn.execute(
            "INSERT INTO cases VALUES (?, ?, ?, ?, ?, ?, ?, ?)",
            (
                case_id,
                serialize_case(case),
                json.dumps(provenance.to_dict()),
                ",".join(d.name for d in disorders),
                _grade_index(case),
                _case_severity(case),
                provenance.model_id,
                created_at or _now(),
            ),
        )
        self._conn.commit()
        return case_id

    def _record(self, row: sqlite3.Row) -> CaseRecord:
        return CaseRecord(
            case_id=row["case_id"],
            case=parse_case_json(row["case_json"]),
            provenance=Provenance(**json.loads(row["provenance_json"])),
            disorders=[DisorderType[n] for n in row["disorders"].split(",") if n],
            created_at=row["created_at"],
        )

    def load_case(self, case_id: str) -> CaseRecord:
        row = self._conn.execute(
            "SELECT * FROM cases WHERE case_id = ?", (case_id,)
        ).fetchone()
        if row is None:
            raise NotFound(f"no case with id {case_id!r}")
        return self._record(row)

    def search_cases(
        self,
        disorder: DisorderType | None = None,
        grade_min: GradeLevel | None = None,
        grade_max: GradeLevel | None = None,
        severity: str | None = None,
    ) -> list[CaseRecord]:
        """All records matching every provided filter, ordered by
        (created_at, case_id)."""
        clauses = []
        params: list = []
        if grade_min is not None:
            clauses.append("grade_index >= ?")
            params.append(grade_min.index)
        if grade_max is not None:
            clauses.append("grade_index <= ?")
            params.append(grade_max.index)
        if severity is not None:
            clauses.append("severity = ?")
            params.append(severity)
        sql = "SELECT * FROM cases"
        if clauses:
            sql += " WHERE " + " AND ".join(clauses)
        sql += " ORDER BY created_at, case_id"
        records = [self._record(r) for r in self._conn.execute(sql, params)]
        if disorder is not None:
            records = [r for r in records if disorder in r.disorders]
        return records

    def delete_case(self, case_id: str) -> None:
        dependents = self._conn.execute(
            "SELECT (SELECT COUNT(*) FROM feedback WHERE case_id = ?) + "
            "(SELECT COUNT(*) FROM error_tags WHERE case_id = ?)",
            (case_id, case_id),
        ).fetchone()[0]
        if dependents:
            raise IntegrityError(
                f"case {case_id!r} has {dependents} dependent record(s); delete them first"
            )
        cursor = self._conn.execute("DELETE FROM cases WHERE case_id = ?", (case_id,))
        if cursor.rowcount == 0:
            raise NotFound(f"no case with id {case_id!r}")
        self._conn.commit()

    # --- feedback ---------------------------------------------------------------

    def save_feedback(
        self,
        case_id: str,
        reviewer_id: str,
        ratings: dict[str, int],
        free_text: str = "",
    ) -> str:
        missing = [f for f in RATING_FIELDS if f not in ratings]
        if missing:
            raise InvalidParameters(f"missing rating field(s): {missing}")
        for name in RATING_FIELDS:
            value = ratings[name]
            if not isinstance(value, int) or not 1 <= value <= 5:
                raise InvalidParameters(
                    f"rating {name} must be an integer in [1, 5], got {value!r}",
                    code="rating_out_of_range",
                )
        feedback_id = uuid.uuid4().hex
        try:
            self._conn.execute(
                "INSERT INTO feedback VALUES (?, ?, ?, ?, ?, ?, ?, ?, ?)",
                (
                    feedback_id,
                    case_id,
                    reviewer_id,
                    *(ratings[f] for f in RATING_FIELDS),
                    free_text,
                    _now(),
                ),
            )
        except sqlite3.IntegrityError as exc:
            raise IntegrityError(
                f"case {case_id!r} does not exist", code="unknown_case"
            ) from exc
        self._conn.commit()
        return feedback_id

    def feedback_for_case(self, case_id: str) -> list[FeedbackRecord]:
        rows = self._conn.execute(
            "SELECT * FROM feedback WHERE case_id = ? ORDER BY created_at, feedback_id",
            (case_id,),
        ).fetchall()
        return [
            FeedbackRecord(
                feedback_id=r["feedback_id"],
                case_id=r["case_id"],
                reviewer_id=r["reviewer_id"],
                ratings={f: r[f] for f in RATING_FIELDS},
                free_text=r["free_text"] or "",
                created_at=r["created_at"],
            )
            for r in rows
        ]

    # --- error tags -----------------------------------------------------------------

    def save_error_tag(
        self,
        case_id: str,
        category: str,
        severe: bool = False,
        source: str = "automated",
    ) -> str:
        if category not in ERROR_TAG_CATEGORIES:
            raise InvalidParameters(
                f"category must be one of {ERROR_TAG_CATEGORIES}, got {category!r}"
            )
        if source not in ("automated", "reviewer"):
            raise InvalidParameters(f"source must be automated or reviewer, got {source!r}")
        tag_id = uuid.uuid4().hex
        try:
            self._conn.execute(
                "INSERT INTO error_tags VALUES (?, ?, ?, ?, ?, ?)",
                (tag_id, case_id, category, int(severe), source, _now()),
            )
        except sqlite3.IntegrityError as exc:
            raise IntegrityError(
                f"case {case_id!r} does not exist", code="unknown_case"
            ) from exc
        self._conn.commit()
        return tag_id

    def error_report(
        self,
        by_model: bool = False,
        by_disorder: bool = False,
        since: str | None = None,
        until: str | None = None,
    ) -> dict:
        """Error-tag counts per category, optionally grouped by model or
        disorder and restricted to a creation-time window."""
        sql = (
            "SELECT t.category, c.model_id, c.disorders FROM error_tags t "
            "JOIN cases c ON c.case_id = t.case_id"
        )
        clauses = []
        params: list = []
        if since is not None:
            clauses.append("t.created_at >= ?")
            params.append(since)
        if until is not None:
            clauses.append("t.created_at <= ?")
            params.append(until)
        if clauses:
            sql += " WHERE " + " AND ".join(clauses)

        totals = {category: 0 for category in ERROR_TAG_CATEGORIES}
        groups: dict[str, dict[str, int]] = {}
        for row in self._conn.execute(sql, params):
            totals[row["category"]] += 1
            keys = []
            if by_model:
                keys.append(row["model_id"] or "")
            if by_disorder:
                keys.extend(n for n in row["disorders"].split(",") if n)
            for key in keys:
                bucket = groups.setdefault(
                    key, {category: 0 for category in ERROR_TAG_CATEGORIES}
                )
                bucket[row["category"]] += 1
        report = {"totals": totals}
        if by_model or by_disorder:
            report["groups"] = groups
        return report

    # --- archive ---------------------------------------------------------------------

    def export_archive(self, path: str | Path) -> int:
        """Dump the whole store as JSON-lines; returns the record count."""
        count = 0
        with open(path, "w") as fh:
            for table in ("cases", "feedback", "error_tags"):
                for row in self._conn.execute(f"SELECT * FROM {table}"):
                    fh.write(json.dumps({"table": table, "row": dict(row)}) + "\n")
                    count += 1
        return count

    def import_archive(self, path: str | Path) -> int:
        count = 0
        with open(path) as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                record = json.loads(line)
                table, row = record["table"], record["row"]
                if table not in ("cases", "feedback", "error_tags"):
                    raise StorageIO(f"unknown table {table!r} in archive")
                placeholders = ", ".join("?" for _ in row)
                columns = ", ".join(row)
                self._conn.execute(
                    f"INSERT OR REPLACE INTO {table} ({columns}) VALUES ({placeholders})",
                    list(row.values()),
                )
                count += 1
        self._conn.commit()
        return count
