"""Deterministic validators for case files: structural validation, age/grade
and score/percentile consistency checks, SMART-goal parsing, and session-note
data extraction. All functions here are pure.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from datetime import date, datetime
from statistics import NormalDist

from .casefile import CaseFile, SessionNote
from .taxonomy import GradeLevel

_NORMAL = NormalDist(mu=100, sigma=15)

MIN_BACKGROUND_CHARS = 300
GOAL_COUNT_RANGE = (2, 4)
SESSION_NOTE_COUNT = 3
PERCENTILE_TOLERANCE = 5.0

SEVERITIES = ("Mild", "Moderate", "Severe")

# Score bands: the moderate band (70-85) is the service-qualifying range; the
# flanking bands extend it so every severity label is checkable.
SEVERITY_BANDS = {"Severe": (40, 69), "Moderate": (70, 85), "Mild": (86, 92)}


@dataclass
class Finding:
    field_path: str
    code: str
    message: str


@dataclass
class ValidationReport:
    errors: list[Finding] = field(default_factory=list)
    warnings: list[Finding] = field(default_factory=list)

    @property
    def is_valid(self) -> bool:
        return not self.errors

    def to_dict(self) -> dict:
        return {
            "errors": [vars(f) for f in self.errors],
            "warnings": [vars(f) for f in self.warnings],
            "is_valid": self.is_valid,
        }


def _blank(value) -> bool:
    return value is None or (isinstance(value, str) and not value.strip())


def _parses_as_date(value) -> bool:
    if isinstance(value, date):
        return True
    if not isinstance(value, str):
        return False
    for fmt in ("%Y-%m-%d", "%m/%d/%Y", "%B %d, %Y"):
        try:
            datetime.strptime(value.strip(), fmt)
            return True
        except ValueError:
            continue
    return False


def validate_case(case: CaseFile) -> ValidationReport:
    """Report every structural problem in a case.

    Missing/malformed required fields are errors; soft rules (background
    length, percentile consistency, age/grade fit) are warnings. Total: never
    raises on arbitrary field content.
    """
    report = ValidationReport()
    err = report.errors.append
    warn = report.warnings.append

    for key in ("name", "grade", "gender", "background"):
        if _blank(getattr(case, key)):
            err(Finding(key, "missing_field", f"{key} is missing or empty"))
    if case.age is None:
        err(Finding("age", "missing_field", "age is missing"))
    elif not isinstance(case.age, int) or isinstance(case.age, bool):
        err(Finding("age", "malformed_field", f"age must be an integer, got {case.age!r}"))

    if isinstance(case.background, str) and 0 < len(case.background) < MIN_BACKGROUND_CHARS:
        warn(
            Finding(
                "background",
                "background_too_short",
                f"background has {len(case.background)} characters "
                f"(minimum {MIN_BACKGROUND_CHARS} for a fully valid case)",
            )
        )

    grade = None
    if isinstance(case.grade, str):
        try:
            grade = GradeLevel.from_name(case.grade)
        except ValueError:
            err(Finding("grade", "unknown_grade", f"unrecognized grade {case.grade!r}"))
    if (
        grade is not None
        and isinstance(case.age, int)
        and not isinstance(case.age, bool)
        and not (grade.age_range[0] <= case.age <= grade.age_range[1])
    ):
        warn(
            Finding(
                "age",
                "age_grade_mismatch",
                f"age {case.age} outside {grade.display_name} range {grade.age_range}",
            )
        )

    if not case.assessment_results:
        err(Finding("assessment_results", "missing_field", "no assessment results"))
    for i, a in enumerate(case.assessment_results):
        path = f"assessment_results[{i}]"
        for key in ("assessment_name", "domain", "severity"):
            if _blank(getattr(a, key)):
                err(Finding(f"{path}.{key}", "missing_field", f"{key} missing"))
        if a.severity is not None and a.severity not in SEVERITIES:
            err(
                Finding(
                    f"{path}.severity",
                    "invalid_severity",
                    f"severity must be one of {SEVERITIES}, got {a.severity!r}",
                )
            )
        for key in ("standard_score", "percentile"):
            value = getattr(a, key)
            if value is None:
                err(Finding(f"{path}.{key}", "missing_field", f"{key} missing"))
            elif not isinstance(value, int) or isinstance(value, bool):
                err(Finding(f"{path}.{key}", "malformed_field", f"{key} must be an integer"))
        if isinstance(a.percentile, int) and not 1 <= a.percentile <= 99:
            err(
                Finding(
                    f"{path}.percentile",
                    "percentile_out_of_range",
                    f"percentile {a.percentile} outside [1, 99]",
                )
            )
        if (
            isinstance(a.standard_score, int)
            and isinstance(a.percentile, int)
            and 1 <= a.percentile <= 99
            and not check_percentile_consistency(a.standard_score, a.percentile)
        ):
            warn(
                Finding(
                    f"{path}.percentile",
                    "percentile_inconsistent",
                    f"percentile {a.percentile} inconsistent with "
                    f"standard score {a.standard_score}",
                )
            )

    if not case.annual_goals:
        err(Finding("annual_goals", "missing_field", "no annual goals"))
    elif not GOAL_COUNT_RANGE[0] <= len(case.annual_goals) <= GOAL_COUNT_RANGE[1]:
        err(
            Finding(
                "annual_goals",
                "goals_count_out_of_range",
                f"expected {GOAL_COUNT_RANGE[0]}-{GOAL_COUNT_RANGE[1]} goals, "
                f"got {len(case.annual_goals)}",
            )
        )
    goal_numbers = []
    for i, g in enumerate(case.annual_goals):
        path = f"annual_goals[{i}]"
        for key in ("goal_brief", "goal_annual"):
            if _blank(getattr(g, key)):
                err(Finding(f"{path}.{key}", "missing_field", f"{key} missing"))
        if isinstance(g.goal_number, int) and not isinstance(g.goal_number, bool):
            goal_numbers.append(g.goal_number)
        else:
            err(Finding(f"{path}.goal_number", "missing_field", "goal_number missing"))
    if case.annual_goals and len(goal_numbers) == len(case.annual_goals):
        if sorted(goal_numbers) != list(range(1, len(goal_numbers) + 1)):
            err(
                Finding(
                    "annual_goals",
                    "goal_numbers_not_contiguous",
                    f"goal numbers must be unique and contiguous from 1, got {goal_numbers}",
                )
            )

    if len(case.session_notes) != SESSION_NOTE_COUNT:
        err(
            Finding(
                "session_notes",
                "note_count_mismatch",
                f"expected exactly {SESSION_NOTE_COUNT} session notes, "
                f"got {len(case.session_notes)}",
            )
        )
    valid_goals = set(goal_numbers)
    for i, n in enumerate(case.session_notes):
        path = f"session_notes[{i}]"
        for key in ("duration", "setting", "goal_addressed", "note"):
            if _blank(getattr(n, key)):
                err(Finding(f"{path}.{key}", "missing_field", f"{key} missing"))
        if n.date is None:
            err(Finding(f"{path}.date", "missing_field", "date missing"))
        elif not _parses_as_date(n.date):
            err(Finding(f"{path}.date", "malformed_field", f"unparseable date {n.date!r}"))
        if n.setting is not None and n.setting not in ("Individual", "Group"):
            err(
                Finding(
                    f"{path}.setting",
                    "invalid_setting",
                    f"setting must be Individual or Group, got {n.setting!r}",
                )
            )
        if isinstance(n.goal_addressed, str) and valid_goals:
            refs = [int(m) for m in re.findall(r"\d+", n.goal_addressed)]
            dangling = [r for r in refs if r not in valid_goals]
            if dangling:
                err(
                    Finding(
                        f"{path}.goal_addressed",
                        "dangling_goal_reference",
                        f"references nonexistent goal(s) {dangling}",
                    )
                )
    return report


def check_age_grade(age: int, grade: GradeLevel) -> bool:
    """True iff the age falls inside the grade's inclusive age range."""
    if not 3 <= age <= 22:
        raise ValueError(f"age {age} outside supported domain [3, 22]")
    lo, hi = grade.age_range
    return lo <= age <= hi


def check_score_severity(standard_score: int, severity: str) -> bool:
    """True iff the severity label matches the score band for that label."""
    band = SEVERITY_BANDS.get(severity)
    if band is None:
        return False
    return band[0] <= standard_score <= band[1]


def expected_percentile(standard_score: int) -> float:
    """Percentile implied by a normal model with mean 100 and SD 15."""
    return _NORMAL.cdf(standard_score) * 100.0


def check_percentile_consistency(standard_score: int, percentile: int) -> bool:
    return abs(percentile - expected_percentile(standard_score)) <= PERCENTILE_TOLERANCE


# --- SMART goal parsing -----------------------------------------------------

TIME_BOUND_PHRASE = "before or by the next annual ard"

_PERCENT_RE = re.compile(r"(\d+(?:\.\d+)?)\s*%")
_TRIALS_RE = re.compile(
    r"\b(\d+)\s+out\s+of\s+(\d+)\b|\b(\d+)\s*/\s*(\d+)\b", re.IGNORECASE
)

# Words before " will " that do not name a student.
_GENERIC_SUBJECTS = {"student", "students", "the", "he", "she", "they", "child"}


@dataclass
class SmartGoalParse:
    time_bound: bool = False
    student_named: bool = False
    has_condition: bool = False
    criterion: tuple | None = None  # ("percentage", x) or ("trials", (n, m))
    has_measurement: bool = False
    all_criteria: list[tuple] = field(default_factory=list)

    @property
    def is_smart(self) -> bool:
        return (
            self.time_bound
            and self.student_named
            and self.has_condition
            and self.criterion is not None
            and self.has_measurement
        )


def _find_criteria(text: str) -> list[tuple[int, tuple]]:
    found = []
    for m in _PERCENT_RE.finditer(text):
        value = float(m.group(1))
        found.append((m.start(), ("percentage", int(value) if value.is_integer() else value)))
    for m in _TRIALS_RE.finditer(text):
        if m.group(1) is not None:
            pair = (int(m.group(1)), int(m.group(2)))
        else:
            pair = (int(m.group(3)), int(m.group(4)))
        found.append((m.start(), ("trials", pair)))
    found.sort(key=lambda item: item[0])
    return found


def parse_smart_goal(text: str, student_name: str | None = None) -> SmartGoalParse:
    """Extract SMART-criteria signals from an annual goal statement.

    The primary criterion is the first percentage or trial-count pattern in
    the text; all matches are kept in ``all_criteria``.
    """
    lowered = text.lower()
    parse = SmartGoalParse()
    parse.time_bound = TIME_BOUND_PHRASE in lowered
    parse.has_measurement = "as measured by" in lowered
    parse.has_condition = re.search(r"\bgiven\b", lowered) is not None

    if student_name:
        first = student_name.split()[0].lower()
        parse.student_named = first in lowered
    else:
        subject = re.search(r"([A-Z][a-z]+)(?:\s+[A-Z][a-z]+)?\s+will\b", text)
        parse.student_named = (
            subject is not None and subject.group(1).lower() not in _GENERIC_SUBJECTS
        )

    criteria = _find_criteria(text)
    parse.all_criteria = [c for _, c in criteria]
    parse.criterion = parse.all_criteria[0] if parse.all_criteria else None
    return parse


# --- session note objective data --------------------------------------------

_GOAL_REF_RE = re.compile(r"\bgoal\s*#?\s*(\d+)\b", re.IGNORECASE)


@dataclass
class ObjectiveData:
    percentages: list = field(default_factory=list)
    trial_fractions: list[tuple[int, int]] = field(default_factory=list)
    goal_refs: list[int] = field(default_factory=list)
    has_objective_data: bool = False


def parse_session_data(note: SessionNote) -> ObjectiveData:
    """Extract percentages, trial fractions, and goal references from a note."""
    body = note.note if isinstance(note.note, str) else ""
    data = ObjectiveData()
    for _, criterion in _find_criteria(body):
        kind, value = criterion
        if kind == "percentage":
            data.percentages.append(value)
        else:
            data.trial_fractions.append(value)
    refs = set()
    for source in (note.goal_addressed, body):
        if isinstance(source, str):
            refs.update(int(m.group(1)) for m in _GOAL_REF_RE.finditer(source))
    data.goal_refs = sorted(refs)
    data.has_objective_data = bool(data.percentages or data.trial_fractions)
    return data
