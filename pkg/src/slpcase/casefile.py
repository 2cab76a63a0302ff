"""Case-file data model and the canonical JSON wire format.

The wire format keys are fixed: ``name``, ``age``, ``grade``, ``gender``,
``background``, ``assessment_results``, ``annual_goals``, ``session_notes``.
Parsing is deliberately lenient (missing or malformed fields become ``None``)
so the validator can report problems instead of the parser crashing.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

REQUIRED_TOP_LEVEL_KEYS = (
    "name",
    "age",
    "grade",
    "gender",
    "background",
    "assessment_results",
    "annual_goals",
    "session_notes",
)

ASSESSMENT_KEYS = ("assessment_name", "domain", "standard_score", "percentile", "severity")
GOAL_KEYS = ("goal_number", "goal_brief", "goal_annual")
NOTE_KEYS = ("date", "duration", "setting", "goal_addressed", "note")


@dataclass
class AssessmentResult:
    assessment_name: Any = None
    domain: Any = None
    standard_score: Any = None
    percentile: Any = None
    severity: Any = None

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in ASSESSMENT_KEYS}


@dataclass
class AnnualGoal:
    goal_number: Any = None
    goal_brief: Any = None
    goal_annual: Any = None

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in GOAL_KEYS}


@dataclass
class SessionNote:
    date: Any = None
    duration: Any = None
    setting: Any = None
    goal_addressed: Any = None
    note: Any = None

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in NOTE_KEYS}


@dataclass
class CaseFile:
    name: Any = None
    age: Any = None
    grade: Any = None
    gender: Any = None
    background: Any = None
    assessment_results: list[AssessmentResult] = field(default_factory=list)
    annual_goals: list[AnnualGoal] = field(default_factory=list)
    session_notes: list[SessionNote] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "age": self.age,
            "grade": self.grade,
            "gender": self.gender,
            "background": self.background,
            "assessment_results": [a.to_dict() for a in self.assessment_results],
            "annual_goals": [g.to_dict() for g in self.annual_goals],
            "session_notes": [n.to_dict() for n in self.session_notes],
        }


def _sub_items(raw: Any, cls, keys) -> list:
    items = []
    if not isinstance(raw, list):
        return items
    for entry in raw:
        if isinstance(entry, dict):
            items.append(cls(**{k: entry.get(k) for k in keys}))
        else:
            items.append(cls())
    return items


def parse_case(data: Any) -> CaseFile:
    """Build a :class:`CaseFile` from parsed JSON without raising on bad shapes."""
    if not isinstance(data, dict):
        return CaseFile()
    return CaseFile(
        name=data.get("name"),
        age=data.get("age"),
        grade=data.get("grade"),
        gender=data.get("gender"),
        background=data.get("background"),
        assessment_results=_sub_items(
            data.get("assessment_results"), AssessmentResult, ASSESSMENT_KEYS
        ),
        annual_goals=_sub_items(data.get("annual_goals"), AnnualGoal, GOAL_KEYS),
        session_notes=_sub_items(data.get("session_notes"), SessionNote, NOTE_KEYS),
    )


def parse_case_json(text: str) -> CaseFile:
    return parse_case(json.loads(text))


def serialize_case(case: CaseFile) -> str:
    """Canonical serialization: fixed key order, 2-space indent, trailing newline."""
    return json.dumps(case.to_dict(), indent=2, ensure_ascii=False) + "\n"
