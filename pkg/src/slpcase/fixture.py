"""Deterministic fixture provider: a stand-in LLM that synthesizes valid
payloads from the prompt alone.

The synthesizer reads the disorder and grade back out of the rendered
prompt, then instantiates a complete case file template. The same prompt
always yields the same bytes, which makes every pipeline test reproducible
without a network.
"""

from __future__ import annotations

import hashlib
import json
import re

from .lexicon import DISORDER_KEYWORDS
from .taxonomy import ASSESSMENT_CATALOG, DisorderType, GradeLevel
from .validation import expected_percentile

GROUP_PLAN_MARKER = "=== GROUP SESSION PLAN REQUEST ==="
CLINICAL_ANALYSIS_MARKER = "=== TRANSCRIPT CLINICAL ANALYSIS ==="
QUALITY_JUDGE_MARKER = "=== QUALITY JUDGE ==="

_FIXTURE_GIVEN = {
    "Female": ("Maya", "Elena", "Aisha", "Grace", "Lucia", "Naomi", "Priya", "Jade"),
    "Male": ("Omar", "Leo", "Mateo", "Isaiah", "Ethan", "Ravi", "Caleb", "Jordan"),
}
_FIXTURE_SURNAMES = (
    "Rivera", "Thompson", "Chen", "Okafor", "Nguyen", "Hassan", "Kim", "Walker",
)


class FixtureProvider:
    """Returns canned text keyed by request digest, else synthesizes output."""

    def __init__(self, canned: dict[str, str] | None = None, synthesize: bool = True):
        self.canned = dict(canned or {})
        self.synthesize = synthesize
        self.calls = 0

    def complete(self, prompt_text: str, digest: str) -> str:
        self.calls += 1
        if digest in self.canned:
            return self.canned[digest]
        if not self.synthesize:
            raise KeyError(f"no canned response for digest {digest}")
        if GROUP_PLAN_MARKER in prompt_text:
            return synth_group_plan(prompt_text)
        if CLINICAL_ANALYSIS_MARKER in prompt_text:
            return synth_clinical_analysis(prompt_text)
        if QUALITY_JUDGE_MARKER in prompt_text:
            return "structural: 5\nconsistency: 4\nclinical: 4\ndocumentation: 5\njustification: fixture judge output\n"
        return synth_case_json(prompt_text, digest)


def _extract_request(prompt_text: str) -> tuple[list[DisorderType], GradeLevel]:
    """Recover the disorder list and grade bound into either prompt template."""
    disorder_line = None
    grade_line = None
    m = re.search(r"DISORDER FOCUS:\n(.+)", prompt_text)
    if m:
        disorder_line = m.group(1).strip()
    m = re.search(r"GRADE LEVEL:\n(.+)", prompt_text)
    if m:
        grade_line = m.group(1).strip()
    if disorder_line is None:
        m = re.search(r"- Disorder: (.+)", prompt_text)
        disorder_line = m.group(1).strip() if m else ""
    if grade_line is None:
        m = re.search(r"- Grade: (.+)", prompt_text)
        grade_line = m.group(1).strip() if m else ""

    disorders = []
    for part in disorder_line.split(", "):
        try:
            disorders.append(DisorderType.from_name(part))
        except ValueError:
            continue
    if not disorders:
        disorders = [DisorderType.ARTICULATION]
    try:
        grade = GradeLevel.from_name(grade_line)
    except ValueError:
        grade = GradeLevel.SECOND
    return disorders, grade


def _pick(seq, digest: str, salt: str):
    h = int.from_bytes(hashlib.sha256((digest + salt).encode()).digest()[:4], "big")
    return seq[h % len(seq)]


def synth_case_json(prompt_text: str, digest: str) -> str:
    disorders, grade = _extract_request(prompt_text)
    gender = _pick(("Female", "Male"), digest, "gender")
    name = f"{_pick(_FIXTURE_GIVEN[gender], digest, 'given')} {_pick(_FIXTURE_SURNAMES, digest, 'surname')}"
    age = _pick(grade.age_range, digest, "age")

    disorder_phrases = " and ".join(d.display_name.lower() for d in disorders)
    keyword_mentions = ", ".join(DISORDER_KEYWORDS[d][0] for d in disorders)
    background = (
        f"Medical History: {name.split()[0]} passed hearing and vision screenings and has an "
        f"unremarkable medical history. Early developmental milestones were met within normal "
        f"limits, though concerns about {disorder_phrases} emerged during the preschool years. "
        f"Parent Concerns: The family reports ongoing difficulty with {keyword_mentions} that "
        f"affects communication at home and with relatives, and they worry about frustration "
        f"during daily routines. Teacher Concerns: The classroom teacher observes that these "
        f"difficulties limit participation in {grade.display_name} activities, group work, and "
        f"peer interactions, and notes the impact on classroom confidence. Academic Performance: "
        f"Performance is near grade level in most areas with support, with relative strengths in "
        f"nonverbal problem solving."
    )

    score = 70 + int(digest[:2], 16) % 16  # within the 70-85 moderate band
    percentile = min(99, max(1, round(expected_percentile(score))))
    assessments = []
    for d in disorders:
        inst = ASSESSMENT_CATALOG[d][0]
        assessments.append(
            {
                "assessment_name": inst.name,
                "domain": inst.domain,
                "standard_score": score,
                "percentile": percentile,
                "severity": "Moderate",
            }
        )

    goals = []
    for i, d in enumerate(disorders, start=1):
        keyword = DISORDER_KEYWORDS[d][0]
        goals.append(
            {
                "goal_number": i,
                "goal_brief": f"Improve {keyword} skills",
                "goal_annual": (
                    f"Before or by the next annual ARD, {name} will demonstrate improved "
                    f"{keyword} skills targeting {d.display_name.lower()} given minimal "
                    f"verbal cues in 8 out of 10 trials as measured by SLP data collection."
                ),
            }
        )
    if len(goals) < 2:
        d = disorders[0]
        keyword = DISORDER_KEYWORDS[d][1] if len(DISORDER_KEYWORDS[d]) > 1 else DISORDER_KEYWORDS[d][0]
        goals.append(
            {
                "goal_number": 2,
                "goal_brief": f"Generalize {keyword} skills",
                "goal_annual": (
                    f"Before or by the next annual ARD, {name} will generalize {keyword} "
                    f"skills related to {d.display_name.lower()} to classroom settings given "
                    f"a visual cue in 80% of opportunities as measured by SLP data collection."
                ),
            }
        )

    notes = []
    accuracies = ((4, 10, 40), (6, 10, 60), (8, 10, 80))
    dates = ("2025-10-15", "2026-01-14", "2026-04-22")
    for i, ((num, den, pct), date) in enumerate(zip(accuracies, dates)):
        goal_no = (i % len(goals)) + 1
        keyword = DISORDER_KEYWORDS[disorders[(goal_no - 1) % len(disorders)]][0]
        notes.append(
            {
                "date": date,
                "duration": "30 minutes",
                "setting": "Individual",
                "goal_addressed": f"Goal {goal_no}",
                "note": (
                    f"Activity: Structured practice targeting {keyword} using picture cards "
                    f"and guided modeling, Objective Data: Correct responses in {num}/{den} "
                    f"trials ({pct}%) with minimal verbal cues, Clinical Observation: Engaged "
                    f"throughout the session and responded well to feedback."
                ),
            }
        )

    case = {
        "name": name,
        "age": age,
        "grade": grade.display_name,
        "gender": gender,
        "background": background,
        "assessment_results": assessments,
        "annual_goals": goals,
        "session_notes": notes,
    }
    return json.dumps(case, indent=2, ensure_ascii=False)


def synth_group_plan(prompt_text: str) -> str:
    members = re.findall(r"^MEMBER: (.+)$", prompt_text, re.MULTILINE)
    plan = {
        "shared_activity": (
            "Collaborative barrier game in which students take turns describing and "
            "assembling a shared picture scene."
        ),
        "differentiated_targets": {
            member: f"{member} will apply their individual IEP goal targets during "
            f"structured turns of the shared activity."
            for member in members
        },
        "note": (
            "Activity: Barrier game with rotating describer roles, Objective Data: "
            "Per-student trial counts recorded against individual goals, Clinical "
            "Observation: Group supported peer modeling across targets."
        ),
    }
    return json.dumps(plan, indent=2)


def synth_clinical_analysis(prompt_text: str) -> str:
    return (
        "Diagnostic Hypotheses: Findings are consistent with a developmental fluency "
        "difference pending further assessment.\n"
        "Severity: Mild to moderate based on reported pattern counts.\n"
        "Estimated Age Range: 6-9 years.\n"
        "Recommended Goals: Reduce part-word repetitions in structured speaking tasks; "
        "increase use of easy onset strategies.\n"
        "Observations: Pattern counts suggest sound repetitions predominate over blocks.\n"
        "Recommendations: Obtain a full fluency evaluation and teacher interview.\n"
    )
