"""Rubric scoring: deterministic rule scorers for the four quality
dimensions, an optional LLM judge, and aggregation.

The deterministic scorers are pure functions of (case, requested disorders,
rubric config) so the suite runs provider-free. The LLM judge is a parallel
path; judge scores and rule scores are reported side by side, never merged.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal
from statistics import mean

from .casefile import CaseFile
from .errors import JudgeUnparseable
from .fixture import QUALITY_JUDGE_MARKER
from .gateway import Gateway, ModelSpec
from .lexicon import text_mentions_disorder
from .taxonomy import DisorderType, GradeLevel, check_assessment_match
from .validation import (
    MIN_BACKGROUND_CHARS,
    check_age_grade,
    check_percentile_consistency,
    check_score_severity,
    parse_session_data,
    parse_smart_goal,
)

DIMENSIONS = ("structural", "consistency", "clinical", "documentation")

# Error taxonomy categories usable by deterministic scorers. Cultural
# insensitivity is judge-only; rules cannot detect it.
TAXONOMY_CODES = (
    "developmental_inappropriateness",
    "disorder_goal_misalignment",
    "internal_inconsistency",
    "documentation_violation",
    "cultural_insensitivity",
)


@dataclass
class Issue:
    dimension: str
    code: str
    detail: str


@dataclass
class QualityScore:
    structural: int
    consistency: int
    clinical: int
    documentation: int
    issues: list[Issue] = field(default_factory=list)

    @property
    def overall(self) -> float:
        return (self.structural + self.consistency + self.clinical + self.documentation) / 4

    def to_dict(self) -> dict:
        return {
            "structural": self.structural,
            "consistency": self.consistency,
            "clinical": self.clinical,
            "documentation": self.documentation,
            "overall": self.overall,
            "issues": [vars(i) for i in self.issues],
        }


@dataclass
class RubricConfig:
    background_min_chars: int = MIN_BACKGROUND_CHARS
    # proportion-of-fields thresholds for the structural score, highest first
    structural_thresholds: tuple = ((1.0, 5), (0.9, 4), (0.75, 3), (0.5, 2))


def _filled(value) -> bool:
    if value is None:
        return False
    if isinstance(value, str):
        return bool(value.strip())
    return True


def round_half_up(value: float, digits: int = 0) -> float:
    quantum = Decimal(1).scaleb(-digits)
    return float(Decimal(str(value)).quantize(quantum, rounding=ROUND_HALF_UP))


# --- structural ----------------------------------------------------------------


def score_structural(case: CaseFile, config: RubricConfig | None = None) -> tuple[int, list[Issue]]:
    """Score from the proportion of required fields present and populated.

    Required: 4 demographics, background, >=1 assessment x5 sub-fields,
    2-4 goals x3 sub-fields, 3 notes x5 sub-fields.
    """
    config = config or RubricConfig()
    issues: list[Issue] = []
    present = 0
    expected = 0

    for key in ("name", "age", "grade", "gender", "background"):
        expected += 1
        if _filled(getattr(case, key)):
            present += 1
        else:
            issues.append(Issue("structural", "documentation_violation", f"{key} missing"))

    n_assess = max(1, len(case.assessment_results))
    expected += n_assess * 5
    for a in case.assessment_results:
        for key in ("assessment_name", "domain", "standard_score", "percentile", "severity"):
            if _filled(getattr(a, key)):
                present += 1
            else:
                issues.append(
                    Issue("structural", "documentation_violation", f"assessment {key} missing")
                )
    if not case.assessment_results:
        issues.append(Issue("structural", "documentation_violation", "no assessment results"))

    n_goals = min(max(len(case.annual_goals), 2), 4)
    expected += n_goals * 3
    for g in case.annual_goals[:4]:
        for key in ("goal_number", "goal_brief", "goal_annual"):
            if _filled(getattr(g, key)):
                present += 1
            else:
                issues.append(Issue("structural", "documentation_violation", f"goal {key} missing"))
    if len(case.annual_goals) < 2:
        issues.append(
            Issue("structural", "documentation_violation",
                  f"only {len(case.annual_goals)} annual goals (expected 2-4)")
        )

    expected += 3 * 5
    for n in case.session_notes[:3]:
        for key in ("date", "duration", "setting", "goal_addressed", "note"):
            if _filled(getattr(n, key)):
                present += 1
            else:
                issues.append(Issue("structural", "documentation_violation", f"note {key} missing"))
    if len(case.session_notes) < 3:
        issues.append(
            Issue("structural", "documentation_violation",
                  f"only {len(case.session_notes)} session notes (expected 3)")
        )

    proportion = present / expected if expected else 0.0
    score = 1
    for threshold, value in config.structural_thresholds:
        if proportion >= threshold:
            score = value
            break
    return score, issues


# --- consistency ----------------------------------------------------------------


def score_consistency(
    case: CaseFile, disorders: list[DisorderType]
) -> tuple[int, list[Issue]]:
    """Four check categories, one point deducted per failed category:

    (a) every session note's goal references resolve to existing goals;
    (b) the background mentions every requested disorder;
    (c) each goal's text matches at least one requested disorder's keywords;
    (d) each assessment instrument is cataloged for a requested disorder.
    """
    issues: list[Issue] = []
    failures = 0

    goal_numbers = {
        g.goal_number for g in case.annual_goals
        if isinstance(g.goal_number, int) and not isinstance(g.goal_number, bool)
    }
    ref_failure = False
    for i, note in enumerate(case.session_notes):
        refs = parse_session_data(note).goal_refs
        if not refs:
            ref_failure = True
            issues.append(
                Issue("consistency", "internal_inconsistency",
                      f"session note {i + 1} does not reference an IEP goal number")
            )
        else:
            dangling = [r for r in refs if r not in goal_numbers]
            if dangling:
                ref_failure = True
                issues.append(
                    Issue("consistency", "internal_inconsistency",
                          f"session note {i + 1} references nonexistent goal(s) {dangling}")
                )
    failures += ref_failure

    background = case.background if isinstance(case.background, str) else ""
    omitted = [d for d in disorders if not text_mentions_disorder(background, d)]
    if omitted:
        failures += 1
        for d in omitted:
            issues.append(
                Issue("consistency", "internal_inconsistency",
                      f"background omits mention of {d.display_name}")
            )

    goal_failure = False
    for g in case.annual_goals:
        text = g.goal_annual if isinstance(g.goal_annual, str) else ""
        if disorders and not any(text_mentions_disorder(text, d) for d in disorders):
            goal_failure = True
            issues.append(
                Issue("consistency", "disorder_goal_misalignment",
                      f"goal {g.goal_number} does not target a requested disorder")
            )
    failures += goal_failure

    assess_failure = False
    for a in case.assessment_results:
        name = a.assessment_name if isinstance(a.assessment_name, str) else ""
        if disorders and not any(check_assessment_match(d, name) for d in disorders):
            assess_failure = True
            issues.append(
                Issue("consistency", "disorder_goal_misalignment",
                      f"assessment {name!r} is not cataloged for the requested disorder(s)")
            )
    failures += assess_failure

    return max(1, 5 - failures), issues


# --- clinical --------------------------------------------------------------------


def score_clinical(
    case: CaseFile,
    disorders: list[DisorderType],
    config: RubricConfig | None = None,
) -> tuple[int, list[Issue]]:
    """Five check categories: age/grade fit, background length, score/severity
    band, percentile consistency, and instrument/disorder match."""
    config = config or RubricConfig()
    issues: list[Issue] = []
    failures = 0

    age_ok = True
    try:
        grade = GradeLevel.from_name(case.grade) if isinstance(case.grade, str) else None
        if grade is not None and isinstance(case.age, int) and not isinstance(case.age, bool):
            age_ok = check_age_grade(case.age, grade)
    except ValueError:
        age_ok = False
    if not age_ok:
        failures += 1
        issues.append(
            Issue("clinical", "developmental_inappropriateness",
                  f"age {case.age!r} inappropriate for grade {case.grade!r}")
        )

    background = case.background if isinstance(case.background, str) else ""
    if len(background) < config.background_min_chars:
        failures += 1
        issues.append(
            Issue("clinical", "documentation_violation",
                  f"background below the {config.background_min_chars}-character minimum")
        )

    band_failure = False
    pct_failure = False
    inst_failure = False
    for a in case.assessment_results:
        score_ok = isinstance(a.standard_score, int) and not isinstance(a.standard_score, bool)
        if score_ok and isinstance(a.severity, str):
            if not check_score_severity(a.standard_score, a.severity):
                band_failure = True
                issues.append(
                    Issue("clinical", "internal_inconsistency",
                          f"severity {a.severity!r} inconsistent with standard score "
                          f"{a.standard_score}")
                )
        if score_ok and isinstance(a.percentile, int) and not isinstance(a.percentile, bool):
            if not check_percentile_consistency(a.standard_score, a.percentile):
                pct_failure = True
                issues.append(
                    Issue("clinical", "internal_inconsistency",
                          f"percentile {a.percentile} inconsistent with standard score "
                          f"{a.standard_score}")
                )
        name = a.assessment_name if isinstance(a.assessment_name, str) else ""
        if disorders and not any(check_assessment_match(d, name) for d in disorders):
            inst_failure = True
            issues.append(
                Issue("clinical", "disorder_goal_misalignment",
                      f"instrument {name!r} not appropriate for the requested disorder(s)")
            )
    failures += band_failure + pct_failure + inst_failure

    return max(1, 5 - failures), issues


# --- documentation ----------------------------------------------------------------


def score_documentation(case: CaseFile) -> tuple[int, list[Issue]]:
    """round_half_up(1 + 4 * (smart_goal_fraction + objective_data_fraction) / 2)."""
    issues: list[Issue] = []
    student = case.name if isinstance(case.name, str) else None

    if case.annual_goals:
        smart_flags = []
        for g in case.annual_goals:
            text = g.goal_annual if isinstance(g.goal_annual, str) else ""
            parsed = parse_smart_goal(text, student_name=student)
            smart_flags.append(parsed.is_smart)
            if not parsed.is_smart:
                issues.append(
                    Issue("documentation", "documentation_violation",
                          f"goal {g.goal_number} does not meet all SMART criteria")
                )
        f_goals = sum(smart_flags) / len(smart_flags)
    else:
        f_goals = 0.0
        issues.append(Issue("documentation", "documentation_violation", "no annual goals"))

    if case.session_notes:
        data_flags = []
        for i, note in enumerate(case.session_notes):
            has_data = parse_session_data(note).has_objective_data
            data_flags.append(has_data)
            if not has_data:
                issues.append(
                    Issue("documentation", "documentation_violation",
                          f"session note {i + 1} lacks objective data")
                )
        f_notes = sum(data_flags) / len(data_flags)
    else:
        f_notes = 0.0
        issues.append(Issue("documentation", "documentation_violation", "no session notes"))

    score = int(round_half_up(1 + 4 * (f_goals + f_notes) / 2))
    return score, issues


# --- combined + judge ---------------------------------------------------------------


def score_case(
    case: CaseFile,
    disorders: list[DisorderType],
    config: RubricConfig | None = None,
) -> QualityScore:
    s, iss_s = score_structural(case, config)
    c, iss_c = score_consistency(case, disorders)
    cl, iss_cl = score_clinical(case, disorders, config)
    d, iss_d = score_documentation(case)
    return QualityScore(
        structural=s, consistency=c, clinical=cl, documentation=d,
        issues=iss_s + iss_c + iss_cl + iss_d,
    )


JUDGE_PROMPT = f"""{QUALITY_JUDGE_MARKER}
You are evaluating a generated school SLP case file on four dimensions,
each scored 1-5 (1 = major deficiencies requiring complete revision,
3 = acceptable with notable limitations, 5 = high quality meeting
professional standards). Assess each dimension independently, list the
specific issues you find, and justify each score.

Dimensions:
structural: presence and completeness of all required fields
consistency: coherence between background, assessments, goals, and notes
clinical: developmental appropriateness and assessment selection
documentation: SMART goal adherence and objective session data

CASE FILE:
{{case_json}}

Respond with one line per dimension, exactly:
structural: <1-5>
consistency: <1-5>
clinical: <1-5>
documentation: <1-5>
justification: <free text>
"""

_JUDGE_LINE = re.compile(r"^(structural|consistency|clinical|documentation)\s*:\s*(-?\d+)", re.I | re.M)


def llm_judge(case: CaseFile, spec: ModelSpec, gateway: Gateway) -> QualityScore:
    """Delegate scoring to an LLM judge; out-of-range scores are clamped."""
    from .casefile import serialize_case

    prompt = JUDGE_PROMPT.replace("{case_json}", serialize_case(case))
    raw = gateway.complete(spec, prompt)
    found = {m.group(1).lower(): int(m.group(2)) for m in _JUDGE_LINE.finditer(raw.text)}
    missing = [d for d in DIMENSIONS if d not in found]
    if missing:
        raise JudgeUnparseable(f"judge output missing dimension(s): {missing}")
    issues = []
    clamped = {}
    for dim in DIMENSIONS:
        value = found[dim]
        if not 1 <= value <= 5:
            issues.append(
                Issue(dim, "documentation_violation",
                      f"judge emitted out-of-range score {value}; clamped")
            )
            value = min(5, max(1, value))
        clamped[dim] = value
    return QualityScore(issues=issues, **clamped)


# --- aggregation -----------------------------------------------------------------


@dataclass
class AggregateReport:
    group_key: str
    n_cases: int
    structural_mean: float
    consistency_mean: float
    clinical_mean: float
    documentation_mean: float

    @property
    def overall_mean(self) -> float:
        return mean(
            (
                self.structural_mean,
                self.consistency_mean,
                self.clinical_mean,
                self.documentation_mean,
            )
        )

    def display_row(self) -> dict:
        return {
            "group": self.group_key,
            "n": self.n_cases,
            "structural": round_half_up(self.structural_mean, 2),
            "consistency": round_half_up(self.consistency_mean, 2),
            "clinical": round_half_up(self.clinical_mean, 2),
            "documentation": round_half_up(self.documentation_mean, 2),
            "overall": round_half_up(self.overall_mean, 2),
        }


def aggregate(scores_by_key: dict[str, list[QualityScore]]) -> list[AggregateReport]:
    reports = []
    for key in sorted(scores_by_key):
        scores = scores_by_key[key]
        if not scores:
            raise ValueError(f"empty score group {key!r}")
        reports.append(
            AggregateReport(
                group_key=key,
                n_cases=len(scores),
                structural_mean=mean(s.structural for s in scores),
                consistency_mean=mean(s.consistency for s in scores),
                clinical_mean=mean(s.clinical for s in scores),
                documentation_mean=mean(s.documentation for s in scores),
            )
        )
    return reports


def aggregate_from_means(group_key: str, means: tuple[float, float, float, float], n: int = 7) -> AggregateReport:
    """Build a report row directly from per-dimension means (for published-table checks)."""
    return AggregateReport(group_key, n, *means)
