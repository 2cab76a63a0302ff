import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import FIXTURES
from slpcase.casefile import CaseFile, SessionNote, parse_case, parse_case_json, serialize_case
from slpcase.taxonomy import (
    ASSESSMENT_CATALOG,
    DisorderCategory,
    DisorderType,
    GradeLevel,
    check_assessment_match,
    is_known_instrument,
)
from slpcase.validation import (
    check_age_grade,
    check_percentile_consistency,
    check_score_severity,
    expected_percentile,
    parse_session_data,
    parse_smart_goal,
    validate_case,
)


# --- taxonomy ------------------------------------------------------------------


def test_eleven_types_six_categories():
    assert len(list(DisorderType)) == 11
    assert len({d.category for d in DisorderType}) == 6
    assert len(list(DisorderCategory)) == 6


def test_every_disorder_has_instrument():
    for d in DisorderType:
        assert ASSESSMENT_CATALOG[d]


def test_grade_ladder():
    assert GradeLevel.PRE_K.age_range == (4, 5)
    assert GradeLevel.K.age_range == (5, 6)
    assert GradeLevel.SECOND.age_range == (7, 8)
    assert GradeLevel.TWELFTH.age_range == (17, 18)
    ladder = list(GradeLevel)
    assert len(ladder) == 14
    for prev, cur in zip(ladder, ladder[1:]):
        assert cur.age_range == (prev.age_range[0] + 1, prev.age_range[1] + 1)


def test_grade_from_name():
    assert GradeLevel.from_name("2nd Grade") is GradeLevel.SECOND
    assert GradeLevel.from_name("kindergarten") is GradeLevel.K
    assert GradeLevel.from_name("Pre-K") is GradeLevel.PRE_K
    assert GradeLevel.from_name("10th") is GradeLevel.TENTH


def test_assessment_match():
    assert check_assessment_match(DisorderType.ARTICULATION, "GFTA-3")
    assert not check_assessment_match(DisorderType.PRAGMATIC_LANGUAGE, "GFTA-3")
    assert check_assessment_match(DisorderType.FLUENCY, "SSI-4")
    # normalization: case, missing edition, parenthetical long name
    assert check_assessment_match(DisorderType.ARTICULATION, "gfta")
    assert check_assessment_match(
        DisorderType.FLUENCY, "SSI-4 (Stuttering Severity Instrument)"
    )
    assert not check_assessment_match(DisorderType.VOICE, "")
    assert not is_known_instrument("TOTALLY-MADE-UP-9")
    assert is_known_instrument("celf-5")


# --- wire format -----------------------------------------------------------------


def test_serialize_roundtrip_byte_identical(aurora):
    text = serialize_case(aurora)
    assert serialize_case(parse_case_json(text)) == text


def test_fixture_files_are_canonical():
    for name in ("aurora", "sofia"):
        raw = (FIXTURES / f"{name}.json").read_text()
        assert serialize_case(parse_case(json.loads(raw))) == raw


def test_parse_is_lenient():
    case = parse_case({"name": "X", "assessment_results": "oops", "annual_goals": [42]})
    assert case.name == "X"
    assert case.assessment_results == []
    assert case.annual_goals[0].goal_number is None
    assert parse_case("not a dict").name is None


# --- validate_case ----------------------------------------------------------------


def test_aurora_validates_clean(aurora):
    report = validate_case(aurora)
    assert report.errors == []
    assert report.is_valid


def test_missing_goals_flagged(aurora):
    aurora.annual_goals = []
    report = validate_case(aurora)
    assert any(f.field_path == "annual_goals" and f.code == "missing_field" for f in report.errors)


def test_single_goal_out_of_range(aurora):
    aurora.annual_goals = aurora.annual_goals[:1]
    report = validate_case(aurora)
    assert any(f.code == "goals_count_out_of_range" for f in report.errors)


def test_validator_total_on_garbage():
    report = validate_case(parse_case({"age": "seven", "grade": 3.5, "session_notes": [1, 2]}))
    assert report.errors  # reports, never raises


def test_dangling_goal_reference(aurora):
    aurora.session_notes[0].goal_addressed = "Goal 9"
    report = validate_case(aurora)
    assert any(f.code == "dangling_goal_reference" for f in report.errors)


# --- deterministic checks ------------------------------------------------------------


def test_check_age_grade():
    assert check_age_grade(7, GradeLevel.SECOND)
    assert check_age_grade(12, GradeLevel.SIXTH)
    assert not check_age_grade(4, GradeLevel.NINTH)
    with pytest.raises(ValueError):
        check_age_grade(2, GradeLevel.PRE_K)


def test_exactly_two_ages_per_grade():
    for grade in GradeLevel:
        assert sum(check_age_grade(age, grade) for age in range(3, 23)) == 2


def test_check_score_severity():
    assert check_score_severity(72, "Moderate")
    assert not check_score_severity(100, "Moderate")
    assert check_score_severity(85, "Moderate")
    assert check_score_severity(70, "Moderate")
    assert check_score_severity(65, "Severe")
    assert check_score_severity(90, "Mild")
    assert not check_score_severity(72, "Nonsense")


def test_percentile_consistency():
    # expected_percentile(72) ~ 3.1, from the normal CDF
    assert abs(expected_percentile(72) - 3.1) < 0.1
    assert check_percentile_consistency(72, 3)
    assert not check_percentile_consistency(72, 25)
    assert check_percentile_consistency(100, 50)


@given(st.integers(min_value=55, max_value=145))
def test_percentile_roundtrip_property(score):
    implied = min(99, max(1, round(expected_percentile(score))))
    assert check_percentile_consistency(score, implied)


# --- SMART goals ------------------------------------------------------------------


def test_aurora_goal_one_smart(aurora):
    parsed = parse_smart_goal(aurora.annual_goals[0].goal_annual, student_name=aurora.name)
    assert parsed.time_bound
    assert parsed.criterion == ("percentage", 80) or parsed.criterion[0] == "trials"
    assert parsed.has_measurement
    assert parsed.has_condition
    assert parsed.student_named
    assert parsed.is_smart
    assert ("trials", (8, 10)) in parsed.all_criteria


def test_generic_goal_not_smart():
    parsed = parse_smart_goal("Student will improve communication skills.")
    assert not parsed.time_bound
    assert not parsed.student_named
    assert not parsed.has_condition
    assert parsed.criterion is None
    assert not parsed.has_measurement
    assert not parsed.is_smart


def test_sofia_goal_two_criteria(sofia):
    text = sofia.annual_goals[1].goal_annual
    parsed = parse_smart_goal(text)
    assert len(parsed.all_criteria) >= 2
    # primary criterion is the first match in text order
    first = min(
        (text.index("80%"), ("percentage", 80)),
        (text.index("4 out of 5"), ("trials", (4, 5))),
    )
    assert parsed.criterion == first[1]


def test_parse_smart_goal_idempotent(aurora):
    text = aurora.annual_goals[1].goal_annual
    assert parse_smart_goal(text) == parse_smart_goal(text)


# --- session data -----------------------------------------------------------------


def test_aurora_session_one_data(aurora):
    data = parse_session_data(aurora.session_notes[0])
    assert data.percentages == [40]
    assert data.trial_fractions == [(4, 10)]
    assert data.goal_refs == [1]
    assert data.has_objective_data


def test_note_without_digits():
    note = SessionNote(note="Worked on sounds today. Student was engaged.")
    data = parse_session_data(note)
    assert not data.has_objective_data
    assert data.percentages == [] and data.trial_fractions == []


def test_sofia_session_three(sofia):
    data = parse_session_data(sofia.session_notes[2])
    assert (4, 5) in data.trial_fractions
    assert 1 in data.goal_refs
