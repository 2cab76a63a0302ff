import copy
import logging
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import oracle_group_match
from slpcase.casefile import parse_case, serialize_case
from slpcase.errors import (
    GenerationFailed,
    InvalidParameters,
    PlanIncomplete,
    RosterError,
    UnparseableRequest,
)
from slpcase.fixture import FixtureProvider
from slpcase.gateway import Gateway, ModelSpec
from slpcase.orchestrator import (
    BatchSpec,
    GenerationRequest,
    GroupRequest,
    Pipeline,
    case_severity,
    disorders_compatible,
    generate_batch,
    generate_case,
    generate_pseudonym,
    largest_remainder,
    load_roster,
    match_group_candidates,
    parse_natural_language_request,
    synthesize_group_session,
)
from slpcase.storage import CaseRecord
from slpcase.taxonomy import DisorderType, GradeLevel


def request(pipeline, **kw):
    base = dict(
        disorders=[DisorderType.ARTICULATION],
        grade=GradeLevel.SECOND,
        model=ModelSpec(provider_kind="fixture", model_id="fixture-1", model_class="premium"),
    )
    base.update(kw)
    return GenerationRequest(**base)


# --- single case ---------------------------------------------------------------


def test_generate_case_valid_with_provenance(pipeline):
    case, provenance = generate_case(pipeline, request(pipeline))
    assert case.grade == "2nd Grade"
    assert len(provenance.chunk_ids) == 10
    assert len(provenance.similarities) == 10
    assert provenance.similarities == sorted(provenance.similarities, reverse=True)
    assert provenance.template_id
    assert provenance.model_id == "fixture-1"
    assert len(provenance.request_digest) == 64


def test_request_rejects_bad_disorder_counts():
    model = ModelSpec(provider_kind="fixture", model_id="m")
    with pytest.raises(InvalidParameters):
        GenerationRequest(disorders=[], grade=GradeLevel.K, model=model)
    with pytest.raises(InvalidParameters):
        GenerationRequest(
            disorders=[DisorderType.VOICE, DisorderType.FLUENCY, DisorderType.ARTICULATION],
            grade=GradeLevel.K,
            model=model,
        )


class FlakyProvider(FixtureProvider):
    """Emits garbage for the first ``bad`` calls, then real output."""

    def __init__(self, bad, bad_text="not json at all"):
        super().__init__()
        self.bad = bad
        self.bad_text = bad_text
        self.attempts = 0

    def complete(self, prompt_text, digest):
        self.attempts += 1
        if self.attempts <= self.bad:
            return self.bad_text
        return super().complete(prompt_text, digest)


def flaky_pipeline(pipeline, provider):
    return Pipeline(
        store=pipeline.store,
        embedder=pipeline.embedder,
        gateway=Gateway(fixture=provider),
        templates=pipeline.templates,
    )


def test_generate_case_retries_then_succeeds(pipeline):
    provider = FlakyProvider(bad=2)
    case, _ = generate_case(flaky_pipeline(pipeline, provider), request(pipeline))
    assert provider.attempts == 3
    assert case.name


def test_generate_case_exhausts_retry_budget(pipeline):
    provider = FlakyProvider(bad=99)
    with pytest.raises(GenerationFailed):
        generate_case(flaky_pipeline(pipeline, provider), request(pipeline))
    assert provider.attempts == 3


def test_generate_case_invalid_payload_surfaces_report(pipeline):
    # parseable JSON that fails validation carries the last report
    provider = FlakyProvider(bad=99, bad_text='{"name": "X", "age": 7}')
    with pytest.raises(GenerationFailed) as exc_info:
        generate_case(flaky_pipeline(pipeline, provider), request(pipeline))
    assert exc_info.value.last_report is not None
    assert exc_info.value.last_report.errors


# --- largest remainder -----------------------------------------------------------


def test_largest_remainder_known_values():
    assert largest_remainder({"a": 1, "b": 1, "c": 1}, 10) == {"a": 4, "b": 3, "c": 3}
    assert largest_remainder({"a": 3, "b": 1}, 4) == {"a": 3, "b": 1}
    assert largest_remainder({"a": 1}, 0) == {"a": 0}
    assert largest_remainder({"a": 0.5, "b": 0.5}, 5) == {"a": 3, "b": 2}


def test_largest_remainder_rejects_bad_input():
    with pytest.raises(InvalidParameters):
        largest_remainder({}, 5)
    with pytest.raises(InvalidParameters):
        largest_remainder({"a": 0.0}, 5)
    with pytest.raises(InvalidParameters):
        largest_remainder({"a": 1}, -1)


@given(
    st.dictionaries(
        st.sampled_from("abcdefgh"),
        st.floats(min_value=0.01, max_value=100, allow_nan=False),
        min_size=1,
        max_size=8,
    ),
    st.integers(min_value=0, max_value=200),
)
def test_largest_remainder_exact_and_fair(weights, total):
    counts = largest_remainder(weights, total)
    assert sum(counts.values()) == total
    mass = sum(weights.values())
    for key, n in counts.items():
        quota = weights[key] * total / mass
        assert quota - 1 < n < quota + 1


# --- pseudonyms ------------------------------------------------------------------


def test_pseudonym_deterministic():
    a = generate_pseudonym("Hispanic/Latino", "Female", random.Random(5))
    b = generate_pseudonym("Hispanic/Latino", "Female", random.Random(5))
    assert a == b
    assert len(a.split()) == 2


def test_pseudonym_uniqueness():
    rng = random.Random(1)
    used: set[str] = set()
    names = [generate_pseudonym("White", "Male", rng, used) for _ in range(100)]
    assert len(set(names)) == 100


def test_pseudonym_unknown_background_falls_back(caplog):
    with caplog.at_level(logging.WARNING):
        name = generate_pseudonym("Martian", "Female", random.Random(2))
    assert name
    assert any("unknown background" in r.message for r in caplog.records)


# --- batch -----------------------------------------------------------------------


def test_batch_seeded_reproducibility(pipeline, fixture_model):
    spec = dict(
        count=6,
        model=fixture_model,
        disorder_weights={DisorderType.ARTICULATION: 1.0, DisorderType.FLUENCY: 1.0},
        seed=42,
    )
    first = generate_batch(pipeline, BatchSpec(**spec))
    second = generate_batch(pipeline, BatchSpec(**copy.deepcopy(spec)))
    assert all(item.ok for item in first)
    assert [serialize_case(i.case) for i in first] == [serialize_case(i.case) for i in second]


def test_batch_exact_apportionment_and_unique_names(pipeline, fixture_model):
    spec = BatchSpec(
        count=10,
        model=fixture_model,
        disorder_weights={DisorderType.ARTICULATION: 1.0, DisorderType.VOICE: 1.0},
        grade_weights={GradeLevel.SECOND: 1.0},
        seed=7,
    )
    items = generate_batch(pipeline, spec)
    split = [item.request.disorders[0] for item in items]
    assert split.count(DisorderType.ARTICULATION) == 5
    assert split.count(DisorderType.VOICE) == 5
    names = [item.case.name for item in items]
    assert len(set(names)) == 10


def test_batch_count_bounds(fixture_model):
    with pytest.raises(InvalidParameters):
        BatchSpec(count=0, model=fixture_model)
    with pytest.raises(InvalidParameters):
        BatchSpec(count=101, model=fixture_model)


def test_batch_isolates_per_case_failures(pipeline, fixture_model):
    # fail exactly the first case's three attempts, succeed afterwards
    provider = FlakyProvider(bad=3)
    items = generate_batch(
        flaky_pipeline(pipeline, provider),
        BatchSpec(count=3, model=fixture_model, seed=1),
        workers=1,
    )
    assert sum(item.ok for item in items) == 2
    failed = [item for item in items if not item.ok]
    assert len(failed) == 1 and failed[0].error


# --- natural language parsing -----------------------------------------------------

NL_CASES = [
    (
        "Generate 5 second-grade students with articulation disorders",
        dict(count=5, disorders={DisorderType.ARTICULATION}, grades={GradeLevel.SECOND}),
    ),
    (
        "three kindergarten students with stuttering",
        dict(count=3, disorders={DisorderType.FLUENCY}, grades={GradeLevel.K}),
    ),
    (
        "ten middle school students with pragmatic language difficulties",
        dict(
            count=10,
            disorders={DisorderType.PRAGMATIC_LANGUAGE},
            grades={GradeLevel.SIXTH, GradeLevel.SEVENTH, GradeLevel.EIGHTH},
        ),
    ),
    (
        "a case with expressive language delays",
        dict(count=1, disorders={DisorderType.EXPRESSIVE_LANGUAGE}, grades=set()),
    ),
    (
        "twelve high school voice cases",
        dict(
            count=12,
            disorders={DisorderType.VOICE},
            grades={GradeLevel.NINTH, GradeLevel.TENTH, GradeLevel.ELEVENTH, GradeLevel.TWELFTH},
        ),
    ),
    (
        "20 students",
        dict(count=20, disorders=set(), grades=set()),
    ),
    (
        "4 pre-k students with phonological and receptive language disorders",
        dict(
            count=4,
            disorders={DisorderType.PHONOLOGICAL, DisorderType.RECEPTIVE_LANGUAGE},
            grades={GradeLevel.PRE_K},
        ),
    ),
]


@pytest.mark.parametrize("text,expected", NL_CASES, ids=[t[:30] for t, _ in NL_CASES])
def test_nl_parsing_table(text, expected, fixture_model):
    spec = parse_natural_language_request(text, fixture_model)
    assert spec.count == expected["count"]
    assert set(spec.disorder_weights or {}) == expected["disorders"]
    assert set(spec.grade_weights or {}) == expected["grades"]
    assert spec.input_method == "natural_language"
    if not expected["disorders"] or not expected["grades"]:
        assert spec.warnings


def test_nl_parsing_rejects_noise(fixture_model):
    with pytest.raises(UnparseableRequest):
        parse_natural_language_request("please make me some coffee", fixture_model)
    with pytest.raises(UnparseableRequest):
        parse_natural_language_request("   ", fixture_model)


# --- roster ----------------------------------------------------------------------


def write_roster(tmp_path, text):
    path = tmp_path / "roster.csv"
    path.write_text(text)
    return path


def test_roster_happy_path(tmp_path, fixture_model):
    path = write_roster(
        tmp_path,
        "grade,disorder1,disorder2,severity,gender\n"
        "2nd Grade,Articulation Disorders,,Moderate,Female\n"
        "Kindergarten,Fluency Disorders,Pragmatic Language Disorders,Severe,Male\n",
    )
    requests, errors = load_roster(path, fixture_model)
    assert errors == []
    assert len(requests) == 2
    assert requests[0].disorders == [DisorderType.ARTICULATION]
    assert requests[1].disorders == [DisorderType.FLUENCY, DisorderType.PRAGMATIC_LANGUAGE]
    assert "moderate severity" in requests[0].population_spec
    assert requests[1].grade is GradeLevel.K


def test_roster_row_errors_do_not_abort(tmp_path, fixture_model):
    path = write_roster(
        tmp_path,
        "grade,disorder1\n"
        "2nd Grade,Articulation Disorders\n"
        "27th Grade,Articulation Disorders\n"
        "3rd Grade,Underwater Basket Weaving\n",
    )
    requests, errors = load_roster(path, fixture_model)
    assert len(requests) == 1
    assert sorted(e.row for e in errors) == [3, 4]


def test_roster_missing_column_fatal(tmp_path, fixture_model):
    path = write_roster(tmp_path, "grade,notes\n2nd Grade,hello\n")
    with pytest.raises(RosterError) as exc_info:
        load_roster(path, fixture_model)
    assert exc_info.value.code == "missing_required_column"


def test_roster_empty_fatal(tmp_path, fixture_model):
    path = write_roster(tmp_path, "grade,disorder1\n")
    with pytest.raises(RosterError) as exc_info:
        load_roster(path, fixture_model)
    assert exc_info.value.code == "empty_roster"


# --- compatibility + matching -------------------------------------------------------


def test_compatibility_rules():
    assert disorders_compatible(DisorderType.ARTICULATION, DisorderType.PHONOLOGICAL)
    assert disorders_compatible(DisorderType.ARTICULATION, DisorderType.EXPRESSIVE_LANGUAGE)
    assert disorders_compatible(DisorderType.FLUENCY, DisorderType.PRAGMATIC_LANGUAGE)
    assert not disorders_compatible(DisorderType.FLUENCY, DisorderType.ARTICULATION)
    assert not disorders_compatible(DisorderType.VOICE, DisorderType.RECEPTIVE_LANGUAGE)
    for a in DisorderType:
        for b in DisorderType:
            assert disorders_compatible(a, b) == disorders_compatible(b, a)


def synthetic_record(i, grade, disorder, severity):
    case = parse_case(
        {
            "name": f"Student {i}",
            "grade": grade.display_name,
            "assessment_results": [
                {"assessment_name": "GFTA-3", "severity": severity}
            ],
        }
    )
    return CaseRecord(
        case_id=f"case-{i:03d}",
        case=case,
        provenance=None,
        disorders=[disorder],
        created_at=f"2026-01-{(i % 28) + 1:02d}T00:00:00",
    )


def synthetic_records(n=50, seed=13):
    rng = random.Random(seed)
    grades = list(GradeLevel)
    disorders = list(DisorderType)
    return [
        synthetic_record(
            i,
            rng.choice(grades),
            rng.choice(disorders),
            rng.choice(["Mild", "Moderate", "Severe"]),
        )
        for i in range(n)
    ]


def test_match_group_agrees_with_oracle():
    records = synthetic_records()
    for prefs in ([], [DisorderType.ARTICULATION], [DisorderType.FLUENCY, DisorderType.VOICE]):
        for grade in (GradeLevel.K, GradeLevel.FOURTH, GradeLevel.TENTH):
            req = GroupRequest(target_grade=grade, desired_size=3, disorder_preferences=prefs)
            ranked, shortfall = match_group_candidates(records, req)
            expected = oracle_group_match(
                records,
                grade.index,
                prefs,
                "Moderate",
                grade_index_of=lambda r: GradeLevel.from_name(r.case.grade).index,
                severity_of=lambda r: case_severity(r.case),
                compatible=disorders_compatible,
            )
            assert [r.case_id for r in ranked] == [r.case_id for r in expected]
            assert shortfall == max(0, 3 - len(ranked))


def test_match_group_shortfall():
    records = synthetic_records(n=3)
    req = GroupRequest(target_grade=GradeLevel.TWELFTH, desired_size=4)
    ranked, shortfall = match_group_candidates(records, req)
    assert shortfall == 4 - len(ranked)


def test_group_request_size_bounds():
    with pytest.raises(InvalidParameters):
        GroupRequest(target_grade=GradeLevel.K, desired_size=1)
    with pytest.raises(InvalidParameters):
        GroupRequest(target_grade=GradeLevel.K, desired_size=5)


# --- group plan ------------------------------------------------------------------


def test_synthesize_group_plan(pipeline, fixture_model, aurora, sofia):
    plan = synthesize_group_session(
        [aurora, sofia], fixture_model, pipeline.gateway, member_ids=["a", "b"]
    )
    assert plan.member_ids == ["a", "b"]
    assert plan.shared_activity
    assert set(plan.differentiated_targets) == {aurora.name, sofia.name}


def test_group_plan_size_precondition(pipeline, fixture_model, aurora):
    with pytest.raises(InvalidParameters):
        synthesize_group_session([aurora] * 5, fixture_model, pipeline.gateway)
    with pytest.raises(InvalidParameters):
        synthesize_group_session([aurora], fixture_model, pipeline.gateway)


def test_group_plan_incomplete_targets(fixture_model, aurora, sofia):
    class Partial(FixtureProvider):
        def complete(self, prompt_text, digest):
            return (
                '{"shared_activity": "barrier game", '
                '"differentiated_targets": {"Aurora Harris": "/r/ in sentences"}, '
                '"note": "n"}'
            )

    with pytest.raises(PlanIncomplete) as exc_info:
        synthesize_group_session([aurora, sofia], fixture_model, Gateway(fixture=Partial()))
    assert sofia.name in str(exc_info.value)


def test_group_plan_non_json(fixture_model, aurora, sofia):
    class Prose(FixtureProvider):
        def complete(self, prompt_text, digest):
            return "I would suggest a fun barrier game."

    with pytest.raises(PlanIncomplete):
        synthesize_group_session([aurora, sofia], fixture_model, Gateway(fixture=Prose()))
