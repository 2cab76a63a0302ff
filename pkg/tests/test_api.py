import time

import pytest
from fastapi.testclient import TestClient

from slpcase.api import create_app
from slpcase.config import AppConfig
from slpcase.storage import CaseStore


@pytest.fixture
def client(tmp_path, pipeline):
    config = AppConfig(store_path=str(tmp_path / "api.db"))
    app = create_app(config=config, pipeline=pipeline, store=CaseStore(config.store_path))
    with TestClient(app) as c:
        yield c


def make_case(client, disorder="Articulation Disorders", grade="2nd Grade"):
    resp = client.post("/cases", json={"disorders": [disorder], "grade": grade})
    assert resp.status_code == 201, resp.text
    return resp.json()


def wait_job(client, job_id, timeout=30.0):
    deadline = time.monotonic() + timeout
    while time.monotonic() < deadline:
        job = client.get(f"/jobs/{job_id}").json()
        if job["status"] in ("done", "failed"):
            return job
        time.sleep(0.05)
    raise TimeoutError("job did not finish")


# --- generation --------------------------------------------------------------------


def test_create_case_contract(client):
    body = make_case(client)
    assert set(body) == {"case_id", "case", "provenance", "disorders", "created_at"}
    assert body["case"]["grade"] == "2nd Grade"
    assert len(body["case"]["annual_goals"]) >= 2
    assert len(body["provenance"]["chunk_ids"]) == 10
    assert body["disorders"] == ["ARTICULATION"]


def test_create_case_bad_disorder_is_400(client):
    resp = client.post("/cases", json={"disorders": ["Bad Vibes"], "grade": "2nd Grade"})
    assert resp.status_code == 400
    body = resp.json()
    assert set(body) == {"code", "message", "correlation_id"}


def test_unknown_model_is_404(client):
    resp = client.post(
        "/cases",
        json={"disorders": ["Voice Disorders"], "grade": "K", "model": "gpt-99"},
    )
    assert resp.status_code == 404


def test_batch_roundtrip(client):
    resp = client.post(
        "/batches",
        json={"spec": {"count": 3, "disorder_weights": {"Fluency Disorders": 1.0}, "seed": 5}},
    )
    assert resp.status_code == 202
    job = wait_job(client, resp.json()["job_id"])
    assert job["status"] == "done"
    result = job["result"]
    assert len(result["case_ids"]) == 3
    assert result["failures"] == []
    for case_id in result["case_ids"]:
        assert client.get(f"/cases/{case_id}").status_code == 200


def test_batch_natural_language(client):
    resp = client.post("/batches", json={"text": "2 third grade articulation cases"})
    assert resp.status_code == 202
    job = wait_job(client, resp.json()["job_id"])
    assert job["status"] == "done"
    assert len(job["result"]["case_ids"]) == 2


def test_batch_unparseable_text_is_400(client):
    resp = client.post("/batches", json={"text": "please do the thing"})
    assert resp.status_code == 400


def test_job_not_found(client):
    assert client.get("/jobs/nope").status_code == 404


def test_job_result_immutable_after_done(client):
    resp = client.post("/batches", json={"spec": {"count": 1, "seed": 3}})
    job_id = resp.json()["job_id"]
    done = wait_job(client, job_id)
    again = client.get(f"/jobs/{job_id}").json()
    assert again == done
    assert again["progress"] == 1.0


# --- search + export ---------------------------------------------------------------


def test_list_and_filter_cases(client):
    a = make_case(client, "Articulation Disorders", "2nd Grade")
    make_case(client, "Voice Disorders", "10th Grade")
    everything = client.get("/cases").json()["cases"]
    assert len(everything) == 2
    filtered = client.get(
        "/cases", params={"disorder": "Articulation Disorders", "grade_max": "5th Grade"}
    ).json()["cases"]
    assert [c["case_id"] for c in filtered] == [a["case_id"]]


def test_get_case_404(client):
    assert client.get("/cases/missing").status_code == 404


def test_export_formats(client):
    case_id = make_case(client)["case_id"]
    json_resp = client.get(f"/cases/{case_id}/export")
    assert json_resp.status_code == 200
    assert json_resp.headers["content-type"].startswith("application/json")
    csv_resp = client.get(f"/cases/{case_id}/export", params={"format": "csv_flat"})
    assert csv_resp.text.splitlines()[0] == "section,index,field,value"
    bad = client.get(f"/cases/{case_id}/export", params={"format": "docx"})
    assert bad.status_code == 400


# --- groups -----------------------------------------------------------------------


def test_group_match_and_plan(client):
    a = make_case(client, "Articulation Disorders", "2nd Grade")
    b = make_case(client, "Phonological Disorders", "3rd Grade")
    make_case(client, "Voice Disorders", "11th Grade")

    match = client.post(
        "/groups/match",
        json={
            "target_grade": "2nd Grade",
            "desired_size": 2,
            "disorder_preferences": ["Articulation Disorders"],
        },
    ).json()
    ids = [c["case_id"] for c in match["candidates"]]
    assert set(ids) == {a["case_id"], b["case_id"]}
    assert match["shortfall"] == 0

    plan = client.post("/groups/plan", json={"member_ids": ids})
    assert plan.status_code == 200
    body = plan.json()
    assert body["member_ids"] == ids
    names = {a["case"]["name"], b["case"]["name"]}
    assert set(body["differentiated_targets"]) == names


def test_group_plan_missing_member_404(client):
    resp = client.post("/groups/plan", json={"member_ids": ["ghost"]})
    assert resp.status_code == 404


def test_group_match_bad_size_400(client):
    resp = client.post("/groups/match", json={"target_grade": "K", "desired_size": 9})
    assert resp.status_code == 400


# --- scoring + feedback ----------------------------------------------------------------


def test_score_endpoint(client):
    case_id = make_case(client)["case_id"]
    body = client.post(f"/cases/{case_id}/score").json()
    det = body["deterministic"]
    for dim in ("structural", "consistency", "clinical", "documentation"):
        assert 1 <= det[dim] <= 5
    assert "judge" not in body
    judged = client.post(f"/cases/{case_id}/score", params={"judge": "fixture-1"}).json()
    assert judged["judge"]["structural"] == 5


def test_feedback_endpoint(client):
    case_id = make_case(client)["case_id"]
    good = {
        "reviewer_id": "rev-1",
        "ratings": {
            "clinical_accuracy": 5,
            "documentation_quality": 4,
            "educational_utility": 5,
            "cultural_appropriateness": 5,
        },
    }
    assert client.post(f"/cases/{case_id}/feedback", json=good).status_code == 201
    bad = dict(good, ratings=dict(good["ratings"], clinical_accuracy=9))
    assert client.post(f"/cases/{case_id}/feedback", json=bad).status_code == 400
    assert client.post("/cases/ghost/feedback", json=good).status_code == 409


def test_validate_endpoint(client):
    case_id = make_case(client)["case_id"]
    body = client.post(f"/cases/{case_id}/validate").json()
    assert body["errors"] == []
    assert body["is_valid"] is True


# --- transcripts -----------------------------------------------------------------------


def test_transcript_analysis_endpoint(client):
    payload = {
        "utterances": [
            {"start_s": 0, "end_s": 2, "text": "Aurora said b-b-ball"},
            {"start_s": 2, "end_s": 5, "text": "then (1.5s) the wabbit ran"},
        ],
        "deidentify": True,
        "clinical": True,
        "target_lexicon": {"rabbit": "rabbit"},
    }
    body = client.post("/transcripts/analyze", json=payload).json()
    assert body["deidentified"][0] == "[NAME] said b-b-ball"
    assert body["replacements"][0]["category"] == "NAME"
    report = body["report"]
    assert report["sound_repetitions"] == 1
    assert report["blocks"] == 1
    assert report["substitution_candidates"][0]["produced"] == "wabbit"
    assert set(body["clinical"]) == {
        "diagnostic_hypotheses",
        "severity",
        "estimated_age_range",
        "recommended_goals",
        "observations",
        "recommendations",
    }


def test_transcript_empty_is_400(client):
    resp = client.post("/transcripts/analyze", json={"utterances": []})
    assert resp.status_code == 400


# --- reports --------------------------------------------------------------------------


def test_quality_report_arithmetic(client):
    for _ in range(2):
        make_case(client, "Articulation Disorders", "2nd Grade")
    make_case(client, "Fluency Disorders", "9th Grade")
    body = client.get("/reports/quality").json()
    assert len(body["rows"]) == 1  # single fixture model
    row = body["rows"][0]
    assert row["n"] == 3
    dims = (row["structural"], row["consistency"], row["clinical"], row["documentation"])
    assert abs(row["overall"] - sum(dims) / 4) <= 0.005

    by_disorder = client.get("/reports/quality", params={"group_by": "disorder"}).json()
    assert {r["group"] for r in by_disorder["rows"]} == {"ARTICULATION", "FLUENCY"}
    bad = client.get("/reports/quality", params={"group_by": "vibes"})
    assert bad.status_code == 400


def test_error_report_endpoint(client):
    body = client.get("/reports/errors").json()
    assert set(body["totals"]) == {
        "developmental_inappropriateness",
        "disorder_goal_misalignment",
        "internal_inconsistency",
        "documentation_violation",
        "cultural_insensitivity",
    }
    grouped = client.get("/reports/errors", params={"by_model": True}).json()
    assert "groups" in grouped
