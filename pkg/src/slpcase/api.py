"""HTTP service exposing generation, search, scoring, feedback, transcript
analysis, and reports. Every endpoint is a thin adapter over the library
modules; long-running batches run as asynchronous jobs polled via /jobs/{id}.
"""

from __future__ import annotations

import logging
import threading
import uuid
from concurrent.futures import ThreadPoolExecutor

from fastapi import Body, FastAPI, Query, Request
from fastapi.responses import JSONResponse

from .config import AppConfig, build_pipeline
from .errors import (
    GenerationFailed,
    IntegrityError,
    NotFound,
    ProviderError,
    RateLimited,
    SlpCaseError,
)
from .exports import export_case
from .orchestrator import (
    BatchSpec,
    GenerationRequest,
    GroupRequest,
    Pipeline,
    generate_batch,
    generate_case,
    match_group_candidates,
    parse_natural_language_request,
    synthesize_group_session,
)
from .quality import QualityScore, aggregate, llm_judge, score_case
from .storage import CaseStore
from .taxonomy import DisorderType, GradeLevel
from .transcripts import (
    Transcript,
    Utterance,
    analyze_clinical,
    compute_language_metrics,
    deidentify,
    detect_articulation_candidates,
    detect_disfluencies,
)
from .validation import validate_case

logger = logging.getLogger(__name__)


def _status_for(exc: SlpCaseError) -> int:
    if isinstance(exc, NotFound):
        return 404
    if isinstance(exc, IntegrityError):
        return 409
    if isinstance(exc, RateLimited):
        return 503
    if isinstance(exc, (ProviderError, GenerationFailed)):
        return 502
    return 400


class JobManager:
    def __init__(self, workers: int = 4):
        self._jobs: dict[str, dict] = {}
        self._lock = threading.Lock()
        self._pool = ThreadPoolExecutor(max_workers=workers)

    def submit(self, fn) -> str:
        job_id = uuid.uuid4().hex
        with self._lock:
            self._jobs[job_id] = {"status": "running", "progress": 0.0, "result": None, "error": None}

        def run():
            try:
                result = fn()
                with self._lock:
                    self._jobs[job_id].update(status="done", progress=1.0, result=result)
            except Exception as exc:
                logger.exception("job %s failed", job_id)
                with self._lock:
                    self._jobs[job_id].update(status="failed", error=str(exc))

        self._pool.submit(run)
        return job_id

    def get(self, job_id: str) -> dict:
        with self._lock:
            if job_id not in self._jobs:
                raise NotFound(f"no job with id {job_id!r}")
            return dict(self._jobs[job_id])


def _parse_disorders(names: list) -> list[DisorderType]:
    return [DisorderType.from_name(str(n)) for n in names]


def _case_payload(record) -> dict:
    return {
        "case_id": record.case_id,
        "case": record.case.to_dict(),
        "provenance": record.provenance.to_dict(),
        "disorders": [d.name for d in record.disorders],
        "created_at": record.created_at,
    }


def create_app(
    config: AppConfig | None = None,
    pipeline: Pipeline | None = None,
    store: CaseStore | None = None,
) -> FastAPI:
    config = config or AppConfig()
    pipeline = pipeline or build_pipeline(config)
    store = store or CaseStore(config.store_path)
    jobs = JobManager(workers=config.workers)
    app = FastAPI(title="slpcase", version="0.1.0")
    app.state.store = store
    app.state.pipeline = pipeline

    @app.exception_handler(SlpCaseError)
    async def handle_domain_error(request: Request, exc: SlpCaseError):
        correlation_id = uuid.uuid4().hex
        logger.warning("[%s] %s: %s", correlation_id, exc.code, exc)
        return JSONResponse(
            status_code=_status_for(exc),
            content={"code": exc.code, "message": str(exc), "correlation_id": correlation_id},
        )

    @app.exception_handler(ValueError)
    async def handle_value_error(request: Request, exc: ValueError):
        correlation_id = uuid.uuid4().hex
        logger.warning("[%s] invalid_parameters: %s", correlation_id, exc)
        return JSONResponse(
            status_code=400,
            content={
                "code": "invalid_parameters",
                "message": str(exc),
                "correlation_id": correlation_id,
            },
        )

    def _model(name: str | None):
        try:
            return config.resolve_model(name)
        except KeyError as exc:
            raise NotFound(str(exc)) from exc

    # --- generation ----------------------------------------------------------

    @app.post("/cases", status_code=201)
    def create_case(payload: dict = Body(...)):
        req = GenerationRequest(
            disorders=_parse_disorders(payload.get("disorders", [])),
            grade=GradeLevel.from_name(str(payload.get("grade", ""))),
            model=_model(payload.get("model")),
            population_spec=str(payload.get("population_spec", "")),
        )
        case, provenance = generate_case(pipeline, req)
        case_id = store.save_case(case, provenance, req.disorders)
        return _case_payload(store.load_case(case_id))

    def _batch_spec(payload: dict) -> BatchSpec:
        if "text" in payload:
            return parse_natural_language_request(
                str(payload["text"]), _model(payload.get("model"))
            )
        spec = payload.get("spec", payload)
        weights = {}
        if spec.get("disorder_weights"):
            weights["disorder_weights"] = {
                DisorderType.from_name(k): float(v)
                for k, v in spec["disorder_weights"].items()
            }
        if spec.get("grade_weights"):
            weights["grade_weights"] = {
                GradeLevel.from_name(k): float(v) for k, v in spec["grade_weights"].items()
            }
        return BatchSpec(
            count=int(spec.get("count", 1)),
            model=_model(spec.get("model")),
            severity_weights=spec.get("severity_weights"),
            background_weights=spec.get("background_weights"),
            seed=spec.get("seed"),
            **weights,
        )

    @app.post("/batches", status_code=202)
    def create_batch(payload: dict = Body(...)):
        spec = _batch_spec(payload)

        def run():
            items = generate_batch(pipeline, spec, workers=config.workers)
            case_ids, failures = [], []
            for item in items:
                if item.ok:
                    case_ids.append(
                        store.save_case(item.case, item.provenance, item.request.disorders)
                    )
                else:
                    failures.append({"index": item.index, "error": item.error})
            return {"case_ids": case_ids, "failures": failures, "warnings": spec.warnings}

        return {"job_id": jobs.submit(run)}

    @app.get("/jobs/{job_id}")
    def get_job(job_id: str):
        return jobs.get(job_id)

    # --- search -----------------------------------------------------------------

    @app.get("/cases")
    def list_cases(
        disorder: str | None = None,
        grade_min: str | None = None,
        grade_max: str | None = None,
        severity: str | None = None,
    ):
        records = store.search_cases(
            disorder=DisorderType.from_name(disorder) if disorder else None,
            grade_min=GradeLevel.from_name(grade_min) if grade_min else None,
            grade_max=GradeLevel.from_name(grade_max) if grade_max else None,
            severity=severity,
        )
        return {"cases": [_case_payload(r) for r in records]}

    @app.get("/cases/{case_id}")
    def get_case(case_id: str):
        return _case_payload(store.load_case(case_id))

    @app.get("/cases/{case_id}/export")
    def export(case_id: str, format: str = Query("canonical_json")):
        record = store.load_case(case_id)
        data = export_case(record.case, format)
        media = "application/json" if format == "canonical_json" else "text/plain"
        from fastapi.responses import Response

        return Response(content=data, media_type=media)

    # --- groups ------------------------------------------------------------------

    @app.post("/groups/match")
    def group_match(payload: dict = Body(...)):
        req = GroupRequest(
            target_grade=GradeLevel.from_name(str(payload.get("target_grade", ""))),
            desired_size=int(payload.get("desired_size", 2)),
            disorder_preferences=_parse_disorders(payload.get("disorder_preferences", [])),
            target_severity=str(payload.get("target_severity", "Moderate")),
        )
        records = store.search_cases()
        candidates, shortfall = match_group_candidates(records, req)
        return {
            "candidates": [_case_payload(r) for r in candidates],
            "shortfall": shortfall,
        }

    @app.post("/groups/plan")
    def group_plan(payload: dict = Body(...)):
        member_ids = [str(i) for i in payload.get("member_ids", [])]
        members = [store.load_case(i).case for i in member_ids]
        plan = synthesize_group_session(
            members, _model(payload.get("model")), pipeline.gateway, member_ids=member_ids
        )
        return plan.to_dict()

    # --- scoring + feedback ----------------------------------------------------------

    @app.post("/cases/{case_id}/score")
    def score(case_id: str, judge: str | None = None):
        record = store.load_case(case_id)
        deterministic = score_case(record.case, record.disorders)
        body = {"deterministic": deterministic.to_dict()}
        if judge:
            body["judge"] = llm_judge(record.case, _model(judge), pipeline.gateway).to_dict()
        return body

    @app.post("/cases/{case_id}/feedback", status_code=201)
    def feedback(case_id: str, payload: dict = Body(...)):
        feedback_id = store.save_feedback(
            case_id=case_id,
            reviewer_id=str(payload.get("reviewer_id", "")),
            ratings=payload.get("ratings", {}),
            free_text=str(payload.get("free_text", "")),
        )
        return {"feedback_id": feedback_id}

    # --- transcripts -------------------------------------------------------------------

    @app.post("/transcripts/analyze")
    def analyze(payload: dict = Body(...)):
        utterances = [
            Utterance(
                start_s=float(u.get("start_s", 0.0)),
                end_s=float(u.get("end_s", 0.0)),
                text=str(u.get("text", "")),
            )
            for u in payload.get("utterances", [])
        ]
        transcript = Transcript(utterances=utterances)
        body: dict = {}
        if payload.get("deidentify"):
            cleaned = []
            log = []
            for u in transcript.utterances:
                text, replacements = deidentify(u.text)
                cleaned.append(Utterance(u.start_s, u.end_s, text))
                log.extend(
                    {"span": list(r.span), "category": r.category} for r in replacements
                )
            transcript = Transcript(utterances=cleaned)
            body["deidentified"] = [u.text for u in transcript.utterances]
            body["replacements"] = log
        report = detect_disfluencies(transcript)
        metrics = compute_language_metrics(transcript)
        report.mlu_approx = metrics.mlu_approx
        report.avg_word_length = metrics.avg_word_length
        report.avg_sentence_length = metrics.avg_sentence_length
        if payload.get("target_lexicon"):
            artic = detect_articulation_candidates(transcript, payload["target_lexicon"])
            report.substitution_candidates = artic.substitution_candidates
            report.omission_candidates = artic.omission_candidates
            report.distortion_candidates = artic.distortion_candidates
        body["report"] = report.to_dict()
        if payload.get("clinical"):
            analysis = analyze_clinical(report, _model(payload.get("model")), pipeline.gateway)
            body["clinical"] = vars(analysis)
        return body

    # --- reports -------------------------------------------------------------------------

    @app.get("/reports/quality")
    def quality_report(group_by: str = Query("model")):
        if group_by not in ("model", "disorder"):
            raise SlpCaseError(
                f"group_by must be model or disorder, got {group_by!r}",
                code="invalid_parameters",
            )
        groups: dict[str, list[QualityScore]] = {}
        for record in store.search_cases():
            quality = score_case(record.case, record.disorders)
            if group_by == "model":
                groups.setdefault(record.provenance.model_id, []).append(quality)
            else:
                for d in record.disorders:
                    groups.setdefault(d.name, []).append(quality)
        rows = [r.display_row() for r in aggregate(groups)] if groups else []
        return {"rows": rows}

    @app.get("/reports/errors")
    def error_report(
        by_model: bool = False,
        by_disorder: bool = False,
        since: str | None = None,
        until: str | None = None,
    ):
        return store.error_report(
            by_model=by_model, by_disorder=by_disorder, since=since, until=until
        )

    @app.post("/cases/{case_id}/validate")
    def validate(case_id: str):
        record = store.load_case(case_id)
        return validate_case(record.case).to_dict()

    return app
