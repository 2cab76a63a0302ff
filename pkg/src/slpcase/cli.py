"""Command-line interface mirroring the HTTP endpoints."""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .config import AppConfig, build_pipeline
from .errors import SlpCaseError
from .exports import EXPORT_FORMATS, export_case
from .orchestrator import (
    BatchSpec,
    GenerationRequest,
    GroupRequest,
    generate_batch,
    generate_case,
    match_group_candidates,
    parse_natural_language_request,
    synthesize_group_session,
)
from .quality import QualityScore, aggregate, score_case
from .reports import render_report
from .storage import CaseStore
from .taxonomy import DisorderType, GradeLevel
from .transcripts import (
    Transcript,
    Utterance,
    analyze_clinical,
    compute_language_metrics,
    deidentify,
    detect_disfluencies,
)


def _load_config(path: str | None) -> AppConfig:
    return AppConfig.load(path) if path else AppConfig()


@click.group()
@click.option("--config", "config_path", type=click.Path(exists=True), default=None,
              help="JSON config file (store path, providers, corpus manifest).")
@click.pass_context
def main(ctx, config_path):
    """Generate, score, and analyze school SLP case files."""
    ctx.obj = _load_config(config_path)


def _echo_json(data) -> None:
    click.echo(json.dumps(data, indent=2, default=str))


@main.command()
@click.option("--disorder", "disorders", multiple=True, required=True,
              help="Disorder name; repeat for a co-occurring pair.")
@click.option("--grade", required=True)
@click.option("--model", default=None, help="Configured provider name.")
@click.option("--population-spec", default="")
@click.option("--seed", type=int, default=None)
@click.pass_obj
def generate(config: AppConfig, disorders, grade, model, population_spec, seed):
    """Generate a single case and store it."""
    pipeline = build_pipeline(config)
    store = CaseStore(config.store_path)
    req = GenerationRequest(
        disorders=[DisorderType.from_name(d) for d in disorders],
        grade=GradeLevel.from_name(grade),
        model=config.resolve_model(model),
        population_spec=population_spec,
        seed=seed,
    )
    case, provenance = generate_case(pipeline, req)
    case_id = store.save_case(case, provenance, req.disorders)
    _echo_json({"case_id": case_id, "case": case.to_dict()})


@main.command()
@click.option("--spec", "spec_path", type=click.Path(exists=True), default=None,
              help="JSON batch spec file.")
@click.option("--text", default=None, help="Free-text request instead of a spec file.")
@click.option("--model", default=None)
@click.option("--seed", type=int, default=None)
@click.pass_obj
def batch(config: AppConfig, spec_path, text, model, seed):
    """Generate a batch of cases."""
    if not spec_path and not text:
        raise click.UsageError("provide --spec or --text")
    model_spec = config.resolve_model(model)
    if text:
        spec = parse_natural_language_request(text, model_spec)
        if seed is not None:
            spec.seed = seed
    else:
        raw = json.loads(Path(spec_path).read_text())
        spec = BatchSpec(
            count=int(raw["count"]),
            model=model_spec,
            disorder_weights={
                DisorderType.from_name(k): float(v)
                for k, v in raw.get("disorder_weights", {}).items()
            } or None,
            grade_weights={
                GradeLevel.from_name(k): float(v)
                for k, v in raw.get("grade_weights", {}).items()
            } or None,
            severity_weights=raw.get("severity_weights"),
            background_weights=raw.get("background_weights"),
            seed=seed if seed is not None else raw.get("seed"),
        )
    pipeline = build_pipeline(config)
    store = CaseStore(config.store_path)
    items = generate_batch(pipeline, spec)
    case_ids = []
    failures = []
    for item in items:
        if item.ok:
            case_ids.append(store.save_case(item.case, item.provenance, item.request.disorders))
        else:
            failures.append({"index": item.index, "error": item.error})
    _echo_json({"generated": len(case_ids), "case_ids": case_ids,
                "failures": failures, "warnings": spec.warnings})


@main.command()
@click.option("--grade", required=True)
@click.option("--size", type=int, default=3)
@click.option("--disorder", "disorders", multiple=True)
@click.option("--model", default=None)
@click.option("--plan/--no-plan", default=False, help="Also request a session plan.")
@click.pass_obj
def group(config: AppConfig, grade, size, disorders, model, plan):
    """Match stored cases for a group session."""
    store = CaseStore(config.store_path)
    req = GroupRequest(
        target_grade=GradeLevel.from_name(grade),
        desired_size=size,
        disorder_preferences=[DisorderType.from_name(d) for d in disorders],
    )
    candidates, shortfall = match_group_candidates(store.search_cases(), req)
    out = {
        "candidates": [
            {"case_id": r.case_id, "name": r.case.name, "grade": r.case.grade}
            for r in candidates
        ],
        "shortfall": shortfall,
    }
    if plan and len(candidates) >= 2:
        pipeline = build_pipeline(config)
        members = candidates[:size]
        session = synthesize_group_session(
            [r.case for r in members],
            config.resolve_model(model),
            pipeline.gateway,
            member_ids=[r.case_id for r in members],
        )
        out["plan"] = session.to_dict()
    _echo_json(out)


@main.command()
@click.option("--case", "case_path", type=click.Path(exists=True), default=None,
              help="Case JSON file to score.")
@click.option("--case-id", default=None, help="Stored case id to score.")
@click.option("--disorder", "disorders", multiple=True,
              help="Requested disorder(s), for consistency checks on file input.")
@click.pass_obj
def score(config: AppConfig, case_path, case_id, disorders):
    """Score a case on the four rubric dimensions."""
    from .casefile import parse_case_json

    if bool(case_path) == bool(case_id):
        raise click.UsageError("provide exactly one of --case or --case-id")
    if case_path:
        case = parse_case_json(Path(case_path).read_text())
        requested = [DisorderType.from_name(d) for d in disorders]
    else:
        record = CaseStore(config.store_path).load_case(case_id)
        case, requested = record.case, record.disorders
    _echo_json(score_case(case, requested).to_dict())


@main.command()
@click.option("--group-by", type=click.Choice(["model", "disorder"]), default="model")
@click.option("--out-dir", type=click.Path(), default="reports")
@click.pass_obj
def report(config: AppConfig, group_by, out_dir):
    """Score all stored cases, write the CSV table and PNG figures."""
    store = CaseStore(config.store_path)
    groups: dict[str, list[QualityScore]] = {}
    for record in store.search_cases():
        quality = score_case(record.case, record.disorders)
        if group_by == "model":
            groups.setdefault(record.provenance.model_id, []).append(quality)
        else:
            for d in record.disorders:
                groups.setdefault(d.name, []).append(quality)
    if not groups:
        click.echo("no stored cases to report on", err=True)
        sys.exit(1)
    paths = render_report(aggregate(groups), out_dir)
    for name, path in paths.items():
        click.echo(f"{name}: {path}")


@main.command()
@click.option("--transcript", "transcript_path", type=click.Path(exists=True), required=True,
              help="JSON-lines transcript: one {start_s, end_s, text} per line.")
@click.option("--deidentify", "do_deidentify", is_flag=True, default=False)
@click.option("--clinical", is_flag=True, default=False)
@click.option("--model", default=None)
@click.pass_obj
def analyze(config: AppConfig, transcript_path, do_deidentify, clinical, model):
    """Analyze a transcript for disfluencies and language metrics."""
    transcript = Transcript.from_jsonl(transcript_path)
    out: dict = {}
    if do_deidentify:
        cleaned = []
        for u in transcript.utterances:
            text, _ = deidentify(u.text)
            cleaned.append(Utterance(u.start_s, u.end_s, text))
        transcript = Transcript(utterances=cleaned)
        out["deidentified"] = [u.text for u in transcript.utterances]
    pattern = detect_disfluencies(transcript)
    metrics = compute_language_metrics(transcript)
    pattern.mlu_approx = metrics.mlu_approx
    pattern.avg_word_length = metrics.avg_word_length
    pattern.avg_sentence_length = metrics.avg_sentence_length
    out["report"] = pattern.to_dict()
    if clinical:
        pipeline = build_pipeline(config)
        analysis = analyze_clinical(pattern, config.resolve_model(model), pipeline.gateway)
        out["clinical"] = vars(analysis)
    _echo_json(out)


@main.command()
@click.option("--case-id", required=True)
@click.option("--format", "fmt", type=click.Choice(list(EXPORT_FORMATS)), default="canonical_json")
@click.option("--out", type=click.Path(), default=None, help="Output file (default stdout).")
@click.pass_obj
def export(config: AppConfig, case_id, fmt, out):
    """Export a stored case."""
    record = CaseStore(config.store_path).load_case(case_id)
    data = export_case(record.case, fmt)
    if out:
        Path(out).write_bytes(data)
        click.echo(out)
    else:
        sys.stdout.buffer.write(data)


@main.command()
@click.option("--host", default="127.0.0.1")
@click.option("--port", type=int, default=8000)
@click.pass_obj
def serve(config: AppConfig, host, port):
    """Run the HTTP API."""
    import uvicorn

    from .api import create_app

    uvicorn.run(create_app(config), host=host, port=port)


def run() -> None:
    try:
        main()
    except SlpCaseError as exc:
        click.echo(f"error [{exc.code}]: {exc}", err=True)
        sys.exit(1)


if __name__ == "__main__":
    run()
