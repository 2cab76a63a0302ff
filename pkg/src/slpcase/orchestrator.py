"""Generation orchestration: single case, batch with diversity control, and
group sessions, plus pseudonym drawing and free-text request parsing.

The single-case pipeline is build_query, retrieve, format_context,
select_template, render, complete, extract_json, validate; a case that parses
but fails validation is retried with the identical prompt up to the retry
budget before the last report is surfaced.
"""

from __future__ import annotations

import csv
import json
import logging
import random
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from importlib import resources
from pathlib import Path

from .casefile import CaseFile, parse_case
from .errors import (
    GenerationFailed,
    InvalidParameters,
    PlanIncomplete,
    RosterError,
    UnparseableRequest,
)
from .fixture import GROUP_PLAN_MARKER
from .gateway import Gateway, ModelSpec, extract_json, request_digest
from .kb.embeddings import EmbedderAdapter
from .kb.pipeline import KnowledgeQuery, build_query, format_context, retrieve_for_query
from .kb.store import VectorStore
from .prompts import TemplateLibrary, render
from .taxonomy import DisorderType, GradeLevel
from .validation import validate_case

logger = logging.getLogger(__name__)

RETRY_BUDGET = 2  # additional attempts after the first
DEFAULT_K = 10
MAX_BATCH = 100
GROUP_SIZE_RANGE = (2, 4)
MAX_GRADE_DISTANCE = 2


@dataclass
class GenerationRequest:
    disorders: list[DisorderType]
    grade: GradeLevel
    model: ModelSpec
    population_spec: str = ""
    seed: int | None = None

    def __post_init__(self):
        if not self.disorders:
            raise InvalidParameters("at least one disorder required")
        if len(self.disorders) > 2:
            raise InvalidParameters("at most two co-occurring disorders supported")


@dataclass
class Provenance:
    chunk_ids: list[str]
    similarities: list[float]
    template_id: str
    model_id: str
    request_digest: str
    timestamp: str

    def to_dict(self) -> dict:
        return dict(vars(self))


@dataclass
class Pipeline:
    """Shared dependencies for the generation pipeline."""

    store: VectorStore
    embedder: EmbedderAdapter
    gateway: Gateway
    templates: TemplateLibrary
    k: int = DEFAULT_K


def generate_case(pipeline: Pipeline, req: GenerationRequest) -> tuple[CaseFile, Provenance]:
    query = KnowledgeQuery(
        disorders=req.disorders,
        grade=req.grade,
        population_spec=req.population_spec,
        k=pipeline.k,
    )
    results = retrieve_for_query(pipeline.store, pipeline.embedder, query)
    context = format_context(results)
    template = pipeline.templates.select_template(req.model.model_class)
    rendered = render(
        template,
        {
            "disorders": ", ".join(d.display_name for d in req.disorders),
            "grade": req.grade.display_name,
            "population_spec": req.population_spec,
            "context": context,
        },
    )
    digest = request_digest(req.model.model_id, req.model.temperature, rendered.text)

    last_report = None
    last_diag = ""
    for attempt in range(1 + RETRY_BUDGET):
        raw = pipeline.gateway.complete(req.model, rendered)
        outcome = extract_json(raw)
        if outcome.status == "not_json":
            last_diag = outcome.diagnostics
            continue
        case = parse_case(outcome.payload)
        report = validate_case(case)
        if report.is_valid:
            provenance = Provenance(
                chunk_ids=[r.embedded_chunk.chunk_id for r in results],
                similarities=[r.similarity for r in results],
                template_id=rendered.template_id,
                model_id=req.model.model_id,
                request_digest=digest,
                timestamp=datetime.now(timezone.utc).isoformat(),
            )
            return case, provenance
        last_report = report
        last_diag = outcome.diagnostics
        logger.warning(
            "attempt %d invalid (%d errors); retrying", attempt + 1,
            len(report.errors),
        )
    raise GenerationFailed(
        f"no structurally valid case after {1 + RETRY_BUDGET} attempts: {last_diag}",
        last_report=last_report,
    )


# --- pseudonyms -----------------------------------------------------------------

_NAME_POOLS: dict | None = None


def name_pools() -> dict:
    global _NAME_POOLS
    if _NAME_POOLS is None:
        _NAME_POOLS = json.loads(
            (resources.files("slpcase") / "assets" / "names.json").read_text()
        )
    return _NAME_POOLS


def generate_pseudonym(
    cultural_background: str,
    gender: str,
    rng: random.Random,
    used: set[str] | None = None,
) -> str:
    """Draw a full name from the background/gender pools.

    Unknown backgrounds fall back to a draw across all pools with a warning.
    Names already in ``used`` are skipped; when the pools are exhausted a
    numeric suffix keeps the uniqueness contract.
    """
    pools = name_pools()
    gender_key = gender if gender in ("Female", "Male") else rng.choice(["Female", "Male"])
    if cultural_background in pools:
        pool = pools[cultural_background]
        givens, surnames = pool[gender_key], pool["surnames"]
    else:
        logger.warning("unknown background %r; drawing from all pools", cultural_background)
        givens = [n for p in pools.values() for n in p[gender_key]]
        surnames = [n for p in pools.values() for n in p["surnames"]]
    used = used if used is not None else set()
    combos = len(givens) * len(surnames)
    for _ in range(combos):
        name = f"{rng.choice(givens)} {rng.choice(surnames)}"
        if name not in used:
            used.add(name)
            return name
    suffix = 2
    base = f"{rng.choice(givens)} {rng.choice(surnames)}"
    while f"{base} {suffix}" in used:
        suffix += 1
    name = f"{base} {suffix}"
    used.add(name)
    return name


def _rename_case(case: CaseFile, new_name: str) -> CaseFile:
    """Rewrite the student's name across every free-text field."""
    old = case.name if isinstance(case.name, str) else ""
    if not old or old == new_name:
        case.name = new_name or case.name
        return case
    old_first = old.split()[0]
    new_first = new_name.split()[0]

    def swap(text):
        if not isinstance(text, str):
            return text
        return text.replace(old, new_name).replace(old_first, new_first)

    case.name = new_name
    case.background = swap(case.background)
    for goal in case.annual_goals:
        goal.goal_brief = swap(goal.goal_brief)
        goal.goal_annual = swap(goal.goal_annual)
    for note in case.session_notes:
        note.note = swap(note.note)
    return case


# --- batch generation ----------------------------------------------------------

SEVERITY_BAND_NAMES = ("Mild", "Moderate", "Severe")


@dataclass
class BatchSpec:
    count: int
    model: ModelSpec
    disorder_weights: dict[DisorderType, float] | None = None
    grade_weights: dict[GradeLevel, float] | None = None
    severity_weights: dict[str, float] | None = None
    background_weights: dict[str, float] | None = None
    input_method: str = "manual"
    seed: int | None = None
    warnings: list[str] = field(default_factory=list)

    def __post_init__(self):
        if not 1 <= self.count <= MAX_BATCH:
            raise InvalidParameters(f"batch count must be in [1, {MAX_BATCH}]")


@dataclass
class BatchItem:
    index: int
    request: GenerationRequest | None = None
    case: CaseFile | None = None
    provenance: Provenance | None = None
    error: str = ""

    @property
    def ok(self) -> bool:
        return self.case is not None


def largest_remainder(weights: dict, total: int) -> dict:
    """Apportion ``total`` across keys proportionally to weights, exactly.

    Deterministic: remainders tie-break on declaration order of the keys.
    """
    if not weights or total < 0:
        raise InvalidParameters("weights must be non-empty and total non-negative")
    mass = sum(weights.values())
    if mass <= 0:
        raise InvalidParameters("weights must sum to a positive value")
    keys = list(weights)
    quotas = [weights[k] * total / mass for k in keys]
    counts = {k: int(q) for k, q in zip(keys, quotas)}
    leftover = total - sum(counts.values())
    by_remainder = sorted(
        range(len(keys)), key=lambda i: (-(quotas[i] - int(quotas[i])), i)
    )
    for i in by_remainder[:leftover]:
        counts[keys[i]] += 1
    return counts


def _expand(weights: dict | None, default: dict, total: int, rng: random.Random) -> list:
    counts = largest_remainder(weights or default, total)
    expanded = [key for key, n in counts.items() for _ in range(n)]
    rng.shuffle(expanded)
    return expanded


def generate_batch(pipeline: Pipeline, spec: BatchSpec, workers: int = 4) -> list[BatchItem]:
    """Generate ``spec.count`` cases with largest-remainder diversity control.

    Per-case failures are reported in the returned items without aborting the
    batch. With the fixture provider and a fixed seed, the output case bytes
    are identical across runs.
    """
    rng = random.Random(spec.seed)
    pools = name_pools()
    disorders = _expand(spec.disorder_weights, {d: 1.0 for d in DisorderType}, spec.count, rng)
    grades = _expand(spec.grade_weights, {g: 1.0 for g in GradeLevel}, spec.count, rng)
    severities = _expand(spec.severity_weights, {"Moderate": 1.0}, spec.count, rng)
    backgrounds = _expand(spec.background_weights, {b: 1.0 for b in pools}, spec.count, rng)
    genders = [rng.choice(["Female", "Male"]) for _ in range(spec.count)]

    requests = []
    for i in range(spec.count):
        requests.append(
            GenerationRequest(
                disorders=[disorders[i]],
                grade=grades[i],
                model=spec.model,
                population_spec=(
                    f"{backgrounds[i]} background, {severities[i].lower()} severity, "
                    f"{genders[i].lower()} student"
                ),
            )
        )

    items = [BatchItem(index=i, request=requests[i]) for i in range(spec.count)]

    def run_one(i: int) -> None:
        try:
            case, provenance = generate_case(pipeline, requests[i])
            items[i].case = case
            items[i].provenance = provenance
        except Exception as exc:  # per-case isolation: one failure never aborts the batch
            items[i].error = str(exc)

    with ThreadPoolExecutor(max_workers=workers) as pool:
        list(pool.map(run_one, range(spec.count)))

    if not any(item.ok for item in items):
        raise GenerationFailed("all cases in the batch failed")

    # pseudonyms drawn after generation so uniqueness holds batch-wide
    used: set[str] = set()
    for i, item in enumerate(items):
        if item.case is None:
            continue
        gender = item.case.gender if item.case.gender in ("Female", "Male") else genders[i]
        _rename_case(item.case, generate_pseudonym(backgrounds[i], gender, rng, used))
    return items


# --- natural-language request parsing ----------------------------------------------

_NUMBER_WORDS = {
    "one": 1, "two": 2, "three": 3, "four": 4, "five": 5, "six": 6,
    "seven": 7, "eight": 8, "nine": 9, "ten": 10, "eleven": 11, "twelve": 12,
    "thirteen": 13, "fourteen": 14, "fifteen": 15, "sixteen": 16,
    "seventeen": 17, "eighteen": 18, "nineteen": 19, "twenty": 20,
    "thirty": 30, "forty": 40, "fifty": 50, "sixty": 60, "seventy": 70,
    "eighty": 80, "ninety": 90, "hundred": 100, "a hundred": 100,
    "one hundred": 100,
}

_ORDINAL_WORDS = {
    "first": 1, "second": 2, "third": 3, "fourth": 4, "fifth": 5,
    "sixth": 6, "seventh": 7, "eighth": 8, "ninth": 9, "tenth": 10,
    "eleventh": 11, "twelfth": 12,
}

_GRADE_SPANS = {
    "high school": (GradeLevel.NINTH, GradeLevel.TWELFTH),
    "middle school": (GradeLevel.SIXTH, GradeLevel.EIGHTH),
    "elementary": (GradeLevel.K, GradeLevel.FIFTH),
}

_DISORDER_PHRASES: list[tuple[str, DisorderType]] = sorted(
    [
        ("articulation", DisorderType.ARTICULATION),
        ("phonological", DisorderType.PHONOLOGICAL),
        ("phonology", DisorderType.PHONOLOGICAL),
        ("speech sound", DisorderType.SPEECH_SOUND_GENERAL),
        ("expressive language", DisorderType.EXPRESSIVE_LANGUAGE),
        ("expressive", DisorderType.EXPRESSIVE_LANGUAGE),
        ("receptive language", DisorderType.RECEPTIVE_LANGUAGE),
        ("receptive", DisorderType.RECEPTIVE_LANGUAGE),
        ("language", DisorderType.LANGUAGE_GENERAL),
        ("pragmatic language", DisorderType.PRAGMATIC_LANGUAGE),
        ("pragmatic", DisorderType.PRAGMATIC_LANGUAGE),
        ("pragmatics", DisorderType.PRAGMATIC_LANGUAGE),
        ("social communication", DisorderType.SOCIAL_COMMUNICATION),
        ("fluency", DisorderType.FLUENCY),
        ("stuttering", DisorderType.FLUENCY),
        ("apraxia", DisorderType.CHILDHOOD_APRAXIA),
        ("voice", DisorderType.VOICE),
        ("vocal", DisorderType.VOICE),
    ],
    key=lambda pair: -len(pair[0]),  # longest phrase wins ("expressive language" over "language")
)


def _extract_grades(lowered: str) -> tuple[list[GradeLevel], str]:
    grades: list[GradeLevel] = []
    for phrase, (lo, hi) in _GRADE_SPANS.items():
        if phrase in lowered:
            grades.extend(list(GradeLevel)[lo.index : hi.index + 1])
            lowered = lowered.replace(phrase, " ")
    if re.search(r"\bpre-?k\b", lowered):
        grades.append(GradeLevel.PRE_K)
        lowered = re.sub(r"\bpre-?k\b", " ", lowered)
    if re.search(r"\bkindergarten(?:er)?s?\b", lowered):
        grades.append(GradeLevel.K)
        lowered = re.sub(r"\bkindergarten(?:er)?s?\b", " ", lowered)

    def grade_from_n(n: int) -> GradeLevel | None:
        return list(GradeLevel)[n + 1] if 1 <= n <= 12 else None

    for m in re.finditer(r"\b(\d{1,2})(?:st|nd|rd|th)?[- ]grade", lowered):
        g = grade_from_n(int(m.group(1)))
        if g:
            grades.append(g)
    lowered = re.sub(r"\b\d{1,2}(?:st|nd|rd|th)?[- ]grade\w*", " ", lowered)
    for m in re.finditer(r"\bgrade (\d{1,2})\b", lowered):
        g = grade_from_n(int(m.group(1)))
        if g:
            grades.append(g)
    lowered = re.sub(r"\bgrade \d{1,2}\b", " ", lowered)
    for word, n in _ORDINAL_WORDS.items():
        if re.search(rf"\b{word}[- ]grade", lowered):
            g = grade_from_n(n)
            if g:
                grades.append(g)
            lowered = re.sub(rf"\b{word}[- ]grade\w*", " ", lowered)
    return grades, lowered


def parse_natural_language_request(text: str, model: ModelSpec) -> BatchSpec:
    """Rule-based free-text request parsing.

    Count comes from numerals or number words, disorders from the keyword
    table, grades from ordinal and grade-word patterns. Missing fields fall
    back to defaults with a recorded warning; finding neither a count nor a
    disorder is an error.
    """
    if not text.strip():
        raise UnparseableRequest("empty request text")
    lowered = " ".join(text.lower().split())
    grades, remaining = _extract_grades(lowered)

    count = None
    m = re.search(r"\b(\d{1,3})\b", remaining)
    if m and 1 <= int(m.group(1)) <= MAX_BATCH:
        count = int(m.group(1))
    if count is None:
        for phrase in ("one hundred", "a hundred"):
            if phrase in remaining:
                count = 100
                break
    if count is None:
        for word, n in _NUMBER_WORDS.items():
            if re.search(rf"\b{word}\b", remaining):
                count = n
                break

    disorders: list[DisorderType] = []
    consumed = remaining
    for phrase, disorder in _DISORDER_PHRASES:
        if phrase in consumed and disorder not in disorders:
            disorders.append(disorder)
            consumed = consumed.replace(phrase, " ")

    if count is None and not disorders:
        raise UnparseableRequest(f"could not extract a count or disorder from {text!r}")

    warnings = []
    if count is None:
        count = 1
        warnings.append("no count found; defaulting to 1")
    if not disorders:
        warnings.append("no disorder found; defaulting to uniform over all types")
    if not grades:
        warnings.append("no grade found; defaulting to uniform over all grades")

    return BatchSpec(
        count=count,
        model=model,
        disorder_weights={d: 1.0 for d in disorders} if disorders else None,
        grade_weights={g: 1.0 for g in grades} if grades else None,
        input_method="natural_language",
        warnings=warnings,
    )


# --- roster loading --------------------------------------------------------------

ROSTER_REQUIRED_COLUMNS = ("grade", "disorder1")


@dataclass
class RosterRowError:
    row: int
    message: str


def load_roster(
    path: str | Path, model: ModelSpec
) -> tuple[list[GenerationRequest], list[RosterRowError]]:
    """Parse a CSV roster into generation requests.

    Row-level problems are collected so valid rows still proceed; a missing
    required column or an empty roster is fatal.
    """
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise RosterError("roster has no header row", code="empty_roster")
        columns = [c.strip().lower() for c in reader.fieldnames]
        missing = [c for c in ROSTER_REQUIRED_COLUMNS if c not in columns]
        if missing:
            raise RosterError(
                f"roster missing required column(s): {missing}",
                code="missing_required_column",
            )
        rows = [
            {(k or "").strip().lower(): (v or "").strip() for k, v in row.items()}
            for row in reader
        ]
    if not rows:
        raise RosterError("roster has no data rows", code="empty_roster")

    requests = []
    errors = []
    for i, row in enumerate(rows, start=2):  # header is line 1
        try:
            disorders = [DisorderType.from_name(row["disorder1"])]
            if row.get("disorder2"):
                disorders.append(DisorderType.from_name(row["disorder2"]))
            grade = GradeLevel.from_name(row["grade"])
        except ValueError as exc:
            errors.append(RosterRowError(row=i, message=str(exc)))
            continue
        parts = []
        if row.get("background"):
            parts.append(f"{row['background']} background")
        if row.get("severity"):
            parts.append(f"{row['severity'].lower()} severity")
        if row.get("gender"):
            parts.append(f"{row['gender'].lower()} student")
        requests.append(
            GenerationRequest(
                disorders=disorders,
                grade=grade,
                model=model,
                population_spec=", ".join(parts),
            )
        )
    return requests, errors


# --- group sessions ---------------------------------------------------------------

_COMPAT_PAIRS: frozenset | None = None


def _compat_pairs() -> frozenset:
    global _COMPAT_PAIRS
    if _COMPAT_PAIRS is None:
        data = json.loads(
            (resources.files("slpcase") / "assets" / "compatibility.json").read_text()
        )
        _COMPAT_PAIRS = frozenset(
            frozenset((DisorderType[a], DisorderType[b])) for a, b in data["extra_pairs"]
        )
    return _COMPAT_PAIRS


def disorders_compatible(a: DisorderType, b: DisorderType) -> bool:
    """Same category always; cross-category pairs come from the asset matrix."""
    if a.category == b.category:
        return True
    return frozenset((a, b)) in _compat_pairs()


@dataclass
class GroupRequest:
    target_grade: GradeLevel
    desired_size: int
    disorder_preferences: list[DisorderType] = field(default_factory=list)
    target_severity: str = "Moderate"

    def __post_init__(self):
        if not GROUP_SIZE_RANGE[0] <= self.desired_size <= GROUP_SIZE_RANGE[1]:
            raise InvalidParameters(
                f"group size must be in {GROUP_SIZE_RANGE}, got {self.desired_size}"
            )


@dataclass
class GroupPlan:
    member_ids: list[str]
    shared_activity: str
    differentiated_targets: dict[str, str]
    note: str

    def to_dict(self) -> dict:
        return dict(vars(self))


def case_severity(case: CaseFile) -> str:
    """Representative severity: the first assessment's label."""
    for a in case.assessment_results:
        if isinstance(a.severity, str):
            return a.severity
    return ""


def match_group_candidates(records: list, req: GroupRequest) -> tuple[list, int]:
    """Filter and rank stored case records for a group session.

    Eligibility: grade distance at most two steps and disorder compatibility
    with every stated preference. Ranking: grade distance ascending, severity
    match (against target_severity) descending, then case_id. Returns the
    candidates plus the shortfall against the desired size.
    """
    candidates = []
    for record in records:
        try:
            grade = GradeLevel.from_name(record.case.grade)
        except (ValueError, TypeError):
            continue
        distance = abs(grade.index - req.target_grade.index)
        if distance > MAX_GRADE_DISTANCE:
            continue
        if req.disorder_preferences and record.disorders:
            if not all(
                any(disorders_compatible(pref, d) for d in record.disorders)
                for pref in req.disorder_preferences
            ):
                continue
        severity_match = case_severity(record.case) == req.target_severity
        candidates.append((distance, not severity_match, record.case_id, record))
    candidates.sort(key=lambda t: t[:3])
    ranked = [record for _, _, _, record in candidates]
    shortfall = max(0, req.desired_size - len(ranked))
    return ranked, shortfall


def _parse_plan_object(text: str) -> dict:
    from .gateway import _find_balanced_object

    try:
        payload = json.loads(text)
    except json.JSONDecodeError:
        candidate = _find_balanced_object(text)
        if candidate is None:
            raise PlanIncomplete("group plan output contained no JSON object")
        payload = json.loads(candidate)
    if not isinstance(payload, dict):
        raise PlanIncomplete("group plan output is not a JSON object")
    return payload


def synthesize_group_session(
    members: list[CaseFile],
    model: ModelSpec,
    gateway: Gateway,
    member_ids: list[str] | None = None,
) -> GroupPlan:
    """Request a collaborative session plan covering every member's goals."""
    if not GROUP_SIZE_RANGE[0] <= len(members) <= GROUP_SIZE_RANGE[1]:
        raise InvalidParameters(
            f"group plans require {GROUP_SIZE_RANGE[0]}-{GROUP_SIZE_RANGE[1]} members"
        )
    lines = [GROUP_PLAN_MARKER, ""]
    for member in members:
        lines.append(f"MEMBER: {member.name}")
        lines.append(f"Grade: {member.grade}")
        for goal in member.annual_goals:
            lines.append(f"  Goal {goal.goal_number}: {goal.goal_brief}")
        lines.append("")
    lines.append(
        "Design one shared activity integrating every member's goals. Return a JSON "
        'object with keys "shared_activity", "differentiated_targets" (one entry per '
        'member name), and "note".'
    )
    raw = gateway.complete(model, "\n".join(lines))
    payload = _parse_plan_object(raw.text)

    targets = payload.get("differentiated_targets")
    if not isinstance(targets, dict):
        raise PlanIncomplete("plan missing differentiated_targets")
    missing = [m.name for m in members if m.name not in targets]
    if missing:
        raise PlanIncomplete(f"plan missing targets for member(s): {missing}")
    return GroupPlan(
        member_ids=list(member_ids or []),
        shared_activity=str(payload.get("shared_activity", "")),
        differentiated_targets={str(k): str(v) for k, v in targets.items()},
        note=str(payload.get("note", "")),
    )
