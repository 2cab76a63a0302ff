"""Transcript de-identification, disfluency detection, language metrics, and
articulation-error candidates, plus optional LLM clinical analysis.

The analysis functions are pure; audio transcription is an external adapter
and this module consumes transcripts directly (JSON-lines, one utterance per
line: {start_s, end_s, text}).
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path

from .errors import AnalysisUnparseable, InvalidParameters
from .fixture import CLINICAL_ANALYSIS_MARKER
from .gateway import Gateway, ModelSpec

BLOCK_PAUSE_THRESHOLD_S = 1.0


@dataclass(frozen=True)
class Utterance:
    start_s: float
    end_s: float
    text: str


@dataclass
class Transcript:
    utterances: list[Utterance]
    source: str = "manual"

    def __post_init__(self):
        last = None
        for u in self.utterances:
            if not u.text:
                raise InvalidParameters("utterance text must be non-empty")
            if last is not None and u.start_s < last:
                raise InvalidParameters("utterance timestamps must be non-decreasing")
            last = u.start_s

    @classmethod
    def from_jsonl(cls, path: str | Path, source: str = "manual") -> "Transcript":
        utterances = []
        for line in Path(path).read_text().splitlines():
            line = line.strip()
            if not line:
                continue
            rec = json.loads(line)
            utterances.append(
                Utterance(
                    start_s=float(rec.get("start_s", 0.0)),
                    end_s=float(rec.get("end_s", 0.0)),
                    text=str(rec["text"]),
                )
            )
        return cls(utterances=utterances, source=source)


@dataclass
class PatternReport:
    sound_repetitions: int = 0
    syllable_repetitions: int = 0
    prolongations: int = 0
    blocks: int = 0
    substitution_candidates: list = field(default_factory=list)
    omission_candidates: list = field(default_factory=list)
    distortion_candidates: list = field(default_factory=list)
    mlu_approx: float = 0.0
    avg_word_length: float = 0.0
    avg_sentence_length: float = 0.0
    morphological_flags: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return dict(vars(self))


# --- de-identification --------------------------------------------------------

_GIVEN_NAMES_PATH = "deid_given_names.txt"


def _load_name_lexicon() -> frozenset[str]:
    from importlib import resources

    text = (resources.files("slpcase") / "assets" / _GIVEN_NAMES_PATH).read_text()
    return frozenset(line.strip().lower() for line in text.splitlines() if line.strip())


_NAME_LEXICON: frozenset[str] | None = None

_PII_PATTERNS: list[tuple[str, re.Pattern]] = [
    ("EMAIL", re.compile(r"[A-Za-z0-9._%+-]+@[A-Za-z0-9.-]+\.[A-Za-z]{2,}")),
    ("PHONE", re.compile(
        r"(?:\+?1[-. ])?(?:\(\d{3}\)\s?|\d{3}[-. ])\d{3}[-. ]\d{4}\b"
    )),
    ("ADDRESS", re.compile(
        r"\b\d{1,5}\s+(?:[A-Z][a-z]+\s+){1,3}"
        r"(?:Street|St|Avenue|Ave|Road|Rd|Lane|Ln|Drive|Dr|Boulevard|Blvd|Court|Ct|Way|Place|Pl)\b\.?"
    )),
    ("DATE", re.compile(
        r"\b(?:January|February|March|April|May|June|July|August|September|October|"
        r"November|December)\s+\d{1,2},?\s+\d{4}\b"
        r"|\b\d{1,2}/\d{1,2}/\d{2,4}\b"
        r"|\b\d{4}-\d{2}-\d{2}\b"
    )),
]

_CAP_WORD_RE = re.compile(r"\b[A-Z][a-z]+\b")
_SURNAME_TAIL_RE = re.compile(r"\s+[A-Z][a-z]+\b")


@dataclass(frozen=True)
class Replacement:
    span: tuple[int, int]
    category: str
    original: str


def deidentify(text: str) -> tuple[str, list[Replacement]]:
    """Replace phone numbers, emails, street addresses, dates, and lexicon
    names with bracketed placeholders. Idempotent; spans reference the input
    text and never overlap (earlier/longer matches win)."""
    global _NAME_LEXICON
    if _NAME_LEXICON is None:
        _NAME_LEXICON = _load_name_lexicon()

    matches: list[tuple[int, int, str, str]] = []
    for category, pattern in _PII_PATTERNS:
        for m in pattern.finditer(text):
            matches.append((m.start(), m.end(), category, m.group()))
    for m in _CAP_WORD_RE.finditer(text):
        if m.group().lower() not in _NAME_LEXICON:
            continue
        end = m.end()
        # extend over an adjacent capitalized surname
        tail = _SURNAME_TAIL_RE.match(text, end)
        if tail:
            end = tail.end()
        matches.append((m.start(), end, "NAME", text[m.start() : end]))

    # resolve overlaps: earlier start wins, then longer match
    matches.sort(key=lambda t: (t[0], -(t[1] - t[0])))
    selected: list[tuple[int, int, str, str]] = []
    cursor = 0
    for start, end, category, original in matches:
        if start >= cursor:
            selected.append((start, end, category, original))
            cursor = end

    out = []
    log = []
    cursor = 0
    for start, end, category, original in selected:
        out.append(text[cursor:start])
        out.append(f"[{category}]")
        log.append(Replacement(span=(start, end), category=category, original=original))
        cursor = end
    out.append(text[cursor:])
    return "".join(out), log


# --- disfluency detection -------------------------------------------------------

_SOUND_REP_RE = re.compile(r"\b(\w)(?:-\1)+-?\w*", re.IGNORECASE)
_SYLLABLE_REP_RE = re.compile(r"\b(\w{2,3})(?:-\1)+-?\w*", re.IGNORECASE)
_PROLONGATION_RE = re.compile(r"\b\w*?(\w)\1{2,}\w*\b")
_BLOCK_MARKER_RE = re.compile(r"\[block\]", re.IGNORECASE)
_PAUSE_RE = re.compile(r"\((\d+(?:\.\d+)?)\s*s?\)")


def detect_disfluencies(
    transcript: Transcript, pause_threshold_s: float = BLOCK_PAUSE_THRESHOLD_S
) -> PatternReport:
    """Token-rule counts of sound/syllable repetitions, prolongations, and blocks.

    Blocks are explicit "[block]" markers or annotated pauses at or above the
    threshold, e.g. "(1.5s)".
    """
    report = PatternReport()
    for utt in transcript.utterances:
        text = utt.text
        sound_spans = []
        for m in _SOUND_REP_RE.finditer(text):
            report.sound_repetitions += 1
            sound_spans.append(m.span())
        for m in _SYLLABLE_REP_RE.finditer(text):
            # single-letter onsets already counted as sound repetitions
            if m.span() not in sound_spans:
                report.syllable_repetitions += 1
        report.prolongations += sum(1 for _ in _PROLONGATION_RE.finditer(text))
        report.blocks += sum(1 for _ in _BLOCK_MARKER_RE.finditer(text))
        report.blocks += sum(
            1 for m in _PAUSE_RE.finditer(text) if float(m.group(1)) >= pause_threshold_s
        )
    return report


# --- language metrics -----------------------------------------------------------

_WORD_STRIP = ".,!?;:\"'()[]"


def _words(text: str) -> list[str]:
    words = []
    for token in text.split():
        token = token.strip(_WORD_STRIP)
        if token and any(ch.isalnum() for ch in token):
            words.append(token)
    return words


def compute_language_metrics(transcript: Transcript) -> PatternReport:
    """Word-based MLU approximation plus average word and sentence length."""
    if not transcript.utterances:
        raise InvalidParameters("transcript has no utterances")
    report = PatternReport()
    all_words: list[str] = []
    sentence_lengths: list[int] = []
    for utt in transcript.utterances:
        words = _words(utt.text)
        all_words.extend(words)
        for sentence in re.split(r"[.!?]+", utt.text):
            sentence_words = _words(sentence)
            if sentence_words:
                sentence_lengths.append(len(sentence_words))
    report.mlu_approx = len(all_words) / len(transcript.utterances)
    report.avg_word_length = (
        sum(len(w) for w in all_words) / len(all_words) if all_words else 0.0
    )
    report.avg_sentence_length = (
        sum(sentence_lengths) / len(sentence_lengths) if sentence_lengths else 0.0
    )
    return report


# --- articulation candidates ------------------------------------------------------


def _edit_ops(produced: str, target: str) -> list[tuple[str, str, str]]:
    """Minimal edit script as (op, produced_char, target_char) triples."""
    n, m = len(produced), len(target)
    dist = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(n + 1):
        dist[i][0] = i
    for j in range(m + 1):
        dist[0][j] = j
    for i in range(1, n + 1):
        for j in range(1, m + 1):
            cost = 0 if produced[i - 1] == target[j - 1] else 1
            dist[i][j] = min(
                dist[i - 1][j] + 1, dist[i][j - 1] + 1, dist[i - 1][j - 1] + cost
            )
    ops = []
    i, j = n, m
    while i > 0 or j > 0:
        if i > 0 and j > 0 and dist[i][j] == dist[i - 1][j - 1] + (
            0 if produced[i - 1] == target[j - 1] else 1
        ):
            if produced[i - 1] != target[j - 1]:
                ops.append(("substitute", produced[i - 1], target[j - 1]))
            i, j = i - 1, j - 1
        elif j > 0 and dist[i][j] == dist[i][j - 1] + 1:
            ops.append(("omit", "", target[j - 1]))
            j -= 1
        else:
            ops.append(("insert", produced[i - 1], ""))
            i -= 1
    ops.reverse()
    return ops


def detect_articulation_candidates(
    transcript: Transcript, target_lexicon: dict[str, str], max_distance: int = 2
) -> PatternReport:
    """Align produced tokens to lexicon targets by edit distance.

    Single-character replacements become substitution candidates, deletions
    become omission candidates; a trailing '*' marker flags a distortion.
    """
    report = PatternReport()
    targets = {word.lower(): spelled.lower() for word, spelled in target_lexicon.items()}
    for utt in transcript.utterances:
        for token in _words(utt.text):
            lowered = token.lower()
            if lowered.endswith("*"):
                report.distortion_candidates.append(
                    {"produced": lowered.rstrip("*"), "marker": "*"}
                )
                continue
            if lowered in targets.values():
                continue
            best = None
            for target in targets.values():
                ops = [op for op in _edit_ops(lowered, target) if op[0] != "match"]
                if len(ops) == 0 or len(ops) > max_distance:
                    continue
                if best is None or len(ops) < len(best[1]):
                    best = (target, ops)
            if best is None:
                continue
            target, ops = best
            for op, produced_ch, target_ch in ops:
                if op == "substitute":
                    report.substitution_candidates.append(
                        {"produced": lowered, "target": target,
                         "substituted": produced_ch, "expected": target_ch}
                    )
                elif op == "omit":
                    report.omission_candidates.append(
                        {"produced": lowered, "target": target, "omitted": target_ch}
                    )
    return report


# --- LLM clinical analysis ----------------------------------------------------------


@dataclass
class ClinicalAnalysis:
    diagnostic_hypotheses: str
    severity: str
    estimated_age_range: str
    recommended_goals: str
    observations: str
    recommendations: str


_ANALYSIS_SECTIONS = {
    "diagnostic_hypotheses": "Diagnostic Hypotheses",
    "severity": "Severity",
    "estimated_age_range": "Estimated Age Range",
    "recommended_goals": "Recommended Goals",
    "observations": "Observations",
    "recommendations": "Recommendations",
}


def analyze_clinical(
    report: PatternReport, spec: ModelSpec, gateway: Gateway
) -> ClinicalAnalysis:
    """Send the pattern report to an LLM and parse the sectioned response."""
    prompt = (
        f"{CLINICAL_ANALYSIS_MARKER}\n"
        "You are assisting a school SLP with transcript interpretation.\n"
        "Detected pattern summary:\n"
        f"{json.dumps(report.to_dict(), indent=2, default=str)}\n\n"
        "Respond with these exact section headings, one per line, each followed "
        "by a colon and your analysis: Diagnostic Hypotheses, Severity, "
        "Estimated Age Range, Recommended Goals, Observations, Recommendations.\n"
    )
    raw = gateway.complete(spec, prompt)
    values = {}
    for key, heading in _ANALYSIS_SECTIONS.items():
        m = re.search(rf"^{re.escape(heading)}\s*:\s*(.*)$", raw.text, re.MULTILINE)
        if not m:
            raise AnalysisUnparseable(f"analysis output missing section {heading!r}")
        values[key] = m.group(1).strip()
    return ClinicalAnalysis(**values)
