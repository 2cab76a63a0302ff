"""Rule-based grammar checks over case free-text fields.

Five rule kinds: double_space, uncapitalized_sentence, unmatched_bracket,
repeated_word, missing_terminal_punctuation. Dictionary spell-checking is
deliberately omitted; clinical vocabulary makes word lists noisy.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .casefile import CaseFile

GRAMMAR_RULE_KINDS = (
    "double_space",
    "uncapitalized_sentence",
    "unmatched_bracket",
    "repeated_word",
    "missing_terminal_punctuation",
)


@dataclass
class GrammarIssue:
    field_path: str
    kind: str
    span: tuple[int, int]
    excerpt: str


_DOUBLE_SPACE_RE = re.compile(r"  +")
# sentence end followed by a lowercase letter; abbreviations with a trailing
# comma or digit ("e.g.,", "vs. 3") do not match
_UNCAP_RE = re.compile(r"[.!?]\s+([a-z]\w*)")
_ABBREVIATIONS = {"e.g", "i.e", "etc", "vs", "dr", "mr", "mrs", "ms", "st"}
_REPEATED_RE = re.compile(r"\b(\w+)\s+\1\b", re.IGNORECASE)

_BRACKET_PAIRS = {"(": ")", "[": "]", "{": "}"}


def _check_text(field_path: str, text: str, terminal_required: bool) -> list[GrammarIssue]:
    issues = []
    for m in _DOUBLE_SPACE_RE.finditer(text):
        issues.append(GrammarIssue(field_path, "double_space", m.span(), m.group()))

    for m in _UNCAP_RE.finditer(text):
        head = text[: m.start() + 1]
        last_word = re.findall(r"[\w.]+", head[:-1])
        if last_word and last_word[-1].lower().rstrip(".") in _ABBREVIATIONS:
            continue
        issues.append(GrammarIssue(field_path, "uncapitalized_sentence", m.span(1), m.group(1)))

    stack: list[tuple[str, int]] = []
    for i, ch in enumerate(text):
        if ch in _BRACKET_PAIRS:
            stack.append((ch, i))
        elif ch in _BRACKET_PAIRS.values():
            if stack and _BRACKET_PAIRS[stack[-1][0]] == ch:
                stack.pop()
            else:
                issues.append(GrammarIssue(field_path, "unmatched_bracket", (i, i + 1), ch))
    for ch, i in stack:
        issues.append(GrammarIssue(field_path, "unmatched_bracket", (i, i + 1), ch))

    for m in _REPEATED_RE.finditer(text):
        # "10 10 trials" style numeric repeats are data, not typos
        if not m.group(1).isdigit():
            issues.append(GrammarIssue(field_path, "repeated_word", m.span(), m.group()))

    stripped = text.rstrip()
    if terminal_required and stripped and stripped[-1] not in ".!?":
        issues.append(
            GrammarIssue(
                field_path,
                "missing_terminal_punctuation",
                (len(stripped) - 1, len(stripped)),
                stripped[-20:],
            )
        )
    return issues


def grammar_check(case: CaseFile) -> list[GrammarIssue]:
    """Apply all five rule kinds to every free-text field of a case."""
    issues = []
    if isinstance(case.background, str):
        issues.extend(_check_text("background", case.background, terminal_required=True))
    for i, goal in enumerate(case.annual_goals):
        if isinstance(goal.goal_annual, str):
            issues.extend(
                _check_text(f"annual_goals[{i}].goal_annual", goal.goal_annual, True)
            )
        if isinstance(goal.goal_brief, str):
            issues.extend(
                _check_text(f"annual_goals[{i}].goal_brief", goal.goal_brief, False)
            )
    for i, note in enumerate(case.session_notes):
        if isinstance(note.note, str):
            issues.extend(_check_text(f"session_notes[{i}].note", note.note, True))
    return issues
