"""Keyword lexicons linking disorder types to the vocabulary expected in
backgrounds, goals, and intervention activities. Used by the consistency
scorer and by free-text request parsing."""

from __future__ import annotations

from .taxonomy import DisorderType

DISORDER_KEYWORDS: dict[DisorderType, tuple[str, ...]] = {
    DisorderType.ARTICULATION: (
        "articulation", "speech sound", "sound", "phoneme", "intelligib",
        "pronunciation", "lisp", "speech error", "produce", "/r/", "/s/", "/l/",
    ),
    DisorderType.PHONOLOGICAL: (
        "phonological", "phonology", "phoneme", "sound pattern", "speech sound",
        "cluster", "fronting", "stopping", "final consonant",
    ),
    DisorderType.SPEECH_SOUND_GENERAL: (
        "speech sound", "articulation", "phonological", "phoneme",
        "intelligib", "sound",
    ),
    DisorderType.EXPRESSIVE_LANGUAGE: (
        "expressive language", "expressive", "sentence", "vocabulary", "grammar",
        "syntax", "morpholog", "word retrieval", "formulate", "utterance",
    ),
    DisorderType.RECEPTIVE_LANGUAGE: (
        "receptive language", "receptive", "comprehension", "understand",
        "follow direction", "vocabulary", "listening",
    ),
    DisorderType.LANGUAGE_GENERAL: (
        "language", "vocabulary", "sentence", "comprehension", "grammar",
        "syntax", "narrative",
    ),
    DisorderType.PRAGMATIC_LANGUAGE: (
        "pragmatic", "social communication", "conversation", "topic", "turn",
        "eye contact", "social", "peer", "nonverbal cue",
    ),
    DisorderType.SOCIAL_COMMUNICATION: (
        "social communication", "social", "pragmatic", "conversation", "peer",
        "interaction", "perspective",
    ),
    DisorderType.FLUENCY: (
        "fluency", "stutter", "disfluen", "repetition", "prolongation", "block",
        "easy onset", "smooth speech",
    ),
    DisorderType.CHILDHOOD_APRAXIA: (
        "apraxia", "motor speech", "motor planning", "sequencing", "prosody",
        "speech motor",
    ),
    DisorderType.VOICE: (
        "voice", "vocal", "hoarse", "breathy", "resonance", "pitch", "loudness",
        "vocal hygiene",
    ),
}


def text_mentions_disorder(text: str, disorder: DisorderType) -> bool:
    lowered = text.lower()
    return any(keyword in lowered for keyword in DISORDER_KEYWORDS[disorder])
