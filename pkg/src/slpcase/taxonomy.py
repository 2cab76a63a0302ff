"""Disorder taxonomy, grade ladder, and standardized assessment catalog.

The taxonomy covers 11 disorder types in 6 categories; each disorder maps to
one or more standardized instruments used by the validators and scorers.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum


class DisorderCategory(Enum):
    SPEECH_SOUND = "Speech Sound Disorders"
    LANGUAGE = "Language Disorders"
    SOCIAL_COMMUNICATION = "Social Communication"
    FLUENCY = "Fluency"
    MOTOR_SPEECH = "Motor Speech"
    VOICE = "Voice"


class DisorderType(Enum):
    ARTICULATION = ("Articulation Disorders", DisorderCategory.SPEECH_SOUND)
    PHONOLOGICAL = ("Phonological Disorders", DisorderCategory.SPEECH_SOUND)
    SPEECH_SOUND_GENERAL = (
        "Speech Sound Disorder (general/mixed)",
        DisorderCategory.SPEECH_SOUND,
    )
    EXPRESSIVE_LANGUAGE = ("Expressive Language Disorders", DisorderCategory.LANGUAGE)
    RECEPTIVE_LANGUAGE = ("Receptive Language Disorders", DisorderCategory.LANGUAGE)
    LANGUAGE_GENERAL = ("Language Disorders (general/mixed)", DisorderCategory.LANGUAGE)
    PRAGMATIC_LANGUAGE = (
        "Pragmatic Language Disorders",
        DisorderCategory.SOCIAL_COMMUNICATION,
    )
    SOCIAL_COMMUNICATION = (
        "Social Communication Disorders",
        DisorderCategory.SOCIAL_COMMUNICATION,
    )
    FLUENCY = ("Fluency Disorders", DisorderCategory.FLUENCY)
    CHILDHOOD_APRAXIA = ("Childhood Apraxia of Speech", DisorderCategory.MOTOR_SPEECH)
    VOICE = ("Voice Disorders", DisorderCategory.VOICE)

    def __init__(self, display_name: str, category: DisorderCategory):
        self.display_name = display_name
        self.category = category

    @classmethod
    def from_name(cls, text: str) -> "DisorderType":
        """Resolve a disorder from a display name, enum name, or close variant."""
        cleaned = re.sub(r"[^a-z ]", " ", text.lower())
        cleaned = re.sub(r"\s+", " ", cleaned).strip()
        for member in cls:
            if cleaned == member.name.lower().replace("_", " "):
                return member
            display = re.sub(r"[^a-z ]", " ", member.display_name.lower())
            display = re.sub(r"\s+", " ", display).strip()
            if cleaned in (display, display.removesuffix(" disorders")):
                return member
        # single-word shorthands used in rosters and free text
        shorthands = {
            "articulation": cls.ARTICULATION,
            "phonological": cls.PHONOLOGICAL,
            "phonology": cls.PHONOLOGICAL,
            "speech sound": cls.SPEECH_SOUND_GENERAL,
            "expressive": cls.EXPRESSIVE_LANGUAGE,
            "receptive": cls.RECEPTIVE_LANGUAGE,
            "language": cls.LANGUAGE_GENERAL,
            "pragmatic": cls.PRAGMATIC_LANGUAGE,
            "pragmatics": cls.PRAGMATIC_LANGUAGE,
            "social communication": cls.SOCIAL_COMMUNICATION,
            "fluency": cls.FLUENCY,
            "stuttering": cls.FLUENCY,
            "apraxia": cls.CHILDHOOD_APRAXIA,
            "voice": cls.VOICE,
        }
        if cleaned in shorthands:
            return shorthands[cleaned]
        raise ValueError(f"unknown disorder type: {text!r}")


class GradeLevel(Enum):
    PRE_K = ("Pre-K", 4, 5)
    K = ("Kindergarten", 5, 6)
    FIRST = ("1st Grade", 6, 7)
    SECOND = ("2nd Grade", 7, 8)
    THIRD = ("3rd Grade", 8, 9)
    FOURTH = ("4th Grade", 9, 10)
    FIFTH = ("5th Grade", 10, 11)
    SIXTH = ("6th Grade", 11, 12)
    SEVENTH = ("7th Grade", 12, 13)
    EIGHTH = ("8th Grade", 13, 14)
    NINTH = ("9th Grade", 14, 15)
    TENTH = ("10th Grade", 15, 16)
    ELEVENTH = ("11th Grade", 16, 17)
    TWELFTH = ("12th Grade", 17, 18)

    def __init__(self, display_name: str, min_years: int, max_years: int):
        self.display_name = display_name
        self.age_range = (min_years, max_years)

    @property
    def index(self) -> int:
        """Ordinal position on the ladder (Pre-K = 0), used for grade distance."""
        return list(GradeLevel).index(self)

    @classmethod
    def from_name(cls, text: str) -> "GradeLevel":
        cleaned = text.strip().lower().replace("grade", "").strip()
        aliases = {
            "pre-k": cls.PRE_K,
            "prek": cls.PRE_K,
            "pre-kindergarten": cls.PRE_K,
            "kindergarten": cls.K,
            "k": cls.K,
        }
        if cleaned in aliases:
            return aliases[cleaned]
        match = re.match(r"(\d{1,2})(st|nd|rd|th)?$", cleaned)
        if match:
            n = int(match.group(1))
            if 1 <= n <= 12:
                return list(cls)[n + 1]
        raise ValueError(f"unknown grade level: {text!r}")


@dataclass(frozen=True)
class Instrument:
    name: str
    long_name: str
    domain: str


ASSESSMENT_CATALOG: dict[DisorderType, tuple[Instrument, ...]] = {
    DisorderType.ARTICULATION: (
        Instrument(
            "GFTA-3",
            "Goldman-Fristoe Test of Articulation-3",
            "Consonant production in words",
        ),
    ),
    DisorderType.PHONOLOGICAL: (
        Instrument(
            "KLPA-3",
            "Khan-Lewis Phonological Analysis-3",
            "Phonological processes and error patterns",
        ),
    ),
    DisorderType.SPEECH_SOUND_GENERAL: (
        Instrument(
            "GFTA-3",
            "Goldman-Fristoe Test of Articulation-3",
            "Combined articulation and phonological assessment",
        ),
        Instrument(
            "KLPA-3",
            "Khan-Lewis Phonological Analysis-3",
            "Combined articulation and phonological assessment",
        ),
    ),
    DisorderType.EXPRESSIVE_LANGUAGE: (
        Instrument(
            "CELF-5",
            "CELF-5 Expressive Language Index",
            "Sentence formulation, word structure, expressive vocabulary",
        ),
        Instrument("EVT-3", "Expressive Vocabulary Test-3", "Expressive vocabulary"),
    ),
    DisorderType.RECEPTIVE_LANGUAGE: (
        Instrument(
            "CELF-5",
            "CELF-5 Receptive Language Index",
            "Sentence comprehension, semantic relationships",
        ),
        Instrument(
            "PPVT-5", "Peabody Picture Vocabulary Test-5", "Receptive vocabulary"
        ),
    ),
    DisorderType.LANGUAGE_GENERAL: (
        Instrument(
            "CELF-5",
            "CELF-5 Core Language Score",
            "Overall receptive and expressive language performance",
        ),
    ),
    DisorderType.PRAGMATIC_LANGUAGE: (
        Instrument(
            "CASL-2",
            "Comprehensive Assessment of Spoken Language-2 Pragmatic Language",
            "Pragmatic language skills and social language use",
        ),
    ),
    DisorderType.SOCIAL_COMMUNICATION: (
        Instrument(
            "CASL-2",
            "Comprehensive Assessment of Spoken Language-2 Pragmatic Language",
            "Social communication abilities and pragmatic competence",
        ),
    ),
    DisorderType.FLUENCY: (
        Instrument(
            "SSI-4",
            "Stuttering Severity Instrument-4",
            "Stuttering frequency, duration, and physical concomitants",
        ),
    ),
    DisorderType.CHILDHOOD_APRAXIA: (
        Instrument(
            "VMPAC",
            "Verbal Motor Production Assessment for Children",
            "Motor speech control and speech motor planning",
        ),
    ),
    DisorderType.VOICE: (
        Instrument(
            "CAPE-V",
            "Consensus Auditory-Perceptual Evaluation of Voice",
            "Voice quality characteristics",
        ),
        Instrument(
            "PVOS", "Pediatric Voice Outcome Survey", "Voice-related quality of life"
        ),
    ),
}


def _instrument_code(name: str) -> tuple[str, str]:
    """Reduce an instrument name to (letters, edition digits) of its code.

    Normalization tolerates case, whitespace, hyphens, parenthetical long
    names, and missing/extra edition suffixes ("GFTA" vs "GFTA-3").
    """
    paren = re.search(r"\(\s*([A-Za-z]{2,}(?:-\d+)?)\s*\)", name)
    head = re.sub(r"\(.*?\)", " ", name).strip()
    token = head.split()[0] if head.split() else ""
    if paren and not re.fullmatch(r"[A-Z]{2,}(?:-\d+)?", token):
        token = paren.group(1)
    letters = re.sub(r"[^a-z]", "", token.lower())
    digits = re.sub(r"[^0-9]", "", token)
    return letters, digits


_ALL_CODES = {
    _instrument_code(inst.name)[0]
    for insts in ASSESSMENT_CATALOG.values()
    for inst in insts
}


def is_known_instrument(assessment_name: str) -> bool:
    letters, _ = _instrument_code(assessment_name)
    return letters in _ALL_CODES


def check_assessment_match(disorder: DisorderType, assessment_name: str) -> bool:
    """True iff the instrument is cataloged for the disorder.

    Unknown instruments return False; callers that need to distinguish
    unknown from mismatched use :func:`is_known_instrument`.
    """
    if not assessment_name.strip():
        return False
    letters, digits = _instrument_code(assessment_name)
    for inst in ASSESSMENT_CATALOG[disorder]:
        cat_letters, cat_digits = _instrument_code(inst.name)
        if letters == cat_letters and (not digits or digits == cat_digits):
            return True
    return False


# The seven validation scenarios spanning the taxonomy: (disorders, grade).
TEST_SCENARIOS: tuple[tuple[tuple[DisorderType, ...], GradeLevel], ...] = (
    ((DisorderType.ARTICULATION,), GradeLevel.SECOND),
    ((DisorderType.LANGUAGE_GENERAL,), GradeLevel.FOURTH),
    ((DisorderType.PRAGMATIC_LANGUAGE,), GradeLevel.SIXTH),
    ((DisorderType.FLUENCY,), GradeLevel.NINTH),
    ((DisorderType.VOICE,), GradeLevel.PRE_K),
    ((DisorderType.PHONOLOGICAL, DisorderType.EXPRESSIVE_LANGUAGE), GradeLevel.K),
    ((DisorderType.PRAGMATIC_LANGUAGE, DisorderType.EXPRESSIVE_LANGUAGE), GradeLevel.FIRST),
)
