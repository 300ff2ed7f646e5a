"""Question taxonomy: the six reading-skill categories, two of which can be
generated, plus the label/answer format constants shared by the prompt
builder and the completion parser."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import UnsupportedKind

# Single source of truth for the answer-line marker. The prompt instructs the
# provider to emit it and the parser recognizes it; tests assert both sides
# use this constant.
ANSWER_MARKER = "Answer:"

MIN_QUESTIONS_PER_PAGE = 1
MAX_QUESTIONS_PER_PAGE = 10


@dataclass(frozen=True)
class QuestionKind:
    name: str
    label_prefix: str | None
    generation_supported: bool
    description: str

    def __str__(self) -> str:
        return self.name


COMPREHENSION = QuestionKind(
    "Comprehension", "C", True,
    "Fact-level checks whose answers sit inside the page text.",
)
ANALYSIS = QuestionKind(
    "Analysis", "A", True,
    "Open questions asking the reader to weigh, compare, and conclude beyond the page.",
)
GENRE = QuestionKind(
    "Genre", None, False,
    "What kind of text this is and what its conventions allow.",
)
RELATIONSHIP_TO_TEXT = QuestionKind(
    "RelationshipToText", None, False,
    "What the reader brings to the text and how it lands on them.",
)
INTERPRETATION = QuestionKind(
    "Interpretation", None, False,
    "Alternative readings of a passage from textual and contextual cues.",
)
READERS_VOICE = QuestionKind(
    "ReadersVoice", None, False,
    "How the reader joins the conversation around the text.",
)

ALL_KINDS = (
    COMPREHENSION,
    ANALYSIS,
    GENRE,
    RELATIONSHIP_TO_TEXT,
    INTERPRETATION,
    READERS_VOICE,
)
GENERATION_KINDS = tuple(k for k in ALL_KINDS if k.generation_supported)

_BY_NAME = {k.name.lower(): k for k in ALL_KINDS}


def kind_from_name(name: str) -> QuestionKind:
    """Look a kind up by case-insensitive name; UnsupportedKind if unknown."""
    kind = _BY_NAME.get(str(name).strip().lower())
    if kind is None:
        known = ", ".join(k.name.lower() for k in ALL_KINDS)
        raise UnsupportedKind(f"unknown question kind {name!r} (known: {known})")
    return kind
