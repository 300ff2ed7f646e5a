"""Parse raw completion text into labeled question/answer pairs, and
serialize question sets to the ``.quiz.json`` sidecar format.

The grammar is line-oriented. A question starts at a line carrying the
kind's label ("C3." / "c3:" / "C3)"); lenient mode also accepts bulleted
("- ", "• ") and bare-numbered ("3. ") lines, relabeling them, plus
label-free lines ending in "?" when a fresh question can plausibly start.
An answer starts at an "Answer:" line and runs until the next question.
Labels are renormalized to prefix+1..k; every deviation is reported as a
ParseIssue instead of inventing or dropping text silently.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field

from .errors import (
    DuplicatePageSet,
    InvalidSidecar,
    MalformedResponse,
    NoQuestionsFound,
    PageOutOfRange,
)
from .ingest import SourceDocument, normalize_text
from .taxonomy import ANSWER_MARKER, QuestionKind, kind_from_name

FORMAT_VERSION = 1
SIDECAR_EXTENSION = ".quiz.json"

# Reproducible-output sentinel; pass a real RFC3339 string to serialize_sidecar
# when provenance matters more than byte-stable reruns.
EPOCH_TIMESTAMP = "1970-01-01T00:00:00Z"

ISSUE_CODES = ("MissingAnswer", "UnlabeledQuestion", "CountMismatch", "RenumberedLabel")

# Parsed pair count is capped at expected_n plus this slack (runaway guard).
EXTRA_PAIR_SLACK = 5

_ANSWER_RE = re.compile(rf"^\s*{ANSWER_MARKER[:-1]}\s*:\s*(.*)$", re.IGNORECASE)
_BULLET_RE = re.compile(r"^\s*[-•]\s+(\S.*)$")
_BARE_NUM_RE = re.compile(r"^\s*(\d+)\s*[.)]\s*(.*)$")
_LABEL_VALID_RE = re.compile(r"^[A-Z]\d+$")


def _label_re(prefix: str) -> re.Pattern[str]:
    return re.compile(rf"^\s*{re.escape(prefix)}(\d+)(?:\s*[.:)]\s*|\s+)(.*)$", re.IGNORECASE)


@dataclass(frozen=True)
class QAPair:
    label: str
    question_text: str
    answer_text: str


@dataclass(frozen=True)
class ParseIssue:
    code: str
    detail: str
    position: int
    label: str | None = None


@dataclass
class PageQuestionSet:
    page_index: int
    kind: QuestionKind
    pairs: list[QAPair] = field(default_factory=list)
    issues: list[ParseIssue] = field(default_factory=list)


@dataclass(frozen=True)
class SidecarDocument:
    """Document descriptor as stored in a sidecar."""

    content_hash: str
    filename: str
    page_count: int


class _Element:
    __slots__ = ("origin", "orig_num", "position", "question_lines", "answer_lines", "answer_open")

    def __init__(self, origin: str, orig_num: int | None, position: int, first_line: str):
        self.origin = origin
        self.orig_num = orig_num
        self.position = position
        self.question_lines = [first_line] if first_line else []
        self.answer_lines: list[str] = []
        self.answer_open = False


def parse_qa(
    raw: str,
    kind: QuestionKind,
    expected_n: int,
    strict: bool = False,
    page_index: int = 0,
) -> PageQuestionSet:
    """Parse a raw completion into a PageQuestionSet.

    Lenient mode (default) returns recovered pairs plus issues; strict mode
    raises MalformedResponse when any issue would be reported. Raises
    NoQuestionsFound when no question line is recognizable at all.
    """
    label_re = _label_re(kind.label_prefix or "C")
    elements: list[_Element] = []
    offset = 0
    for line in raw.splitlines(keepends=True):
        stripped = line.rstrip("\r\n")
        position = offset
        offset += len(line)
        current = elements[-1] if elements else None

        m = label_re.match(stripped)
        if m:
            elements.append(_Element("label", int(m.group(1)), position, m.group(2).strip()))
            continue
        m = _ANSWER_RE.match(stripped)
        if m:
            if current is not None:
                if current.answer_open:
                    current.answer_lines.append(stripped.strip())
                else:
                    current.answer_open = True
                    current.answer_lines.append(m.group(1).strip())
            continue  # orphan answer line: noise
        m = _BULLET_RE.match(stripped)
        if m:
            elements.append(_Element("bullet", None, position, m.group(1).strip()))
            continue
        m = _BARE_NUM_RE.match(stripped)
        if m:
            elements.append(_Element("bare", int(m.group(1)), position, m.group(2).strip()))
            continue
        text = stripped.strip()
        if not text:
            continue
        if text.endswith("?") and _starts_new_question(current):
            elements.append(_Element("promoted", None, position, text))
            continue
        if current is None:
            continue  # preamble noise
        if current.answer_open:
            current.answer_lines.append(text)
        else:
            current.question_lines.append(text)

    elements = [e for e in elements if normalize_text(" ".join(e.question_lines))]
    if not elements:
        raise NoQuestionsFound(f"no {kind.name.lower()} question lines recognized")

    truncated = len(elements) > expected_n + EXTRA_PAIR_SLACK
    kept = elements[: expected_n + EXTRA_PAIR_SLACK]

    pairs: list[QAPair] = []
    issues: list[ParseIssue] = []
    prefix = kind.label_prefix or "C"
    for i, element in enumerate(kept, start=1):
        label = f"{prefix}{i}"
        question = normalize_text(" ".join(element.question_lines))
        answer = normalize_text(" ".join(element.answer_lines))
        pairs.append(QAPair(label=label, question_text=question, answer_text=answer))
        if element.origin == "promoted":
            issues.append(ParseIssue(
                "UnlabeledQuestion", f"unlabeled line accepted as {label}",
                element.position, label,
            ))
        elif element.origin in ("bullet", "bare") or element.orig_num != i:
            was = "bullet" if element.origin == "bullet" else f"number {element.orig_num}"
            issues.append(ParseIssue(
                "RenumberedLabel", f"{was} relabeled to {label}",
                element.position, label,
            ))
        if not answer:
            issues.append(ParseIssue(
                "MissingAnswer", f"no answer found for {label}",
                element.position, label,
            ))
    if len(pairs) != expected_n:
        detail = f"expected {expected_n} questions, parsed {len(pairs)}"
        if truncated:
            detail += f" (truncated from {len(elements)})"
        issues.append(ParseIssue("CountMismatch", detail, 0))

    if strict and issues:
        summary = "; ".join(f"{i.code}: {i.detail}" for i in issues[:4])
        raise MalformedResponse(f"{len(issues)} parse issue(s): {summary}", issues)
    return PageQuestionSet(page_index=page_index, kind=kind, pairs=pairs, issues=issues)


def _starts_new_question(current: _Element | None) -> bool:
    # A bare "...?" line opens a question when nothing is open yet, or when
    # the open question already reads complete (ends in "?") and has no
    # answer attached; otherwise treat it as a continuation.
    if current is None:
        return True
    if current.answer_open:
        return False
    joined = " ".join(current.question_lines).rstrip()
    return joined.endswith("?")


def render_canonical(pairs: list[QAPair]) -> str:
    """Render pairs in the canonical grammar the prompt requests."""
    chunks = []
    for pair in pairs:
        chunks.append(f"{pair.label}. {pair.question_text}")
        chunks.append(f"{ANSWER_MARKER} {pair.answer_text}")
    return "\n".join(chunks) + "\n"


# --- sidecar format ----------------------------------------------------------


def page_entry(qset: PageQuestionSet) -> dict:
    """Sidecar-shaped JSON entry for one question set."""
    return {
        "page_index": qset.page_index,
        "kind": qset.kind.name.lower(),
        "questions": [
            {
                "label": pair.label,
                "question": pair.question_text,
                "answer": pair.answer_text,
                "issues": sorted({
                    issue.code for issue in qset.issues if issue.label == pair.label
                }),
            }
            for pair in qset.pairs
        ],
    }


def serialize_sidecar(
    document: SourceDocument | SidecarDocument,
    sets: list[PageQuestionSet],
    generated_at: str | None = None,
) -> str:
    """Serialize question sets to canonical sidecar JSON (stable bytes).

    ``generated_at`` defaults to a fixed epoch sentinel so identical inputs
    always produce identical bytes.
    """
    seen: set[tuple[int, str]] = set()
    for qset in sets:
        if not 0 <= qset.page_index < document.page_count:
            raise PageOutOfRange(
                f"set page {qset.page_index} outside [0, {document.page_count})"
            )
        if not qset.kind.generation_supported:
            raise ValueError(f"kind {qset.kind.name} cannot be persisted")
        key = (qset.page_index, qset.kind.name)
        if key in seen:
            raise DuplicatePageSet(f"duplicate set for page {key[0]} kind {key[1]}")
        seen.add(key)
    ordered = sorted(sets, key=lambda s: (s.page_index, s.kind.name))
    payload = {
        "format_version": FORMAT_VERSION,
        "document": {
            "content_hash": document.content_hash,
            "filename": document.filename,
            "page_count": document.page_count,
        },
        "generated_at": generated_at or EPOCH_TIMESTAMP,
        "pages": [page_entry(qset) for qset in ordered],
    }
    return json.dumps(payload, ensure_ascii=False, indent=2, sort_keys=True) + "\n"


def parse_sidecar(text: str) -> tuple[SidecarDocument, list[PageQuestionSet]]:
    """Inverse of serialize_sidecar on its output. Raises InvalidSidecar."""
    try:
        data = json.loads(text)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise InvalidSidecar(f"not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise InvalidSidecar("top level must be an object")
    if data.get("format_version") != FORMAT_VERSION:
        raise InvalidSidecar(
            f"unsupported format_version {data.get('format_version')!r}"
        )
    doc = data.get("document")
    if not isinstance(doc, dict):
        raise InvalidSidecar("missing document object")
    content_hash = doc.get("content_hash")
    filename = doc.get("filename")
    page_count = doc.get("page_count")
    if not isinstance(content_hash, str) or not isinstance(filename, str):
        raise InvalidSidecar("document.content_hash and document.filename must be strings")
    if not isinstance(page_count, int) or page_count < 1:
        raise InvalidSidecar("document.page_count must be a positive integer")
    if not isinstance(data.get("generated_at"), str):
        raise InvalidSidecar("generated_at must be a string")
    pages = data.get("pages")
    if not isinstance(pages, list):
        raise InvalidSidecar("pages must be a list")

    descriptor = SidecarDocument(content_hash, filename, page_count)
    sets: list[PageQuestionSet] = []
    seen: set[tuple[int, str]] = set()
    for entry in pages:
        if not isinstance(entry, dict):
            raise InvalidSidecar("each pages entry must be an object")
        page_index = entry.get("page_index")
        if not isinstance(page_index, int) or not 0 <= page_index < page_count:
            raise InvalidSidecar(f"bad page_index {page_index!r}")
        try:
            kind = kind_from_name(entry.get("kind", ""))
        except Exception as exc:
            raise InvalidSidecar(f"bad kind {entry.get('kind')!r}") from exc
        if not kind.generation_supported:
            raise InvalidSidecar(f"kind {entry.get('kind')!r} not allowed in sidecars")
        key = (page_index, kind.name)
        if key in seen:
            raise InvalidSidecar(f"duplicate set for page {page_index} kind {kind.name}")
        seen.add(key)
        questions = entry.get("questions")
        if not isinstance(questions, list):
            raise InvalidSidecar("questions must be a list")
        pairs: list[QAPair] = []
        issues: list[ParseIssue] = []
        for q in questions:
            if not isinstance(q, dict):
                raise InvalidSidecar("each question must be an object")
            label = q.get("label")
            question = q.get("question")
            answer = q.get("answer")
            codes = q.get("issues", [])
            if not isinstance(label, str) or not _LABEL_VALID_RE.match(label):
                raise InvalidSidecar(f"bad label {label!r}")
            if not isinstance(question, str) or not question.strip():
                raise InvalidSidecar(f"empty question for {label}")
            if not isinstance(answer, str):
                raise InvalidSidecar(f"answer for {label} must be a string")
            if not isinstance(codes, list) or any(c not in ISSUE_CODES for c in codes):
                raise InvalidSidecar(f"bad issues list for {label}")
            pairs.append(QAPair(label=label, question_text=question, answer_text=answer))
            issues.extend(ParseIssue(code, "", 0, label) for code in sorted(set(codes)))
        sets.append(PageQuestionSet(page_index=page_index, kind=kind, pairs=pairs, issues=issues))
    return descriptor, sets
