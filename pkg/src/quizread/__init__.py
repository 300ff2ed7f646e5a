"""quizread: just-in-time learning questions for academic PDFs.

Pipeline: ingest a PDF into per-page text, prompt a chat-completion
provider per page, parse the labeled question/answer pairs out of the raw
completion, drop near-duplicate questions, and deliver page results
progressively over a CLI, an HTTP+SSE service, or the library API below.
"""

from .config import AppConfig, load_config
from .dedup import DedupConfig, DroppedQuestion, filter_repeats, similarity
from .ingest import (
    PageText,
    SourceDocument,
    extract_document,
    page_text,
    truncated_page,
)
from .orchestrator import (
    GenerationJob,
    JobStatus,
    PageResult,
    PageStatus,
    load_results,
    regenerate_page,
    run_job,
    save_results,
    start_job,
)
from .prompting import (
    GenerationRequest,
    ProviderConfig,
    RawCompletion,
    build_prompt,
    complete,
)
from .qa_parser import (
    PageQuestionSet,
    ParseIssue,
    QAPair,
    parse_qa,
    parse_sidecar,
    render_canonical,
    serialize_sidecar,
)
from .store import DocumentStore
from .taxonomy import (
    ALL_KINDS,
    ANALYSIS,
    ANSWER_MARKER,
    COMPREHENSION,
    GENERATION_KINDS,
    QuestionKind,
    kind_from_name,
)

__version__ = "0.1.0"

__all__ = [
    "ALL_KINDS",
    "ANALYSIS",
    "ANSWER_MARKER",
    "AppConfig",
    "COMPREHENSION",
    "DedupConfig",
    "DocumentStore",
    "DroppedQuestion",
    "GENERATION_KINDS",
    "GenerationJob",
    "GenerationRequest",
    "JobStatus",
    "PageQuestionSet",
    "PageResult",
    "PageStatus",
    "PageText",
    "ParseIssue",
    "ProviderConfig",
    "QAPair",
    "QuestionKind",
    "RawCompletion",
    "SourceDocument",
    "build_prompt",
    "complete",
    "extract_document",
    "filter_repeats",
    "kind_from_name",
    "load_config",
    "load_results",
    "page_text",
    "parse_qa",
    "parse_sidecar",
    "regenerate_page",
    "render_canonical",
    "run_job",
    "save_results",
    "serialize_sidecar",
    "similarity",
    "start_job",
    "truncated_page",
]
