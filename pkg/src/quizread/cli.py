"""Command line: headless sidecar generation (`gen`) and the service (`serve`).

Progress goes to stderr, data paths to stdout, so `quizread gen` composes in
pipelines. Exit codes: 0 all pages succeeded, 2 partial success, 1 failure
or invalid arguments.
"""

from __future__ import annotations

import argparse
import os
import sys
import tempfile
from pathlib import Path

from .config import load_config
from .errors import QuizreadError
from .ingest import extract_document
from .orchestrator import JobStatus, start_job
from .prompting import GenerationRequest
from .qa_parser import serialize_sidecar
from .taxonomy import kind_from_name

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_PARTIAL = 2


def _parse_pages(spec: str) -> frozenset[int]:
    """Parse "a-b,c" page lists (0-based indices, ranges inclusive)."""
    pages: set[int] = set()
    for part in spec.split(","):
        part = part.strip()
        if not part:
            continue
        if "-" in part:
            lo, _, hi = part.partition("-")
            start, end = int(lo), int(hi)
            if end < start:
                raise ValueError(f"range {part!r} runs backwards")
            pages.update(range(start, end + 1))
        else:
            pages.add(int(part))
    if not pages:
        raise ValueError("no pages selected")
    return frozenset(pages)


def build_arg_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="quizread",
        description="Generate page-co-located learning questions for PDFs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate a .quiz.json sidecar for a PDF")
    gen.add_argument("input", help="path to the input PDF")
    gen.add_argument("--kind", default="comprehension",
                     choices=["comprehension", "analysis"],
                     help="question kind (default: comprehension)")
    gen.add_argument("--count", type=int, default=4, metavar="N",
                     help="questions per page, 1..10 (default: 4)")
    gen.add_argument("--pages", metavar="SPEC",
                     help="0-based page list, e.g. 0-2,4 (default: all pages)")
    gen.add_argument("--out", metavar="PATH",
                     help="output path (default: INPUT + .quiz.json)")
    gen.add_argument("--provider", choices=["mock", "http"], default=None,
                     help="provider backend (default: from config)")
    gen.add_argument("--provider-url", metavar="URL",
                     help="completion endpoint URL (scheme mock: selects the mock)")
    gen.add_argument("--model", metavar="ID", help="provider model id")
    gen.add_argument("--api-key-var", metavar="NAME",
                     help="env var holding the API key (default: OPENAI_API_KEY)")
    gen.add_argument("--strict-parse", action="store_true",
                     help="treat any parse issue as a page failure")
    gen.add_argument("--dedup-threshold", type=float, metavar="X",
                     help="similarity at or above which questions are dropped (default: 0.6)")
    gen.add_argument("--no-dedup", action="store_true", help="disable dedup")
    gen.add_argument("--quiet", action="store_true",
                     help="suppress progress output (errors still print)")
    gen.add_argument("--config", metavar="PATH", help="config file path")

    serve = sub.add_parser("serve", help="run the HTTP service")
    serve.add_argument("--addr", metavar="HOST:PORT",
                       help="listen address (default: 127.0.0.1:8077)")
    serve.add_argument("--storage-dir", metavar="DIR",
                       help="document store directory (default: quizread-data)")
    serve.add_argument("--provider-url", metavar="URL")
    serve.add_argument("--model", metavar="ID")
    serve.add_argument("--api-key-var", metavar="NAME")
    serve.add_argument("--dedup-threshold", type=float, metavar="X")
    serve.add_argument("--config", metavar="PATH", help="config file path")
    return parser


def _gen_overrides(args: argparse.Namespace) -> dict:
    overrides = {
        "model": args.model,
        "api_key_var": args.api_key_var,
        "dedup_threshold": args.dedup_threshold,
    }
    if args.provider_url:
        overrides["provider_url"] = args.provider_url
    elif args.provider == "mock":
        overrides["provider_url"] = "mock:"
    if args.no_dedup:
        overrides["dedup_enabled"] = False
    if args.strict_parse:
        overrides["strict_parse"] = True
    return overrides


def cmd_gen(args: argparse.Namespace) -> int:
    config = load_config(args.config, _gen_overrides(args))
    if args.provider == "http" and config.provider_url.startswith("mock"):
        print("error: InvalidRequest: --provider http needs --provider-url "
              "or QUIZREAD_PROVIDER_URL", file=sys.stderr)
        return EXIT_FAILURE

    input_path = Path(args.input)
    try:
        pdf_bytes = input_path.read_bytes()
    except OSError as exc:
        print(f"error: NotFound: cannot read {input_path}: {exc}", file=sys.stderr)
        return EXIT_FAILURE

    try:
        request = GenerationRequest(
            kind=kind_from_name(args.kind),
            questions_per_page=args.count,
            page_range=_parse_pages(args.pages) if args.pages else None,
        )
        document, pages = extract_document(
            pdf_bytes, input_path.name, max_bytes=config.max_upload_bytes
        )
        execution = start_job(
            document, pages, request,
            config.provider_config(), config.dedup_config(),
            strict_parse=config.strict_parse,
            page_char_budget=config.page_char_budget,
        )
    except ValueError as exc:
        print(f"error: InvalidRequest: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    except QuizreadError as exc:
        print(f"error: {exc.code}: {exc}", file=sys.stderr)
        return EXIT_FAILURE

    successes = []
    for result in execution.results():
        if result.ok:
            successes.append(result.outcome)
            if not args.quiet:
                note = f", {len(result.dropped)} dropped" if result.dropped else ""
                print(
                    f"page {result.page_index}: {len(result.outcome.pairs)} questions"
                    f"{note} [{result.latency_ms:.0f} ms]",
                    file=sys.stderr,
                )
        else:
            print(
                f"page {result.page_index}: error {result.outcome.code}: "
                f"{result.outcome.message}",
                file=sys.stderr,
            )

    out_path = Path(args.out) if args.out else Path(str(input_path) + ".quiz.json")
    if successes:
        try:
            _write_atomic(out_path, serialize_sidecar(document, successes))
        except OSError as exc:
            print(f"error: StorageFailure: cannot write {out_path}: {exc}", file=sys.stderr)
            return EXIT_FAILURE
        print(out_path)

    status = execution.job.status
    if status is JobStatus.Completed:
        return EXIT_OK
    if status is JobStatus.PartiallyCompleted:
        return EXIT_PARTIAL
    print(f"error: JobFailed: no page succeeded", file=sys.stderr)
    return EXIT_FAILURE


def _write_atomic(path: Path, text: str) -> None:
    fd, tmp_name = tempfile.mkstemp(dir=str(path.parent or Path(".")), suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as handle:
            handle.write(text)
        os.replace(tmp_name, path)
    finally:
        if os.path.exists(tmp_name):
            os.unlink(tmp_name)


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    overrides = {
        "addr": args.addr,
        "storage_dir": args.storage_dir,
        "provider_url": args.provider_url,
        "model": args.model,
        "api_key_var": args.api_key_var,
        "dedup_threshold": args.dedup_threshold,
    }
    try:
        config = load_config(args.config, overrides)
        host, port = config.listen_address()
    except (ValueError, OSError) as exc:
        print(f"error: InvalidRequest: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    app = create_app(config)
    uvicorn.run(app, host=host, port=port, log_level="info")
    return EXIT_OK


def run_cli(argv: list[str] | None = None) -> int:
    parser = build_arg_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_FAILURE if exc.code else EXIT_OK
    try:
        if args.command == "gen":
            return cmd_gen(args)
        return cmd_serve(args)
    except QuizreadError as exc:
        print(f"error: {exc.code}: {exc}", file=sys.stderr)
        return EXIT_FAILURE


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
