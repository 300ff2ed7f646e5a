"""CLI behavior: flags, exit codes, stream discipline, sidecar output."""

from __future__ import annotations

import json

import pytest

from quizread.cli import EXIT_FAILURE, EXIT_OK, EXIT_PARTIAL, _parse_pages, run_cli
from quizread.qa_parser import parse_sidecar


def run(capsys, argv):
    code = run_cli(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestGen:
    def test_happy_path(self, tmp_path, pdf3_path, capsys):
        out_path = tmp_path / "out.quiz.json"
        code, out, err = run(capsys, [
            "gen", str(pdf3_path), "--provider", "mock", "--count", "4",
            "--out", str(out_path),
        ])
        assert code == EXIT_OK
        assert str(out_path) in out
        _, sets = parse_sidecar(out_path.read_text("utf-8"))
        assert len(sets) == 3
        assert sum(len(s.pairs) for s in sets) == 12
        assert "page 0: 4 questions" in err

    def test_default_output_path(self, pdf3_path, capsys):
        code, out, _ = run(capsys, ["gen", str(pdf3_path), "--provider", "mock"])
        assert code == EXIT_OK
        expected = str(pdf3_path) + ".quiz.json"
        assert expected in out
        assert (pdf3_path.parent / (pdf3_path.name + ".quiz.json")).exists()

    def test_default_count_is_four(self, tmp_path, pdf3_path, capsys):
        out_path = tmp_path / "o.quiz.json"
        code, _, _ = run(capsys, [
            "gen", str(pdf3_path), "--provider", "mock", "--out", str(out_path),
        ])
        assert code == EXIT_OK
        _, sets = parse_sidecar(out_path.read_text("utf-8"))
        assert all(len(s.pairs) == 4 for s in sets)

    @pytest.mark.parametrize("count", [0, 11])
    def test_count_bound_violations(self, pdf3_path, capsys, count):
        code, _, err = run(capsys, [
            "gen", str(pdf3_path), "--provider", "mock", "--count", str(count),
        ])
        assert code == EXIT_FAILURE
        assert "1" in err and "10" in err

    def test_partial_failure_exit_code(self, tmp_path, pdf3_path, capsys):
        out_path = tmp_path / "p.quiz.json"
        code, _, err = run(capsys, [
            "gen", str(pdf3_path),
            "--provider-url", "mock:?fail_if_contains=PAGE-1",
            "--out", str(out_path),
        ])
        assert code == EXIT_PARTIAL
        assert "error" in err
        _, sets = parse_sidecar(out_path.read_text("utf-8"))
        assert [s.page_index for s in sets] == [0, 2]

    def test_total_failure_exit_code(self, tmp_path, pdf3_path, capsys):
        code, out, _ = run(capsys, [
            "gen", str(pdf3_path),
            "--provider-url", "mock:?fail_if_contains=PAGE-",
            "--out", str(tmp_path / "t.quiz.json"),
        ])
        assert code == EXIT_FAILURE
        assert not (tmp_path / "t.quiz.json").exists()

    def test_missing_input(self, tmp_path, capsys):
        code, _, err = run(capsys, ["gen", str(tmp_path / "absent.pdf")])
        assert code == EXIT_FAILURE
        assert "error" in err

    def test_non_pdf_input(self, tmp_path, capsys):
        bogus = tmp_path / "bogus.pdf"
        bogus.write_bytes(b"not a pdf at all")
        code, _, err = run(capsys, ["gen", str(bogus), "--provider", "mock"])
        assert code == EXIT_FAILURE
        assert "UnreadableDocument" in err

    def test_quiet_suppresses_progress_not_errors(self, tmp_path, pdf3_path, capsys):
        out_path = tmp_path / "q.quiz.json"
        code, out, err = run(capsys, [
            "gen", str(pdf3_path), "--provider", "mock", "--quiet",
            "--out", str(out_path),
        ])
        assert code == EXIT_OK
        assert "questions" not in err
        code, _, err = run(capsys, [
            "gen", str(pdf3_path), "--quiet",
            "--provider-url", "mock:?fail_if_contains=PAGE-1",
            "--out", str(out_path),
        ])
        assert code == EXIT_PARTIAL
        assert "error" in err

    def test_pages_flag(self, tmp_path, pdf3_path, capsys):
        out_path = tmp_path / "r.quiz.json"
        code, _, _ = run(capsys, [
            "gen", str(pdf3_path), "--provider", "mock",
            "--pages", "0,2", "--out", str(out_path),
        ])
        assert code == EXIT_OK
        _, sets = parse_sidecar(out_path.read_text("utf-8"))
        assert [s.page_index for s in sets] == [0, 2]

    def test_pages_out_of_bounds(self, pdf3_path, capsys):
        code, _, err = run(capsys, [
            "gen", str(pdf3_path), "--provider", "mock", "--pages", "0-9",
        ])
        assert code == EXIT_FAILURE
        assert "JobRejected" in err

    def test_kind_analysis(self, tmp_path, pdf3_path, capsys):
        out_path = tmp_path / "a.quiz.json"
        code, _, _ = run(capsys, [
            "gen", str(pdf3_path), "--provider", "mock", "--kind", "analysis",
            "--count", "2", "--out", str(out_path),
        ])
        assert code == EXIT_OK
        _, sets = parse_sidecar(out_path.read_text("utf-8"))
        assert all(s.kind.name == "Analysis" for s in sets)
        assert all(p.label.startswith("A") for s in sets for p in s.pairs)

    def test_dedup_flags(self, tmp_path, pdf3_path, capsys):
        out_path = tmp_path / "d.quiz.json"
        code, _, _ = run(capsys, [
            "gen", str(pdf3_path), "--out", str(out_path),
            "--provider-url", "mock:?repeat_questions=1",
        ])
        assert code == EXIT_OK
        _, sets = parse_sidecar(out_path.read_text("utf-8"))
        assert sum(len(s.pairs) for s in sets) == 4  # later copies dropped
        code, _, _ = run(capsys, [
            "gen", str(pdf3_path), "--out", str(out_path), "--no-dedup",
            "--provider-url", "mock:?repeat_questions=1",
        ])
        _, sets = parse_sidecar(out_path.read_text("utf-8"))
        assert sum(len(s.pairs) for s in sets) == 12

    def test_http_provider_needs_url(self, pdf3_path, capsys, monkeypatch):
        monkeypatch.delenv("QUIZREAD_PROVIDER_URL", raising=False)
        code, _, err = run(capsys, ["gen", str(pdf3_path), "--provider", "http"])
        assert code == EXIT_FAILURE
        assert "provider" in err.lower()

    def test_config_file_and_env_precedence(self, tmp_path, pdf3_path, capsys, monkeypatch):
        config_path = tmp_path / "quizread.conf"
        config_path.write_text("provider_url = mock:?fail_if_contains=PAGE-\n")
        # File alone: every page fails.
        code, _, _ = run(capsys, [
            "gen", str(pdf3_path), "--config", str(config_path),
            "--out", str(tmp_path / "x.quiz.json"),
        ])
        assert code == EXIT_FAILURE
        # Env beats file: plain mock succeeds.
        monkeypatch.setenv("QUIZREAD_PROVIDER_URL", "mock:")
        code, _, _ = run(capsys, [
            "gen", str(pdf3_path), "--config", str(config_path),
            "--out", str(tmp_path / "y.quiz.json"),
        ])
        assert code == EXIT_OK
        # Flag beats env.
        monkeypatch.setenv("QUIZREAD_PROVIDER_URL", "mock:?fail_if_contains=PAGE-")
        code, _, _ = run(capsys, [
            "gen", str(pdf3_path), "--provider-url", "mock:",
            "--out", str(tmp_path / "z.quiz.json"),
        ])
        assert code == EXIT_OK

    def test_strict_parse_flag_passes_clean_mock(self, tmp_path, pdf3_path, capsys):
        code, _, _ = run(capsys, [
            "gen", str(pdf3_path), "--provider", "mock", "--strict-parse",
            "--out", str(tmp_path / "s.quiz.json"),
        ])
        assert code == EXIT_OK


class TestParsePages:
    def test_single_and_ranges(self):
        assert _parse_pages("0") == frozenset({0})
        assert _parse_pages("0-2,4") == frozenset({0, 1, 2, 4})
        assert _parse_pages("3-3") == frozenset({3})

    def test_bad_specs(self):
        with pytest.raises(ValueError):
            _parse_pages("5-2")
        with pytest.raises(ValueError):
            _parse_pages("")
        with pytest.raises(ValueError):
            _parse_pages("a-b")


class TestArgErrors:
    def test_unknown_subcommand(self, capsys):
        assert run_cli(["frobnicate"]) == EXIT_FAILURE

    def test_no_args(self, capsys):
        assert run_cli([]) == EXIT_FAILURE
