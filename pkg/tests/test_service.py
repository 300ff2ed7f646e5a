"""HTTP API contract tests: upload, jobs, SSE events, questions, file."""

from __future__ import annotations

import json
import time

import pytest
from fastapi.testclient import TestClient

from quizread.config import AppConfig
from quizread.service import create_app
from quizread.store import DocumentStore


def make_client(tmp_path, **config_kw) -> TestClient:
    defaults = dict(
        storage_dir=str(tmp_path / "store"),
        provider_url="mock:",
        max_retries=0,
        backoff_base=0.01,
    )
    defaults.update(config_kw)
    config = AppConfig(**defaults)
    store = DocumentStore(config.storage_dir, max_bytes=config.max_upload_bytes)
    app = create_app(config, store=store)
    return TestClient(app)


def upload(client: TestClient, data: bytes, name: str = "fixture.pdf"):
    return client.post(
        "/api/documents", files={"file": (name, data, "application/pdf")}
    )


def read_sse(client: TestClient, job_id: str, timeout: float = 30.0):
    """Collect (event, payload) pairs until the done event."""
    events = []
    with client.stream("GET", f"/api/jobs/{job_id}/events") as response:
        assert response.status_code == 200
        assert response.headers["content-type"].startswith("text/event-stream")
        name = None
        started = time.monotonic()
        for line in response.iter_lines():
            assert time.monotonic() - started < timeout, "SSE stream stalled"
            if line.startswith("event: "):
                name = line[len("event: "):]
            elif line.startswith("data: "):
                payload = json.loads(line[len("data: "):])
                events.append((name, payload, time.monotonic()))
                if name == "done":
                    break
    return events


def start_and_wait(client, document_id, body=None):
    body = body or {"kind": "comprehension", "questions_per_page": 4}
    response = client.post(f"/api/documents/{document_id}/jobs", json=body)
    assert response.status_code == 202, response.text
    job_id = response.json()["job_id"]
    events = read_sse(client, job_id)
    return job_id, events


class TestUpload:
    def test_upload_fixture(self, tmp_path, pdf3):
        client = make_client(tmp_path)
        response = upload(client, pdf3)
        assert response.status_code == 201
        body = response.json()
        assert body["page_count"] == 3
        assert body["filename"] == "fixture.pdf"
        assert body["document_id"]

    def test_reupload_idempotent(self, tmp_path, pdf3):
        client = make_client(tmp_path)
        first = upload(client, pdf3)
        second = upload(client, pdf3, name="renamed.pdf")
        assert first.status_code == 201
        assert second.status_code == 200
        assert second.json()["document_id"] == first.json()["document_id"]

    def test_non_pdf_is_415(self, tmp_path):
        client = make_client(tmp_path)
        response = upload(client, b"PK\x03\x04 this is a docx-ish zip", name="paper.docx")
        assert response.status_code == 415
        body = response.json()
        assert body["code"] == "UnreadableDocument"
        assert body["http_status"] == 415

    def test_encrypted_is_422(self, tmp_path, pdf_encrypted):
        client = make_client(tmp_path)
        response = upload(client, pdf_encrypted)
        assert response.status_code == 422
        assert response.json()["code"] == "EncryptedDocument"

    def test_zero_pages_is_422(self, tmp_path, pdf_zero_pages):
        client = make_client(tmp_path)
        response = upload(client, pdf_zero_pages)
        assert response.status_code == 422
        assert response.json()["code"] == "EmptyDocument"

    def test_oversize_is_413(self, tmp_path, pdf3):
        client = make_client(tmp_path, max_upload_mb=1)
        padded = pdf3 + b"%" + b"x" * (1024 * 1024 + 10)
        response = upload(client, padded)
        assert response.status_code == 413
        assert response.json()["code"] == "DocumentTooLarge"

    def test_missing_file_part_is_400(self, tmp_path):
        client = make_client(tmp_path)
        response = client.post("/api/documents")
        assert response.status_code == 400
        assert response.json()["code"] == "InvalidRequest"


class TestJobs:
    def test_job_happy_path(self, tmp_path, pdf3):
        client = make_client(tmp_path)
        document_id = upload(client, pdf3).json()["document_id"]
        _, events = start_and_wait(client, document_id)
        page_events = [e for e in events if e[0] == "page"]
        done_events = [e for e in events if e[0] == "done"]
        assert len(page_events) == 3
        assert len(done_events) == 1
        assert [e[1]["page_index"] for e in page_events] == [0, 1, 2]
        assert done_events[0][1]["status"] == "completed"
        for _, payload, _ in page_events:
            assert len(payload["set"]["questions"]) == 4

    def test_unknown_document_404(self, tmp_path):
        client = make_client(tmp_path)
        response = client.post(
            "/api/documents/nope/jobs",
            json={"kind": "comprehension", "questions_per_page": 4},
        )
        assert response.status_code == 404
        assert response.json()["code"] == "NotFound"

    @pytest.mark.parametrize("count,ok", [(0, False), (1, True), (10, True), (11, False)])
    def test_count_bounds(self, tmp_path, pdf3, count, ok):
        client = make_client(tmp_path)
        document_id = upload(client, pdf3).json()["document_id"]
        response = client.post(
            f"/api/documents/{document_id}/jobs",
            json={"kind": "comprehension", "questions_per_page": count},
        )
        if ok:
            assert response.status_code == 202
            read_sse(client, response.json()["job_id"])
        else:
            assert response.status_code == 400
            assert response.json()["code"] == "CountOutOfRange"

    def test_unknown_kind_400(self, tmp_path, pdf3):
        client = make_client(tmp_path)
        document_id = upload(client, pdf3).json()["document_id"]
        response = client.post(
            f"/api/documents/{document_id}/jobs",
            json={"kind": "trivia", "questions_per_page": 3},
        )
        assert response.status_code == 400
        assert response.json()["code"] == "UnsupportedKind"

    def test_non_generable_kind_400(self, tmp_path, pdf3):
        client = make_client(tmp_path)
        document_id = upload(client, pdf3).json()["document_id"]
        response = client.post(
            f"/api/documents/{document_id}/jobs",
            json={"kind": "genre", "questions_per_page": 3},
        )
        assert response.status_code == 400
        assert response.json()["code"] == "UnsupportedKind"

    def test_second_job_while_running_409(self, tmp_path, pdf3):
        client = make_client(tmp_path, provider_url="mock:?delay_ms=300")
        document_id = upload(client, pdf3).json()["document_id"]
        body = {"kind": "comprehension", "questions_per_page": 2}
        first = client.post(f"/api/documents/{document_id}/jobs", json=body)
        assert first.status_code == 202
        second = client.post(f"/api/documents/{document_id}/jobs", json=body)
        assert second.status_code == 409
        assert second.json()["code"] == "JobAlreadyRunning"
        read_sse(client, first.json()["job_id"])
        third = client.post(f"/api/documents/{document_id}/jobs", json=body)
        assert third.status_code == 202
        read_sse(client, third.json()["job_id"])

    def test_page_subset(self, tmp_path, pdf3):
        client = make_client(tmp_path)
        document_id = upload(client, pdf3).json()["document_id"]
        _, events = start_and_wait(
            client, document_id,
            {"kind": "comprehension", "questions_per_page": 2, "pages": [0, 2]},
        )
        assert [e[1]["page_index"] for e in events if e[0] == "page"] == [0, 2]

    def test_bad_page_subset_400(self, tmp_path, pdf3):
        client = make_client(tmp_path)
        document_id = upload(client, pdf3).json()["document_id"]
        response = client.post(
            f"/api/documents/{document_id}/jobs",
            json={"kind": "comprehension", "questions_per_page": 2, "pages": [0, 9]},
        )
        assert response.status_code == 400
        assert response.json()["code"] == "JobRejected"


class TestEvents:
    def test_unknown_job_404(self, tmp_path):
        client = make_client(tmp_path)
        response = client.get("/api/jobs/nope/events")
        assert response.status_code == 404

    def test_replay_after_completion(self, tmp_path, pdf3):
        client = make_client(tmp_path)
        document_id = upload(client, pdf3).json()["document_id"]
        job_id, first_events = start_and_wait(client, document_id)
        replay = read_sse(client, job_id)
        assert [e[1].get("page_index") for e in replay if e[0] == "page"] == [0, 1, 2]
        assert replay[-1][0] == "done"
        assert replay[-1][1]["status"] == "completed"

    def test_no_duplicate_page_indices_per_connection(self, tmp_path, pdf5):
        client = make_client(tmp_path, provider_url="mock:?delay_ms=50")
        document_id = upload(client, pdf5).json()["document_id"]
        _, events = start_and_wait(
            client, document_id, {"kind": "comprehension", "questions_per_page": 2}
        )
        indices = [e[1]["page_index"] for e in events if e[0] == "page"]
        assert sorted(indices) == sorted(set(indices)) == [0, 1, 2, 3, 4]

    def test_errored_page_event_payload(self, tmp_path, pdf4):
        client = make_client(tmp_path, provider_url="mock:?fail_if_contains=PAGE-2")
        document_id = upload(client, pdf4).json()["document_id"]
        _, events = start_and_wait(client, document_id)
        page_events = {e[1]["page_index"]: e[1] for e in events if e[0] == "page"}
        assert page_events[2]["status"] == "error"
        assert page_events[2]["error"]["code"] == "ProviderRejected"
        done = [e for e in events if e[0] == "done"][0]
        assert done[1]["status"] == "partially_completed"
        assert done[1]["per_page_status"]["2"] == "errored"


class TestQuestions:
    def test_all_pages_after_job(self, tmp_path, pdf3):
        client = make_client(tmp_path)
        document_id = upload(client, pdf3).json()["document_id"]
        start_and_wait(client, document_id)
        response = client.get(f"/api/documents/{document_id}/questions")
        assert response.status_code == 200
        body = response.json()
        assert body["document"]["page_count"] == 3
        assert [p["page_index"] for p in body["pages"]] == [0, 1, 2]
        for page in body["pages"]:
            assert len(page["questions"]) == 4
            assert all(q["answer"] for q in page["questions"])

    def test_page_filter(self, tmp_path, pdf3):
        client = make_client(tmp_path)
        document_id = upload(client, pdf3).json()["document_id"]
        start_and_wait(client, document_id)
        response = client.get(f"/api/documents/{document_id}/questions", params={"page": 1})
        assert [p["page_index"] for p in response.json()["pages"]] == [1]

    def test_page_out_of_range_400(self, tmp_path, pdf3):
        client = make_client(tmp_path)
        document_id = upload(client, pdf3).json()["document_id"]
        response = client.get(f"/api/documents/{document_id}/questions", params={"page": 99})
        assert response.status_code == 400
        assert response.json()["code"] == "PageOutOfRange"

    def test_kind_filter_empty(self, tmp_path, pdf3):
        client = make_client(tmp_path)
        document_id = upload(client, pdf3).json()["document_id"]
        start_and_wait(client, document_id)  # generates comprehension only
        response = client.get(
            f"/api/documents/{document_id}/questions", params={"kind": "analysis"}
        )
        assert response.status_code == 200
        assert response.json()["pages"] == []

    def test_bad_kind_filter_400(self, tmp_path, pdf3):
        client = make_client(tmp_path)
        document_id = upload(client, pdf3).json()["document_id"]
        response = client.get(
            f"/api/documents/{document_id}/questions", params={"kind": "trivia"}
        )
        assert response.status_code == 400

    def test_unknown_document_404(self, tmp_path):
        client = make_client(tmp_path)
        response = client.get("/api/documents/nope/questions")
        assert response.status_code == 404


class TestFile:
    def test_byte_identical_roundtrip(self, tmp_path, pdf3):
        client = make_client(tmp_path)
        document_id = upload(client, pdf3).json()["document_id"]
        response = client.get(f"/api/documents/{document_id}/file")
        assert response.status_code == 200
        assert response.headers["content-type"] == "application/pdf"
        assert response.content == pdf3

    def test_unknown_404(self, tmp_path):
        client = make_client(tmp_path)
        assert client.get("/api/documents/nope/file").status_code == 404

    def test_head_request(self, tmp_path, pdf3):
        client = make_client(tmp_path)
        document_id = upload(client, pdf3).json()["document_id"]
        response = client.head(f"/api/documents/{document_id}/file")
        assert response.status_code == 200
        assert int(response.headers["content-length"]) == len(pdf3)
        assert response.content == b""


class TestErrorEnvelope:
    def test_every_error_conforms(self, tmp_path, pdf3):
        client = make_client(tmp_path)
        failures = [
            upload(client, b"not a pdf"),
            client.get("/api/documents/nope/file"),
            client.get("/api/jobs/nope/events"),
            client.post("/api/documents/nope/jobs", json={"kind": "x", "questions_per_page": 1}),
            client.post("/api/documents", content=b"no multipart"),
        ]
        for response in failures:
            assert response.status_code >= 400
            body = response.json()
            assert set(body) == {"http_status", "code", "message"}
            assert body["http_status"] == response.status_code
            assert isinstance(body["code"], str) and body["code"]
