import pathlib

import pytest
from fastapi.testclient import TestClient

from disco.repl import ReplConfig, ReplState
from disco.server import ServerConfig, create_app

PROGRAMS = pathlib.Path(__file__).resolve().parents[1] / "programs"


def make_client(**kwargs) -> TestClient:
    kwargs.setdefault("repl", ReplConfig(offline=True))
    return TestClient(create_app(ServerConfig(**kwargs)))


@pytest.fixture
def client():
    return make_client()


def new_session(client) -> str:
    resp = client.post("/api/session")
    assert resp.status_code == 200
    return resp.json()["sessionId"]


def send(client, sid, line):
    resp = client.post(f"/api/session/{sid}/input", json={"line": line})
    assert resp.status_code == 200, resp.text
    return resp.json()["blocks"]


def test_health(client):
    resp = client.get("/api/health")
    assert resp.status_code == 200
    assert resp.text == "ok"


def test_create_and_smoke(client):
    sid = new_session(client)
    assert len(sid) >= 32  # >= 128 bits of entropy, urlsafe-encoded
    blocks = send(client, sid, "1+1")
    assert blocks == [{"kind": "value", "text": "2"}]


def test_type_block_over_http(client):
    sid = new_session(client)
    blocks = send(client, sid, ":type 2/3")
    assert blocks == [{"kind": "type", "text": "2 / 3 : 𝔽"}]


def test_unbound_error_block_carries_url(client):
    sid = new_session(client)
    blocks = send(client, sid, "x + 3")
    assert blocks[0]["kind"] == "error"
    assert blocks[0]["text"] == "Error: there is nothing named x."
    assert blocks[0]["docURL"].endswith("/reference/unbound.html")


def test_unknown_session_404(client):
    resp = client.post("/api/session/nope/input", json={"line": "1"})
    assert resp.status_code == 404


def test_oversized_input_413(client):
    sid = new_session(client)
    resp = client.post(f"/api/session/{sid}/input", json={"line": "x" * (64 * 1024 + 1)})
    assert resp.status_code == 413


def test_oversized_upload_413(client):
    sid = new_session(client)
    resp = client.post(f"/api/session/{sid}/load", json={
        "files": [{"name": "big.disco", "contents": "-" * (1024 * 1024 + 1)}]})
    assert resp.status_code == 413


def test_session_cap_503():
    client = make_client(session_cap=2)
    assert client.post("/api/session").status_code == 200
    assert client.post("/api/session").status_code == 200
    assert client.post("/api/session").status_code == 503


def test_load_gcd_returns_test_report(client):
    sid = new_session(client)
    contents = (PROGRAMS / "gcd.disco").read_text()
    resp = client.post(f"/api/session/{sid}/load", json={
        "files": [{"name": "gcd.disco", "contents": contents}]})
    blocks = resp.json()["blocks"]
    reports = [b for b in blocks if b["kind"] == "test-report"]
    assert len(reports) == 1
    assert "Certainly true: gcd(7, 6) == 1" in reports[0]["text"]
    assert "Checked 100 possibilities" in reports[0]["text"]
    assert send(client, sid, "gcd(12, 18)") == [{"kind": "value", "text": "6"}]


def test_parse_error_upload_preserves_state(client):
    sid = new_session(client)
    contents = (PROGRAMS / "gcd.disco").read_text()
    client.post(f"/api/session/{sid}/load",
                json={"files": [{"name": "gcd.disco", "contents": contents}]})
    resp = client.post(f"/api/session/{sid}/load", json={
        "files": [{"name": "broken.disco", "contents": "f(x) = )(\n"}]})
    blocks = resp.json()["blocks"]
    assert blocks[-1]["kind"] == "error"
    assert send(client, sid, "gcd(7, 6)") == [{"kind": "value", "text": "1"}]


def test_empty_file_list(client):
    sid = new_session(client)
    resp = client.post(f"/api/session/{sid}/load", json={"files": []})
    assert resp.json()["blocks"] == []


def test_session_isolation(client):
    a = new_session(client)
    b = new_session(client)
    client.post(f"/api/session/{a}/load", json={"files": [
        {"name": "v.disco", "contents": "v : N\nv = 9\n"}]})
    assert send(client, a, "v") == [{"kind": "value", "text": "9"}]
    blocks = send(client, b, "v")
    assert blocks[0]["kind"] == "error"
    # interleave to confirm no cross-talk
    client.post(f"/api/session/{b}/load", json={"files": [
        {"name": "v.disco", "contents": "v : N\nv = 7\n"}]})
    assert send(client, a, "v") == [{"kind": "value", "text": "9"}]
    assert send(client, b, "v") == [{"kind": "value", "text": "7"}]


def test_transcript_equivalence_with_local_repl(client):
    gcd_source = (PROGRAMS / "gcd.disco").read_text()
    lines = [
        ":type -3", ":type |-3|", ":type 2/3", ":type -2/3",
        ":type floor(-2/3)", ":type [1,-2,3/5]",
        "(\\x. x - 2) (5/2)", "2 + 2", ":doc +", "x + 3",
        "{2x+1 | x in {0 .. 3}}",
    ]
    stateful_lines = [
        ":doc gcd",
        "gcd(12, 18)",
        ":test forall a:N, b:N. let g = gcd(a,b) in g divides a /\\ g divides b",
        ":test forall a:N, b:N. let g = gcd(a,b) in g divides a /\\ (2g) divides b",
        ":names",
    ]
    local = ReplState(ReplConfig(offline=True))
    sid = new_session(client)
    for line in lines:
        local_blocks = [b.to_json() for b in local.exec_input(line)]
        http_blocks = send(client, sid, line)
        assert local_blocks == http_blocks, line
    # loading the same module both ways keeps the transcripts identical,
    # including the seeded property reports
    local_load = [b.to_json() for b in local.load_source("gcd.disco", gcd_source)]
    resp = client.post(f"/api/session/{sid}/load", json={
        "files": [{"name": "gcd.disco", "contents": gcd_source}]})
    assert local_load == resp.json()["blocks"]
    for line in stateful_lines:
        local_blocks = [b.to_json() for b in local.exec_input(line)]
        http_blocks = send(client, sid, line)
        assert local_blocks == http_blocks, line


def test_prelude_files_preload_every_session():
    client = make_client(prelude_files=[str(PROGRAMS / "gcd.disco")])
    sid = new_session(client)
    assert send(client, sid, "gcd(12, 18)") == [{"kind": "value", "text": "6"}]


def test_expired_session_404():
    client = make_client(idle_seconds=0.0)
    sid = new_session(client)
    import time

    time.sleep(0.01)
    resp = client.post(f"/api/session/{sid}/input", json={"line": "1"})
    assert resp.status_code == 404


def test_wall_clock_timeout_returns_recursion_limit_style_block():
    client = make_client(request_timeout=0.3)
    sid = new_session(client)
    load = client.post(f"/api/session/{sid}/load", json={"files": [{
        "name": "slow.disco",
        "contents": "f : N -> N\nf(0) = 1\nf(m+1) = f(m) + f(m)\n",
    }]})
    assert all(b["kind"] != "error" for b in load.json()["blocks"])
    resp = client.post(f"/api/session/{sid}/input", json={"line": "f(60)"})
    blocks = resp.json()["blocks"]
    assert blocks[-1]["kind"] == "error"
    assert blocks[-1]["docURL"].endswith("/reference/recursion-limit.html")
