"""Minimal HTTP session API: a human answers a live session's questions.

Four JSON endpoints:

    POST /hierarchies                 upload an edge-list or JSON tree
    POST /sessions                    {hierarchy_id, algo, b, k}
    POST /sessions/{id}/answer        {answer: "yes"|"no", token}
    GET  /sessions/{id}               read-only snapshot

Every question is issued with an idempotency token; an answer must echo the
token of the pending question.  Replaying an already-processed token returns
the stored response unchanged, any other token mismatch is rejected, and a
per-session lock serializes mutations so concurrent submitters see exactly
one winner.
"""

from __future__ import annotations

import json
import re
import threading
import uuid
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from .fixtures import demo_hierarchy
from .hierarchy import Hierarchy, HierarchyError, load_hierarchy
from .oracle import Answer
from .penalty import set_penalty
from .session import MULTI, SINGLE, SessionState, apply_answer, finalize_selection, init_session
from .engines import make_engine
from .algo_dp_plus import FirstRoundCache, precompute_first_round


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message


def _mode_for(algo: str) -> str:
    return SINGLE if algo in ("stbis", "bing-single") else MULTI


class SessionHandle:
    def __init__(self, session_id: str, hierarchy_id: str, h: Hierarchy,
                 algo: str, b: int, k: int, engine):
        self.session_id = session_id
        self.hierarchy_id = hierarchy_id
        self.h = h
        self.algo = algo
        self.b = b
        self.k = k
        self.engine = engine
        self.state: SessionState = init_session(h, engine.mode, b, k)
        self.lock = threading.Lock()
        self.pending_question: Optional[int] = None
        self.pending_token: Optional[str] = None
        self.token_responses: Dict[str, dict] = {}
        self.question_seq = 0

    def issue_question(self) -> Optional[dict]:
        """Pick and pin the next question; None when the session is over."""
        if self.state.terminated:
            self.pending_question = None
            self.pending_token = None
            return None
        q = self.engine.next_question(self.state)
        self.question_seq += 1
        self.pending_question = q
        self.pending_token = f"q{self.question_seq}-{uuid.uuid4().hex[:8]}"
        return self.question_payload()

    def question_payload(self) -> Optional[dict]:
        if self.pending_question is None:
            return None
        q = self.pending_question
        return {
            "vertex": q,
            "label": self.h.label[q],
            "path": [self.h.label[v] for v in self.h.root_path(q)],
            "token": self.pending_token,
        }

    def selections_payload(self) -> dict:
        sel = self.engine.finalize(self.state)
        pot = self.state.p_vertices()
        return {
            "selections": [{
                "vertex": v,
                "label": self.h.label[v],
                "path": [self.h.label[u] for u in self.h.root_path(v)],
            } for v in sel.members],
            "penalty_vs_potential": set_penalty(self.h, sel.members, pot),
        }

    def snapshot(self) -> dict:
        best = self.selections_payload()
        return {
            "session_id": self.session_id,
            "hierarchy_id": self.hierarchy_id,
            "algo": self.algo,
            "b": self.b,
            "k": self.k,
            "budget_remaining": self.state.budget_remaining,
            "p_size": self.state.p_size,
            "y_labels": [self.h.label[v] for v in self.state.y_vertices()],
            "history": [{
                "q": self.h.label[rec.question],
                "answer": rec.answer.value,
                "p_size": rec.p_size_after,
                "y_size": rec.y_size_after,
            } for rec in self.state.log],
            "terminated": self.state.terminated,
            "question": self.question_payload(),
            "best": best,
        }


class Api:
    """Endpoint logic, independent of the HTTP plumbing."""

    def __init__(self, store_dir: Optional[str] = None):
        self.hierarchies: Dict[str, Hierarchy] = {"demo10": demo_hierarchy()}
        self.sessions: Dict[str, SessionHandle] = {}
        self.caches: Dict[Tuple[str, int], FirstRoundCache] = {}
        self.registry_lock = threading.Lock()
        self.store_dir = Path(store_dir) if store_dir else None
        if self.store_dir:
            self.store_dir.mkdir(parents=True, exist_ok=True)

    # -- endpoints --------------------------------------------------------

    def upload_hierarchy(self, body: bytes) -> dict:
        text = body.decode("utf-8", errors="replace").strip()
        fmt = "json" if text.startswith("{") else "edge-list"
        try:
            h = load_hierarchy(text, fmt)
        except HierarchyError as exc:
            raise ApiError(400, "bad_hierarchy", str(exc)) from None
        hid = "h-" + uuid.uuid4().hex[:10]
        with self.registry_lock:
            self.hierarchies[hid] = h
        return {"hierarchy_id": hid, "n": h.n, "height": h.height}

    def create_session(self, doc: dict) -> dict:
        hid = doc.get("hierarchy_id")
        algo = doc.get("algo", "kbm-dp-plus")
        try:
            b = int(doc.get("b", 10))
            k = int(doc.get("k", 1))
        except (TypeError, ValueError):
            raise ApiError(400, "bad_request", "b and k must be integers") from None
        with self.registry_lock:
            h = self.hierarchies.get(hid)
        if h is None:
            raise ApiError(404, "unknown_hierarchy", f"no hierarchy {hid!r}")
        try:
            cache = None
            if algo == "kbm-dp-plus":
                cache = self._dp_plus_cache(hid, h, k)
            engine = make_engine(algo, h, k, mode=_mode_for(algo),
                                 dp_plus_cache=cache)
            handle = SessionHandle("s-" + uuid.uuid4().hex[:10], hid, h,
                                   algo, b, k, engine)
        except ValueError as exc:
            raise ApiError(400, "bad_request", str(exc)) from None
        with self.registry_lock:
            self.sessions[handle.session_id] = handle
        with handle.lock:
            question = handle.issue_question()
            out = {
                "session_id": handle.session_id,
                "question": question,
                "budget_remaining": handle.state.budget_remaining,
            }
            if question is None:
                out.update(handle.selections_payload())
        self._persist(handle, {"event": "created", "hierarchy_id": hid,
                               "algo": algo, "b": b, "k": k})
        return out

    def submit_answer(self, session_id: str, doc: dict) -> dict:
        handle = self._session(session_id)
        raw = str(doc.get("answer", "")).lower()
        if raw not in ("yes", "no"):
            raise ApiError(400, "bad_answer", "answer must be 'yes' or 'no'")
        token = doc.get("token")
        with handle.lock:
            if token in handle.token_responses:
                return handle.token_responses[token]
            if handle.pending_question is None:
                raise ApiError(409, "no_pending_question",
                               "session has no question awaiting an answer")
            if token != handle.pending_token:
                raise ApiError(409, "token_mismatch",
                               "answer token does not match the pending question")
            q = handle.pending_question
            answer = Answer.YES if raw == "yes" else Answer.NO
            apply_answer(handle.state, handle.h, q, answer)
            handle.engine.on_answer(handle.state, q, answer)
            question = handle.issue_question()
            if question is None:
                out = handle.selections_payload()
                out["terminated"] = True
            else:
                out = {"question": question, "terminated": False}
            out["budget_remaining"] = handle.state.budget_remaining
            out["p_size"] = handle.state.p_size
            handle.token_responses[token] = out
        self._persist(handle, {"event": "answered",
                               "q": handle.h.label[q], "answer": raw})
        return out

    def get_session(self, session_id: str) -> dict:
        handle = self._session(session_id)
        with handle.lock:
            return handle.snapshot()

    # -- helpers -----------------------------------------------------------

    def _session(self, session_id: str) -> SessionHandle:
        with self.registry_lock:
            handle = self.sessions.get(session_id)
        if handle is None:
            raise ApiError(404, "unknown_session", f"no session {session_id!r}")
        return handle

    def _dp_plus_cache(self, hid: str, h: Hierarchy, k: int) -> FirstRoundCache:
        key = (hid, k)
        with self.registry_lock:
            hit = self.caches.get(key)
        if hit is None:
            hit = precompute_first_round(h, k)
            with self.registry_lock:
                self.caches[key] = hit
        return hit

    def _persist(self, handle: SessionHandle, record: dict) -> None:
        if not self.store_dir:
            return
        path = self.store_dir / f"{handle.session_id}.jsonl"
        with handle.lock:
            with path.open("a") as fh:
                fh.write(json.dumps(record) + "\n")


def replay_session(h: Hierarchy, algo: str, b: int, k: int,
                   answers: List[Tuple[str, str]]):
    """Re-run a logged (question label, answer) sequence through the engine.

    Returns the finalized selection; used for crash replay of persisted
    session logs and for checking that the service adds no hidden state.
    """
    engine = make_engine(algo, h, k, mode=_mode_for(algo))
    state = init_session(h, engine.mode, b, k)
    for label, raw in answers:
        q = h.id_of(label)
        answer = Answer.YES if raw.lower() == "yes" else Answer.NO
        apply_answer(state, h, q, answer)
        engine.on_answer(state, q, answer)
    return finalize_selection(state, h)


class _Handler(BaseHTTPRequestHandler):
    api: Api = None      # installed by make_server

    def log_message(self, fmt, *args):   # quiet by default
        pass

    def _send(self, status: int, doc: dict) -> None:
        payload = json.dumps(doc).encode()
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(payload)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.send_header("Access-Control-Allow-Headers", "Content-Type")
        self.send_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS")
        self.end_headers()
        self.wfile.write(payload)

    def _body(self) -> bytes:
        length = int(self.headers.get("Content-Length") or 0)
        return self.rfile.read(length) if length else b""

    def _json_body(self) -> dict:
        raw = self._body()
        try:
            doc = json.loads(raw.decode("utf-8")) if raw else {}
        except (json.JSONDecodeError, UnicodeDecodeError):
            raise ApiError(400, "bad_json", "request body is not valid JSON") from None
        if not isinstance(doc, dict):
            raise ApiError(400, "bad_json", "request body must be a JSON object")
        return doc

    def do_OPTIONS(self):
        self._send(204, {})

    def do_POST(self):
        try:
            if self.path == "/hierarchies":
                self._send(201, self.api.upload_hierarchy(self._body()))
                return
            if self.path == "/sessions":
                self._send(201, self.api.create_session(self._json_body()))
                return
            m = re.fullmatch(r"/sessions/([^/]+)/answer", self.path)
            if m:
                self._send(200, self.api.submit_answer(m.group(1), self._json_body()))
                return
            raise ApiError(404, "not_found", f"no route {self.path}")
        except ApiError as exc:
            self._send(exc.status, {"code": exc.code, "message": exc.message})

    def do_GET(self):
        try:
            m = re.fullmatch(r"/sessions/([^/]+)", self.path)
            if m:
                self._send(200, self.api.get_session(m.group(1)))
                return
            raise ApiError(404, "not_found", f"no route {self.path}")
        except ApiError as exc:
            self._send(exc.status, {"code": exc.code, "message": exc.message})


def make_server(host: str = "127.0.0.1", port: int = 0,
                store_dir: Optional[str] = None) -> ThreadingHTTPServer:
    api = Api(store_dir=store_dir)
    handler = type("BoundHandler", (_Handler,), {"api": api})
    return ThreadingHTTPServer((host, port), handler)


def serve(host: str = "127.0.0.1", port: int = 8787,
          store_dir: Optional[str] = None) -> None:
    server = make_server(host, port, store_dir)
    print(f"session service listening on http://{host}:{server.server_port}",
          flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        server.shutdown()
