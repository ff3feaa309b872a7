"""HTTP interface: rule-base management plus stateless evaluation.

Rule bases live in memory for the lifetime of the server; facts never do,
they travel inside each /evaluate request. The proof document in an
/evaluate response is exactly the reasoner's structured trace, so HTTP
clients and the CLI see byte-identical proofs for identical inputs.
"""

from __future__ import annotations

import logging
import secrets
import threading
from dataclasses import dataclass
from pathlib import Path

from fastapi import FastAPI, Request, Response
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, PlainTextResponse
from starlette.concurrency import run_in_threadpool

from .errors import BadIdentifier, EngineError, UnknownStrategy
from .loader import has_errors, leaves, parse_rule_file, rule_to_obj, validate
from .model import RuleBase, fact_base
from .reasoner import DEFAULT_STRATEGY, Strategy, evaluate, proof_to_dict

log = logging.getLogger("proviso.service")


@dataclass
class StoredRuleBase:
    id: str
    name: str
    rb: RuleBase

    def handle(self) -> dict:
        return {"id": self.id, "name": self.name, "head_count": len(self.rb)}


class RuleBaseStore:
    """In-memory store; reads are cheap, writes take the lock."""

    def __init__(self):
        self._lock = threading.Lock()
        self._entries: dict[str, StoredRuleBase] = {}

    def add(self, name: str, rb: RuleBase) -> StoredRuleBase:
        with self._lock:
            rb_id = secrets.token_hex(4)
            while rb_id in self._entries:
                rb_id = secrets.token_hex(4)
            entry = StoredRuleBase(id=rb_id, name=name, rb=rb)
            self._entries[rb_id] = entry
            return entry

    def get(self, rb_id: str) -> StoredRuleBase | None:
        with self._lock:
            return self._entries.get(rb_id)

    def remove(self, rb_id: str) -> bool:
        with self._lock:
            return self._entries.pop(rb_id, None) is not None

    def handles(self) -> list[dict]:
        with self._lock:
            return [e.handle() for e in self._entries.values()]


def _diag_obj(d) -> dict:
    return {"severity": d.severity.value, "code": d.code,
            "subject": d.subject, "message": d.message}


def _preload(store: RuleBaseStore, rules_dir: Path) -> None:
    for path in sorted(rules_dir.glob("*.json")):
        try:
            rules = parse_rule_file(path.read_bytes())
            rb, diagnostics = validate(rules)
        except EngineError as e:
            log.warning("skipping %s: %s", path.name, e)
            continue
        if rb is None:
            log.warning("skipping %s: %d error diagnostic(s)", path.name,
                        sum(1 for d in diagnostics if d.severity.value == "ERROR"))
            continue
        name = path.stem
        if name.endswith(".rules"):
            name = name[: -len(".rules")]
        store.add(name, rb)


def create_app(rules_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="proviso", docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    store = RuleBaseStore()
    app.state.store = store
    if rules_dir is not None:
        _preload(store, Path(rules_dir))

    @app.get("/health")
    def health() -> PlainTextResponse:
        return PlainTextResponse("ok")

    @app.get("/rulebases")
    def list_rulebases() -> list[dict]:
        return store.handles()

    def _add_rulebase(body: bytes, name: str | None):
        try:
            rules = parse_rule_file(body)
        except EngineError as e:
            return JSONResponse({"error": str(e)}, status_code=400)
        rb, diagnostics = validate(rules)
        if rb is None:
            return JSONResponse(
                {"diagnostics": [_diag_obj(d) for d in diagnostics]},
                status_code=422)
        entry = store.add(name or "unnamed", rb)
        return JSONResponse(entry.handle(), status_code=201)

    @app.post("/rulebases")
    async def add_rulebase(request: Request, name: str | None = None):
        body = await request.body()
        # parsing/validation is CPU-bound; keep the event loop responsive
        return await run_in_threadpool(_add_rulebase, body, name)

    @app.get("/rulebases/{rb_id}")
    def get_rulebase(rb_id: str):
        entry = store.get(rb_id)
        if entry is None:
            return JSONResponse({"error": "no such rule base"}, status_code=404)
        body = entry.handle()
        body["rules"] = [rule_to_obj(entry.rb.rules[p]) for p in sorted(entry.rb.rules)]
        body["leaves"] = sorted(leaves(entry.rb))
        return JSONResponse(body)

    @app.delete("/rulebases/{rb_id}")
    def delete_rulebase(rb_id: str):
        if not store.remove(rb_id):
            return JSONResponse({"error": "no such rule base"}, status_code=404)
        return Response(status_code=204)

    @app.post("/evaluate")
    async def evaluate_endpoint(request: Request):
        try:
            payload = await request.json()
        except Exception:
            return JSONResponse({"error": "request body must be JSON"}, status_code=400)
        return await run_in_threadpool(_evaluate, payload)

    def _evaluate(payload):
        if not isinstance(payload, dict):
            return JSONResponse({"error": "request body must be an object"}, status_code=400)
        entry = store.get(str(payload.get("rulebase_id", "")))
        if entry is None:
            return JSONResponse({"error": "no such rule base"}, status_code=404)
        raw_facts = payload.get("facts", [])
        goal = payload.get("goal")
        raw_strategy = payload.get("strategy", DEFAULT_STRATEGY.value)
        if (not isinstance(raw_facts, list)
                or not all(isinstance(f, str) for f in raw_facts)
                or not isinstance(goal, str)):
            return JSONResponse(
                {"error": "facts must be a list of strings and goal a string"},
                status_code=422)
        try:
            strategy = Strategy.parse(raw_strategy)
            facts = fact_base(raw_facts)
            verdict = evaluate(entry.rb, facts, goal, strategy)
        except (BadIdentifier, UnknownStrategy) as e:
            return JSONResponse({"error": str(e)}, status_code=422)
        return JSONResponse({
            "goal": verdict.goal,
            "holds": verdict.holds,
            "status": verdict.root.status.value,
            "proof": proof_to_dict(verdict.root),
            "stats": {
                "propositions_evaluated": verdict.stats.propositions_evaluated,
                "rule_expansions": verdict.stats.rule_expansions,
                "fact_lookups": verdict.stats.fact_lookups,
                "strategy": verdict.stats.strategy.value,
            },
        })

    return app
