"""HTTP annotation service exposing the engine to interactive clients.

Sentences arrive pre-parsed (same fields as corpus records); the service
never runs a parser. One writer owns the engine: every handler runs under
the runtime lock, mutations bump an optimistic revision counter, and
corrections carrying a stale revision are rejected with 409 so concurrent
annotators never silently overwrite each other.
"""

from __future__ import annotations

import threading
from collections import Counter

from fastapi import FastAPI, HTTPException, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel, ConfigDict

from . import engine as eng
from .engine import EngineState, TrainOutcome
from .harness import _CAUSAL_FLAGS, _NONCAUSAL_FLAGS
from .patterns import CauseEffectGraph, make_ceg
from .store import (
    StoreFormatError,
    pattern_to_doc,
    read_store_files,
    write_store_files,
)
from .trees import BracketParseError, ParsedSentence, parse_bracketed_tree


class SentenceRecord(BaseModel):
    model_config = ConfigDict(extra="forbid")

    id: str | None = None
    text: str | None = None
    ptb: str
    conllu: str | None = None


class AnalyzeRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    record: SentenceRecord


class CorrectRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    record: SentenceRecord
    cause_span: tuple[int, int]
    effect_span: tuple[int, int]
    revision: int | None = None


class NoncausalRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    record: SentenceRecord
    revision: int | None = None


class StorePathRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    path: str | None = None


class ServiceRuntime:
    """Engine, revision counter and session flag tallies behind one lock."""

    def __init__(self, store_path: str | None = None):
        self.state = EngineState.empty()
        self.revision = 0
        self.flags: Counter[str] = Counter()
        self.lock = threading.Lock()
        self.store_path = store_path

    # -- persistence ------------------------------------------------------

    def save(self, path: str) -> None:
        write_store_files(self.state, path)

    def load(self, path: str) -> None:
        self.state = read_store_files(path)
        self.revision += 1


def _parse_record(record: SentenceRecord) -> ParsedSentence:
    try:
        parsed = parse_bracketed_tree(record.ptb, sentence_id=record.id)
    except BracketParseError as exc:
        raise HTTPException(status_code=400, detail=f"ptb: {exc}") from exc
    if record.text is not None:
        from .trees import normalize_ws

        if normalize_ws(record.text) != parsed.text:
            raise HTTPException(
                status_code=400,
                detail=f"text {record.text!r} does not match the parse tokens",
            )
    if record.conllu:
        from .trees import DependencyParseError, parse_dependencies

        try:
            deps = parse_dependencies(record.conllu)
        except DependencyParseError as exc:
            raise HTTPException(status_code=400, detail=f"conllu: {exc}") from exc
        if deps:
            if len(deps) != len(parsed.tokens):
                raise HTTPException(
                    status_code=400,
                    detail="conllu rows do not match the token count",
                )
            parsed = ParsedSentence(
                id=parsed.id, text=parsed.text, tokens=parsed.tokens,
                tree=parsed.tree, deps=deps,
            )
    return parsed


def _token_docs(sentence: ParsedSentence) -> list[dict]:
    return [
        {"index": t.index, "text": t.text, "pos": t.pos} for t in sentence.tokens
    ]


def _ceg_doc(ceg: CauseEffectGraph | None) -> dict | None:
    if ceg is None:
        return None
    return {
        "cause": {"text": ceg.cause.text, "start": ceg.cause.start, "end": ceg.cause.end},
        "effect": {
            "text": ceg.effect.text, "start": ceg.effect.start, "end": ceg.effect.end,
        },
    }


def create_app(runtime: ServiceRuntime | None = None) -> FastAPI:
    runtime = runtime or ServiceRuntime()
    app = FastAPI(title="ceglearn annotation service")
    app.state.runtime = runtime

    @app.exception_handler(RequestValidationError)
    async def validation_to_400(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"detail": exc.errors()})

    def check_revision(expected: int | None) -> None:
        if expected is not None and expected != runtime.revision:
            raise HTTPException(
                status_code=409,
                detail=f"stale revision {expected}; store is at {runtime.revision}",
            )

    def pattern_id_for(sentence_id: str) -> int | None:
        for pattern in runtime.state.patterns:
            if sentence_id in pattern.accepted:
                return pattern.id
        return None

    @app.post("/analyze")
    def analyze(request: AnalyzeRequest):
        sentence = _parse_record(request.record)
        with runtime.lock:
            result = eng.detect(runtime.state, sentence)
            return {
                "revision": runtime.revision,
                "sentence_id": sentence.id,
                "tokens": _token_docs(sentence),
                "matched_pattern_id": result.matched_pattern_id,
                "ceg": _ceg_doc(result.ceg),
                "failure": result.failure,
            }

    @app.post("/correct")
    def correct(request: CorrectRequest):
        sentence = _parse_record(request.record)
        try:
            gold = make_ceg(sentence, request.cause_span, request.effect_span)
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        with runtime.lock:
            check_revision(request.revision)
            try:
                outcome = eng.train_causal(runtime.state, sentence, gold)
            except ValueError as exc:
                raise HTTPException(status_code=400, detail=str(exc)) from exc
            flag = _CAUSAL_FLAGS[outcome]
            runtime.flags[flag.value] += 1
            if outcome in (
                TrainOutcome.ALREADY_COVERED,
                TrainOutcome.CREATED,
                TrainOutcome.SPECIFIED_AND_CREATED,
            ):
                runtime.revision += 1
            return {
                "revision": runtime.revision,
                "outcome": outcome.value,
                "flag": flag.value,
                "pattern_id": pattern_id_for(sentence.id),
            }

    @app.post("/noncausal")
    def noncausal(request: NoncausalRequest):
        sentence = _parse_record(request.record)
        with runtime.lock:
            check_revision(request.revision)
            try:
                outcome = eng.train_noncausal(runtime.state, sentence)
            except ValueError as exc:
                raise HTTPException(status_code=400, detail=str(exc)) from exc
            flag = _NONCAUSAL_FLAGS[outcome]
            runtime.flags[flag.value] += 1
            runtime.revision += 1
            return {
                "revision": runtime.revision,
                "outcome": outcome.value,
                "flag": flag.value,
            }

    @app.get("/patterns")
    def patterns():
        with runtime.lock:
            return {
                "revision": runtime.revision,
                "patterns": [pattern_to_doc(p) for p in runtime.state.patterns],
            }

    @app.get("/patterns/{pattern_id}")
    def pattern(pattern_id: int):
        with runtime.lock:
            found = runtime.state.pattern_by_id(pattern_id)
            if found is None:
                raise HTTPException(status_code=404, detail="no such pattern")
            return {"revision": runtime.revision, "pattern": pattern_to_doc(found)}

    @app.get("/stats")
    def stats():
        with runtime.lock:
            return {
                "revision": runtime.revision,
                "flags": {
                    flag: runtime.flags.get(flag, 0)
                    for flag in ("rec+", "disc+", "crea+", "crea-", "spec+", "spec-")
                },
                "patterns": len(runtime.state.patterns),
                "noncausal": len(runtime.state.noncausal),
            }

    @app.post("/store/save")
    def store_save(request: StorePathRequest):
        path = request.path or runtime.store_path
        if not path:
            raise HTTPException(status_code=400, detail="no store path configured")
        with runtime.lock:
            runtime.save(path)
            return {"revision": runtime.revision, "path": str(path)}

    @app.post("/store/load")
    def store_load(request: StorePathRequest):
        path = request.path or runtime.store_path
        if not path:
            raise HTTPException(status_code=400, detail="no store path configured")
        with runtime.lock:
            try:
                runtime.load(path)
            except FileNotFoundError as exc:
                raise HTTPException(status_code=400, detail=str(exc)) from exc
            except (StoreFormatError, ValueError) as exc:
                raise HTTPException(status_code=400, detail=str(exc)) from exc
            return {"revision": runtime.revision, "path": str(path)}

    return app
