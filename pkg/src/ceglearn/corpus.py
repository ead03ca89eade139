"""Annotated artifact files: one JSON object per line.

Line schema (unknown fields rejected)::

    {"id": "req-001",
     "text": "If the file fails, the system halts.",
     "ptb": "(S (SBAR (IN If) ...) ...)",
     "conllu": "1\\tIf\\t...",              # optional, may be null
     "label": "causal" | "noncausal",
     "cause_span": [1, 4],                 # required iff causal
     "effect_span": [5, 8]}                # required iff causal

Spans are 0-based token ranges, end exclusive. Records whose bracketing is
well-formed but not rooted in an S node are kept and marked unprocessable:
the engine cannot train on them, and the evaluation harness tallies them
separately instead of flagging them.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .patterns import CauseEffectGraph, make_ceg
from .trees import (
    BracketParseError,
    DependencyParseError,
    ParsedSentence,
    normalize_ws,
    parse_bracketed_tree,
    parse_dependencies,
)

CAUSAL = "causal"
NONCAUSAL = "noncausal"

_RECORD_FIELDS = {"id", "text", "ptb", "conllu", "label", "cause_span", "effect_span"}
_REQUIRED_FIELDS = {"id", "text", "ptb", "label"}


class ArtifactError(ValueError):
    """Artifact file violates the line schema."""

    def __init__(self, path, lineno: int | None, message: str):
        location = f"{path}:{lineno}" if lineno is not None else str(path)
        super().__init__(f"{location}: {message}")
        self.path = path
        self.lineno = lineno


@dataclass(frozen=True)
class ArtifactRecord:
    id: str
    text: str
    ptb: str
    conllu: str | None
    label: str
    cause_span: tuple[int, int] | None
    effect_span: tuple[int, int] | None
    sentence: ParsedSentence
    gold: CauseEffectGraph | None
    unprocessable_reason: str | None = None

    @property
    def is_causal(self) -> bool:
        return self.label == CAUSAL

    @property
    def engine_processable(self) -> bool:
        return self.unprocessable_reason is None


@dataclass(frozen=True)
class Artifact:
    name: str
    records: tuple[ArtifactRecord, ...]

    @property
    def n(self) -> int:
        return len(self.records)

    @property
    def n_causal(self) -> int:
        return sum(1 for r in self.records if r.is_causal)

    @property
    def n_unprocessable(self) -> int:
        return sum(1 for r in self.records if not r.engine_processable)


def _span_from_obj(raw, field: str) -> tuple[int, int]:
    if (
        not isinstance(raw, list)
        or len(raw) != 2
        or not all(isinstance(v, int) for v in raw)
    ):
        raise ValueError(f"{field} must be a two-integer [start, end] array")
    return raw[0], raw[1]


def record_from_obj(obj, path="<memory>", lineno: int | None = None) -> ArtifactRecord:
    """Validate and parse one record object. Raises ArtifactError."""

    def fail(message: str):
        raise ArtifactError(path, lineno, message)

    if not isinstance(obj, dict):
        fail("record must be a JSON object")
    unknown = set(obj) - _RECORD_FIELDS
    if unknown:
        fail(f"unknown fields: {sorted(unknown)}")
    missing = _REQUIRED_FIELDS - set(obj)
    if missing:
        fail(f"missing fields: {sorted(missing)}")
    record_id, text, ptb = obj["id"], obj["text"], obj["ptb"]
    if not isinstance(record_id, str) or not record_id:
        fail("id must be a non-empty string")
    if not isinstance(text, str) or not isinstance(ptb, str):
        fail("text and ptb must be strings")
    label = obj["label"]
    if label not in (CAUSAL, NONCAUSAL):
        fail(f"label must be {CAUSAL!r} or {NONCAUSAL!r}, got {label!r}")
    conllu = obj.get("conllu")
    if conllu is not None and not isinstance(conllu, str):
        fail("conllu must be a string or null")

    try:
        parsed = parse_bracketed_tree(ptb, sentence_id=record_id, require_s_root=False)
    except BracketParseError as exc:
        fail(f"ptb parse error: {exc}")
    unprocessable = None
    if parsed.tree.label != "S":
        unprocessable = f"root label {parsed.tree.label!r} is not 'S'"

    if normalize_ws(text) != parsed.text:
        fail(
            f"text does not match the parse tokens: {normalize_ws(text)!r} "
            f"vs {parsed.text!r}"
        )

    deps = None
    if conllu is not None:
        try:
            deps = parse_dependencies(conllu)
        except DependencyParseError as exc:
            fail(f"conllu parse error: {exc}")
        if deps and len(deps) != len(parsed.tokens):
            fail(
                f"conllu rows ({len(deps)}) do not match token count "
                f"({len(parsed.tokens)})"
            )
        if not deps:
            deps = None
    sentence = ParsedSentence(
        id=record_id, text=parsed.text, tokens=parsed.tokens, tree=parsed.tree,
        deps=deps,
    )

    cause_span = effect_span = None
    gold = None
    if label == CAUSAL:
        for span_field in ("cause_span", "effect_span"):
            if obj.get(span_field) is None:
                fail(f"causal record is missing {span_field}")
        try:
            cause_span = _span_from_obj(obj["cause_span"], "cause_span")
            effect_span = _span_from_obj(obj["effect_span"], "effect_span")
            gold = make_ceg(sentence, cause_span, effect_span)
        except ValueError as exc:
            fail(str(exc))
    else:
        for span_field in ("cause_span", "effect_span"):
            if obj.get(span_field) is not None:
                fail(f"non-causal record must not carry {span_field}")

    return ArtifactRecord(
        id=record_id,
        text=text,
        ptb=ptb,
        conllu=conllu,
        label=label,
        cause_span=cause_span,
        effect_span=effect_span,
        sentence=sentence,
        gold=gold,
        unprocessable_reason=unprocessable,
    )


def record_to_obj(record: ArtifactRecord) -> dict:
    obj = {
        "id": record.id,
        "text": record.text,
        "ptb": record.ptb,
        "conllu": record.conllu,
        "label": record.label,
    }
    if record.is_causal:
        obj["cause_span"] = list(record.cause_span)
        obj["effect_span"] = list(record.effect_span)
    return obj


def load_artifact(path, name: str | None = None) -> Artifact:
    """Load one artifact file, validating every record.

    The artifact name defaults to the file stem. Loading is
    order-preserving; duplicate record ids are rejected.
    """
    path = Path(path)
    records: list[ArtifactRecord] = []
    seen: set[str] = set()
    with open(path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ArtifactError(path, lineno, f"invalid JSON: {exc}") from exc
            record = record_from_obj(obj, path=path, lineno=lineno)
            if record.id in seen:
                raise ArtifactError(path, lineno, f"duplicate record id {record.id!r}")
            seen.add(record.id)
            records.append(record)
    return Artifact(name=name or path.stem, records=tuple(records))


def load_corpus(paths) -> list[Artifact]:
    """Load several artifact files, or every *.jsonl in a directory."""
    artifacts: list[Artifact] = []
    for raw in paths:
        path = Path(raw)
        if path.is_dir():
            for child in sorted(path.glob("*.jsonl")):
                artifacts.append(load_artifact(child))
        else:
            artifacts.append(load_artifact(path))
    return artifacts
