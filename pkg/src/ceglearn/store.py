"""Pattern store persistence.

The store document is UTF-8 JSON of the form::

    {
      "version": 1,
      "patterns": [
        {"id": 0,
         "signature": {"nodes": [{"path": [0], "label": "SBAR"}, ...],
                        "constraints": [{"path": [], "keyword": "if"}, ...]},
         "extractor": {"cause": [[0, 1]], "effect": [[2], [3]]},
         "accepted": ["sent-1", ...]},
        ...
      ],
      "noncausal": ["sent-7", ...],
      "next_pattern_id": 1
    }

Unknown fields are rejected. The document carries sentence ids only; the
corpus entries they reference are supplied separately at load time so both
maintenance principles can be re-validated.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Mapping

from .engine import CorpusEntry, EngineState, check_invariants
from .patterns import LexicalConstraint, Pattern, PhraseExtractor, Selector, Signature
from .trees import to_bracketed

STORE_VERSION = 1


class StoreFormatError(ValueError):
    """Document does not match the store schema."""


class StoreVersionError(StoreFormatError):
    """Document carries an unsupported version tag."""


class PrincipleViolationError(ValueError):
    """Loaded document violates the maintenance principles."""

    def __init__(self, problems: list[str]):
        super().__init__("; ".join(problems))
        self.problems = problems


def _check_keys(obj: dict, allowed: set[str], where: str) -> None:
    unknown = set(obj) - allowed
    if unknown:
        raise StoreFormatError(f"unknown fields in {where}: {sorted(unknown)}")
    missing = allowed - set(obj)
    if missing:
        raise StoreFormatError(f"missing fields in {where}: {sorted(missing)}")


def _path_doc(path) -> list[int]:
    return [int(step) for step in path]


def _path_from_doc(raw: Any, where: str) -> tuple[int, ...]:
    if not isinstance(raw, list) or not all(
        isinstance(step, int) and step >= 0 for step in raw
    ):
        raise StoreFormatError(f"{where}: path must be a list of child indices")
    return tuple(raw)


def pattern_to_doc(pattern: Pattern) -> dict:
    return {
        "id": pattern.id,
        "signature": {
            "nodes": [
                {"path": _path_doc(path), "label": label}
                for path, label in pattern.signature.nodes
            ],
            "constraints": [
                {"path": _path_doc(c.path), "keyword": c.keyword}
                for c in pattern.signature.constraints
            ],
        },
        "extractor": {
            "cause": [_path_doc(p) for p in pattern.extractor.cause_selector.paths],
            "effect": [_path_doc(p) for p in pattern.extractor.effect_selector.paths],
        },
        "accepted": list(pattern.accepted),
    }


def save_store(state: EngineState) -> dict:
    """Serialize the pattern store to its document form."""
    return {
        "version": STORE_VERSION,
        "patterns": [pattern_to_doc(p) for p in state.patterns],
        "noncausal": list(state.noncausal),
        "next_pattern_id": state.next_pattern_id,
    }


def _pattern_from_doc(doc: Any, index: int) -> Pattern:
    where = f"patterns[{index}]"
    if not isinstance(doc, dict):
        raise StoreFormatError(f"{where}: expected an object")
    _check_keys(doc, {"id", "signature", "extractor", "accepted"}, where)
    if not isinstance(doc["id"], int):
        raise StoreFormatError(f"{where}: id must be an integer")
    sig_doc = doc["signature"]
    if not isinstance(sig_doc, dict):
        raise StoreFormatError(f"{where}.signature: expected an object")
    _check_keys(sig_doc, {"nodes", "constraints"}, f"{where}.signature")
    nodes = []
    for i, node_doc in enumerate(sig_doc["nodes"]):
        node_where = f"{where}.signature.nodes[{i}]"
        if not isinstance(node_doc, dict):
            raise StoreFormatError(f"{node_where}: expected an object")
        _check_keys(node_doc, {"path", "label"}, node_where)
        if not isinstance(node_doc["label"], str):
            raise StoreFormatError(f"{node_where}: label must be a string")
        nodes.append((_path_from_doc(node_doc["path"], node_where), node_doc["label"]))
    constraints = []
    for i, c_doc in enumerate(sig_doc["constraints"]):
        c_where = f"{where}.signature.constraints[{i}]"
        if not isinstance(c_doc, dict):
            raise StoreFormatError(f"{c_where}: expected an object")
        _check_keys(c_doc, {"path", "keyword"}, c_where)
        if not isinstance(c_doc["keyword"], str):
            raise StoreFormatError(f"{c_where}: keyword must be a string")
        constraints.append(
            LexicalConstraint(_path_from_doc(c_doc["path"], c_where), c_doc["keyword"])
        )
    ext_doc = doc["extractor"]
    if not isinstance(ext_doc, dict):
        raise StoreFormatError(f"{where}.extractor: expected an object")
    _check_keys(ext_doc, {"cause", "effect"}, f"{where}.extractor")
    selectors = {}
    for role in ("cause", "effect"):
        raw_paths = ext_doc[role]
        if not isinstance(raw_paths, list) or not raw_paths:
            raise StoreFormatError(
                f"{where}.extractor.{role}: expected a non-empty list of paths"
            )
        selectors[role] = Selector(
            role,
            tuple(
                _path_from_doc(p, f"{where}.extractor.{role}[{i}]")
                for i, p in enumerate(raw_paths)
            ),
        )
    accepted = doc["accepted"]
    if not isinstance(accepted, list) or not all(
        isinstance(sid, str) for sid in accepted
    ):
        raise StoreFormatError(f"{where}.accepted: expected a list of sentence ids")
    try:
        return Pattern(
            id=doc["id"],
            signature=Signature(tuple(nodes), tuple(constraints)),
            extractor=PhraseExtractor(selectors["cause"], selectors["effect"]),
            accepted=tuple(accepted),
        )
    except ValueError as exc:
        raise StoreFormatError(f"{where}: {exc}") from exc


def load_store(document: Any, corpus: Mapping[str, CorpusEntry]) -> EngineState:
    """Rebuild an EngineState from a store document.

    ``corpus`` must resolve every sentence id the document references. Both
    maintenance principles are re-validated; documents violating them are
    rejected with PrincipleViolationError.
    """
    if not isinstance(document, dict):
        raise StoreFormatError("store document must be a JSON object")
    _check_keys(
        document, {"version", "patterns", "noncausal", "next_pattern_id"}, "store"
    )
    if document["version"] != STORE_VERSION:
        raise StoreVersionError(
            f"unsupported store version {document['version']!r}; "
            f"expected {STORE_VERSION}"
        )
    if not isinstance(document["patterns"], list):
        raise StoreFormatError("patterns must be a list")
    patterns = [
        _pattern_from_doc(doc, i) for i, doc in enumerate(document["patterns"])
    ]
    noncausal = document["noncausal"]
    if not isinstance(noncausal, list) or not all(
        isinstance(sid, str) for sid in noncausal
    ):
        raise StoreFormatError("noncausal must be a list of sentence ids")
    if not isinstance(document["next_pattern_id"], int):
        raise StoreFormatError("next_pattern_id must be an integer")

    referenced = {sid for p in patterns for sid in p.accepted} | set(noncausal)
    missing = sorted(sid for sid in referenced if sid not in corpus)
    if missing:
        raise StoreFormatError(f"corpus does not resolve sentence ids: {missing}")

    state = EngineState(
        patterns=patterns,
        noncausal=list(noncausal),
        corpus={sid: corpus[sid] for sid in sorted(referenced)},
        next_pattern_id=document["next_pattern_id"],
    )
    problems = check_invariants(state)
    if problems:
        raise PrincipleViolationError(problems)
    return state


# ---------------------------------------------------------------------------
# File persistence: the store document plus a corpus sidecar holding the
# referenced sentences in the artifact line schema.
# ---------------------------------------------------------------------------


def corpus_sidecar_path(store_path) -> Path:
    return Path(store_path).with_suffix(".corpus.jsonl")


def _deps_to_conllu(entry: CorpusEntry) -> str | None:
    sentence = entry.sentence
    if sentence.deps is None:
        return None
    by_dependent = {edge.dependent: edge for edge in sentence.deps}
    rows = []
    for token in sentence.tokens:
        edge = by_dependent[token.index]
        head = 0 if edge.head is None else edge.head + 1
        rows.append(
            "\t".join(
                [
                    str(token.index + 1), token.text, "_", "_", token.pos,
                    "_", str(head), edge.relation, "_", "_",
                ]
            )
        )
    return "\n".join(rows)


def entry_to_record_obj(entry: CorpusEntry) -> dict:
    obj = {
        "id": entry.sentence.id,
        "text": entry.sentence.text,
        "ptb": to_bracketed(entry.sentence),
        "conllu": _deps_to_conllu(entry),
        "label": "causal" if entry.gold is not None else "noncausal",
    }
    if entry.gold is not None:
        obj["cause_span"] = [entry.gold.cause.start, entry.gold.cause.end]
        obj["effect_span"] = [entry.gold.effect.start, entry.gold.effect.end]
    return obj


def write_store_files(state: EngineState, store_path) -> None:
    """Write the store document and its corpus sidecar."""
    store_path = Path(store_path)
    store_path.parent.mkdir(parents=True, exist_ok=True)
    with open(store_path, "w", encoding="utf-8") as handle:
        json.dump(save_store(state), handle, indent=2)
        handle.write("\n")
    with open(corpus_sidecar_path(store_path), "w", encoding="utf-8") as handle:
        for sid in sorted(state.corpus):
            handle.write(json.dumps(entry_to_record_obj(state.corpus[sid])) + "\n")


def read_store_files(store_path) -> EngineState:
    """Load a store document together with its corpus sidecar."""
    from .corpus import record_from_obj

    store_path = Path(store_path)
    corpus: dict[str, CorpusEntry] = {}
    sidecar = corpus_sidecar_path(store_path)
    if sidecar.exists():
        with open(sidecar, encoding="utf-8") as handle:
            for lineno, line in enumerate(handle, start=1):
                if not line.strip():
                    continue
                record = record_from_obj(json.loads(line), path=sidecar, lineno=lineno)
                corpus[record.id] = CorpusEntry(record.sentence, record.gold)
    with open(store_path, encoding="utf-8") as handle:
        document = json.load(handle)
    return load_store(document, corpus)
