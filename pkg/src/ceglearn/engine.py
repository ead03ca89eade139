"""Cause-effect recognition engine: pattern store, training, specification.

The engine upholds two maintenance principles over its stored corpus:

1. every sentence accepted by a pattern is applicable by that pattern's
   extractor, and
2. no sentence recorded as non-causal is compliant with any pattern.

Training operations are transactional: on any failure outcome the state is
rolled back to the snapshot taken on entry, except for non-causal
specification failures, which leave the patterns in a best-effort specified
state and record a standing violation (the non-causal knowledge is kept
even when no signature can encode it). Training mutates state and must be
externally serialized; reads are side-effect free.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .patterns import (
    CauseEffectGraph,
    ExtractionFailure,
    GenerationFailure,
    LexicalConstraint,
    Pattern,
    Signature,
    apply_extractor,
    generate_extractor,
    is_applicable,
    is_compliant,
    validate_ceg,
)
from .trees import ParsedSentence, TreePath, node_at, walk_paths

logger = logging.getLogger(__name__)

ROOT_LABEL = "S"


class TrainOutcome(enum.Enum):
    ALREADY_COVERED = "already-covered"
    CREATED = "created"
    SPECIFIED_AND_CREATED = "specified-and-created"
    CREATION_FAILED = "creation-failed"
    SPECIFICATION_FAILED = "specification-failed"
    DISCARDED = "discarded"
    SPECIFIED = "specified"


@dataclass(frozen=True)
class CorpusEntry:
    sentence: ParsedSentence
    gold: CauseEffectGraph | None


@dataclass(frozen=True)
class Violation:
    """A logged, standing principle-2 conflict: a stored non-causal
    sentence that no specification could exclude from these patterns."""

    sentence_id: str
    pattern_ids: tuple[int, ...]
    note: str


@dataclass(frozen=True)
class DetectionResult:
    matched_pattern_id: int | None = None
    ceg: CauseEffectGraph | None = None
    failure: str | None = None

    def __post_init__(self):
        if self.ceg is not None and self.matched_pattern_id is None:
            raise ValueError("a CEG requires a matching pattern id")


@dataclass(frozen=True)
class SpecOutcome:
    success: bool
    added_nodes: tuple[tuple[TreePath, str], ...] = ()
    added_constraints: tuple[LexicalConstraint, ...] = ()

    def __post_init__(self):
        if self.success and not (self.added_nodes or self.added_constraints):
            raise ValueError("successful specification must add something")


@dataclass
class EngineState:
    patterns: list[Pattern] = field(default_factory=list)
    noncausal: list[str] = field(default_factory=list)
    corpus: dict[str, CorpusEntry] = field(default_factory=dict)
    next_pattern_id: int = 0
    violations: list[Violation] = field(default_factory=list)

    @classmethod
    def empty(cls) -> "EngineState":
        return cls()

    def pattern_by_id(self, pattern_id: int) -> Pattern | None:
        for pattern in self.patterns:
            if pattern.id == pattern_id:
                return pattern
        return None


class CreationFailure(Exception):
    """Pattern creation failed: specification against a stored non-causal
    sentence found no differentiator, or extractor generation failed."""

    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


def _snapshot(state: EngineState):
    # All contained values are immutable; shallow copies suffice.
    return (
        list(state.patterns),
        list(state.noncausal),
        dict(state.corpus),
        state.next_pattern_id,
        list(state.violations),
    )


def _restore(state: EngineState, snap) -> None:
    state.patterns, state.noncausal, state.corpus, state.next_pattern_id, \
        state.violations = snap


def _require_engine_sentence(sentence: ParsedSentence) -> None:
    if sentence.tree.label != ROOT_LABEL:
        raise ValueError(
            f"engine only processes sentences rooted in {ROOT_LABEL!r}; "
            f"got {sentence.tree.label!r} ({sentence.id})"
        )


def _check_entry_conflict(state: EngineState, entry: CorpusEntry) -> None:
    existing = state.corpus.get(entry.sentence.id)
    if existing is not None and existing != entry:
        raise ValueError(
            f"sentence id {entry.sentence.id!r} already stored with "
            "different content"
        )


def _record_entry(state: EngineState, entry: CorpusEntry) -> None:
    _check_entry_conflict(state, entry)
    state.corpus[entry.sentence.id] = entry


def compliant_patterns(state: EngineState, sentence: ParsedSentence) -> list[Pattern]:
    return [p for p in state.patterns if is_compliant(p.signature, sentence)]


def _select_pattern(candidates: Sequence[Pattern]) -> Pattern:
    # Most specific signature wins; ties go to the oldest pattern.
    return min(candidates, key=lambda p: (-p.signature.size, p.id))


def detect(state: EngineState, sentence: ParsedSentence) -> DetectionResult:
    """Test a sentence against the pattern store (read-only).

    Among compliant patterns the most specific one (largest node plus
    constraint count, ties broken by lowest id) supplies the extractor.
    """
    _require_engine_sentence(sentence)
    candidates = compliant_patterns(state, sentence)
    if not candidates:
        return DetectionResult()
    pattern = _select_pattern(candidates)
    try:
        ceg = apply_extractor(pattern.extractor, sentence)
    except ExtractionFailure as exc:
        return DetectionResult(matched_pattern_id=pattern.id, failure=str(exc))
    return DetectionResult(matched_pattern_id=pattern.id, ceg=ceg)


# ---------------------------------------------------------------------------
# Signature specification
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class _Candidate:
    """One differentiating specification: either a lexical constraint or a
    chain of node additions ending in a differentiator. Ordered by
    precision: fewest additions, constraints before node additions,
    shallowest then leftmost differentiator path, then keyword."""

    cost: int
    kind: int  # 0 = constraint, 1 = node addition
    path: TreePath
    keyword: str = ""
    node_additions: tuple[tuple[TreePath, str], ...] = ()
    constraint: LexicalConstraint | None = None

    def sort_key(self):
        return (self.cost, self.kind, len(self.path), self.path, self.keyword)


def _position_labels(sentence: ParsedSentence) -> dict[TreePath, str]:
    return {path: node.label for path, node in walk_paths(sentence.tree)}


def _common_positions(accepted: Sequence[ParsedSentence]) -> dict[TreePath, str]:
    """Tree positions where every accepted sentence has the same label."""
    maps = [_position_labels(s) for s in accepted]
    first = maps[0]
    return {
        path: label
        for path, label in first.items()
        if all(m.get(path) == label for m in maps[1:])
    }


def _leaf_words_under(sentence: ParsedSentence, path: TreePath) -> set[str]:
    node = node_at(sentence.tree, path)
    if node is None:
        return set()
    return {sentence.tokens[i].text.lower() for i in node.leaf_indices()}


def _candidates(
    signature: Signature,
    accepted: Sequence[ParsedSentence],
    intruder: ParsedSentence,
) -> list[_Candidate]:
    out: list[_Candidate] = []
    common = _common_positions(accepted)
    intruder_labels = _position_labels(intruder)
    present = set(signature.node_paths())

    for path in sorted(common):
        if path in present:
            continue
        if intruder_labels.get(path) == common[path]:
            continue
        # The whole missing ancestor chain must be addable, i.e. shared by
        # every accepted sentence, to keep the signature path-closed.
        additions: list[tuple[TreePath, str]] = []
        addable = True
        for depth in range(len(path)):
            prefix = path[:depth]
            if prefix in present:
                continue
            if prefix not in common:
                addable = False
                break
            additions.append((prefix, common[prefix]))
        if not addable:
            continue
        additions.append((path, common[path]))
        out.append(
            _Candidate(
                cost=len(additions),
                kind=1,
                path=path,
                node_additions=tuple(additions),
            )
        )

    for path in sorted(present):
        shared = None
        for sent in accepted:
            words = _leaf_words_under(sent, path)
            shared = words if shared is None else shared & words
            if not shared:
                break
        if not shared:
            continue
        existing = {c.keyword for c in signature.constraints if c.path == path}
        for keyword in sorted(shared - _leaf_words_under(intruder, path) - existing):
            out.append(
                _Candidate(
                    cost=1,
                    kind=0,
                    path=path,
                    keyword=keyword,
                    constraint=LexicalConstraint(path, keyword),
                )
            )
    return out


@dataclass(frozen=True)
class _SpecResult:
    signature: Signature
    added_nodes: tuple[tuple[TreePath, str], ...]
    added_constraints: tuple[LexicalConstraint, ...]


def specify_signature(
    signature: Signature,
    accepted: Sequence[ParsedSentence],
    intruder: ParsedSentence,
) -> _SpecResult | None:
    """Grow a signature minimally until the intruder is non-compliant.

    Every accepted sentence stays compliant by construction (additions are
    drawn from positions and keywords all accepted sentences share). None
    when no differentiating addition exists.
    """
    if not accepted:
        raise ValueError("specification requires at least one accepted sentence")
    added_nodes: list[tuple[TreePath, str]] = []
    added_constraints: list[LexicalConstraint] = []
    current = signature
    while is_compliant(current, intruder):
        candidates = _candidates(current, accepted, intruder)
        if not candidates:
            return None
        best = min(candidates, key=_Candidate.sort_key)
        if best.kind == 0:
            current = current.with_constraint(best.constraint)
            added_constraints.append(best.constraint)
        else:
            for path, label in best.node_additions:
                current = current.with_node(path, label)
                added_nodes.append((path, label))
    return _SpecResult(current, tuple(added_nodes), tuple(added_constraints))


def _accepted_sentences(state: EngineState, pattern: Pattern) -> list[ParsedSentence]:
    return [state.corpus[sid].sentence for sid in pattern.accepted]


def _replace_pattern(state: EngineState, updated: Pattern) -> None:
    for i, pattern in enumerate(state.patterns):
        if pattern.id == updated.id:
            state.patterns[i] = updated
            return
    raise KeyError(updated.id)


def specify(
    state: EngineState, pattern_id: int, intruder: ParsedSentence
) -> SpecOutcome:
    """Specify one pattern's signature against a compliant intruder.

    The intruder must currently be compliant (anything else is a caller
    bug). On failure the state is untouched.
    """
    pattern = state.pattern_by_id(pattern_id)
    if pattern is None:
        raise KeyError(f"no pattern with id {pattern_id}")
    if not is_compliant(pattern.signature, intruder):
        raise ValueError(
            f"intruder {intruder.id!r} is not compliant with pattern "
            f"{pattern_id}; nothing to specify"
        )
    result = specify_signature(
        pattern.signature, _accepted_sentences(state, pattern), intruder
    )
    if result is None:
        return SpecOutcome(success=False)
    _replace_pattern(
        state,
        Pattern(pattern.id, result.signature, pattern.extractor, pattern.accepted),
    )
    return SpecOutcome(
        success=True,
        added_nodes=result.added_nodes,
        added_constraints=result.added_constraints,
    )


# ---------------------------------------------------------------------------
# Training
# ---------------------------------------------------------------------------


def _build_pattern(
    state: EngineState,
    sentence: ParsedSentence,
    gold: CauseEffectGraph,
    extra_intruders: Iterable[ParsedSentence] = (),
) -> Pattern:
    """Assemble a new pattern without registering it.

    The root-only signature is specified against every stored non-causal
    sentence (oldest first), then against the given extra intruders, until
    none is compliant. Raises CreationFailure when a specification finds no
    differentiator or extractor generation fails.
    """
    signature = Signature.root()
    intruders = [state.corpus[nid].sentence for nid in state.noncausal]
    intruders.extend(extra_intruders)
    for intruder in intruders:
        if not is_compliant(signature, intruder):
            continue
        result = specify_signature(signature, [sentence], intruder)
        if result is None:
            raise CreationFailure(
                f"no specification differentiates {sentence.id!r} from "
                f"{intruder.id!r}"
            )
        signature = result.signature
    try:
        extractor = generate_extractor(sentence, gold)
    except GenerationFailure as exc:
        raise CreationFailure(f"extractor generation failed: {exc}") from exc
    return Pattern(
        id=state.next_pattern_id,
        signature=signature,
        extractor=extractor,
        accepted=(sentence.id,),
    )


def _register(state: EngineState, pattern: Pattern, entry: CorpusEntry) -> None:
    _record_entry(state, entry)
    state.patterns.append(pattern)
    state.next_pattern_id = pattern.id + 1


def create_pattern(
    state: EngineState, sentence: ParsedSentence, gold: CauseEffectGraph
) -> Pattern:
    """Create and register a pattern for a sentence no pattern covers.

    Raises ValueError when some pattern is already compliant (callers must
    route those sentences through train_causal), CreationFailure when the
    pattern cannot be built; the state is unchanged on failure.
    """
    _require_engine_sentence(sentence)
    validate_ceg(gold, sentence)
    if compliant_patterns(state, sentence):
        raise ValueError(
            f"a pattern is already compliant with {sentence.id!r}; "
            "use train_causal"
        )
    pattern = _build_pattern(state, sentence, gold)
    _register(state, pattern, CorpusEntry(sentence, gold))
    return pattern


def train_causal(
    state: EngineState, sentence: ParsedSentence, gold: CauseEffectGraph
) -> TrainOutcome:
    """Train one causal sentence with its desired cause-effect graph.

    Outcomes: already-covered (a compliant pattern already extracts the
    gold), created (a fresh pattern), specified-and-created (the sentence
    intruded on a pattern: that pattern was specified against it and a new
    pattern was created), creation-failed, specification-failed. Failures
    roll the state back.
    """
    _require_engine_sentence(sentence)
    validate_ceg(gold, sentence)
    entry = CorpusEntry(sentence, gold)
    _check_entry_conflict(state, entry)
    snap = _snapshot(state)
    candidates = compliant_patterns(state, sentence)

    if not candidates:
        try:
            pattern = _build_pattern(state, sentence, gold)
        except CreationFailure:
            return TrainOutcome.CREATION_FAILED
        _register(state, pattern, entry)
        return TrainOutcome.CREATED

    pattern = _select_pattern(candidates)
    if is_applicable(pattern, sentence, gold):
        _record_entry(state, entry)
        if sentence.id not in pattern.accepted:
            _replace_pattern(
                state,
                Pattern(
                    pattern.id,
                    pattern.signature,
                    pattern.extractor,
                    pattern.accepted + (sentence.id,),
                ),
            )
        return TrainOutcome.ALREADY_COVERED

    # Causal intruder: the sentence matches the signature but the extractor
    # does not reproduce its gold. Specify the pattern against it, then give
    # the intruder a pattern of its own, specified against the original
    # pattern's accepted sentences as well.
    spec = specify_signature(
        pattern.signature, _accepted_sentences(state, pattern), sentence
    )
    if spec is None:
        return TrainOutcome.SPECIFICATION_FAILED
    _replace_pattern(
        state, Pattern(pattern.id, spec.signature, pattern.extractor, pattern.accepted)
    )
    try:
        new_pattern = _build_pattern(
            state,
            sentence,
            gold,
            extra_intruders=_accepted_sentences(state, pattern),
        )
    except CreationFailure:
        _restore(state, snap)
        return TrainOutcome.SPECIFICATION_FAILED
    _register(state, new_pattern, entry)
    return TrainOutcome.SPECIFIED_AND_CREATED


def train_noncausal(state: EngineState, sentence: ParsedSentence) -> TrainOutcome:
    """Train one non-causal sentence.

    Every compliant pattern is specified against it (principle 2 is
    universal over patterns). The sentence is recorded as non-causal even
    when some specification fails; such conflicts are logged as standing
    violations and reported as specification-failed.
    """
    _require_engine_sentence(sentence)
    entry = CorpusEntry(sentence, None)
    _record_entry(state, entry)
    candidates = compliant_patterns(state, sentence)
    if not candidates:
        if sentence.id not in state.noncausal:
            state.noncausal.append(sentence.id)
        return TrainOutcome.DISCARDED

    failed: list[int] = []
    for pattern in candidates:
        result = specify_signature(
            pattern.signature, _accepted_sentences(state, pattern), sentence
        )
        if result is None:
            failed.append(pattern.id)
            continue
        _replace_pattern(
            state,
            Pattern(pattern.id, result.signature, pattern.extractor, pattern.accepted),
        )
    if sentence.id not in state.noncausal:
        state.noncausal.append(sentence.id)
    if failed:
        violation = Violation(
            sentence_id=sentence.id,
            pattern_ids=tuple(failed),
            note="no differentiator for non-causal intruder",
        )
        state.violations.append(violation)
        logger.warning(
            "standing principle-2 violation: non-causal %r remains compliant "
            "with patterns %s",
            sentence.id,
            failed,
        )
        return TrainOutcome.SPECIFICATION_FAILED
    return TrainOutcome.SPECIFIED


def check_invariants(state: EngineState) -> list[str]:
    """Exhaustively verify both maintenance principles over the stored
    corpus. Returns a list of problems; logged standing violations are
    exempt from principle 2."""
    problems: list[str] = []
    exempt = {
        (v.sentence_id, pid) for v in state.violations for pid in v.pattern_ids
    }
    seen_ids: set[int] = set()
    for pattern in state.patterns:
        if pattern.id in seen_ids:
            problems.append(f"duplicate pattern id {pattern.id}")
        seen_ids.add(pattern.id)
        if pattern.id >= state.next_pattern_id:
            problems.append(
                f"pattern id {pattern.id} not below next_pattern_id "
                f"{state.next_pattern_id}"
            )
        for sid in pattern.accepted:
            entry = state.corpus.get(sid)
            if entry is None:
                problems.append(
                    f"pattern {pattern.id} accepts unknown sentence {sid!r}"
                )
                continue
            if not is_compliant(pattern.signature, entry.sentence):
                problems.append(
                    f"accepted sentence {sid!r} is not compliant with "
                    f"pattern {pattern.id}"
                )
            if entry.gold is None:
                problems.append(f"accepted sentence {sid!r} has no gold CEG")
            elif not is_applicable(pattern, entry.sentence, entry.gold):
                problems.append(
                    f"accepted sentence {sid!r} is not applicable by "
                    f"pattern {pattern.id} (principle 1)"
                )
    for sid in state.noncausal:
        entry = state.corpus.get(sid)
        if entry is None:
            problems.append(f"non-causal list references unknown sentence {sid!r}")
            continue
        for pattern in state.patterns:
            if (sid, pattern.id) in exempt:
                continue
            if is_compliant(pattern.signature, entry.sentence):
                problems.append(
                    f"non-causal sentence {sid!r} is compliant with "
                    f"pattern {pattern.id} (principle 2)"
                )
    return problems
