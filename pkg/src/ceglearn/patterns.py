"""Cause-effect graphs, phrase extractors, signatures and patterns.

A pattern couples a signature (the compliance gatekeeper: a partial
constituency tree with lexical constraints) with a phrase extractor
(role-tagged tree paths whose yields rebuild the cause and effect phrases)
and the ids of the sentences it has accepted.
"""

from __future__ import annotations

from dataclasses import dataclass

from .trees import (
    ParsedSentence,
    TreePath,
    detokenize,
    node_at,
)

ROOT_LABEL = "S"


@dataclass(frozen=True)
class Phrase:
    """A phrase string tied to its token span (start, end exclusive)."""

    text: str
    start: int
    end: int

    def __post_init__(self):
        if self.start < 0 or self.end <= self.start:
            raise ValueError(f"span ({self.start}, {self.end}) must be non-empty")


@dataclass(frozen=True)
class CauseEffectGraph:
    cause: Phrase
    effect: Phrase

    def __post_init__(self):
        c, e = self.cause, self.effect
        if c.start < e.end and e.start < c.end:
            raise ValueError("cause and effect spans must not overlap")


def make_ceg(
    sentence: ParsedSentence,
    cause_span: tuple[int, int],
    effect_span: tuple[int, int],
) -> CauseEffectGraph:
    """Build a CEG from token spans, deriving phrases per the
    detokenization convention. Raises ValueError on invalid spans."""
    return CauseEffectGraph(
        cause=_phrase_for_span(sentence, cause_span),
        effect=_phrase_for_span(sentence, effect_span),
    )


def _phrase_for_span(sentence: ParsedSentence, span: tuple[int, int]) -> Phrase:
    start, end = span
    if not (0 <= start < end <= len(sentence.tokens)):
        raise ValueError(
            f"span ({start}, {end}) out of bounds for a "
            f"{len(sentence.tokens)}-token sentence"
        )
    text = detokenize([t.text for t in sentence.tokens[start:end]])
    return Phrase(text=text, start=start, end=end)


def validate_ceg(ceg: CauseEffectGraph, sentence: ParsedSentence) -> None:
    """Check a CEG against its sentence: spans in bounds, phrases match."""
    for role, phrase in (("cause", ceg.cause), ("effect", ceg.effect)):
        expected = _phrase_for_span(sentence, (phrase.start, phrase.end))
        if phrase.text != expected.text:
            raise ValueError(
                f"{role} phrase {phrase.text!r} does not match its span "
                f"({phrase.start}, {phrase.end}) -> {expected.text!r}"
            )


@dataclass(frozen=True)
class Selector:
    """Ordered tree paths whose combined yields form one role's phrase."""

    role: str
    paths: tuple[TreePath, ...]

    def __post_init__(self):
        if self.role not in ("cause", "effect"):
            raise ValueError(f"selector role must be cause/effect, got {self.role!r}")
        if not self.paths:
            raise ValueError("selector must address at least one node")
        object.__setattr__(
            self, "paths", tuple(sorted(tuple(p) for p in self.paths))
        )


@dataclass(frozen=True)
class PhraseExtractor:
    cause_selector: Selector
    effect_selector: Selector

    def __post_init__(self):
        if self.cause_selector.role != "cause" or self.effect_selector.role != "effect":
            raise ValueError("extractor selectors must carry their proper roles")


@dataclass(frozen=True)
class LexicalConstraint:
    """Requires a keyword among the leaf tokens under a signature node."""

    path: TreePath
    keyword: str

    def __post_init__(self):
        object.__setattr__(self, "path", tuple(self.path))
        if not self.keyword:
            raise ValueError("constraint keyword must be non-empty")
        object.__setattr__(self, "keyword", self.keyword.lower())


@dataclass(frozen=True)
class Signature:
    """Partial constituency tree: labels at child-index paths, plus
    lexical constraints. The root is always present with label S."""

    nodes: tuple[tuple[TreePath, str], ...] = (((), ROOT_LABEL),)
    constraints: tuple[LexicalConstraint, ...] = ()

    def __post_init__(self):
        normalized = sorted((tuple(path), label) for path, label in self.nodes)
        object.__setattr__(self, "nodes", tuple(normalized))
        object.__setattr__(self, "constraints", tuple(sorted(
            self.constraints, key=lambda c: (c.path, c.keyword)
        )))
        paths = [path for path, _ in self.nodes]
        if len(set(paths)) != len(paths):
            raise ValueError("signature holds duplicate node paths")
        present = set(paths)
        if () not in present:
            raise ValueError("signature root is missing")
        if self.label_at(()) != ROOT_LABEL:
            raise ValueError(f"signature root label must be {ROOT_LABEL!r}")
        for path in present:
            if path and path[:-1] not in present:
                raise ValueError(f"signature node {path} has no parent node")
        for constraint in self.constraints:
            if constraint.path not in present:
                raise ValueError(
                    f"constraint path {constraint.path} addresses no signature node"
                )

    @classmethod
    def root(cls) -> "Signature":
        return cls()

    def label_at(self, path: TreePath) -> str | None:
        for p, label in self.nodes:
            if p == path:
                return label
        return None

    def node_paths(self) -> tuple[TreePath, ...]:
        return tuple(path for path, _ in self.nodes)

    @property
    def size(self) -> int:
        """Node count plus constraint count; the specificity measure."""
        return len(self.nodes) + len(self.constraints)

    def with_node(self, path: TreePath, label: str) -> "Signature":
        return Signature(self.nodes + ((tuple(path), label),), self.constraints)

    def with_constraint(self, constraint: LexicalConstraint) -> "Signature":
        return Signature(self.nodes, self.constraints + (constraint,))


@dataclass(frozen=True)
class Pattern:
    id: int
    signature: Signature
    extractor: PhraseExtractor
    accepted: tuple[str, ...] = ()

    def __post_init__(self):
        if len(set(self.accepted)) != len(self.accepted):
            raise ValueError("accepted sentence ids must be unique")


def is_compliant(signature: Signature, sentence: ParsedSentence) -> bool:
    """Positional embedding check.

    True iff every signature node maps to a sentence node at the same path
    with an equal label, and every lexical constraint finds its keyword
    (case-insensitively) among the leaf tokens under the constrained node.
    """
    for path, label in signature.nodes:
        node = node_at(sentence.tree, path)
        if node is None or node.label != label:
            return False
    for constraint in signature.constraints:
        node = node_at(sentence.tree, constraint.path)
        if node is None:
            return False
        if not any(
            sentence.tokens[i].text.lower() == constraint.keyword
            for i in node.leaf_indices()
        ):
            return False
    return True


class ExtractionFailure(Exception):
    """Extractor could not produce a valid CEG on this sentence.

    kind is one of absent-path, overlapping-roles, overlapping-paths,
    discontiguous-yield.
    """

    def __init__(self, kind: str, detail: str):
        super().__init__(f"{kind}: {detail}")
        self.kind = kind
        self.detail = detail


class GenerationFailure(Exception):
    """No constituent cover reproduces the requested span exactly."""

    def __init__(self, role: str, position: int, detail: str):
        super().__init__(f"{role} span at token {position}: {detail}")
        self.role = role
        self.position = position


def _resolve_role(selector: Selector, sentence: ParsedSentence) -> tuple[int, int]:
    """Resolve a selector to the contiguous token range it covers."""
    segments: list[tuple[int, int]] = []
    for path in selector.paths:
        node = node_at(sentence.tree, path)
        if node is None:
            raise ExtractionFailure(
                "absent-path", f"{selector.role} path {list(path)} addresses no node"
            )
        segments.append(node.token_span())
    segments.sort()
    for (_, prev_end), (start, _) in zip(segments, segments[1:]):
        if start < prev_end:
            raise ExtractionFailure(
                "overlapping-paths",
                f"{selector.role} selector paths cover overlapping tokens",
            )
        if start > prev_end:
            raise ExtractionFailure(
                "discontiguous-yield",
                f"{selector.role} selector yields leave a gap at token {prev_end}",
            )
    return segments[0][0], segments[-1][1]


def apply_extractor(
    extractor: PhraseExtractor, sentence: ParsedSentence
) -> CauseEffectGraph:
    """Rebuild the cause and effect phrases a pattern's extractor selects.

    Raises ExtractionFailure when a path is absent, when the two roles
    cover overlapping tokens, or when one role's yields are not contiguous
    (a CEG span is a single token range).
    """
    cause_span = _resolve_role(extractor.cause_selector, sentence)
    effect_span = _resolve_role(extractor.effect_selector, sentence)
    if cause_span[0] < effect_span[1] and effect_span[0] < cause_span[1]:
        raise ExtractionFailure(
            "overlapping-roles",
            f"cause tokens {cause_span} overlap effect tokens {effect_span}",
        )
    return make_ceg(sentence, cause_span, effect_span)


def _cover_span(
    sentence: ParsedSentence, span: tuple[int, int], role: str
) -> tuple[TreePath, ...]:
    """Greedy left-to-right cover of a token span by constituent nodes.

    At each uncovered position the highest (closest to root) internal node
    whose yield starts there and stays inside the span is selected. Word
    (leaf) nodes are not selectable: an extractor addresses constituents
    and combines the word nodes below them.
    """
    start, end = span
    paths: list[TreePath] = []
    pos = start
    while pos < end:
        chosen: TreePath | None = None
        advance = pos
        node = sentence.tree
        path: TreePath = ()
        while True:
            if node.is_leaf:
                break
            node_start, node_end = node.token_span()
            if node_start == pos and node_end <= end:
                chosen = path
                advance = node_end
                break
            descended = False
            for i, child in enumerate(node.children):
                child_start, child_end = child.token_span()
                if child_start <= pos < child_end:
                    node = child
                    path = path + (i,)
                    descended = True
                    break
            if not descended:
                break
        if chosen is None:
            raise GenerationFailure(
                role, pos, "no constituent starts here within the span"
            )
        paths.append(chosen)
        pos = advance
    return tuple(paths)


def generate_extractor(
    sentence: ParsedSentence, gold: CauseEffectGraph
) -> PhraseExtractor:
    """Build the extractor that reproduces ``gold`` on ``sentence``.

    For each role the minimal left-to-right set of highest constituent
    nodes partitioning the gold span exactly is selected. The result
    round-trips: apply_extractor(result, sentence) == gold.
    """
    validate_ceg(gold, sentence)
    cause_paths = _cover_span(sentence, (gold.cause.start, gold.cause.end), "cause")
    effect_paths = _cover_span(sentence, (gold.effect.start, gold.effect.end), "effect")
    return PhraseExtractor(
        cause_selector=Selector("cause", cause_paths),
        effect_selector=Selector("effect", effect_paths),
    )


def is_applicable(
    pattern: Pattern, sentence: ParsedSentence, gold: CauseEffectGraph
) -> bool:
    """True iff the pattern's extractor reproduces the gold phrases.

    Phrase comparison is case-sensitive exact string equality under the
    detokenization convention.
    """
    try:
        ceg = apply_extractor(pattern.extractor, sentence)
    except ExtractionFailure:
        return False
    return (
        ceg.cause.text == gold.cause.text and ceg.effect.text == gold.effect.text
    )
