"""Sentence representation: tokens, constituency trees, tree paths.

Sentences enter the engine pre-parsed, as Penn-Treebank-style bracketings
plus optional CoNLL-U dependency rows. Everything in this module is an
immutable value; the functions are pure and safe to share across threads.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

TreePath = tuple[int, ...]

# Punctuation tokens that attach to the preceding token when rebuilding
# surface text, and the opening bracket that swallows the following space.
_ATTACH_LEFT = frozenset({",", ".", ";", ":", "!", "?", ")"})
_OPEN_PAREN = "("


def normalize_ws(text: str) -> str:
    """Collapse all whitespace runs to single spaces and strip the ends."""
    return " ".join(text.split())


def detokenize(texts: list[str] | tuple[str, ...]) -> str:
    """Rebuild surface text from tokens.

    Tokens are joined by single spaces, except that , . ; : ! ? ) attach to
    the previous token and ( attaches to the next one. Phrase comparisons
    throughout the package happen on strings produced by this convention.
    """
    groups: list[str] = []
    after_open = False
    for text in texts:
        if groups and (text in _ATTACH_LEFT or after_open):
            groups[-1] += text
        else:
            groups.append(text)
        after_open = text == _OPEN_PAREN
    return " ".join(groups)


class BracketParseError(ValueError):
    """Malformed bracketed parse. Carries the byte offset of the defect."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (byte offset {offset})")
        self.offset = offset


class RootLabelError(BracketParseError):
    """Well-formed parse whose root is not an S node."""


class DependencyParseError(ValueError):
    """Malformed CoNLL-U dependency block."""


@dataclass(frozen=True)
class Token:
    index: int
    text: str
    pos: str

    def __post_init__(self):
        if not self.text:
            raise ValueError("token text must be non-empty")


@dataclass(frozen=True)
class ConstituencyNode:
    """One node of a constituency tree.

    Leaves carry a token index and a part-of-speech label; internal nodes
    carry a constituent label and at least one child.
    """

    label: str
    children: tuple[ConstituencyNode, ...] = ()
    token_index: int | None = None

    def __post_init__(self):
        if not self.label:
            raise ValueError("node label must be non-empty")
        if (self.token_index is None) == (len(self.children) == 0):
            raise ValueError(
                "a node must either carry a token index (leaf) or children"
            )

    @property
    def is_leaf(self) -> bool:
        return self.token_index is not None

    def leaf_indices(self) -> tuple[int, ...]:
        """Token indices of all leaf descendants, left to right."""
        if self.is_leaf:
            return (self.token_index,)
        out: list[int] = []
        stack = list(reversed(self.children))
        while stack:
            node = stack.pop()
            if node.is_leaf:
                out.append(node.token_index)
            else:
                stack.extend(reversed(node.children))
        return tuple(out)

    def token_span(self) -> tuple[int, int]:
        """(start, end-exclusive) token range covered by this node."""
        indices = self.leaf_indices()
        return indices[0], indices[-1] + 1


@dataclass(frozen=True)
class DependencyEdge:
    """head is a token index, or None for the artificial root."""

    head: int | None
    dependent: int
    relation: str


@dataclass(frozen=True)
class ParsedSentence:
    id: str
    text: str
    tokens: tuple[Token, ...]
    tree: ConstituencyNode
    deps: tuple[DependencyEdge, ...] | None = None

    def __post_init__(self):
        if not self.id:
            raise ValueError("sentence id must be non-empty")
        for i, token in enumerate(self.tokens):
            if token.index != i:
                raise ValueError(
                    f"token indices must run 0..{len(self.tokens) - 1} "
                    f"without gaps; found {token.index} at position {i}"
                )
        leaves = self.tree.leaf_indices()
        if leaves != tuple(range(len(self.tokens))):
            raise ValueError(
                "tree leaves must cover the sentence tokens exactly, "
                "left to right"
            )
        rebuilt = detokenize([t.text for t in self.tokens])
        if normalize_ws(self.text) != rebuilt:
            raise ValueError(
                f"sentence text {normalize_ws(self.text)!r} does not match "
                f"its tokens (detokenized: {rebuilt!r})"
            )
        if self.deps is not None:
            self._validate_deps()

    def _validate_deps(self):
        if len(self.deps) != len(self.tokens):
            raise ValueError(
                f"expected one dependency edge per token, got "
                f"{len(self.deps)} edges for {len(self.tokens)} tokens"
            )
        dependents = sorted(edge.dependent for edge in self.deps)
        if dependents != list(range(len(self.tokens))):
            raise ValueError("each token must appear exactly once as a dependent")
        roots = [edge for edge in self.deps if edge.head is None]
        if len(roots) != 1:
            raise ValueError(f"expected exactly one root edge, got {len(roots)}")
        for edge in self.deps:
            if edge.head is not None and not 0 <= edge.head < len(self.tokens):
                raise ValueError(f"dependency head {edge.head} out of range")


class _BracketReader:
    """Recursive-descent reader for single-sentence PTB bracketings."""

    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.tokens: list[Token] = []

    def fail(self, message: str, at: int | None = None, cls=BracketParseError):
        offset = len(self.text[: self.pos if at is None else at].encode("utf-8"))
        raise cls(message, offset)

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def symbol(self, what: str) -> str:
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos] not in "() \t\r\n":
            self.pos += 1
        if self.pos == start:
            self.fail(f"empty {what}")
        return self.text[start : self.pos]

    def node(self) -> tuple[ConstituencyNode, int]:
        """Returns (node, offset of its label)."""
        assert self.text[self.pos] == "("
        self.pos += 1
        self.skip_ws()
        label_at = self.pos
        label = self.symbol("label")
        self.skip_ws()
        if self.pos >= len(self.text):
            self.fail("unbalanced parentheses: unexpected end of input")
        if self.text[self.pos] == "(":
            children = []
            while True:
                self.skip_ws()
                if self.pos >= len(self.text):
                    self.fail("unbalanced parentheses: unexpected end of input")
                if self.text[self.pos] == ")":
                    self.pos += 1
                    break
                if self.text[self.pos] != "(":
                    self.fail("unexpected word among child subtrees")
                children.append(self.node()[0])
            return ConstituencyNode(label, tuple(children)), label_at
        if self.text[self.pos] == ")":
            self.fail("leaf node has no word")
        word = self.symbol("leaf word")
        self.skip_ws()
        if self.pos >= len(self.text):
            self.fail("unbalanced parentheses: unexpected end of input")
        if self.text[self.pos] != ")":
            self.fail("expected ')' after leaf word")
        self.pos += 1
        index = len(self.tokens)
        self.tokens.append(Token(index, word, label))
        return ConstituencyNode(label, token_index=index), label_at


def parse_bracketed_tree(
    text: str, sentence_id: str | None = None, require_s_root: bool = True
) -> ParsedSentence:
    """Parse one bracketed constituency parse into a ParsedSentence.

    The input must hold exactly one tree of the shape ``(LABEL child ...)``
    with ``(POS word)`` leaves. Token indices are assigned left to right and
    the sentence text is rebuilt by the detokenization convention. Unless
    ``require_s_root`` is disabled, a root label other than "S" raises
    RootLabelError; callers that merely ingest foreign corpora may disable
    the check and decide later whether the engine can use the sentence.
    """
    reader = _BracketReader(text)
    reader.skip_ws()
    if reader.pos >= len(text) or text[reader.pos] != "(":
        reader.fail("expected '(' to open the parse")
    root, root_label_at = reader.node()
    reader.skip_ws()
    if reader.pos != len(text):
        reader.fail("unbalanced parentheses: trailing content after the tree")
    if require_s_root and root.label != "S":
        reader.fail(
            f"root label must be 'S', found {root.label!r}",
            at=root_label_at,
            cls=RootLabelError,
        )
    tokens = tuple(reader.tokens)
    if sentence_id is None:
        digest = hashlib.sha1(normalize_ws(text).encode("utf-8")).hexdigest()
        sentence_id = f"sha1:{digest[:12]}"
    return ParsedSentence(
        id=sentence_id,
        text=detokenize([t.text for t in tokens]),
        tokens=tokens,
        tree=root,
    )


def to_bracketed(sentence: ParsedSentence) -> str:
    """Serialize a sentence back to single-line bracketed form."""

    def render(node: ConstituencyNode) -> str:
        if node.is_leaf:
            return f"({node.label} {sentence.tokens[node.token_index].text})"
        return f"({node.label} " + " ".join(render(c) for c in node.children) + ")"

    return render(sentence.tree)


def parse_dependencies(text: str) -> tuple[DependencyEdge, ...]:
    """Parse 10-column CoNLL-U rows into dependency edges.

    Comment lines and multi-word/empty-node rows are skipped per the
    CoNLL-U convention. An empty block yields an empty edge tuple; a
    non-empty block must contain exactly one root-headed edge and no
    duplicate dependents.
    """
    edges: list[DependencyEdge] = []
    seen: set[int] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip("\n")
        if not line.strip() or line.startswith("#"):
            continue
        cols = line.split("\t")
        if len(cols) != 10:
            raise DependencyParseError(
                f"line {lineno}: expected 10 tab-separated columns, got {len(cols)}"
            )
        if "-" in cols[0] or "." in cols[0]:
            continue
        try:
            token_id = int(cols[0])
            head_id = int(cols[6])
        except ValueError as exc:
            raise DependencyParseError(f"line {lineno}: {exc}") from exc
        dependent = token_id - 1
        if dependent in seen:
            raise DependencyParseError(
                f"line {lineno}: token {token_id} appears twice as a dependent"
            )
        seen.add(dependent)
        head = None if head_id == 0 else head_id - 1
        edges.append(DependencyEdge(head=head, dependent=dependent, relation=cols[7]))
    if edges:
        roots = sum(1 for e in edges if e.head is None)
        if roots == 0:
            raise DependencyParseError("no root-headed edge in dependency block")
        if roots > 1:
            raise DependencyParseError(
                f"multiple root-headed edges ({roots}) in dependency block"
            )
    return tuple(edges)


def node_at(tree: ConstituencyNode, path: TreePath) -> ConstituencyNode | None:
    """Follow child indices from the root; None when the path walks off."""
    node = tree
    for step in path:
        if node.is_leaf or step >= len(node.children):
            return None
        node = node.children[step]
    return node


def yield_of(
    tree: ConstituencyNode, path: TreePath, tokens: tuple[Token, ...]
) -> str | None:
    """Surface text covered by the node at ``path``; None if absent."""
    node = node_at(tree, path)
    if node is None:
        return None
    return detokenize([tokens[i].text for i in node.leaf_indices()])


def walk_paths(tree: ConstituencyNode):
    """Yield (path, node) for every node, in preorder."""
    stack: list[tuple[TreePath, ConstituencyNode]] = [((), tree)]
    while stack:
        path, node = stack.pop()
        yield path, node
        for i in range(len(node.children) - 1, -1, -1):
            stack.append((path + (i,), node.children[i]))
