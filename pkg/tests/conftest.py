"""Shared fixtures: canonical parses, random generators, brute-force oracles."""

from __future__ import annotations

import itertools
import random
from pathlib import Path

import pytest

from ceglearn import (
    ConstituencyNode,
    LexicalConstraint,
    ParsedSentence,
    Signature,
    make_ceg,
    parse_bracketed_tree,
)

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

# The worked example: subordinate clause attached to the root, so the
# effect phrase is covered by the NP and VP directly under the root.
WORKED_PTB = (
    "(S (NP (DT The) (NN application)) (VP (VBZ is) (VP (VBN terminated))) "
    "(SBAR (WHADVP (WRB when)) (S (NP (DT the) (NN x-button)) "
    "(VP (VBZ is) (VP (VBN pressed))))) (. .))"
)

# Fronted conditional: "If the <n1> <v1>, the <n2> <v2>."
IF_PTB = (
    "(S (SBAR (IN If) (S (NP (DT the) (NN {n1})) (VP (VBZ {v1})))) (, ,) "
    "(NP (DT the) (NN {n2})) (VP (VBZ {v2})) (. .))"
)


def if_sentence(n1, v1, n2, v2, sentence_id=None):
    return parse_bracketed_tree(
        IF_PTB.format(n1=n1, v1=v1, n2=n2, v2=v2), sentence_id=sentence_id
    )


def if_gold(sentence):
    return make_ceg(sentence, (1, 4), (5, 8))


@pytest.fixture
def worked_sentence():
    return parse_bracketed_tree(WORKED_PTB, sentence_id="worked")


@pytest.fixture
def worked_gold(worked_sentence):
    return make_ceg(worked_sentence, (5, 9), (0, 4))


@pytest.fixture(scope="session")
def fixtures_dir():
    return FIXTURES


# ---------------------------------------------------------------------------
# Random sentence / signature generators (deterministic given an rng)
# ---------------------------------------------------------------------------

LABELS = ["S", "NP", "VP", "SBAR", "PP", "ADVP", "ADJP", "X"]
POS_TAGS = ["DT", "NN", "VBZ", "IN", "JJ", "RB", "PRP"]
WORDS = ["the", "cat", "runs", "if", "fast", "blue", "it", "stops", "box"]


def random_tree(rng: random.Random, max_nodes: int, root_label: str | None = None):
    """Build a random constituency tree with at most ``max_nodes`` nodes."""
    counter = itertools.count()
    budget = rng.randint(1, max_nodes)

    def build(label, depth):
        nonlocal budget
        budget -= 1
        make_leaf = depth >= 3 or budget <= 1 or rng.random() < 0.35
        if make_leaf:
            return ConstituencyNode(
                rng.choice(POS_TAGS), token_index=next(counter)
            )
        width = rng.randint(1, min(3, max(1, budget)))
        children = tuple(
            build(rng.choice(LABELS), depth + 1) for _ in range(width)
        )
        return ConstituencyNode(label, children)

    label = root_label or rng.choice(LABELS)
    root = build(label, 0)
    if root.is_leaf:  # a bare leaf is not a sentence; wrap it
        root = ConstituencyNode(label if label else "S", (root,))
    return root


def sentence_from_tree(tree: ConstituencyNode, rng: random.Random, sentence_id: str):
    from ceglearn import Token, detokenize

    n = len(tree.leaf_indices())
    tokens = tuple(
        Token(i, rng.choice(WORDS), "X") for i in range(n)
    )

    def relabel(node):
        if node.is_leaf:
            return ConstituencyNode(
                tokens[node.token_index].pos, token_index=node.token_index
            )
        return ConstituencyNode(node.label, tuple(relabel(c) for c in node.children))

    # keep the generated POS labels; only texts come from the token list
    return ParsedSentence(
        id=sentence_id,
        text=detokenize([t.text for t in tokens]),
        tokens=tuple(
            Token(i, tokens[i].text, leaf_pos)
            for i, leaf_pos in enumerate(
                _leaf_labels(tree)
            )
        ),
        tree=tree,
    )


def _leaf_labels(tree: ConstituencyNode):
    out = []

    def walk(node):
        if node.is_leaf:
            out.append(node.label)
            return
        for child in node.children:
            walk(child)

    walk(tree)
    return out


def random_sentence(rng: random.Random, max_nodes: int = 15, root_label=None):
    tree = random_tree(rng, max_nodes, root_label=root_label)
    return sentence_from_tree(tree, rng, f"rand-{rng.randint(0, 10**9)}")


def all_positions(sentence: ParsedSentence):
    """Every (path, node) of a sentence tree, computed independently of the
    library's walkers: plain recursive enumeration."""
    found = {}

    def walk(node, path):
        found[path] = node
        if not node.is_leaf:
            for i, child in enumerate(node.children):
                walk(child, path + (i,))

    walk(sentence.tree, ())
    return found


def random_signature(rng: random.Random, sentence: ParsedSentence, max_nodes: int = 5):
    """A signature related to the sentence: subset of its positions, with
    labels and keywords sometimes mutated so both outcomes occur."""
    positions = all_positions(sentence)
    paths = sorted(positions)
    chosen = {()}
    attempts = rng.randint(0, max_nodes - 1)
    for _ in range(attempts):
        path = rng.choice(paths)
        # close the path upward so the signature stays well-formed
        for depth in range(len(path) + 1):
            chosen.add(path[:depth])
    nodes = []
    for path in sorted(chosen)[:max_nodes]:
        label = positions[path].label if path in positions else "S"
        if path != () and rng.random() < 0.3:
            label = rng.choice(LABELS + POS_TAGS)
        nodes.append((path, "S" if path == () else label))
    constraints = []
    if rng.random() < 0.5:
        path = rng.choice([p for p, _ in nodes])
        word = rng.choice(WORDS)
        constraints.append(LexicalConstraint(path, word))
    return Signature(tuple(nodes), tuple(constraints))


def oracle_compliant(signature: Signature, sentence: ParsedSentence) -> bool:
    """Brute-force positional-embedding check: enumerate every tree
    position up front, then test each signature node and constraint."""
    positions = all_positions(sentence)
    for path, label in signature.nodes:
        node = positions.get(tuple(path))
        if node is None or node.label != label:
            return False
    for constraint in signature.constraints:
        node = positions.get(tuple(constraint.path))
        if node is None:
            return False
        words = {
            sentence.tokens[i].text.lower() for i in node.leaf_indices()
        }
        if constraint.keyword not in words:
            return False
    return True
