"""Parsing, paths, yields, serialization round-trips."""

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ceglearn import (
    BracketParseError,
    DependencyParseError,
    RootLabelError,
    detokenize,
    node_at,
    normalize_ws,
    parse_bracketed_tree,
    parse_dependencies,
    to_bracketed,
    yield_of,
)

from conftest import random_sentence


class TestDetokenize:
    def test_plain_words(self):
        assert detokenize(["The", "cat", "sat"]) == "The cat sat"

    def test_punctuation_attaches_left(self):
        assert detokenize(["a", ",", "b", "."]) == "a, b."
        assert detokenize(["x", ";", "y", ":", "z", "!", "w", "?"]) == "x; y: z! w?"

    def test_parens(self):
        assert detokenize(["a", "(", "b", ")", "c"]) == "a (b) c"

    def test_normalize_ws(self):
        assert normalize_ws("  a \t b\nc ") == "a b c"


class TestBracketParsing:
    def test_simple_tree(self):
        s = parse_bracketed_tree("(S (NP (DT The) (NN cat)) (VP (VBD sat)))")
        assert [t.text for t in s.tokens] == ["The", "cat", "sat"]
        assert [t.pos for t in s.tokens] == ["DT", "NN", "VBD"]
        assert s.tree.label == "S"
        assert len(s.tree.children) == 2
        assert s.text == "The cat sat"

    def test_conditional_shape(self):
        s = parse_bracketed_tree(
            "(S (SBAR (IN If) (S (NP (DT the) (NN file)) (VP (VBZ fails)))) "
            "(, ,) (NP (DT the) (NN system)) (VP (VBZ halts)) (. .))"
        )
        assert s.tree.children[0].label == "SBAR"
        assert s.text == "If the file fails, the system halts."

    def test_unbalanced_open(self):
        with pytest.raises(BracketParseError, match="byte offset"):
            parse_bracketed_tree("(S (NP (DT The)")

    def test_trailing_garbage(self):
        with pytest.raises(BracketParseError, match="trailing"):
            parse_bracketed_tree("(S (NN a)) )")

    def test_empty_label(self):
        with pytest.raises(BracketParseError, match="empty label"):
            parse_bracketed_tree("(S ( (NN a)))")

    def test_leaf_without_word(self):
        with pytest.raises(BracketParseError, match="no word"):
            parse_bracketed_tree("(S (NP))")

    def test_multiple_words_in_leaf(self):
        with pytest.raises(BracketParseError, match="after leaf word"):
            parse_bracketed_tree("(S (NN a b))")

    def test_word_mixed_with_subtrees(self):
        with pytest.raises(BracketParseError, match="among child subtrees"):
            parse_bracketed_tree("(S (NP (NN a)) stray)")

    def test_root_label_rejected(self):
        with pytest.raises(RootLabelError, match="root label"):
            parse_bracketed_tree("(FRAG (NN fragment))")

    def test_root_label_rejection_is_distinct(self):
        try:
            parse_bracketed_tree("(TOP (NN x))")
        except RootLabelError:
            pass
        else:
            pytest.fail("expected RootLabelError")

    def test_root_label_tolerated_when_asked(self):
        s = parse_bracketed_tree("(FRAG (NN fragment))", require_s_root=False)
        assert s.tree.label == "FRAG"

    def test_error_names_byte_offset(self):
        with pytest.raises(BracketParseError) as err:
            parse_bracketed_tree("(S (NP))")
        assert err.value.offset == 6  # the closing paren of the wordless leaf

    def test_default_id_is_stable(self):
        a = parse_bracketed_tree("(S (NN a))")
        b = parse_bracketed_tree("(S (NN a))")
        assert a.id == b.id and a.id.startswith("sha1:")


class TestNodeAt:
    def test_empty_path_is_root(self, worked_sentence):
        assert node_at(worked_sentence.tree, ()) is worked_sentence.tree

    def test_first_child(self):
        s = parse_bracketed_tree(
            "(S (SBAR (IN If) (S (NN x))) (NP (NN y)) (VP (VBZ z)))"
        )
        assert node_at(s.tree, (0,)).label == "SBAR"

    def test_out_of_bounds_is_absent(self):
        s = parse_bracketed_tree("(S (NP (NN a)) (VP (VBZ b)) (PP (IN c)))")
        assert node_at(s.tree, (5,)) is None

    def test_path_through_leaf_is_absent(self):
        s = parse_bracketed_tree("(S (NN a))")
        assert node_at(s.tree, (0, 0)) is None


class TestYieldOf:
    def test_sbar_internal_clause(self, worked_sentence):
        t = worked_sentence
        assert yield_of(t.tree, (2, 1), t.tokens) == "the x-button is pressed"

    def test_root_yields_whole_sentence(self, worked_sentence):
        t = worked_sentence
        assert yield_of(t.tree, (), t.tokens) == t.text
        assert t.text == "The application is terminated when the x-button is pressed."

    def test_absent_node(self, worked_sentence):
        assert yield_of(worked_sentence.tree, (9, 9), worked_sentence.tokens) is None


class TestDependencies:
    ROWS = (
        "1\tIf\tif\tSCONJ\tIN\t_\t3\tmark\t_\t_\n"
        "2\tit\tit\tPRON\tPRP\t_\t3\tnsubj\t_\t_\n"
        "3\trains\train\tVERB\tVBZ\t_\t0\troot\t_\t_\n"
    )

    def test_well_formed(self):
        edges = parse_dependencies(self.ROWS)
        assert len(edges) == 3
        assert sum(1 for e in edges if e.head is None) == 1
        assert edges[0].relation == "mark"
        assert edges[0].head == 2 and edges[0].dependent == 0

    def test_two_roots(self):
        rows = self.ROWS.replace("3\tmark", "0\tmark", 1)
        with pytest.raises(DependencyParseError, match="multiple root"):
            parse_dependencies(rows)

    def test_no_root(self):
        rows = self.ROWS.replace("0\troot", "1\troot", 1)
        with pytest.raises(DependencyParseError, match="no root"):
            parse_dependencies(rows)

    def test_duplicate_dependent(self):
        rows = self.ROWS + "2\textra\textra\tX\tX\t_\t3\tdep\t_\t_\n"
        with pytest.raises(DependencyParseError, match="twice"):
            parse_dependencies(rows)

    def test_column_count(self):
        with pytest.raises(DependencyParseError, match="10"):
            parse_dependencies("1\tword\tonly\tfour\tcols\n")

    def test_empty_input(self):
        assert parse_dependencies("") == ()

    def test_comments_and_ranges_skipped(self):
        rows = "# sent_id = 1\n1-2\tvamos\t_\t_\t_\t_\t_\t_\t_\t_\n" + self.ROWS
        assert len(parse_dependencies(rows)) == 3


class TestRoundTrip:
    def test_worked_example(self, worked_sentence):
        again = parse_bracketed_tree(to_bracketed(worked_sentence), sentence_id="worked")
        assert again == worked_sentence

    @settings(max_examples=100, deadline=None)
    @given(st.integers(0, 10**9))
    def test_random_trees(self, seed):
        rng = random.Random(seed)
        sentence = random_sentence(rng, max_nodes=15)
        again = parse_bracketed_tree(
            to_bracketed(sentence), sentence_id=sentence.id, require_s_root=False
        )
        assert again.tree == sentence.tree
        assert [t.text for t in again.tokens] == [t.text for t in sentence.tokens]

    @settings(max_examples=100, deadline=None)
    @given(st.integers(0, 10**9))
    def test_root_yield_reconstructs_text(self, seed):
        rng = random.Random(seed)
        sentence = random_sentence(rng, max_nodes=15)
        assert yield_of(sentence.tree, (), sentence.tokens) == sentence.text
