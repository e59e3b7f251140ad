import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import binary_trees, omega_trees
from treebodies.errors import NodeNotInTree, NoSplitWithinFuel, SchemaError
from treebodies.oracles import chain, full_tree
from treebodies.trees import (
    Alphabet,
    ConsistentTo,
    FiniteTree,
    TreeKind,
    Violated,
    check_kind,
    default_slalom_words,
    height,
    immediate_splitting_successors,
    meet,
    node_rank,
    pad,
    split_nodes,
    stem,
    successors,
    tips,
    tree_to_dot,
)

B, W = Alphabet.BINARY, Alphabet.OMEGA


def T(*nodes, alphabet=B):
    return FiniteTree.from_nodes([()] + [tuple(n) for n in nodes], alphabet)


class TestConstruction:
    def test_rejects_non_prefix_closed(self):
        with pytest.raises(SchemaError):
            FiniteTree.from_nodes([(), (0, 1)], B)

    def test_rejects_bad_letters(self):
        with pytest.raises(SchemaError):
            FiniteTree.from_nodes([(), (2,)], B)
        FiniteTree.from_nodes([(), (2,)], W)

    def test_closure_and_full(self):
        t = FiniteTree.closure([(1, 0, 1)], B)
        assert sorted(t.nodes) == [(), (1,), (1, 0), (1, 0, 1)]
        assert len(FiniteTree.full(B, 3)) == 15

    def test_json_round_trip_is_length_lex(self):
        t = T((1,), (0,), (0, 1))
        data = t.to_json()
        assert data == {"alphabet": "binary", "nodes": [[], [0], [1], [0, 1]]}
        assert FiniteTree.from_json(json.loads(json.dumps(data))) == t

    @pytest.mark.parametrize("bad", [
        {"alphabet": "binary"},
        {"alphabet": "ternary", "nodes": [[]]},
        {"alphabet": "binary", "nodes": [[], [0, 0]]},
        {"alphabet": "binary", "nodes": [[]], "extra": 1},
    ])
    def test_from_json_rejects(self, bad):
        with pytest.raises(SchemaError):
            FiniteTree.from_json(bad)

    def test_dot_has_one_vertex_per_node(self):
        dot = tree_to_dot(T((0,), (1,)))
        assert dot.startswith("digraph")
        assert dot.count("label=") == 3


class TestOperators:
    def test_successors(self):
        t = T((0,), (1,), (0, 0))
        assert successors(t, (0,)) == {0}
        assert successors(t, ()) == {0, 1}
        assert set(successors(full_tree(W), (), 4)) == {0, 1, 2, 3}
        with pytest.raises(NodeNotInTree):
            successors(t, (1, 1))

    def test_split_nodes(self):
        assert split_nodes(T((0,), (1,))) == {()}
        assert split_nodes(T((0,))) == frozenset()
        full = FiniteTree.full(B, 3)
        assert split_nodes(full) == {n for n in full.nodes if len(n) <= 2}

    def test_immediate_splitting_successors(self):
        assert immediate_splitting_successors(FiniteTree.full(B, 3), ()) == {()}
        assert immediate_splitting_successors(T((0,), (0, 0), (0, 1)), ()) == {(0,)}
        assert immediate_splitting_successors(T((0,), (0, 0)), ()) == frozenset()

    def test_stem(self):
        assert stem(T((0,), (1,))) == ()
        assert stem(T((2,), (2, 0), (2, 1), alphabet=W)) == (2,)
        with pytest.raises(NoSplitWithinFuel):
            stem(chain(10), 5)

    def test_tips_height_rank(self):
        t = T((0,), (0, 0))
        assert tips(t) == {(0, 0)} and height(t) == 2
        assert tips(T()) == {()} and height(T()) == 0
        t = T((0,), (1,), (0, 0))
        assert node_rank(t, (1,)) == 0 and height(t) == 2
        with pytest.raises(NodeNotInTree):
            node_rank(t, (1, 1))

    def test_helpers(self):
        assert meet((0, 1, 1), (0, 1, 0)) == (0, 1)
        assert pad((1,), 3) == (1, 0, 0)


class TestCheckKind:
    def test_documented_examples(self):
        assert check_kind(FiniteTree.full(B, 4), TreeKind.UNIFORMLY_PERFECT, 4) == ConsistentTo(4)
        t = T((0,), (1,), (0, 0), (0, 1), (1, 0))
        assert check_kind(t, TreeKind.SILVER, 2) == Violated(((0,), (1,)))
        t = T((0,), (1,), (0, 0), (0, 1))
        assert check_kind(t, TreeKind.UNIFORMLY_PERFECT, 2) == Violated(((1,),))

    def test_depth_out_of_range(self):
        with pytest.raises(ValueError):
            check_kind(T((0,)), TreeKind.PERFECT, 2)

    def test_miller_needs_branching_promise(self):
        full = FiniteTree.full(B, 2)
        assert not check_kind(full, TreeKind.MILLER, 2)
        assert check_kind(full, TreeKind.MILLER, 2, infinite_branching=True)

    def test_laver_threshold(self):
        wide = FiniteTree.closure([(a, b) for a in range(3) for b in range(3)], W)
        assert check_kind(wide, TreeKind.LAVER, 2)
        narrow = FiniteTree.closure([(a, b) for a in range(3) for b in range(2)], W)
        assert check_kind(narrow, TreeKind.LAVER, 2) == Violated(((0,), (1,)))

    def test_splits_and_rests(self):
        assert not check_kind(FiniteTree.full(B, 3), TreeKind.SPLITS_AND_RESTS, 3)
        t = FiniteTree.closure([(a, 0, c) for a in (0, 1) for c in (0, 1)], B)
        assert check_kind(t, TreeKind.SPLITS_AND_RESTS, 3)

    def test_slalom_imprint(self):
        t = FiniteTree.closure([(a, 1, 2) for a in (0, 1)], W)
        assert check_kind(t, TreeKind.SLALOM, 3, slalom_words=[(1, 2), (2,), ()])
        assert check_kind(t, TreeKind.SLALOM, 3, slalom_words=[(2, 1)]) == Violated(((2, 1),))
        assert len(default_slalom_words()) == 13

    def test_evenly_cut(self):
        assert check_kind(T((0,), (1,)), TreeKind.EVENLY_CUT)
        assert check_kind(T((0,), (1,), (0, 0)), TreeKind.EVENLY_CUT) == Violated(((1,),))


MONOTONE_KINDS = [k for k in TreeKind if k is not TreeKind.SLALOM]


@settings(max_examples=150, deadline=None)
@given(binary_trees(), st.sampled_from(MONOTONE_KINDS))
def test_violations_persist_with_depth(t, kind):
    verdicts = [check_kind(t, kind, d, infinite_branching=True) for d in range(t.height + 1)]
    for d, v in enumerate(verdicts):
        if not v:
            assert all(w == v for w in verdicts[d:])


@settings(max_examples=150, deadline=None)
@given(omega_trees())
def test_immediate_splitting_successors_is_antichain_of_splits(t):
    splits = split_nodes(t)
    for node in t:
        succ = immediate_splitting_successors(t, node)
        assert succ <= splits
        for a in succ:
            for b in succ:
                assert a == b or not (a[: len(b)] == b or b[: len(a)] == a)


@settings(max_examples=100, deadline=None)
@given(omega_trees())
def test_operations_preserve_prefix_closure(t):
    for sub in (t.restrict(1), t.cone((0,)) if (0,) in t else t, t.union(FiniteTree.closure([(7, 7)], W))):
        assert all(n[:-1] in sub for n in sub if n)
    assert FiniteTree.from_json(t.to_json()) == t
