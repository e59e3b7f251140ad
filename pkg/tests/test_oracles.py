import pytest

from treebodies.errors import NodeNotInTree, NotSilver, SchemaError
from treebodies.oracles import (
    chain,
    finite_tree_oracle,
    full_tree,
    level_split_tree,
    normalize_miller,
    oracle_from_json,
    random_miller,
    random_silver,
    silver_splits_and_rests,
)
from treebodies.trees import Alphabet, FiniteTree, TreeKind, check_kind

B = Alphabet.BINARY


def test_full_tree_successors_and_stem():
    T = full_tree()
    assert T.successors((3, 1), 5) == (0, 1, 2, 3, 4)
    assert T.stem() == ()
    assert len(full_tree(B).approximate(3)) == 15


def test_chain():
    C = chain(3)
    assert C.contains((0, 0, 0)) and not C.contains((0, 0, 0, 0)) and not C.contains((1,))
    with pytest.raises(NodeNotInTree):
        C.successors((1,), 2)


def test_level_split_tree():
    T = level_split_tree([0, 2])
    approx = T.approximate(3, fuel=3)
    assert {len(x) for x in approx.tips()} == {3}
    assert len(approx.level(3)) == 9
    assert check_kind(approx, TreeKind.UNIFORMLY_PERFECT, 3)


def test_finite_tree_oracle_round_trip():
    t = FiniteTree.closure([(0, 1), (1,)], B)
    O = finite_tree_oracle(t)
    assert O.approximate(5) == t
    assert oracle_from_json(O.to_json()).approximate(5) == t


def test_random_oracles_are_deterministic():
    a, b = random_silver(4), random_silver(4)
    assert a.approximate(8) == b.approximate(8)
    m = random_miller(2)
    assert oracle_from_json(m.to_json()).approximate(4, 3) == m.approximate(4, 3)


@pytest.mark.parametrize("bad", [{}, {"builtin": "nope"}, {"builtin": "full", "alphabet": "ternary"},
                                 {"builtin": "random_silver", "params": {}}])
def test_oracle_json_rejects(bad):
    with pytest.raises(SchemaError):
        oracle_from_json(bad)


def test_normalize_miller_has_one_or_many_successors():
    N = normalize_miller(random_miller(1, max_letter=3), fuel=16)
    for node in N.approximate(4, fuel=3):
        assert len(N.children(node, 16)) in (1, 16)


class TestSplitsAndRests:
    def test_full_binary(self):
        r = silver_splits_and_rests(full_tree(B), 4)
        assert r.kept_levels == (0, 2)
        assert r.forced == ((1, 0), (3, 0))
        assert all(x[1] == 0 and x[3] == 0 for x in r.tree.level(4))
        assert len(r.tree.level(4)) == 4

    def test_already_separated(self):
        S = level_split_tree([0, 2], B)
        r = silver_splits_and_rests(S, 4)
        assert r.tree == S.approximate(4, 2)
        assert r.forced == ()

    def test_chain(self):
        r = silver_splits_and_rests(chain(None, 0, B), 4)
        assert r.tree == chain(None, 0, B).approximate(4)
        assert r.kept_levels == ()

    def test_rejects_non_silver(self):
        t = FiniteTree.closure([(0, 0), (0, 1), (1, 0)], B)
        with pytest.raises(NotSilver):
            silver_splits_and_rests(finite_tree_oracle(t), 2)

    @pytest.mark.parametrize("seed", range(20))
    def test_random_silver(self, seed):
        S = random_silver(seed)
        r = silver_splits_and_rests(S, 8)
        assert r.tree.nodes <= S.approximate(8, 2).nodes
        assert check_kind(r.tree, TreeKind.SILVER, 8)
        assert check_kind(r.tree, TreeKind.SPLITS_AND_RESTS, 8)
