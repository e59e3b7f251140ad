import itertools

import pytest

from treebodies.category import (
    InscriptionResult,
    constant_sequence,
    inscribe_category,
    laver_witness,
    miller_avoidance_witness,
    miller_generators_up_to,
    sequence_from_json,
    silver_square_witness,
    tail_sequence,
    up_miller_witness,
    verify_inscription,
)
from treebodies.dense_open import Box, Containment, MillerU, SilverU, laver_G_membership
from treebodies.errors import LevelOverflow, NotLaverLike, NotUPMillerLike, SchemaError
from treebodies.oracles import finite_tree_oracle, full_tree, level_split_tree, random_miller, random_silver
from treebodies.trees import Alphabet, FiniteTree, TreeKind


def q_pairs_up_to(total):
    """Every pair in Q with supp + K <= total, enumerated without the library."""
    for s in range(1, total):
        for k in range(1, total - s + 1):
            for a in itertools.product(range(k + 1), repeat=s):
                for b in itertools.product(range(k + 1), repeat=s):
                    if a[-1] and b[-1] and a != b and max(a + b) == k:
                        yield a, b, s + k


def miller_covers(x, y, total):
    for a, b, m in q_pairs_up_to(total):
        if x[:m] == a + (0,) * (m - len(a)) and y[:m] == b + (0,) * (m - len(b)):
            return True
    return False


def miller_covers_by_support(x, y, total):
    """Same question, using that a covering q must equal (x|s, y|s) for its support s."""
    for s in range(1, total):
        a, b = x[:s], y[:s]
        if not (a[-1] and b[-1]) or a == b:
            continue
        m = s + max(a + b)
        if m <= total and not any(x[s:m]) and not any(y[s:m]):
            return True
    return False


@pytest.fixture(scope="module")
def level2():
    G = constant_sequence(MillerU())
    return G, inscribe_category(G, 2)


class TestInscription:
    def test_levels_one(self):
        G = constant_sequence(MillerU())
        r = inscribe_category(G, 1)
        assert set(r.labels) == {(), (0,), (1,), (0, 0), (0, 1), (1, 0), (1, 1)}
        assert len({len(r.labels[w]) for w in [(0,), (1,)]}) == 1
        assert len({len(r.labels[w]) for w in [(0, 0), (0, 1), (1, 0), (1, 1)]}) == 1
        split_levels = [n for n in range(r.uniform_approx.height)
                        if any(len(r.uniform_approx.successor_letters(v)) > 1
                               for v in r.uniform_approx.level(n))]
        assert len(split_levels) == 2
        assert verify_inscription(r, G).ok

    @pytest.mark.parametrize("G", [constant_sequence(MillerU()), tail_sequence("miller_U"),
                                   tail_sequence("silver_U")], ids=["constant", "tail", "silver_tail"])
    def test_verifies(self, G):
        r = inscribe_category(G, 2)
        rep = verify_inscription(r, G)
        assert rep.ok, rep.failures[:5]
        assert r.uniform_approx.nodes <= r.miller_approx.nodes

    def test_truncated_label_is_reported(self, level2):
        G, r = level2
        labels = dict(r.labels)
        labels[(0, 1)] = labels[(0, 1)][:-1]
        bad = InscriptionResult(r.levels, labels, r.generation, r.miller_approx, r.uniform_approx, r.witness_log)
        rep = verify_inscription(bad, G)
        assert not rep.ok
        assert any(c.startswith("condition_1") and (0, 1) in d for c, d in rep.failures)

    def test_log_is_advisory(self, level2):
        G, r = level2
        thin = InscriptionResult(r.levels, r.labels, r.generation, r.miller_approx, r.uniform_approx,
                                 r.witness_log[1:])
        assert verify_inscription(thin, G).ok

    def test_log_replays(self, level2):
        G, r = level2
        for e in r.witness_log:
            assert G.at(e.certified_against).contains_box(e.box) is Containment.INSIDE

    def test_json_round_trip(self, level2):
        G, r = level2
        again = InscriptionResult.from_json(r.to_json())
        assert again.labels == r.labels and verify_inscription(again, G).ok
        assert sequence_from_json(G.to_json()).to_json() == G.to_json()
        with pytest.raises(SchemaError):
            InscriptionResult.from_json({"levels": 1})

    def test_deterministic(self, level2):
        G, r = level2
        assert inscribe_category(G, 2).to_json() == r.to_json()

    def test_level_bound(self):
        with pytest.raises(LevelOverflow):
            inscribe_category(constant_sequence(MillerU()), 4)
        with pytest.raises(ValueError):
            inscribe_category(constant_sequence(MillerU()), 0)


class TestMillerWitness:
    def test_full_omega(self):
        w = miller_avoidance_witness(full_tree(), 3)
        assert w.x_prefix == (1, 3, 3, 5, 5)
        assert w.y_prefix == (2, 2, 4, 4, 6, 6)
        assert w.block_boundaries == ((0, 1, 3, 5), (0, 2, 4, 6))
        assert w.generators_ruled_out == miller_generators_up_to(5) == sum(1 for _ in q_pairs_up_to(5))
        assert not miller_covers(w.x_prefix, w.y_prefix, 5)
        assert not miller_covers_by_support(w.x_prefix, w.y_prefix, 5)

    def test_support_check_agrees_with_full_exhaustion(self):
        for x in itertools.product(range(3), repeat=4):
            for y in [(1, 0, 0, 0), (2, 1, 0, 0), (0, 2, 0, 1)]:
                assert miller_covers(x, y, 4) == miller_covers_by_support(x, y, 4)

    @pytest.mark.parametrize("seed", range(5))
    def test_random_miller(self, seed):
        T = random_miller(seed)
        w = miller_avoidance_witness(T, 3)
        assert T.contains(w.x_prefix) and T.contains(w.y_prefix)
        xs, ys = w.block_boundaries
        merged = [v for pair in zip(xs[1:], ys[1:]) for v in pair]
        assert merged == sorted(set(merged))
        assert not miller_covers_by_support(w.x_prefix, w.y_prefix, min(len(w.x_prefix), len(w.y_prefix)))


class TestOtherWitnesses:
    def test_laver(self):
        x = laver_witness(full_tree(), 5)
        assert x == (1, 1, 1, 1, 1)
        assert not laver_G_membership(x, 1)
        with pytest.raises(NotLaverLike):
            laver_witness(full_tree(Alphabet.BINARY), 3)

    def test_silver_square_brute_force(self):
        w = silver_square_witness(full_tree(Alphabet.BINARY), 6)
        assert w.x_prefix != w.y_prefix
        x, y = w.x_prefix, w.y_prefix
        for s in range(1, 5):
            for a in itertools.product((0, 1), repeat=s):
                for b in itertools.product((0, 1), repeat=s):
                    if a[-1] and b[-1] and a != b:
                        assert not (x[:s + 2] == a + (0, 0) and y[:s + 2] == b + (1, 1))
        assert SilverU().contains_box(Box(x, y)) is Containment.UNKNOWN

    @pytest.mark.parametrize("seed", range(5))
    def test_silver_square_random(self, seed):
        w = silver_square_witness(random_silver(seed), 8)
        kept = w.block_boundaries[0]
        assert all(b - a >= 2 for a, b in zip(kept, kept[1:]))
        diff = next(i for i, (a, b) in enumerate(zip(w.x_prefix, w.y_prefix)) if a != b)
        assert diff in kept

    def test_up_miller(self):
        w = up_miller_witness(level_split_tree([0, 2, 4]), 6, 1)
        assert w.point == (3, 0, 5, 0, 7, 0)
        assert w.point[0] > 2 and w.point[2] > 4 and w.point[4] > 6
        x = w.point
        for s in range(1, 6):
            for K in range(1, 6):
                m = s + K + 1
                if m > 6:
                    continue
                for q in itertools.product(range(K + 1), repeat=s):
                    if q[-1] and max(q) == K:
                        assert x[:m] != q + (0,) * (m - s)

    def test_up_miller_rejects_nonuniform(self):
        t = FiniteTree.closure([(0, a) for a in range(70)] + [(b, 0) for b in range(1, 70)], Alphabet.OMEGA)
        with pytest.raises(NotUPMillerLike):
            up_miller_witness(finite_tree_oracle(t, TreeKind.MILLER), 2, 1)
