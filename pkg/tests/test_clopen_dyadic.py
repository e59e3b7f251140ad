import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from treebodies.clopen import ClopenPlane, ClopenSet, group_translate, symmetrize
from treebodies.dyadic import ONE, ZERO, Dyadic
from treebodies.errors import SchemaError

CELLS3 = list(itertools.product((0, 1), repeat=3))


def plane_cells(A: ClopenPlane, d: int) -> set:
    """Brute force: depth-d cells (a, b) whose box lies in A."""
    return {(a, b) for a in itertools.product((0, 1), repeat=d) for b in itertools.product((0, 1), repeat=d)
            if A.mass_in_box(a, b) == Dyadic.pow2(-2 * d)}


def xor(a, t):
    t = tuple(t) + (0,) * (len(a) - len(t))
    return tuple(x ^ y for x, y in zip(a, t))


cell_sets = st.sets(st.tuples(st.sampled_from(CELLS3), st.sampled_from(CELLS3)), max_size=40)


class TestDyadic:
    def test_canonical_form(self):
        assert Dyadic(6, 3) == Dyadic(3, 2)
        assert Dyadic(3, 2).numerator == 3 and Dyadic(3, 2).exponent == 2
        assert Dyadic(0, 5) == ZERO and ZERO.exponent == 0

    def test_arithmetic(self):
        a, b = Dyadic(1, 1), Dyadic(1, 2)
        assert a + b == Dyadic(3, 2)
        assert a - b == b
        assert a * b == Dyadic(1, 3)
        assert -a + a == ZERO
        assert b < a < ONE and a <= Fraction(1, 2) and a > 0

    def test_coerce(self):
        assert Dyadic.coerce(Fraction(3, 8)) == Dyadic(3, 3)
        with pytest.raises(ValueError):
            Dyadic.coerce(Fraction(1, 3))

    def test_text(self):
        assert str(Dyadic(3, 2)) == "3/2^2"
        assert Dyadic.parse("-5/2^7") == Dyadic(-5, 7)
        for bad in ("1/3", "x", "1/2^-1", "0.5"):
            with pytest.raises(SchemaError):
                Dyadic.parse(bad)

    @given(st.integers(-10**6, 10**6), st.integers(0, 60))
    def test_round_trip(self, p, e):
        d = Dyadic(p, e)
        assert Dyadic.parse(str(d)) == d
        assert d.to_fraction() == Fraction(p, 2**e)


class TestClopenSet:
    def test_measure_and_generators(self):
        A = ClopenSet.from_generators([(0,), (1, 1)])
        assert A.measure() == Dyadic(3, 2)
        assert A.complement().generators() == [(1, 0)]
        with pytest.raises(SchemaError):
            ClopenSet.from_generators([(0,), (0, 1)])

    def test_translate(self):
        A = ClopenSet.from_generators([(0, 1)])
        assert A.translate((1,)).generators() == [(1, 1)]
        assert A.translate(()).generators() == A.generators()
        assert group_translate(A, (1, 1)).generators() == [(1, 0)]

    def test_mass_in(self):
        A = ClopenSet.from_generators([(0,)])
        assert A.mass_in((0, 1)) == Dyadic(1, 2)
        assert A.mass_in((1,)) == ZERO

    def test_json(self):
        A = ClopenSet.from_generators([(0, 0), (1,)])
        assert ClopenSet.from_json(A.to_json()) == A
        with pytest.raises(SchemaError):
            ClopenSet.from_json({"gens": []})

    @settings(max_examples=100, deadline=None)
    @given(st.sets(st.sampled_from(CELLS3)), st.lists(st.integers(0, 1), max_size=4))
    def test_ops_match_cells(self, cells, t):
        A = ClopenSet.from_generators(cells)
        assert A.measure() == Dyadic(len(cells), 3)
        assert A.complement().measure() == ONE - A.measure()
        moved = A.translate(t)
        assert moved.measure() == A.measure()
        assert {c for c in CELLS3 if moved.mass_in(c) == Dyadic.pow2(-3)} == {xor(c, t) for c in cells}
        assert moved.translate(t) == A


class TestClopenPlane:
    def test_symmetrize_examples(self):
        assert symmetrize(ClopenPlane.full()) == ClopenPlane.full()
        assert symmetrize(ClopenPlane.box((0,), (1,))) == ClopenPlane.empty()

    def test_diagonal_band(self):
        band = ClopenPlane.diagonal_band(3)
        assert band.measure() == Dyadic(1, 3)
        assert plane_cells(band, 3) == {(a, a) for a in CELLS3}

    def test_json(self):
        A = ClopenPlane.from_boxes([((0,), (1,)), ((1, 1), (0,))])
        assert ClopenPlane.from_json(A.to_json()) == A
        with pytest.raises(SchemaError):
            ClopenPlane.from_json({"boxes": [{"left": [0]}]})

    @settings(max_examples=150, deadline=None)
    @given(cell_sets)
    def test_symmetrize_bound_by_cells(self, cells):
        A = ClopenPlane.from_boxes(cells)
        assert A.measure() == Dyadic(len(cells), 6)
        S = symmetrize(A)
        expected = {(a, b) for a, b in cells if (b, a) in cells}
        assert plane_cells(S, 3) == expected
        assert S.measure() >= 2 * A.measure() - 1
        assert symmetrize(S) == S

    @settings(max_examples=100, deadline=None)
    @given(cell_sets, st.lists(st.integers(0, 1), max_size=3), st.lists(st.integers(0, 1), max_size=3))
    def test_translation(self, cells, t, u):
        A = ClopenPlane.from_boxes(cells)
        moved = A.translate(t, u)
        assert moved.measure() == A.measure()
        assert plane_cells(moved, 3) == {(xor(a, t), xor(b, u)) for a, b in cells}
        assert moved.translate(t, u) == A
        assert symmetrize(A.translate(t, t)) == symmetrize(A).translate(t, t)

    @settings(max_examples=100, deadline=None)
    @given(cell_sets, cell_sets)
    def test_boolean_ops_match_cells(self, c1, c2):
        A, B = ClopenPlane.from_boxes(c1), ClopenPlane.from_boxes(c2)
        assert plane_cells(A | B, 3) == c1 | c2
        assert plane_cells(A & B, 3) == c1 & c2
        assert plane_cells(A.complement(), 3) == {(a, b) for a in CELLS3 for b in CELLS3} - c1
        assert (A & B) <= A

    def test_random_translation_invariance(self):
        rng = random.Random(11)
        for _ in range(100):
            boxes = [(tuple(rng.randint(0, 1) for _ in range(rng.randint(0, 4))),
                      tuple(rng.randint(0, 1) for _ in range(rng.randint(0, 4)))) for _ in range(3)]
            A = ClopenPlane.from_boxes(boxes)
            t = tuple(rng.randint(0, 1) for _ in range(5))
            assert group_translate(A, t).measure() == A.measure()
            assert group_translate(A, (0, 0, 0)) == A
