import itertools

from hypothesis import strategies as st

from treebodies.trees import Alphabet, FiniteTree

BINARY_WORDS = [w for n in range(5) for w in itertools.product((0, 1), repeat=n)]


@st.composite
def binary_trees(draw, max_depth: int = 4):
    words = [w for w in BINARY_WORDS if len(w) <= max_depth]
    picked = draw(st.lists(st.sampled_from(words), max_size=12))
    return FiniteTree.closure([()] + picked, Alphabet.BINARY)


@st.composite
def omega_trees(draw, max_depth: int = 3, max_letter: int = 4):
    nodes = draw(st.lists(st.lists(st.integers(0, max_letter), max_size=max_depth).map(tuple), max_size=10))
    return FiniteTree.closure([()] + nodes, Alphabet.OMEGA)
