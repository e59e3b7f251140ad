"""Finite, certificate-producing constructions of trees whose bodies fit
inside large subsets of the Baire and Cantor planes."""
from .errors import TreeBodiesError
from .trees import Alphabet, FiniteTree, TreeKind, check_kind

__all__ = ["Alphabet", "FiniteTree", "TreeBodiesError", "TreeKind", "check_kind"]
__version__ = "0.1.0"
