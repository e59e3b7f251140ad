"""Clopen subsets of the Cantor space and of the Cantor plane.

Sets are stored as hash-consed binary decision tries: variable ``d`` is the
``d``-th coordinate (for the plane, coordinates interleave ``x0 y0 x1 y1 ...``).
A node only collapses when both children are the same terminal, so node depth
always equals variable index and every set has a unique representation.
Measures are exact :class:`~treebodies.dyadic.Dyadic` values.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Sequence

from .dyadic import ONE, ZERO, Dyadic
from .errors import SchemaError
from .trees import Node, comparable

EMPTY, FULL = 0, 1

_nodes: list = [None, None]
_table: dict = {}
_union: dict = {}
_inter: dict = {}
_compl: dict = {EMPTY: FULL, FULL: EMPTY}
_measure: dict = {EMPTY: ZERO, FULL: ONE}
_swap: dict = {EMPTY: EMPTY, FULL: FULL}
_depth: dict = {EMPTY: 0, FULL: 0}


def _mk(lo: int, hi: int) -> int:
    if lo == hi and lo <= FULL:
        return lo
    key = (lo, hi)
    nid = _table.get(key)
    if nid is None:
        nid = len(_nodes)
        _nodes.append(key)
        _table[key] = nid
    return nid


def _kids(n: int):
    return (n, n) if n <= FULL else _nodes[n]


def _apply(op: dict, a: int, b: int, absorb: int, unit: int) -> int:
    if a == absorb or b == absorb:
        return absorb
    if a == unit:
        return b
    if b == unit or a == b:
        return a
    key = (a, b) if a < b else (b, a)
    r = op.get(key)
    if r is None:
        (a0, a1), (b0, b1) = _kids(a), _kids(b)
        r = _mk(_apply(op, a0, b0, absorb, unit), _apply(op, a1, b1, absorb, unit))
        op[key] = r
    return r


def union(a: int, b: int) -> int:
    return _apply(_union, a, b, FULL, EMPTY)


def intersect(a: int, b: int) -> int:
    return _apply(_inter, a, b, EMPTY, FULL)


def complement(a: int) -> int:
    r = _compl.get(a)
    if r is None:
        lo, hi = _nodes[a]
        r = _mk(complement(lo), complement(hi))
        _compl[a] = r
    return r


def measure(a: int) -> Dyadic:
    r = _measure.get(a)
    if r is None:
        lo, hi = _nodes[a]
        r = (measure(lo) + measure(hi)).half()
        _measure[a] = r
    return r


def depth(a: int) -> int:
    """Number of variables the set depends on (0 for terminals)."""
    r = _depth.get(a)
    if r is None:
        lo, hi = _nodes[a]
        r = 1 + max(depth(lo), depth(hi))
        _depth[a] = r
    return r


def cylinder(bits: Sequence) -> int:
    """The set fixing variable ``i`` to ``bits[i]`` (``None`` leaves it free)."""
    n = FULL
    for b in reversed(tuple(bits)):
        if b is None:
            n = _mk(n, n)
        elif b == 0:
            n = _mk(n, EMPTY)
        elif b == 1:
            n = _mk(EMPTY, n)
        else:
            raise SchemaError(f"not a binary letter: {b!r}")
    return n


def translate(a: int, t: Sequence[int]) -> int:
    """Flip variable ``i`` wherever ``t[i] == 1``."""
    t = tuple(t)
    memo: dict = {}

    def go(n, d):
        if n <= FULL or d >= len(t):
            return n
        key = (n, d)
        r = memo.get(key)
        if r is None:
            lo, hi = _nodes[n]
            lo, hi = go(lo, d + 1), go(hi, d + 1)
            r = _mk(hi, lo) if t[d] else _mk(lo, hi)
            memo[key] = r
        return r

    return go(a, 0)


def swap_pairs(a: int) -> int:
    """Exchange variables ``2i`` and ``2i+1`` for every ``i``."""
    r = _swap.get(a)
    if r is None:
        x0, x1 = _kids(a)
        a0, a1 = _kids(x0)
        b0, b1 = _kids(x1)
        r = _mk(_mk(swap_pairs(a0), swap_pairs(b0)), _mk(swap_pairs(a1), swap_pairs(b1)))
        _swap[a] = r
    return r


def subnode(a: int, path: Iterable[int]) -> int:
    for b in path:
        if a <= FULL:
            return a
        a = _nodes[a][b]
    return a


def full_paths(a: int, prefix: tuple = ()):
    """Paths to FULL in increasing lexicographic order (a disjoint cover)."""
    if a == FULL:
        yield prefix
    elif a != EMPTY:
        lo, hi = _nodes[a]
        yield from full_paths(lo, prefix + (0,))
        yield from full_paths(hi, prefix + (1,))


def interleave(left: Node, right: Node) -> tuple:
    n = max(len(left), len(right))
    out = []
    for i in range(n):
        out.append(left[i] if i < len(left) else None)
        out.append(right[i] if i < len(right) else None)
    return tuple(out)


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ClopenSet:
    """A clopen subset of the Cantor space."""

    root: int

    @classmethod
    def empty(cls) -> "ClopenSet":
        return cls(EMPTY)

    @classmethod
    def full(cls) -> "ClopenSet":
        return cls(FULL)

    @classmethod
    def from_generators(cls, generators: Iterable[Sequence[int]], check_antichain: bool = True) -> "ClopenSet":
        gens = [tuple(g) for g in generators]
        if check_antichain:
            for a, b in itertools.combinations(gens, 2):
                if comparable(a, b):
                    raise SchemaError(f"generators {a} and {b} are comparable")
        root = EMPTY
        for g in gens:
            root = union(root, cylinder(g))
        return cls(root)

    def generators(self) -> list:
        return list(full_paths(self.root))

    def measure(self) -> Dyadic:
        return measure(self.root)

    def __or__(self, other: "ClopenSet") -> "ClopenSet":
        return ClopenSet(union(self.root, other.root))

    def __and__(self, other: "ClopenSet") -> "ClopenSet":
        return ClopenSet(intersect(self.root, other.root))

    def complement(self) -> "ClopenSet":
        return ClopenSet(complement(self.root))

    def translate(self, t: Sequence[int]) -> "ClopenSet":
        return ClopenSet(translate(self.root, t))

    def restrict_to(self, node: Node) -> "ClopenSet":
        """Intersection with the cylinder ``[node]``."""
        return ClopenSet(intersect(self.root, cylinder(node)))

    def mass_in(self, node: Node) -> Dyadic:
        return measure(intersect(self.root, cylinder(node)))

    def __le__(self, other: "ClopenSet") -> bool:
        return intersect(self.root, other.root) == self.root

    @property
    def depth(self) -> int:
        return depth(self.root)

    def to_json(self) -> dict:
        return {"generators": [list(g) for g in self.generators()]}

    @classmethod
    def from_json(cls, data) -> "ClopenSet":
        if not isinstance(data, dict) or set(data) != {"generators"}:
            raise SchemaError("clopen set JSON must be {'generators': [...]}")
        if not isinstance(data["generators"], list):
            raise SchemaError("'generators' must be a list")
        try:
            return cls.from_generators(tuple(g) for g in data["generators"])
        except TypeError:
            raise SchemaError("generators must be lists of 0/1") from None


@dataclass(frozen=True)
class ClopenPlane:
    """A clopen subset of the Cantor plane."""

    root: int

    @classmethod
    def empty(cls) -> "ClopenPlane":
        return cls(EMPTY)

    @classmethod
    def full(cls) -> "ClopenPlane":
        return cls(FULL)

    @classmethod
    def box(cls, left: Node, right: Node) -> "ClopenPlane":
        return cls(cylinder(interleave(tuple(left), tuple(right))))

    @classmethod
    def from_boxes(cls, boxes: Iterable) -> "ClopenPlane":
        root = EMPTY
        for b in boxes:
            left, right = (b.left, b.right) if hasattr(b, "left") else b
            root = union(root, cylinder(interleave(tuple(left), tuple(right))))
        return cls(root)

    @classmethod
    def diagonal_band(cls, m: int) -> "ClopenPlane":
        """``{(x, y): x|m == y|m}``."""
        n = FULL
        for _ in range(m):
            n = _mk(_mk(n, EMPTY), _mk(EMPTY, n))
        return cls(n)

    def boxes(self) -> list:
        """Disjoint boxes covering the set, in canonical order."""
        out = []
        for p in full_paths(self.root):
            out.append((tuple(p[0::2]), tuple(p[1::2])))
        return out

    def measure(self) -> Dyadic:
        return measure(self.root)

    def __or__(self, other: "ClopenPlane") -> "ClopenPlane":
        return ClopenPlane(union(self.root, other.root))

    def __and__(self, other: "ClopenPlane") -> "ClopenPlane":
        return ClopenPlane(intersect(self.root, other.root))

    def complement(self) -> "ClopenPlane":
        return ClopenPlane(complement(self.root))

    def swap(self) -> "ClopenPlane":
        return ClopenPlane(swap_pairs(self.root))

    def translate(self, t: Sequence[int], u: Sequence[int]) -> "ClopenPlane":
        """Coordinatewise addition mod 2 of ``(t, u)``."""
        bits = tuple(b or 0 for b in interleave(tuple(t), tuple(u)))
        return ClopenPlane(translate(self.root, bits))

    def mass_in_box(self, left: Node, right: Node) -> Dyadic:
        return measure(intersect(self.root, cylinder(interleave(tuple(left), tuple(right)))))

    def relative_mass(self, left: Node, right: Node) -> Dyadic:
        """Mass inside the box divided by the box's area."""
        if len(left) != len(right):
            return self.mass_in_box(left, right).scale(len(left) + len(right))
        return measure(subnode(self.root, interleave(tuple(left), tuple(right))))

    def __le__(self, other: "ClopenPlane") -> bool:
        return intersect(self.root, other.root) == self.root

    @property
    def depth(self) -> int:
        return depth(self.root)

    def to_json(self) -> dict:
        return {"boxes": [{"left": list(a), "right": list(b)} for a, b in self.boxes()]}

    @classmethod
    def from_json(cls, data) -> "ClopenPlane":
        if not isinstance(data, dict) or set(data) != {"boxes"} or not isinstance(data["boxes"], list):
            raise SchemaError("clopen plane JSON must be {'boxes': [...]}")
        try:
            return cls.from_boxes((tuple(b["left"]), tuple(b["right"])) for b in data["boxes"])
        except (KeyError, TypeError):
            raise SchemaError("boxes need 'left' and 'right' lists") from None


def symmetrize(A: ClopenPlane) -> ClopenPlane:
    """``A`` intersected with its mirror image in the diagonal."""
    return A & A.swap()


def group_translate(A, t: Sequence[int], u: Sequence[int] | None = None):
    if isinstance(A, ClopenPlane):
        return A.translate(t, t if u is None else u)
    return A.translate(t)
