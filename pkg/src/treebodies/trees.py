"""Finite trees over 2 or omega and the structural operators on them.

Nodes are plain tuples of naturals. A :class:`FiniteTree` is an immutable,
prefix-closed set of nodes; infinite trees are represented by
:class:`treebodies.oracles.TreeOracle` and approximated into finite ones.
"""
from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence, Union

from .errors import NodeNotInTree, NoSplitWithinFuel, SchemaError

Node = tuple  # tuple[int, ...]


class Alphabet(enum.Enum):
    BINARY = "binary"
    OMEGA = "omega"

    def admits(self, letter: int) -> bool:
        if not isinstance(letter, int) or isinstance(letter, bool) or letter < 0:
            return False
        return self is Alphabet.OMEGA or letter in (0, 1)


class TreeKind(enum.Enum):
    PERFECT = "perfect"
    MILLER = "miller"
    LAVER = "laver"
    SILVER = "silver"
    UNIFORMLY_PERFECT = "uniformly_perfect"
    SLALOM = "slalom"
    SPLITS_AND_RESTS = "splits_and_rests"
    EVENLY_CUT = "evenly_cut"


def lenlex(node: Node):
    """Sort key for the canonical length-lexicographic node order."""
    return (len(node), node)


def make_node(entries: Iterable[int], alphabet: Alphabet = Alphabet.OMEGA) -> Node:
    node = tuple(entries)
    for a in node:
        if not alphabet.admits(a):
            raise SchemaError(f"letter {a!r} not allowed over {alphabet.value}")
    return node


def is_prefix(a: Node, b: Node) -> bool:
    return len(a) <= len(b) and b[: len(a)] == a


def comparable(a: Node, b: Node) -> bool:
    return is_prefix(a, b) or is_prefix(b, a)


def meet(a: Node, b: Node) -> Node:
    """Longest common prefix."""
    n = 0
    for x, y in zip(a, b):
        if x != y:
            break
        n += 1
    return a[:n]


def pad(node: Node, length: int, letter: int = 0) -> Node:
    if len(node) >= length:
        return node
    return node + (letter,) * (length - len(node))


@dataclass(frozen=True)
class FiniteTree:
    alphabet: Alphabet
    nodes: frozenset

    def __post_init__(self):
        for node in self.nodes:
            if not isinstance(node, tuple):
                raise SchemaError(f"node {node!r} is not a tuple")
            for a in node:
                if not self.alphabet.admits(a):
                    raise SchemaError(f"letter {a!r} not allowed over {self.alphabet.value}")
            if node and node[:-1] not in self.nodes:
                raise SchemaError(f"not prefix-closed: {node[:-1]!r} missing below {node!r}")

    @classmethod
    def from_nodes(cls, nodes: Iterable[Sequence[int]], alphabet: Alphabet = Alphabet.OMEGA) -> "FiniteTree":
        return cls(alphabet, frozenset(tuple(n) for n in nodes))

    @classmethod
    def closure(cls, nodes: Iterable[Sequence[int]], alphabet: Alphabet = Alphabet.OMEGA) -> "FiniteTree":
        """Downward closure of a family of nodes."""
        out = set()
        for n in nodes:
            n = tuple(n)
            for i in range(len(n) + 1):
                out.add(n[:i])
        return cls(alphabet, frozenset(out))

    @classmethod
    def full(cls, alphabet: Alphabet, depth: int, width: int = 2) -> "FiniteTree":
        letters = range(2 if alphabet is Alphabet.BINARY else width)
        level = [()]
        out = {()}
        for _ in range(depth):
            level = [n + (a,) for n in level for a in letters]
            out.update(level)
        return cls(alphabet, frozenset(out))

    def __contains__(self, node) -> bool:
        return tuple(node) in self.nodes

    def __len__(self) -> int:
        return len(self.nodes)

    def __iter__(self):
        return iter(self.sorted_nodes())

    def __le__(self, other: "FiniteTree") -> bool:
        return self.nodes <= other.nodes

    def sorted_nodes(self) -> list:
        return sorted(self.nodes, key=lenlex)

    @cached_property
    def _children(self) -> dict:
        kids: dict = {n: [] for n in self.nodes}
        for n in self.nodes:
            if n:
                kids[n[:-1]].append(n[-1])
        return {n: tuple(sorted(v)) for n, v in kids.items()}

    @cached_property
    def _max_below(self) -> dict:
        """Length of the longest node extending each node."""
        best = {n: len(n) for n in self.nodes}
        for n in sorted(self.nodes, key=len, reverse=True):
            if n:
                p = n[:-1]
                if best[n] > best[p]:
                    best[p] = best[n]
        return best

    def _require(self, node: Node) -> Node:
        node = tuple(node)
        if node not in self.nodes:
            raise NodeNotInTree(node)
        return node

    def successors(self, node: Node, fuel: int | None = None) -> frozenset:
        letters = self._children[self._require(node)]
        if fuel is not None:
            letters = letters[:fuel]
        return frozenset(letters)

    def successor_letters(self, node: Node) -> tuple:
        """Successor letters in increasing order."""
        return self._children[self._require(node)]

    def split_nodes(self) -> frozenset:
        return frozenset(n for n, k in self._children.items() if len(k) >= 2)

    def immediate_splitting_successors(self, node: Node) -> frozenset:
        node = self._require(node)
        out = set()
        stack = [node]
        while stack:
            n = stack.pop()
            kids = self._children[n]
            if len(kids) >= 2:
                out.add(n)
            else:
                stack.extend(n + (a,) for a in kids)
        return frozenset(out)

    def stem(self, fuel: int | None = None) -> Node:
        if not self.nodes:
            raise NoSplitWithinFuel("empty tree")
        fuel = self.height if fuel is None else fuel
        node = ()
        while True:
            kids = self._children[node]
            if len(kids) >= 2:
                return node
            if not kids or len(node) >= fuel:
                raise NoSplitWithinFuel(f"no splitting node within depth {fuel}")
            node = node + kids

    def tips(self) -> frozenset:
        return frozenset(n for n, k in self._children.items() if not k)

    @property
    def height(self) -> int:
        return self._max_below[()] if self.nodes else 0

    def node_rank(self, node: Node) -> int:
        node = self._require(node)
        return self._max_below[node] - len(node)

    def level(self, n: int) -> list:
        return sorted((x for x in self.nodes if len(x) == n))

    def restrict(self, depth: int) -> "FiniteTree":
        return FiniteTree(self.alphabet, frozenset(n for n in self.nodes if len(n) <= depth))

    def cone(self, node: Node) -> "FiniteTree":
        """Nodes comparable with ``node``."""
        node = tuple(node)
        return FiniteTree(self.alphabet, frozenset(n for n in self.nodes if comparable(n, node)))

    def union(self, other: "FiniteTree") -> "FiniteTree":
        return FiniteTree(self.alphabet, self.nodes | other.nodes)

    # -- serialization -------------------------------------------------

    def to_json(self) -> dict:
        return {"alphabet": self.alphabet.value, "nodes": [list(n) for n in self.sorted_nodes()]}

    @classmethod
    def from_json(cls, data) -> "FiniteTree":
        if isinstance(data, str):
            data = json.loads(data)
        if not isinstance(data, dict) or set(data) != {"alphabet", "nodes"}:
            raise SchemaError("tree JSON must have exactly the keys 'alphabet' and 'nodes'")
        try:
            alphabet = Alphabet(data["alphabet"])
        except ValueError:
            raise SchemaError(f"unknown alphabet {data['alphabet']!r}") from None
        nodes = data["nodes"]
        if not isinstance(nodes, list) or not all(isinstance(n, list) for n in nodes):
            raise SchemaError("'nodes' must be a list of lists")
        return cls.from_nodes(nodes, alphabet)

    def to_dot(self, name: str = "tree") -> str:
        return tree_to_dot(self, name)


def tree_to_dot(tree: FiniteTree, name: str = "tree") -> str:
    """Graphviz source with one vertex per node, labeled by its entries."""
    ids = {n: i for i, n in enumerate(tree.sorted_nodes())}
    lines = [f"digraph {name} {{", "  node [shape=box, fontname=monospace];"]
    for n, i in ids.items():
        label = "∅" if not n else ",".join(map(str, n))
        lines.append(f'  n{i} [label="{label}"];')
    for n, i in ids.items():
        if n:
            lines.append(f"  n{ids[n[:-1]]} -> n{i};")
    lines.append("}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# module-level operators accepting finite trees or oracles

TreeLike = Union[FiniteTree, "TreeOracle"]  # noqa: F821


def successors(tree: TreeLike, node: Node, fuel: int | None = None) -> frozenset:
    if isinstance(tree, FiniteTree):
        return tree.successors(node, fuel)
    if fuel is None:
        raise ValueError("oracles need explicit enumeration fuel")
    return frozenset(tree.successors(node, fuel))


def split_nodes(tree: FiniteTree) -> frozenset:
    return tree.split_nodes()


def immediate_splitting_successors(tree: FiniteTree, node: Node) -> frozenset:
    return tree.immediate_splitting_successors(node)


def stem(tree: TreeLike, fuel: int | None = None) -> Node:
    if isinstance(tree, FiniteTree):
        return tree.stem(fuel)
    return tree.stem(fuel if fuel is not None else 10_000)


def tips(tree: FiniteTree) -> frozenset:
    return tree.tips()


def height(tree: FiniteTree) -> int:
    return tree.height


def node_rank(tree: FiniteTree, node: Node) -> int:
    return tree.node_rank(node)


# ---------------------------------------------------------------------------
# finite-depth kind predicates


@dataclass(frozen=True)
class ConsistentTo:
    """No violation is visible below the frontier ``depth``."""

    depth: int

    def __bool__(self) -> bool:
        return True


@dataclass(frozen=True)
class Violated:
    witness: tuple

    def __bool__(self) -> bool:
        return False


Verdict = Union[ConsistentTo, Violated]

DEFAULT_OMEGA_THRESHOLD = 3


def default_slalom_words(max_len: int = 2, max_letter: int = 2) -> list:
    words = [()]
    frontier = [()]
    for _ in range(max_len):
        frontier = [w + (a,) for w in frontier for a in range(max_letter + 1)]
        words.extend(frontier)
    return words


def check_kind(
    tree: FiniteTree,
    kind: TreeKind,
    frontier_depth: int | None = None,
    *,
    omega_threshold: int = DEFAULT_OMEGA_THRESHOLD,
    infinite_branching: bool | None = None,
    slalom_words: Sequence[Node] | None = None,
) -> Verdict:
    """Decide ``kind`` on the part of ``tree`` below ``frontier_depth``.

    Nodes shorter than the frontier are *interior*; their successor sets are
    known exactly. Nodes at the frontier have unknown successors and never
    witness a violation. A node counts as omega-splitting when it is interior,
    has at least ``omega_threshold`` successors and the tree's source promised
    infinite branching (``infinite_branching``, defaulting to True exactly for
    the omega alphabet).

    Slalom is judged on ``slalom_words`` (default: words of length <= 2 over
    letters <= 2): a word is imprinted if some interval inside the frontier is
    copied by every node long enough to cover it.
    """
    depth = tree.height if frontier_depth is None else frontier_depth
    if depth < 0 or depth > tree.height:
        raise ValueError(f"frontier depth {depth} outside [0, {tree.height}]")
    if not tree.nodes:
        return ConsistentTo(depth)
    if infinite_branching is None:
        infinite_branching = tree.alphabet is Alphabet.OMEGA
    checker = _CHECKERS[kind]
    witness = checker(_View(tree, depth, omega_threshold, infinite_branching), slalom_words)
    return ConsistentTo(depth) if witness is None else Violated(witness)


class _View:
    def __init__(self, tree: FiniteTree, depth: int, threshold: int, promise: bool):
        self.tree = tree
        self.depth = depth
        self.threshold = threshold
        self.promise = promise
        self.levels = [tree.level(n) for n in range(depth + 1)]

    def kids(self, node):
        return self.tree.successor_letters(node)

    def splits(self, node) -> bool:
        return len(self.kids(node)) >= 2

    def omega_split(self, node) -> bool:
        return self.promise and len(node) < self.depth and len(self.kids(node)) >= self.threshold

    def interior(self):
        for n in range(self.depth):
            yield n, self.levels[n]


def _leaf_at(view: _View, nodes):
    for x in nodes:
        if not view.kids(x):
            return x
    return None


def _check_perfect(view, _words):
    for _, nodes in view.interior():
        leaf = _leaf_at(view, nodes)
        if leaf is not None:
            return (leaf,)
    return None


def _check_miller(view, _words):
    if not view.promise:
        return ((),)
    return _check_perfect(view, _words)


def _check_laver(view, _words):
    non_omega = [x for _, nodes in view.interior() for x in nodes if not view.omega_split(x)]
    everything = [x for nodes in view.levels for x in nodes]
    for a in non_omega:
        for b in everything:
            if not comparable(a, b):
                return (a, b)
    return None


def _check_uniformly_perfect(view, _words):
    for _, nodes in view.interior():
        mixed = any(view.splits(x) for x in nodes)
        for x in nodes:
            if not view.kids(x) or (mixed and not view.splits(x)):
                return (x,)
    return None


def _check_silver(view, _words):
    for _, nodes in view.interior():
        first = nodes[0]
        for x in nodes[1:]:
            if view.kids(x) != view.kids(first):
                return (first, x)
        if not view.kids(first):
            return (first,)
    return None


def _check_splits_and_rests(view, words):
    for _, nodes in view.interior():
        for x in nodes:
            if not view.kids(x):
                return (x,)
            if view.splits(x) and len(x) + 1 < view.depth:
                for a in view.kids(x):
                    if view.splits(x + (a,)):
                        return (x, x + (a,))
    return None


def _check_slalom(view, words):
    words = default_slalom_words() if words is None else [tuple(w) for w in words]
    nodes = [x for lvl in view.levels for x in lvl]
    for word in words:
        if not _imprinted(nodes, word, view.depth):
            return (word,)
    return None


def _imprinted(nodes, word, depth) -> bool:
    k = len(word)
    for start in range(0, depth - k + 1):
        stop = start + k
        if all(x[start:stop] == word for x in nodes if len(x) >= stop):
            return True
    return False


def _check_evenly_cut(view, _words):
    h = view.tree.height
    for t in sorted(view.tree.tips(), key=lenlex):
        if len(t) != h:
            return (t,)
    return None


_CHECKERS = {
    TreeKind.PERFECT: _check_perfect,
    TreeKind.MILLER: _check_miller,
    TreeKind.LAVER: _check_laver,
    TreeKind.UNIFORMLY_PERFECT: _check_uniformly_perfect,
    TreeKind.SILVER: _check_silver,
    TreeKind.SPLITS_AND_RESTS: _check_splits_and_rests,
    TreeKind.SLALOM: _check_slalom,
    TreeKind.EVENLY_CUT: _check_evenly_cut,
}
