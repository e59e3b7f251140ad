"""Lazy, possibly infinite trees queried with explicit enumeration fuel.

``children(node, fuel)`` returns the first ``fuel`` successor letters of a
member ``node`` in increasing order. Membership of ``node + (a,)`` can
therefore always be decided with fuel ``a + 1``.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable

from .errors import NodeNotInTree, NoSplitWithinFuel, NotSilver, SchemaError
from .trees import Alphabet, FiniteTree, Node, TreeKind

DEFAULT_FUEL = 10_000

Children = Callable[[Node, int], tuple]


@dataclass(frozen=True)
class TreeOracle:
    alphabet: Alphabet
    children: Children = field(compare=False)
    infinite_branching: bool = False
    kind: TreeKind | None = None
    descriptor: dict | None = field(default=None, compare=False)

    def contains(self, node: Node) -> bool:
        node = tuple(node)
        for i, a in enumerate(node):
            if not self.alphabet.admits(a) or a not in self.children(node[:i], a + 1):
                return False
        return True

    def successors(self, node: Node, fuel: int) -> tuple:
        node = tuple(node)
        if not self.contains(node):
            raise NodeNotInTree(node)
        return tuple(self.children(node, fuel))[:fuel]

    def stem(self, fuel: int = DEFAULT_FUEL) -> Node:
        node = ()
        for _ in range(fuel + 1):
            kids = self.children(node, 2)
            if len(kids) >= 2:
                return node
            if not kids:
                break
            node = node + (kids[0],)
        raise NoSplitWithinFuel(f"no splitting node within depth {fuel}")

    def approximate(self, depth: int, fuel: int = 3) -> FiniteTree:
        """Nodes of length <= depth, each node expanded to its first ``fuel`` letters."""
        out = {()}
        level = [()]
        for _ in range(depth):
            level = [n + (a,) for n in level for a in self.children(n, fuel)[:fuel]]
            out.update(level)
        return FiniteTree(self.alphabet, frozenset(out))

    def to_json(self) -> dict:
        if self.descriptor is None:
            raise SchemaError("oracle has no JSON descriptor")
        return dict(self.descriptor)


def _letters(alphabet: Alphabet, fuel: int) -> tuple:
    return (0, 1)[:fuel] if alphabet is Alphabet.BINARY else tuple(range(fuel))


def full_tree(alphabet: Alphabet = Alphabet.OMEGA) -> TreeOracle:
    return TreeOracle(
        alphabet,
        lambda node, fuel: _letters(alphabet, fuel),
        infinite_branching=alphabet is Alphabet.OMEGA,
        kind=TreeKind.LAVER if alphabet is Alphabet.OMEGA else TreeKind.SILVER,
        descriptor={"builtin": "full", "alphabet": alphabet.value, "params": {}},
    )


def chain(length: int | None = None, letter: int = 0, alphabet: Alphabet = Alphabet.OMEGA) -> TreeOracle:
    """The branch ``letter, letter, ...``; finite when ``length`` is given."""

    def children(node, fuel):
        if length is not None and len(node) >= length:
            return ()
        return (letter,)[:fuel]

    return TreeOracle(
        alphabet,
        children,
        descriptor={"builtin": "chain", "alphabet": alphabet.value,
                    "params": {"length": length, "letter": letter}},
    )


def level_split_tree(split_levels, alphabet: Alphabet = Alphabet.OMEGA, letter: int = 0) -> TreeOracle:
    """Every node on a level in ``split_levels`` takes all letters; other nodes take ``letter``."""
    levels = frozenset(split_levels)

    def children(node, fuel):
        if len(node) in levels:
            return _letters(alphabet, fuel)
        return (letter,)[:fuel]

    return TreeOracle(
        alphabet,
        children,
        infinite_branching=alphabet is Alphabet.OMEGA,
        kind=TreeKind.SILVER,
        descriptor={"builtin": "level_split", "alphabet": alphabet.value,
                    "params": {"split_levels": sorted(levels), "letter": letter}},
    )


def finite_tree_oracle(tree: FiniteTree, kind: TreeKind | None = None) -> TreeOracle:
    return TreeOracle(
        tree.alphabet,
        lambda node, fuel: tree.successor_letters(node)[:fuel],
        kind=kind,
        descriptor={"builtin": "finite", "alphabet": tree.alphabet.value,
                    "params": {"tree": tree.to_json()}},
    )


def random_silver(seed: int, split_prob: float = 0.5, alphabet: Alphabet = Alphabet.BINARY) -> TreeOracle:
    """A seeded Silver tree: each level either splits or follows one random letter."""
    cache: dict = {}

    def level_letters(n):
        if n not in cache:
            rng = random.Random(f"silver:{seed}:{n}")
            cache[n] = None if rng.random() < split_prob else rng.randrange(2)
        return cache[n]

    def children(node, fuel):
        a = level_letters(len(node))
        if a is None:
            return _letters(alphabet, fuel)
        return (a,)[:fuel]

    return TreeOracle(
        alphabet,
        children,
        infinite_branching=alphabet is Alphabet.OMEGA,
        kind=TreeKind.SILVER,
        descriptor={"builtin": "random_silver", "alphabet": alphabet.value,
                    "params": {"seed": seed, "split_prob": split_prob}},
    )


def random_miller(seed: int, split_prob: float = 0.35, max_letter: int = 4) -> TreeOracle:
    """A seeded omega tree whose nodes have either one or omega successors.

    Nodes of length 2 mod 3 always omega-split, so every node extends to an
    omega-splitting node within three steps.
    """

    def children(node, fuel):
        rng = random.Random(f"miller:{seed}:{node}")
        if len(node) % 3 == 2 or rng.random() < split_prob:
            return tuple(range(fuel))
        return (rng.randrange(max_letter + 1),)[:fuel]

    return TreeOracle(
        Alphabet.OMEGA,
        children,
        infinite_branching=True,
        kind=TreeKind.MILLER,
        descriptor={"builtin": "random_miller", "alphabet": "omega",
                    "params": {"seed": seed, "split_prob": split_prob, "max_letter": max_letter}},
    )


BUILTIN_TREES = {
    "full": lambda alphabet, p: full_tree(alphabet),
    "chain": lambda alphabet, p: chain(p.get("length"), p.get("letter", 0), alphabet),
    "level_split": lambda alphabet, p: level_split_tree(p["split_levels"], alphabet, p.get("letter", 0)),
    "random_silver": lambda alphabet, p: random_silver(p["seed"], p.get("split_prob", 0.5), alphabet),
    "random_miller": lambda alphabet, p: random_miller(p["seed"], p.get("split_prob", 0.35),
                                                      p.get("max_letter", 4)),
    "finite": lambda alphabet, p: finite_tree_oracle(FiniteTree.from_json(p["tree"])),
}


def oracle_from_json(data: dict) -> TreeOracle:
    """Rebuild a built-in oracle from ``{"builtin", "alphabet", "params"}``."""
    if not isinstance(data, dict) or "builtin" not in data:
        raise SchemaError("tree descriptor needs a 'builtin' key")
    name = data["builtin"]
    if name not in BUILTIN_TREES:
        raise SchemaError(f"unknown builtin tree {name!r}")
    try:
        alphabet = Alphabet(data.get("alphabet", "omega"))
    except ValueError:
        raise SchemaError(f"unknown alphabet {data.get('alphabet')!r}") from None
    params = data.get("params", {}) or {}
    if not isinstance(params, dict):
        raise SchemaError("'params' must be an object")
    try:
        return BUILTIN_TREES[name](alphabet, params)
    except (KeyError, TypeError) as exc:
        raise SchemaError(f"bad params for {name!r}: {exc}") from None


def normalize_miller(tree: TreeOracle, fuel: int = 64) -> TreeOracle:
    """Contract finitely-branching nodes to their least letter.

    A node whose first ``fuel`` letters all exist is treated as omega-split;
    anything else keeps only its minimal successor, so every node of the
    result has one or omega successors.
    """

    def children(node, k):
        kids = tree.children(node, fuel)
        if len(kids) >= fuel:
            return tree.children(node, k)
        return kids[:1][:k]

    return TreeOracle(tree.alphabet, children, tree.infinite_branching, tree.kind, tree.descriptor)


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SplitsAndRests:
    tree: FiniteTree
    kept_levels: tuple  # splitting levels preserved, pairwise >= 2 apart
    forced: tuple  # (level, letter) for splitting levels collapsed to one letter


def silver_level_profile(tree: TreeOracle, depth: int, fuel: int = 2) -> list:
    """Successor-letter set of each level below ``depth``, checking level uniformity.

    Raises NotSilver when two nodes of one level disagree.
    """
    profile = []
    level = [()]
    for n in range(depth):
        sets = {tuple(tree.children(x, fuel)[:fuel]) for x in level}
        if len(sets) != 1:
            a, b = sorted(sets)[:2]
            raise NotSilver(f"level {n} has successor sets {a} and {b}")
        (letters,) = sets
        profile.append(letters)
        level = [x + (a,) for x in level for a in letters]
    return profile


def silver_splits_and_rests(tree: TreeOracle, depth: int, fuel: int = 2) -> SplitsAndRests:
    """Thin a Silver tree so no two consecutive levels split.

    Splitting levels are kept greedily from the bottom (least first, each at
    least two above the previously kept one); every skipped splitting level
    follows its least successor letter.
    """
    profile = silver_level_profile(tree, depth, fuel)
    kept, forced = [], []
    for n, letters in enumerate(profile):
        if len(letters) < 2:
            continue
        if not kept or n > kept[-1] + 1:
            kept.append(n)
        else:
            forced.append((n, min(letters)))
    force = dict(forced)
    out = {()}
    level = [()]
    for n, letters in enumerate(profile):
        use = (force[n],) if n in force else letters
        level = [x + (a,) for x in level for a in use]
        out.update(level)
    return SplitsAndRests(FiniteTree(tree.alphabet, frozenset(out)), tuple(kept), tuple(forced))
