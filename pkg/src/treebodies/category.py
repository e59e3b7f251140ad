"""Category-side constructions in the Baire plane.

:func:`inscribe_category` builds finite approximations of a Miller tree ``M``
and a uniformly perfect ``P`` inside it whose rectangle avoids the complement
of a dense G-delta set (off the diagonal), together with a replayable
certificate log. The remaining functions build the finite avoidance witnesses
showing that stronger tree types fail.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable

from .dense_open import (
    Box,
    Containment,
    MillerU,
    OpenDenseOracle,
    SilverU,
    UpMillerG,
    oracle_from_json,
    refine_family,
    refine_pair,
    _class_count,
)
from .errors import (
    LevelOverflow,
    NoSplitWithinFuel,
    NotLaverLike,
    NotMillerLike,
    NotUPMillerLike,
    SchemaError,
)
from .oracles import DEFAULT_FUEL, TreeOracle, normalize_miller, silver_splits_and_rests
from .trees import Alphabet, FiniteTree, Node, TreeKind, check_kind, comparable, is_prefix, meet

DEFAULT_MAX_LEVELS = 3


# ---------------------------------------------------------------------------
# dense sequences


@dataclass(frozen=True)
class DenseSequence:
    """A descending sequence ``U_1 ⊇ U_2 ⊇ ...`` of open dense oracles."""

    at: Callable[[int], OpenDenseOracle] = field(compare=False)
    descriptor: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return dict(self.descriptor)


def constant_sequence(U: OpenDenseOracle) -> DenseSequence:
    return DenseSequence(lambda n: U, {"kind": "constant", "oracle": U.to_json()})


def tail_sequence(builtin: str = "miller_U") -> DenseSequence:
    """``U_n`` keeps only the generators of support at least ``n``."""
    cls = {"miller_U": MillerU, "silver_U": SilverU}.get(builtin)
    if cls is None:
        raise SchemaError(f"no tail sequence for {builtin!r}")
    cache: dict = {}

    def at(n):
        if n not in cache:
            cache[n] = cls(n)
        return cache[n]

    return DenseSequence(at, {"kind": "tail", "builtin": builtin})


def sequence_from_json(data: dict) -> DenseSequence:
    if not isinstance(data, dict):
        raise SchemaError("dense sequence descriptor must be an object")
    kind = data.get("kind")
    if kind == "constant":
        return constant_sequence(oracle_from_json(data.get("oracle")))
    if kind == "tail":
        return tail_sequence(data.get("builtin", "miller_U"))
    raise SchemaError(f"unknown dense sequence kind {kind!r}")


# ---------------------------------------------------------------------------
# inscription


@dataclass(frozen=True)
class LogEntry:
    generation: int
    index_a: Node
    index_b: Node
    box: Box
    certified_against: int

    def to_json(self) -> dict:
        return {"generation": self.generation, "index_a": list(self.index_a),
                "index_b": list(self.index_b), "box": self.box.to_json(),
                "certified_against": self.certified_against}

    @classmethod
    def from_json(cls, data) -> "LogEntry":
        try:
            return cls(int(data["generation"]), tuple(data["index_a"]), tuple(data["index_b"]),
                       Box.from_json(data["box"]), int(data["certified_against"]))
        except (KeyError, TypeError, ValueError):
            raise SchemaError(f"bad log entry {data!r}") from None


@dataclass
class InscriptionResult:
    levels: int
    labels: dict  # index word -> node
    generation: dict  # index word -> generation it was created in
    miller_approx: FiniteTree
    uniform_approx: FiniteTree
    witness_log: list

    def to_json(self) -> dict:
        return {
            "levels": self.levels,
            "labels": [{"index": list(k), "node": list(v), "generation": self.generation[k]}
                       for k, v in sorted(self.labels.items(), key=lambda kv: (len(kv[0]), kv[0]))],
            "miller_approx": self.miller_approx.to_json(),
            "uniform_approx": self.uniform_approx.to_json(),
            "witness_log": [e.to_json() for e in self.witness_log],
        }

    @classmethod
    def from_json(cls, data) -> "InscriptionResult":
        try:
            labels, gens = {}, {}
            for item in data["labels"]:
                idx = tuple(item["index"])
                labels[idx] = tuple(item["node"])
                gens[idx] = int(item["generation"])
            return cls(int(data["levels"]), labels, gens,
                       FiniteTree.from_json(data["miller_approx"]),
                       FiniteTree.from_json(data["uniform_approx"]),
                       [LogEntry.from_json(e) for e in data["witness_log"]])
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, SchemaError):
                raise
            raise SchemaError(f"bad inscription record: {exc}") from None


def _words(alphabet_size: int, max_len: int):
    for n in range(max_len + 1):
        yield from itertools.product(range(alphabet_size), repeat=n)


def _certify_family(U, members, gen, at_index, labels, log):
    """Refine ``members`` (index word, seed node) as one family and store labels."""
    seeds = [seed for _, seed in members]
    out = refine_family(U, seeds)
    for (idx, _), node in zip(members, out):
        labels[idx] = node
    for a in range(len(members)):
        for b in range(len(members)):
            if a != b:
                ia, ib = members[a][0], members[b][0]
                log.append(LogEntry(gen, ia, ib, Box(labels[ia], labels[ib]), at_index))


def inscribe_category(G: DenseSequence, levels: int, max_levels: int = DEFAULT_MAX_LEVELS) -> InscriptionResult:
    """Labels ``tau_sigma`` for index words ``sigma`` in ``(levels+1)^{<= levels+1}``.

    Generation ``g`` holds the labels created at step ``g`` and every pair of
    incomparable generation-``g`` labels is certified against ``G.at(g)``.
    """
    if levels < 1:
        raise ValueError("levels must be at least 1")
    if levels > max_levels:
        raise LevelOverflow(f"levels={levels} exceeds the bound {max_levels}")
    labels: dict = {(): ()}
    gen: dict = {(): 0}
    log: list = []

    a, b = refine_pair(G.at(1), (0,), (1,))
    labels[(0,)], labels[(1,)] = a, b
    gen[(0,)] = gen[(1,)] = 1
    log.append(LogEntry(1, (0,), (1,), Box(a, b), 1))
    log.append(LogEntry(1, (1,), (0,), Box(b, a), 1))

    members = [(w, labels[w[:1]] + (w[1],)) for w in itertools.product(range(2), repeat=2)]
    _certify_family(G.at(2), members, 2, 2, labels, log)
    for w, _ in members:
        gen[w] = 2

    for n in range(2, levels + 1):
        g = n + 1
        U = G.at(g)
        roots = [s + (n,) for s in _words(n, n - 1)]
        roots += [s + (k,) for s in itertools.product(range(n), repeat=n) for k in range(n + 1)]
        _certify_family(U, [(w, labels[w[:-1]] + (w[-1],)) for w in roots], g, g, labels, log)
        for w in roots:
            gen[w] = g
        # fill in the descendants of the new roots, one sibling family per parent
        frontier = [w for w in roots if w[-1] == n and len(w) <= n]
        while frontier:
            nxt = []
            for parent in frontier:
                kids = [parent + (k,) for k in range(n + 1)]
                _certify_family(U, [(w, labels[parent] + (w[-1],)) for w in kids], g, g, labels, log)
                for w in kids:
                    gen[w] = g
                nxt.extend(w for w in kids if len(w) <= n)
            frontier = nxt

    m_tree = FiniteTree.closure(labels.values(), Alphabet.OMEGA)
    p_tree = FiniteTree.closure((v for k, v in labels.items() if all(c < 2 for c in k)), Alphabet.OMEGA)
    return InscriptionResult(levels, labels, gen, m_tree, p_tree, log)


@dataclass
class VerificationReport:
    failures: list = field(default_factory=list)
    checked: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.failures

    def fail(self, check: str, detail) -> None:
        self.failures.append((check, detail))

    def count(self, check: str, n: int = 1) -> None:
        self.checked[check] = self.checked.get(check, 0) + n

    def to_json(self) -> dict:
        return {"ok": self.ok, "failures": [[c, repr(d)] for c, d in self.failures],
                "checked": dict(self.checked)}


def _prefix_closed(tree_nodes) -> bool:
    return all(n[:-1] in tree_nodes for n in tree_nodes if n)


def verify_inscription(r: InscriptionResult, G: DenseSequence) -> VerificationReport:
    """Re-check every inductive obligation of an inscription against the oracles."""
    rep = VerificationReport()
    labels, gen = r.labels, r.generation
    m_nodes, p_nodes = r.miller_approx.nodes, r.uniform_approx.nodes

    for name, nodes in (("closure_M", m_nodes), ("closure_P", p_nodes)):
        rep.count(name)
        if not _prefix_closed(nodes):
            rep.fail(name, "not prefix closed")
    rep.count("P_subset_M")
    if not p_nodes <= m_nodes:
        rep.fail("P_subset_M", sorted(p_nodes - m_nodes)[:3])
    for idx, node in labels.items():
        if node not in m_nodes:
            rep.fail("labels_in_M", idx)

    rep.count("uniformly_perfect")
    verdict = check_kind(r.uniform_approx, TreeKind.UNIFORMLY_PERFECT, r.uniform_approx.height)
    if not verdict:
        rep.fail("uniformly_perfect", verdict)

    if labels.get(()) != ():
        rep.fail("condition_1", ("root", labels.get(())))
    items = sorted(labels.items(), key=lambda kv: (len(kv[0]), kv[0]))
    for i, (s1, t1) in enumerate(items):
        for s2, t2 in items[i + 1:]:
            rep.count("condition_1")
            if is_prefix(s1, s2) != is_prefix(t1, t2) or (len(s1) == len(s2) and t1 == t2):
                rep.fail("condition_1", (s1, s2))
    for s, t in items:
        if s:
            rep.count("condition_1_letter")
            parent = labels.get(s[:-1])
            if parent is None or not is_prefix(parent + (s[-1],), t):
                rep.fail("condition_1_letter", (s[:-1], s))

    by_parent: dict = {}
    for s, _ in items:
        if s:
            by_parent.setdefault(s[:-1], []).append(s)
    for parent, kids in by_parent.items():
        for k1, k2 in itertools.combinations(kids, 2):
            rep.count("condition_2")
            if meet(labels[k1], labels[k2]) != labels[parent]:
                rep.fail("condition_2", (k1, k2))

    by_gen: dict = {}
    for s, _ in items:
        by_gen.setdefault(gen[s], []).append(s)
    for g, idxs in by_gen.items():
        if g == 0:
            continue
        U = G.at(g)
        for s1 in idxs:
            for s2 in idxs:
                if s1 == s2 or comparable(labels[s1], labels[s2]):
                    continue
                rep.count("condition_3")
                if U.contains_box(Box(labels[s1], labels[s2])) is not Containment.INSIDE:
                    rep.fail("condition_3", (s1, s2))

    lengths: dict = {}
    for s, t in items:
        if all(c < 2 for c in s):
            lengths.setdefault(len(s), set()).add(len(t))
    for n, ls in lengths.items():
        rep.count("condition_4")
        if len(ls) != 1:
            rep.fail("condition_4", (n, sorted(ls)))

    # every tip of M is traced by exactly one chain of index words
    by_node = {t: s for s, t in labels.items()}
    for tip in r.miller_approx.tips():
        rep.count("alpha_trace")
        path = [by_node[tip[:i]] for i in range(len(tip) + 1) if tip[:i] in by_node]
        deepest = path[-1] if path else None
        if deepest is None or labels[deepest] != tip or \
                [len(p) for p in path] != list(range(len(deepest) + 1)) or \
                any(not is_prefix(p, deepest) for p in path):
            rep.fail("alpha_trace", tip)

    for e in r.witness_log:
        rep.count("log_replay")
        U = G.at(e.certified_against)
        if U.contains_box(e.box) is not Containment.INSIDE:
            rep.fail("log_replay", e)
        elif e.certified_against > 1 and \
                G.at(e.certified_against - 1).contains_box(e.box) is not Containment.INSIDE:
            rep.fail("descending", e)
    return rep


# ---------------------------------------------------------------------------
# avoidance witnesses


@dataclass(frozen=True)
class AvoidanceWitness:
    x_prefix: Node
    y_prefix: Node
    block_boundaries: tuple  # (x frontiers, y frontiers)
    checked_generator_bound: int
    candidates_examined: int
    generators_ruled_out: int | None = None

    def to_json(self) -> dict:
        return {"x_prefix": list(self.x_prefix), "y_prefix": list(self.y_prefix),
                "block_boundaries": [list(b) for b in self.block_boundaries],
                "checked_generator_bound": self.checked_generator_bound,
                "candidates_examined": self.candidates_examined,
                "generators_ruled_out": self.generators_ruled_out}


def miller_generators_up_to(total: int) -> int:
    """Number of ``q`` in ``Q`` with ``supp(q) + K(q) <= total``."""
    return sum(_class_count(s, t - s) for t in range(2, total + 1) for s in range(1, t))


def _is_split(T: TreeOracle, node: Node) -> bool:
    return len(T.children(node, 2)) >= 2


def _step(T: TreeOracle, node: Node, bound: int, fuel: int) -> Node:
    """Extend ``node`` by its least letter above ``bound`` and walk on to a
    splitting node longer than ``bound``, taking least letters above ``bound``
    at any intermediate split."""
    for _ in range(fuel):
        kids = T.children(node, bound + 2)
        above = [k for k in kids if k > bound]
        if len(kids) >= 2:
            if not above:
                raise NotMillerLike(f"no successor of {node} above {bound}")
            node = node + (above[0],)
        elif kids:
            node = node + (kids[0],)
        else:
            raise NotMillerLike(f"{node} is a leaf")
        if len(node) > bound and _is_split(T, node):
            return node
    raise NotMillerLike(f"no splitting node above {bound} within fuel {fuel}")


def miller_avoidance_witness(T: TreeOracle, rounds: int, fuel: int = DEFAULT_FUEL,
                             omega_fuel: int = 64) -> AvoidanceWitness:
    """Two interleaved branches of a Miller tree that no generator of ``miller_U`` covers."""
    N = normalize_miller(T, omega_fuel)
    try:
        x = y = N.stem(fuel)
    except NoSplitWithinFuel as exc:
        raise NotMillerLike(str(exc)) from None
    xs, ys = [len(x)], [len(y)]
    for _ in range(rounds):
        x = _step(N, x, len(y), fuel)
        xs.append(len(x))
        y = _step(N, y, len(x), fuel)
        ys.append(len(y))
    L = min(len(x), len(y))
    U = MillerU()
    if U.generator_for(Box(x[:L], y[:L])) is not None:
        raise NotMillerLike("witness is covered; the source tree is not Miller-like")
    return AvoidanceWitness(x, y, (tuple(xs), tuple(ys)), L, L, miller_generators_up_to(L))


def laver_witness(L: TreeOracle, length: int, fuel: int = DEFAULT_FUEL) -> Node:
    """A branch prefix whose letters past the stem are all nonzero."""
    if L.alphabet is not Alphabet.OMEGA or not L.infinite_branching:
        raise NotLaverLike("needs an omega-branching tree")
    try:
        node = L.stem(fuel)
    except NoSplitWithinFuel as exc:
        raise NotLaverLike(str(exc)) from None
    node = node[:length]
    while len(node) < length:
        kids = [k for k in L.children(node, fuel) if k != 0]
        if not kids:
            raise NotLaverLike(f"{node} has no nonzero successor within fuel {fuel}")
        node = node + (kids[0],)
    return node


def silver_square_witness(S: TreeOracle, depth: int, fuel: int = 2) -> AvoidanceWitness:
    """Two branches of the splits-and-rests reduct that no ``silver_U`` generator covers."""
    red = silver_splits_and_rests(S, depth, fuel)
    if not red.kept_levels:
        raise NoSplitWithinFuel(f"no splitting level below {depth}")
    T = red.tree
    x = ()
    while len(x) < depth:
        x = x + (T.successor_letters(x)[0],)
    n0 = red.kept_levels[0]
    y = x[:n0] + (T.successor_letters(x[:n0])[1],)
    while len(y) < depth:
        y = y + (T.successor_letters(y)[0],)
    if SilverU().generator_for(Box(x, y)) is not None:
        raise AssertionError("reduct admits a covering generator")
    return AvoidanceWitness(x, y, (red.kept_levels, tuple(n for n, _ in red.forced)),
                            depth, max(depth - 2, 0))


@dataclass(frozen=True)
class PointWitness:
    point: Node
    split_levels: tuple
    N: int
    checked_generator_bound: int
    candidates_examined: int

    def to_json(self) -> dict:
        return {"point": list(self.point), "split_levels": list(self.split_levels), "N": self.N,
                "checked_generator_bound": self.checked_generator_bound,
                "candidates_examined": self.candidates_examined}


def up_miller_witness(T: TreeOracle, depth: int, N: int, omega_fuel: int = 64) -> PointWitness:
    """A branch of a uniformly perfect Miller tree outside the generators of ``G_N``."""
    T = normalize_miller(T, omega_fuel)
    sample = T.approximate(depth, fuel=2)
    split_levels = []
    for n in range(depth):
        flags = {_is_split(T, v) for v in sample.level(n)}
        if len(flags) != 1:
            raise NotUPMillerLike(f"level {n} mixes splitting and non-splitting nodes")
        if flags == {True}:
            split_levels.append(n)
    if not split_levels:
        raise NotUPMillerLike(f"no splitting level below {depth}")
    if N <= split_levels[0]:
        raise ValueError(f"N must exceed the first splitting level {split_levels[0]}")
    nxt = dict(zip(split_levels, split_levels[1:] + [depth]))
    x = ()
    while len(x) < depth:
        n = len(x)
        if n in nxt:
            if not _is_split(T, x):
                raise NotUPMillerLike(f"{x} does not split on splitting level {n}")
            kids = [k for k in T.children(x, nxt[n] + 2) if k > nxt[n]]
            if not kids:
                raise NotUPMillerLike(f"{x} has no successor above {nxt[n]}")
            x = x + (kids[0],)
        else:
            if _is_split(T, x):
                raise NotUPMillerLike(f"{x} splits on a non-splitting level")
            kids = T.children(x, 1)
            if not kids:
                raise NotUPMillerLike(f"{x} is a leaf")
            x = x + kids[:1]
    if UpMillerG(N).generator_for(x) is not None:
        raise AssertionError("witness is covered by a generator of G_N")
    return PointWitness(x, tuple(split_levels), N, depth, depth)
