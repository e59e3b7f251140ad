"""Finite simulation of a generic filter on evenly cut trees.

Conditions are finite trees whose maximal nodes all sit on the top level;
``p`` is stronger than ``q`` when it contains ``q`` and only grows above the
tips of ``q``. A schedule of dense-set refiners is folded into a descending
chain, and the final tree carries the splitting, slalom and box-separation
imprints the schedule asked for.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

from .dense_open import Box, Containment, OpenDenseOracle, PairCertificate, oracle_from_json, refine_family
from .errors import NodeNotInTree, NotEvenlyCut, OracleBreach, RefinerBreach, SchemaError
from .trees import Alphabet, FiniteTree, Node, TreeKind, check_kind, default_slalom_words, is_prefix, lenlex, pad


def is_evenly_cut(tree: FiniteTree) -> bool:
    h = tree.height
    return all(len(t) == h for t in tree.tips())


def _require_evenly_cut(tree: FiniteTree) -> None:
    if not is_evenly_cut(tree):
        bad = min((t for t in tree.tips() if len(t) != tree.height), key=lenlex)
        raise NotEvenlyCut(f"tip {bad} is below height {tree.height}")


def root_condition() -> FiniteTree:
    return FiniteTree(Alphabet.OMEGA, frozenset({()}))


def stronger_than(p: FiniteTree, q: FiniteTree) -> bool:
    """``p <= q``: ``q`` is a subtree of ``p`` and ``p`` adds nothing at or below ``q``'s top level."""
    _require_evenly_cut(p)
    _require_evenly_cut(q)
    if not q.nodes <= p.nodes:
        return False
    h = q.height
    return frozenset(x for x in p.nodes if len(x) == h) == q.tips()


def _sorted_tips(p: FiniteTree) -> list:
    return sorted(p.tips(), key=lenlex)


def _grow(p: FiniteTree, new_tips) -> FiniteTree:
    return FiniteTree.closure(list(p.nodes) + list(new_tips), p.alphabet)


def dense_perfect(p: FiniteTree, t: Node | None = None) -> FiniteTree:
    """Add a split above ``t`` (above every tip when ``t`` is None); other tips grow by 0."""
    _require_evenly_cut(p)
    tips = _sorted_tips(p)
    if t is None:
        chosen = set(tips)
    else:
        t = tuple(t)
        if t not in p:
            raise NodeNotInTree(t)
        chosen = {next(x for x in tips if is_prefix(t, x))}
    new = []
    for x in tips:
        new.append(x + (0,))
        if x in chosen:
            new.append(x + (1,))
    return _grow(p, new)


def dense_slalom(p: FiniteTree, word: Sequence[int]) -> FiniteTree:
    """Every tip copies ``word`` on the levels right above the current height."""
    _require_evenly_cut(p)
    word = tuple(word)
    return _grow(p, [x + word for x in p.tips()])


def dense_box_separation(p: FiniteTree, n: int, U: OpenDenseOracle, log: list | None = None) -> FiniteTree:
    """Extend the tips so every ordered pair of distinct tips is a box inside ``U``."""
    _require_evenly_cut(p)
    tips = _sorted_tips(p)
    out = refine_family(U, tips)
    top = max(n, max(len(x) for x in out))
    out = [pad(x, top) for x in out]
    for i, a in enumerate(out):
        for j, b in enumerate(out):
            if i != j:
                if U.contains_box(Box(a, b)) is not Containment.INSIDE:
                    raise OracleBreach(f"tips {a}, {b} lost their certificate")
                if log is not None:
                    log.append(PairCertificate(i, j, Box(a, b)))
    return _grow(p, out)


# ---------------------------------------------------------------------------
# schedules


@dataclass(frozen=True)
class DenseSetRefiner:
    label: str
    refine: Callable[[FiniteTree, list], FiniteTree] = field(compare=False)
    descriptor: dict = field(default_factory=dict)
    oracle: OpenDenseOracle | None = field(default=None, compare=False)

    def to_json(self) -> dict:
        return dict(self.descriptor)


def perfect_refiner(t: Node | None = None) -> DenseSetRefiner:
    params = {} if t is None else {"t": list(t)}
    return DenseSetRefiner(f"perfect{'' if t is None else tuple(t)}",
                           lambda p, log: dense_perfect(p, t),
                           {"kind": "perfect", "params": params})


def slalom_refiner(word: Sequence[int]) -> DenseSetRefiner:
    word = tuple(word)
    return DenseSetRefiner(f"slalom{word}", lambda p, log: dense_slalom(p, word),
                           {"kind": "slalom", "params": {"word": list(word)}})


def box_separation_refiner(n: int, U: OpenDenseOracle) -> DenseSetRefiner:
    return DenseSetRefiner(f"box_separation({n})", lambda p, log: dense_box_separation(p, n, U, log),
                           {"kind": "box_separation", "params": {"n": n, "oracle": U.to_json()}}, U)


def replace_refiner(tree: FiniteTree) -> DenseSetRefiner:
    """Returns a fixed tree regardless of input; used to inject unsound steps."""
    return DenseSetRefiner("replace", lambda p, log: tree,
                           {"kind": "replace", "params": {"tree": tree.to_json()}})


def default_schedule(U: OpenDenseOracle | None = None, max_len: int = 2, max_letter: int = 2) -> list:
    from .dense_open import MillerU

    U = U if U is not None else MillerU()
    steps = [perfect_refiner(), perfect_refiner()]
    steps += [slalom_refiner(w) for w in default_slalom_words(max_len, max_letter)]
    steps.append(box_separation_refiner(1, U))
    return steps


def refiner_from_json(item) -> DenseSetRefiner:
    if not isinstance(item, dict) or "kind" not in item:
        raise SchemaError("schedule items need a 'kind'")
    params = item.get("params", {}) or {}
    if not isinstance(params, dict):
        raise SchemaError("'params' must be an object")
    kind = item["kind"]
    try:
        if kind == "perfect":
            return perfect_refiner(tuple(params["t"]) if "t" in params else None)
        if kind == "slalom":
            return slalom_refiner(tuple(params["word"]))
        if kind == "box_separation":
            return box_separation_refiner(int(params.get("n", 1)),
                                          oracle_from_json(params.get("oracle", {"builtin": "miller_U"})))
        if kind == "replace":
            return replace_refiner(FiniteTree.from_json(params["tree"]))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, SchemaError):
            raise
        raise SchemaError(f"bad params for {kind!r}: {exc}") from None
    raise SchemaError(f"unknown refiner kind {kind!r}")


def schedule_from_json(data) -> list:
    if not isinstance(data, list):
        raise SchemaError("a schedule is a JSON array")
    return [refiner_from_json(item) for item in data]


@dataclass
class ChainLog:
    conditions: list  # p_0, p_1, ...
    labels: list  # refiner label per step
    certificates: list  # (step, PairCertificate) from box separation
    oracles: list  # (step, oracle) for box separation steps

    def to_json(self) -> dict:
        return {"steps": [{"label": lab, "condition": c.to_json()}
                          for lab, c in zip(["start"] + self.labels, self.conditions)],
                "certificates": [{"step": s, "i": c.i, "j": c.j, "box": c.box.to_json()}
                                 for s, c in self.certificates]}


def meet_dense(start: FiniteTree, schedule: Sequence[DenseSetRefiner]) -> tuple:
    """Fold ``schedule`` into a descending chain from ``start``."""
    _require_evenly_cut(start)
    chain = ChainLog([start], [], [], [])
    cur = start
    for step, r in enumerate(schedule, 1):
        local: list = []
        nxt = r.refine(cur, local)
        try:
            ok = stronger_than(nxt, cur)
        except NotEvenlyCut as exc:
            raise RefinerBreach(f"step {step} ({r.label}) left an uneven tree: {exc}") from None
        if not ok:
            raise RefinerBreach(f"step {step} ({r.label}) is not stronger than its input")
        chain.conditions.append(nxt)
        chain.labels.append(r.label)
        chain.certificates.extend((step, c) for c in local)
        if r.oracle is not None:
            chain.oracles.append((step, r.oracle))
        cur = nxt
    return cur, chain


@dataclass
class GenericReport:
    failures: list

    @property
    def ok(self) -> bool:
        return not self.failures


def verify_generic(tree: FiniteTree, chain: ChainLog, schedule: Sequence[DenseSetRefiner]) -> GenericReport:
    """Chain soundness, slalom imprints of scheduled words, and tip-pair certificates."""
    failures = []
    if chain.conditions[-1] != tree:
        failures.append(("final", "tree differs from the last condition"))
    for i, (a, b) in enumerate(zip(chain.conditions, chain.conditions[1:]), 1):
        if not (is_evenly_cut(b) and stronger_than(b, a)):
            failures.append(("chain", i))
    words = [tuple(r.descriptor["params"]["word"]) for r in schedule if r.descriptor.get("kind") == "slalom"]
    if words and tree.height:
        verdict = check_kind(tree, TreeKind.SLALOM, tree.height, slalom_words=words)
        if not verdict:
            failures.append(("slalom", verdict))
    tips = _sorted_tips(tree)
    for step, U in chain.oracles:
        for a in tips:
            for b in tips:
                if a != b and U.contains_box(Box(a, b)) is not Containment.INSIDE:
                    failures.append(("box", (step, a, b)))
    for step, c in chain.certificates:
        U = dict(chain.oracles)[step]
        if U.contains_box(c.box) is not Containment.INSIDE:
            failures.append(("certificate", (step, c.i, c.j)))
    return GenericReport(failures)
