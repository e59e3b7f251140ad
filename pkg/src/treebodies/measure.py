"""Measure-side constructions in the Cantor space, with exact certificates.

Every inequality a construction relies on is checked with exact dyadic
arithmetic and recorded in its log as a :class:`Certificate`, which can be
replayed from the inputs alone.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from .clopen import ClopenPlane, ClopenSet, symmetrize
from .dyadic import ONE, ZERO, Dyadic
from .errors import (
    ConvergenceFuelExhausted,
    DensitySearchExhausted,
    DepthTooShallow,
    NoSplitWithinFuel,
    SchemaError,
    StageDeficitTooLarge,
)
from .oracles import TreeOracle, silver_level_profile
from .trees import Alphabet, FiniteTree, Node


def eps_square(n: int) -> Dyadic:
    """Deficit schedule of the square inscription: ``2^-(2n+3)``."""
    return Dyadic.pow2(-(2 * n + 3))


def eps_silver(n: int) -> Dyadic:
    """Deficit schedule of the Silver inscription: ``2^-(n+3)``."""
    return Dyadic.pow2(-(n + 3))


def eps_f_sigma(k: int) -> Dyadic:
    return Dyadic.pow2(-k)


@dataclass(frozen=True)
class Certificate:
    step: int
    claim: str
    value: Dyadic
    threshold: Dyadic
    strict: bool = True
    chosen_box: tuple | None = None

    @property
    def holds(self) -> bool:
        return self.value > self.threshold if self.strict else self.value >= self.threshold

    def to_json(self) -> dict:
        out = {"step": self.step, "claim": self.claim, "certified_mass": str(self.value),
               "threshold": str(self.threshold), "strict": self.strict}
        if self.chosen_box is not None:
            out["chosen_box"] = {"left": list(self.chosen_box[0]), "right": list(self.chosen_box[1])}
        return out


def _certify(log: list, step: int, claim: str, value: Dyadic, threshold: Dyadic,
             strict: bool = True, box=None) -> Certificate:
    c = Certificate(step, claim, value, threshold, strict, box)
    if not c.holds:
        raise AssertionError(f"certificate failed at step {step}: {claim}: {value} vs {threshold}")
    log.append(c)
    return c


def _xor(a: Node, b: Sequence[int]) -> Node:
    return tuple(x ^ (b[i] if i < len(b) else 0) for i, x in enumerate(a))


# ---------------------------------------------------------------------------
# stage families


@dataclass(frozen=True)
class StageFamily:
    """An ascending sequence of clopen subsets ``F_0 ⊆ F_1 ⊆ ...`` of the plane."""

    stage: Callable[[int], ClopenPlane] = field(compare=False)
    max_stage: int | None = None
    descriptor: dict = field(default_factory=dict)

    def __call__(self, k: int) -> ClopenPlane:
        if self.max_stage is not None and k > self.max_stage:
            raise StageDeficitTooLarge(f"stage {k} beyond the supplied {self.max_stage}")
        return self.stage(k)


def band_complement_stages(max_stage: int | None = None) -> StageFamily:
    """``F_k`` = plane minus the diagonal band of width ``2k+4``; measure ``1 - 2^-(2k+4)``."""
    cache: dict = {}

    def stage(k):
        if k not in cache:
            cache[k] = ClopenPlane.diagonal_band(2 * k + 4).complement()
        return cache[k]

    return StageFamily(stage, max_stage, {"builtin": "band_complement", "max_stage": max_stage})


def explicit_stages(stages: Sequence[ClopenPlane]) -> StageFamily:
    stages = list(stages)
    for a, b in zip(stages, stages[1:]):
        if not a <= b:
            raise SchemaError("stages must be ascending")
    return StageFamily(lambda k: stages[k], len(stages) - 1,
                       {"stages": [s.to_json() for s in stages]})


def stages_from_json(data) -> StageFamily:
    if isinstance(data, dict) and data.get("builtin") == "band_complement":
        return band_complement_stages(data.get("max_stage"))
    if isinstance(data, dict) and isinstance(data.get("stages"), list):
        return explicit_stages([ClopenPlane.from_json(s) for s in data["stages"]])
    raise SchemaError("stage family needs 'builtin' or 'stages'")


# ---------------------------------------------------------------------------
# uniformly perfect square


@dataclass
class MeasureInscription:
    labels: dict  # binary index word -> node
    tree: FiniteTree
    ks: list
    Ns: list
    log: list

    def to_json(self) -> dict:
        return {"labels": [{"index": list(k), "node": list(v)}
                           for k, v in sorted(self.labels.items(), key=lambda kv: (len(kv[0]), kv[0]))],
                "tree": self.tree.to_json(), "k": self.ks, "N": self.Ns,
                "log": [c.to_json() for c in self.log]}


def _pieces(F: StageFamily, labels: dict, ks: list, n: int) -> ClopenPlane:
    words = list(itertools.product((0, 1), repeat=n))
    B = ClopenPlane.full()
    for s in words:
        for e in words:
            j = next((i for i in range(n) if s[i] != e[i]), n)
            piece = ClopenPlane.box(labels[s], labels[e]) & F(ks[j])
            B = B & symmetrize(piece.translate(labels[s], labels[e]))
    return B


def _density_box(B: ClopenPlane, base: int, threshold: Dyadic, max_depth: int):
    """First box ``(a, b)``, ``a != b``, both extending ``0^base``, by depth then
    lexicographic order, whose relative mass in ``B`` exceeds ``threshold``."""
    zeros = (0,) * base
    for N in range(base + 1, max_depth + 1):
        tails = list(itertools.product((0, 1), repeat=N - base))
        for ta in tails:
            a = zeros + ta
            if B.mass_in_box(a, zeros) == ZERO:
                continue
            for tb in tails:
                if ta == tb:
                    continue
                b = zeros + tb
                if B.relative_mass(a, b) > threshold:
                    return a, b
    raise DensitySearchExhausted(f"no box above {threshold} up to depth {max_depth}")


def inscribe_measure(F: StageFamily, levels: int, max_stage_search: int = 64,
                     extra_depth: int = 4) -> MeasureInscription:
    """Labels ``tau_sigma`` for ``sigma`` in ``2^{<= levels}`` whose square sits in ``F`` off the diagonal."""
    if levels < 0:
        raise ValueError("levels must be nonnegative")
    log: list = []
    labels: dict = {(): ()}

    def first_stage(pred, start):
        for k in range(start, start + max_stage_search):
            try:
                if pred(k):
                    return k
            except StageDeficitTooLarge:
                break
        raise StageDeficitTooLarge(f"no stage in [{start}, {start + max_stage_search}) meets the bound")

    k0 = first_stage(lambda k: F(k).measure() > ONE - eps_square(0), 0)
    ks, Ns = [k0], []
    _certify(log, 0, "lambda(F_k0) > 1 - eps_0", F(k0).measure(), ONE - eps_square(0))
    B = symmetrize(F(k0))
    _certify(log, 0, "lambda(B_0) >= 2 lambda(F_k0) - 1", B.measure(), 2 * F(k0).measure() - 1, strict=False)

    for n in range(levels):
        base = len(labels[(0,) * n])
        thr = ONE - eps_square(n + 1)
        a, b = _density_box(B, base, thr, max(B.depth // 2, base + 1) + extra_depth)
        N = len(a)
        Ns.append(N)
        _certify(log, n + 1, "relative mass of the density box > 1 - eps", B.relative_mass(a, b), thr, box=(a, b))
        words = list(itertools.product((0, 1), repeat=n))
        for s in words:
            t = labels[s]
            labels[s + (0,)] = _xor(a, t)
            labels[s + (1,)] = _xor(b, t)
        new = list(itertools.product((0, 1), repeat=n + 1))
        area = Dyadic.pow2(-2 * N)

        def stage_ok(k):
            return all(
                (ClopenPlane.box(labels[s], labels[e]) & F(k)).measure() > area * thr
                for s in new for e in new)

        k = first_stage(stage_ok, ks[-1] + 1)
        ks.append(k)
        for s in new:
            for e in new:
                _certify(log, n + 1, f"piece {s},{e} mass > 4^-N (1 - eps)",
                         (ClopenPlane.box(labels[s], labels[e]) & F(k)).measure(), area * thr)
        B = _pieces(F, labels, ks, n + 1)
        _certify(log, n + 1, "lambda(B) > 4^-N (1 - 2^(2n+2) eps)", B.measure(),
                 area * (ONE - Dyadic.pow2(2 * n + 2) * eps_square(n + 1)))
        _certify(log, n + 1, "lower bound positive", area * (ONE - Dyadic.pow2(2 * n + 2) * eps_square(n + 1)), ZERO)

    tree = FiniteTree.closure(labels.values(), Alphabet.BINARY)
    return MeasureInscription(labels, tree, ks, Ns, log)


# ---------------------------------------------------------------------------
# Silver tree inside a set of positive measure


@dataclass
class SilverInscription:
    blocks: list  # sigma_0, sigma_1, ...
    labels: dict  # s -> tau_s
    shifts: dict  # s -> t_s (finite part)
    tree: FiniteTree
    log: list

    def to_json(self) -> dict:
        return {"blocks": [list(b) for b in self.blocks],
                "labels": [{"index": list(k), "node": list(v)} for k, v in sorted(self.labels.items())],
                "tree": self.tree.to_json(), "log": [c.to_json() for c in self.log]}


def _silver_labels(blocks: list, n: int):
    labels, shifts = {}, {}
    for s in itertools.product((0, 1), repeat=n):
        tau, t = (), ()
        for blk, bit in zip(blocks, s):
            tau += blk + (bit,)
            t += (0,) * len(blk) + (bit,)
        labels[s], shifts[s] = tau, t
    return labels, shifts


def silver_in_closed(F: ClopenSet, levels: int, extra_depth: int = 4) -> SilverInscription:
    """A Silver tree with ``levels`` splitting levels whose body lies inside ``F``."""
    if levels < 1:
        raise ValueError("levels must be at least 1")
    if F.measure() == ZERO:
        raise SchemaError("the set has measure zero")
    log: list = []
    max_depth = F.depth + extra_depth
    blocks: list = []

    def search(prefixes, threshold_of):
        for d in range(max_depth + 1):
            for sigma in itertools.product((0, 1), repeat=d):
                if all(F.mass_in(p + sigma) > threshold_of(p + sigma) for p in prefixes):
                    return sigma
        raise DensitySearchExhausted(f"no block up to length {max_depth}")

    for m in range(levels):
        labels, shifts = _silver_labels(blocks, m)
        eps = eps_silver(m)
        zero = labels[(0,) * m]
        sigma = search(list(labels.values()), lambda node: (ONE - eps) * Dyadic.pow2(-len(node)))
        blocks.append(sigma)
        for s, tau in labels.items():
            node = tau + sigma
            lam = Dyadic.pow2(-len(node))
            _certify(log, m, f"density of [{s}]", F.mass_in(node), (ONE - eps) * lam, box=(node, ()))
            for i in (0, 1):
                _certify(log, m, f"half split {s}/{i}", F.mass_in(node + (i,)),
                         (Dyadic(1, 1) - eps) * lam, strict=False)
        labels, shifts = _silver_labels(blocks, m + 1)
        B = ClopenSet.full()
        for s, tau in labels.items():
            B = B & F.restrict_to(tau).translate(shifts[s])
        lam0 = Dyadic.pow2(-len(labels[(0,) * (m + 1)]))
        if m == 0:
            _certify(log, m, "lambda(B_0) >= (1 - 4 eps_0) lambda", B.measure(),
                     (ONE - 4 * eps) * lam0, strict=False)
        else:
            _certify(log, m, "lambda(B) > (1 - 2^(m+2) eps) lambda", B.measure(),
                     (ONE - Dyadic.pow2(m + 2) * eps) * lam0)
        _certify(log, m, "lambda(B) positive", B.measure(), ZERO)

    labels, shifts = _silver_labels(blocks, levels)
    tree = FiniteTree.closure(labels.values(), Alphabet.BINARY)
    return SilverInscription(blocks, labels, shifts, tree, log)


# ---------------------------------------------------------------------------
# F-sigma set of full measure avoiding Miller trees


@dataclass(frozen=True)
class MeasuredTreeOracle:
    """Cylinder masses of a probability measure on the Baire space."""

    node_mass: Callable[[Node], Fraction | Dyadic] = field(compare=False)
    descriptor: dict | None = field(default=None, compare=False)
    alphabet: Alphabet = Alphabet.OMEGA

    def children(self, node: Node, fuel: int) -> tuple:
        return tuple(range(fuel))

    def partial_sum(self, node: Node, j: int) -> Fraction:
        return sum((_frac(self.node_mass(tuple(node) + (i,))) for i in range(j + 1)), Fraction(0))


def geometric_measure() -> MeasuredTreeOracle:
    """``mu([sigma ^ i]) = mu([sigma]) * 2^-(i+1)``."""
    return MeasuredTreeOracle(lambda node: Dyadic.pow2(-sum(a + 1 for a in node)),
                              {"builtin": "geometric"})


def measure_from_json(data) -> MeasuredTreeOracle:
    if isinstance(data, dict) and data.get("builtin") == "geometric":
        return geometric_measure()
    raise SchemaError("unknown measure descriptor")


@dataclass
class FSigmaStage:
    n: int
    cutoffs: list  # m^n_k for k = 1..depth
    tree: FiniteTree
    mass: Dyadic | Fraction  # exact mass of the depth-level cylinders
    bound: Dyadic  # prod (1 - eps_{n+i})

    def to_json(self) -> dict:
        return {"n": self.n, "cutoffs": self.cutoffs, "tree": self.tree.to_json(),
                "mass": str(self.mass), "bound": str(self.bound)}


def f_sigma_bound(n: int, depth: int) -> Dyadic:
    out = ONE
    for i in range(1, depth + 1):
        out = out * (ONE - eps_f_sigma(n + i))
    return out


def _frac(v) -> Fraction:
    return v.to_fraction() if isinstance(v, Dyadic) else Fraction(v)


def exact(v: Fraction):
    """``v`` as a :class:`Dyadic` when its denominator is a power of two."""
    try:
        return Dyadic.coerce(v)
    except ValueError:
        return v


def build_f_sigma_avoiding_miller(mu: MeasuredTreeOracle, n: int, depth: int,
                                 fuel: int = 10_000) -> FSigmaStage:
    """The finitely branching tree ``T^n_depth`` and its certified mass bound."""
    level = [()]
    nodes = {()}
    cutoffs = []
    for k in range(1, depth + 1):
        keep = 1 - eps_f_sigma(k + n).to_fraction()
        m = 0
        for sigma in level:
            target = keep * _frac(mu.node_mass(sigma))
            total, j = Fraction(0), -1
            while total <= target:
                j += 1
                if j >= fuel:
                    raise ConvergenceFuelExhausted(f"cutoff at {sigma} exceeds fuel {fuel}")
                total += _frac(mu.node_mass(sigma + (j,)))
            m = max(m, j)
        cutoffs.append(m)
        level = [s + (i,) for s in level for i in range(m + 1)]
        nodes.update(level)
    mass = sum((_frac(mu.node_mass(s)) for s in level), Fraction(0))
    bound = f_sigma_bound(n, depth)
    if not mass > bound.to_fraction():
        raise AssertionError(f"mass {mass} does not exceed {bound}")
    return FSigmaStage(n, cutoffs, FiniteTree(Alphabet.OMEGA, frozenset(nodes)), exact(mass), bound)


# ---------------------------------------------------------------------------
# small set meeting every Silver square


def default_intervals(count: int) -> list:
    """Consecutive intervals ``I_n`` of length ``n + 1`` as ``(start, stop)``."""
    out, start = [], 0
    for n in range(count):
        out.append((start, start + n + 1))
        start += n + 1
    return out


@dataclass(frozen=True)
class SmallSetWitness:
    x_prefix: Node
    y_prefix: Node
    difference: int
    intervals: tuple
    hit_intervals: tuple
    partial_sum: Dyadic
    bound: Dyadic

    def to_json(self) -> dict:
        return {"x_prefix": list(self.x_prefix), "y_prefix": list(self.y_prefix),
                "difference": self.difference, "intervals": [list(i) for i in self.intervals],
                "hit_intervals": list(self.hit_intervals), "partial_sum": str(self.partial_sum),
                "bound": str(self.bound)}


def small_set_witness(S: TreeOracle, depth: int, intervals: Sequence | None = None,
                      fuel: int = 2) -> SmallSetWitness:
    """Two branches of a Silver tree agreeing past one splitting level."""
    intervals = list(intervals) if intervals is not None else default_intervals(depth + 1)
    for n, (lo, hi) in enumerate(intervals):
        if hi - lo < n:
            raise SchemaError(f"interval {n} is shorter than {n}")
        if n and lo != intervals[n - 1][1]:
            raise SchemaError("intervals must be consecutive")
    covered = [iv for iv in intervals if iv[1] <= depth]
    if len(covered) < 3:
        raise DepthTooShallow(f"depth {depth} covers {len(covered)} intervals; need 3")
    profile = silver_level_profile(S, depth, fuel)
    x = tuple(p[0] for p in profile if p) if all(profile) else None
    if x is None or len(x) < depth:
        raise NoSplitWithinFuel(f"the tree has a leaf below {depth}")
    split = next((n for n, p in enumerate(profile) if len(p) > 1 and n < covered[-1][0]), None)
    if split is None:
        raise DepthTooShallow(f"no splitting level before {covered[-1][0]}")
    y = x[:split] + (profile[split][1],) + x[split + 1:]
    hits = tuple(n for n, (lo, hi) in enumerate(covered) if x[lo:hi] == y[lo:hi])
    partial = sum((Dyadic.pow2(-(hi - lo)) for lo, hi in covered), ZERO)
    bound = sum((Dyadic.pow2(-n) for n in range(len(covered))), ZERO)
    return SmallSetWitness(x, y, split, tuple(covered), hits, partial, bound)
