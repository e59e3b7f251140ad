"""Finitely supported rationals of omega^omega and open dense sets of the plane.

A rational point is a tuple of naturals read with an implicit zero tail; its
canonical form has no trailing zeros. The countable dense set ``Q`` consists of
pairs of distinct rational points with equal support.

Open dense sets are handed around as :class:`OpenDenseOracle` objects. The
built-in ones are unions of explicit generator boxes, so containment of a box
is decidable for them: a covering generator is determined by its support.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

from .errors import OracleBreach, SchemaError, ZeroPoint
from .trees import Node, pad


# ---------------------------------------------------------------------------
# rational points


def canonical_point(values: Sequence[int]) -> Node:
    values = tuple(values)
    n = len(values)
    while n and values[n - 1] == 0:
        n -= 1
    return values[:n]


def supp(q) -> int:
    """Largest nonzero index plus one, for a point or a pair in ``Q``."""
    if q and isinstance(q[0], tuple):
        a, b = (canonical_point(x) for x in q)
        if len(a) != len(b):
            raise ValueError(f"pair has unequal supports {len(a)} and {len(b)}")
        q = a
    q = canonical_point(q)
    if not q:
        raise ZeroPoint("supp of the zero rational is undefined")
    return len(q)


def big_k(q) -> int:
    """Largest entry of a pair (or of a single point)."""
    if q and isinstance(q[0], tuple):
        return max((v for side in q for v in side), default=0)
    return max(q, default=0)


def restrict(point: Sequence[int], length: int) -> Node:
    """``point`` restricted to ``length``, reading past its end as zeros."""
    return pad(tuple(point)[:length], length)


def in_Q(pair) -> bool:
    a, b = (canonical_point(x) for x in pair)
    return bool(a) and len(a) == len(b) and a != b


# ---------------------------------------------------------------------------
# enumeration of Q
#
# Pairs are ordered by (supp + K, supp, lexicographic order of the concatenated
# value words). Each class {supp = s, K = k} is finite, so this is an
# enumeration of order type omega.


def _class_count(s: int, k: int) -> int:
    if s < 1 or k < 1:
        return 0
    a_k = (k + 1) ** (s - 1) * k
    a_prev = k ** (s - 1) * (k - 1)
    return (a_k * a_k - a_prev * a_prev) - (a_k - a_prev)


def _completions(prefix: list, s: int, k: int) -> int:
    """Words extending ``prefix`` that are valid members of class (s, k)."""
    total, total_no_k = 1, 1
    for p in range(len(prefix), 2 * s):
        lo = 1 if p in (s - 1, 2 * s - 1) else 0
        size = k + 1 - lo
        total *= size
        total_no_k *= size - 1
    with_k = total if k in prefix else total - total_no_k
    # subtract completions with equal halves
    n = len(prefix)
    if n <= s:
        q1_total, q1_no_k = 1, 1
        for p in range(n, s):
            lo = 1 if p == s - 1 else 0
            q1_total *= k + 1 - lo
            q1_no_k *= k - lo
        equal = q1_total if k in prefix else q1_total - q1_no_k
    else:
        q1 = prefix[:s]
        q2 = prefix[s:]
        equal = 1 if q1[: len(q2)] == q2 and k in q1 else 0
    return with_k - equal


def _allowed(p: int, s: int, k: int) -> range:
    return range(1 if p in (s - 1, 2 * s - 1) else 0, k + 1)


def _unrank_class(r: int, s: int, k: int):
    word: list = []
    for p in range(2 * s):
        for d in _allowed(p, s, k):
            c = _completions(word + [d], s, k)
            if r < c:
                word.append(d)
                break
            r -= c
        else:  # pragma: no cover - counting guarantees a hit
            raise AssertionError("unrank overflow")
    return tuple(word[:s]), tuple(word[s:])


def _rank_class(pair, s: int, k: int) -> int:
    word = list(pair[0]) + list(pair[1])
    r = 0
    for p, v in enumerate(word):
        for d in _allowed(p, s, k):
            if d == v:
                break
            r += _completions(word[:p] + [d], s, k)
    return r


def _classes():
    t = 2
    while True:
        for s in range(1, t):
            yield s, t - s
        t += 1


def q_enumeration(i: int):
    """The ``i``-th element of ``Q`` (a pair of canonical points)."""
    if i < 0:
        raise ValueError("index must be nonnegative")
    for s, k in _classes():
        c = _class_count(s, k)
        if i < c:
            return _unrank_class(i, s, k)
        i -= c


def q_index(pair) -> int:
    """Inverse of :func:`q_enumeration`."""
    a, b = (canonical_point(x) for x in pair)
    if not in_Q((a, b)):
        raise ValueError(f"{pair!r} is not in Q")
    s, k = len(a), big_k((a, b))
    offset = 0
    for cs, ck in _classes():
        if (cs, ck) == (s, k):
            return offset + _rank_class((a, b), s, k)
        offset += _class_count(cs, ck)


def enumeration_bound(max_supp: int, max_entry: int) -> int:
    """Every pair with supp <= max_supp and K <= max_entry has index below this."""
    return sum(_class_count(s, t - s) for t in range(2, max_supp + max_entry + 1) for s in range(1, t))


# ---------------------------------------------------------------------------
# boxes and oracles


@dataclass(frozen=True)
class Box:
    left: Node
    right: Node

    def swap(self) -> "Box":
        return Box(self.right, self.left)

    def to_json(self) -> dict:
        return {"left": list(self.left), "right": list(self.right)}

    @classmethod
    def from_json(cls, data) -> "Box":
        try:
            return cls(tuple(data["left"]), tuple(data["right"]))
        except (KeyError, TypeError):
            raise SchemaError(f"bad box {data!r}") from None


class Containment(enum.Enum):
    INSIDE = "inside"
    UNKNOWN = "unknown"


class OpenDenseOracle:
    """An open dense subset of the plane.

    ``refine(a, b)`` returns a box extending ``(a, b)`` that ``contains_box``
    certifies as INSIDE; ``contains_box`` is sound but may answer UNKNOWN.
    """

    descriptor: dict = {}

    def refine(self, left: Node, right: Node) -> Box:
        raise NotImplementedError

    def contains_box(self, box: Box) -> Containment:
        return Containment.INSIDE if self.generator_for(box) is not None else Containment.UNKNOWN

    def generator_for(self, box: Box):
        """A generator box covering ``box``, or None."""
        raise NotImplementedError

    def to_json(self) -> dict:
        return dict(self.descriptor)


def _extend_to(node: Node, gen: Node) -> Node:
    return node if len(node) >= len(gen) else gen


def _fill_pair(sig: Node, tau: Node, s: int, k: int | None):
    """Support-``s`` words compatible with ``sig``/``tau`` on their first ``s`` entries.

    Free entries are 0 except a free last entry, which is 1. When ``k`` is
    given the largest entry over both words must equal ``k``. Returns None when
    no pair of distinct words fits.
    """
    w = [[None] * s, [None] * s]
    free = [[], []]
    for side, node in enumerate((sig, tau)):
        for i in range(s):
            if i < len(node):
                w[side][i] = node[i]
            else:
                free[side].append(i)
                w[side][i] = 1 if i == s - 1 else 0
        if w[side][s - 1] == 0:
            return None
        if k is not None and max(w[side]) > k:
            return None
    if k is not None:
        top = max(max(w[0]), max(w[1]))
        if top < k:
            spots = [(1, i) for i in reversed(free[1])] + [(0, i) for i in reversed(free[0])]
            if not spots:
                return None
            side, i = spots[0]
            w[side][i] = k
    if w[0] == w[1]:
        limit = k if k is not None else None
        fixed = False
        for side, i in [(1, i) for i in reversed(free[1])] + [(0, i) for i in reversed(free[0])]:
            cur = w[side][i]
            lo = 1 if i == s - 1 else 0
            hi = limit if limit is not None else max(cur + 1, 1)
            for v in range(lo, hi + 1):
                if v == cur:
                    continue
                trial = [list(w[0]), list(w[1])]
                trial[side][i] = v
                if k is not None and max(max(trial[0]), max(trial[1])) != k:
                    continue
                w = trial
                fixed = True
                break
            if fixed:
                break
        if not fixed:
            return None
    return tuple(w[0]), tuple(w[1])


def _zeros_match(node: Node, start: int, stop: int, tail: Node = ()) -> bool:
    """``node`` is compatible with ``tail`` then zeros on [start, stop)."""
    for i in range(start, min(stop, len(node))):
        want = tail[i - start] if i - start < len(tail) else 0
        if node[i] != want:
            return False
    return True


class MillerU(OpenDenseOracle):
    """Union of the boxes ``[q1|(supp+K)] x [q2|(supp+K)]`` over ``q`` in ``Q``.

    ``min_support`` keeps only generators with support at least that value;
    raising it yields a descending sequence of open dense sets.
    """

    def __init__(self, min_support: int = 1):
        self.min_support = max(1, min_support)
        self.descriptor = {"builtin": "miller_U", "params": {"min_support": self.min_support}}

    def generator(self, q) -> Box:
        a, b = q
        m = supp(q) + big_k(q)
        return Box(restrict(a, m), restrict(b, m))

    def generator_for(self, box: Box):
        sig, tau = box.left, box.right
        n = min(len(sig), len(tau))
        top = 0
        differ = False
        for s in range(1, n + 1):
            x, y = sig[s - 1], tau[s - 1]
            top = max(top, x, y)
            differ = differ or x != y
            if s < self.min_support or not differ or x == 0 or y == 0:
                continue
            m = s + top
            if m > n:
                continue
            if _zeros_match(sig, s, m) and _zeros_match(tau, s, m):
                return Box(sig[:m], tau[:m])
        return None

    def refine(self, left: Node, right: Node) -> Box:
        left, right = tuple(left), tuple(right)
        if self.generator_for(Box(left, right)) is not None:
            return Box(left, right)
        m = 2
        while True:
            for s in range(self.min_support, m):
                k = m - s
                if not (_zeros_match(left, s, m) and _zeros_match(right, s, m)):
                    continue
                pair = _fill_pair(left, right, s, k)
                if pair is None:
                    continue
                g = Box(pad(pair[0], m), pad(pair[1], m))
                return Box(_extend_to(left, g.left), _extend_to(right, g.right))
            m += 1


class SilverU(OpenDenseOracle):
    """Union of ``[(q1|supp) 0 0] x [(q2|supp) 1 1]`` over ``q`` in ``Q``."""

    def __init__(self, min_support: int = 1):
        self.min_support = max(1, min_support)
        self.descriptor = {"builtin": "silver_U", "params": {"min_support": self.min_support}}

    def generator(self, q) -> Box:
        a, b = q
        s = supp(q)
        return Box(restrict(a, s) + (0, 0), restrict(b, s) + (1, 1))

    def generator_for(self, box: Box):
        sig, tau = box.left, box.right
        n = min(len(sig), len(tau))
        differ = False
        for s in range(1, n - 1):
            x, y = sig[s - 1], tau[s - 1]
            differ = differ or x != y
            if s < self.min_support or not differ or x == 0 or y == 0:
                continue
            if sig[s:s + 2] == (0, 0) and tau[s:s + 2] == (1, 1):
                return Box(sig[:s + 2], tau[:s + 2])
        return None

    def refine(self, left: Node, right: Node) -> Box:
        left, right = tuple(left), tuple(right)
        if self.generator_for(Box(left, right)) is not None:
            return Box(left, right)
        s = self.min_support
        while True:
            if _zeros_match(left, s, s + 2, (0, 0)) and _zeros_match(right, s, s + 2, (1, 1)):
                pair = _fill_pair(left, right, s, None)
                if pair is not None:
                    g = Box(pair[0] + (0, 0), pair[1] + (1, 1))
                    return Box(_extend_to(left, g.left), _extend_to(right, g.right))
            s += 1


class UpMillerG:
    """The one-dimensional open dense set ``G_n``: union of ``[q|(supp+K+n)]``."""

    def __init__(self, n: int):
        self.n = n
        self.descriptor = {"builtin": "up_miller_G", "params": {"n": n}}

    def generator_for(self, node: Node):
        top = 0
        for s in range(1, len(node) + 1):
            top = max(top, node[s - 1])
            if node[s - 1] == 0:
                continue
            m = s + top + self.n
            if m <= len(node) and _zeros_match(node, s, m):
                return node[:m]
        return None

    def contains(self, node: Node) -> Containment:
        return Containment.INSIDE if self.generator_for(tuple(node)) is not None else Containment.UNKNOWN

    def refine(self, node: Node) -> Node:
        node = canonical_point(node) or (1,)
        return up_miller_G_generator(self.n, node)

    def to_json(self) -> dict:
        return dict(self.descriptor)


def up_miller_G_generator(n: int, q: Sequence[int]) -> Node:
    """``q`` restricted to ``supp(q) + K(q) + n``."""
    q = canonical_point(q)
    return restrict(q, supp(q) + big_k(q) + n)


def miller_U_oracle(min_support: int = 1) -> MillerU:
    return MillerU(min_support)


def silver_U_oracle(min_support: int = 1) -> SilverU:
    return SilverU(min_support)


def oracle_from_json(data: dict):
    if not isinstance(data, dict) or "builtin" not in data:
        raise SchemaError("oracle descriptor needs a 'builtin' key")
    params = data.get("params", {}) or {}
    if not isinstance(params, dict):
        raise SchemaError("'params' must be an object")
    name = data["builtin"]
    try:
        if name == "miller_U":
            return MillerU(int(params.get("min_support", 1)))
        if name == "silver_U":
            return SilverU(int(params.get("min_support", 1)))
        if name == "up_miller_G":
            return UpMillerG(int(params["n"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"bad params for {name!r}: {exc}") from None
    raise SchemaError(f"unknown oracle {name!r}")


# ---------------------------------------------------------------------------
# pair and family refinement


def psi(U: OpenDenseOracle, a: Node, b: Node) -> bool:
    """Both ``[a] x [b]`` and ``[b] x [a]`` are certified inside ``U``."""
    return (U.contains_box(Box(a, b)) is Containment.INSIDE
            and U.contains_box(Box(b, a)) is Containment.INSIDE)


def _checked_refine(U: OpenDenseOracle, a: Node, b: Node) -> Box:
    box = U.refine(a, b)
    if not (box.left[: len(a)] == tuple(a) and box.right[: len(b)] == tuple(b)):
        raise OracleBreach(f"refine({a}, {b}) returned non-extension {box}")
    if U.contains_box(box) is not Containment.INSIDE:
        raise OracleBreach(f"refine({a}, {b}) returned uncertified {box}")
    return box


def refine_pair(U: OpenDenseOracle, v1: Node, v2: Node):
    """Equal-length extensions ``(s1, s2)`` of ``(v1, v2)`` with psi(s1, s2, U)."""
    first = _checked_refine(U, tuple(v1), tuple(v2))
    second = _checked_refine(U, first.right, first.left)
    s1, s2 = second.right, second.left
    n = max(len(s1), len(s2))
    s1, s2 = pad(s1, n), pad(s2, n)
    if not psi(U, s1, s2):
        raise OracleBreach(f"padding lost a certificate for {s1}, {s2}")
    return s1, s2


@dataclass(frozen=True)
class PairCertificate:
    i: int
    j: int
    box: Box


def refine_family(U: OpenDenseOracle, nodes: Sequence[Node], log: list | None = None) -> list:
    """Equal-length extensions of ``nodes`` with psi for every pair of positions.

    Position ``k`` is refined against ``k+1, ..., n-1`` in turn, each time
    starting from its latest extension (a descending chain per position), and
    all results are finally zero-padded to a common length. When ``log`` is
    given, one :class:`PairCertificate` per unordered pair is appended.
    """
    cur = [tuple(v) for v in nodes]
    if not cur:
        return []
    n = len(cur)
    for k in range(n):
        for l in range(k + 1, n):
            cur[k], cur[l] = refine_pair(U, cur[k], cur[l])
    top = max(len(c) for c in cur)
    out = [pad(c, top) for c in cur]
    for k in range(n):
        for l in range(k + 1, n):
            if not psi(U, out[k], out[l]):
                raise OracleBreach(f"lost certificate for positions {k}, {l}")
            if log is not None:
                log.append(PairCertificate(k, l, Box(out[k], out[l])))
    return out


# ---------------------------------------------------------------------------
# the comeager set of points with infinitely many zeros


@dataclass(frozen=True)
class SatisfiedBy:
    indices: tuple

    def __bool__(self) -> bool:
        return True


@dataclass(frozen=True)
class NotYet:
    zeros_seen: int

    def __bool__(self) -> bool:
        return False


def laver_G_membership(x_prefix: Sequence[int], zero_count_target: int):
    """Finite surrogate for "x(n) = 0 for infinitely many n"."""
    zeros = tuple(i for i, v in enumerate(x_prefix) if v == 0)
    if len(zeros) >= zero_count_target:
        return SatisfiedBy(zeros)
    return NotYet(len(zeros))
