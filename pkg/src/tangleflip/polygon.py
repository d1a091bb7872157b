"""Triangulations of a labeled convex polygon and flips on disjoint pairs.

Vertices are labeled 1..n counterclockwise. A diagonal is stored as a pair
(a, b) with a < b; polygon sides are never stored. With that convention the
crossing test is a pure integer interleaving check, and a triangulation is
exactly n-3 pairwise noncrossing diagonals.
"""

from __future__ import annotations

import re
from typing import Iterable, Iterator, NamedTuple

import numpy as np

from .errors import CapExceeded, DiagonalAbsent

Diagonal = tuple[int, int]

#: Largest polygon for which full triangulation enumeration is allowed.
TRIANGULATION_CAP = 14
#: Largest polygon for which disjoint pairs are materialized as objects.
PAIR_CAP = 10
#: Largest polygon for which bitmask counting of disjoint pairs works
#: (n*(n-3)/2 diagonal bits must fit in a 64-bit word).
MASK_CAP = 12


def diagonal(a: int, b: int, n: int) -> Diagonal:
    """Normalize and validate a diagonal of the convex n-gon."""
    if a > b:
        a, b = b, a
    if not (1 <= a < b <= n):
        raise ValueError(f"({a},{b}) out of range for polygon size {n}")
    if b - a < 2 or b - a > n - 2:
        raise ValueError(f"({a},{b}) is a side of the {n}-gon, not a diagonal")
    return (a, b)


def crosses(d1: Diagonal, d2: Diagonal) -> bool:
    """True iff the two diagonals' endpoints strictly interleave.

    Shared endpoints never cross; both diagonals must already be normalized.
    """
    a, b = d1
    c, d = d2
    return a < c < b < d or c < a < d < b


class Triangulation:
    """Immutable triangulation of the convex n-gon.

    Equality, hashing, and ordering go through ``key``, the sorted diagonal
    tuple, so enumeration orders and text encodings are reproducible.
    """

    __slots__ = ("n", "diagonals", "key", "_hash")

    n: int
    diagonals: frozenset[Diagonal]
    key: tuple[Diagonal, ...]

    def __init__(self, n: int, diagonals: Iterable[tuple[int, int]]):
        if n < 3:
            raise ValueError("polygon size must be at least 3")
        ds = frozenset(diagonal(a, b, n) for a, b in diagonals)
        key = tuple(sorted(ds))
        if len(key) != n - 3:
            raise ValueError(
                f"a triangulation of the {n}-gon has {n - 3} diagonals, got {len(key)}"
            )
        for i, d1 in enumerate(key):
            for d2 in key[i + 1 :]:
                if crosses(d1, d2):
                    raise ValueError(f"diagonals {d1} and {d2} cross")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "diagonals", ds)
        object.__setattr__(self, "key", key)
        object.__setattr__(self, "_hash", hash((n, key)))

    @classmethod
    def _make(cls, n: int, ds: frozenset[Diagonal]) -> "Triangulation":
        # Fast path for flip results, whose validity is guaranteed by
        # construction; public constructors always validate.
        self = object.__new__(cls)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "diagonals", ds)
        key = tuple(sorted(ds))
        object.__setattr__(self, "key", key)
        object.__setattr__(self, "_hash", hash((n, key)))
        return self

    def __setattr__(self, name, value):
        raise AttributeError("Triangulation is immutable")

    def __eq__(self, other):
        return (
            isinstance(other, Triangulation)
            and self.n == other.n
            and self.key == other.key
        )

    def __lt__(self, other: "Triangulation") -> bool:
        return (self.n, self.key) < (other.n, other.key)

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"Triangulation({self.encode()!r})"

    def has(self, d: Diagonal) -> bool:
        return d in self.diagonals

    def is_edge(self, x: int, y: int) -> bool:
        """True iff {x, y} is a polygon side or a diagonal of this triangulation."""
        if x > y:
            x, y = y, x
        if y - x == 1 or (x == 1 and y == self.n):
            return True
        return (x, y) in self.diagonals

    def check(self) -> None:
        """Re-validate all invariants (used by closure tests on fast-path objects)."""
        Triangulation(self.n, self.diagonals)

    def encode(self) -> str:
        inner = ",".join(f"{a}-{b}" for a, b in self.key)
        return f"{self.n}:[{inner}]"

    @classmethod
    def parse(cls, text: str) -> "Triangulation":
        m = re.fullmatch(r"\s*(\d+):\[([0-9,\- ]*)\]\s*", text)
        if not m:
            raise ValueError(f"bad triangulation encoding: {text!r}")
        n = int(m.group(1))
        body = m.group(2).strip()
        ds = []
        if body:
            for part in body.split(","):
                a, b = part.strip().split("-")
                ds.append((int(a), int(b)))
        return cls(n, ds)


class DisjointPair:
    """Ordered pair of triangulations of the same polygon sharing no diagonal."""

    __slots__ = ("n", "first", "second", "key", "_hash")

    n: int
    first: Triangulation
    second: Triangulation

    def __init__(self, first: Triangulation, second: Triangulation):
        if first.n != second.n:
            raise ValueError("triangulations are of different polygons")
        shared = first.diagonals & second.diagonals
        if shared:
            raise ValueError(f"triangulations share diagonals {sorted(shared)}")
        object.__setattr__(self, "n", first.n)
        object.__setattr__(self, "first", first)
        object.__setattr__(self, "second", second)
        object.__setattr__(self, "key", (first.key, second.key))
        object.__setattr__(self, "_hash", hash((first.n, self.key)))

    @classmethod
    def _make(cls, first: Triangulation, second: Triangulation) -> "DisjointPair":
        self = object.__new__(cls)
        object.__setattr__(self, "n", first.n)
        object.__setattr__(self, "first", first)
        object.__setattr__(self, "second", second)
        object.__setattr__(self, "key", (first.key, second.key))
        object.__setattr__(self, "_hash", hash((first.n, self.key)))
        return self

    def __setattr__(self, name, value):
        raise AttributeError("DisjointPair is immutable")

    def __eq__(self, other):
        return (
            isinstance(other, DisjointPair)
            and self.n == other.n
            and self.key == other.key
        )

    def __lt__(self, other: "DisjointPair") -> bool:
        return (self.n, self.key) < (other.n, other.key)

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"DisjointPair({self.encode()!r})"

    def side(self, i: int) -> Triangulation:
        if i == 1:
            return self.first
        if i == 2:
            return self.second
        raise ValueError("side must be 1 or 2")

    def swap(self) -> "DisjointPair":
        return DisjointPair._make(self.second, self.first)

    def check(self) -> None:
        self.first.check()
        self.second.check()
        DisjointPair(self.first, self.second)

    def encode(self) -> str:
        return f"{self.first.encode()}|{self.second.encode()}"

    @classmethod
    def parse(cls, text: str) -> "DisjointPair":
        a, b = text.split("|")
        return cls(Triangulation.parse(a), Triangulation.parse(b))


class FlipMove(NamedTuple):
    """A flip request: ``diagonal`` must lie in coordinate ``side`` (1 or 2)."""

    side: int
    diagonal: Diagonal


class PairFlip(NamedTuple):
    pair: DisjointPair
    kind: str  # "single" | "double"
    inverse: FlipMove


def quad_of(t: Triangulation, d: Diagonal) -> tuple[int, int, int, int]:
    """Quadrilateral (a, a', b, b') left by deleting ``d`` = (a, b).

    a' is the apex on the arc strictly between a and b, b' the apex on the
    complementary arc; the four vertices come back in cyclic order.
    """
    a, b = d
    if d not in t.diagonals:
        raise DiagonalAbsent(f"{d} not in {t.encode()}")
    inner = next(c for c in range(a + 1, b) if t.is_edge(a, c) and t.is_edge(c, b))
    outer_candidates = list(range(b + 1, t.n + 1)) + list(range(1, a))
    outer = next(c for c in outer_candidates if t.is_edge(a, c) and t.is_edge(c, b))
    return (a, inner, b, outer)


def flip_single(t: Triangulation, d: Diagonal) -> tuple[Triangulation, Diagonal]:
    """Replace ``d`` with the opposite diagonal of its quadrilateral.

    Returns the new triangulation and the new diagonal; flipping the new
    diagonal undoes the move.
    """
    _, inner, _, outer = quad_of(t, d)
    new = (inner, outer) if inner < outer else (outer, inner)
    ds = (t.diagonals - {d}) | {new}
    return Triangulation._make(t.n, ds), new


def flip_pair(p: DisjointPair, move: FlipMove) -> PairFlip:
    """Flip ``move.diagonal`` in the indicated coordinate of the pair.

    If the replacement diagonal collides with the other triangulation, the
    colliding diagonal is flipped there as well (a double flip). The returned
    inverse move maps the result back to ``p``: for a single flip it is the new
    diagonal on the same side, for a double flip the second new diagonal on
    the other side.
    """
    side = move.side
    t = p.side(side)
    other_side = 2 if side == 1 else 1
    other = p.side(other_side)
    t2, d2 = flip_single(t, move.diagonal)
    if d2 in other.diagonals:
        other2, d3 = flip_single(other, d2)
        kind = "double"
        inverse = FlipMove(other_side, d3)
    else:
        other2 = other
        kind = "single"
        inverse = FlipMove(side, d2)
    if side == 1:
        out = DisjointPair._make(t2, other2)
    else:
        out = DisjointPair._make(other2, t2)
    return PairFlip(out, kind, inverse)


def legal_moves(p: DisjointPair) -> list[FlipMove]:
    """All 2(n-3) flip moves available at ``p``, in deterministic order."""
    moves = [FlipMove(1, d) for d in p.first.key]
    moves += [FlipMove(2, d) for d in p.second.key]
    return moves


def neighbors(p: DisjointPair) -> list[tuple[FlipMove, DisjointPair]]:
    """One entry per legal move; for n >= 5 all resulting pairs are distinct."""
    return [(m, flip_pair(p, m).pair) for m in legal_moves(p)]


def fan(n: int, apex: int) -> Triangulation:
    """The triangulation whose diagonals all emanate from ``apex``."""
    if not 1 <= apex <= n:
        raise ValueError(f"apex {apex} out of range for n={n}")
    ds = []
    for v in range(1, n + 1):
        gap = abs(v - apex)
        if gap in (0, 1, n - 1):
            continue
        ds.append((min(apex, v), max(apex, v)))
    return Triangulation(n, ds)


def _chord_sets(lo: int, hi: int) -> Iterator[tuple[Diagonal, ...]]:
    # Triangulations of the sub-polygon on vertices lo..hi, as diagonal
    # tuples; the base chord (lo, hi) itself is not included.
    if hi - lo < 2:
        yield ()
        return
    for c in range(lo + 1, hi):
        for left in _chord_sets(lo, c):
            for right in _chord_sets(c, hi):
                extra: tuple[Diagonal, ...] = ()
                if c - lo >= 2:
                    extra += ((lo, c),)
                if hi - c >= 2:
                    extra += ((c, hi),)
                yield left + right + extra


def enumerate_triangulations(n: int, cap: int = TRIANGULATION_CAP) -> list[Triangulation]:
    """All triangulations of the n-gon, sorted by diagonal key.

    The count is the Catalan number C(n-2).
    """
    if n < 3 or n > cap:
        raise CapExceeded(f"triangulation enumeration capped at {cap}, got {n}")
    tris = [Triangulation._make(n, frozenset(ds)) for ds in _chord_sets(1, n)]
    tris.sort()
    return tris


_TRI_CACHE: dict[int, list[Triangulation]] = {}


def _triangulations_cached(n: int, cap: int = TRIANGULATION_CAP) -> list[Triangulation]:
    if n not in _TRI_CACHE:
        _TRI_CACHE[n] = enumerate_triangulations(n, cap)
    return _TRI_CACHE[n]


def all_diagonals(n: int) -> list[Diagonal]:
    return [(a, b) for a in range(1, n + 1) for b in range(a + 2, n + 1) if b - a <= n - 2]


def triangulation_masks(n: int, tris: list[Triangulation]) -> np.ndarray:
    """Encode triangulations as diagonal bitmasks (one uint64 per triangulation)."""
    index = {d: i for i, d in enumerate(all_diagonals(n))}
    if len(index) > 64:
        raise CapExceeded(f"{len(index)} diagonals exceed a 64-bit mask (n={n})")
    masks = np.zeros(len(tris), dtype=np.uint64)
    for i, t in enumerate(tris):
        m = 0
        for d in t.key:
            m |= 1 << index[d]
        masks[i] = m
    return masks


def enumerate_disjoint_pairs(n: int, cap: int = PAIR_CAP) -> list[DisjointPair]:
    """All ordered pairs of disjoint triangulations, in lexicographic order.

    The result is closed under coordinate swap. Kept object-level; for large n
    use :func:`disjoint_pair_index` and materialize rows on demand.
    """
    if n < 3 or n > cap:
        raise CapExceeded(f"disjoint-pair enumeration capped at {cap}, got {n}")
    tris, rows = disjoint_pair_index(n)
    return [DisjointPair._make(tris[i], tris[j]) for i, j in rows]


def disjoint_pair_index(n: int) -> tuple[list[Triangulation], np.ndarray]:
    """Triangulation list plus an (m, 2) int32 array of disjoint index pairs.

    Row order is lexicographic in the triangulation order, so row k is a
    stable identifier for the k-th disjoint pair.
    """
    tris = _triangulations_cached(n)
    if n <= MASK_CAP:
        masks = triangulation_masks(n, tris)
        chunks = []
        for i in range(len(tris)):
            js = np.flatnonzero((masks & masks[i]) == 0)
            rows = np.empty((len(js), 2), dtype=np.int32)
            rows[:, 0] = i
            rows[:, 1] = js
            chunks.append(rows)
        return tris, np.concatenate(chunks) if chunks else np.empty((0, 2), np.int32)
    sets = [t.diagonals for t in tris]
    out = [
        (i, j)
        for i, s in enumerate(sets)
        for j, u in enumerate(sets)
        if not (s & u)
    ]
    return tris, np.array(out, dtype=np.int32).reshape(-1, 2)


def count_disjoint_pairs(n: int, cap: int = MASK_CAP) -> int:
    """Number of ordered disjoint pairs, without materializing them."""
    if n < 3 or n > cap:
        raise CapExceeded(f"disjoint-pair counting capped at {cap}, got {n}")
    from . import kernels

    tris = _triangulations_cached(n)
    masks = triangulation_masks(n, tris)
    return int(kernels.count_disjoint_ordered(masks))
