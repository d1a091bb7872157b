"""Rooted binary trees, tanglegram layouts, and canonical forms.

A plane tree is a nested tuple: ``()`` is a leaf and ``(left, right)`` an
internal vertex; the first child is drawn on top. Leaf positions are read
top to bottom, starting at 1. A tanglegram is a pair of such trees plus a
leaf matching, considered up to independent child swaps in each tree (the
trees themselves are never exchanged); its canonical code is the minimum
``left|right|perm`` encoding over all such swaps.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator, Sequence

from .errors import CapExceeded, SizeMismatch

PlaneTree = tuple
LEAF: PlaneTree = ()

#: Planarity oracle cap: the layout search is exponential in tree size.
PLANARITY_CAP = 12
#: Enumeration of all tanglegrams of a given size is brute force.
ENUMERATION_CAP = 6
#: Canonicalization walks the full orbit of one tree's symmetric-node swaps.
ORBIT_CAP = 1 << 16


def leaf_count(t: PlaneTree) -> int:
    return 1 if t == LEAF else leaf_count(t[0]) + leaf_count(t[1])


def tree_encode(t: PlaneTree) -> str:
    if t == LEAF:
        return "o"
    return "(" + tree_encode(t[0]) + tree_encode(t[1]) + ")"


def tree_parse(s: str) -> PlaneTree:
    tree, pos = _parse_at(s, 0)
    if pos != len(s):
        raise ValueError(f"trailing characters in tree encoding {s!r}")
    return tree


def _parse_at(s: str, i: int) -> tuple[PlaneTree, int]:
    if i >= len(s):
        raise ValueError(f"truncated tree encoding {s!r}")
    if s[i] == "o":
        return LEAF, i + 1
    if s[i] != "(":
        raise ValueError(f"unexpected {s[i]!r} at {i} in {s!r}")
    left, i = _parse_at(s, i + 1)
    right, i = _parse_at(s, i)
    if i >= len(s) or s[i] != ")":
        raise ValueError(f"missing ')' at {i} in {s!r}")
    return (left, right), i + 1


def mirror_tree(t: PlaneTree) -> PlaneTree:
    """Reverse the child order at every vertex (top-bottom reflection)."""
    if t == LEAF:
        return LEAF
    return (mirror_tree(t[1]), mirror_tree(t[0]))


def subtree_at(t: PlaneTree, path: tuple[int, ...]) -> PlaneTree:
    for step in path:
        t = t[step]
    return t


def replace_at(t: PlaneTree, path: tuple[int, ...], new: PlaneTree) -> PlaneTree:
    if not path:
        return new
    if path[0] == 0:
        return (replace_at(t[0], path[1:], new), t[1])
    return (t[0], replace_at(t[1], path[1:], new))


@lru_cache(maxsize=None)
def plane_trees(n: int) -> tuple[PlaneTree, ...]:
    """All plane binary trees with n leaves (Catalan(n-1) of them)."""
    if n == 1:
        return (LEAF,)
    out = []
    for i in range(1, n):
        for a in plane_trees(i):
            for b in plane_trees(n - i):
                out.append((a, b))
    return tuple(out)


@lru_cache(maxsize=None)
def tree_shapes(n: int) -> tuple[PlaneTree, ...]:
    """One plane representative per unordered binary tree with n leaves."""
    if n == 1:
        return (LEAF,)
    seen = {}
    for i in range(1, n // 2 + 1):
        for a in tree_shapes(i):
            for b in tree_shapes(n - i):
                t = (a, b) if tree_encode(a) <= tree_encode(b) else (b, a)
                seen.setdefault(_shape_code(t), t)
    return tuple(seen[c] for c in sorted(seen))


@lru_cache(maxsize=None)
def _shape_code(t: PlaneTree) -> str:
    # Canonical code of the underlying unordered tree.
    if t == LEAF:
        return "o"
    a, b = _shape_code(t[0]), _shape_code(t[1])
    if b < a:
        a, b = b, a
    return "(" + a + b + ")"


@dataclass(frozen=True)
class Layout:
    """A crossing-free drawing: two plane trees with the implicit matching
    left leaf i -- right leaf i (matching edges are horizontal)."""

    left: PlaneTree
    right: PlaneTree

    def __post_init__(self):
        if leaf_count(self.left) != leaf_count(self.right):
            raise ValueError("layout trees must have equal leaf counts")

    @property
    def size(self) -> int:
        return leaf_count(self.left)

    def mirror(self) -> "Layout":
        return Layout(mirror_tree(self.left), mirror_tree(self.right))

    def encode(self) -> str:
        return f"{tree_encode(self.left)}|{tree_encode(self.right)}"

    @classmethod
    def parse(cls, text: str) -> "Layout":
        from .errors import NotPlanarLayout

        parts = text.strip().split("|")
        if len(parts) == 3:
            # Tolerate a spelled-out identity matching; anything else is a
            # tanglegram with crossings, not a layout.
            perm = [int(x) for x in parts[2].split(",")]
            if perm != list(range(1, len(perm) + 1)):
                raise NotPlanarLayout(
                    "matching is not the identity; not a crossing-free layout"
                )
            parts = parts[:2]
        if len(parts) != 2:
            raise ValueError(f"bad layout encoding {text!r}")
        return cls(tree_parse(parts[0]), tree_parse(parts[1]))


@dataclass(frozen=True, order=True)
class Tanglegram:
    """A tanglegram identified by its canonical code; equal codes mean
    isomorphic tanglegrams."""

    code: str
    size: int = field(compare=False)

    def decode(self) -> tuple[PlaneTree, PlaneTree, tuple[int, ...]]:
        """Canonical plane trees and 0-based matching (left id -> right id)."""
        left_s, right_s, perm_s = self.code.split("|")
        perm = tuple(int(x) - 1 for x in perm_s.split(","))
        return tree_parse(left_s), tree_parse(right_s), perm

    def __repr__(self):
        return f"Tanglegram({self.code!r})"


def unit_tanglegram() -> Tanglegram:
    return Tanglegram("o|o|1", 1)


@dataclass(frozen=True)
class SubtanglegramSpan:
    """Matched non-root subtree pair covering one contiguous leaf interval."""

    left_path: tuple[int, ...]
    right_path: tuple[int, ...]
    interval: tuple[int, int]  # 1-based, inclusive


# ---------------------------------------------------------------------------
# Canonical codes.
#
# The code minimizes (left code, right code, matching) lexicographically over
# independent child swaps in both trees. The left tree contributes a full
# orbit of minimum-code embeddings (one branch per node whose children have
# equal shape codes); for each of those the right-tree freedom is resolved
# greedily, which is exact because the position of the i-th matched leaf
# depends only on swap decisions at its own symmetric ancestors.


def _orbit(t: PlaneTree, base: int) -> tuple[str, list[tuple[int, ...]], int]:
    if t == LEAF:
        return "o", [(base,)], 1
    c0, o0, s0 = _orbit(t[0], base)
    c1, o1, s1 = _orbit(t[1], base + s0)
    if c0 < c1:
        orders = [x + y for x in o0 for y in o1]
        code = "(" + c0 + c1 + ")"
    elif c1 < c0:
        orders = [y + x for x in o0 for y in o1]
        code = "(" + c1 + c0 + ")"
    else:
        orders = [x + y for x in o0 for y in o1]
        orders += [y + x for x in o0 for y in o1]
        code = "(" + c0 + c1 + ")"
    if len(orders) > ORBIT_CAP:
        raise CapExceeded("canonicalization orbit too large; tree too symmetric")
    return code, orders, s0 + s1


def _indexed(t: PlaneTree):
    """Flatten ``t`` into arrays after reordering to canonical shape.

    Returns (code, children, sym, leaf_node, parent) where children[v] is a
    pair of node ids or None, sym[v] marks equal-shape children (a free
    swap), leaf_node maps original in-order leaf ids to node ids, and
    parent[v] is the parent node id (-1 at the root).
    """
    children: list[tuple[int, int] | None] = []
    sym: list[bool] = []
    parent: list[int] = []
    leaf_node: dict[int, int] = {}

    def build(sub: PlaneTree, par: int, base: int) -> tuple[str, int, int]:
        node = len(children)
        children.append(None)
        sym.append(False)
        parent.append(par)
        if sub == LEAF:
            leaf_node[base] = node
            return "o", node, 1
        c0, n0, s0 = build(sub[0], node, base)
        c1, n1, s1 = build(sub[1], node, base + s0)
        if c1 < c0:
            children[node] = (n1, n0)
            code = "(" + c1 + c0 + ")"
        else:
            children[node] = (n0, n1)
            code = "(" + c0 + c1 + ")"
        sym[node] = c0 == c1
        return code, node, s0 + s1

    code, _, _ = build(t, -1, 0)
    return code, children, sym, leaf_node, parent


def _greedy_right_perm(children, sym, leaf_node, parent, partner_seq) -> tuple[int, ...]:
    # Resolve free swaps so that earlier matched leaves land as high as
    # possible, then read off final positions. This is exact: the position of
    # the i-th value depends only on swap decisions at its own symmetric
    # ancestors, and those are still free when it is processed.
    decision = {}
    for v in partner_seq:
        node = leaf_node[v]
        up = parent[node]
        prev = node
        while up != -1:
            if sym[up] and up not in decision:
                decision[up] = 0 if children[up][0] == prev else 1
            prev = up
            up = parent[up]
    pos: dict[int, int] = {}
    leaf_of_node = {n: l for l, n in leaf_node.items()}

    def walk(node: int, counter: list[int]):
        ch = children[node]
        if ch is None:
            counter[0] += 1
            pos[leaf_of_node[node]] = counter[0]
            return
        a, b = ch
        if decision.get(node, 0):
            a, b = b, a
        walk(a, counter)
        walk(b, counter)

    walk(0, [0])
    return tuple(pos[v] for v in partner_seq)


@lru_cache(maxsize=1 << 16)
def _canonicalize_cached(
    left: PlaneTree, right: PlaneTree, matching: tuple[int, ...]
) -> Tanglegram:
    k = leaf_count(left)
    lcode, lorders, _ = _orbit(left, 0)
    rcode, children, sym, leaf_node, parent = _indexed(right)
    best: tuple[int, ...] | None = None
    for order in lorders:
        partner = tuple(matching[i] for i in order)
        perm = _greedy_right_perm(children, sym, leaf_node, parent, partner)
        if best is None or perm < best:
            best = perm
    assert best is not None
    code = f"{lcode}|{rcode}|{','.join(str(p) for p in best)}"
    return Tanglegram(code, k)


def canonicalize(
    left: PlaneTree, right: PlaneTree, matching: Sequence[int]
) -> Tanglegram:
    """Canonical form of the tanglegram (left, right, matching).

    ``matching`` maps left leaf i to right leaf matching[i-1], both counted
    top to bottom, 1-based. The result is invariant under any child swaps
    applied to either input tree.
    """
    k = leaf_count(left)
    if leaf_count(right) != k:
        raise ValueError("trees must have equal leaf counts")
    perm0 = tuple(m - 1 for m in matching)
    if sorted(perm0) != list(range(k)):
        raise ValueError("matching must be a bijection on 1..size")
    return _canonicalize_cached(left, right, perm0)


def size_two_tanglegram() -> Tanglegram:
    return canonicalize((LEAF, LEAF), (LEAF, LEAF), (1, 2))


# ---------------------------------------------------------------------------
# Layout search (planarity oracle) and crossing counts.


def _embeddings(t: PlaneTree, base: int) -> Iterator[tuple[PlaneTree, tuple[int, ...]]]:
    # Every plane re-embedding of t, with the original leaf ids in new order.
    if t == LEAF:
        yield LEAF, (base,)
        return
    s0 = leaf_count(t[0])
    for a, oa in _embeddings(t[0], base):
        for b, ob in _embeddings(t[1], base + s0):
            yield (a, b), oa + ob
            yield (b, a), ob + oa


def _realize(t: PlaneTree, req_pos: dict[int, int], base: int):
    # Re-embed t so that original leaf ids appear in the order given by
    # req_pos; returns (tree, lo, hi) or None if some subtree is not
    # contiguous in that order.
    if t == LEAF:
        p = req_pos[base]
        return LEAF, p, p
    s0 = leaf_count(t[0])
    r0 = _realize(t[0], req_pos, base)
    if r0 is None:
        return None
    r1 = _realize(t[1], req_pos, base + s0)
    if r1 is None:
        return None
    t0, lo0, hi0 = r0
    t1, lo1, hi1 = r1
    lo, hi = min(lo0, lo1), max(hi0, hi1)
    if hi - lo + 1 != leaf_count(t[0]) + leaf_count(t[1]):
        return None
    if hi0 < lo1:
        return (t0, t1), lo, hi
    if hi1 < lo0:
        return (t1, t0), lo, hi
    return None


def is_planar(t: Tanglegram, cap: int = PLANARITY_CAP) -> tuple[bool, Layout | None]:
    """Exhaustively search for a crossing-free layout.

    A layout has zero crossings iff the induced matching is the identity, so
    it suffices to scan left-tree embeddings and test whether the forced
    right leaf order is realizable by some embedding of the right tree.
    """
    if t.size > cap:
        raise CapExceeded(f"planarity oracle capped at size {cap}, got {t.size}")
    left, right, perm = t.decode()
    for ltree, lorder in _embeddings(left, 0):
        req_pos = {perm[v]: i + 1 for i, v in enumerate(lorder)}
        hit = _realize(right, req_pos, 0)
        if hit is not None:
            return True, Layout(ltree, hit[0])
    return False, None


def zero_crossing_layouts(t: Tanglegram, cap: int = PLANARITY_CAP) -> list[Layout]:
    """All distinct crossing-free layouts of ``t`` (used by property checks)."""
    if t.size > cap:
        raise CapExceeded(f"planarity oracle capped at size {cap}, got {t.size}")
    left, right, perm = t.decode()
    found = set()
    for ltree, lorder in _embeddings(left, 0):
        req_pos = {perm[v]: i + 1 for i, v in enumerate(lorder)}
        hit = _realize(right, req_pos, 0)
        if hit is not None:
            found.add(Layout(ltree, hit[0]))
    return sorted(found, key=lambda l: l.encode())


def _order_after_swaps(
    t: PlaneTree, swaps: frozenset, path: tuple[int, ...], base: int
) -> list[int]:
    if t == LEAF:
        return [base]
    s0 = leaf_count(t[0])
    o0 = _order_after_swaps(t[0], swaps, path + (0,), base)
    o1 = _order_after_swaps(t[1], swaps, path + (1,), base + s0)
    return o1 + o0 if path in swaps else o0 + o1


def crossings(
    layout: Layout,
    left_swaps: Sequence[tuple[int, ...]] = (),
    right_swaps: Sequence[tuple[int, ...]] = (),
    matching: Sequence[int] | None = None,
) -> int:
    """Crossing count after swapping children at the listed node paths.

    The swap lists name internal nodes by root paths (0 = top child). The
    base matching defaults to the layout's identity matching; an explicit
    1-based matching can be supplied to score an arbitrary drawing. The count
    is the number of inversions of the induced leaf permutation.
    """
    k = layout.size
    if matching is None:
        perm0 = list(range(k))
    else:
        perm0 = [m - 1 for m in matching]
    lorder = _order_after_swaps(layout.left, frozenset(left_swaps), (), 0)
    rorder = _order_after_swaps(layout.right, frozenset(right_swaps), (), 0)
    rpos = {v: i for i, v in enumerate(rorder)}
    pi = [rpos[perm0[v]] for v in lorder]
    return sum(
        1 for i in range(k) for j in range(i + 1, k) if pi[i] > pi[j]
    )


# ---------------------------------------------------------------------------
# Subtanglegram structure: spans, decomposition, substitution.


def _interval_map(t: PlaneTree) -> dict[tuple[int, int], tuple[int, ...]]:
    # Leaf interval covered by each internal non-root node, 1-based.
    out: dict[tuple[int, int], tuple[int, ...]] = {}

    def walk(sub: PlaneTree, path: tuple[int, ...], base: int) -> int:
        if sub == LEAF:
            return 1
        s0 = walk(sub[0], path + (0,), base)
        s1 = walk(sub[1], path + (1,), base + s0)
        if path:
            out[(base + 1, base + s0 + s1)] = path
        return s0 + s1

    walk(t, (), 0)
    return out


def proper_subtanglegrams(layout: Layout) -> list[SubtanglegramSpan]:
    """All proper subtanglegram spans of an identity-matched layout.

    A span pairs a non-root internal node of each tree covering the same
    contiguous leaf interval; the full tanglegram (paired roots) is never
    reported. Sorted by interval start.
    """
    left = _interval_map(layout.left)
    right = _interval_map(layout.right)
    spans = [
        SubtanglegramSpan(left[iv], right[iv], iv)
        for iv in sorted(left.keys() & right.keys())
    ]
    return spans


def _sub_block(layout: Layout, span: SubtanglegramSpan) -> Tanglegram:
    lt = subtree_at(layout.left, span.left_path)
    rt = subtree_at(layout.right, span.right_path)
    size = span.interval[1] - span.interval[0] + 1
    return canonicalize(lt, rt, tuple(range(1, size + 1)))


def irr(t: Tanglegram, cap: int = PLANARITY_CAP) -> tuple[Tanglegram, list[Tanglegram]]:
    """Contract every maximal proper subtanglegram to a matched leaf pair.

    Returns the contracted core and the blocks in top-to-bottom order of a
    crossing-free layout when one exists (canonical order otherwise). The
    block list has one entry per core leaf, so block sizes sum to the input
    size; an irreducible input comes back unchanged with all-unit blocks.
    """
    if t.size == 1:
        return t, [t]
    planar, layout = is_planar(t, cap=cap)
    if planar:
        assert layout is not None
        spans = proper_subtanglegrams(layout)
        maximal = [
            s
            for s in spans
            if not any(
                o is not s
                and o.interval[0] <= s.interval[0]
                and s.interval[1] <= o.interval[1]
                for o in spans
            )
        ]
        maximal.sort(key=lambda s: s.interval)
        blocks: list[Tanglegram] = []
        core_left = layout.left
        core_right = layout.right
        # Replace maximal spans by leaves from the bottom up so that paths
        # computed on the original trees stay valid.
        pos = 1
        idx = 0
        size = t.size
        intervals = [s.interval for s in maximal]
        covered = set()
        for s in maximal:
            covered.update(range(s.interval[0], s.interval[1] + 1))
        while pos <= size:
            if idx < len(intervals) and intervals[idx][0] == pos:
                blocks.append(_sub_block(layout, maximal[idx]))
                pos = intervals[idx][1] + 1
                idx += 1
            else:
                blocks.append(unit_tanglegram())
                pos += 1
        for s in sorted(maximal, key=lambda s: s.interval, reverse=True):
            core_left = replace_at(core_left, s.left_path, LEAF)
            core_right = replace_at(core_right, s.right_path, LEAF)
        k = len(blocks)
        core = canonicalize(core_left, core_right, tuple(range(1, k + 1)))
        return core, blocks
    return _irr_general(t)


def _descendant_sets(t: PlaneTree):
    out = []

    def walk(sub: PlaneTree, path: tuple[int, ...], base: int) -> int:
        if sub == LEAF:
            return 1
        s0 = walk(sub[0], path + (0,), base)
        s1 = walk(sub[1], path + (1,), base + s0)
        if path:
            out.append((path, frozenset(range(base, base + s0 + s1))))
        return s0 + s1

    walk(t, (), 0)
    return out


def _irr_general(t: Tanglegram) -> tuple[Tanglegram, list[Tanglegram]]:
    # Non-planar inputs: locate matched descendant sets directly on the
    # canonical trees and contract, ordering blocks by leftmost left leaf.
    left, right, perm = t.decode()
    right_sets = {s: path for path, s in _descendant_sets(right)}
    pairs = []
    for path, s in _descendant_sets(left):
        image = frozenset(perm[v] for v in s)
        if image in right_sets:
            pairs.append((path, right_sets[image], s))
    maximal = [
        (lp, rp, s)
        for lp, rp, s in pairs
        if not any(s < s2 for _, _, s2 in pairs)
    ]
    maximal.sort(key=lambda item: min(item[2]))
    covered = set()
    for _, _, s in maximal:
        covered |= s
    blocks_at: dict[int, Tanglegram] = {}
    core_left, core_right = left, right
    for lp, rp, s in sorted(maximal, key=lambda item: len(item[0]), reverse=True):
        lt = subtree_at(left, lp)
        rt = subtree_at(right, rp)
        ids = sorted(s)
        sub_perm = tuple(
            sorted(perm[v] for v in ids).index(perm[v]) + 1 for v in ids
        )
        blocks_at[min(s)] = canonicalize(lt, rt, sub_perm)
        core_left = replace_at(core_left, lp, LEAF)
        core_right = replace_at(core_right, rp, LEAF)
    for v in range(t.size):
        if v not in covered:
            blocks_at[v] = unit_tanglegram()
    starts = sorted(blocks_at)
    blocks = [blocks_at[v] for v in starts]
    # Matching for the core: group starts on both sides, in leaf order.
    group_of = {}
    for gi, (lp, rp, s) in enumerate(maximal):
        for v in s:
            group_of[("L", v)] = ("g", gi)
            group_of[("R", perm[v])] = ("g", gi)
    for v in range(t.size):
        if v not in covered:
            group_of[("L", v)] = ("u", v)
            group_of[("R", perm[v])] = ("u", v)
    left_groups = []
    for v in range(t.size):
        g = group_of[("L", v)]
        if g not in left_groups:
            left_groups.append(g)
    right_groups = []
    for v in range(t.size):
        g = group_of[("R", v)]
        if g not in right_groups:
            right_groups.append(g)
    core_perm = tuple(right_groups.index(g) + 1 for g in left_groups)
    core = canonicalize(core_left, core_right, core_perm)
    return core, blocks


def _plant(t: PlaneTree, subs: list[PlaneTree], counter: list[int]) -> PlaneTree:
    if t == LEAF:
        sub = subs[counter[0]]
        counter[0] += 1
        return sub
    return (
        _plant(t[0], subs, counter),
        _plant(t[1], subs, counter),
    )


def substitute(layout: Layout, blocks: Sequence[Tanglegram]) -> Tanglegram:
    """Replace the layout's matched leaves, top to bottom, by the blocks.

    The i-th matched leaf pair becomes block i's tree pair with its own
    matching, shifted past the earlier blocks; the composed tanglegram is
    returned canonicalized.
    """
    k = layout.size
    if len(blocks) != k:
        raise SizeMismatch(f"layout has {k} leaves but {len(blocks)} blocks given")
    decoded = [b.decode() for b in blocks]
    left = _plant(layout.left, [d[0] for d in decoded], [0])
    right = _plant(layout.right, [d[1] for d in decoded], [0])
    matching = []
    offset = 0
    for (_, _, perm), b in zip(decoded, blocks):
        matching.extend(offset + p + 1 for p in perm)
        offset += b.size
    return canonicalize(left, right, tuple(matching))


_SUBSTITUTE_MEMO: dict[tuple, Tanglegram] = {}


def substitute_cached(layout: Layout, blocks: tuple[Tanglegram, ...]) -> Tanglegram:
    """Memoized :func:`substitute` for the sampling hot path."""
    key = (layout.left, layout.right, tuple(b.code for b in blocks))
    hit = _SUBSTITUTE_MEMO.get(key)
    if hit is None:
        hit = substitute(layout, blocks)
        _SUBSTITUTE_MEMO[key] = hit
    return hit


def enumerate_tanglegrams(
    n: int, planar_only: bool = False, cap: int = ENUMERATION_CAP
) -> list[Tanglegram]:
    """All tanglegrams of size n by brute force over shape pairs and matchings."""
    if n > cap:
        raise CapExceeded(f"tanglegram enumeration capped at size {cap}, got {n}")
    codes: dict[str, Tanglegram] = {}
    shapes = tree_shapes(n)
    for left in shapes:
        for right in shapes:
            for sigma in itertools.permutations(range(1, n + 1)):
                t = canonicalize(left, right, sigma)
                codes.setdefault(t.code, t)
    out = sorted(codes.values(), key=lambda t: t.code)
    if planar_only:
        out = [t for t in out if is_planar(t)[0]]
    return out
