"""Plane duality between irreducible crossing-free layouts and disjoint
triangulation pairs, and the rotation operation that transports flips.

With root and leaf rays drawn to infinity, a plane tree with k leaves cuts
its half-plane into k+1 regions: 1 above the root, i+1 between leaves i and
i+1, and k+1 below. Those regions are the vertices of a convex (k+1)-gon,
and each internal tree vertex becomes the triangle of the three regions
touching its edges. Concretely a vertex spanning leaves [i, j] has parent
edge dual to the chord (i, j+1), so the dual triangulation's diagonals are
exactly the parent-edge chords of the non-root internal vertices. Both trees
of a layout use the same rule (numbering runs clockwise on the left tree and
counterclockwise on the right one, which mirror each other), and a shared
diagonal between the two duals is the same thing as a proper subtanglegram.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import CapExceeded, InvalidNode, NotIrreducible
from .polygon import (
    Diagonal,
    DisjointPair,
    FlipMove,
    Triangulation,
    enumerate_disjoint_pairs,
    flip_pair,
)
from .tanglegram import (
    LEAF,
    Layout,
    PlaneTree,
    leaf_count,
    plane_trees,
    replace_at,
    subtree_at,
)


def tree_chords(t: PlaneTree) -> dict[Diagonal, tuple[int, ...]]:
    """Map each non-root internal vertex's dual diagonal to its root path."""
    out: dict[Diagonal, tuple[int, ...]] = {}

    def walk(sub: PlaneTree, path: tuple[int, ...], base: int) -> int:
        if sub == LEAF:
            return 1
        s0 = walk(sub[0], path + (0,), base)
        s1 = walk(sub[1], path + (1,), base + s0)
        if path:
            out[(base + 1, base + s0 + s1 + 1)] = path
        return s0 + s1

    walk(t, (), 0)
    return out


def tree_to_triangulation(t: PlaneTree) -> Triangulation:
    """Plane dual of a tree with k leaves: a triangulation of the (k+1)-gon."""
    k = leaf_count(t)
    return Triangulation(k + 1, tree_chords(t).keys())


def tree_from_triangulation(t: Triangulation) -> PlaneTree:
    """Inverse of :func:`tree_to_triangulation`."""

    def build(lo: int, hi: int) -> PlaneTree:
        # Chord (lo, hi) spans leaves lo..hi-1.
        if hi == lo + 1:
            return LEAF
        c = next(
            c for c in range(lo + 1, hi) if t.is_edge(lo, c) and t.is_edge(c, hi)
        )
        return (build(lo, c), build(c, hi))

    return build(1, t.n)


def layout_to_pair(layout: Layout) -> DisjointPair:
    """Dual disjoint pair of an irreducible crossing-free layout of size n,
    living on the (n+1)-gon."""
    left = tree_chords(layout.left)
    right = tree_chords(layout.right)
    shared = left.keys() & right.keys()
    if shared:
        raise NotIrreducible(
            f"layout has proper subtanglegrams at diagonals {sorted(shared)}"
        )
    n = layout.size + 1
    return DisjointPair(
        Triangulation(n, left.keys()), Triangulation(n, right.keys())
    )


def pair_to_layout(p: DisjointPair) -> Layout:
    """Inverse of :func:`layout_to_pair`."""
    return Layout(
        tree_from_triangulation(p.first), tree_from_triangulation(p.second)
    )


@dataclass(frozen=True)
class RotationResult:
    layout: Layout
    kind: str  # "single" | "double"
    inverse: tuple[int, tuple[int, ...]]  # (side, node path)


def _rotate_tree(t: PlaneTree, path: tuple[int, ...]) -> PlaneTree:
    # Classical rotation promoting the vertex at `path` over its parent.
    parent_path = path[:-1]
    u = subtree_at(t, parent_path)
    if path[-1] == 0:
        v, c = u
        a, b = v
        new = (a, (b, c))
    else:
        a, v = u
        b, c = v
        new = ((a, b), c)
    return replace_at(t, parent_path, new)


def rotate(layout: Layout, side: int, path: tuple[int, ...]) -> RotationResult:
    """Rotate at a non-root internal vertex of one tree of the layout.

    If the rotation creates a proper subtanglegram, the unique synchronizing
    rotation in the other tree is performed as well; the output is again an
    irreducible layout. ``inverse`` names the rotation that undoes the move.
    """
    if side not in (1, 2):
        raise InvalidNode("side must be 1 or 2")
    tree = layout.left if side == 1 else layout.right
    other = layout.right if side == 1 else layout.left
    if not path:
        raise InvalidNode("cannot rotate at the root")
    try:
        node = subtree_at(tree, path)
    except (IndexError, TypeError):
        raise InvalidNode(f"no vertex at path {path}") from None
    if node == LEAF:
        raise InvalidNode("cannot rotate at a leaf")
    old_chords = set(tree_chords(tree))
    new_tree = _rotate_tree(tree, path)
    new_chords = tree_chords(new_tree)
    (fresh,) = set(new_chords) - old_chords
    other_chords = tree_chords(other)
    if fresh in other_chords:
        sync_path = other_chords[fresh]
        new_other = _rotate_tree(other, sync_path)
        sync_chords = tree_chords(new_other)
        (fresh2,) = set(sync_chords) - set(other_chords)
        kind = "double"
        inv_side = 2 if side == 1 else 1
        inverse = (inv_side, sync_chords[fresh2])
    else:
        new_other = other
        kind = "single"
        inverse = (side, new_chords[fresh])
    if side == 1:
        out = Layout(new_tree, new_other)
    else:
        out = Layout(new_other, new_tree)
    if tree_chords(out.left).keys() & tree_chords(out.right).keys():
        raise NotIrreducible("rotation produced a reducible layout")
    return RotationResult(out, kind, inverse)


def rotation_sites(layout: Layout) -> list[tuple[int, tuple[int, ...]]]:
    """All (side, path) handles eligible for rotation: non-root internal
    vertices of either tree, 2(n-2) of them for size n."""
    sites = []
    for side, tree in ((1, layout.left), (2, layout.right)):
        for _, path in sorted(tree_chords(tree).items()):
            sites.append((side, path))
    return sites


def move_for_rotation(layout: Layout, side: int, path: tuple[int, ...]) -> FlipMove:
    """The flip on the dual pair that corresponds to rotating at (side, path)."""
    tree = layout.left if side == 1 else layout.right
    chords = {p: d for d, p in tree_chords(tree).items()}
    if path not in chords:
        raise InvalidNode(f"path {path} is not a rotatable vertex")
    return FlipMove(side, chords[path])


def irreducible_layouts(n: int, cap: int = 8) -> list[Layout]:
    """All irreducible crossing-free layouts of size n, built directly from
    plane tree pairs (no duality involved)."""
    if n > cap:
        raise CapExceeded(f"layout enumeration capped at size {cap}, got {n}")
    out = []
    for left in plane_trees(n):
        lc = tree_chords(left).keys()
        for right in plane_trees(n):
            if lc & tree_chords(right).keys():
                continue
            out.append(Layout(left, right))
    return sorted(out, key=lambda l: l.encode())


def rotation_graph_isomorphic(n: int, cap: int = 8) -> bool:
    """Check that layouts-with-rotations and the dual flip graph coincide.

    Builds the rotation graph on irreducible layouts of size n from scratch,
    builds the flip graph on disjoint pairs of the (n+1)-gon, and verifies
    that the plane dual is an adjacency-preserving bijection.
    """
    layouts = irreducible_layouts(n, cap=cap)
    pairs = enumerate_disjoint_pairs(n + 1)
    images = [layout_to_pair(l) for l in layouts]
    if len(set(images)) != len(layouts) or set(images) != set(pairs):
        return False
    index = {p: i for i, p in enumerate(images)}
    rot_edges = set()
    for i, layout in enumerate(layouts):
        for side, path in rotation_sites(layout):
            res = rotate(layout, side, path)
            j = index[layout_to_pair(res.layout)]
            rot_edges.add((min(i, j), max(i, j)))
    flip_edges = set()
    for i, p in enumerate(images):
        for d in p.first.key:
            q = flip_pair(p, FlipMove(1, d)).pair
            j = index[q]
            flip_edges.add((min(i, j), max(i, j)))
        for d in p.second.key:
            q = flip_pair(p, FlipMove(2, d)).pair
            j = index[q]
            flip_edges.add((min(i, j), max(i, j)))
    return rot_edges == flip_edges
