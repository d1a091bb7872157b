import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tangleflip import (
    CapExceeded,
    Layout,
    SizeMismatch,
    canonicalize,
    crossings,
    enumerate_tanglegrams,
    irr,
    is_planar,
    proper_subtanglegrams,
    size_two_tanglegram,
    substitute,
    unit_tanglegram,
    zero_crossing_layouts,
)
from tangleflip.tanglegram import (
    LEAF,
    mirror_tree,
    plane_trees,
    tree_encode,
    tree_parse,
    tree_shapes,
)

CHERRY = (LEAF, LEAF)


def random_tree(draw, n):
    if n == 1:
        return LEAF
    i = draw(st.integers(1, n - 1))
    return (random_tree(draw, i), random_tree(draw, n - i))


def apply_swaps(tree, swap_paths, path=()):
    if tree == LEAF:
        return LEAF
    a = apply_swaps(tree[0], swap_paths, path + (0,))
    b = apply_swaps(tree[1], swap_paths, path + (1,))
    return (b, a) if path in swap_paths else (a, b)


def transported_matching(left, right, matching, lswaps, rswaps):
    # Re-derive the positional matching after child swaps in both trees; the
    # original leaf identities come from the swap-aware traversal.
    from tangleflip.tanglegram import _order_after_swaps

    new_left = apply_swaps(left, lswaps)
    new_right = apply_swaps(right, rswaps)
    lorder = _order_after_swaps(left, lswaps, (), 0)
    rorder = _order_after_swaps(right, rswaps, (), 0)
    rpos = {orig: i + 1 for i, orig in enumerate(rorder)}
    new_matching = tuple(rpos[matching[orig] - 1] for orig in lorder)
    return new_left, new_right, new_matching


class TestTreeBasics:
    def test_encode_parse(self):
        t = ((LEAF, (LEAF, LEAF)), LEAF)
        assert tree_encode(t) == "((o(oo))o)"
        assert tree_parse(tree_encode(t)) == t

    def test_shape_counts(self):
        # Unordered binary trees by leaf count.
        assert [len(tree_shapes(n)) for n in range(1, 8)] == [1, 1, 1, 2, 3, 6, 11]

    def test_plane_tree_counts(self):
        assert [len(plane_trees(n)) for n in range(1, 7)] == [1, 1, 2, 5, 14, 42]


class TestCanonicalize:
    def test_root_swap_invariance(self):
        left = (CHERRY, LEAF)
        right = (LEAF, CHERRY)
        base = canonicalize(left, right, (1, 2, 3))
        swapped = canonicalize((LEAF, CHERRY), right, (3, 1, 2))
        assert base == swapped

    def test_size_counts(self):
        # Unique tanglegrams of sizes 1 and 2.
        assert unit_tanglegram().code == "o|o|1"
        assert size_two_tanglegram().size == 2

    def test_all_size4_codes(self):
        assert len(enumerate_tanglegrams(4)) == 13

    def test_size3_planar(self):
        assert len(enumerate_tanglegrams(3, planar_only=True)) == 2

    def test_rejects_non_bijection(self):
        with pytest.raises(ValueError):
            canonicalize(CHERRY, CHERRY, (1, 1))

    @settings(max_examples=150, deadline=None)
    @given(st.data())
    def test_swap_orbit_invariance(self, data):
        n = data.draw(st.integers(2, 7))
        left = random_tree(data.draw, n)
        right = random_tree(data.draw, n)
        matching = tuple(data.draw(st.permutations(range(1, n + 1))))
        base = canonicalize(left, right, matching)
        paths_l = [p for p in all_internal_paths(left)]
        paths_r = [p for p in all_internal_paths(right)]
        lswaps = frozenset(data.draw(st.sets(st.sampled_from(paths_l)))) if paths_l else frozenset()
        rswaps = frozenset(data.draw(st.sets(st.sampled_from(paths_r)))) if paths_r else frozenset()
        nl, nr, nm = transported_matching(left, right, matching, lswaps, rswaps)
        assert canonicalize(nl, nr, nm) == base

    def test_idempotent(self):
        for t in enumerate_tanglegrams(4):
            left, right, perm = t.decode()
            again = canonicalize(left, right, tuple(p + 1 for p in perm))
            assert again == t


def all_internal_paths(tree, path=()):
    if tree == LEAF:
        return
    yield path
    yield from all_internal_paths(tree[0], path + (0,))
    yield from all_internal_paths(tree[1], path + (1,))


class TestCrossings:
    def test_identity(self):
        lay = Layout((CHERRY, CHERRY), (CHERRY, CHERRY))
        assert crossings(lay) == 0

    def test_single_transposition(self):
        lay = Layout(CHERRY, CHERRY)
        assert crossings(lay, left_swaps=[()]) == 1

    def test_explicit_matching(self):
        # Leaf matching 1->4, 2->1, 3->2, 4->3 has three inversions.
        lay = Layout((CHERRY, CHERRY), (CHERRY, CHERRY))
        assert crossings(lay, matching=(4, 1, 2, 3)) == 3


class TestIsPlanar:
    def test_size2(self):
        ok, lay = is_planar(size_two_tanglegram())
        assert ok and lay is not None
        assert crossings(lay) == 0

    def test_size4_counts(self):
        tangles = enumerate_tanglegrams(4)
        planar = [t for t in tangles if is_planar(t)[0]]
        assert len(planar) == 11

    def test_nonplanar_irreducible_size4(self):
        # Exactly two of the thirteen size-4 tanglegrams are not planar, and
        # both are irreducible.
        bad = [t for t in enumerate_tanglegrams(4) if not is_planar(t)[0]]
        assert len(bad) == 2
        for t in bad:
            core, _ = irr(t)
            assert core == t

    def test_cap(self):
        from tangleflip import Tanglegram

        with pytest.raises(CapExceeded):
            is_planar(Tanglegram("o|o|1", 13))


class TestTwoLayouts:
    @pytest.mark.parametrize("n", [3, 4, 5, 6])
    def test_irreducible_has_two_mirror_layouts(self, n):
        for t in enumerate_tanglegrams(n, planar_only=True):
            core, _ = irr(t)
            if core != t or t.size < 3:
                continue
            lays = zero_crossing_layouts(t)
            assert len(lays) == 2
            assert lays[0].mirror() in lays and lays[1].mirror() in lays
            assert lays[0] != lays[1]

    def test_reducible_with_deep_core_has_four(self):
        # A size-3 irreducible block inside a size-3 core doubles the layout
        # count twice over.
        core3 = next(
            t
            for t in enumerate_tanglegrams(3, planar_only=True)
            if irr(t)[0] == t and t.size == 3
        )
        lay = zero_crossing_layouts(core3)[0]
        composed = substitute(lay, [core3, unit_tanglegram(), unit_tanglegram()])
        assert len(zero_crossing_layouts(composed)) == 4


class TestSpans:
    def test_irreducible_empty(self):
        # The size-3 irreducible layout: left spans (1,2), right spans (2,3).
        lay = Layout((CHERRY, LEAF), (LEAF, CHERRY))
        assert proper_subtanglegrams(lay) == []

    def test_two_width2_spans(self):
        lay = Layout((CHERRY, CHERRY), (CHERRY, CHERRY))
        spans = proper_subtanglegrams(lay)
        assert [s.interval for s in spans] == [(1, 2), (3, 4)]

    def test_root_never_reported(self):
        lay = Layout(CHERRY, CHERRY)
        assert proper_subtanglegrams(lay) == []


class TestIrrSubstitute:
    def test_irreducible_fixed_point(self):
        for t in enumerate_tanglegrams(4, planar_only=True):
            core, blocks = irr(t)
            if core == t:
                assert all(b.size == 1 for b in blocks)
                assert len(blocks) == t.size

    def test_block_sizes_sum(self):
        for t in enumerate_tanglegrams(5, planar_only=True):
            core, blocks = irr(t)
            assert sum(b.size for b in blocks) == t.size
            assert len(blocks) == core.size
            assert core.size >= 2

    def test_size4_census(self):
        from collections import Counter

        census = Counter(
            irr(t)[0].size for t in enumerate_tanglegrams(4, planar_only=True)
        )
        assert census == {2: 3, 3: 3, 4: 5}

    def test_size5_census(self):
        from collections import Counter

        census = Counter(
            irr(t)[0].size for t in enumerate_tanglegrams(5, planar_only=True)
        )
        assert census == {2: 13, 3: 9, 4: 20, 5: 34}

    def test_substitute_roundtrip(self):
        for t in enumerate_tanglegrams(5, planar_only=True):
            core, blocks = irr(t)
            layouts = zero_crossing_layouts(core)
            rebuilt = {substitute(l, blocks).code for l in layouts}
            assert t.code in rebuilt

    def test_substitute_unique_size3(self):
        # Size-2 core with a unit and a size-2 block gives the one reducible
        # planar size-3 tanglegram.
        lay = zero_crossing_layouts(size_two_tanglegram())[0]
        composed = substitute(lay, [unit_tanglegram(), size_two_tanglegram()])
        reducible3 = [
            t
            for t in enumerate_tanglegrams(3, planar_only=True)
            if irr(t)[0].size == 2
        ]
        assert composed == reducible3[0]

    def test_substitute_swap_under_size2_core_isomorphic(self):
        lay = zero_crossing_layouts(size_two_tanglegram())[0]
        a = substitute(lay, [unit_tanglegram(), size_two_tanglegram()])
        b = substitute(lay, [size_two_tanglegram(), unit_tanglegram()])
        assert a == b

    def test_substitute_distinct_blocks_distinct_results(self):
        core3 = next(
            t
            for t in enumerate_tanglegrams(3, planar_only=True)
            if irr(t)[0] == t
        )
        lay = zero_crossing_layouts(core3)[0]
        blocks2 = enumerate_tanglegrams(2, planar_only=True) + enumerate_tanglegrams(
            1, planar_only=True
        )
        seen = set()
        for combo in itertools.product(blocks2, repeat=3):
            seen.add(substitute(lay, list(combo)).code)
        assert len(seen) == len(blocks2) ** 3

    def test_size_mismatch(self):
        lay = zero_crossing_layouts(size_two_tanglegram())[0]
        with pytest.raises(SizeMismatch):
            substitute(lay, [unit_tanglegram()])


class TestEnumerate:
    @pytest.mark.parametrize(
        "n,total,planar",
        [(1, 1, 1), (2, 1, 1), (3, 2, 2), (4, 13, 11), (5, None, 76)],
    )
    def test_counts(self, n, total, planar):
        if total is not None:
            assert len(enumerate_tanglegrams(n)) == total
        assert len(enumerate_tanglegrams(n, planar_only=True)) == planar

    def test_cap(self):
        with pytest.raises(CapExceeded):
            enumerate_tanglegrams(7)


def test_mirror_tree_involution():
    t = ((LEAF, CHERRY), (CHERRY, LEAF))
    assert mirror_tree(mirror_tree(t)) == t


class TestLayoutParse:
    def test_roundtrip(self):
        lay = Layout((CHERRY, LEAF), (LEAF, CHERRY))
        assert Layout.parse(lay.encode()) == lay

    def test_identity_perm_tolerated(self):
        lay = Layout.parse("((oo)o)|(o(oo))|1,2,3")
        assert lay.size == 3

    def test_non_identity_perm_rejected(self):
        from tangleflip import NotPlanarLayout

        with pytest.raises(NotPlanarLayout):
            Layout.parse("((oo)o)|(o(oo))|1,3,2")


class TestIrrGeneralPath:
    def test_nonplanar_reducible_roundtrip(self):
        # Glue a nonplanar block under the size-2 core: the decomposition
        # must recover the core size and the block, without a planar layout.
        nonplanar = [t for t in enumerate_tanglegrams(4) if not is_planar(t)[0]][0]
        lay = zero_crossing_layouts(size_two_tanglegram())[0]
        composed = substitute(lay, [unit_tanglegram(), nonplanar])
        assert not is_planar(composed)[0]
        core, blocks = irr(composed)
        assert core.size == 2
        assert sorted(b.size for b in blocks) == [1, 4]
        assert nonplanar in blocks

    def test_nonplanar_irreducible_fixed_point(self):
        for t in enumerate_tanglegrams(4):
            if is_planar(t)[0]:
                continue
            core, blocks = irr(t)
            assert core == t and len(blocks) == 4


def test_irr_paths_agree_on_planar_inputs():
    # The planar-layout decomposition and the descendant-set decomposition
    # must produce the same core and block multiset.
    from collections import Counter

    from tangleflip.tanglegram import _irr_general

    for n in (3, 4, 5):
        for t in enumerate_tanglegrams(n, planar_only=True):
            core_a, blocks_a = irr(t)
            core_b, blocks_b = _irr_general(t)
            assert core_a == core_b, t.code
            assert Counter(b.code for b in blocks_a) == Counter(
                b.code for b in blocks_b
            ), t.code
