from collections import Counter
from fractions import Fraction
from itertools import product

import pytest

from tangleflip import (
    CacheCorrupt,
    DivisibilityViolation,
    OutOfRange,
    TablesMissing,
    build_count_table,
    compute_irreducible_counts,
    compute_planar_counts,
    convolution_powers,
    count_by_core,
    count_extensions,
    enumerate_tanglegrams,
    irr,
    verify_against_bruteforce,
)
from tangleflip.counting import load_cache, save_cache

# Reference counts by (size, core size); the bottom-right cell of the size-8
# row is forced by the row total 63429 and the composition formula.
REFERENCE_BY_CORE = {
    2: {2: 1},
    3: {2: 1, 3: 1},
    4: {2: 3, 3: 3, 4: 5},
    5: {2: 13, 3: 9, 4: 20, 5: 34},
    6: {2: 90, 3: 46, 4: 70, 5: 170, 6: 273},
    7: {2: 747, 3: 312, 4: 360, 5: 680, 6: 1638, 7: 2436},
    8: {2: 7040, 3: 2580, 4: 2425, 5: 3570, 6: 7371, 7: 17052, 8: 23391},
}
REFERENCE_TOTALS = {1: 1, 2: 1, 3: 2, 4: 11, 5: 76, 6: 649, 7: 6173, 8: 63429}
REFERENCE_IRREDUCIBLE = {2: 1, 3: 1, 4: 5, 5: 34, 6: 273, 7: 2436, 8: 23391}


@pytest.fixture(scope="module")
def table():
    return build_count_table(8)


class TestIrreducibleCounts:
    def test_reference_values(self, table):
        for n, h in REFERENCE_IRREDUCIBLE.items():
            assert table.irreducible[n] == h

    def test_matches_layout_halving(self):
        # Twice the irreducible count is the disjoint-pair count of the
        # (n+1)-gon for n >= 3.
        from tangleflip import enumerate_disjoint_pairs

        h = compute_irreducible_counts(5)
        assert 2 * h[4] == len(enumerate_disjoint_pairs(5))
        assert 2 * h[5] == len(enumerate_disjoint_pairs(6))

    def test_small_special_cases(self):
        h = compute_irreducible_counts(3)
        assert h[1] == 1 and h[2] == 1 and h[3] == 1


class TestPlanarCounts:
    def test_reference_totals(self, table):
        for n, t in REFERENCE_TOTALS.items():
            assert table.planar[n] == t

    def test_strictly_increasing(self, table):
        for n in range(4, 9):
            assert table.planar[n] > table.planar[n - 1]
            assert table.irreducible[n] > table.irreducible[n - 1]

    def test_requires_full_h(self):
        with pytest.raises(TablesMissing):
            compute_planar_counts(5, [0, 1, 1])


class TestByCore:
    def test_reference_rows(self, table):
        for n, row in REFERENCE_BY_CORE.items():
            for k, v in row.items():
                assert count_by_core(n, k, table) == v, (n, k)

    def test_row_sums(self, table):
        for n in range(2, 9):
            assert sum(count_by_core(n, k, table) for k in range(2, n + 1)) == (
                table.planar[n]
            )

    def test_diagonal_is_irreducible_count(self, table):
        for n in range(2, 9):
            assert count_by_core(n, n, table) == table.irreducible[n]

    def test_parity_forms_agree(self, table):
        # Both closed forms for core size two match the generating-identity
        # coefficient extraction.
        t = table.planar
        for n in range(2, 9):
            ordered = sum(t[i] * t[n - i] for i in range(1, n))
            if n % 2 == 0:
                expected = (ordered + t[n // 2]) // 2
                assert (ordered + t[n // 2]) % 2 == 0
            else:
                expected = ordered // 2
                assert ordered % 2 == 0
            assert count_by_core(n, 2, table) == expected

    def test_out_of_range(self, table):
        with pytest.raises(OutOfRange):
            count_by_core(4, 1, table)
        with pytest.raises(OutOfRange):
            count_by_core(4, 5, table)


class TestExtensions:
    def test_reference(self, table):
        assert count_extensions(4, 2, table) == 3
        assert count_extensions(6, 4, table) == 14
        assert all(count_extensions(n, n, table) == 1 for n in range(2, 9))

    def test_divisibility_guard(self, table):
        import copy

        broken = copy.deepcopy(table)
        broken.by_core[(6, 4)] = count_by_core(6, 4, table) + 1
        with pytest.raises(DivisibilityViolation):
            count_extensions(6, 4, broken)


class TestConvolutionPowers:
    def test_x2_square(self, table):
        assert convolution_powers(table, 2, 2)[2] == 1

    def test_x4_square(self, table):
        # 2*t1*t3 + t2^2 = 5, cross-checked by explicit composition listing.
        assert convolution_powers(table, 2, 4)[4] == 5
        brute = sum(
            table.planar[a] * table.planar[4 - a] for a in range(1, 4)
        )
        assert brute == 5

    def test_against_composition_listing(self, table):
        # Independent oracle: enumerate compositions directly.
        for j, m in product((2, 3, 4), (4, 5, 6, 7)):
            def comps(total, parts):
                if parts == 1:
                    yield (total,)
                    return
                for first in range(1, total - parts + 2):
                    for rest in comps(total - first, parts - 1):
                        yield (first,) + rest

            brute = sum(
                _prod(table.planar[a] for a in c) for c in comps(m, j)
            )
            assert convolution_powers(table, j, m)[m] == brute

    def test_extension_restatement(self, table):
        for n in range(3, 9):
            for k in range(3, n + 1):
                assert (
                    convolution_powers(table, k, n)[n] * table.irreducible[k]
                    == count_by_core(n, k, table)
                )

    def test_out_of_range(self, table):
        with pytest.raises(OutOfRange):
            convolution_powers(table, 2, 99)


def _prod(xs):
    out = 1
    for x in xs:
        out *= x
    return out


class TestBruteForceCensus:
    @pytest.mark.parametrize("n", [2, 3, 4, 5])
    def test_census_matches(self, n, table):
        report = verify_against_bruteforce(n, table)
        assert report.match, (report.expected, report.actual)

    @pytest.mark.slow
    def test_census_size6(self, table):
        report = verify_against_bruteforce(6, table)
        assert report.match

    def test_census_values_independent(self, table):
        # The census itself, recomputed here without the report plumbing.
        census = Counter(
            irr(t)[0].size for t in enumerate_tanglegrams(5, planar_only=True)
        )
        assert dict(census) == REFERENCE_BY_CORE[5]


class TestGeneratingIdentity:
    def test_coefficientwise(self, table):
        # Size-n, core-k coefficient of the composed series equals the
        # by-core table entry, evaluated symbolically with exact fractions.
        t = table.planar
        for n in range(2, 9):
            for k in range(2, n + 1):
                if k == 2:
                    val = Fraction(
                        sum(t[i] * t[n - i] for i in range(1, n))
                        + (t[n // 2] if n % 2 == 0 else 0),
                        2,
                    )
                else:
                    val = Fraction(
                        table.irreducible[k] * convolution_powers(table, k, n)[n]
                    )
                assert val == count_by_core(n, k, table)


class TestCache:
    def test_roundtrip_identical_bytes(self, tmp_path, table):
        path = tmp_path / "counts_8.txt"
        save_cache(path, table)
        first = path.read_bytes()
        loaded = load_cache(path, 8)
        assert loaded is not None
        assert loaded.planar == table.planar
        assert loaded.irreducible == table.irreducible
        assert loaded.by_core == table.by_core
        save_cache(path, loaded)
        assert path.read_bytes() == first

    def test_build_uses_cache(self, tmp_path):
        t1 = build_count_table(6, cache_dir=tmp_path)
        assert (tmp_path / "counts_6.txt").exists()
        t2 = build_count_table(6, cache_dir=tmp_path)
        assert t1.planar == t2.planar

    def test_corruption_detected(self, tmp_path, table):
        path = tmp_path / "counts_8.txt"
        save_cache(path, table)
        text = path.read_text().replace("t 8 63429", "t 8 63430")
        path.write_text(text)
        with pytest.raises(CacheCorrupt):
            load_cache(path, 8)

    def test_stale_version_rebuilds(self, tmp_path, table):
        path = tmp_path / "counts_8.txt"
        path.write_text("# some-other-tool v9 max_n=8\n")
        assert load_cache(path, 8) is None


class TestImportedCounts:
    def test_accepts_matching_import(self):
        h = compute_irreducible_counts(8)
        t = build_count_table(8, imported_h=h)
        assert t.h_source == "imported"
        assert t.planar[8] == REFERENCE_TOTALS[8]

    def test_rejects_divergent_import(self):
        h = compute_irreducible_counts(8)
        h[6] += 1
        with pytest.raises(CacheCorrupt):
            build_count_table(8, imported_h=h)
