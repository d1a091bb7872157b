"""Exact integer counts of planar tanglegrams by size and by core size.

Everything here is arbitrary-precision: counts grow exponentially and the
sampler consumes them as exact probabilities. The irreducible counts come
from polygon geometry (ordered disjoint triangulation pairs of the
(n+1)-gon, halved for n >= 3 because each irreducible tanglegram of size at
least 3 has exactly two crossing-free layouts); the totals follow by a
coefficient recursion, and the split by core size by composition sums
evaluated through cached convolution powers.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from pathlib import Path

from .errors import (
    CacheCorrupt,
    CapExceeded,
    DivisibilityViolation,
    OutOfRange,
    TablesMissing,
)
from .polygon import count_disjoint_pairs
from .tanglegram import enumerate_tanglegrams, irr

DEFAULT_MAX_N = 11
CACHE_VERSION = "tangleflip-counts v1"


@dataclass
class CountTable:
    """Exact counts up to ``max_n``.

    ``planar[n]`` is the number of planar tanglegrams of size n,
    ``irreducible[n]`` the number of irreducible ones, ``by_core[(n, k)]``
    the number of planar tanglegrams of size n whose core has size k, and
    ``tuple_counts[j][m]`` the number of ordered j-tuples of planar
    tanglegrams with total size m.
    """

    max_n: int
    planar: list[int]
    irreducible: list[int]
    by_core: dict[tuple[int, int], int]
    tuple_counts: dict[int, list[int]] = field(default_factory=dict)
    h_source: str = "computed"

    def require(self, n: int) -> None:
        if n > self.max_n:
            raise TablesMissing(f"tables cover sizes up to {self.max_n}, need {n}")


def compute_irreducible_counts(max_n: int, pair_count_cap: int = 12) -> list[int]:
    """Irreducible planar tanglegram counts for sizes 1..max_n.

    Size n corresponds to ordered disjoint triangulation pairs of the
    (n+1)-gon; sizes 1 and 2 are unique and have a single layout, all larger
    ones have exactly two, so the pair count is halved.
    """
    if max_n + 1 > pair_count_cap:
        raise CapExceeded(
            f"irreducible counts need disjoint pairs of the {max_n + 1}-gon; "
            f"capped at {pair_count_cap}"
        )
    h = [0] * (max_n + 1)
    if max_n >= 1:
        h[1] = 1
    if max_n >= 2:
        h[2] = 1
    for n in range(3, max_n + 1):
        pairs = count_disjoint_pairs(n + 1)
        if pairs % 2:
            raise DivisibilityViolation(
                f"odd disjoint-pair count {pairs} for the {n + 1}-gon"
            )
        h[n] = pairs // 2
    return h


def compute_planar_counts(max_n: int, irreducible: list[int]) -> list[int]:
    """Total planar counts from the irreducible ones by coefficient recursion.

    The generating identity expands size-n tanglegrams by core size: half
    the ordered square plus half the diagonal for core size two, and the
    irreducible count times a composition sum for each larger core. Every
    term at size n only involves totals of smaller sizes, so filling the
    table in increasing n is well founded.
    """
    if len(irreducible) <= max_n:
        raise TablesMissing("irreducible counts too short")
    t = [0] * (max_n + 1)
    if max_n >= 1:
        t[1] = 1
    for n in range(2, max_n + 1):
        square = sum(t[i] * t[n - i] for i in range(1, n))
        dup = t[n // 2] if n % 2 == 0 else 0
        if (square + dup) % 2:
            raise DivisibilityViolation("core-size-2 term is not an integer")
        total = (square + dup) // 2
        # Powers of the series share work across core sizes at this n: a
        # size-n coefficient of the k-th power never touches t[n] itself
        # (every term has k >= 3 factors of size >= 1).
        cur = list(t)
        for k in range(2, n + 1):
            nxt = [0] * (n + 1)
            for m in range(k, n + 1):
                nxt[m] = sum(cur[m - a] * t[a] for a in range(1, m - k + 2))
            cur = nxt
            if k >= 3:
                total += irreducible[k] * cur[n]
        t[n] = total
    return t


def convolution_powers(table: CountTable, j: int, max_m: int) -> list[int]:
    """Coefficients 0..max_m of the j-th power of the planar count series."""
    if max_m > table.max_n:
        raise OutOfRange(f"requested coefficient {max_m} beyond max_n {table.max_n}")
    if j < 1:
        raise OutOfRange("power must be at least 1")
    if j in table.tuple_counts:
        return table.tuple_counts[j][: max_m + 1]
    if j == 1:
        coeffs = list(table.planar)
    else:
        prev = convolution_powers(table, j - 1, table.max_n)
        coeffs = [0] * (table.max_n + 1)
        for m in range(j, table.max_n + 1):
            coeffs[m] = sum(
                prev[m - a] * table.planar[a] for a in range(1, m - j + 2)
            )
    table.tuple_counts[j] = coeffs
    return coeffs[: max_m + 1]


def count_by_core(n: int, k: int, table: CountTable) -> int:
    """Planar tanglegrams of size n with core size k.

    Core size two halves an ordered sum (plus the equal-blocks diagonal when
    n is even); larger cores multiply the irreducible count by the
    composition sum, evaluated via convolution powers.
    """
    if not 2 <= k <= n:
        raise OutOfRange(f"need 2 <= k <= n, got k={k}, n={n}")
    table.require(n)
    t = table.planar
    if k == 2:
        square = sum(t[i] * t[n - i] for i in range(1, n))
        dup = t[n // 2] if n % 2 == 0 else 0
        if (square + dup) % 2:
            raise DivisibilityViolation("core-size-2 count is not an integer")
        return (square + dup) // 2
    return table.irreducible[k] * convolution_powers(table, k, n)[n]


def count_extensions(n: int, k: int, table: CountTable) -> int:
    """Ways to extend one size-k irreducible tanglegram to size n.

    This is the by-core count divided by the irreducible count; the division
    must be exact, anything else signals a counting bug (e.g. a tampered
    table), so the stored entry is used when present.
    """
    tnk = table.by_core.get((n, k))
    if tnk is None:
        tnk = count_by_core(n, k, table)
    hk = table.irreducible[k]
    if tnk % hk:
        raise DivisibilityViolation(
            f"count {tnk} for (n={n}, k={k}) is not divisible by {hk}"
        )
    return tnk // hk


def build_count_table(
    max_n: int = DEFAULT_MAX_N,
    cache_dir: str | Path | None = None,
    imported_h: list[int] | None = None,
    overlap_check: int = 8,
) -> CountTable:
    """Compute (or load) the full count table up to ``max_n``.

    An imported irreducible table extends the range beyond what pair
    enumeration can reach; it is cross-checked against computed values on
    the overlap before being trusted.
    """
    if cache_dir is not None and imported_h is None:
        cached = load_cache(Path(cache_dir) / f"counts_{max_n}.txt", max_n)
        if cached is not None and cached.h_source == "computed":
            return cached
    if imported_h is None:
        irreducible = compute_irreducible_counts(max_n)
        source = "computed"
    else:
        if len(imported_h) <= max_n:
            raise TablesMissing("imported irreducible table too short")
        check_to = min(overlap_check, max_n)
        computed = compute_irreducible_counts(check_to)
        for n in range(1, check_to + 1):
            if imported_h[n] != computed[n]:
                raise CacheCorrupt(
                    f"imported irreducible count at size {n} is {imported_h[n]}, "
                    f"computed {computed[n]}"
                )
        irreducible = list(imported_h[: max_n + 1])
        source = "imported"
    planar = compute_planar_counts(max_n, irreducible)
    table = CountTable(
        max_n=max_n,
        planar=planar,
        irreducible=irreducible,
        by_core={},
        h_source=source,
    )
    for n in range(2, max_n + 1):
        for k in range(2, n + 1):
            table.by_core[(n, k)] = count_by_core(n, k, table)
        row = sum(table.by_core[(n, k)] for k in range(2, n + 1))
        if row != planar[n]:
            raise DivisibilityViolation(
                f"row sum {row} at size {n} disagrees with total {planar[n]}"
            )
        # The sampler's branch probabilities must sum to one exactly.
        if n >= 2:
            square = sum(planar[i] * planar[n - i] for i in range(1, n))
            dup = planar[n // 2] if n % 2 == 0 else 0
            if 2 * count_extensions(n, 2, table) != square + dup:
                raise DivisibilityViolation("size-two branch masses do not sum to 1")
    if table.irreducible[max_n] != table.by_core.get((max_n, max_n), 0):
        raise DivisibilityViolation("diagonal does not match irreducible counts")
    if cache_dir is not None:
        save_cache(Path(cache_dir) / f"counts_{max_n}.txt", table)
    return table


def load_irreducible_counts(path: str | Path) -> list[int]:
    """Read an external irreducible-count table: lines ``h n value``.

    The result is untrusted until :func:`build_count_table` cross-checks it
    against computed values on the overlap.
    """
    values: dict[int, int] = {}
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if parts[0] != "h" or len(parts) != 3:
            raise CacheCorrupt(f"{path}: expected 'h n value' records, got {line!r}")
        values[int(parts[1])] = int(parts[2])
    if not values:
        raise CacheCorrupt(f"{path}: no records")
    top = max(values)
    out = [0] * (top + 1)
    for n, v in values.items():
        out[n] = v
    return out


@dataclass
class CensusReport:
    n: int
    expected: dict[int, int]
    actual: dict[int, int]

    @property
    def match(self) -> bool:
        return self.expected == self.actual


def verify_against_bruteforce(n: int, table: CountTable) -> CensusReport:
    """Compare the size-n by-core counts with a full enumeration census."""
    table.require(n)
    expected = {k: table.by_core[(n, k)] for k in range(2, n + 1)}
    actual: dict[int, int] = {k: 0 for k in range(2, n + 1)}
    for t in enumerate_tanglegrams(n, planar_only=True):
        core, _ = irr(t)
        actual[core.size] += 1
    return CensusReport(n=n, expected=expected, actual=actual)


# ---------------------------------------------------------------------------
# Plain-text cache: one record per line, trailing checksum of the body.


def _render_cache(table: CountTable) -> str:
    lines = [f"# {CACHE_VERSION} max_n={table.max_n} source={table.h_source}"]
    for n in range(1, table.max_n + 1):
        lines.append(f"h {n} {table.irreducible[n]}")
    for n in range(1, table.max_n + 1):
        lines.append(f"t {n} {table.planar[n]}")
    for (n, k) in sorted(table.by_core):
        lines.append(f"tnk {n} {k} {table.by_core[(n, k)]}")
    body = "\n".join(lines[1:]) + "\n"
    digest = hashlib.sha256(body.encode()).hexdigest()
    return lines[0] + "\n" + body + f"# sha256 {digest}\n"


def save_cache(path: Path, table: CountTable) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(_render_cache(table))


def load_cache(path: Path, max_n: int) -> CountTable | None:
    """Load a cache file; stale versions rebuild, corruption raises."""
    if not path.exists():
        return None
    text = path.read_text()
    lines = text.splitlines()
    if not lines or not lines[0].startswith(f"# {CACHE_VERSION} "):
        return None  # stale or foreign: rebuild silently
    header = dict(
        part.split("=", 1) for part in lines[0].split()[3:] if "=" in part
    )
    if int(header.get("max_n", -1)) != max_n:
        return None
    if not lines[-1].startswith("# sha256 "):
        raise CacheCorrupt(f"{path}: missing checksum line")
    body = "\n".join(lines[1:-1]) + "\n"
    digest = hashlib.sha256(body.encode()).hexdigest()
    if digest != lines[-1].split()[-1]:
        raise CacheCorrupt(f"{path}: checksum mismatch")
    irreducible = [0] * (max_n + 1)
    planar = [0] * (max_n + 1)
    by_core: dict[tuple[int, int], int] = {}
    for line in lines[1:-1]:
        parts = line.split()
        if parts[0] == "h":
            irreducible[int(parts[1])] = int(parts[2])
        elif parts[0] == "t":
            planar[int(parts[1])] = int(parts[2])
        elif parts[0] == "tnk":
            by_core[(int(parts[1]), int(parts[2]))] = int(parts[3])
        else:
            raise CacheCorrupt(f"{path}: unknown record {parts[0]!r}")
    return CountTable(
        max_n=max_n,
        planar=planar,
        irreducible=irreducible,
        by_core=by_core,
        h_source=header.get("source", "computed"),
    )
