"""Exact uniform sampling of planar tanglegrams, the random walk on disjoint
pairs, and statistical diagnostics.

Every probability on the exact path is realized as a uniform integer draw
below an exact integer total, so no floating point enters the sampling
decisions. Recursive calls get independent, reproducible random streams
derived from (seed, path-to-node, child-index).
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy.stats import chi2

from .counting import CountTable, convolution_powers, count_extensions
from .errors import CapExceeded, ConfigError, UnknownCategory
from .polygon import (
    DisjointPair,
    fan,
    flip_pair,
    disjoint_pair_index,
    legal_moves,
)
from .duality import pair_to_layout
from .tanglegram import (
    Layout,
    Tanglegram,
    size_two_tanglegram,
    substitute_cached,
    unit_tanglegram,
)


class RandomStream:
    """Seedable stream with a documented split rule.

    A stream is identified by (seed, path); ``child(i)`` yields the stream
    (seed, path + (i,)). Draws inside one tree node use its own stream
    sequentially, so recursive sampling is reproducible and children can be
    generated in parallel without sharing state.
    """

    def __init__(self, seed: int, path: tuple[int, ...] = ()):
        self.seed = seed
        self.path = path
        self._gen = np.random.Generator(
            np.random.PCG64(np.random.SeedSequence(seed, spawn_key=path))
        )

    def child(self, i: int) -> "RandomStream":
        return RandomStream(self.seed, self.path + (i,))

    def below(self, n: int) -> int:
        """Uniform integer in [0, n), exact for arbitrary-precision n.

        Rejection from uniform bit blocks; modulo reduction would bias.
        """
        if n <= 0:
            raise ValueError("upper bound must be positive")
        if n == 1:
            return 0
        bits = n.bit_length() if isinstance(n, int) else int(n).bit_length()
        nbytes = (bits + 7) // 8
        shift = 8 * nbytes - bits
        while True:
            value = int.from_bytes(self._gen.bytes(nbytes), "big") >> shift
            if value < n:
                return value

    def numpy(self) -> np.random.Generator:
        return self._gen


@dataclass
class SamplerConfig:
    """Knobs for the recursive sampler.

    Irreducible layouts of size at most ``exact_irreducible_cap`` are drawn
    exactly from the enumerated support; larger ones need ``mcmc_burn_in``
    (no default: the walk's mixing time is unknown, so approximate output is
    never silently produced or mislabeled).
    """

    seed: int = 0
    exact_irreducible_cap: int = 10
    mcmc_burn_in: int | None = None
    mcmc_random_start: bool = False
    cache_dir: str | Path | None = None

    def __post_init__(self):
        from .polygon import TRIANGULATION_CAP

        if self.exact_irreducible_cap + 1 > TRIANGULATION_CAP:
            raise ConfigError(
                "exact_irreducible_cap needs full triangulation enumeration "
                f"of the (cap+1)-gon; {self.exact_irreducible_cap} exceeds "
                f"the enumeration cap {TRIANGULATION_CAP}"
            )
        if self.mcmc_burn_in is not None and self.mcmc_burn_in < 1:
            raise ConfigError("mcmc_burn_in must be positive when set")


@dataclass(frozen=True)
class SampleTrace:
    chosen_k: int
    composition: tuple[int, ...]
    children: tuple["SampleTrace", ...]
    exact: bool

    def to_dict(self) -> dict:
        return {
            "k": self.chosen_k,
            "composition": list(self.composition),
            "exact": self.exact,
            "children": [c.to_dict() for c in self.children],
        }


def sample_core_size(n: int, table: CountTable, rng: RandomStream) -> int:
    """Core size k in 2..n, each with probability (count by core k) / total."""
    table.require(n)
    u = rng.below(table.planar[n])
    acc = 0
    for k in range(2, n + 1):
        acc += table.by_core[(n, k)]
        if u < acc:
            return k
    raise AssertionError("core-size masses did not sum to the total")


def sample_composition(
    n: int, k: int, table: CountTable, rng: RandomStream
) -> tuple[int, ...]:
    """Ordered block sizes (a_1..a_k) summing to n, with probability
    proportional to the product of their planar counts.

    Drawn by sequential conditionals against cached convolution powers.
    """
    if k < 3:
        raise ValueError("composition sampling applies to core sizes >= 3")
    table.require(n)
    parts = []
    rest, j = n, k
    while j > 1:
        total = convolution_powers(table, j, rest)[rest]
        u = rng.below(total)
        acc = 0
        prev = convolution_powers(table, j - 1, rest)
        for a in range(1, rest - j + 2):
            acc += table.planar[a] * prev[rest - a]
            if u < acc:
                parts.append(a)
                rest -= a
                j -= 1
                break
        else:
            raise AssertionError("composition masses did not sum to the total")
    parts.append(rest)
    return tuple(parts)


def sample_size_two_blocks(
    n: int, cfg: SamplerConfig, table: CountTable, rng: RandomStream
) -> tuple[tuple[Tanglegram, SampleTrace], tuple[Tanglegram, SampleTrace]]:
    """The two blocks under the size-two core.

    For odd n the ordered sizes carry probability t_a1 t_a2 / (2 c_n2); for
    even n one block is duplicated with probability t_{n/2} / (2 c_n2) and
    otherwise the ordered sizes are drawn from the plain product weights.
    A single integer draw realizes both stages exactly, since twice the
    extension count equals the ordered-product sum plus the diagonal term.
    """
    t = table.planar
    c2 = count_extensions(n, 2, table)
    u = rng.below(2 * c2)
    if n % 2 == 0:
        if u < t[n // 2]:
            block, trace = sample_planar_tanglegram(n // 2, cfg, table, rng.child(0))
            return (block, trace), (block, trace)
        u -= t[n // 2]
    acc = 0
    for a1 in range(1, n):
        acc += t[a1] * t[n - a1]
        if u < acc:
            first = sample_planar_tanglegram(a1, cfg, table, rng.child(0))
            second = sample_planar_tanglegram(n - a1, cfg, table, rng.child(1))
            return first, second
    raise AssertionError("size-two branch masses did not sum to the total")


_PAIR_ROWS_CACHE: dict[int, tuple] = {}


def _pair_rows(m: int, cache_dir: str | Path | None):
    # Disjoint-pair index of the m-gon: triangulation list + row array.
    if m in _PAIR_ROWS_CACHE:
        return _PAIR_ROWS_CACHE[m]
    rows = None
    tris = None
    if cache_dir is not None:
        path = Path(cache_dir) / f"pairs_{m}.npz"
        if path.exists():
            data = np.load(path)
            from .polygon import _triangulations_cached

            tris = _triangulations_cached(m)
            if int(data["n"]) == m and data["rows"].shape[1] == 2:
                rows = data["rows"]
    if rows is None:
        tris, rows = disjoint_pair_index(m)
        if cache_dir is not None:
            path = Path(cache_dir) / f"pairs_{m}.npz"
            path.parent.mkdir(parents=True, exist_ok=True)
            np.savez_compressed(path, n=m, rows=rows)
    _PAIR_ROWS_CACHE[m] = (tris, rows)
    return tris, rows


def sample_irreducible_layout_exact(
    k: int, rng: RandomStream, cfg: SamplerConfig | None = None
) -> Layout:
    """Uniform crossing-free layout of an irreducible tanglegram of size k.

    Sizes one and two have a unique layout; otherwise a uniform row of the
    (k+1)-gon disjoint-pair index is transported through the plane dual.
    """
    cfg = cfg or SamplerConfig()
    if k == 1:
        return Layout((), ())
    if k == 2:
        return Layout(((), ()), ((), ()))
    if k > cfg.exact_irreducible_cap:
        raise CapExceeded(
            f"exact irreducible layouts capped at size {cfg.exact_irreducible_cap}"
        )
    tris, rows = _pair_rows(k + 1, cfg.cache_dir)
    i, j = rows[rng.below(len(rows))]
    pair = DisjointPair._make(tris[i], tris[j])
    return pair_to_layout(pair)


def random_walk_step(p: DisjointPair, rng: RandomStream) -> DisjointPair:
    """One step of the neighbor-averaging walk: a uniformly chosen flip."""
    moves = legal_moves(p)
    return flip_pair(p, moves[rng.below(len(moves))]).pair


def sample_irreducible_layout_mcmc(
    k: int,
    burn_in: int,
    rng: RandomStream,
    random_start: bool = False,
) -> Layout:
    """Approximately uniform irreducible layout of size k via the flip walk.

    Starts from the two opposite fans of the (k+1)-gon (or a randomized
    start) and runs ``burn_in`` steps. The output carries no uniformity
    guarantee: the walk's mixing time is an open question, so callers must
    flag results as approximate.
    """
    if k < 3:
        return sample_irreducible_layout_exact(k, rng)
    m = k + 1
    if random_start:
        first = _uniform_triangulation(m, rng)
        second = _uniform_disjoint_triangulation(m, first, rng)
        pair = DisjointPair(first, second)
    else:
        pair = DisjointPair(fan(m, 1), fan(m, m))
    for _ in range(burn_in):
        pair = random_walk_step(pair, rng)
    return pair_to_layout(pair)


def _forbidden_aware_counts(m: int, forbidden: frozenset) -> dict:
    # counts[(i, j)] = triangulations of the subpolygon i..j avoiding the
    # forbidden diagonals; used for exact weighted reconstruction.
    counts: dict[tuple[int, int], int] = {}

    def count(lo: int, hi: int) -> int:
        if hi - lo < 2:
            return 1
        if (lo, hi) in counts:
            return counts[(lo, hi)]
        total = 0
        for c in range(lo + 1, hi):
            if c - lo >= 2 and (lo, c) in forbidden:
                continue
            if hi - c >= 2 and (c, hi) in forbidden:
                continue
            total += count(lo, c) * count(c, hi)
        counts[(lo, hi)] = total
        return total

    count(1, m)
    return counts


def _uniform_triangulation(m: int, rng: RandomStream):
    return _uniform_avoiding(m, frozenset(), rng)


def _uniform_disjoint_triangulation(m: int, base, rng: RandomStream):
    return _uniform_avoiding(m, frozenset(base.diagonals), rng)


def _uniform_avoiding(m: int, forbidden: frozenset, rng: RandomStream):
    from .polygon import Triangulation

    counts = _forbidden_aware_counts(m, forbidden)

    def pick(lo: int, hi: int, out: list):
        if hi - lo < 2:
            return
        u = rng.below(counts[(lo, hi)])
        acc = 0
        for c in range(lo + 1, hi):
            if c - lo >= 2 and (lo, c) in forbidden:
                continue
            if hi - c >= 2 and (c, hi) in forbidden:
                continue
            left = counts.get((lo, c), 1)
            right = counts.get((c, hi), 1)
            acc += left * right
            if u < acc:
                if c - lo >= 2:
                    out.append((lo, c))
                if hi - c >= 2:
                    out.append((c, hi))
                pick(lo, c, out)
                pick(c, hi, out)
                return
        raise AssertionError("triangulation weights did not sum")

    out: list = []
    pick(1, m, out)
    return Triangulation(m, out)


def sample_planar_tanglegram(
    n: int,
    cfg: SamplerConfig,
    table: CountTable,
    rng: RandomStream | None = None,
) -> tuple[Tanglegram, SampleTrace]:
    """Uniformly random planar tanglegram of size n.

    Sizes one and two are unique and returned directly. Otherwise: draw the
    core size, draw a uniform irreducible layout of that size, draw the
    block sizes for the branch, recurse independently on the blocks, and
    substitute them top to bottom. The result is exactly uniform whenever
    every irreducible layout draw was exact; the trace records the decisions
    and whether any approximate draw occurred.
    """
    if rng is None:
        rng = RandomStream(cfg.seed)
    if n < 1:
        raise ValueError("size must be positive")
    if n == 1:
        return unit_tanglegram(), SampleTrace(1, (1,), (), True)
    if n == 2:
        return size_two_tanglegram(), SampleTrace(2, (1, 1), (), True)
    table.require(n)
    k = sample_core_size(n, table, rng)
    layout_exact = True
    if k <= cfg.exact_irreducible_cap or k <= 2:
        layout = sample_irreducible_layout_exact(k, rng, cfg)
    else:
        if cfg.mcmc_burn_in is None:
            raise ConfigError(
                f"core size {k} exceeds the exact cap "
                f"{cfg.exact_irreducible_cap}; set mcmc_burn_in to sample "
                "approximately"
            )
        layout = sample_irreducible_layout_mcmc(
            k, cfg.mcmc_burn_in, rng, cfg.mcmc_random_start
        )
        layout_exact = False
    if k == 2:
        (b1, tr1), (b2, tr2) = sample_size_two_blocks(n, cfg, table, rng)
        blocks = (b1, b2)
        child_traces = (tr1, tr2)
        composition = (b1.size, b2.size)
    else:
        composition = sample_composition(n, k, table, rng)
        drawn = [
            sample_planar_tanglegram(a, cfg, table, rng.child(i))
            for i, a in enumerate(composition)
        ]
        blocks = tuple(b for b, _ in drawn)
        child_traces = tuple(t for _, t in drawn)
    result = substitute_cached(layout, blocks)
    exact = layout_exact and all(t.exact for t in child_traces)
    return result, SampleTrace(k, composition, child_traces, exact)


@dataclass
class ChiSquareResult:
    statistic: float
    dof: int
    critical: float
    significance: float
    passed: bool


def chi_square_uniformity(
    observed: dict,
    expected_total: int,
    support: Sequence | None = None,
    significance: float = 0.01,
) -> ChiSquareResult:
    """Pearson test of the observed counts against the uniform distribution.

    The support must be known in advance; a sampled category outside it is a
    correctness bug in the sampler, not a statistics failure, and raises.
    """
    cats = list(support) if support is not None else list(observed)
    cat_set = set(cats)
    for key in observed:
        if key not in cat_set:
            raise UnknownCategory(f"observed category {key!r} outside the support")
    total = sum(observed.values())
    if total != expected_total:
        raise ValueError(f"observed total {total} != expected {expected_total}")
    expected = expected_total / len(cats)
    stat = sum(
        (observed.get(c, 0) - expected) ** 2 / expected for c in cats
    )
    dof = len(cats) - 1
    critical = float(chi2.isf(significance, dof))
    return ChiSquareResult(
        statistic=float(stat),
        dof=dof,
        critical=critical,
        significance=significance,
        passed=stat <= critical,
    )
