"""The flip graph on disjoint triangulation pairs, induced triangulation
graphs, and spectral / mixing diagnostics for the neighbor-averaging walk."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
import numpy as np

from . import kernels
from .errors import CapExceeded, Disconnected, NotDisjoint
from .polygon import (
    Diagonal,
    DisjointPair,
    FlipMove,
    Triangulation,
    enumerate_disjoint_pairs,
    enumerate_triangulations,
    fan,
    flip_pair,
    flip_single,
    legal_moves,
)

#: Default cap for materializing the pair flip graph.
GRAPH_CAP = 9
#: Dense symmetric eigensolves are used up to this polygon size.
DENSE_SPECTRUM_CAP = 8
#: Total-variation iteration counts are computed up to this polygon size.
TV_CAP = 9
#: Exact integer propagation of walk distributions up to this polygon size
#: (int64 headroom runs out around 8^17, which covers the 7-gon comfortably).
EXACT_TV_CAP = 7


class FlipGraph:
    """The graph on all ordered disjoint triangulation pairs of an n-gon,
    with edges given by flips. Vertices are indexed in lexicographic order
    of their encodings."""

    def __init__(self, n: int, vertices: list[DisjointPair], adjacency: list[list[int]]):
        self.n = n
        self.vertices = vertices
        self.adjacency = adjacency
        self.index = {p: i for i, p in enumerate(vertices)}

    @property
    def vertex_count(self) -> int:
        return len(self.vertices)

    @property
    def degree(self) -> int:
        return 2 * (self.n - 3)

    @property
    def edge_count(self) -> int:
        return sum(len(a) for a in self.adjacency) // 2

    def csr(self) -> tuple[np.ndarray, np.ndarray]:
        indptr = np.zeros(len(self.adjacency) + 1, dtype=np.int64)
        for i, a in enumerate(self.adjacency):
            indptr[i + 1] = indptr[i] + len(a)
        indices = np.empty(indptr[-1], dtype=np.int32)
        for i, a in enumerate(self.adjacency):
            indices[indptr[i] : indptr[i + 1]] = a
        return indptr, indices

    def to_dot(self, name: str | None = None) -> str:
        name = name or f"D{self.n}"
        lines = [f"graph {name} {{"]
        for i, p in enumerate(self.vertices):
            lines.append(f'  {i} [label="{p.encode()}"];')
        for i, adj in enumerate(self.adjacency):
            for j in adj:
                if i < j:
                    lines.append(f"  {i} -- {j};")
        lines.append("}")
        return "\n".join(lines) + "\n"


def build_flip_graph(n: int, cap: int = GRAPH_CAP) -> FlipGraph:
    """Materialize the flip graph on disjoint pairs of the n-gon.

    Adjacency lists hold distinct neighbor indices (for n = 4 the two legal
    moves reach the same pair, which appears once).
    """
    if n < 3 or n > cap:
        raise CapExceeded(f"flip graph construction capped at {cap}, got {n}")
    vertices = enumerate_disjoint_pairs(n, cap=max(cap, n))
    index = {p: i for i, p in enumerate(vertices)}
    adjacency: list[list[int]] = []
    for p in vertices:
        seen = []
        for move in legal_moves(p):
            q = flip_pair(p, move).pair
            j = index[q]
            if j not in seen:
                seen.append(j)
        adjacency.append(sorted(seen))
    return FlipGraph(n, vertices, adjacency)


class InducedTriGraph:
    """Single-flip graph on the triangulations disjoint from a fixed base."""

    def __init__(self, n: int, base: Triangulation):
        if base.n != n:
            raise ValueError("base triangulation has the wrong polygon size")
        self.n = n
        self.base = base
        self.vertices = [
            t
            for t in enumerate_triangulations(n)
            if not (t.diagonals & base.diagonals)
        ]
        self.index = {t: i for i, t in enumerate(self.vertices)}
        self.adjacency: list[list[int]] = []
        for t in self.vertices:
            adj = []
            for d in t.key:
                t2, d2 = flip_single(t, d)
                if d2 in base.diagonals:
                    continue
                adj.append(self.index[t2])
            self.adjacency.append(sorted(adj))

    @property
    def vertex_count(self) -> int:
        return len(self.vertices)

    @property
    def is_empty(self) -> bool:
        return not self.vertices

    def csr(self) -> tuple[np.ndarray, np.ndarray]:
        indptr = np.zeros(len(self.adjacency) + 1, dtype=np.int64)
        for i, a in enumerate(self.adjacency):
            indptr[i + 1] = indptr[i] + len(a)
        indices = np.empty(indptr[-1], dtype=np.int32)
        for i, a in enumerate(self.adjacency):
            indices[indptr[i] : indptr[i + 1]] = a
        return indptr, indices


def induced_disjoint_graph(n: int, base: Triangulation) -> InducedTriGraph:
    return InducedTriGraph(n, base)


def _component_count(adjacency: list[list[int]]) -> int:
    seen = [False] * len(adjacency)
    comps = 0
    for s in range(len(adjacency)):
        if seen[s]:
            continue
        comps += 1
        stack = [s]
        seen[s] = True
        while stack:
            v = stack.pop()
            for w in adjacency[v]:
                if not seen[w]:
                    seen[w] = True
                    stack.append(w)
    return comps


def diameter(g: FlipGraph | InducedTriGraph) -> int:
    """Exact diameter via all-source BFS; raises Disconnected with the
    component count when the graph is not connected."""
    if len(g.vertices) <= 1:
        return 0
    indptr, indices = g.csr()
    ecc, reach = kernels.all_eccentricities(indptr, indices)
    if int(reach.min()) != len(g.vertices):
        raise Disconnected(_component_count(g.adjacency))
    return int(ecc.max())


def is_connected(g: FlipGraph | InducedTriGraph) -> bool:
    if len(g.vertices) <= 1:
        return True
    seen = [False] * len(g.adjacency)
    stack = [0]
    seen[0] = True
    count = 1
    while stack:
        v = stack.pop()
        for w in g.adjacency[v]:
            if not seen[w]:
                seen[w] = True
                count += 1
                stack.append(w)
    return count == len(g.adjacency)


def path_to_fan(
    t: Triangulation, s: Triangulation, apex_edge: tuple[int, int]
) -> list[Diagonal]:
    """Single flips carrying ``t`` into the fan opposite a short diagonal of ``s``.

    ``apex_edge`` must be a diagonal (i, i+2) of ``s`` (indices mod n); the
    fan apex is the skipped vertex i+1. Every intermediate triangulation
    stays disjoint from ``s``, and the number of flips is the number of
    missing fan diagonals: each flip trades a gap-spanning diagonal for a
    new apex diagonal inside the subpolygon it cuts off.
    """
    n = t.n
    if t.diagonals & s.diagonals:
        raise NotDisjoint("t shares a diagonal with s")
    a, b = apex_edge
    if (min(a, b), max(a, b)) not in s.diagonals:
        raise ValueError(f"apex edge {apex_edge} not in s")
    if (b - a) % n == 2:
        apex = (a + 1 - 1) % n + 1
    elif (a - b) % n == 2:
        apex = (b + 1 - 1) % n + 1
    else:
        raise ValueError(f"apex edge {apex_edge} does not skip exactly one vertex")

    def relabel(v: int) -> int:
        return (v - apex) % n + 1

    def unlabel(v: int) -> int:
        return (v + apex - 2) % n + 1

    def norm(x: int, y: int) -> Diagonal:
        return (x, y) if x < y else (y, x)

    current = Triangulation(n, [(relabel(x), relabel(y)) for x, y in t.key])
    flips: list[Diagonal] = []
    while True:
        present = sorted(b for (a2, b) in current.key if a2 == 1)
        seq = [2] + present + [n]
        gap = next(
            (j for j in range(len(seq) - 1) if seq[j + 1] - seq[j] > 1), None
        )
        if gap is None:
            break
        d = norm(seq[gap], seq[gap + 1])
        flips.append(norm(unlabel(d[0]), unlabel(d[1])))
        current, created = flip_single(current, d)
        if created[0] != 1:
            raise AssertionError("flip did not create an apex diagonal")
    return flips


def find_triangle(g: FlipGraph) -> tuple[int, int, int]:
    """A 3-cycle through the two opposite fan triangulations.

    Starting from the pair (fan at 1, fan at n), flipping (2, n) on the
    second side (a double flip) and then (1, 3) on the second side closes a
    triangle with the start vertex.
    """
    n = g.n
    if n < 5:
        raise ValueError("3-cycles require polygon size at least 5")
    p0 = DisjointPair(fan(n, 1), fan(n, n))
    step1 = flip_pair(p0, FlipMove(2, (2, n)))
    p1 = step1.pair
    step2 = flip_pair(p1, FlipMove(2, (1, 3)))
    p2 = step2.pair
    back = flip_pair(p2, FlipMove(1, (2, 4)))
    if back.pair != p0:
        raise AssertionError("triangle construction did not close")
    i0, i1, i2 = g.index[p0], g.index[p1], g.index[p2]
    for x, y in ((i0, i1), (i1, i2), (i2, i0)):
        if y not in g.adjacency[x]:
            raise AssertionError("triangle vertices are not mutually adjacent")
    return (i0, i1, i2)


@dataclass
class SpectralReport:
    n: int
    vertex_count: int
    sigma2: float
    sigma2_abs: float
    tv_iterations: int

    def to_json(self) -> str:
        return json.dumps(asdict(self))


def _pair_automorphism_orbits(g: FlipGraph) -> np.ndarray:
    # Representative start vertices, one per orbit of the relabeling group
    # (rotations and reflection of the polygon) extended by coordinate swap.
    n = g.n
    maps = []
    for r in range(n):
        maps.append([(v - 1 + r) % n + 1 for v in range(1, n + 1)])
        maps.append([(n - v + r) % n + 1 for v in range(1, n + 1)])

    def key_of(tri_key, m):
        return tuple(
            sorted(
                (min(m[a - 1], m[b - 1]), max(m[a - 1], m[b - 1]))
                for a, b in tri_key
            )
        )

    reps = []
    seen = set()
    for i, p in enumerate(g.vertices):
        best = None
        for m in maps:
            k1 = key_of(p.first.key, m)
            k2 = key_of(p.second.key, m)
            for cand in ((k1, k2), (k2, k1)):
                if best is None or cand < best:
                    best = cand
        if best not in seen:
            seen.add(best)
            reps.append(i)
    return np.array(reps, dtype=np.int64)


def _exact_walk_crossing(g: FlipGraph, start: int, max_t: int) -> int:
    # Integer propagation of one start: after t steps the chance of being at
    # y is counts[y] / degree^t, so the strict comparison TV < 1/4 becomes
    # 2 * sum_y |N*counts[y] - deg^t| < N * deg^t, decided exactly. int64
    # overflows switch to Python integers (entries are bounded by deg^t).
    nv = g.vertex_count
    deg = g.degree
    indptr, indices = g.csr()
    int64_safe_scale = (2**62) // nv
    counts = np.zeros(nv, dtype=np.int64)
    counts[start] = 1
    scale = 1
    exact_obj: list[int] | None = None
    for t in range(1, max_t + 1):
        scale *= deg
        if exact_obj is None and scale < int64_safe_scale:
            counts = np.add.reduceat(counts[indices], indptr[:-1])
            total = int(np.abs(counts * nv - scale).sum())
        else:
            if exact_obj is None:
                exact_obj = [int(c) for c in counts]
            nxt = [0] * nv
            for v in range(nv):
                acc = 0
                for k in range(indptr[v], indptr[v + 1]):
                    acc += exact_obj[indices[k]]
                nxt[v] = acc
            exact_obj = nxt
            total = sum(abs(c * nv - scale) for c in exact_obj)
        if 2 * total < nv * scale:
            return t
    raise CapExceeded(f"no TV crossing within {max_t} steps")


def _exact_tv_iterations(g: FlipGraph, max_t: int = 64) -> int:
    starts = _pair_automorphism_orbits(g)
    return max(_exact_walk_crossing(g, int(s), max_t) for s in starts)


#: Strict-inequality guard for the floating-point TV path: a distance that is
#: exactly 1/4 (it happens: the 5-gon walk at step two) must not count as
#: "smaller than 1/4" through roundoff.
TV_STRICT_EPS = 1e-9


def _float_tv_iterations(g: FlipGraph, max_t: int = 256) -> int:
    indptr, indices = g.csr()
    starts = _pair_automorphism_orbits(g)
    crossing = kernels.tv_first_crossing(
        indptr, indices, float(g.degree), starts, max_t, threshold=0.25 - TV_STRICT_EPS
    )
    if (crossing < 0).any():
        raise CapExceeded(f"no TV crossing within {max_t} steps")
    return int(crossing.max())


def _dense_eigenvalues(g: FlipGraph) -> np.ndarray:
    indptr, indices = g.csr()
    nv = g.vertex_count
    mat = np.zeros((nv, nv), dtype=np.float64)
    for v in range(nv):
        mat[v, indices[indptr[v] : indptr[v + 1]]] = 1.0 / g.degree
    return np.linalg.eigvalsh(mat)


def _power_iteration_sigma2(
    g: FlipGraph, tol: float = 1e-9, max_iter: int = 100_000
) -> tuple[float, float]:
    # Signed second eigenvalue via the half-lazy operator (P + I)/2, which
    # maps the spectrum into [0, 1] and preserves its order; the second
    # largest magnitude via plain P. Both deflate the uniform eigenvector.
    indptr, indices = g.csr()
    nv = g.vertex_count
    deg = float(g.degree)
    rng = np.random.default_rng(12345)

    def run(shifted: bool) -> float:
        x = rng.standard_normal(nv)
        x -= x.mean()
        x /= np.linalg.norm(x)
        prev = 0.0
        for _ in range(max_iter):
            y = kernels.mean_matvec(indptr, indices, x, deg)
            if shifted:
                y = 0.5 * (y + x)
            y -= y.mean()
            norm = np.linalg.norm(y)
            if norm == 0.0:
                return 0.0
            y /= norm
            z = kernels.mean_matvec(indptr, indices, y, deg)
            if shifted:
                z = 0.5 * (z + y)
            est = float(y @ z)
            x = y
            if abs(est - prev) < tol:
                prev = est
                break
            prev = est
        return prev

    lazy = run(shifted=True)
    sigma2 = 2.0 * lazy - 1.0
    dominant = run(shifted=False)
    sigma2_abs = abs(dominant)
    return sigma2, max(sigma2_abs, abs(sigma2))


def spectral_report(
    g: FlipGraph,
    dense_cap: int = DENSE_SPECTRUM_CAP,
    tv_cap: int = TV_CAP,
    exact_tv_cap: int = EXACT_TV_CAP,
) -> SpectralReport:
    """Second eigenvalue(s) of the walk's transition matrix and the least t
    with worst-start total variation below 1/4.

    Exact integer propagation decides the TV count for small graphs; larger
    ones use double precision with automorphism-orbit start reduction. The
    walk is the plain neighbor-averaging chain (not lazy).
    """
    if g.n < 5:
        raise ValueError("spectral diagnostics need polygon size at least 5")
    if g.n > tv_cap:
        raise CapExceeded(f"spectral report capped at {tv_cap}, got {g.n}")
    if g.n <= dense_cap:
        eig = _dense_eigenvalues(g)
        sigma2 = float(eig[-2])
        sigma2_abs = float(max(abs(eig[0]), abs(eig[-2])))
    else:
        sigma2, sigma2_abs = _power_iteration_sigma2(g)
    if g.n <= exact_tv_cap:
        tv_iters = _exact_tv_iterations(g)
    else:
        tv_iters = _float_tv_iterations(g)
    return SpectralReport(
        n=g.n,
        vertex_count=g.vertex_count,
        sigma2=sigma2,
        sigma2_abs=sigma2_abs,
        tv_iterations=tv_iters,
    )


CSV_HEADER = "n,vertices,degree,diameter,sigma2,sigma2_abs,tv_iterations"


def csv_row(n: int, report: SpectralReport, diam: int | None) -> str:
    d = "" if diam is None else str(diam)
    return (
        f"{n},{report.vertex_count},{2 * (n - 3)},{d},"
        f"{report.sigma2:.6f},{report.sigma2_abs:.6f},{report.tv_iterations}"
    )
