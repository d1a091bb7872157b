"""Hot numeric kernels: numba-jitted with pure-numpy fallbacks.

The active backend is chosen by the ``TANGLEFLIP_KERNELS`` environment
variable: ``numba`` (require jit), ``numpy`` (force the fallback), or unset /
``auto`` (numba if importable). Every kernel exists in both flavors and the
test suite checks they agree; ``scripts/benchmark_kernels.py`` compares their
speed.
"""

from __future__ import annotations

import os

import numpy as np

_ENV = os.environ.get("TANGLEFLIP_KERNELS", "auto").lower()

try:
    from numba import njit, prange

    _HAS_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    _HAS_NUMBA = False
    if _ENV == "numba":
        raise

if _ENV not in ("auto", "numba", "numpy"):
    raise ValueError(f"TANGLEFLIP_KERNELS must be auto|numba|numpy, got {_ENV!r}")

_USE_NUMBA = _HAS_NUMBA and _ENV != "numpy"


def kernel_mode() -> str:
    """Backend actually in use: 'numba' or 'numpy'."""
    return "numba" if _USE_NUMBA else "numpy"


# ---------------------------------------------------------------------------
# Kernel 1: count ordered pairs of disjoint diagonal masks.

def _count_disjoint_numpy(masks: np.ndarray) -> int:
    total = 0
    chunk = max(1, (1 << 24) // max(1, masks.size))
    for lo in range(0, masks.size, chunk):
        block = masks[lo : lo + chunk, None] & masks[None, :]
        total += int(np.count_nonzero(block == 0))
    return total


if _HAS_NUMBA:

    @njit(cache=True)
    def _count_disjoint_numba(masks):  # pragma: no cover - jitted
        n = masks.size
        total = 0
        for i in range(n):
            mi = masks[i]
            for j in range(n):
                if mi & masks[j] == np.uint64(0):
                    total += 1
        return total


def count_disjoint_ordered(masks: np.ndarray, mode: str | None = None) -> int:
    """Number of ordered index pairs (i, j) with masks[i] & masks[j] == 0."""
    masks = np.ascontiguousarray(masks, dtype=np.uint64)
    if _pick(mode) == "numba":
        return int(_count_disjoint_numba(masks))
    return _count_disjoint_numpy(masks)


# ---------------------------------------------------------------------------
# Kernel 2: all-source BFS eccentricities on a CSR graph.

def _all_ecc_numpy(indptr: np.ndarray, indices: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    nv = indptr.size - 1
    words = (nv + 63) // 64
    reached = np.zeros((nv, words), dtype=np.uint64)
    reached[np.arange(nv), np.arange(nv) // 64] = np.uint64(1) << np.uint64(
        np.arange(nv) % 64
    )
    ecc = np.zeros(nv, dtype=np.int32)
    counts = np.ones(nv, dtype=np.int64)
    level = 0
    nonempty = np.flatnonzero(np.diff(indptr) > 0)
    # reached[v] holds, bit per source, which sources have hit v; a source is
    # finished once its column is full. Empty adjacency segments are skipped:
    # reduceat over the nonempty starts still cuts at exactly the right
    # boundaries because empty segments contribute no indices.
    while True:
        if np.all(counts == nv):
            break
        if indices.size == 0:
            break
        level += 1
        grown = reached.copy()
        grown[nonempty] |= np.bitwise_or.reduceat(
            reached[indices], indptr[:-1][nonempty], axis=0
        )
        if np.array_equal(grown, reached):
            break
        reached = grown
        bits = np.unpackbits(
            reached.view(np.uint8), axis=1, bitorder="little"
        )[:, :nv]
        new_counts = bits.sum(axis=0, dtype=np.int64)
        ecc[new_counts > counts] = level
        counts = new_counts
    return ecc, counts.astype(np.int64)


if _HAS_NUMBA:

    @njit(cache=True)
    def _all_ecc_numba(indptr, indices):  # pragma: no cover - jitted
        nv = indptr.size - 1
        ecc = np.zeros(nv, dtype=np.int32)
        reach = np.zeros(nv, dtype=np.int64)
        dist = np.empty(nv, dtype=np.int32)
        queue = np.empty(nv, dtype=np.int32)
        for s in range(nv):
            dist[:] = -1
            dist[s] = 0
            queue[0] = s
            head = 0
            tail = 1
            far = 0
            while head < tail:
                v = queue[head]
                head += 1
                dv = dist[v]
                if dv > far:
                    far = dv
                for k in range(indptr[v], indptr[v + 1]):
                    w = indices[k]
                    if dist[w] < 0:
                        dist[w] = dv + 1
                        queue[tail] = w
                        tail += 1
            ecc[s] = far
            reach[s] = tail
        return ecc, reach


def all_eccentricities(
    indptr: np.ndarray, indices: np.ndarray, mode: str | None = None
) -> tuple[np.ndarray, np.ndarray]:
    """Per-source BFS eccentricity and reached-vertex count.

    ``ecc[s]`` is the distance to the farthest vertex reachable from s;
    ``reach[s]`` is how many vertices s reaches (|V| iff connected).
    """
    indptr = np.ascontiguousarray(indptr, dtype=np.int64)
    indices = np.ascontiguousarray(indices, dtype=np.int32)
    if _pick(mode) == "numba":
        return _all_ecc_numba(indptr, indices)
    return _all_ecc_numpy(indptr, indices)


# ---------------------------------------------------------------------------
# Kernel 3: matrix-vector product with the neighbor-averaging operator.

def _mean_matvec_numpy(indptr, indices, x, degree):
    return np.add.reduceat(x[indices], indptr[:-1]) / degree


if _HAS_NUMBA:

    @njit(cache=True)
    def _mean_matvec_numba(indptr, indices, x, degree):  # pragma: no cover
        nv = indptr.size - 1
        y = np.empty(nv, dtype=np.float64)
        for v in range(nv):
            acc = 0.0
            for k in range(indptr[v], indptr[v + 1]):
                acc += x[indices[k]]
            y[v] = acc / degree
        return y


def mean_matvec(
    indptr: np.ndarray,
    indices: np.ndarray,
    x: np.ndarray,
    degree: float,
    mode: str | None = None,
) -> np.ndarray:
    """y[v] = average of x over the neighbors of v (regular graph)."""
    if _pick(mode) == "numba":
        return _mean_matvec_numba(indptr, indices, x, float(degree))
    return _mean_matvec_numpy(indptr, indices, x, float(degree))


# ---------------------------------------------------------------------------
# Kernel 4: first step at which a walk started at each given vertex is within
# the total-variation threshold of uniform.

def _tv_crossing_numpy(indptr, indices, degree, starts, max_t, threshold):
    nv = indptr.size - 1
    uniform = 1.0 / nv
    out = np.full(len(starts), -1, dtype=np.int32)
    block = max(1, (1 << 22) // max(1, indices.size // nv + 1) // 8)
    for lo in range(0, len(starts), block):
        sub = starts[lo : lo + block]
        x = np.zeros((nv, len(sub)), dtype=np.float64)
        x[sub, np.arange(len(sub))] = 1.0
        live = np.arange(len(sub))
        for t in range(1, max_t + 1):
            x = np.add.reduceat(x[indices], indptr[:-1], axis=0) / degree
            tv = 0.5 * np.abs(x - uniform).sum(axis=0)
            done = tv < threshold
            for col in np.flatnonzero(done):
                if out[lo + live[col]] < 0:
                    out[lo + live[col]] = t
            keep = ~done
            if not keep.any():
                break
            x = x[:, keep]
            live = live[keep]
    return out


if _HAS_NUMBA:

    @njit(cache=True, parallel=True)
    def _tv_crossing_numba(indptr, indices, degree, starts, max_t, threshold):
        nv = indptr.size - 1
        uniform = 1.0 / nv
        out = np.full(starts.size, -1, dtype=np.int32)
        for si in prange(starts.size):
            x = np.zeros(nv, dtype=np.float64)
            x[starts[si]] = 1.0
            y = np.empty(nv, dtype=np.float64)
            for t in range(1, max_t + 1):
                for v in range(nv):
                    acc = 0.0
                    for k in range(indptr[v], indptr[v + 1]):
                        acc += x[indices[k]]
                    y[v] = acc / degree
                x, y = y, x
                tv = 0.0
                for v in range(nv):
                    d = x[v] - uniform
                    tv += d if d > 0.0 else -d
                if 0.5 * tv < threshold:
                    out[si] = t
                    break
        return out


def tv_first_crossing(
    indptr: np.ndarray,
    indices: np.ndarray,
    degree: float,
    starts: np.ndarray,
    max_t: int,
    threshold: float = 0.25,
    mode: str | None = None,
) -> np.ndarray:
    """For each start vertex, the least t with TV(P^t(start,.), uniform) < threshold.

    Entries are -1 when the threshold is not crossed within max_t steps.
    Total-variation distance to the stationary distribution is nonincreasing
    in t, so the first crossing is well defined.
    """
    indptr = np.ascontiguousarray(indptr, dtype=np.int64)
    indices = np.ascontiguousarray(indices, dtype=np.int32)
    starts = np.ascontiguousarray(starts, dtype=np.int64)
    if _pick(mode) == "numba":
        return _tv_crossing_numba(
            indptr, indices, float(degree), starts, max_t, threshold
        )
    return _tv_crossing_numpy(indptr, indices, float(degree), starts, max_t, threshold)


def _pick(mode: str | None) -> str:
    if mode is None:
        return kernel_mode()
    if mode == "numba" and not _HAS_NUMBA:
        raise RuntimeError("numba backend requested but numba is unavailable")
    if mode not in ("numba", "numpy"):
        raise ValueError(f"unknown kernel mode {mode!r}")
    return mode
