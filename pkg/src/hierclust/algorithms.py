"""Tree-construction algorithms.

Four builders, all emitting the same dendrogram type:

* bisecting_kmeans -- divisive; recursively applies a 2-means split, solved
  either exactly (every bipartition enumerated) or by restarted Lloyd
  iterations seeded with k-means++.
* average_linkage / single_linkage -- agglomerative over a distance matrix,
  merging the pair of clusters with minimum mean / minimum single
  inter-cluster distance.
* random_tree -- divisive baseline assigning each point to a side by an
  independent fair coin at every node.

Every algorithm is deterministic given its seed; randomness flows through
`RngStream`, which keys a PCG64 generator by (seed, substream path) so that
independent uses never share draws.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Tuple, Union

import numpy as np

from .hiertree import HierTree, Split
from .metricspace import DistanceMatrix, PointSet, _one_means_cost


@dataclass(frozen=True)
class RngStream:
    """Reproducible randomness: PCG64 keyed by a seed and a substream path.

    Equal (seed, path) gives identical draws on every platform. substream()
    derives an independent child stream without consuming from the parent;
    generator() returns a fresh generator positioned at the stream's start,
    so each stream should feed one consumer.
    """

    seed: int
    path: Tuple[int, ...] = ()

    def _sequence(self) -> np.random.SeedSequence:
        return np.random.SeedSequence(entropy=self.seed, spawn_key=self.path)

    def generator(self) -> np.random.Generator:
        return np.random.Generator(np.random.PCG64(self._sequence()))

    def substream(self, *keys: int) -> "RngStream":
        return RngStream(self.seed, self.path + tuple(int(k) for k in keys))

    def seed_int(self) -> int:
        """A stable 63-bit integer usable as a derived config seed."""
        return int(self._sequence().generate_state(1, np.uint64)[0] >> np.uint64(1))


@dataclass(frozen=True)
class TwoMeansSolverConfig:
    """How a single 2-means split is solved.

    `exhaustive` enumerates all 2^(m-1) - 1 bipartitions and refuses sets
    larger than `max_exhaustive_n`; `lloyd` runs `lloyd_restarts` k-means++
    seeded Lloyd iterations and keeps the best. `lloyd_tol` is relative to
    the current set's diameter.
    """

    kind: str = "exhaustive"
    max_exhaustive_n: int = 20
    lloyd_restarts: int = 10
    lloyd_max_iters: int = 100
    lloyd_tol: float = 1e-9
    seed: int = 0

    def __post_init__(self) -> None:
        if self.kind not in ("exhaustive", "lloyd"):
            raise ValueError(f"solver kind must be 'exhaustive' or 'lloyd', got {self.kind!r}")


# ----------------------------------------------------------------------
# 2-means


def _ordered_split(ids_a: np.ndarray, ids_b: np.ndarray) -> Tuple[Split, np.ndarray, np.ndarray]:
    """Orient sides so the one holding the smallest index comes first."""
    if min(ids_a.min(), ids_b.min()) in set(ids_a.tolist()):
        first, second = ids_a, ids_b
    else:
        first, second = ids_b, ids_a
    return Split(frozenset(first.tolist()), frozenset(second.tolist())), first, second


def _exhaustive_two_means(coords: np.ndarray, ids: np.ndarray) -> Tuple[Split, float]:
    m = len(ids)
    pts = coords[ids]
    # Center the subset first: the sum-of-squares shortcut below would lose
    # precision for data far from the origin.
    q = pts - pts.mean(axis=0)
    sq = np.einsum("ij,ij->i", q, q)
    sq_total = float(sq.sum())
    col_total = q.sum(axis=0)

    n_masks = (1 << (m - 1)) - 1
    shifts = np.arange(m - 1, dtype=np.int64)
    best_cost = np.inf
    best_side: Tuple[int, ...] = ()
    chunk = 1 << 15
    for start in range(0, n_masks, chunk):
        masks = np.arange(start, min(start + chunk, n_masks), dtype=np.int64)
        bits = ((masks[:, None] >> shifts[None, :]) & 1).astype(bool)
        member = np.concatenate([np.ones((len(masks), 1), dtype=bool), bits], axis=1)
        cnt1 = member.sum(axis=1)
        cnt2 = m - cnt1
        memf = member.astype(np.float64)
        s1 = memf @ q
        sq1 = memf @ sq
        s2 = col_total - s1
        cost = (
            sq1
            - np.einsum("ij,ij->i", s1, s1) / cnt1
            + (sq_total - sq1)
            - np.einsum("ij,ij->i", s2, s2) / cnt2
        )
        lo = float(cost.min())
        if lo > best_cost:
            continue
        candidates = np.flatnonzero(cost == lo)
        side = min(tuple(ids[member[k]].tolist()) for k in candidates)
        if lo < best_cost or (lo == best_cost and side < best_side):
            best_cost, best_side = lo, side

    side1 = np.array(best_side, dtype=np.intp)
    side2 = np.setdiff1d(ids, side1)
    cost = _one_means_cost(coords, side1) + _one_means_cost(coords, side2)
    split, _, _ = _ordered_split(side1, side2)
    return split, float(cost)


def _subset_diameter(pts: np.ndarray) -> float:
    m = len(pts)
    dmax = 0.0
    step = max(1, int(2e6 // max(1, m)))
    for s in range(0, m, step):
        diff = pts[s : s + step, None, :] - pts[None, :, :]
        dmax = max(dmax, float((diff * diff).sum(axis=2).max()))
    return float(np.sqrt(dmax))


def _lloyd_once(
    pts: np.ndarray, g: np.random.Generator, max_iters: int, move_tol: float
) -> np.ndarray:
    m = len(pts)
    c0 = pts[int(g.integers(m))]
    d2 = ((pts - c0) ** 2).sum(axis=1)
    total = float(d2.sum())
    if total == 0.0:
        c1 = pts[0]
    else:
        c1 = pts[int(g.choice(m, p=d2 / total))]
    centers = np.stack([c0, c1])
    assign = np.zeros(m, dtype=np.intp)
    for _ in range(max_iters):
        dist2 = ((pts[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
        assign = dist2.argmin(axis=1)
        for side in (0, 1):
            if not (assign == side).any():
                own = dist2[np.arange(m), assign]
                assign[int(own.argmax())] = side
        new_centers = np.stack([pts[assign == 0].mean(axis=0), pts[assign == 1].mean(axis=0)])
        move = float(np.sqrt(((new_centers - centers) ** 2).sum(axis=1)).max())
        centers = new_centers
        if move <= move_tol:
            break
    return assign


def _lloyd_two_means(
    coords: np.ndarray, ids: np.ndarray, config: TwoMeansSolverConfig, rng: RngStream
) -> Tuple[Split, float]:
    pts = coords[ids]
    move_tol = config.lloyd_tol * _subset_diameter(pts)
    best_cost = np.inf
    best_assign = None
    for r in range(config.lloyd_restarts):
        g = rng.substream(r).generator()
        assign = _lloyd_once(pts, g, config.lloyd_max_iters, move_tol)
        cost = _one_means_cost(coords, ids[assign == 0]) + _one_means_cost(
            coords, ids[assign == 1]
        )
        if cost < best_cost:
            best_cost, best_assign = cost, assign
    assert best_assign is not None
    split, _, _ = _ordered_split(ids[best_assign == 0], ids[best_assign == 1])
    return split, float(best_cost)


def _solve_two_means(
    coords: np.ndarray, ids: np.ndarray, config: TwoMeansSolverConfig, rng: RngStream
) -> Tuple[Split, float]:
    if len(ids) < 2:
        raise ValueError("2-means needs at least two points")
    if config.kind == "exhaustive":
        if len(ids) > config.max_exhaustive_n:
            raise ValueError(
                f"exhaustive 2-means refuses sets larger than {config.max_exhaustive_n}"
            )
        return _exhaustive_two_means(coords, ids)
    return _lloyd_two_means(coords, ids, config, rng)


def two_means(
    points: PointSet, indexset, config: TwoMeansSolverConfig
) -> Tuple[Split, float]:
    """Best bipartition of `indexset` under the 2-means cost.

    The exhaustive solver returns the true optimum, breaking ties by the
    lexicographically smallest sorted side containing the minimum index.
    The Lloyd solver returns the best of its restarts; it never beats the
    exhaustive optimum but may fall short of it.
    """
    ids = np.array(sorted(int(i) for i in indexset), dtype=np.intp)
    if len(np.unique(ids)) != len(ids):
        raise ValueError("index set contains duplicates")
    if ids.size and (ids[0] < 0 or ids[-1] >= points.n):
        raise IndexError("index out of range")
    return _solve_two_means(points.coords, ids, config, RngStream(config.seed))


# ----------------------------------------------------------------------
# divisive builders


def bisecting_kmeans(points: PointSet, config: TwoMeansSolverConfig) -> HierTree:
    """Top-down 2-means splitting until every point stands alone.

    With the exhaustive solver every split in the result is an optimal
    2-means bipartition of its node's point set. Each node draws from its
    own substream, keyed by the node's visit number, so the whole tree is a
    pure function of the input and config.seed.
    """
    n = points.n
    if n == 1:
        return HierTree([0], 0)
    coords = points.coords
    base = RngStream(config.seed)
    nodes: List[Union[None, int, Tuple[int, int]]] = [None]
    stack: List[Tuple[np.ndarray, int]] = [(np.arange(n, dtype=np.intp), 0)]
    counter = 0
    while stack:
        ids, slot = stack.pop()
        if len(ids) == 1:
            nodes[slot] = int(ids[0])
            continue
        split, _ = _solve_two_means(coords, ids, config, base.substream(counter))
        counter += 1
        left = np.array(sorted(split.left_set), dtype=np.intp)
        right = np.array(sorted(split.right_set), dtype=np.intp)
        la = len(nodes)
        nodes.append(None)
        rb = len(nodes)
        nodes.append(None)
        nodes[slot] = (la, rb)
        stack.append((right, rb))
        stack.append((left, la))
    return HierTree(nodes, 0)


def random_tree(n_or_points: Union[int, PointSet], rng: RngStream) -> HierTree:
    """Divisive baseline: each point picks a side by a fair coin at every node.

    A flip leaving one side empty is invalid; the whole node's coin vector
    is redrawn until both sides are nonempty, which realizes the coin
    process conditioned on producing a split.
    """
    n = n_or_points if isinstance(n_or_points, (int, np.integer)) else n_or_points.n
    n = int(n)
    if n < 1:
        raise ValueError("need at least one point")
    if n == 1:
        return HierTree([0], 0)
    g = rng.generator()
    nodes: List[Union[None, int, Tuple[int, int]]] = [None]
    stack: List[Tuple[np.ndarray, int]] = [(np.arange(n, dtype=np.intp), 0)]
    while stack:
        ids, slot = stack.pop()
        if len(ids) == 1:
            nodes[slot] = int(ids[0])
            continue
        while True:
            flips = g.integers(0, 2, size=len(ids))
            k = int(flips.sum())
            if 0 < k < len(ids):
                break
        left = ids[flips == 1]
        right = ids[flips == 0]
        la = len(nodes)
        nodes.append(None)
        rb = len(nodes)
        nodes.append(None)
        nodes[slot] = (la, rb)
        stack.append((right, rb))
        stack.append((left, la))
    return HierTree(nodes, 0)


# ----------------------------------------------------------------------
# agglomerative builders


def _agglomerate(dist: DistanceMatrix, mode: str) -> HierTree:
    n = dist.n
    if n == 1:
        return HierTree([0], 0)
    # state[a, b]: total (average mode) or minimum (single mode) cross
    # distance between the live clusters in slots a and b.
    state = dist.values.copy()
    size = np.ones(n, dtype=np.float64)
    min_leaf = np.arange(n)
    alive = np.ones(n, dtype=bool)
    node_of = list(range(n))
    nodes: List[Union[int, Tuple[int, int]]] = list(range(n))

    for _ in range(n - 1):
        valid = np.outer(alive, alive)
        np.fill_diagonal(valid, False)
        if mode == "average":
            score = np.where(valid, state / np.outer(size, size), np.inf)
        else:
            score = np.where(valid, state, np.inf)
        best = float(score.min())
        ii, jj = np.nonzero(score == best)
        pick = None
        for a, b in zip(ii.tolist(), jj.tolist()):
            if a >= b:
                continue
            la, lb = int(min_leaf[a]), int(min_leaf[b])
            key = (min(la, lb), max(la, lb))
            if pick is None or key < pick[0]:
                pick = (key, a, b)
        assert pick is not None
        _, a, b = pick
        nodes.append((node_of[a], node_of[b]))
        node_of[a] = len(nodes) - 1
        if mode == "average":
            state[a, :] += state[b, :]
        else:
            state[a, :] = np.minimum(state[a, :], state[b, :])
        state[:, a] = state[a, :]
        size[a] += size[b]
        min_leaf[a] = min(min_leaf[a], min_leaf[b])
        alive[b] = False
    return HierTree(nodes, len(nodes) - 1)


def average_linkage(dist: DistanceMatrix) -> HierTree:
    """Merge the cluster pair with minimum mean inter-cluster distance.

    Ties go to the pair whose (smaller min-leaf, larger min-leaf) ids are
    lexicographically smallest, so the output is reproducible without
    randomness.
    """
    return _agglomerate(dist, "average")


def single_linkage(dist: DistanceMatrix) -> HierTree:
    """As average_linkage, but merging by minimum single inter-cluster distance."""
    return _agglomerate(dist, "single")
