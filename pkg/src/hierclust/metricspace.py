"""Euclidean point sets, distance matrices, centroids, and k-means cost primitives.

Everything downstream (objectives, tree builders, ground-truth instances)
works on the two containers defined here: an (n, dim) coordinate array and an
(n, n) symmetric dissimilarity matrix. Both are immutable after construction
and safe to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

# Float comparisons throughout the package: relative 1e-9 with an absolute
# floor because distances and costs can legitimately be exactly zero.
REL_TOL = 1e-9
ABS_TOL = 1e-12


def close(a: float, b: float, rel: float = REL_TOL, abs_floor: float = ABS_TOL) -> bool:
    """True when a and b agree within relative `rel` or absolute `abs_floor`."""
    return abs(a - b) <= max(abs_floor, rel * max(abs(a), abs(b)))


@dataclass(frozen=True)
class PointSet:
    """Points in Euclidean space as an (n, dim) float64 array, indexed 0..n-1.

    Coincident points are allowed; several constructions rely on them.
    """

    coords: np.ndarray

    def __post_init__(self) -> None:
        arr = np.array(self.coords, dtype=np.float64, copy=True)
        if arr.ndim != 2:
            raise ValueError(f"coords must be a 2-D (n, dim) array, got shape {arr.shape}")
        n, dim = arr.shape
        if n < 1:
            raise ValueError("a PointSet needs at least one point")
        if dim < 1:
            raise ValueError("points need at least one coordinate")
        if not np.all(np.isfinite(arr)):
            raise ValueError("coordinates must be finite")
        arr.setflags(write=False)
        object.__setattr__(self, "coords", arr)

    @property
    def n(self) -> int:
        return int(self.coords.shape[0])

    @property
    def dim(self) -> int:
        return int(self.coords.shape[1])

    def point(self, i: int) -> np.ndarray:
        return self.coords[i]


@dataclass(frozen=True)
class DistanceMatrix:
    """Symmetric nonnegative pairwise values with a zero diagonal.

    The same container carries metric dissimilarities d(i, j) and, when the
    caller says so, similarity weights for the minimization objective; the
    semantics are the caller's to flag, the shape constraints are identical.
    """

    values: np.ndarray

    def __post_init__(self) -> None:
        arr = np.array(self.values, dtype=np.float64, copy=True)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise ValueError(f"values must be a square matrix, got shape {arr.shape}")
        if arr.shape[0] < 1:
            raise ValueError("matrix must cover at least one point")
        if not np.all(np.isfinite(arr)):
            raise ValueError("entries must be finite")
        if np.any(arr < 0.0):
            raise ValueError("entries must be nonnegative")
        if np.any(np.diagonal(arr) != 0.0):
            raise ValueError("diagonal must be zero")
        if not np.array_equal(arr, arr.T):
            raise ValueError("matrix must be symmetric")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    @property
    def n(self) -> int:
        return int(self.values.shape[0])


@dataclass(frozen=True)
class KMeansSolution:
    """A k-way partition of 0..n-1 together with its sum-of-squares cost."""

    parts: tuple[frozenset[int], ...]
    cost: float

    def __post_init__(self) -> None:
        parts = tuple(frozenset(int(i) for i in p) for p in self.parts)
        if not parts:
            raise ValueError("at least one part required")
        if any(not p for p in parts):
            raise ValueError("parts must be nonempty")
        total = sum(len(p) for p in parts)
        union = frozenset().union(*parts)
        if len(union) != total:
            raise ValueError("parts must be disjoint")
        if union != frozenset(range(total)):
            raise ValueError("parts must cover exactly the indices 0..n-1")
        if not (self.cost >= 0.0):
            raise ValueError("cost must be nonnegative")
        object.__setattr__(self, "parts", parts)
        object.__setattr__(self, "cost", float(self.cost))

    @classmethod
    def from_parts(cls, points: PointSet, parts: Sequence[Iterable[int]]) -> "KMeansSolution":
        """Build a solution with the cost recomputed from the points."""
        sets = tuple(frozenset(int(i) for i in p) for p in parts)
        return cls(sets, kmeans_cost(points, sets))

    def verify_cost(self, points: PointSet) -> bool:
        """Check the stored cost against a fresh recomputation."""
        return close(self.cost, kmeans_cost(points, self.parts))


def _index_array(indexset: Iterable[int], n: int, what: str = "index set") -> np.ndarray:
    ids = np.array(sorted(int(i) for i in indexset), dtype=np.intp)
    if ids.size == 0:
        raise ValueError(f"{what} must be nonempty")
    if len(np.unique(ids)) != ids.size:
        raise ValueError(f"{what} contains duplicate indices")
    if ids[0] < 0 or ids[-1] >= n:
        raise IndexError(f"{what} has indices outside 0..{n - 1}")
    return ids


def distance(points: PointSet, i: int, j: int) -> float:
    """Euclidean distance between points i and j."""
    n = points.n
    if not (0 <= i < n and 0 <= j < n):
        raise IndexError(f"point index out of range for n={n}")
    diff = points.coords[i] - points.coords[j]
    return float(np.sqrt((diff * diff).sum()))


def centroid(points: PointSet, indexset: Iterable[int]) -> np.ndarray:
    """Component-wise mean of the selected points."""
    ids = _index_array(indexset, points.n)
    return points.coords[ids].mean(axis=0)


def _one_means_cost(coords: np.ndarray, ids: np.ndarray) -> float:
    pts = coords[ids]
    c = pts.mean(axis=0)
    d = pts - c
    return float((d * d).sum())


def kmeans_cost(points: PointSet, parts: Sequence[Iterable[int]]) -> float:
    """Sum over parts of squared distances to the part centroid.

    `parts` must partition 0..n-1; overlapping or incomplete parts raise.
    """
    n = points.n
    arrays = [_index_array(p, n, "part") for p in parts]
    merged = np.concatenate(arrays)
    if merged.size != n or not np.array_equal(np.sort(merged), np.arange(n)):
        raise ValueError("parts must form a partition of 0..n-1")
    return float(sum(_one_means_cost(points.coords, ids) for ids in arrays))


def pairwise_distances(points: PointSet) -> DistanceMatrix:
    """Full symmetric matrix of Euclidean distances."""
    coords = points.coords
    n = points.n
    out = np.empty((n, n), dtype=np.float64)
    # Row blocks bound the (block, n, dim) broadcast temporary.
    step = max(1, int(4e6 // max(1, n * points.dim)))
    for s in range(0, n, step):
        diff = coords[s : s + step, None, :] - coords[None, :, :]
        out[s : s + step] = np.sqrt((diff * diff).sum(axis=2))
    return DistanceMatrix(out)


def check_metric(
    matrix: DistanceMatrix, tol: float = REL_TOL
) -> tuple[bool, Optional[tuple[int, int, int]]]:
    """Test the triangle inequality on every triple.

    Returns (True, None) when d(i,k) <= d(i,j) + d(j,k) + tol holds for all
    triples, else (False, (i, j, k)) for the lexicographically first
    violation, ordered by (i, k, j).
    """
    v = matrix.values
    n = matrix.n
    witnesses = []
    for j in range(n):
        bound = np.add.outer(v[:, j], v[j, :]) + tol
        bad = np.argwhere(v > bound)
        for i, k in bad:
            if i != j and k != j and i != k:
                witnesses.append((int(i), int(k), int(j)))
    if not witnesses:
        return True, None
    i, k, j = min(witnesses)
    return False, (i, j, k)
