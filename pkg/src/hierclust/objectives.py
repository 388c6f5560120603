"""Objective functions over dendrograms.

Three objectives are evaluated here:

* revenue -- maximization over Euclidean points. A pair (i, j) separated by
  the split S -> (S1, S2) with i in S1, j in S2 earns
  ``min(d(i,j) / delta, 1)`` where ``delta`` is the larger of the two
  distances to the own-side centroids, ``max(d(i, rho(S1)), d(j, rho(S2)))``.
  When delta is zero the pair earns 1 regardless of d(i, j); this is an
  explicit branch, never a float division by zero, and it is what makes
  instances with coincident points behave. Each pair earns at most one unit,
  so n(n-1)/2 bounds any tree's total.

* ckmm -- maximization over dissimilarities: sum of d(i,j) times the number
  of leaves under the pair's least common ancestor.

* dasgupta -- the same sum with similarity weights, minimized.

The per-split view and the per-pair view of each objective are both
implemented; they must agree, and `tree_revenue` exposes both as modes.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, List, NamedTuple, Tuple, Union

import numpy as np

from .hiertree import HierTree, Split, enumerate_trees
from .metricspace import ABS_TOL, REL_TOL, DistanceMatrix, PointSet, close

OBJECTIVE_KINDS = ("revenue", "ckmm", "dasgupta")

# A pair is counted toward a point's high-revenue set when it earns at
# least this much; a point is high-revenue when at least half of the
# opposite side is in its high-revenue set.
HIGH_REVENUE_MIN = 0.1


@dataclass(frozen=True)
class ObjectiveReport:
    """Total objective value with its per-split breakdown and bound.

    For revenue and ckmm `upper_bound` bounds the total from above; for
    dasgupta the field carries the trivial lower bound instead (twice the
    sum of pairwise weights).
    """

    objective_kind: str
    total: float
    per_split: Tuple[Tuple[Split, float], ...]
    upper_bound: float

    def __post_init__(self) -> None:
        if self.objective_kind not in OBJECTIVE_KINDS:
            raise ValueError(f"unknown objective kind {self.objective_kind!r}")
        object.__setattr__(self, "per_split", tuple(self.per_split))
        total = float(self.total)
        object.__setattr__(self, "total", total)
        object.__setattr__(self, "upper_bound", float(self.upper_bound))
        s = math.fsum(v for _, v in self.per_split)
        if not close(total, s):
            raise ValueError("total must equal the sum of per-split values")
        if self.objective_kind == "revenue":
            slack = max(ABS_TOL, REL_TOL * max(1.0, abs(total)))
            for sp, v in self.per_split:
                cap = len(sp.left_set) * len(sp.right_set)
                if v < -slack or v > cap + slack:
                    raise ValueError("per-split revenue must lie in [0, |S1||S2|]")
            if total > self.upper_bound + slack:
                raise ValueError("revenue total exceeds the n(n-1)/2 bound")

    def to_csv(self) -> str:
        """One row per split (parent/left/right sizes, value) plus a totals row."""
        lines = ["parent_size,left_size,right_size,value"]
        for sp, v in self.per_split:
            l, r = len(sp.left_set), len(sp.right_set)
            lines.append(f"{l + r},{l},{r},{v!r}")
        lines.append(f"total,,,{self.total!r}")
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class HighRevenueStats:
    """Classification of the larger side of a split by revenue earned across it."""

    side_a: frozenset
    side_b: frozenset
    high_revenue_points_in_larger: frozenset
    fraction: float

    def __post_init__(self) -> None:
        if len(self.side_a) < len(self.side_b):
            raise ValueError("side_a must be the larger side")
        if not self.high_revenue_points_in_larger <= self.side_a:
            raise ValueError("high-revenue points must come from the larger side")
        if not 0.0 <= self.fraction <= 1.0:
            raise ValueError("fraction must lie in [0, 1]")


class TriangleDecomposition(NamedTuple):
    triple_sum: float
    pair_term: float
    reconstructed_total: float


# ----------------------------------------------------------------------
# revenue


def pair_revenue(
    points: PointSet,
    left_set: Iterable[int],
    right_set: Iterable[int],
    i: int,
    j: int,
) -> float:
    """Revenue earned by the pair (i, j) split across (left_set, right_set)."""
    left = frozenset(int(x) for x in left_set)
    right = frozenset(int(x) for x in right_set)
    if not left or not right:
        raise ValueError("both sides must be nonempty")
    if left & right:
        raise ValueError("sides must be disjoint")
    if i not in left:
        raise ValueError(f"point {i} is not in the left side")
    if j not in right:
        raise ValueError(f"point {j} is not in the right side")
    coords = points.coords
    rho_l = coords[np.fromiter(sorted(left), dtype=np.intp)].mean(axis=0)
    rho_r = coords[np.fromiter(sorted(right), dtype=np.intp)].mean(axis=0)
    di = coords[i] - rho_l
    dj = coords[j] - rho_r
    delta = max(float(np.sqrt((di * di).sum())), float(np.sqrt((dj * dj).sum())))
    if delta == 0.0:
        return 1.0
    dij = coords[i] - coords[j]
    d = float(np.sqrt((dij * dij).sum()))
    return min(d / delta, 1.0)


def _split_revenue_matrix(
    coords: np.ndarray, left: np.ndarray, right: np.ndarray
) -> np.ndarray:
    """Revenue of every (left x right) pair for one split, vectorized."""
    pl = coords[left]
    pr = coords[right]
    rho_l = pl.mean(axis=0)
    rho_r = pr.mean(axis=0)
    dl = np.sqrt(((pl - rho_l) ** 2).sum(axis=1))
    dr = np.sqrt(((pr - rho_r) ** 2).sum(axis=1))
    cross = np.sqrt(((pl[:, None, :] - pr[None, :, :]) ** 2).sum(axis=2))
    delta = np.maximum(dl[:, None], dr[None, :])
    safe = np.where(delta == 0.0, 1.0, delta)
    return np.where(delta == 0.0, 1.0, np.minimum(cross / safe, 1.0))


def _split_revenue_sum(coords: np.ndarray, left: np.ndarray, right: np.ndarray) -> float:
    pl = coords[left]
    pr = coords[right]
    rho_l = pl.mean(axis=0)
    rho_r = pr.mean(axis=0)
    dl = np.sqrt(((pl - rho_l) ** 2).sum(axis=1))
    dr = np.sqrt(((pr - rho_r) ** 2).sum(axis=1))
    total = 0.0
    # Row blocks bound the (block, |right|, dim) broadcast temporary.
    step = max(1, int(4e6 // max(1, len(right) * coords.shape[1])))
    for s in range(0, len(left), step):
        block = pl[s : s + step]
        cross = np.sqrt(((block[:, None, :] - pr[None, :, :]) ** 2).sum(axis=2))
        delta = np.maximum(dl[s : s + step, None], dr[None, :])
        safe = np.where(delta == 0.0, 1.0, delta)
        rev = np.where(delta == 0.0, 1.0, np.minimum(cross / safe, 1.0))
        total += float(rev.sum())
    return total


def _check_tree_points(points: PointSet, tree: HierTree) -> None:
    if tree.n_leaves != points.n:
        raise ValueError(
            f"tree has {tree.n_leaves} leaves but the point set has {points.n} points"
        )


def revenue_upper_bound(n: int) -> float:
    """n(n-1)/2, the revenue of a tree earning one unit from every pair."""
    if n < 1:
        raise ValueError("n must be positive")
    return float(n * (n - 1) // 2)


def tree_revenue(points: PointSet, tree: HierTree, mode: str = "split_sum") -> ObjectiveReport:
    """Total revenue of a tree, by splits or by pairs.

    ``split_sum`` walks the splits and sums each split's pair revenues in one
    vectorized pass. ``pair_sum`` walks all n(n-1)/2 pairs, finds the split
    separating each pair, and sums `pair_revenue` calls. The two routes
    evaluate the same function and must agree to float accumulation error.
    """
    _check_tree_points(points, tree)
    if mode not in ("split_sum", "pair_sum"):
        raise ValueError(f"mode must be 'split_sum' or 'pair_sum', got {mode!r}")
    coords = points.coords
    arrays = tree.split_arrays()
    if mode == "split_sum":
        values = [_split_revenue_sum(coords, l, r) for _, l, r in arrays]
    else:
        n = points.n
        split_id = np.full((n, n), -1, dtype=np.intp)
        for s, (_, l, r) in enumerate(arrays):
            split_id[np.ix_(l, r)] = s
            split_id[np.ix_(r, l)] = s
        sides = [(frozenset(l.tolist()), frozenset(r.tolist())) for _, l, r in arrays]
        values = [0.0] * len(arrays)
        sid_rows = split_id.tolist()
        for i in range(n):
            row = sid_rows[i]
            for j in range(i + 1, n):
                s = row[j]
                left, right = sides[s]
                if i in left:
                    values[s] += pair_revenue(points, left, right, i, j)
                else:
                    values[s] += pair_revenue(points, left, right, j, i)
    per_split = tuple(zip(tree.splits(), values))
    return ObjectiveReport(
        objective_kind="revenue",
        total=math.fsum(values),
        per_split=per_split,
        upper_bound=revenue_upper_bound(points.n),
    )


def high_revenue_stats(
    points: PointSet, left_set: Iterable[int], right_set: Iterable[int]
) -> HighRevenueStats:
    """Classify the larger side's points by the revenue they earn across the split.

    A point of the larger side A is high-revenue when it earns at least
    `HIGH_REVENUE_MIN` against at least half of the smaller side B. Sides
    are re-oriented internally so A is always the larger (ties keep the
    caller's left side as A).
    """
    left = sorted(int(x) for x in left_set)
    right = sorted(int(x) for x in right_set)
    if not left or not right:
        raise ValueError("both sides must be nonempty")
    if set(left) & set(right):
        raise ValueError("sides must be disjoint")
    if len(left) >= len(right):
        a, b = left, right
    else:
        a, b = right, left
    arr_a = np.array(a, dtype=np.intp)
    arr_b = np.array(b, dtype=np.intp)
    rev = _split_revenue_matrix(points.coords, arr_a, arr_b)
    counts = (rev >= HIGH_REVENUE_MIN).sum(axis=1)
    high = frozenset(int(a[k]) for k in range(len(a)) if 2 * int(counts[k]) >= len(b))
    return HighRevenueStats(
        side_a=frozenset(a),
        side_b=frozenset(b),
        high_revenue_points_in_larger=high,
        fraction=len(high) / len(a),
    )


# ----------------------------------------------------------------------
# leaf-count-weighted objectives (ckmm / dasgupta)


def _lca_weighted_values(values: np.ndarray, tree: HierTree) -> List[float]:
    out = []
    for _, l, r in tree.split_arrays():
        size = len(l) + len(r)
        out.append(size * float(values[np.ix_(l, r)].sum()))
    return out


def _check_tree_matrix(matrix: DistanceMatrix, tree: HierTree) -> None:
    if tree.n_leaves != matrix.n:
        raise ValueError(
            f"tree has {tree.n_leaves} leaves but the matrix covers {matrix.n} points"
        )


def ckmm_value(dist: DistanceMatrix, tree: HierTree) -> ObjectiveReport:
    """Sum over pairs of d(i,j) times the pair's LCA leaf count (maximized).

    The reported upper bound is the sum of n * d(p, q) over pairs, since no
    LCA holds more than all n leaves.
    """
    _check_tree_matrix(dist, tree)
    values = _lca_weighted_values(dist.values, tree)
    n = dist.n
    return ObjectiveReport(
        objective_kind="ckmm",
        total=math.fsum(values),
        per_split=tuple(zip(tree.splits(), values)),
        upper_bound=n * float(dist.values.sum()) / 2.0,
    )


def dasgupta_cost(weights: DistanceMatrix, tree: HierTree) -> ObjectiveReport:
    """Same arithmetic as ckmm_value with similarity weights, minimized.

    The `upper_bound` field carries the trivial lower bound instead: twice
    the sum of pairwise weights (every LCA holds at least two leaves).
    """
    _check_tree_matrix(weights, tree)
    values = _lca_weighted_values(weights.values, tree)
    return ObjectiveReport(
        objective_kind="dasgupta",
        total=math.fsum(values),
        per_split=tuple(zip(tree.splits(), values)),
        upper_bound=float(weights.values.sum()),
    )


def _lca_count_matrix(tree: HierTree) -> np.ndarray:
    n = tree.n_leaves
    counts = np.zeros((n, n), dtype=np.intp)
    for nid, l, r in tree.split_arrays():
        size = tree.leaf_count_under(nid)
        counts[np.ix_(l, r)] = size
        counts[np.ix_(r, l)] = size
    return counts


def triangle_decompose(
    matrix: DistanceMatrix, tree: HierTree
) -> TriangleDecomposition:
    """Regroup the LCA-weighted sum into per-triangle terms plus a pair term.

    For each unordered triple one pair stays together strictly deepest; the
    triangle contributes the two cross values involving the point separated
    first. Adding twice the sum of all pairwise values reconstructs the
    ckmm / dasgupta total exactly.
    """
    _check_tree_matrix(matrix, tree)
    n = matrix.n
    if n < 3:
        raise ValueError("triangle decomposition needs at least three points")
    d = matrix.values.tolist()
    c = _lca_count_matrix(tree).tolist()
    terms = []
    for i, j, k in itertools.combinations(range(n), 3):
        cij, cik, cjk = c[i][j], c[i][k], c[j][k]
        if cij < cik:
            terms.append(d[i][k] + d[j][k])
        elif cik < cjk:
            terms.append(d[i][j] + d[j][k])
        else:
            terms.append(d[i][j] + d[i][k])
    triple_sum = math.fsum(terms)
    pair_term = float(matrix.values.sum())
    return TriangleDecomposition(triple_sum, pair_term, triple_sum + pair_term)


# ----------------------------------------------------------------------
# exhaustive optimum


def _revenue_total(coords: np.ndarray, tree: HierTree) -> float:
    return math.fsum(_split_revenue_sum(coords, l, r) for _, l, r in tree.split_arrays())


def _lca_weighted_total(values: np.ndarray, tree: HierTree) -> float:
    return math.fsum(_lca_weighted_values(values, tree))


def brute_force_opt(
    instance: Union[PointSet, DistanceMatrix], objective_kind: str
) -> Tuple[HierTree, float]:
    """Exact optimum over every tree topology; n is capped at 7.

    Revenue takes a PointSet; ckmm and dasgupta take a DistanceMatrix.
    Maximizes revenue and ckmm, minimizes dasgupta. Of equally good trees
    the first in enumeration order is returned.
    """
    if objective_kind not in OBJECTIVE_KINDS:
        raise ValueError(f"unknown objective kind {objective_kind!r}")
    if objective_kind == "revenue":
        if not isinstance(instance, PointSet):
            raise TypeError("revenue optimization needs a PointSet")
        n = instance.n
        evaluate = lambda t: _revenue_total(instance.coords, t)
    else:
        if not isinstance(instance, DistanceMatrix):
            raise TypeError(f"{objective_kind} optimization needs a DistanceMatrix")
        n = instance.n
        evaluate = lambda t: _lca_weighted_total(instance.values, t)
    if n > 7:
        raise ValueError("brute_force_opt is capped at n = 7")
    if n == 1:
        return HierTree([0], 0), 0.0
    minimize = objective_kind == "dasgupta"
    best_tree = None
    best_value = None
    for tree in enumerate_trees(n):
        value = evaluate(tree)
        if best_value is None or (value < best_value if minimize else value > best_value):
            best_tree, best_value = tree, value
    assert best_tree is not None
    return best_tree, float(best_value)
