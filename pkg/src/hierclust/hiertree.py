"""Binary dendrograms over labeled leaves: splits, LCA queries, enumeration, text format.

A tree over n points has n leaf nodes carrying the point indices 0..n-1 and,
for n >= 2, exactly n-1 internal nodes with two children each. Children are
semantically unordered; wherever an order matters (serialization, split
listings) the child containing the smallest leaf index comes first, which
makes the serialized text a topology invariant usable for deduplication.

Text format::

    tree := leaf | "(" tree "," tree ")"
    leaf := decimal point index

Whitespace between tokens is ignored. Example: ``((0,1),2)``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np

NodeSpec = Union[int, Tuple[int, int]]
Nested = Union[int, tuple]


class TreeParseError(ValueError):
    """Malformed tree text; `position` is the 0-based offset of the problem."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


@dataclass(frozen=True)
class Split:
    """One bipartition S -> (S1, S2) induced by an internal node."""

    left_set: frozenset
    right_set: frozenset

    def __post_init__(self) -> None:
        left = frozenset(int(i) for i in self.left_set)
        right = frozenset(int(i) for i in self.right_set)
        if not left or not right:
            raise ValueError("both sides of a split must be nonempty")
        if left & right:
            raise ValueError("split sides must be disjoint")
        object.__setattr__(self, "left_set", left)
        object.__setattr__(self, "right_set", right)

    @property
    def parent_set(self) -> frozenset:
        return self.left_set | self.right_set


class HierTree:
    """Rooted binary dendrogram; immutable, with cached derived views.

    `nodes[k]` is either an int (the point index of a leaf) or a pair of
    child node ids. Construction validates the full shape contract: every
    point index appears on exactly one leaf, every internal node has two
    children, there is one root, and everything is reachable exactly once.
    """

    __slots__ = (
        "nodes",
        "root",
        "n_leaves",
        "_parent",
        "_min_leaf",
        "_count_under",
        "_post_order",
        "_leaf_node",
        "_leaf_arrays",
        "_splits",
        "_split_arrays",
    )

    def __init__(self, nodes: Sequence[NodeSpec], root: int):
        normalized: List[NodeSpec] = []
        for entry in nodes:
            if isinstance(entry, (int, np.integer)):
                normalized.append(int(entry))
            else:
                try:
                    a, b = entry
                except (TypeError, ValueError):
                    raise ValueError("node entries must be point indices or (left, right) pairs")
                normalized.append((int(a), int(b)))
        self.nodes = tuple(normalized)
        self.root = int(root)
        self._validate()
        self._leaf_arrays = None
        self._splits = None
        self._split_arrays = None

    def _validate(self) -> None:
        nodes = self.nodes
        n_nodes = len(nodes)
        if n_nodes == 0:
            raise ValueError("tree must have at least one node")
        if not (0 <= self.root < n_nodes):
            raise ValueError("root id out of range")
        leaves = [v for v in nodes if isinstance(v, int)]
        n = len(leaves)
        if n_nodes != 2 * n - 1:
            raise ValueError(f"{n} leaves require {2 * n - 1} nodes, got {n_nodes}")
        if sorted(leaves) != list(range(n)):
            raise ValueError("leaf point indices must be exactly 0..n-1, each once")

        parent = [-1] * n_nodes
        for nid, v in enumerate(nodes):
            if isinstance(v, int):
                continue
            for c in v:
                if not (0 <= c < n_nodes):
                    raise ValueError(f"child id {c} out of range")
                if c == nid:
                    raise ValueError("node cannot be its own child")
                if parent[c] != -1:
                    raise ValueError(f"node {c} has two parents")
                parent[c] = nid
        if parent[self.root] != -1:
            raise ValueError("root must not have a parent")

        # Iterative post-order; doubles as the reachability/acyclicity check.
        post: List[int] = []
        stack: List[Tuple[int, bool]] = [(self.root, False)]
        seen = 0
        while stack:
            nid, done = stack.pop()
            if done:
                post.append(nid)
                continue
            seen += 1
            stack.append((nid, True))
            v = nodes[nid]
            if not isinstance(v, int):
                stack.append((v[1], False))
                stack.append((v[0], False))
        if seen != n_nodes:
            raise ValueError("all nodes must be reachable from the root")

        min_leaf = [0] * n_nodes
        count = [0] * n_nodes
        leaf_node = [-1] * n
        for nid in post:
            v = nodes[nid]
            if isinstance(v, int):
                min_leaf[nid] = v
                count[nid] = 1
                leaf_node[v] = nid
            else:
                a, b = v
                min_leaf[nid] = min(min_leaf[a], min_leaf[b])
                count[nid] = count[a] + count[b]

        self.n_leaves = n
        self._parent = tuple(parent)
        self._min_leaf = tuple(min_leaf)
        self._count_under = tuple(count)
        self._post_order = tuple(post)
        self._leaf_node = tuple(leaf_node)

    # ------------------------------------------------------------------
    # constructors / conversions

    @classmethod
    def from_nested(cls, nested: Nested) -> "HierTree":
        """Build from nested tuples: a leaf index or (left, right) pairs."""
        nodes: List[Optional[NodeSpec]] = [None]
        stack: List[Tuple[Nested, int]] = [(nested, 0)]
        while stack:
            spec, slot = stack.pop()
            if isinstance(spec, (int, np.integer)):
                nodes[slot] = int(spec)
                continue
            try:
                a, b = spec
            except (TypeError, ValueError):
                raise ValueError("nested entries must be ints or (left, right) pairs")
            la = len(nodes)
            nodes.append(None)
            rb = len(nodes)
            nodes.append(None)
            nodes[slot] = (la, rb)
            stack.append((b, rb))
            stack.append((a, la))
        return cls(nodes, 0)

    def to_nested(self) -> Nested:
        """Nested-tuple view with the canonical (smallest leaf first) order."""
        built: List[Optional[Nested]] = [None] * len(self.nodes)
        for nid in self._post_order:
            v = self.nodes[nid]
            if isinstance(v, int):
                built[nid] = v
            else:
                a, b = self._ordered_children(nid)
                built[nid] = (built[a], built[b])
        return built[self.root]

    def _ordered_children(self, nid: int) -> Tuple[int, int]:
        a, b = self.nodes[nid]
        if self._min_leaf[a] <= self._min_leaf[b]:
            return a, b
        return b, a

    def children(self, nid: int) -> Optional[Tuple[int, int]]:
        v = self.nodes[nid]
        return None if isinstance(v, int) else v

    def is_leaf(self, nid: int) -> bool:
        return isinstance(self.nodes[nid], int)

    def internal_ids(self) -> List[int]:
        return [nid for nid, v in enumerate(self.nodes) if not isinstance(v, int)]

    def leaf_count_under(self, nid: int) -> int:
        return self._count_under[nid]

    def leaf_array(self, nid: int) -> np.ndarray:
        """Point indices of the leaves under `nid` (cached, do not mutate)."""
        if self._leaf_arrays is None:
            arrays: List[Optional[np.ndarray]] = [None] * len(self.nodes)
            for k in self._post_order:
                v = self.nodes[k]
                if isinstance(v, int):
                    arrays[k] = np.array([v], dtype=np.intp)
                else:
                    a, b = v
                    arrays[k] = np.concatenate((arrays[a], arrays[b]))
            self._leaf_arrays = arrays
        return self._leaf_arrays[nid]

    # ------------------------------------------------------------------
    # derived views

    def split_arrays(self) -> List[Tuple[int, np.ndarray, np.ndarray]]:
        """(node id, left leaf indices, right leaf indices), root-first.

        Depth-first, canonical child first: the same order as splits().
        """
        if self._split_arrays is None:
            out: List[Tuple[int, np.ndarray, np.ndarray]] = []
            stack = [self.root]
            while stack:
                nid = stack.pop()
                if self.is_leaf(nid):
                    continue
                a, b = self._ordered_children(nid)
                out.append((nid, self.leaf_array(a), self.leaf_array(b)))
                stack.append(b)
                stack.append(a)
            self._split_arrays = out
        return self._split_arrays

    def splits(self) -> List[Split]:
        """All n-1 bipartitions, root-first; empty for a single leaf."""
        if self._splits is None:
            self._splits = [
                Split(frozenset(l.tolist()), frozenset(r.tolist()))
                for _, l, r in self.split_arrays()
            ]
        return list(self._splits)

    def lca_leaf_count(self, i: int, j: int) -> int:
        """Number of leaves under the least common ancestor of leaves i and j."""
        n = self.n_leaves
        if not (0 <= i < n and 0 <= j < n):
            raise IndexError(f"leaf index out of range for n={n}")
        if i == j:
            raise ValueError("lca_leaf_count needs two distinct leaves")
        ancestors = set()
        node = self._leaf_node[i]
        while node != -1:
            ancestors.add(node)
            node = self._parent[node]
        node = self._leaf_node[j]
        while node not in ancestors:
            node = self._parent[node]
        return self._count_under[node]

    def serialize(self) -> str:
        """Canonical parenthesis text; see the module docstring for the grammar."""
        out: List[str] = []
        stack: List[Tuple[str, object]] = [("node", self.root)]
        while stack:
            op, x = stack.pop()
            if op == "text":
                out.append(x)  # type: ignore[arg-type]
                continue
            nid = x  # type: ignore[assignment]
            v = self.nodes[nid]
            if isinstance(v, int):
                out.append(str(v))
            else:
                a, b = self._ordered_children(nid)
                out.append("(")
                stack.append(("text", ")"))
                stack.append(("node", b))
                stack.append(("text", ","))
                stack.append(("node", a))
        return "".join(out)

    # ------------------------------------------------------------------
    # equality on topology via the canonical text

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, HierTree):
            return NotImplemented
        return self.serialize() == other.serialize()

    def __hash__(self) -> int:
        return hash(self.serialize())

    def __repr__(self) -> str:
        return f"HierTree({self.serialize()!r})"


# ----------------------------------------------------------------------
# module-level operations (thin wrappers over the methods)


def splits(tree: HierTree) -> List[Split]:
    return tree.splits()


def lca_leaf_count(tree: HierTree, i: int, j: int) -> int:
    return tree.lca_leaf_count(i, j)


def serialize(tree: HierTree) -> str:
    return tree.serialize()


_INT_RE = re.compile(r"\d+")


def parse(text: str) -> HierTree:
    """Parse the parenthesis format back into a tree.

    Syntax errors raise TreeParseError with the offending position; a
    duplicate leaf index is reported at its token, missing indices at the
    end of the text.
    """
    # Stack items: ("open", pos) | ("comma", pos) | ("val", nested)
    stack: List[Tuple[str, object]] = []
    i = 0
    n_text = len(text)
    leaf_positions: dict[int, int] = {}

    def push_value(value: Nested, pos: int) -> None:
        if stack and stack[-1][0] == "val":
            raise TreeParseError("expected ',' or ')'", pos)
        stack.append(("val", value))

    while i < n_text:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch == "(":
            if stack and stack[-1][0] == "val":
                raise TreeParseError("expected ',' or ')'", i)
            stack.append(("open", i))
            i += 1
        elif ch == ",":
            if len(stack) < 2 or stack[-1][0] != "val" or stack[-2][0] != "open":
                raise TreeParseError("unexpected ','", i)
            stack.append(("comma", i))
            i += 1
        elif ch == ")":
            if (
                len(stack) < 4
                or stack[-1][0] != "val"
                or stack[-2][0] != "comma"
                or stack[-3][0] != "val"
                or stack[-4][0] != "open"
            ):
                raise TreeParseError("unexpected ')'", i)
            _, right = stack.pop()
            stack.pop()
            _, left = stack.pop()
            stack.pop()
            push_value((left, right), i)
            i += 1
        else:
            m = _INT_RE.match(text, i)
            if not m:
                raise TreeParseError(f"unexpected character {ch!r}", i)
            value = int(m.group())
            if value in leaf_positions:
                raise TreeParseError(f"duplicate leaf index {value}", i)
            leaf_positions[value] = i
            push_value(value, i)
            i = m.end()

    if not stack:
        raise TreeParseError("empty input", 0)
    if len(stack) != 1 or stack[0][0] != "val":
        pos = stack[-1][1] if stack[-1][0] != "val" else n_text
        raise TreeParseError("unbalanced tree text", int(pos))  # type: ignore[arg-type]

    n = len(leaf_positions)
    missing = sorted(set(range(n)) - set(leaf_positions))
    if missing:
        raise ValueError(f"leaf indices must cover 0..{n - 1}; missing {missing}")
    return HierTree.from_nested(stack[0][1])


def _insertions(t: Nested, leaf: int) -> Iterator[Nested]:
    """All trees obtained by attaching `leaf` above one node of `t`."""
    yield (t, leaf)
    if isinstance(t, tuple):
        a, b = t
        for na in _insertions(a, leaf):
            yield (na, b)
        for nb in _insertions(b, leaf):
            yield (a, nb)


def enumerate_trees(n: int) -> Iterator[HierTree]:
    """Every distinct dendrogram topology on leaves 0..n-1, exactly once.

    There are (2n-3)!! of them, so the guard caps n at 7 (10395 trees).
    Each topology on k leaves extends a unique topology on k-1 leaves by
    one leaf insertion, which is what makes the enumeration duplicate-free.
    """
    if not 2 <= n <= 7:
        raise ValueError("enumerate_trees supports 2 <= n <= 7")

    def grow(k: int) -> Iterator[Nested]:
        if k == 1:
            yield 0
            return
        for t in grow(k - 1):
            yield from _insertions(t, k - 1)

    for nested in grow(n):
        yield HierTree.from_nested(nested)
