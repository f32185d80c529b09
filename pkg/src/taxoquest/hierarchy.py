"""Immutable rooted label hierarchy with constant-time reachability tests.

Vertices get dense integer ids in input order; the original label strings
are kept in a side table.  A single pre-order traversal at load time assigns
interval labels so that ancestor tests, subtree enumeration and subtree
aggregation are all interval operations.
"""

from __future__ import annotations

import json
import math
from typing import IO, Iterator, Union


class HierarchyError(ValueError):
    """Base class for malformed hierarchy input."""


class EmptyInputError(HierarchyError):
    pass


class DuplicateParentError(HierarchyError):
    pass


class MultipleRootsError(HierarchyError):
    pass


class DanglingReferenceError(HierarchyError):
    pass


class CycleError(HierarchyError):
    pass


INFINITE = math.inf


class Hierarchy:
    """A rooted directed tree over dense vertex ids 0..n-1.

    Edges point from the more general concept to the more specific one.
    All derived structure (depth, pre-order intervals, height, degree) is
    computed once at construction; instances are immutable afterwards and
    safe to share across threads and processes.
    """

    __slots__ = (
        "n", "root", "parent", "children", "depth", "label",
        "euler_in", "euler_out", "pre_order", "height", "max_out_degree",
        "_label_to_id", "__weakref__",
    )

    def __init__(self, parent: list, labels: list):
        n = len(parent)
        if n == 0:
            raise EmptyInputError("hierarchy has no vertices")
        roots = [v for v in range(n) if parent[v] is None]
        if len(roots) == 0:
            raise CycleError("no root vertex: every vertex has a parent")
        if len(roots) > 1:
            names = ", ".join(labels[v] for v in roots[:5])
            raise MultipleRootsError(f"multiple roots: {names}")

        self.n = n
        self.root = roots[0]
        self.parent = list(parent)
        self.label = list(labels)
        self._label_to_id = {lab: v for v, lab in enumerate(labels)}

        children: list = [[] for _ in range(n)]
        for v in range(n):
            p = parent[v]
            if p is not None:
                children[p].append(v)
        self.children = children

        # Iterative pre-order: assigns intervals, depth, and detects vertices
        # unreachable from the root (a cycle among non-root vertices).
        depth = [0] * n
        euler_in = [-1] * n
        euler_out = [0] * n
        pre_order = [0] * n
        counter = 0
        stack = [(self.root, False)]
        while stack:
            v, done = stack.pop()
            if done:
                euler_out[v] = counter
                continue
            euler_in[v] = counter
            pre_order[counter] = v
            counter += 1
            stack.append((v, True))
            for c in reversed(children[v]):
                depth[c] = depth[v] + 1
                stack.append((c, False))
        if counter != n:
            bad = next(v for v in range(n) if euler_in[v] < 0)
            raise CycleError(
                f"cycle detected: vertex {labels[bad]!r} unreachable from root"
            )
        self.depth = depth
        self.euler_in = euler_in
        self.euler_out = euler_out
        self.pre_order = pre_order
        self.height = max(depth)
        self.max_out_degree = max((len(c) for c in children), default=0)

    # -- queries ---------------------------------------------------------

    def is_ancestor(self, u: int, v: int) -> bool:
        """True iff u can reach v (u == v counts)."""
        return self.euler_in[u] <= self.euler_in[v] < self.euler_out[u]

    def distance(self, u: int, v: int) -> Union[int, float]:
        """Hop count from u down to v, or inf when v is not below u."""
        if self.is_ancestor(u, v):
            return self.depth[v] - self.depth[u]
        return INFINITE

    def subtree_vertices(self, v: int) -> Iterator[int]:
        """All vertices in v's subtree, v included, in pre-order."""
        pre = self.pre_order
        for i in range(self.euler_in[v], self.euler_out[v]):
            yield pre[i]

    def subtree_size(self, v: int) -> int:
        return self.euler_out[v] - self.euler_in[v]

    def root_path(self, v: int) -> list:
        """Vertices from the root down to v, inclusive."""
        path = []
        while v is not None:
            path.append(v)
            v = self.parent[v]
        path.reverse()
        return path

    def id_of(self, label: str) -> int:
        try:
            return self._label_to_id[label]
        except KeyError:
            raise KeyError(f"unknown vertex label {label!r}") from None

    def content_hash(self) -> str:
        import hashlib

        h = hashlib.sha256()
        for v in range(self.n):
            p = self.parent[v]
            h.update(f"{self.label[p] if p is not None else ''}\t{self.label[v]}\n".encode())
        return h.hexdigest()


def _from_edges(pairs: list, standalone: list) -> Hierarchy:
    ids: dict = {}
    labels: list = []

    def intern(tok: str) -> int:
        if tok not in ids:
            ids[tok] = len(labels)
            labels.append(tok)
        return ids[tok]

    parent_of: dict = {}
    for ptok, ctok in pairs:
        p = intern(ptok)
        c = intern(ctok)
        if c in parent_of and parent_of[c] != p:
            raise DuplicateParentError(f"vertex {ctok!r} has two parents")
        if c in parent_of:
            continue
        parent_of[c] = p
    for tok in standalone:
        intern(tok)

    n = len(labels)
    parent = [parent_of.get(v) for v in range(n)]
    return Hierarchy(parent, labels)


def load_hierarchy(source: Union[bytes, str, IO], format: str = "edge-list") -> Hierarchy:
    """Parse an edge-list or JSON hierarchy description.

    Edge-list: UTF-8 text, one edge per line as "parent<TAB>child" label
    strings; a line with a single token declares an isolated vertex.  The
    root is the unique vertex never appearing as a child.

    JSON: {"nodes": [{"id": str, "label": str, "parent": str|null}]} with
    exactly one null parent.
    """
    if hasattr(source, "read"):
        source = source.read()
    if isinstance(source, bytes):
        text = source.decode("utf-8")
    else:
        text = source

    if format == "edge-list":
        pairs = []
        standalone = []
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            fields = line.split("\t")
            if len(fields) == 1:
                standalone.append(fields[0])
            elif len(fields) == 2:
                pairs.append((fields[0], fields[1]))
            else:
                raise HierarchyError(f"line {lineno}: expected 'parent<TAB>child'")
        if not pairs and not standalone:
            raise EmptyInputError("empty edge list")
        return _from_edges(pairs, standalone)

    if format == "json":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise HierarchyError(f"invalid JSON: {exc}") from None
        nodes = doc.get("nodes") if isinstance(doc, dict) else None
        if not nodes:
            raise EmptyInputError("JSON document has no nodes")
        ids = {}
        labels = []
        for node in nodes:
            nid = node["id"]
            if nid in ids:
                raise DuplicateParentError(f"node id {nid!r} defined twice")
            ids[nid] = len(labels)
            labels.append(node.get("label", nid))
        parent: list = [None] * len(labels)
        null_seen = 0
        for node in nodes:
            v = ids[node["id"]]
            pref = node.get("parent")
            if pref is None:
                null_seen += 1
                continue
            if pref not in ids:
                raise DanglingReferenceError(
                    f"node {node['id']!r} references unknown parent {pref!r}"
                )
            parent[v] = ids[pref]
        if null_seen == 0:
            raise CycleError("no root: every node has a parent")
        if null_seen > 1:
            raise MultipleRootsError(f"{null_seen} nodes have a null parent")
        return Hierarchy(parent, labels)

    raise ValueError(f"unknown format {format!r}")
