"""Trees and chains over a distance matrix.

Every builder breaks weight ties the same way: among equal-weight candidate
edges the one whose sorted code pair ``(a, b)`` is lexicographically smallest
wins. Trees are stored unrooted; rooting is a display concern.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass

import numpy as np

from .errors import InputError
from .metrics import DistanceMatrix

KINDS = ("mst", "lmst", "umlp-chain", "bmlp-chain", "mamlp")
CHAIN_KINDS = ("umlp-chain", "bmlp-chain")


class UnionFind:
    """Disjoint sets over ``0..n-1`` with path compression and union by rank."""

    def __init__(self, n):
        self.parent = list(range(n))
        self.rank = [0] * n

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, x, y):
        """Merge the sets of x and y; False if they were already joined."""
        rx, ry = self.find(x), self.find(y)
        if rx == ry:
            return False
        if self.rank[rx] < self.rank[ry]:
            rx, ry = ry, rx
        self.parent[ry] = rx
        if self.rank[rx] == self.rank[ry]:
            self.rank[rx] += 1
        return True


def _edge_key(w, a, b):
    return (w, *sorted((a, b)))


@dataclass(frozen=True, eq=False)
class HierarchyTree:
    """Weighted edge list over ``nodes``; edges kept in construction order."""

    nodes: tuple[str, ...]
    edges: tuple[tuple[str, str, float], ...]
    kind: str = "mst"

    def __post_init__(self):
        nodes = tuple(self.nodes)
        edges = tuple((str(a), str(b), float(w)) for a, b, w in self.edges)
        if self.kind not in KINDS:
            raise InputError(f"unknown tree kind {self.kind!r}")
        known = set(nodes)
        if len(known) != len(nodes):
            raise InputError("duplicate tree node")
        for a, b, _ in edges:
            if a not in known or b not in known or a == b:
                raise InputError(f"bad edge {a}-{b}")
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "edges", edges)

    @property
    def total_weight(self) -> float:
        return float(sum(w for _, _, w in self.edges))

    def edge_set(self) -> set[frozenset]:
        return {frozenset((a, b)) for a, b, _ in self.edges}

    def adjacency(self) -> dict[str, list[tuple[str, float]]]:
        adj = {n: [] for n in self.nodes}
        for a, b, w in self.edges:
            adj[a].append((b, w))
            adj[b].append((a, w))
        return adj

    def degree(self) -> dict[str, int]:
        return {n: len(nb) for n, nb in self.adjacency().items()}

    def is_spanning_tree(self) -> bool:
        if len(self.edges) != len(self.nodes) - 1:
            return False
        uf = UnionFind(len(self.nodes))
        pos = {n: i for i, n in enumerate(self.nodes)}
        return all(uf.union(pos[a], pos[b]) for a, b, _ in self.edges)

    def is_chain(self) -> bool:
        deg = self.degree()
        if len(self.nodes) < 2:
            return len(self.nodes) == 1
        return (
            self.is_spanning_tree()
            and max(deg.values()) <= 2
            and sum(1 for v in deg.values() if v == 1) == 2
        )

    def path(self, source: str, target: str) -> list[tuple[str, str, float]]:
        """Edges ``(u, v, w)`` along the unique path from source to target."""
        adj = self.adjacency()
        if source not in adj or target not in adj:
            raise KeyError(source if source not in adj else target)
        prev = {source: None}
        queue = deque([source])
        while queue:
            u = queue.popleft()
            if u == target:
                break
            for v, w in adj[u]:
                if v not in prev:
                    prev[v] = (u, w)
                    queue.append(v)
        if target not in prev:
            raise InputError(f"no path between {source} and {target}: tree is disconnected")
        out = []
        node = target
        while prev[node] is not None:
            u, w = prev[node]
            out.append((u, node, w))
            node = u
        return out[::-1]

    def chain_order(self) -> list[str]:
        """Node sequence of a chain, starting at the smaller-coded endpoint."""
        if not self.is_chain():
            raise InputError("tree is not a chain")
        if len(self.nodes) == 1:
            return list(self.nodes)
        adj = self.adjacency()
        start = min(n for n, nb in adj.items() if len(nb) == 1)
        order, prev = [start], None
        while len(order) < len(self.nodes):
            nxt = next(v for v, _ in adj[order[-1]] if v != prev)
            prev = order[-1]
            order.append(nxt)
        return order

    def to_json(self) -> str:
        doc = {
            "kind": self.kind,
            "nodes": list(self.nodes),
            "edges": [{"i": a, "j": b, "w": w} for a, b, w in self.edges],
        }
        return json.dumps(doc, indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "HierarchyTree":
        doc = json.loads(text)
        return cls(doc["nodes"], [(e["i"], e["j"], e["w"]) for e in doc["edges"]], doc["kind"])


@dataclass(frozen=True, eq=False)
class UltrametricMatrix:
    entities: tuple[str, ...]
    d: np.ndarray

    def __getitem__(self, pair) -> float:
        a, b = pair
        return float(self.d[self.entities.index(a), self.entities.index(b)])


@dataclass(frozen=True)
class ClusterPartition:
    threshold: float
    clusters: tuple[tuple[str, ...], ...]

    def __len__(self):
        return len(self.clusters)


def build_mst(m: DistanceMatrix) -> HierarchyTree:
    """Minimum spanning tree by Kruskal's rule.

    Pairs are scanned by increasing distance and kept unless they would
    close a loop.
    """
    if m.n < 2:
        raise InputError("MST needs at least 2 entities")
    pos = {e: i for i, e in enumerate(m.entities)}
    uf = UnionFind(m.n)
    edges = []
    for w, a, b in m.sorted_pairs():
        if uf.union(pos[a], pos[b]):
            edges.append((a, b, w))
            if len(edges) == m.n - 1:
                break
    return HierarchyTree(m.entities, edges, "mst")


def subdominant_ultrametric(t: HierarchyTree) -> UltrametricMatrix:
    """Max edge weight on the tree path between every pair of nodes."""
    if not t.is_spanning_tree():
        raise InputError("subdominant ultrametric needs a connected spanning tree")
    n = len(t.nodes)
    pos = {e: i for i, e in enumerate(t.nodes)}
    adj = t.adjacency()
    out = np.zeros((n, n))
    for src in t.nodes:
        best = {src: 0.0}
        queue = deque([src])
        while queue:
            u = queue.popleft()
            for v, w in adj[u]:
                if v not in best:
                    best[v] = max(best[u], w)
                    queue.append(v)
        for v, val in best.items():
            out[pos[src], pos[v]] = val
    return UltrametricMatrix(t.nodes, out)


def threshold_clusters(t: HierarchyTree, d_star: float) -> ClusterPartition:
    """Connected pieces left after cutting every edge heavier than ``d_star``."""
    pos = {e: i for i, e in enumerate(t.nodes)}
    uf = UnionFind(len(t.nodes))
    for a, b, w in t.edges:
        if w <= d_star:
            uf.union(pos[a], pos[b])
    groups: dict[int, list[str]] = {}
    for node in t.nodes:
        groups.setdefault(uf.find(pos[node]), []).append(node)
    return ClusterPartition(float(d_star), tuple(tuple(g) for g in groups.values()))


def _nearest(m, sources, pool):
    """Smallest-key edge from any node in ``sources`` to any node in ``pool``."""
    best = None
    for s in sources:
        i = m.index(s)
        for u in pool:
            key = _edge_key(float(m.d[i, m.index(u)]), s, u)
            if best is None or key < best[0]:
                best = (key, s, u)
    return best


def build_lmst(m: DistanceMatrix) -> HierarchyTree:
    """Prim-style tree seeded at the strongest-correlated (closest) pair."""
    if m.n < 2:
        raise InputError("LMST needs at least 2 entities")
    w, a, b = m.sorted_pairs()[0]
    attached = [a, b]
    edges = [(a, b, w)]
    pool = [e for e in m.entities if e not in (a, b)]
    while pool:
        key, s, u = _nearest(m, attached, pool)
        edges.append((s, u, key[0]))
        attached.append(u)
        pool.remove(u)
    return HierarchyTree(m.entities, edges, "lmst")


def build_chain(m: DistanceMatrix, mode: str = "bidirectional", root: str = "min-pair") -> HierarchyTree:
    """Nearest-neighbour chain (UMLP or BMLP).

    Parameters
    ----------
    mode : {"unidirectional", "bidirectional"}
        Unidirectional chains grow only from their tail. Bidirectional chains
        attach the next entity at whichever end is closer.
    root : entity code or "min-pair"
        Starting node. ``"min-pair"`` starts from the closest pair (for a
        unidirectional chain, at its smaller-coded member). A named root in
        bidirectional mode is seeded with its nearest neighbour.
    """
    if mode not in ("unidirectional", "bidirectional"):
        raise InputError(f"unknown chain mode {mode!r}")
    if m.n < 2:
        raise InputError("chain needs at least 2 entities")
    if root != "min-pair" and root not in m.entities:
        raise InputError(f"unknown root entity {root!r}")

    if root == "min-pair":
        w, a, b = m.sorted_pairs()[0]
        if mode == "unidirectional":
            seq, edges = [a], []
        else:
            seq, edges = [a, b], [(a, b, w)]
    elif mode == "unidirectional":
        seq, edges = [root], []
    else:
        key, _, u = _nearest(m, [root], [e for e in m.entities if e != root])
        seq, edges = [root, u], [(root, u, key[0])]

    pool = [e for e in m.entities if e not in seq]
    while pool:
        ends = [seq[-1]] if mode == "unidirectional" else [seq[0], seq[-1]]
        key, end, u = _nearest(m, ends, pool)
        edges.append((end, u, key[0]))
        if end == seq[-1]:
            seq.append(u)
        else:
            seq.insert(0, u)
        pool.remove(u)
    kind = "umlp-chain" if mode == "unidirectional" else "bmlp-chain"
    return HierarchyTree(m.entities, edges, kind)


def export_dot(t: HierarchyTree, name: str | None = None) -> str:
    """Graphviz DOT text; edge labels carry weights at 3 decimals."""
    graph = (name or t.kind).replace("-", "_")
    lines = [f"graph {graph} {{"]
    for node in t.nodes:
        lines.append(f'  "{node}";')
    for a, b, w in t.edges:
        lines.append(f'  "{a}" -- "{b}" [label="{w:.3f}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
