"""Planar leafed trees with their collapse order, and metric ribbon trees with widths.

A leafed tree is a nested tuple: a leaf is its integer label, an internal vertex is
the tuple of its children in planar (anticlockwise) order. The root edge sits below
the outermost tuple. Vertices are addressed by the path of child indices from the root.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

Node = Union[int, tuple]
Path = Tuple[int, ...]


# leafed trees


def is_leaf(node: Node) -> bool:
    return isinstance(node, int)


def leaves(node: Node) -> List[int]:
    if is_leaf(node):
        return [node]
    return [x for c in node for x in leaves(c)]


def n_leaves(node: Node) -> int:
    return len(leaves(node))


def encode(node: Node) -> str:
    if is_leaf(node):
        return str(node)
    return "(" + ",".join(encode(c) for c in node) + ")"


def _relabel(node: Node, counter: List[int]) -> Node:
    if is_leaf(node):
        counter[0] += 1
        return counter[0]
    return tuple(_relabel(c, counter) for c in node)


def canonical(node: Node) -> Node:
    """Leaves renumbered 1..d in planar order."""
    return _relabel(node, [0])


def vertices(node: Node, path: Path = ()) -> List[Path]:
    """Paths of internal vertices in preorder."""
    if is_leaf(node):
        return []
    out = [path]
    for i, c in enumerate(node):
        out.extend(vertices(c, path + (i,)))
    return out


def subtree_at(node: Node, path: Path) -> Node:
    for i in path:
        node = node[i]
    return node


def valence(node: Node, path: Path) -> int:
    return len(subtree_at(node, path)) + 1


def is_stable(node: Node) -> bool:
    return not is_leaf(node) and all(valence(node, p) >= 3 for p in vertices(node))


def interior_edges(node: Node) -> List[Path]:
    """An interior edge is named by the path of its upper internal vertex."""
    return [p for p in vertices(node) if p]


def flags(node: Node) -> List[Tuple[Path, int]]:
    """Flags (v, i): i = 0 is the edge towards the root, i >= 1 the i-th child edge."""
    return [(p, i) for p in vertices(node) for i in range(valence(node, p))]


def corolla(d: int) -> Node:
    if d < 2:
        raise ValueError("need at least two leaves")
    return tuple(range(1, d + 1))


def _compositions(n: int, k: int):
    if k == 1:
        yield (n,)
        return
    for first in range(1, n - k + 2):
        for rest in _compositions(n - first, k - 1):
            yield (first,) + rest


def _shapes(d: int) -> List[Node]:
    if d == 1:
        return [0]
    out = []
    for k in range(2, d + 1):
        for comp in _compositions(d, k):
            for kids in itertools.product(*[_shapes(c) for c in comp]):
                out.append(tuple(kids))
    return out


def enumerate_stable(d: int) -> List[Node]:
    """All stable planar trees with d leaves, sorted by their encoding."""
    if d < 2:
        raise ValueError("need at least two leaves")
    trees = {encode(canonical(s)): canonical(s) for s in _shapes(d)}
    return [trees[k] for k in sorted(trees)]


def collapse(node: Node, edges: Iterable[Path]) -> Node:
    edges = set(edges)
    bad = edges - set(interior_edges(node))
    if bad:
        raise ValueError(f"not interior edges: {sorted(bad)}")

    def go(n, path):
        if is_leaf(n):
            return n
        kids = []
        for i, c in enumerate(n):
            sub = go(c, path + (i,))
            if not is_leaf(c) and path + (i,) in edges:
                kids.extend(sub)
            else:
                kids.append(sub)
        return tuple(kids)

    return go(node, ())


def collapses(node: Node) -> Dict[str, Node]:
    """Every tree obtained by collapsing a subset of interior edges, keyed by encoding."""
    ie = interior_edges(node)
    out = {}
    for r in range(len(ie) + 1):
        for sub in itertools.combinations(ie, r):
            t = collapse(node, sub)
            out[encode(t)] = t
    return out


def leq(t1: Node, t2: Node) -> bool:
    """t1 <= t2 when t2 is a collapse of t1 (the corolla is the final object)."""
    if leaves(t1) != leaves(t2):
        return False
    return encode(t2) in collapses(t1)


def poset_failures(trees: Sequence[Node]) -> List[str]:
    probs = []
    enc = [encode(t) for t in trees]
    up = {e: set(collapses(t)) for e, t in zip(enc, trees)}
    for a in enc:
        if a not in up[a]:
            probs.append(f"not reflexive at {a}")
        for b in enc:
            if a != b and b in up[a] and a in up[b]:
                probs.append(f"not antisymmetric at {a}, {b}")
            if b in up[a]:
                for c in up[b]:
                    if c not in up[a]:
                        probs.append(f"not transitive at {a} <= {b} <= {c}")
    return probs


def boundary_regions(node: Node) -> Dict[Tuple[Path, int], Tuple[int, int]]:
    """For each flag, the two boundary regions o_j, o_k on either side of its edge.

    With leaves 1..d in planar order, o_j lies between leaf j and leaf j+1 and
    the root edge separates o_0 from o_d.
    """
    pos = {x: i + 1 for i, x in enumerate(leaves(node))}
    out = {}

    def span(n):
        ls = leaves(n)
        return pos[ls[0]] - 1, pos[ls[-1]]

    for p in vertices(node):
        v = subtree_at(node, p)
        out[(p, 0)] = span(v)
        for i, c in enumerate(v):
            out[(p, i + 1)] = span(c)
    return out


# metric ribbon trees


@dataclass
class MetricRibbonTree:
    """Finite tree with positive edge lengths; ``boundary`` lists the exterior vertices o_0, ..., o_d."""

    n_vertices: int
    edges: List[Tuple[int, int, float]]
    boundary: List[int]

    def __post_init__(self):
        adj: Dict[int, List[Tuple[int, float]]] = {v: [] for v in range(self.n_vertices)}
        for u, v, w in self.edges:
            if w <= 0:
                raise ValueError("edge lengths must be positive")
            adj[u].append((v, w))
            adj[v].append((u, w))
        if len(self.edges) != self.n_vertices - 1:
            raise ValueError("not a tree")
        self.adj = adj
        for v in range(self.n_vertices):
            deg = len(adj[v])
            if deg == 2:
                raise ValueError("vertex of valence 2")
            if (deg == 1) != (v in self.boundary):
                raise ValueError("boundary must be exactly the valence 1 vertices")

    def distances_from(self, s: int) -> Dict[int, float]:
        dist = {s: 0.0}
        stack = [s]
        while stack:
            u = stack.pop()
            for v, w in self.adj[u]:
                if v not in dist:
                    dist[v] = dist[u] + w
                    stack.append(v)
        if len(dist) != self.n_vertices:
            raise ValueError("tree is disconnected")
        return dist

    def dist(self, u: int, v: int) -> float:
        return self.distances_from(u)[v]

    def boundary_distance(self, j: int, k: int) -> float:
        return self.dist(self.boundary[j], self.boundary[k])

    def path(self, u: int, v: int) -> List[int]:
        parent = {u: None}
        stack = [u]
        while stack:
            x = stack.pop()
            for y, _ in self.adj[x]:
                if y not in parent:
                    parent[y] = x
                    stack.append(y)
        out = [v]
        while out[-1] != u:
            out.append(parent[out[-1]])
        return out[::-1]


def star_tree(n: int) -> MetricRibbonTree:
    """n exterior vertices at distance pi/2 from a single center."""
    if n < 3:
        raise ValueError("need at least three exterior vertices")
    return MetricRibbonTree(n + 1, [(0, i, math.pi / 2) for i in range(1, n + 1)], list(range(1, n + 1)))


def chain_tree(groups: Sequence[int], gaps: Sequence[float]) -> MetricRibbonTree:
    """Centers v_1, ..., v_n on a path with d(v_k, v_{k+1}) = gaps[k]; group k hangs off v_k at pi/2.

    Zero gaps merge neighbouring centers.
    """
    if len(gaps) != len(groups) - 1:
        raise ValueError("need one gap between consecutive groups")
    merged: List[int] = [groups[0]]
    lens: List[float] = []
    for g, r in zip(groups[1:], gaps):
        if r < 0:
            raise ValueError("negative gap")
        if r == 0:
            merged[-1] += g
        else:
            merged.append(g)
            lens.append(float(r))
    centers = list(range(len(merged)))
    nxt = len(merged)
    edges = [(centers[i], centers[i + 1], lens[i]) for i in range(len(lens))]
    boundary = []
    for c, g in zip(centers, merged):
        for _ in range(g):
            edges.append((c, nxt, math.pi / 2))
            boundary.append(nxt)
            nxt += 1
    return MetricRibbonTree(nxt, edges, boundary)


def two_group_tree(d1: int, d2: int, r: float) -> MetricRibbonTree:
    return chain_tree([d1, d2], [r])


def boundary_widths(t: Node, m: MetricRibbonTree) -> Dict[Tuple[Path, int], float]:
    """w(f) = d(o_j, o_k) / pi for the regions o_j, o_k adjacent to each flag f."""
    d = n_leaves(t)
    if len(m.boundary) != d + 1:
        raise ValueError(f"tree has {d} leaves but the metric tree has {len(m.boundary)} boundary points")
    return {f: m.boundary_distance(j, k) / math.pi for f, (j, k) in boundary_regions(t).items()}


def metric_embed(m: MetricRibbonTree) -> np.ndarray:
    n = len(m.boundary)
    out = []
    for i in range(n):
        dist = m.distances_from(m.boundary[i])
        for j in range(i + 1, n):
            out.append(dist[m.boundary[j]])
    return np.array(out)


def eps_close(m1: MetricRibbonTree, m2: MetricRibbonTree, eps: float) -> bool:
    e1, e2 = metric_embed(m1), metric_embed(m2)
    if e1.shape != e2.shape:
        return False
    return float(np.linalg.norm(e1 - e2)) < eps


def four_point_ok(m: MetricRibbonTree, tol: float = 1e-9) -> bool:
    """The two largest of the three pair sums agree for every quadruple of boundary points."""
    pts = m.boundary
    dist = {p: m.distances_from(p) for p in pts}
    for a, b, c, d in itertools.combinations(pts, 4):
        s = sorted([dist[a][b] + dist[c][d], dist[a][c] + dist[b][d], dist[a][d] + dist[b][c]])
        if abs(s[2] - s[1]) > tol:
            return False
    return True


def subtree(m: MetricRibbonTree, a: Sequence[int]) -> MetricRibbonTree:
    """Convex hull of the boundary points with indices in a, with valence 2 vertices smoothed out."""
    a = sorted(set(a))
    if len(a) < 2:
        raise ValueError("need at least two boundary points")
    pts = [m.boundary[i] for i in a]
    used_edges = set()
    for p, q in itertools.combinations(pts, 2):
        path = m.path(p, q)
        for u, v in zip(path, path[1:]):
            used_edges.add((min(u, v), max(u, v)))
    length = {(min(u, v), max(u, v)): w for u, v, w in m.edges}
    adj: Dict[int, Dict[int, float]] = {}
    for u, v in used_edges:
        adj.setdefault(u, {})[v] = length[(u, v)]
        adj.setdefault(v, {})[u] = length[(u, v)]
    # smooth valence 2 vertices
    changed = True
    while changed:
        changed = False
        for x in list(adj):
            if len(adj[x]) == 2:
                (u, wu), (v, wv) = adj[x].items()
                del adj[u][x], adj[v][x], adj[x]
                adj[u][v] = wu + wv
                adj[v][u] = wu + wv
                changed = True
                break
    if len(pts) == 2:
        # a single segment
        return _segment(m.dist(pts[0], pts[1]))
    ids = {x: i for i, x in enumerate(sorted(adj))}
    edges = [(ids[u], ids[v], w) for u in adj for v, w in adj[u].items() if u < v]
    return MetricRibbonTree(len(ids), edges, [ids[p] for p in pts])


def _segment(length: float) -> MetricRibbonTree:
    return MetricRibbonTree(2, [(0, 1, length)], [0, 1])


def isometric(m1: MetricRibbonTree, m2: MetricRibbonTree, tol: float = 1e-9) -> bool:
    """Same ordered boundary distance matrix (a tree metric determines the tree)."""
    e1, e2 = metric_embed(m1), metric_embed(m2)
    return e1.shape == e2.shape and bool(np.all(np.abs(e1 - e2) <= tol))


def tree_to_json(node: Node):
    return node if is_leaf(node) else [tree_to_json(c) for c in node]


def tree_from_json(obj) -> Node:
    return obj if isinstance(obj, int) else tuple(tree_from_json(c) for c in obj)


def pretty(node: Node, indent: str = "") -> str:
    if is_leaf(node):
        return f"{indent}leaf {node}"
    lines = [f"{indent}vertex (valence {len(node) + 1})"]
    for c in node:
        lines.append(pretty(c, indent + "  "))
    return "\n".join(lines)
