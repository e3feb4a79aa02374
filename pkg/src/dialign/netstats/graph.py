"""Undirected weighted graphs, Jaccard overlap networks and Louvain community detection."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from ..errors import ValidationError


@dataclass
class Graph:
    """Undirected weighted graph over labelled nodes, without self-loops."""

    nodes: list[str] = field(default_factory=list)
    edges: dict[tuple[str, str], float] = field(default_factory=dict)

    def __post_init__(self):
        self._pos = {n: i for i, n in enumerate(self.nodes)}
        if len(self._pos) != len(self.nodes):
            raise ValidationError("duplicate node labels")

    def _key(self, u: str, v: str) -> tuple[str, str]:
        return (u, v) if self._pos[u] < self._pos[v] else (v, u)

    def add_node(self, node: str) -> None:
        if node not in self._pos:
            self._pos[node] = len(self.nodes)
            self.nodes.append(node)

    def add_edge(self, u: str, v: str, weight: float = 1.0) -> None:
        if u == v:
            raise ValidationError(f"self-loop on {u!r}")
        if not math.isfinite(weight):
            raise ValidationError(f"non-finite weight on ({u!r}, {v!r})")
        self.add_node(u)
        self.add_node(v)
        self.edges[self._key(u, v)] = float(weight)

    def has_edge(self, u: str, v: str) -> bool:
        return u in self._pos and v in self._pos and u != v and self._key(u, v) in self.edges

    def weight(self, u: str, v: str) -> float:
        return self.edges.get(self._key(u, v), 0.0)

    @property
    def total_weight(self) -> float:
        return math.fsum(self.edges.values())

    def adjacency(self) -> np.ndarray:
        a = np.zeros((len(self.nodes), len(self.nodes)))
        for (u, v), w in self.edges.items():
            i, j = self._pos[u], self._pos[v]
            a[i, j] = a[j, i] = w
        return a

    def components(self) -> list[list[str]]:
        """Connected components, each in node order, listed by first node."""
        parent = list(range(len(self.nodes)))

        def find(i):
            while parent[i] != i:
                parent[i] = parent[parent[i]]
                i = parent[i]
            return i

        for u, v in self.edges:
            a, b = find(self._pos[u]), find(self._pos[v])
            if a != b:
                parent[max(a, b)] = min(a, b)
        groups: dict[int, list[str]] = {}
        for i, n in enumerate(self.nodes):
            groups.setdefault(find(i), []).append(n)
        return list(groups.values())

    def sorted_edges(self) -> list[tuple[str, str, float]]:
        return sorted(((u, v, w) for (u, v), w in self.edges.items()),
                      key=lambda e: (self._pos[e[0]], self._pos[e[1]]))


def jaccard(a: Iterable, b: Iterable) -> float:
    """|A & B| / |A | B|; two empty sets give 0 by convention."""
    a, b = set(a), set(b)
    union = len(a | b)
    return len(a & b) / union if union else 0.0


def overlap_graph(user_sets: Mapping[str, Iterable[str]], threshold: float) -> Graph:
    """Communities as nodes, Jaccard similarity of their user sets as edge weights (kept when >= threshold)."""
    if len(user_sets) < 2:
        raise ValidationError("need at least two communities")
    names = sorted(user_sets)
    sets = {n: set(user_sets[n]) for n in names}
    g = Graph(list(names))
    for i, u in enumerate(names):
        for v in names[i + 1:]:
            w = jaccard(sets[u], sets[v])
            if w >= threshold and w > 0:
                g.add_edge(u, v, w)
    return g


def community_user_sets(units: Iterable, drop_moderators: bool = True) -> dict[str, set[str]]:
    """Community -> set of authors who posted or commented there."""
    out: dict[str, set[str]] = {}
    for u in units:
        if drop_moderators and getattr(u, "distinguished", None) == "moderator":
            continue
        out.setdefault(u.community, set()).add(u.author)
    return out


def cross_posters(user_sets: Mapping[str, Iterable[str]], min_communities: int = 2) -> set[str]:
    """Users present in at least ``min_communities`` communities."""
    seen: dict[str, int] = {}
    for users in user_sets.values():
        for user in set(users):
            seen[user] = seen.get(user, 0) + 1
    return {u for u, c in seen.items() if c >= min_communities}


# --- modularity and Louvain -------------------------------------------------

def _arrays(graph: Graph) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    idx = {n: i for i, n in enumerate(graph.nodes)}
    edges = graph.sorted_edges()
    src = np.array([idx[u] for u, _, _ in edges], dtype=np.int64)
    dst = np.array([idx[v] for _, v, _ in edges], dtype=np.int64)
    w = np.array([w for _, _, w in edges], dtype=np.float64)
    return src, dst, w


def _modularity(n: int, src, dst, w, loops: np.ndarray, labels: np.ndarray, resolution: float = 1.0) -> float:
    m2 = 2 * w.sum() + 2 * loops.sum()  # self-loop weight counts twice in degree
    if m2 == 0:
        return 0.0
    k = loops * 2
    k = k + np.bincount(src, w, n) + np.bincount(dst, w, n)
    n_comm = labels.max() + 1
    same = labels[src] == labels[dst]
    internal = np.bincount(labels[src[same]], 2 * w[same], n_comm) + np.bincount(labels, 2 * loops, n_comm)
    tot = np.bincount(labels, k, n_comm)
    return float(np.sum(internal / m2 - resolution * (tot / m2) ** 2))


def modularity(graph: Graph, partition: Mapping[str, int]) -> float:
    """Q = sum over communities of (e_cc - a_c^2) with weighted edges."""
    src, dst, w = _arrays(graph)
    labels = np.array([partition[n] for n in graph.nodes], dtype=np.int64)
    _, labels = np.unique(labels, return_inverse=True)
    return _modularity(len(graph.nodes), src, dst, w, np.zeros(len(graph.nodes)), labels)


@dataclass(frozen=True)
class Partition:
    membership: dict[str, int]
    modularity: float
    history: tuple[float, ...]  # modularity after each accepted level

    @property
    def communities(self) -> list[list[str]]:
        out: dict[int, list[str]] = {}
        for node, c in self.membership.items():
            out.setdefault(c, []).append(node)
        return [out[c] for c in sorted(out)]

    @property
    def n_communities(self) -> int:
        return len(set(self.membership.values()))


def _one_level(n: int, src, dst, w, loops, order: np.ndarray, resolution: float) -> np.ndarray:
    """Local moving phase: greedily move nodes to the neighbouring community with best gain."""
    nbrs: list[dict[int, float]] = [dict() for _ in range(n)]
    for a, b, x in zip(src, dst, w):
        nbrs[a][b] = nbrs[a].get(b, 0.0) + x
        nbrs[b][a] = nbrs[b].get(a, 0.0) + x
    k = 2 * loops + np.bincount(src, w, n) + np.bincount(dst, w, n)
    m2 = k.sum()
    labels = np.arange(n)
    tot = k.copy()
    improved = True
    while improved:
        improved = False
        for i in order:
            ci = labels[i]
            links: dict[int, float] = {}
            for j, x in nbrs[i].items():
                links[labels[j]] = links.get(labels[j], 0.0) + x
            tot[ci] -= k[i]
            # gain of joining c (relative to staying isolated): k_i,in - tot_c * k_i / m
            best_c, best_gain = ci, links.get(ci, 0.0) - resolution * tot[ci] * k[i] / m2
            for c in sorted(links):
                gain = links[c] - resolution * tot[c] * k[i] / m2
                if gain > best_gain + 1e-12:
                    best_c, best_gain = c, gain
            tot[best_c] += k[i]
            if best_c != ci:
                labels[i] = best_c
                improved = True
    _, labels = np.unique(labels, return_inverse=True)
    return labels


def louvain(graph: Graph, seed: int = 0, resolution: float = 1.0) -> Partition:
    """Two-phase Louvain: local moves, then aggregation, repeated until no gain.

    Node visiting order is a seeded permutation, so results are deterministic.
    An edgeless graph yields singletons with Q = 0.
    """
    n0 = len(graph.nodes)
    src, dst, w = _arrays(graph)
    loops = np.zeros(n0)
    node_labels = np.arange(n0)
    rng = np.random.default_rng(seed)
    q = _modularity(n0, src, dst, w, loops, node_labels, resolution)
    history = [q]
    n = n0
    while len(w) and n > 1:
        labels = _one_level(n, src, dst, w, loops, rng.permutation(n), resolution)
        n_new = int(labels.max()) + 1
        if n_new == n:
            break
        new_node_labels = labels[node_labels]
        q_new = _modularity(n0, *_arrays(graph), np.zeros(n0), new_node_labels, resolution)
        if q_new <= q + 1e-12:
            break
        node_labels, q = new_node_labels, q_new
        history.append(q)
        # aggregate: communities become nodes, internal weight becomes self-loops
        a, b = labels[src], labels[dst]
        new_loops = np.bincount(labels, loops, n_new) + np.bincount(a[a == b], w[a == b], n_new)
        keep = a != b
        lo, hi = np.minimum(a[keep], b[keep]), np.maximum(a[keep], b[keep])
        pair = lo * n_new + hi
        uniq, inv = np.unique(pair, return_inverse=True)
        src, dst = uniq // n_new, uniq % n_new
        w = np.bincount(inv, w[keep], len(uniq))
        loops, n = new_loops, n_new
    # relabel by first appearance in node order
    remap: dict[int, int] = {}
    membership = {}
    for node, lab in zip(graph.nodes, node_labels):
        membership[node] = remap.setdefault(int(lab), len(remap))
    return Partition(membership, q, tuple(history))


def write_edges_csv(graph: Graph, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(["src", "dst", "weight"])
        for u, v, w in graph.sorted_edges():
            out.writerow([u, v, f"{w:.6f}"])


def write_partition_csv(partition: Partition, path, nodes: Sequence[str] | None = None) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(["node", "community"])
        for node in nodes or list(partition.membership):
            out.writerow([node, partition.membership[node]])
