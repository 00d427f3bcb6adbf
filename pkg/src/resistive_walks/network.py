"""Weighted-graph data model and graph surgery.

A :class:`Network` is a finite connected graph with symmetric positive
conductances.  It doubles as a reversible Markov chain: the transition
probabilities are ``p(x, y) = c(x, y) / pi(x)`` with ``pi(x)`` the sum of
conductances incident to ``x``.  Networks are immutable after construction
and safe to share across threads.

Vertex ids are dense integers ``0 .. V-1``; arbitrary hashable labels given
at build time are remapped and retained in ``Network.labels``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

from .errors import (
    ComplementDisconnected,
    DisconnectedGraph,
    EmptyContractionSet,
    EmptyInput,
    InvalidVertex,
    NonpositiveConductance,
)

__all__ = [
    "Edge",
    "Network",
    "MarkovView",
    "build_network",
    "vertex_weight",
    "markov_view",
    "contract_vertices",
    "series_parallel_reduce",
    "network_to_json",
    "network_from_json",
]


class Edge(NamedTuple):
    u: int
    v: int
    c: float


@dataclass(frozen=True)
class Network:
    """Finite connected weighted graph with merged parallel edges.

    Edges are stored once per undirected pair with ``u < v``; the forward
    orientation of edge ``k`` is ``edge_u[k] -> edge_v[k]``.  The adjacency
    is CSR-style: the neighbors of ``x`` are
    ``adj_neighbor[adj_indptr[x]:adj_indptr[x+1]]`` and ``adj_edge`` holds
    the corresponding undirected edge indices.
    """

    vertex_count: int
    edge_u: np.ndarray
    edge_v: np.ndarray
    edge_c: np.ndarray
    adj_indptr: np.ndarray
    adj_neighbor: np.ndarray
    adj_edge: np.ndarray
    pi: np.ndarray
    labels: tuple = ()

    @property
    def edge_count(self) -> int:
        return len(self.edge_c)

    @property
    def edges(self) -> list[Edge]:
        return [
            Edge(int(u), int(v), float(c))
            for u, v, c in zip(self.edge_u, self.edge_v, self.edge_c)
        ]

    def degree(self, x: int) -> int:
        self._check_vertex(x)
        return int(self.adj_indptr[x + 1] - self.adj_indptr[x])

    def neighbors(self, x: int) -> np.ndarray:
        self._check_vertex(x)
        return self.adj_neighbor[self.adj_indptr[x] : self.adj_indptr[x + 1]]

    def incident_edges(self, x: int) -> np.ndarray:
        self._check_vertex(x)
        return self.adj_edge[self.adj_indptr[x] : self.adj_indptr[x + 1]]

    def index_of(self, label) -> int:
        """Dense id of an original label (identity when no labels kept)."""
        if not self.labels:
            return int(label)
        return self.labels.index(label)

    def conductance_matrix(self) -> sp.csr_matrix:
        """Symmetric sparse matrix C with C[x, y] = c(x, y)."""
        n = self.vertex_count
        data = np.concatenate([self.edge_c, self.edge_c])
        rows = np.concatenate([self.edge_u, self.edge_v])
        cols = np.concatenate([self.edge_v, self.edge_u])
        return sp.csr_matrix((data, (rows, cols)), shape=(n, n))

    def laplacian(self) -> sp.csr_matrix:
        """Weighted graph Laplacian L = diag(pi) - C."""
        c = self.conductance_matrix()
        return sp.diags(self.pi) - c

    def _check_vertex(self, x: int) -> None:
        if not 0 <= x < self.vertex_count:
            raise InvalidVertex(f"vertex {x} out of range 0..{self.vertex_count - 1}")


@dataclass(frozen=True)
class MarkovView:
    """Reversible Markov chain attached to a network.

    ``p`` is row-stochastic with ``p[x, y] = c(x, y) / pi(x)``; ``pi`` is
    the reversibility function ``pi(x) p(x, y) = pi(y) p(y, x)``.
    """

    pi: np.ndarray
    p: sp.csr_matrix


def _assemble(u: np.ndarray, v: np.ndarray, c: np.ndarray, vertex_count: int,
              labels: tuple = (), check_connected: bool = True) -> Network:
    """Build a Network from dense-id endpoint arrays.

    Merges parallel edges (conductances add), drops self-loops, builds the
    CSR adjacency and vertex weights.
    """
    keep = u != v
    u, v, c = u[keep], v[keep], c[keep]
    if len(u) == 0:
        raise EmptyInput("no edges remain after dropping self-loops")
    lo = np.minimum(u, v)
    hi = np.maximum(u, v)
    key = lo.astype(np.int64) * vertex_count + hi
    uniq, inv = np.unique(key, return_inverse=True)
    cm = np.bincount(inv, weights=c, minlength=len(uniq))
    eu = (uniq // vertex_count).astype(np.int64)
    ev = (uniq % vertex_count).astype(np.int64)

    ends = np.concatenate([eu, ev])
    other = np.concatenate([ev, eu])
    eidx = np.tile(np.arange(len(eu), dtype=np.int64), 2)
    order = np.argsort(ends, kind="stable")
    indptr = np.zeros(vertex_count + 1, dtype=np.int64)
    np.add.at(indptr, ends + 1, 1)
    indptr = np.cumsum(indptr)
    pi = np.zeros(vertex_count)
    np.add.at(pi, eu, cm)
    np.add.at(pi, ev, cm)

    if np.any(pi == 0):
        raise DisconnectedGraph("isolated vertex (zero weight)")
    if check_connected:
        adj = sp.csr_matrix(
            (np.ones(2 * len(eu)), (ends, other)), shape=(vertex_count, vertex_count)
        )
        ncomp, _ = connected_components(adj, directed=False)
        if ncomp != 1:
            raise DisconnectedGraph(f"{ncomp} components")

    return Network(
        vertex_count=vertex_count,
        edge_u=eu,
        edge_v=ev,
        edge_c=cm,
        adj_indptr=indptr,
        adj_neighbor=other[order],
        adj_edge=eidx[order],
        pi=pi,
        labels=labels,
    )


def build_network(edge_list: Iterable[tuple], check_connected: bool = True) -> Network:
    """Build a Network from ``(u, v, c)`` triples.

    Labels may be arbitrary hashable values; they are remapped to dense ids
    (sorted order for sortable labels) and kept in ``Network.labels``.
    Parallel edges merge by summing conductances; self-loops are dropped.
    """
    triples = list(edge_list)
    if not triples:
        raise EmptyInput("empty edge list")
    us = [t[0] for t in triples]
    vs = [t[1] for t in triples]
    cs = np.asarray([float(t[2]) for t in triples])
    if np.any(cs <= 0) or not np.all(np.isfinite(cs)):
        raise NonpositiveConductance("conductances must be positive and finite")

    raw = us + vs
    try:
        uniq_labels = sorted(set(raw))
    except TypeError:
        uniq_labels = list(dict.fromkeys(raw))
    remap = {lab: i for i, lab in enumerate(uniq_labels)}
    u = np.asarray([remap[x] for x in us], dtype=np.int64)
    v = np.asarray([remap[x] for x in vs], dtype=np.int64)

    already_dense = all(
        isinstance(lab, (int, np.integer)) and lab == i
        for i, lab in enumerate(uniq_labels)
    )
    labels = () if already_dense else tuple(uniq_labels)
    return _assemble(u, v, cs, len(uniq_labels), labels, check_connected)


def vertex_weight(net: Network, x: int) -> float:
    """pi(x): sum of conductances incident to x."""
    net._check_vertex(x)
    return float(net.pi[x])


def markov_view(net: Network) -> MarkovView:
    """Row-stochastic transition matrix and reversibility function."""
    c = net.conductance_matrix()
    inv_pi = sp.diags(1.0 / net.pi)
    return MarkovView(pi=net.pi.copy(), p=(inv_pi @ c).tocsr())


def contract_vertices(net: Network, s: Iterable[int]) -> tuple[Network, int]:
    """Identify all vertices of ``s`` as one new vertex ``z``.

    Edges internal to ``s`` become self-loops and are thrown away; parallel
    edges to ``z`` merge by summing conductances.  The complement keeps its
    relative order at ids ``0..k-1``; ``z`` gets id ``k``.  Returns the new
    network and the id of ``z``.
    """
    s = frozenset(int(x) for x in s)
    if not s:
        raise EmptyContractionSet("empty contraction set")
    for x in s:
        net._check_vertex(x)
    kept = [x for x in range(net.vertex_count) if x not in s]
    if not kept:
        raise ComplementDisconnected("contraction set covers all vertices")
    z = len(kept)
    mapping = np.full(net.vertex_count, z, dtype=np.int64)
    mapping[kept] = np.arange(z)
    if z > 1:
        inner = mapping[net.edge_u] < z
        inner &= mapping[net.edge_v] < z
        sub = sp.csr_matrix(
            (
                np.ones(int(inner.sum())),
                (mapping[net.edge_u[inner]], mapping[net.edge_v[inner]]),
            ),
            shape=(z, z),
        )
        ncomp, _ = connected_components(sub, directed=False)
        if ncomp != 1:
            raise ComplementDisconnected("complement of contraction set is disconnected")
    try:
        out = _assemble(
            mapping[net.edge_u], mapping[net.edge_v], net.edge_c.copy(), z + 1
        )
    except (EmptyInput, DisconnectedGraph) as exc:
        raise ComplementDisconnected(str(exc)) from exc
    return out, z


def series_parallel_reduce(net: Network, keep: Iterable[int]) -> Network:
    """Collapse series chains and parallel edges until a fixed point.

    Degree-2 vertices outside ``keep`` are eliminated by replacing their two
    edges (resistances r1, r2) with one of resistance r1 + r2; duplicate
    edges merge by summing conductances.  Non-series-parallel remainders are
    returned as-is.  ``Network.labels`` of the result holds the surviving
    original ids.
    """
    keep = frozenset(int(x) for x in keep)
    for x in keep:
        net._check_vertex(x)
    # dict-of-dicts conductance map; parallel edges already merged at build
    conn: dict[int, dict[int, float]] = {x: {} for x in range(net.vertex_count)}
    for u, v, c in zip(net.edge_u, net.edge_v, net.edge_c):
        conn[int(u)][int(v)] = float(c)
        conn[int(v)][int(u)] = float(c)

    changed = True
    while changed:
        changed = False
        for x in list(conn):
            if x in keep or len(conn[x]) != 2:
                continue
            (a, ca), (b, cb) = conn[x].items()
            if a == b:  # parallel pair collapsed into a loop at a
                continue
            c_new = 1.0 / (1.0 / ca + 1.0 / cb)
            del conn[a][x]
            del conn[b][x]
            del conn[x]
            conn[a][b] = conn[a].get(b, 0.0) + c_new
            conn[b][a] = conn[a][b]
            changed = True

    survivors = sorted(conn)
    remap = {lab: i for i, lab in enumerate(survivors)}
    triples = [
        (remap[x], remap[y], c)
        for x in survivors
        for y, c in conn[x].items()
        if x < y
    ]
    reduced = build_network(triples)
    return Network(
        **{
            **{f: getattr(reduced, f) for f in (
                "vertex_count", "edge_u", "edge_v", "edge_c",
                "adj_indptr", "adj_neighbor", "adj_edge", "pi",
            )},
            "labels": tuple(survivors),
        }
    )


def network_to_json(net: Network) -> dict:
    """JSON-serializable dict: {"vertices": V, "edges": [{"u","v","c"}], "labels"}."""
    doc = {
        "vertices": net.vertex_count,
        "edges": [
            {"u": int(u), "v": int(v), "c": float(c)}
            for u, v, c in zip(net.edge_u, net.edge_v, net.edge_c)
        ],
    }
    if net.labels:
        doc["labels"] = {str(i): lab for i, lab in enumerate(net.labels)}
    return doc


def network_from_json(doc: dict) -> Network:
    """Inverse of :func:`network_to_json`; rejects c <= 0 and bad ids."""
    n = int(doc["vertices"])
    triples = []
    for e in doc["edges"]:
        u, v, c = int(e["u"]), int(e["v"]), float(e["c"])
        if not (0 <= u < n and 0 <= v < n):
            raise InvalidVertex(f"edge endpoint out of range: {e}")
        triples.append((u, v, c))
    net = build_network(triples)
    if net.vertex_count != n:
        raise DisconnectedGraph("edge list does not cover all declared vertices")
    labels = doc.get("labels")
    if labels:
        lab = tuple(labels[str(i)] for i in range(n))
        net = Network(
            **{
                **{f: getattr(net, f) for f in (
                    "vertex_count", "edge_u", "edge_v", "edge_c",
                    "adj_indptr", "adj_neighbor", "adj_edge", "pi",
                )},
                "labels": lab,
            }
        )
    return net
