"""Level-indexed graph generators and exhaustion by balls.

An infinite (or just large) locally finite graph is described by a
generator that can produce, for any radius ``n``, every edge incident to
the ball of radius ``n`` around the root.  The generator's own labeling
must be dense by radius: ids ``0 .. |B_n|-1`` are the ball, ids beyond are
the frontier at distance ``n + 1``.  :func:`exhaustion` contracts the
frontier to a single vertex ``z`` (self-loops discarded, parallel edges
merged), producing the finite network used for limits of effective
quantities.

Spherically symmetric generators additionally expose per-level totals so
that limit computations can collapse to O(n) ladder arithmetic.
"""

from __future__ import annotations

from abc import ABC, abstractmethod

import numpy as np

from .errors import InvalidRadius
from .network import Network, _assemble

__all__ = ["GraphGenerator", "HalfLineGenerator", "FiniteBallGenerator", "exhaustion"]


class GraphGenerator(ABC):
    """Supplies a locally finite graph by radius around a fixed root (id 0)."""

    root: int = 0
    #: True when every vertex at the same depth is equivalent under a
    #: root-fixing automorphism; enables the ladder fast path.
    spherically_symmetric: bool = False

    @abstractmethod
    def ball_size(self, n: int) -> int:
        """Number of vertices within distance n of the root."""

    @abstractmethod
    def ball_edges(self, n: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(u, v, c) arrays of all edges with an endpoint at depth <= n."""

    @abstractmethod
    def depth_of(self, x: int) -> int:
        """Distance from the root to vertex x in the generator's labeling."""

    # hooks used only when spherically_symmetric
    def shell_conductance(self, k: int) -> float:
        """Total conductance between depth k and depth k + 1."""
        raise NotImplementedError

    def depth_weight(self, d: int) -> float:
        """pi(x) for any vertex x at depth d in the full graph."""
        raise NotImplementedError


def exhaustion(gen: GraphGenerator, n: int) -> tuple[Network, int]:
    """Ball of radius n with everything outside contracted to z.

    Returns ``(net, z)``; the generator's ids ``0 .. ball_size(n)-1`` carry
    over unchanged and ``z = ball_size(n)``.
    """
    if n < 0:
        raise InvalidRadius(f"radius must be >= 0, got {n}")
    interior = gen.ball_size(n)
    u, v, c = gen.ball_edges(n)
    u = np.minimum(u, interior)
    v = np.minimum(v, interior)
    if not np.any((u == interior) | (v == interior)):
        raise InvalidRadius(f"ball of radius {n} already covers the whole graph")
    return _assemble(u, v, np.asarray(c, dtype=float), interior + 1), interior


class HalfLineGenerator(GraphGenerator):
    """Half-line 0 - 1 - 2 - ... of unit resistors (the recurrent prototype)."""

    spherically_symmetric = True

    def ball_size(self, n: int) -> int:
        return n + 1

    def ball_edges(self, n: int):
        u = np.arange(n + 1, dtype=np.int64)
        return u, u + 1, np.ones(n + 1)

    def depth_of(self, x: int) -> int:
        return int(x)

    def shell_conductance(self, k: int) -> float:
        return 1.0

    def depth_weight(self, d: int) -> float:
        return 1.0 if d == 0 else 2.0


class FiniteBallGenerator(GraphGenerator):
    """Adapter presenting a finite Network as a generator.

    Vertices are relabeled breadth-first from ``root`` so ids are dense by
    radius; for ``n`` past the eccentricity of the root the ball is the
    whole graph and exhaustions stop changing.  Mainly for exercising the
    generic (non-symmetric) limit route on arbitrary graphs.
    """

    def __init__(self, net: Network, root: int = 0):
        from scipy.sparse.csgraph import dijkstra

        dist = dijkstra(net.conductance_matrix() != 0, unweighted=True, indices=root)
        order = np.argsort(dist, kind="stable")
        self._new_id = np.empty(net.vertex_count, dtype=np.int64)
        self._new_id[order] = np.arange(net.vertex_count)
        self._depth = dist[order].astype(np.int64)
        self._u = self._new_id[net.edge_u]
        self._v = self._new_id[net.edge_v]
        self._c = net.edge_c
        self._edge_depth = np.minimum(self._depth[self._u], self._depth[self._v])
        self._net = net

    def ball_size(self, n: int) -> int:
        return int(np.searchsorted(self._depth, n, side="right"))

    def ball_edges(self, n: int):
        m = self._edge_depth <= n
        return self._u[m], self._v[m], self._c[m]

    def depth_of(self, x: int) -> int:
        return int(self._depth[x])
