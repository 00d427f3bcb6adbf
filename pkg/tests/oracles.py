"""Independent brute-force oracles used to freeze expected test values.

Everything here deliberately avoids the package's own solution paths:
absorbing-chain probabilities use dense transition-matrix algebra, and the
star/cycle projection is computed from an explicit fundamental cycle basis
via dense normal equations.
"""

from itertools import combinations

import numpy as np


def dense_transition_matrix(net) -> np.ndarray:
    n = net.vertex_count
    p = np.zeros((n, n))
    for u, v, c in zip(net.edge_u, net.edge_v, net.edge_c):
        p[u, v] = c / net.pi[u]
        p[v, u] = c / net.pi[v]
    return p


def absorbing_hit_probability(net, a: int, z) -> np.ndarray:
    """P_x(hit a before z) for every x, by dense linear algebra.

    Solves (I - Q) h = P[:, a] restricted to transient states, with a and
    z absorbing.
    """
    n = net.vertex_count
    p = dense_transition_matrix(net)
    z = set(int(x) for x in z)
    absorbed = z | {int(a)}
    trans = [x for x in range(n) if x not in absorbed]
    h = np.zeros(n)
    h[a] = 1.0
    if trans:
        q = p[np.ix_(trans, trans)]
        b = p[np.ix_(trans, [a])].ravel()
        h[trans] = np.linalg.solve(np.eye(len(trans)) - q, b)
    return h


def expected_visits(net, start: int, absorbing) -> np.ndarray:
    """E[number of times at x, times 0..absorption) with given absorbing set.

    Counts the time-0 state; the arrival at an absorbing state ends the
    walk (and is counted for that absorbing state only).
    """
    n = net.vertex_count
    p = dense_transition_matrix(net)
    absorbing = set(int(x) for x in absorbing)
    trans = [x for x in range(n) if x not in absorbing]
    g = np.zeros(n)
    if start in absorbing:
        g[start] = 1.0
        return g
    q = p[np.ix_(trans, trans)]
    fundamental = np.linalg.inv(np.eye(len(trans)) - q)
    row = fundamental[trans.index(start)]
    for j, x in enumerate(trans):
        g[x] = row[j]
    return g


def fundamental_cycle_matrix(net) -> np.ndarray:
    """Rows = fundamental cycles of a DFS spanning tree, as signed edge vectors."""
    n, m = net.vertex_count, net.edge_count
    adj = {x: [] for x in range(n)}
    for k, (u, v) in enumerate(zip(net.edge_u, net.edge_v)):
        adj[int(u)].append((int(v), k))
        adj[int(v)].append((int(u), k))
    parent = {0: (None, None)}
    stack = [0]
    order = []
    while stack:
        x = stack.pop()
        order.append(x)
        for y, k in adj[x]:
            if y not in parent:
                parent[y] = (x, k)
                stack.append(y)
    tree_edges = {k for (_, k) in parent.values() if k is not None}

    def path_vector(x):
        vec = np.zeros(m)
        while parent[x][0] is not None:
            p, k = parent[x]
            sign = 1.0 if net.edge_v[k] == x else -1.0  # traversed p -> x forward?
            vec[k] += sign
            x = p
        return vec

    rows = []
    for k in range(m):
        if k in tree_edges:
            continue
        u, v = int(net.edge_u[k]), int(net.edge_v[k])
        vec = path_vector(u) - path_vector(v)
        vec[k] += 1.0
        rows.append(vec)
    return np.array(rows).reshape(len(rows), m)


def project_cycle_space(net, theta: np.ndarray) -> np.ndarray:
    """r-orthogonal projection of theta onto the span of the cycle vectors."""
    basis = fundamental_cycle_matrix(net)
    if basis.shape[0] == 0:
        return np.zeros_like(theta)
    r = 1.0 / net.edge_c
    gram = basis @ np.diag(r) @ basis.T
    rhs = basis @ (r * theta)
    coeffs = np.linalg.solve(gram, rhs)
    return basis.T @ coeffs


def connected_unit_graphs(max_vertices: int):
    """All connected labeled graphs with unit conductances, 2..max_vertices."""
    from resistive_walks import build_network
    from resistive_walks.errors import DisconnectedGraph

    for n in range(2, max_vertices + 1):
        all_pairs = list(combinations(range(n), 2))
        for bits in range(1, 2 ** len(all_pairs)):
            edges = [
                (u, v, 1.0)
                for j, (u, v) in enumerate(all_pairs)
                if bits >> j & 1
            ]
            try:
                net = build_network(edges)
            except DisconnectedGraph:
                continue
            if net.vertex_count == n:
                yield net
