"""Discrete calculus on oriented edges: d, d*, flows, energy, Kirchhoff.

An edge function is a numpy array aligned with the network's edge order,
holding the value on the forward orientation ``u -> v`` (tail ``u``, head
``v``); the reverse orientation reads the negation, so antisymmetry is
structural.  Inner products follow the half-sum-over-orientations
convention, which equals a single sum over undirected edges -- every
formula below uses the undirected form to avoid factor-of-2 bugs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse.linalg as spla

from .errors import NotAFlow, OverlappingSets
from .network import Network

__all__ = [
    "apply_d",
    "apply_d_star",
    "chi",
    "inner_r",
    "energy",
    "strength",
    "FlowReport",
    "validate_flow",
    "decompose_star_cycle",
    "KirchhoffReport",
    "verify_kirchhoff",
    "thomson_gap",
    "adjointness_residual",
    "current_flow",
]


def apply_d(net: Network, f: np.ndarray) -> np.ndarray:
    """Coboundary dF(e) = F(tail) - F(head); kills constants."""
    return np.asarray(f, dtype=float)[net.edge_u] - np.asarray(f, dtype=float)[net.edge_v]


def apply_d_star(net: Network, theta: np.ndarray) -> np.ndarray:
    """Divergence d*theta(x) = sum of theta over edges with tail x."""
    theta = np.asarray(theta, dtype=float)
    div = np.zeros(net.vertex_count)
    np.add.at(div, net.edge_u, theta)
    np.add.at(div, net.edge_v, -theta)
    return div


def chi(net: Network, x: int, y: int) -> np.ndarray:
    """Unit flow along the oriented edge x -> y."""
    theta = np.zeros(net.edge_count)
    for k in net.incident_edges(x):
        if net.edge_u[k] == x and net.edge_v[k] == y:
            theta[k] = 1.0
            return theta
        if net.edge_v[k] == x and net.edge_u[k] == y:
            theta[k] = -1.0
            return theta
    from .errors import NotAdjacent

    raise NotAdjacent(f"{x} and {y} are not neighbors")


def inner_r(net: Network, theta1: np.ndarray, theta2: np.ndarray) -> float:
    """(theta1, theta2)_r = sum over undirected edges of theta1 theta2 / c."""
    return float(np.sum(theta1 * theta2 / net.edge_c))


def energy(net: Network, theta: np.ndarray) -> float:
    """Dirichlet energy sum of theta(e)^2 r(e); zero iff theta vanishes."""
    return inner_r(net, theta, theta)


def strength(net: Network, theta: np.ndarray, a) -> float:
    """Total divergence over the source set; equals minus the sink total."""
    div = apply_d_star(net, theta)
    return float(sum(div[int(x)] for x in a))


@dataclass(frozen=True)
class FlowReport:
    ok: bool
    violations: list


def validate_flow(net: Network, theta, a, z, tol: float = 1e-12) -> FlowReport:
    """Check the flow sign conditions: d* > 0 on a, < 0 on z, = 0 elsewhere."""
    a = frozenset(int(x) for x in a)
    z = frozenset(int(x) for x in z)
    if a & z:
        raise OverlappingSets(f"source and sink overlap: {sorted(a & z)}")
    div = apply_d_star(net, theta)
    violations = []
    for x in range(net.vertex_count):
        if x in a:
            if div[x] <= 0:
                violations.append((x, "source divergence not positive", div[x]))
        elif x in z:
            if div[x] >= 0:
                violations.append((x, "sink divergence not negative", div[x]))
        elif abs(div[x]) > tol:
            violations.append((x, "interior divergence nonzero", div[x]))
    return FlowReport(ok=not violations, violations=violations)


def _grounded_solve(net: Network, b: np.ndarray) -> np.ndarray:
    """Solve L f = b with the gauge f(0) = 0 (b must sum to zero)."""
    lap = net.laplacian().tocsc()
    f = np.zeros(net.vertex_count)
    f[1:] = spla.splu(lap[1:, 1:]).solve(b[1:])
    return f


def current_flow(net: Network, div: np.ndarray) -> np.ndarray:
    """The unique current (star-space) flow with the prescribed divergence."""
    f = _grounded_solve(net, np.asarray(div, dtype=float))
    return net.edge_c * apply_d(net, f)


def decompose_star_cycle(net: Network, theta: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Split theta into its r-orthogonal star and cycle components.

    The star part is the current flow with the same divergence as theta
    (a weighted-Laplacian solve); the cycle part is the circulation left
    over.  They recombine to theta and are r-orthogonal.
    """
    star = current_flow(net, apply_d_star(net, theta))
    return star, np.asarray(theta, dtype=float) - star


def _spanning_tree(net: Network) -> tuple[np.ndarray, np.ndarray]:
    """(tree_mask over edges, parent_signed_path_sum helper order).

    BFS from vertex 0; returns a boolean mask of tree edges and the BFS
    order of vertices with their parent edge ids.
    """
    n = net.vertex_count
    parent_edge = np.full(n, -1, dtype=np.int64)
    seen = np.zeros(n, dtype=bool)
    seen[0] = True
    order = [0]
    frontier = [0]
    while frontier:
        nxt = []
        for x in frontier:
            lo, hi = net.adj_indptr[x], net.adj_indptr[x + 1]
            for y, e in zip(net.adj_neighbor[lo:hi], net.adj_edge[lo:hi]):
                if not seen[y]:
                    seen[y] = True
                    parent_edge[y] = e
                    order.append(int(y))
                    nxt.append(int(y))
        frontier = nxt
    mask = np.zeros(net.edge_count, dtype=bool)
    mask[parent_edge[parent_edge >= 0]] = True
    return mask, parent_edge


def _tree_path_sums(net: Network, weights: np.ndarray, parent_edge: np.ndarray) -> np.ndarray:
    """S(x) = signed sum of ``weights`` along the tree path root -> x."""
    n = net.vertex_count
    s = np.full(n, np.nan)
    s[0] = 0.0
    pending = [x for x in range(n) if parent_edge[x] >= 0]
    # resolve parents before children; repeat passes until settled
    while pending:
        rest = []
        for x in pending:
            e = parent_edge[x]
            u, v = int(net.edge_u[e]), int(net.edge_v[e])
            p = v if u == x else u
            if np.isnan(s[p]):
                rest.append(x)
                continue
            sign = 1.0 if u == p else -1.0  # forward orientation traversed p -> x
            s[x] = s[p] + sign * weights[e]
        pending = rest
    return s


@dataclass(frozen=True)
class KirchhoffReport:
    node_residual: float
    cycle_residual: float


def verify_kirchhoff(net: Network, current: np.ndarray, exempt=()) -> KirchhoffReport:
    """Max node-law residual off the exempt (battery) vertices and max
    cycle-law residual over a fundamental cycle basis."""
    exempt = frozenset(int(x) for x in exempt)
    div = apply_d_star(net, current)
    free = [x for x in range(net.vertex_count) if x not in exempt]
    node = float(np.max(np.abs(div[free]))) if free else 0.0

    mask, parent_edge = _spanning_tree(net)
    drops = np.asarray(current, dtype=float) / net.edge_c  # theta * r edgewise
    s = _tree_path_sums(net, drops, parent_edge)
    cycle = 0.0
    for e in np.flatnonzero(~mask):
        u, v = int(net.edge_u[e]), int(net.edge_v[e])
        cycle = max(cycle, abs(drops[e] + s[u] - s[v]))
    return KirchhoffReport(node_residual=node, cycle_residual=cycle)


def thomson_gap(net: Network, theta: np.ndarray, a, z, check: bool = True) -> float:
    """Energy excess of theta over the current flow with the same divergence.

    Always >= 0 up to round-off: the current flow is the energy minimizer
    among flows sharing its divergence, and the gap equals the energy of
    theta's cycle component.
    """
    if check:
        report = validate_flow(net, theta, a, z, tol=1e-9)
        if not report.ok:
            raise NotAFlow(f"not a flow from {sorted(a)} to {sorted(z)}: {report.violations[:5]}")
    i = current_flow(net, apply_d_star(net, theta))
    return energy(net, theta) - energy(net, i)


def adjointness_residual(net: Network, theta: np.ndarray, f: np.ndarray) -> float:
    """|(theta, dF) - (d* theta, F)|; vanishes for all inputs."""
    lhs = float(np.sum(np.asarray(theta, dtype=float) * apply_d(net, f)))
    rhs = float(np.dot(apply_d_star(net, theta), np.asarray(f, dtype=float)))
    return abs(lhs - rhs)
