"""Truncated homogeneous trees and their closed-form quantities.

Every vertex of the infinite homogeneous tree of degree ``q + 1`` carries
unit-conductance edges; the simple random walk on it is the attached
reversible chain.  This module builds finite truncations (optionally with
the outside world contracted to a single vertex ``z``), provides the
closed forms for resistance, voltage, current, Green function, hitting
probabilities and escape probabilities as pure arithmetic, and the O(n)
level-ladder reduction that exploits spherical symmetry.

Vertex labeling is breadth-first: root 0, then level 1 in parent order,
and so on, so ids are stable as the truncation grows.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidCase, InvalidQ, InvalidSpec, SameVertex
from .generators import GraphGenerator
from .network import Network, _assemble

__all__ = [
    "TreeSpec",
    "TreeNetwork",
    "TreeGenerator",
    "tree_vertex_count",
    "build_tree",
    "level_slice",
    "first_at_depth",
    "oracle_resistance",
    "oracle_potential_current",
    "oracle_green_hitting",
    "oracle_finite_escape",
    "ladder_resistance",
    "finite_tree_pair_resistance",
    "tree_distance",
    "oracle_table",
]


@dataclass(frozen=True)
class TreeSpec:
    """Parameters of a truncated homogeneous tree of degree q + 1."""

    q: int
    levels: int
    contract_boundary: bool = False

    def __post_init__(self):
        if self.q < 2:
            raise InvalidSpec(f"q must be >= 2, got {self.q}")
        if self.levels < 0:
            raise InvalidSpec(f"levels must be >= 0, got {self.levels}")


@dataclass(frozen=True)
class TreeNetwork:
    net: Network
    spec: TreeSpec
    depth_of: np.ndarray
    parent_of: np.ndarray
    z: int | None


def tree_vertex_count(q: int, levels: int) -> int:
    """1 + (q+1)(q^levels - 1)/(q - 1) vertices in the uncontracted tree."""
    return 1 + (q + 1) * (q**levels - 1) // (q - 1)


def _level_starts(q: int, levels: int) -> np.ndarray:
    """Index of the first vertex of each level 0..levels (BFS labeling)."""
    sizes = [1] + [(q + 1) * q ** (k - 1) for k in range(1, levels + 1)]
    return np.concatenate([[0], np.cumsum(sizes)])


def _tree_edges(q: int, levels: int) -> tuple[np.ndarray, np.ndarray]:
    """(parent, child) arrays for all edges of the uncontracted tree."""
    starts = _level_starts(q, levels)
    parents = [np.zeros(0, dtype=np.int64)]
    children = [np.zeros(0, dtype=np.int64)]
    for k in range(1, levels + 1):
        kids = np.arange(starts[k], starts[k + 1], dtype=np.int64)
        if k == 1:
            par = np.zeros(len(kids), dtype=np.int64)
        else:
            par = starts[k - 1] + (kids - starts[k]) // q
        parents.append(par)
        children.append(kids)
    return np.concatenate(parents), np.concatenate(children)


def build_tree(spec: TreeSpec) -> TreeNetwork:
    """Materialize the truncation described by ``spec``.

    With ``contract_boundary`` the whole level-(levels+1)-and-beyond
    structure is a single vertex ``z`` (last id); each deepest explicit
    vertex then carries one merged edge of conductance q to ``z`` (the
    root's q + 1 edges merge when levels == 0).
    """
    q, n = spec.q, spec.levels
    starts = _level_starts(q, n)
    count = tree_vertex_count(q, n)
    pu, pv = _tree_edges(q, n)
    depth = np.zeros(count, dtype=np.int64)
    for k in range(1, n + 1):
        depth[starts[k] : starts[k + 1]] = k
    parent = np.full(count, -1, dtype=np.int64)
    parent[pv] = pu

    if spec.contract_boundary:
        z = count
        last = np.arange(starts[n], starts[n + 1], dtype=np.int64)
        u = np.concatenate([pu, last])
        v = np.concatenate([pv, np.full(len(last), z, dtype=np.int64)])
        c = np.concatenate([np.ones(len(pu)), np.full(len(last), float(q))])
        if n == 0:
            u, v, c = np.array([0]), np.array([z]), np.array([float(q + 1)])
        net = _assemble(u, v, c, count + 1, check_connected=False)
        depth = np.append(depth, n + 1)
        parent = np.append(parent, -1)
        return TreeNetwork(net=net, spec=spec, depth_of=depth, parent_of=parent, z=z)

    if n == 0:
        raise InvalidSpec("an uncontracted 0-level tree has no edges")
    net = _assemble(pu, pv, np.ones(len(pu)), count, check_connected=False)
    return TreeNetwork(net=net, spec=spec, depth_of=depth, parent_of=parent, z=None)


def level_slice(tree: TreeNetwork, k: int) -> np.ndarray:
    """Vertex ids of level k of the truncation."""
    starts = _level_starts(tree.spec.q, tree.spec.levels)
    if not 0 <= k <= tree.spec.levels:
        raise InvalidSpec(f"level {k} outside 0..{tree.spec.levels}")
    return np.arange(starts[k], starts[k + 1], dtype=np.int64)


def first_at_depth(q: int, d: int) -> int:
    """Smallest BFS id at depth d (a leftmost-branch vertex)."""
    return 0 if d == 0 else int(_level_starts(q, d)[d])


def tree_distance(tree: TreeNetwork, a: int, x: int) -> int:
    """Graph distance via the unique geodesic (lowest common ancestor)."""
    da, dx = int(tree.depth_of[a]), int(tree.depth_of[x])
    dist = 0
    while da > dx:
        a, da, dist = int(tree.parent_of[a]), da - 1, dist + 1
    while dx > da:
        x, dx, dist = int(tree.parent_of[x]), dx - 1, dist + 1
    while a != x:
        a, x = int(tree.parent_of[a]), int(tree.parent_of[x])
        dist += 2
    return dist


class TreeGenerator(GraphGenerator):
    """The infinite homogeneous tree as a level-indexed generator.

    ``symmetric=False`` disables the ladder fast path so the generic
    exhaustion-plus-solver route can be exercised on the same graph.
    """

    def __init__(self, q: int, symmetric: bool = True):
        if q < 2:
            raise InvalidQ(f"q must be >= 2, got {q}")
        self.q = q
        self.spherically_symmetric = symmetric

    def ball_size(self, n: int) -> int:
        return tree_vertex_count(self.q, n)

    def ball_edges(self, n: int):
        pu, pv = _tree_edges(self.q, n + 1)
        return pu, pv, np.ones(len(pu))

    def depth_of(self, x: int) -> int:
        if x == 0:
            return 0
        d = 1
        while tree_vertex_count(self.q, d) <= x:
            d += 1
        return d

    def shell_conductance(self, k: int) -> float:
        return float((self.q + 1) * self.q**k)

    def depth_weight(self, d: int) -> float:
        return float(self.q + 1)


def oracle_resistance(q: int, n=None) -> float:
    """R(root <-> level-n set): n-term geometric series; None means infinity.

    Finite n gives (1/(q+1)) (1 - q^-n)/(1 - 1/q); the limit is q/(q^2-1).
    """
    if q < 2:
        raise InvalidQ(f"q must be >= 2, got {q}")
    if n is None or n == float("inf"):
        return q / (q**2 - 1)
    if n < 1:
        raise InvalidQ(f"n must be >= 1, got {n}")
    return (1.0 / (q + 1)) * (1.0 - q ** (-float(n))) / (1.0 - 1.0 / q)


def oracle_potential_current(q: int, depth: int) -> tuple[float, float]:
    """(v, i) of the unit current from the root, at distance ``depth``.

    v(x) = (q/(q^2-1)) q^-|x|; the current toward any single child is
    (1/(q+1)) q^-|x| (toward the parent it is the negation one level up).
    """
    if q < 2:
        raise InvalidQ(f"q must be >= 2, got {q}")
    v = q / (q**2 - 1) * q ** (-float(depth))
    i_down = 1.0 / (q + 1) * q ** (-float(depth))
    return v, i_down


def oracle_green_hitting(q: int, d: int) -> tuple[float, float, float]:
    """(green, hitting, transitions) at distance d from the start.

    G = (q/(q-1)) q^-d visits; hitting probability q^-d; expected
    transitions of an oriented edge (x, y) with d = d(start, x):
    (q/(q^2-1)) q^-d.
    """
    if q < 2:
        raise InvalidQ(f"q must be >= 2, got {q}")
    green = q / (q - 1) * q ** (-float(d))
    hitting = q ** (-float(d))
    transitions = q / (q**2 - 1) * q ** (-float(d))
    return green, hitting, transitions


def oracle_finite_escape(case: str, q: int, n: int | None = None, dist: int | None = None) -> float:
    """Escape probabilities on finite truncations, by case:

    a: root to the full level-n set: q^(n-1)(q-1)/(q^n - 1)
    b: level-n leaf to everything outside its root branch: 1/n
    c: as b but with deeper levels below a: 1/(n(q+1))
    d: terminal vertex a to a single vertex at distance dist: 1/dist
    e: non-terminal a to a single vertex at distance dist: 1/(dist(q+1))
    """
    if q < 2:
        raise InvalidQ(f"q must be >= 2, got {q}")
    if case == "a":
        return q ** (n - 1) * (q - 1) / (q**n - 1)
    if case == "b":
        return 1.0 / n
    if case == "c":
        return 1.0 / (n * (q + 1))
    if case == "d":
        return 1.0 / dist
    if case == "e":
        return 1.0 / (dist * (q + 1))
    raise InvalidCase(f"case must be one of a..e, got {case!r}")


def ladder_resistance(q: int, n: int) -> float:
    """R(root <-> level-n set) by explicit level-wise series/parallel collapse.

    The parallel edges between consecutive levels merge to conductances
    q+1, q(q+1), q^2(q+1), ...; the series sum of their reciprocals is the
    resistance.  O(n) arithmetic; agrees with :func:`oracle_resistance`.
    """
    if q < 2:
        raise InvalidQ(f"q must be >= 2, got {q}")
    if n < 1:
        raise InvalidQ(f"n must be >= 1, got {n}")
    total = 0.0
    shell = float(q + 1)
    for _ in range(n):
        total += 1.0 / shell
        shell *= q
    return total


def finite_tree_pair_resistance(tree: TreeNetwork, a: int, x: int) -> float:
    """Effective resistance between two vertices of an uncontracted tree.

    Equals the graph distance: no current leaves the geodesic, so the
    path's unit resistors add in series.
    """
    if tree.z is not None:
        raise InvalidSpec("pair resistance oracle needs an uncontracted tree")
    if a == x:
        raise SameVertex(f"identical vertices {a}")
    return float(tree_distance(tree, a, x))


def oracle_table(q: int, max_depth: int) -> list[dict]:
    """Closed-form rows (depth, v, i_down, green, hitting, transitions)."""
    rows = []
    for d in range(max_depth + 1):
        v, i_down = oracle_potential_current(q, d)
        green, hitting, transitions = oracle_green_hitting(q, d)
        rows.append(
            {
                "q": q,
                "depth": d,
                "voltage": v,
                "current_down": i_down,
                "green": green,
                "hitting": hitting,
                "transitions": transitions,
            }
        )
    return rows
