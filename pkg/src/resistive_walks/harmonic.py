"""Dirichlet problems on finite networks and their exhaustion limits.

Voltages are plain numpy arrays over vertex ids.  A solved potential
matches its boundary values exactly and is harmonic on every free vertex:
``sum_y p(x, y) f(y) = f(x)`` within the requested tolerance.  Uniqueness
of that solution is what lets any solver back the same contract.

Limit quantities (resistance to infinity, Green function, hitting
probabilities) are computed on exhaustions supplied by a
:class:`~resistive_walks.generators.GraphGenerator`, stopping when two
successive values agree within ``tol``.  Spherically symmetric generators
dispatch to O(n) per-level ladder sums instead of linear solves.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import (
    BudgetExceededWithoutConvergence,
    EmptyBoundary,
    EmptyTarget,
    NotTransient,
    SolverDivergence,
    VertexInTarget,
)
from .generators import GraphGenerator, InvalidRadius, exhaustion
from .network import Network

__all__ = [
    "BoundarySpec",
    "EffectiveQuantities",
    "LimitResult",
    "Transience",
    "solve_dirichlet",
    "harmonic_residual",
    "ohm_current",
    "effective",
    "resistance_to_infinity",
    "classify_transience",
    "green_function",
    "hitting_probability",
]

# free-vertex count up to which a sparse direct factorization is used;
# beyond it conjugate gradients on the weighted Laplacian takes over
DIRECT_LIMIT = 50_000


@dataclass(frozen=True)
class BoundarySpec:
    """Prescribed voltages; every unclamped vertex is free (harmonic)."""

    clamped: dict[int, float]

    def to_json(self) -> dict:
        return {"clamped": {str(k): float(v) for k, v in self.clamped.items()}}

    @classmethod
    def from_json(cls, doc: dict) -> "BoundarySpec":
        return cls({int(k): float(v) for k, v in doc["clamped"].items()})


@dataclass(frozen=True)
class EffectiveQuantities:
    conductance: float
    resistance: float
    escape_probability: float


@dataclass(frozen=True)
class LimitResult:
    value: float
    converged: bool
    n_used: int


class Transience(enum.Enum):
    TRANSIENT = "transient"
    RECURRENT_HEURISTIC = "recurrent-heuristic"
    INCONCLUSIVE = "inconclusive"


def harmonic_residual(net: Network, values: np.ndarray, free: np.ndarray) -> float:
    """Max |sum_y p(x, y) f(y) - f(x)| over the given free vertices."""
    if len(free) == 0:
        return 0.0
    lap = net.laplacian()
    res = lap @ values
    return float(np.max(np.abs(res[free]) / net.pi[free]))


def solve_dirichlet(
    net: Network,
    bc: BoundarySpec,
    tol: float = 1e-9,
    x0: np.ndarray | None = None,
    method: str = "auto",
) -> np.ndarray:
    """Solve the Dirichlet problem; returns the voltage vector.

    ``method`` is "auto", "direct" or "cg"; the choice is internal to the
    contract, both paths must leave a harmonic residual below ``tol``.
    ``x0`` seeds the iterative path (ignored by the direct one).
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if not bc.clamped:
        raise EmptyBoundary("no clamped vertices")
    for x in bc.clamped:
        net._check_vertex(x)

    n = net.vertex_count
    values = np.zeros(n)
    clamped_idx = np.fromiter(bc.clamped, dtype=np.int64)
    clamped_val = np.fromiter((bc.clamped[int(i)] for i in clamped_idx), dtype=float)
    values[clamped_idx] = clamped_val
    mask = np.ones(n, dtype=bool)
    mask[clamped_idx] = False
    free = np.flatnonzero(mask)
    if len(free) == 0:
        return values

    lap = net.laplacian().tocsr()
    l_ff = lap[free][:, free]
    rhs = -(lap[free][:, clamped_idx] @ clamped_val)

    if method == "auto":
        method = "direct" if len(free) <= DIRECT_LIMIT else "cg"
    if method == "direct":
        values[free] = spla.splu(l_ff.tocsc()).solve(rhs)
    elif method == "cg":
        scale = float(np.max(np.abs(rhs))) or 1.0
        guess = None if x0 is None else np.asarray(x0, dtype=float)[free]
        sol, info = spla.cg(
            l_ff,
            rhs,
            x0=guess,
            rtol=min(tol, 1e-8) / scale * float(np.min(net.pi[free])),
            maxiter=10 * len(free) + 100,
            M=sp.diags(1.0 / l_ff.diagonal()),
        )
        if info > 0:
            raise SolverDivergence(f"cg hit the iteration cap (info={info})")
        values[free] = sol
    else:
        raise ValueError(f"unknown method {method!r}")

    resid = harmonic_residual(net, values, free)
    if resid > tol:
        raise SolverDivergence(f"harmonic residual {resid:.3e} exceeds tol {tol:.3e}")
    return values


def ohm_current(net: Network, values: np.ndarray) -> np.ndarray:
    """Current i(e) = c(e) (v(tail) - v(head)) on each forward edge."""
    return net.edge_c * (values[net.edge_u] - values[net.edge_v])


def effective(net: Network, a: int, z, tol: float = 1e-9) -> EffectiveQuantities:
    """Effective conductance/resistance between a and the grounded set z.

    Solves with v(a) = 1, v|z = 0; the conductance is the total current
    leaving a, and the escape probability C / pi(a) is the chance the walk
    from a reaches z before returning to a.
    """
    z = frozenset(int(x) for x in z)
    if not z:
        raise EmptyTarget("empty target set")
    if a in z:
        raise VertexInTarget(f"source {a} lies in the target set")
    bc = BoundarySpec({int(a): 1.0, **{x: 0.0 for x in z}})
    values = solve_dirichlet(net, bc, tol=tol)
    nbrs = net.neighbors(a)
    cs = net.edge_c[net.incident_edges(a)]
    conductance = float(np.sum(cs * (1.0 - values[nbrs])))
    return EffectiveQuantities(
        conductance=conductance,
        resistance=1.0 / conductance,
        escape_probability=conductance / float(net.pi[a]),
    )


def _shell_resistances(gen: GraphGenerator, n: int) -> np.ndarray:
    return np.array([1.0 / gen.shell_conductance(k) for k in range(n + 1)])


def _exhaustion_resistance(gen: GraphGenerator, n: int, tol: float) -> float:
    """R(root <-> z_n) on the radius-n exhaustion."""
    if gen.spherically_symmetric:
        return float(np.sum(_shell_resistances(gen, n)))
    net, z = exhaustion(gen, n)
    return effective(net, gen.root, {z}, tol=tol).resistance


def resistance_to_infinity(
    gen: GraphGenerator, n_max: int = 64, tol: float = 1e-6
) -> LimitResult:
    """Limit of R(root <-> z_n) over exhaustions of increasing radius.

    Declares convergence when two successive values differ by less than
    ``tol``; otherwise returns the best estimate with ``converged=False``.
    R_n is nondecreasing in n (Rayleigh monotonicity), so a diverging
    sequence simply never converges.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    prev = None
    r = np.nan
    for n in range(n_max + 1):
        try:
            r = _exhaustion_resistance(gen, n, tol)
        except InvalidRadius:
            # finite graph fully exhausted; no further change possible
            return LimitResult(value=prev if prev is not None else r, converged=False, n_used=n)
        if prev is not None and abs(r - prev) < tol:
            return LimitResult(value=r, converged=True, n_used=n)
        prev = r
    return LimitResult(value=r, converged=False, n_used=n_max)


def classify_transience(
    gen: GraphGenerator, n_max: int = 64, eps: float = 1e-3
) -> Transience:
    """Heuristic transience verdict from the conductance-to-infinity trend.

    Transient when C_n stabilizes strictly above ``eps``; recurrent
    (heuristically -- finite data cannot certify a zero limit) when C_n
    drops below ``eps``; inconclusive otherwise.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    prev = None
    for n in range(n_max + 1):
        try:
            c = 1.0 / _exhaustion_resistance(gen, n, tol=min(eps, 1e-6))
        except InvalidRadius:
            break
        if c < eps:
            return Transience.RECURRENT_HEURISTIC
        if prev is not None and abs(c - prev) < eps * c:
            return Transience.TRANSIENT
        prev = c
    return Transience.INCONCLUSIVE


def _unit_current_voltage(
    gen: GraphGenerator, x: int, n: int, tol: float
) -> tuple[float, float, float]:
    """(v_n(x), v_n(root), pi(x)) for the unit current flow on exhaustion n."""
    if gen.spherically_symmetric:
        rs = _shell_resistances(gen, n)
        d = gen.depth_of(x)
        return float(rs[d:].sum()), float(rs.sum()), gen.depth_weight(d)
    net, z = exhaustion(gen, n)
    values = solve_dirichlet(net, BoundarySpec({gen.root: 1.0, z: 0.0}), tol=tol)
    nbrs = net.neighbors(gen.root)
    cs = net.edge_c[net.incident_edges(gen.root)]
    r_eff = 1.0 / float(np.sum(cs * (1.0 - values[nbrs])))
    return float(values[x]) * r_eff, r_eff, float(net.pi[x])


def _limit(gen, x, n_max, tol, quantity, check_transient=True):
    if check_transient:
        verdict = classify_transience(gen, n_max=max(n_max, 32))
        if verdict is not Transience.TRANSIENT:
            raise NotTransient(f"transience verdict: {verdict.value}")
    prev = None
    start = gen.depth_of(x) + 1
    for n in range(start, max(n_max, start) + 1):
        vx, va, pi_x = _unit_current_voltage(gen, x, n, tol)
        val = quantity(vx, va, pi_x)
        if prev is not None and abs(val - prev) < tol:
            return val
        prev = val
    raise BudgetExceededWithoutConvergence(
        f"no convergence within n_max={n_max} (last value {prev})"
    )


def green_function(
    gen: GraphGenerator, x: int, n_max: int = 80, tol: float = 1e-8
) -> float:
    """Expected number of visits to x for the walk from the root: pi(x) v(x)."""
    return _limit(gen, x, n_max, tol, lambda vx, va, pi_x: pi_x * vx)


def hitting_probability(
    gen: GraphGenerator, x: int, n_max: int = 80, tol: float = 1e-8
) -> float:
    """P_x(hit the root eventually) = lim v_n(x) / v_n(root); 1 when x is the root."""
    if x == gen.root:
        return 1.0
    return _limit(gen, x, n_max, tol, lambda vx, va, pi_x: vx / va)
