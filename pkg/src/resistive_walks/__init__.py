"""Reversible Markov chains as electric networks.

Exact harmonic (Dirichlet) solving on finite weighted graphs, discrete
flow calculus with energy minimization checks, closed forms for the
simple random walk on the homogeneous tree, and a seeded Monte Carlo
walker -- cross-validated three ways (closed form / solver / simulation).
"""

from . import errors
from .flows import (
    adjointness_residual,
    apply_d,
    apply_d_star,
    chi,
    current_flow,
    decompose_star_cycle,
    energy,
    inner_r,
    strength,
    thomson_gap,
    validate_flow,
    verify_kirchhoff,
)
from .generators import FiniteBallGenerator, GraphGenerator, HalfLineGenerator, exhaustion
from .harmonic import (
    BoundarySpec,
    EffectiveQuantities,
    LimitResult,
    Transience,
    classify_transience,
    effective,
    green_function,
    harmonic_residual,
    hitting_probability,
    ohm_current,
    resistance_to_infinity,
    solve_dirichlet,
)
from .network import (
    Edge,
    MarkovView,
    Network,
    build_network,
    contract_vertices,
    markov_view,
    network_from_json,
    network_to_json,
    series_parallel_reduce,
    vertex_weight,
)
from .tree import (
    TreeGenerator,
    TreeNetwork,
    TreeSpec,
    build_tree,
    finite_tree_pair_resistance,
    first_at_depth,
    ladder_resistance,
    level_slice,
    oracle_finite_escape,
    oracle_green_hitting,
    oracle_potential_current,
    oracle_resistance,
    oracle_table,
    tree_distance,
    tree_vertex_count,
)
from .verify import RunReport, run_battery
from .walks import (
    WalkConfig,
    WalkStats,
    estimate_escape,
    estimate_green,
    estimate_hitting,
    estimate_transitions,
    run_walks,
)

__version__ = "0.1.0"
