"""Seeded Monte Carlo engine for the network's random walk.

Walks step by the chain ``p(x, y) = c(x, y) / pi(x)`` until they enter an
absorbing vertex (at a step count >= ``min_absorb_step``) or run out of
``max_steps``.  The uniform variate consumed by walk ``w`` at step ``t``
is a pure function of ``(seed, w, t)`` via a counter-based splitmix hash,
so tallies are bit-identical across runs and independent of any worker
assignment; the engine itself steps all walks of a chunk in lockstep with
numpy.

Tally conventions (hitting time from step 0, return time from step 1):
visits are counted at every time ``0..T`` inclusive, where ``T`` is the
absorption or censoring time; transitions count the steps actually taken.
A walk started on an absorbing vertex is absorbed at time 0 unless
``min_absorb_step`` says otherwise (escape probabilities use 1, making
absorption at the start a *return*).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import cached_property

import numpy as np

from .errors import InvalidStart, NotAdjacent, VertexInTarget
from .network import Network

__all__ = [
    "WalkConfig",
    "WalkStats",
    "run_walks",
    "estimate_hitting",
    "estimate_green",
    "estimate_transitions",
    "estimate_escape",
]

_CHUNK = 8192
_PHI = np.uint64(0x9E3779B97F4A7C15)


def _mix(x: np.ndarray) -> np.ndarray:
    """splitmix64 finalizer, vectorized over uint64 arrays."""
    x = (x ^ (x >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    x = (x ^ (x >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return x ^ (x >> np.uint64(31))


def _uniforms(base: np.ndarray, step: int) -> np.ndarray:
    """One U[0, 1) per walk at the given step; base = per-walk key."""
    ctr = np.uint64((0x9E3779B97F4A7C15 * (step + 1)) & 0xFFFFFFFFFFFFFFFF)
    h = _mix(base ^ ctr)
    return (h >> np.uint64(11)).astype(np.float64) * (2.0**-53)


@dataclass(frozen=True)
class WalkConfig:
    seed: int
    num_walks: int
    start: int
    absorbing: tuple = ()
    max_steps: int = 1_000_000
    min_absorb_step: int = 0
    watch_vertices: tuple = ()
    watch_edges: tuple = ()
    track_visits: bool = False
    track_transitions: bool = False

    def __post_init__(self):
        if self.num_walks < 1:
            raise ValueError("num_walks must be >= 1")
        if self.max_steps < 1:
            raise ValueError("max_steps must be >= 1")
        if len(self.absorbing) == 0 and self.max_steps > 10_000_000:
            raise ValueError("absorbing may be empty only with a finite step budget")


@dataclass
class WalkStats:
    """Tallies of one batch of walks.

    ``absorbed_at[w]`` is the absorbing vertex that ended walk ``w`` (-1
    when censored at ``max_steps``); ``steps[w]`` the number of steps it
    took.  Watched vertices/edges carry per-walk counts so means come with
    standard errors.
    """

    config: WalkConfig
    absorbed_at: np.ndarray
    steps: np.ndarray
    watch_visit_counts: np.ndarray  # (num_walks, len(watch_vertices))
    watch_edge_counts: np.ndarray  # (num_walks, len(watch_edges))
    visits: np.ndarray | None = None
    transition_pairs: np.ndarray | None = None  # (k, 2) directed pairs
    transition_counts: np.ndarray | None = None

    @property
    def censored(self) -> int:
        return int(np.sum(self.absorbed_at < 0))

    @cached_property
    def hits(self) -> dict[int, int]:
        """Absorption counts per absorbing vertex actually reached."""
        done = self.absorbed_at[self.absorbed_at >= 0]
        uniq, counts = np.unique(done, return_counts=True)
        return {int(u): int(c) for u, c in zip(uniq, counts)}

    def hit_count(self, target: int) -> int:
        return self.hits.get(int(target), 0)

    def hit_fraction(self, target: int) -> tuple[float, float]:
        """(estimate, std_err) of the probability of being absorbed at target."""
        n = self.config.num_walks
        p = self.hit_count(target) / n
        return p, math.sqrt(p * (1.0 - p) / n)

    def _watched_mean(self, counts: np.ndarray) -> tuple[float, float]:
        n = self.config.num_walks
        mean = float(np.mean(counts))
        se = float(np.std(counts, ddof=1) / math.sqrt(n)) if n > 1 else float("inf")
        return mean, se

    def visit_estimate(self, x: int) -> tuple[float, float]:
        j = self.config.watch_vertices.index(x)
        return self._watched_mean(self.watch_visit_counts[:, j])

    def transition_estimate(self, x: int, y: int) -> tuple[float, float]:
        j = self.config.watch_edges.index((x, y))
        return self._watched_mean(self.watch_edge_counts[:, j])

    def transition_count(self, x: int, y: int) -> int:
        if self.transition_pairs is None:
            raise ValueError("run with track_transitions=True")
        m = (self.transition_pairs[:, 0] == x) & (self.transition_pairs[:, 1] == y)
        return int(self.transition_counts[m].sum())

    @property
    def edge_transitions(self) -> dict[tuple[int, int], int]:
        if self.transition_pairs is None:
            raise ValueError("run with track_transitions=True")
        return {
            (int(x), int(y)): int(c)
            for (x, y), c in zip(self.transition_pairs, self.transition_counts)
        }

    def to_json(self) -> dict:
        return {
            "seed": self.config.seed,
            "num_walks": self.config.num_walks,
            "start": self.config.start,
            "censored": self.censored,
            "hits": {str(k): v for k, v in sorted(self.hits.items())},
        }


def run_walks(net: Network, cfg: WalkConfig) -> WalkStats:
    """Simulate ``cfg.num_walks`` independent walks and tally them."""
    if not 0 <= cfg.start < net.vertex_count:
        raise InvalidStart(f"start vertex {cfg.start} out of range")

    n_walks = cfg.num_walks
    absorb_mask = np.zeros(net.vertex_count, dtype=bool)
    if len(cfg.absorbing) > 0:
        absorb_mask[np.asarray(list(cfg.absorbing), dtype=np.int64)] = True

    adj_c = net.edge_c[net.adj_edge]
    indptr, nbr = net.adj_indptr, net.adj_neighbor
    pi = net.pi
    seed_u = np.uint64(cfg.seed & 0xFFFFFFFFFFFFFFFF)

    watch_v = np.asarray(cfg.watch_vertices, dtype=np.int64)
    watch_e = np.asarray(cfg.watch_edges, dtype=np.int64).reshape(-1, 2)

    absorbed_at = np.full(n_walks, -1, dtype=np.int64)
    steps = np.zeros(n_walks, dtype=np.int64)
    wv_counts = np.zeros((n_walks, len(watch_v)), dtype=np.int64)
    we_counts = np.zeros((n_walks, len(watch_e)), dtype=np.int64)
    visits = np.zeros(net.vertex_count, dtype=np.int64) if cfg.track_visits else None
    trans_chunks: list[np.ndarray] = []

    for lo in range(0, n_walks, _CHUNK):
        hi = min(lo + _CHUNK, n_walks)
        size = hi - lo
        base = _mix(seed_u ^ (_PHI * (np.arange(lo, hi, dtype=np.uint64) + np.uint64(1))))
        cur = np.full(size, cfg.start, dtype=np.int64)
        slot = np.arange(lo, hi, dtype=np.int64)  # global walk index per row
        raw_pairs: list[np.ndarray] = []

        # time-0 tallies and possible immediate absorption
        if visits is not None:
            np.add.at(visits, cur, 1)
        for j, x in enumerate(watch_v):
            wv_counts[slot[cur == x], j] += 1
        if cfg.min_absorb_step == 0:
            done = absorb_mask[cur]
            absorbed_at[slot[done]] = cur[done]
            keep = ~done
            cur, base, slot = cur[keep], base[keep], slot[keep]

        t = 0
        while len(cur) > 0 and t < cfg.max_steps:
            u = _uniforms(base, t)
            r = u * pi[cur]
            ptr = indptr[cur].copy()
            last = indptr[cur + 1] - 1
            acc = adj_c[ptr]
            unresolved = (r >= acc) & (ptr < last)
            while np.any(unresolved):
                ptr[unresolved] += 1
                acc[unresolved] += adj_c[ptr[unresolved]]
                unresolved = (r >= acc) & (ptr < last)
            nxt = nbr[ptr]
            t += 1

            if len(watch_e) > 0:
                for j, (x, y) in enumerate(watch_e):
                    we_counts[slot[(cur == x) & (nxt == y)], j] += 1
            if cfg.track_transitions:
                raw_pairs.append(np.stack([cur, nxt], axis=1))
            if visits is not None:
                np.add.at(visits, nxt, 1)
            for j, x in enumerate(watch_v):
                wv_counts[slot[nxt == x], j] += 1

            cur = nxt
            if t >= cfg.min_absorb_step:
                done = absorb_mask[cur]
                if np.any(done):
                    absorbed_at[slot[done]] = cur[done]
                    steps[slot[done]] = t
                    keep = ~done
                    cur, base, slot = cur[keep], base[keep], slot[keep]

        steps[slot] = cfg.max_steps  # censored walks took the full budget
        if cfg.track_transitions and raw_pairs:
            allp = np.concatenate(raw_pairs)
            key = allp[:, 0] * net.vertex_count + allp[:, 1]
            uniq, counts = np.unique(key, return_counts=True)
            trans_chunks.append(np.stack(
                [uniq // net.vertex_count, uniq % net.vertex_count, counts], axis=1
            ))

    pairs = counts_out = None
    if cfg.track_transitions:
        if trans_chunks:
            allc = np.concatenate(trans_chunks)
            key = allc[:, 0] * net.vertex_count + allc[:, 1]
            uniq, inv = np.unique(key, return_inverse=True)
            tot = np.bincount(inv, weights=allc[:, 2]).astype(np.int64)
            pairs = np.stack([uniq // net.vertex_count, uniq % net.vertex_count], axis=1)
            counts_out = tot
        else:
            pairs = np.zeros((0, 2), dtype=np.int64)
            counts_out = np.zeros(0, dtype=np.int64)

    return WalkStats(
        config=cfg,
        absorbed_at=absorbed_at,
        steps=steps,
        watch_visit_counts=wv_counts,
        watch_edge_counts=we_counts,
        visits=visits,
        transition_pairs=pairs,
        transition_counts=counts_out,
    )


def estimate_hitting(net: Network, cfg: WalkConfig, target: int) -> tuple[float, float]:
    """Fraction of walks absorbed at ``target`` (hitting from step 0)."""
    if target not in cfg.absorbing:
        cfg = replace(cfg, absorbing=tuple(cfg.absorbing) + (target,))
    stats = run_walks(net, cfg)
    return stats.hit_fraction(target)


def estimate_green(net: Network, cfg: WalkConfig, x: int) -> tuple[float, float]:
    """Mean number of visits to ``x`` per walk, with standard error."""
    if x not in cfg.watch_vertices:
        cfg = replace(cfg, watch_vertices=tuple(cfg.watch_vertices) + (x,))
    stats = run_walks(net, cfg)
    return stats.visit_estimate(x)


def estimate_transitions(net: Network, cfg: WalkConfig, x: int, y: int) -> tuple[float, float]:
    """Mean count of directed steps x -> y per walk, with standard error."""
    if int(y) not in net.neighbors(x):
        raise NotAdjacent(f"{x} and {y} are not neighbors")
    if (x, y) not in cfg.watch_edges:
        cfg = replace(cfg, watch_edges=tuple(cfg.watch_edges) + ((x, y),))
    stats = run_walks(net, cfg)
    return stats.transition_estimate(x, y)


def estimate_escape(net: Network, cfg: WalkConfig, a: int, z) -> tuple[float, float]:
    """P(reach z strictly before returning to a), walk started at a."""
    z = frozenset(int(x) for x in z)
    if a in z:
        raise VertexInTarget(f"source {a} lies in the target set")
    cfg = replace(
        cfg,
        start=int(a),
        absorbing=tuple(sorted(z | {int(a)})),
        min_absorb_step=1,
    )
    stats = run_walks(net, cfg)
    n = cfg.num_walks
    escaped = int(sum(c for v, c in stats.hits.items() if v in z))
    p = escaped / n
    return p, math.sqrt(p * (1.0 - p) / n)
