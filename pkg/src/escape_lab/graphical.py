"""Arrow-based (percolation) construction of the competition process.

Each ordered edge of a bounded region carries two independent Poisson
arrow streams: growth arrows at rate 1 and boost arrows at rate
``lam - 1``.  Type 2 spreads along arrows of either kind (superposed
rate ``lam``); type 1 spreads along growth arrows only.  Two readings of
the same arrow field are provided:

* :func:`graphical_build` — path reachability: type 2 occupies every
  vertex reachable from its initial set through arrows with increasing
  times; type 1 occupies vertices reachable through growth arrows that
  are *not* type-2 occupied at the horizon.  Arrows on paths that do not
  begin in an initially occupied vertex never enter either reachability
  and are thereby implicitly erased.
* :func:`ctmc_replay` — the Markov dynamics driven by the same arrows in
  time order: a growth arrow from a type-1 vertex colonises a vacant
  target; an arrow of either kind from a type-2 vertex takes over a
  non-type-2 target.

Both readings are deterministic functions of the seed, so they can be
compared realisation by realisation; :func:`compare_constructions` does
exactly that.  This module is intentionally bounded-region and
small-scale — measurement-grade simulation belongs to the event engine.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

from .analytic import ModelParams
from .errors import ConfigError, TruncationWarning
from .escape import InitialConfig
from .rng import SplitMix64, derive_seed
from .tree import VertexId, validate_vertex

GROWTH = 0
BOOST = 1


def _region_vertices(d: int, region_level: int) -> tuple[list[VertexId], dict[VertexId, int]]:
    verts: list[VertexId] = [()]
    frontier: list[VertexId] = [()]
    for lev in range(region_level):
        nxt: list[VertexId] = []
        for v in frontier:
            branches = d + 1 if v == () else d
            for br in range(branches):
                nxt.append(v + (br,))
        verts.extend(nxt)
        frontier = nxt
    return verts, {v: i for i, v in enumerate(verts)}


def _sample_arrows(
    params: ModelParams, horizon_t: float, region_level: int, seed: int
) -> tuple[list[VertexId], list[tuple[float, int, int, int]]]:
    """All arrows within the region up to the horizon, time-sorted."""
    verts, index = _region_vertices(params.d, region_level)
    rates = ((GROWTH, 1.0), (BOOST, params.lam - 1.0))
    arrows: list[tuple[float, int, int, int]] = []
    for child, i in index.items():
        if child == ():
            continue
        j = index[child[:-1]]
        for src, tgt in ((i, j), (j, i)):
            for kind, rate in rates:
                if rate <= 0.0:
                    continue
                rng = SplitMix64(derive_seed(seed, src, tgt, kind))
                t = 0.0
                while True:
                    t += rng.exponential(rate)
                    if t > horizon_t:
                        break
                    arrows.append((t, src, tgt, kind))
    arrows.sort()
    return verts, arrows


@dataclass(frozen=True)
class GraphicalOutcome:
    """Occupied sets at the horizon plus diagnostics."""

    a_set: frozenset[VertexId]
    b_set: frozenset[VertexId]
    truncated: bool
    arrows: int


def _prepare(cfg: InitialConfig, params: ModelParams, horizon_t: float, region_level: int):
    if horizon_t < 0.0:
        raise ConfigError(f"horizon time must be >= 0, got {horizon_t}")
    if region_level < 1:
        raise ConfigError(f"region level must be >= 1, got {region_level}")
    for v in list(cfg.a0) + list(cfg.b0):
        validate_vertex(v, params.tree)
        if len(v) > region_level:
            raise ConfigError(
                f"initial vertex {v} lies outside the region (level {region_level})"
            )


def _finish(
    verts: list[VertexId],
    arrows: list[tuple[float, int, int, int]],
    a_occ: set[int],
    b_occ: set[int],
    region_level: int,
) -> GraphicalOutcome:
    boundary_hit = any(
        len(verts[i]) >= region_level for i in a_occ | b_occ
    )
    if boundary_hit:
        warnings.warn(
            "occupation reached the region boundary; the unbounded process "
            "may extend further (enlarge region_level)",
            TruncationWarning,
            stacklevel=3,
        )
    return GraphicalOutcome(
        a_set=frozenset(verts[i] for i in a_occ),
        b_set=frozenset(verts[i] for i in b_occ),
        truncated=boundary_hit,
        arrows=len(arrows),
    )


def graphical_build(
    cfg: InitialConfig,
    params: ModelParams,
    horizon_t: float,
    region_level: int,
    seed: int = 0,
) -> GraphicalOutcome:
    """Reachability reading of the arrow field at the horizon.

    Earliest arrival times are computed in a single pass over the
    time-sorted arrows: by the time an arrow is processed, its source's
    arrival time is final if it is earlier than the arrow (all arrows are
    processed in increasing time order and updates never assign times
    below the current arrow).
    """
    _prepare(cfg, params, horizon_t, region_level)
    verts, arrows = _sample_arrows(params, horizon_t, region_level, seed)
    index = {v: i for i, v in enumerate(verts)}
    inf = float("inf")
    b_time = [inf] * len(verts)
    a_time = [inf] * len(verts)
    for v in cfg.b0:
        b_time[index[v]] = 0.0
    for v in cfg.a0:
        a_time[index[v]] = 0.0
    for t, src, tgt, kind in arrows:
        if b_time[src] <= t and t < b_time[tgt]:
            b_time[tgt] = t
        if kind == GROWTH and a_time[src] <= t and t < a_time[tgt]:
            a_time[tgt] = t
    b_occ = {i for i, bt in enumerate(b_time) if bt < inf}
    a_occ = {i for i, at in enumerate(a_time) if at < inf} - b_occ
    return _finish(verts, arrows, a_occ, b_occ, region_level)


def ctmc_replay(
    cfg: InitialConfig,
    params: ModelParams,
    horizon_t: float,
    region_level: int,
    seed: int = 0,
) -> GraphicalOutcome:
    """Markov-dynamics reading of the same arrow field (matched seed)."""
    _prepare(cfg, params, horizon_t, region_level)
    verts, arrows = _sample_arrows(params, horizon_t, region_level, seed)
    index = {v: i for i, v in enumerate(verts)}
    state = [0] * len(verts)
    for v in cfg.a0:
        state[index[v]] = 1
    for v in cfg.b0:
        state[index[v]] = 2
    for _, src, tgt, kind in arrows:
        s = state[src]
        if s == 2:
            if state[tgt] != 2:
                state[tgt] = 2
        elif s == 1 and kind == GROWTH and state[tgt] == 0:
            state[tgt] = 1
    a_occ = {i for i, s in enumerate(state) if s == 1}
    b_occ = {i for i, s in enumerate(state) if s == 2}
    return _finish(verts, arrows, a_occ, b_occ, region_level)


@dataclass(frozen=True)
class ConstructionComparison:
    """Outcome of comparing the two readings on one seed."""

    agree: bool
    reachability: GraphicalOutcome
    replay: GraphicalOutcome


def compare_constructions(
    cfg: InitialConfig,
    params: ModelParams,
    horizon_t: float,
    region_level: int,
    seed: int = 0,
) -> ConstructionComparison:
    """Compare the reachability and replay readings on the same arrows."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TruncationWarning)
        reach = graphical_build(cfg, params, horizon_t, region_level, seed)
        replay = ctmc_replay(cfg, params, horizon_t, region_level, seed)
    agree = reach.a_set == replay.a_set and reach.b_set == replay.b_set
    return ConstructionComparison(agree=agree, reachability=reach, replay=replay)
