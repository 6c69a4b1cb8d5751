"""Two-type competition process on the homogeneous tree.

Type 1 colonises vacant sites at rate equal to its number of type-1
neighbours.  Type 2 takes over vacant *or* type-1 sites at rate ``lam``
times its number of type-2 neighbours, and is absorbing.  Because type 2
treats vacant and type-1 targets identically, its marginal law is a
plain rate-``lam`` growth process, autonomous of type 1 — the engine
realises this per seed, not just in distribution.

This module is the public face of the simulator: configuration and
budget types, a single-replica :class:`EscapeSimulation`, and the
``run`` driver that handles checkpoints, censoring, and outcome
reporting.  The event mechanics live in the engine backends (see
``escape_lab.engine``).
"""

from __future__ import annotations

import enum
import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field

from .errors import ConfigError
from .engine import get_engine
from .rng import derive_seed
from .tree import ROOT, TreeParams, VertexId, in_forward_subtree, min_distance, validate_vertex
from .analytic import ModelParams

_GROWTH_TAG = 0x67
_TAKEOVER_TAG = 0x74

_UNBOUNDED_LEVEL = 2**60
_UNBOUNDED_EVENTS = 2**62


class CellState(enum.IntEnum):
    """Occupancy of one vertex; TWO is absorbing."""

    VACANT = 0
    ONE = 1
    TWO = 2


def _canonical_set(vertices: Iterable[VertexId]) -> tuple[VertexId, ...]:
    unique = {tuple(v) for v in vertices}
    return tuple(sorted(unique, key=lambda v: (len(v), v)))


@dataclass(frozen=True)
class InitialConfig:
    """Disjoint finite starting sets for type 1 (``a0``) and type 2 (``b0``).

    Vertex order and duplicates are normalised away; address validity
    against a particular tree is checked when a simulation is built.
    """

    a0: tuple[VertexId, ...]
    b0: tuple[VertexId, ...]

    def __post_init__(self):
        a0 = _canonical_set(self.a0)
        b0 = _canonical_set(self.b0)
        overlap = set(a0) & set(b0)
        if overlap:
            raise ConfigError(
                f"initial sets must be disjoint; both contain {sorted(overlap)[0]}"
            )
        object.__setattr__(self, "a0", a0)
        object.__setattr__(self, "b0", b0)


@dataclass(frozen=True)
class Budget:
    """Stopping rule for a run; at least one bound must be set."""

    max_time: float | None = None
    max_level: int | None = None
    max_events: int | None = None

    def __post_init__(self):
        if self.max_time is None and self.max_level is None and self.max_events is None:
            raise ConfigError("budget must set at least one of max_time, max_level, max_events")
        if self.max_time is not None and not (self.max_time >= 0.0 and math.isfinite(self.max_time)):
            raise ConfigError(f"max_time must be finite and >= 0, got {self.max_time}")
        if self.max_level is not None and self.max_level < 0:
            raise ConfigError(f"max_level must be >= 0, got {self.max_level}")
        if self.max_events is not None and self.max_events < 1:
            raise ConfigError(f"max_events must be >= 1, got {self.max_events}")

    def normalized(self) -> tuple[float, int, int]:
        """(max_time, max_level, max_events) with unset bounds widened."""
        return (
            self.max_time if self.max_time is not None else math.inf,
            self.max_level if self.max_level is not None else _UNBOUNDED_LEVEL,
            self.max_events if self.max_events is not None else _UNBOUNDED_EVENTS,
        )


@dataclass(frozen=True)
class EventRecord:
    """One applied transition."""

    time: float
    vertex: VertexId
    old_state: CellState
    new_state: CellState


@dataclass(frozen=True)
class Checkpoint:
    """Type-1 snapshot at a requested time.

    ``level_counts`` holds (level, count) pairs for occupied levels only;
    ``min_distance_to_two`` is None when either type is absent.
    """

    t: float
    n_type1: int
    level_counts: tuple[tuple[int, int], ...]
    max_level: int
    min_distance_to_two: int | None


@dataclass(frozen=True)
class RunOutcome:
    """Result of one budgeted replica.

    ``status`` is ``"extinct"`` (type 1 died before any budget bound) or
    ``"alive-at-budget"`` (censored; no survival claim).  ``stop_reason``
    records which bound ended the run: ``extinct``, ``time``, ``level``,
    ``events``, or ``frozen`` (no further events possible).
    """

    status: str
    stop_reason: str
    clock: float
    extinction_time: float | None
    events: int
    n_type1: int
    n_type2: int
    max_level_type1: int
    vertices: int
    backend: str
    checkpoints: tuple[Checkpoint, ...] = field(default=())
    escape_declared: bool | None = None


def validate_nontrivial(cfg: InitialConfig, params: TreeParams) -> bool:
    """True iff some type-1 start vertex has a neighbour direction whose
    entire forward subtree contains no type-2 start vertex.

    Such a direction gives type 1 an escape route that type 2 can only
    enter by chasing through the start vertex.  The check is exact and
    finite because the type-2 set is finite: a child direction is clear
    iff no type-2 address extends it, and the parent direction is clear
    iff every type-2 address lies strictly inside the start vertex's own
    subtree.  (This is deliberately stronger than asking for a single
    unblocked ray: a direction whose subtree merely *contains* type-2
    vertices does not qualify even if some ray avoids them.)
    """
    for v in list(cfg.a0) + list(cfg.b0):
        validate_vertex(v, params)
    b0 = cfg.b0
    for x in cfg.a0:
        branches = params.d + 1 if x == ROOT else params.d
        for br in range(branches):
            child = x + (br,)
            if not any(in_forward_subtree(child, b) for b in b0):
                return True
        if x != ROOT and all(in_forward_subtree(x, b) for b in b0):
            return True
    return False


class EscapeSimulation:
    """One replica of the competition process.

    Deterministic given ``seed``; the two event categories use separate
    substreams derived from it, so the type-2 trajectory can be compared
    across runs that differ only in the type-1 configuration.
    """

    def __init__(
        self,
        cfg: InitialConfig,
        params: ModelParams,
        seed: int = 0,
        engine: str | None = None,
    ):
        for v in list(cfg.a0) + list(cfg.b0):
            validate_vertex(v, params.tree)
        self.cfg = cfg
        self.params = params
        self.seed = seed
        engine_cls, backend = get_engine(engine)
        self.backend = backend
        self._eng = engine_cls(
            params.d,
            params.lam,
            list(cfg.a0),
            list(cfg.b0),
            derive_seed(seed, _GROWTH_TAG),
            derive_seed(seed, _TAKEOVER_TAG),
        )

    # -- state queries ------------------------------------------------

    @property
    def clock(self) -> float:
        return self._eng.clock

    @property
    def events(self) -> int:
        return self._eng.event_count

    @property
    def n_type1(self) -> int:
        return self._eng.n_type1

    @property
    def n_type2(self) -> int:
        return self._eng.n_type2

    @property
    def max_level_reached(self) -> int:
        """Highest level ever occupied by type 1 (-1 if never occupied)."""
        return self._eng.max_level_reached

    @property
    def extinction_time(self) -> float | None:
        t = self._eng.extinction_time
        return None if t < 0.0 else t

    def occupancy(self) -> dict[VertexId, CellState]:
        """Sparse occupancy map (vacant vertices omitted)."""
        return {v: CellState(s) for v, s in self._eng.occupancy_items()}

    def type1_vertices(self) -> list[VertexId]:
        return [v for v, s in self._eng.occupancy_items() if s == CellState.ONE]

    def type2_vertices(self) -> list[VertexId]:
        return [v for v, s in self._eng.occupancy_items() if s == CellState.TWO]

    def level_counts_type1(self) -> dict[int, int]:
        return self._eng.level_counts(int(CellState.ONE))

    def count_type1(self, n: int) -> int:
        """Number of type-1 vertices at level ``n``."""
        return self._eng.level_counts(int(CellState.ONE)).get(n, 0)

    def tallies(self) -> tuple[int, int]:
        """Incrementally maintained (growth, takeover) active-edge counts."""
        return self._eng.a_exact, self._eng.b_exact

    def recompute_tallies(self) -> tuple[int, int]:
        """Active-edge counts recounted from scratch (invariant check)."""
        a, b = self._eng.recompute_tallies()
        return a, b

    def vertex_count(self) -> int:
        """Number of materialised tree vertices (memory proxy)."""
        return self._eng.vertex_count()

    # -- advancement --------------------------------------------------

    def step(self) -> EventRecord | None:
        """Apply the next transition; None when no transition is possible
        (both populations frozen, i.e. nothing left to flip)."""
        rec = self._eng.step()
        if rec is None:
            return None
        t, vidx, old, new = rec
        return EventRecord(
            time=t,
            vertex=self._eng.vertex_path(vidx),
            old_state=CellState(old),
            new_state=CellState(new),
        )

    def run_until(
        self,
        max_time: float = math.inf,
        max_level: int = _UNBOUNDED_LEVEL,
        max_events: int = _UNBOUNDED_EVENTS,
        halt_on_extinction: bool = True,
    ) -> str:
        """Advance until a bound is hit; see ``RunOutcome.stop_reason``
        for the returned reason codes."""
        return self._eng.run_until(max_time, max_level, max_events, halt_on_extinction)

    def checkpoint(self, t: float) -> Checkpoint:
        """Snapshot the current type-1 state, labelled with time ``t``."""
        counts = self.level_counts_type1()
        ones = None
        twos = None
        dist = None
        if counts:
            ones = self.type1_vertices()
            twos = self.type2_vertices()
            dist = min_distance(ones, twos) if twos else None
        return Checkpoint(
            t=t,
            n_type1=self.n_type1,
            level_counts=tuple(sorted(counts.items())),
            max_level=max(counts) if counts else -1,
            min_distance_to_two=dist,
        )


def step(sim: EscapeSimulation) -> EventRecord | None:
    """Module-level alias for :meth:`EscapeSimulation.step`."""
    return sim.step()


def count_type1(sim: EscapeSimulation, n: int) -> int:
    """Module-level alias for :meth:`EscapeSimulation.count_type1`."""
    return sim.count_type1(n)


def _escape_declared(sim: EscapeSimulation, delta: float) -> bool:
    """Heuristic escape call: some type-1 vertex at the current maximal
    level ``L >= 1`` has every type-2 vertex in its root branch at level
    at most ``(1 - delta) * L``.  Reported only as a heuristic."""
    ones = sim.type1_vertices()
    if not ones:
        return False
    top = max(len(v) for v in ones)
    if top < 1:
        return False
    twos = sim.type2_vertices()
    for v in ones:
        if len(v) != top:
            continue
        branch = v[0]
        lag = top - delta * top
        if all(len(w) <= lag for w in twos if w and w[0] == branch):
            return True
    return False


def run(
    cfg: InitialConfig,
    params: ModelParams,
    budget: Budget,
    seed: int = 0,
    checkpoints: Sequence[float] = (),
    engine: str | None = None,
    require_nontrivial: bool = False,
    escape_heuristic: bool = False,
    escape_delta: float = 0.5,
) -> RunOutcome:
    """Run one budgeted replica.

    Checkpoints beyond ``max_time`` are ignored, as are checkpoints not
    reached before a level or event bound ends the run; checkpoint times
    falling after extinction report an empty type-1 state.  Checkpointing
    exports the full occupancy (for the min-distance column), so it is
    meant for moderate-size runs.  ``require_nontrivial`` rejects
    configurations without a clear escape direction instead of
    simulating their certain extinction.
    """
    if require_nontrivial and not validate_nontrivial(cfg, params.tree):
        raise ConfigError(
            "initial configuration has no type-2-free direction; "
            "pass require_nontrivial=False to simulate it anyway"
        )
    max_time, max_level, max_events = budget.normalized()
    cps = sorted(float(t) for t in checkpoints)
    for t in cps:
        if t < 0.0 or not math.isfinite(t):
            raise ConfigError(f"checkpoint times must be finite and >= 0, got {t}")
    sim = EscapeSimulation(cfg, params, seed, engine)
    taken: list[Checkpoint] = []
    reason: str | None = None
    for i, t in enumerate(cps):
        if t > max_time:
            break
        r = sim.run_until(t, max_level, max_events)
        if r == "time":
            taken.append(sim.checkpoint(t))
            continue
        if r == "extinct":
            # Type 1 stays empty from here on; the remaining checkpoint
            # times all see the same empty state.
            for t_rest in cps[i:]:
                if t_rest <= max_time:
                    taken.append(sim.checkpoint(t_rest))
        reason = r
        break
    if reason is None:
        reason = sim.run_until(max_time, max_level, max_events)
    if reason == "extinct":
        status = "extinct"
    elif reason == "frozen" and sim.n_type1 == 0:
        status = "extinct"
    else:
        status = "alive-at-budget"
    declared = None
    if escape_heuristic:
        declared = status == "alive-at-budget" and _escape_declared(sim, escape_delta)
    return RunOutcome(
        status=status,
        stop_reason=reason,
        clock=sim.clock,
        extinction_time=sim.extinction_time,
        events=sim.events,
        n_type1=sim.n_type1,
        n_type2=sim.n_type2,
        max_level_type1=sim.max_level_reached,
        vertices=sim.vertex_count(),
        backend=sim.backend,
        checkpoints=tuple(taken),
        escape_declared=declared,
    )
