"""Two-type competition: configuration, invariants, budgets, checkpoints."""
from __future__ import annotations

import math
import random

import pytest

from escape_lab.analytic import ModelParams
from escape_lab.errors import AddressError, ConfigError
from escape_lab.escape import (
    Budget,
    CellState,
    EscapeSimulation,
    InitialConfig,
    count_type1,
    run,
    step,
    validate_nontrivial,
)
from escape_lab.tree import TreeParams, distance

P2 = TreeParams(d=2)
M2 = ModelParams(d=2, lam=2.0)

ROOT_SURROUNDED = InitialConfig(a0=((),), b0=((0,), (1,), (2,)))


def test_initial_config_canonicalisation():
    cfg = InitialConfig(a0=((1,), (0,), (1,)), b0=((2, 0),))
    assert cfg.a0 == ((0,), (1,))  # sorted, deduplicated
    assert cfg.b0 == ((2, 0),)
    with pytest.raises(ConfigError):
        InitialConfig(a0=((0,),), b0=((0,),))  # overlap
    empty = InitialConfig(a0=(), b0=())
    assert empty.a0 == () and empty.b0 == ()


def test_budget_validation():
    with pytest.raises(ConfigError):
        Budget()  # at least one bound
    with pytest.raises(ConfigError):
        Budget(max_time=-1.0)
    with pytest.raises(ConfigError):
        Budget(max_events=0)
    b = Budget(max_time=5.0)
    mt, ml, me = b.normalized()
    assert mt == 5.0 and ml > 10**9 and me > 10**9


def test_validate_nontrivial_directions():
    # A type-2-free direction out of some type-1 vertex is required.
    assert validate_nontrivial(InitialConfig(a0=((),), b0=((0,),)), P2)
    assert not validate_nontrivial(ROOT_SURROUNDED, P2)
    # Every root direction's subtree touches type 2 -> blocked, even
    # though individual rays through (2,1) stay clear.
    blocked = InitialConfig(a0=((),), b0=((0,), (1,), (2, 0)))
    assert not validate_nontrivial(blocked, P2)
    # Parent direction: all type-2 addresses strictly inside the type-1
    # vertex's own subtree leaves the route to the root open.
    assert validate_nontrivial(
        InitialConfig(a0=((0,),), b0=((0, 0), (0, 1))), P2
    )
    # No type-1 vertices: nothing can escape.
    assert not validate_nontrivial(InitialConfig(a0=(), b0=((0,),)), P2)
    # No type-2 vertices: every direction is clear.
    assert validate_nontrivial(InitialConfig(a0=((1,),), b0=()), P2)
    with pytest.raises(AddressError):
        validate_nontrivial(InitialConfig(a0=((5,),), b0=()), P2)


def test_first_step_pure_growth():
    cfg = InitialConfig(a0=((),), b0=())
    sim = EscapeSimulation(cfg, M2, seed=7)
    assert sim.n_type1 == 1 and sim.n_type2 == 0
    rec = sim.step()
    assert rec is not None
    assert rec.old_state == CellState.VACANT
    assert rec.new_state == CellState.ONE
    assert len(rec.vertex) == 1  # a root neighbour
    assert rec.time > 0.0
    assert sim.n_type1 == 2
    assert sim.clock == rec.time
    assert count_type1(sim, 1) == 1


def test_step_alias_and_frozen_state():
    sim = EscapeSimulation(InitialConfig(a0=(), b0=()), M2, seed=0)
    assert step(sim) is None
    assert sim.events == 0


def test_surrounded_root_always_dies():
    # With all three neighbours hostile no growth is ever valid, and the
    # root is eventually taken: extinction in every replica.
    for seed in range(100):
        out = run(ROOT_SURROUNDED, M2, Budget(max_time=1e9), seed=seed)
        assert out.status == "extinct"
        assert out.stop_reason == "extinct"
        assert out.n_type1 == 0
        assert out.extinction_time is not None and out.extinction_time > 0.0
        assert out.max_level_type1 == 0


def test_empty_type1_is_extinct_immediately():
    out = run(InitialConfig(a0=(), b0=((),)), M2, Budget(max_time=5.0), seed=3)
    assert out.status == "extinct"
    assert out.extinction_time == 0.0
    assert out.events == 0


def test_both_empty_freezes():
    out = run(InitialConfig(a0=(), b0=()), M2, Budget(max_time=5.0), seed=3)
    assert out.status == "extinct"
    assert out.stop_reason in ("extinct", "frozen")
    assert out.events == 0


def random_config(rng: random.Random, d: int) -> InitialConfig:
    verts = [()]
    for _ in range(rng.randrange(1, 10)):
        v = rng.choice(verts)
        branches = d + 1 if v == () else d
        verts.append(v + (rng.randrange(branches),))
    verts = list(dict.fromkeys(verts))
    rng.shuffle(verts)
    k = rng.randrange(1, len(verts) + 1)
    return InitialConfig(a0=tuple(verts[:k]), b0=tuple(verts[k:]))


def test_event_log_invariants():
    # Over full logs of random runs: the clock never decreases, states
    # only move VACANT->ONE, VACANT->TWO, or ONE->TWO (type 2 is
    # absorbing), and the two populations never overlap.
    rng = random.Random(1312)
    for _ in range(30):
        cfg = random_config(rng, 2)
        lam = rng.uniform(1.2, 8.0)
        sim = EscapeSimulation(cfg, ModelParams(d=2, lam=lam), seed=rng.randrange(2**32))
        prev_t = 0.0
        twos = set(cfg.b0)
        for _ in range(400):
            rec = sim.step()
            if rec is None:
                break
            assert rec.time >= prev_t
            prev_t = rec.time
            transition = (rec.old_state, rec.new_state)
            assert transition in (
                (CellState.VACANT, CellState.ONE),
                (CellState.VACANT, CellState.TWO),
                (CellState.ONE, CellState.TWO),
            )
            if rec.new_state == CellState.TWO:
                twos.add(rec.vertex)
            # Monotone type-2 set: nothing ever leaves it.
            assert twos == set(sim.type2_vertices())
        ones = set(sim.type1_vertices())
        assert not (ones & twos)


def test_tally_recomputation_matches():
    rng = random.Random(77)
    for _ in range(15):
        cfg = random_config(rng, 2)
        sim = EscapeSimulation(cfg, ModelParams(d=2, lam=3.0), seed=rng.randrange(2**32))
        sim.run_until(max_events=300, halt_on_extinction=False)
        assert sim.tallies() == sim.recompute_tallies()


def test_level_counts_consistent_with_occupancy():
    sim = EscapeSimulation(InitialConfig(a0=((),), b0=((0,),)), M2, seed=11)
    sim.run_until(max_events=200, halt_on_extinction=False)
    occ = sim.occupancy()
    ones = [v for v, s in occ.items() if s == CellState.ONE]
    counts = sim.level_counts_type1()
    assert sum(counts.values()) == len(ones) == sim.n_type1
    for n, c in counts.items():
        assert sum(1 for v in ones if len(v) == n) == c
        assert sim.count_type1(n) == c
    assert sim.vertex_count() >= len(occ)


def test_budget_stop_reasons():
    cfg = InitialConfig(a0=((),), b0=())
    out = run(cfg, M2, Budget(max_events=1), seed=5)
    assert out.stop_reason == "events"
    assert out.events == 1
    assert out.status == "alive-at-budget"

    out = run(cfg, M2, Budget(max_level=2), seed=5)
    assert out.stop_reason == "level"
    assert out.max_level_type1 == 2

    out = run(cfg, M2, Budget(max_time=0.5), seed=5)
    assert out.stop_reason == "time"
    assert out.clock == 0.5  # parked exactly at the bound


def test_run_is_reproducible():
    cfg = InitialConfig(a0=((),), b0=((0,),))
    budget = Budget(max_level=8, max_events=100_000)
    a = run(cfg, M2, budget, seed=99)
    b = run(cfg, M2, budget, seed=99)
    assert a == b
    c = run(cfg, M2, budget, seed=100)
    assert (a.clock, a.events) != (c.clock, c.events)


def test_checkpoints_record_levels():
    cfg = InitialConfig(a0=((),), b0=((0,),))
    out = run(
        cfg,
        M2,
        Budget(max_time=3.0),
        seed=1,
        checkpoints=(0.0, 1.0, 2.5, 99.0),  # 99 is beyond the budget
    )
    assert [cp.t for cp in out.checkpoints] == [0.0, 1.0, 2.5]
    first = out.checkpoints[0]
    assert first.n_type1 == 1
    assert first.level_counts == ((0, 1),)
    assert first.max_level == 0
    assert first.min_distance_to_two == 1
    for cp in out.checkpoints:
        assert cp.n_type1 == sum(c for _, c in cp.level_counts)


def test_checkpoints_after_extinction_are_empty():
    out = run(
        ROOT_SURROUNDED,
        ModelParams(d=2, lam=20.0),
        Budget(max_time=50.0),
        seed=2,
        checkpoints=(25.0, 40.0),
    )
    assert out.status == "extinct"
    assert len(out.checkpoints) == 2
    for cp in out.checkpoints:
        assert cp.n_type1 == 0
        assert cp.level_counts == ()
        assert cp.max_level == -1
        assert cp.min_distance_to_two is None


def test_checkpoint_validation():
    with pytest.raises(ConfigError):
        run(ROOT_SURROUNDED, M2, Budget(max_time=1.0), checkpoints=(-1.0,))
    with pytest.raises(ConfigError):
        run(ROOT_SURROUNDED, M2, Budget(max_time=1.0), checkpoints=(math.inf,))


def test_require_nontrivial_rejects_blocked_start():
    with pytest.raises(ConfigError):
        run(ROOT_SURROUNDED, M2, Budget(max_time=1.0), require_nontrivial=True)
    # A configuration with a clear direction is accepted and simulated.
    out = run(
        InitialConfig(a0=((),), b0=((0,),)),
        M2,
        Budget(max_events=10),
        require_nontrivial=True,
    )
    assert out.stop_reason in ("events", "extinct")
    assert out.events <= 10


def test_escape_heuristic_flag():
    cfg = InitialConfig(a0=((),), b0=((0,),))
    out = run(cfg, M2, Budget(max_events=50), seed=1)
    assert out.escape_declared is None
    out = run(cfg, M2, Budget(max_events=50), seed=1, escape_heuristic=True)
    assert isinstance(out.escape_declared, bool)
    # An extinct run never declares an escape.
    out = run(
        ROOT_SURROUNDED, M2, Budget(max_time=1e9), seed=1, escape_heuristic=True
    )
    assert out.status == "extinct"
    assert out.escape_declared is False


def test_growth_spreads_locally():
    # Pure growth: every occupied vertex is connected to the start along
    # occupied vertices (distance 1 steps at each event).
    sim = EscapeSimulation(InitialConfig(a0=((1,),), b0=()), M2, seed=13)
    occupied = {(1,)}
    for _ in range(80):
        rec = sim.step()
        assert rec is not None
        assert any(distance(rec.vertex, v) == 1 for v in occupied)
        occupied.add(rec.vertex)
