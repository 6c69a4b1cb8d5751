"""Single-type growth as first-passage percolation on the tree.

On a tree the cluster of a rate-``r`` growth process started at the root
is exactly the set ``{x : T(x) <= t}`` where ``T(x)`` is the sum of
independent Exp(``r``) weights along the root path: the infecting
neighbour of any vertex is always its parent, so first-passage times are
plain path sums.

Every edge weight is derived from a counter-style hash keyed by
``(seed, vertex path)``:

* the same vertex always gets the same weight, so a field can be
  evaluated lazily, densely level-by-level, or sparsely along a growing
  cluster, with identical results;
* the underlying uniform draw does not depend on the rate, so fields at
  different rates couple exactly (a rate-``lam`` field is the rate-1
  field with all times divided by ``lam``).

Dense level arrays use the canonical level-major order: the root's
children are indices ``0..d`` at level 1 and vertex ``i`` at level
``n >= 1`` has children ``i*d .. i*d + d - 1`` at level ``n + 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, HorizonError, ResourceError
from .rng import GOLDEN, MASK64, derive_seed, mix64, mix64_array, unit_from_bits
from .tree import TreeParams, VertexId, sphere_size, validate_vertex

DEFAULT_MAX_VERTICES = 8_000_000

_SLOW_TAG = 0x51
_FAST_TAG = 0xFA

_U64_GOLDEN = np.uint64(GOLDEN)


def _root_hash(seed: int) -> int:
    return mix64((seed + GOLDEN) & MASK64)


def _child_hash(parent_hash: int, branch: int) -> int:
    return mix64(parent_hash ^ (((branch + 1) * GOLDEN) & MASK64))


def _child_hashes(parent_hashes: np.ndarray, branches: np.ndarray) -> np.ndarray:
    keys = (branches.astype(np.uint64) + np.uint64(1)) * _U64_GOLDEN
    return mix64_array(parent_hashes ^ keys)


def _weights(hashes: np.ndarray, rate: float) -> np.ndarray:
    units = (hashes >> np.uint64(11)).astype(np.float64) * (1.0 / 9007199254740992.0)
    return -np.log1p(-units) / rate


def _branch_pattern(count: int, width: int) -> np.ndarray:
    return np.tile(np.arange(width, dtype=np.uint64), count)


class PassageTimeField:
    """Memoised passage times for one seeded rate-``rate`` field.

    Dense level arrays are materialised on demand up to the horizon
    ``n_max``; the documented memory cost of level ``n`` is the sphere
    size ``(d + 1) * d**(n - 1)``.
    """

    def __init__(
        self,
        params: TreeParams,
        rate: float,
        n_max: int,
        seed: int,
        max_vertices: int = DEFAULT_MAX_VERTICES,
    ):
        if not (rate > 0.0) or not math.isfinite(rate):
            raise ConfigError(f"field rate must be finite and > 0, got {rate!r}")
        if n_max < 0:
            raise ConfigError(f"horizon must be >= 0, got {n_max}")
        self.params = params
        self.rate = rate
        self.n_max = n_max
        self.seed = seed
        self.max_vertices = max_vertices
        self._hashes: list[np.ndarray] = [np.array([_root_hash(seed)], dtype=np.uint64)]
        self._times: list[np.ndarray] = [np.zeros(1)]

    @property
    def levels_materialized(self) -> int:
        return len(self._times) - 1

    def _ensure(self, n: int) -> None:
        if n > self.n_max:
            raise HorizonError(
                f"level {n} is beyond the sampled horizon n_max={self.n_max}"
            )
        need = sphere_size(n, self.params)
        if need > self.max_vertices:
            raise ResourceError(
                f"materializing level {n} needs an array of {need} vertices, "
                f"over the budget of {self.max_vertices}"
            )
        d = self.params.d
        while self.levels_materialized < n:
            lev = self.levels_materialized
            width = d + 1 if lev == 0 else d
            parents_h = np.repeat(self._hashes[lev], width)
            branches = _branch_pattern(len(self._hashes[lev]), width)
            child_h = _child_hashes(parents_h, branches)
            child_t = np.repeat(self._times[lev], width) + _weights(child_h, self.rate)
            self._hashes.append(child_h)
            self._times.append(child_t)

    def passage_times(self, n: int) -> np.ndarray:
        """Times for all level-``n`` vertices in canonical order."""
        self._ensure(n)
        return self._times[n]

    def passage_time(self, v: VertexId) -> float:
        """Lazy single-vertex evaluation by walking the path."""
        validate_vertex(v, self.params)
        if len(v) > self.n_max:
            raise HorizonError(
                f"level {len(v)} is beyond the sampled horizon n_max={self.n_max}"
            )
        h = _root_hash(self.seed)
        t = 0.0
        for branch in v:
            h = _child_hash(h, branch)
            # Same log1p kernel as the dense arrays, so the two code
            # paths agree bit for bit, not just to rounding.
            t += float(-np.log1p(-unit_from_bits(h))) / self.rate
        return t

    def count_occupied(self, n: int, t: float) -> int:
        """Number of level-``n`` vertices reached by time ``t``."""
        return int(np.count_nonzero(self.passage_times(n) <= t))

    def count_vacant(self, n: int, t: float) -> int:
        """Number of level-``n`` vertices not yet reached at time ``t``."""
        return sphere_size(n, self.params) - self.count_occupied(n, t)

    def reach_counts_sparse(
        self, t: float, level_cap: int | None = None
    ) -> tuple[list[int], int]:
        """Per-level reached counts via pruned cluster growth.

        Grows only vertices with ``T <= t`` (pruning is exact because
        times increase along paths), so memory scales with the cluster,
        not with ``d**n``.  Returns ``(counts, max_level)``; growth stops
        early at ``level_cap`` if given.
        """
        counts, max_level, _, _ = _grow_pruned(
            self.params, self.rate, self.seed, t, level_cap
        )
        return counts, max_level


def sample_field(
    params: TreeParams,
    rate: float,
    n_max: int,
    seed: int,
    max_vertices: int = DEFAULT_MAX_VERTICES,
) -> PassageTimeField:
    """Construct a deterministic passage-time field for ``seed``."""
    return PassageTimeField(params, rate, n_max, seed, max_vertices)


def _grow_pruned(
    params: TreeParams,
    rate: float,
    seed: int,
    t: float,
    level_cap: int | None,
) -> tuple[list[int], int, np.ndarray, np.ndarray]:
    """Shared pruned-growth walk; returns (counts, max_level, H, T) with
    the last level's surviving arrays (useful for diagnostics)."""
    if t < 0.0:
        raise ConfigError(f"time must be >= 0, got {t}")
    d = params.d
    hashes = np.array([_root_hash(seed)], dtype=np.uint64)
    times = np.zeros(1)
    counts = [1]
    lev = 0
    while len(hashes) > 0:
        if level_cap is not None and lev >= level_cap:
            break
        width = d + 1 if lev == 0 else d
        child_h = _child_hashes(np.repeat(hashes, width), _branch_pattern(len(hashes), width))
        child_t = np.repeat(times, width) + _weights(child_h, rate)
        mask = child_t <= t
        hashes = child_h[mask]
        times = child_t[mask]
        lev += 1
        if len(hashes) > 0:
            counts.append(int(len(hashes)))
    return counts, len(counts) - 1, hashes, times


@dataclass(frozen=True)
class ShapeCheck:
    """Result of comparing one cluster against the speed bounds."""

    lower_ok: bool
    upper_ok: bool
    inner_level: int
    max_reached_level: int


def shape_check(
    field: PassageTimeField, t: float, inner_speed: float, outer_speed: float
) -> ShapeCheck:
    """Check the growth-front bounds at time ``t``.

    ``lower_ok``: every vertex at level ``<= floor(t * inner_speed)`` has
    been reached.  ``upper_ok``: no vertex beyond level ``t * outer_speed``
    has been reached.  Requires ``t * outer_speed <= n_max`` so the answer
    is decidable within the horizon.
    """
    if t < 0.0:
        raise ConfigError(f"time must be >= 0, got {t}")
    if not (0.0 < inner_speed < outer_speed):
        raise ConfigError(
            f"speeds must satisfy 0 < inner < outer, got {inner_speed}, {outer_speed}"
        )
    if t * outer_speed > field.n_max:
        raise HorizonError(
            f"shape check at t={t} needs horizon >= {math.ceil(t * outer_speed)}, "
            f"field has n_max={field.n_max}"
        )
    inner_level = int(math.floor(t * inner_speed))
    lower_ok = all(
        bool(np.all(field.passage_times(lev) <= t)) for lev in range(inner_level + 1)
    )
    _, max_level = field.reach_counts_sparse(t, level_cap=field.n_max + 1)
    upper_ok = max_level <= t * outer_speed
    return ShapeCheck(lower_ok, upper_ok, inner_level, max_level)


# ---------------------------------------------------------------------------
# Two independent fields: exclusive counts and containment
# ---------------------------------------------------------------------------


def count_exclusive(
    params: TreeParams,
    lam: float,
    n: int,
    t: float,
    seed: int,
    max_vertices: int = DEFAULT_MAX_VERTICES,
) -> int:
    """Number of level-``n`` vertices reached by time ``t`` by a rate-1
    field but not by an independent rate-``lam`` field (dense evaluation)."""
    slow = PassageTimeField(params, 1.0, n, derive_seed(seed, _SLOW_TAG), max_vertices)
    fast = PassageTimeField(params, lam, n, derive_seed(seed, _FAST_TAG), max_vertices)
    t_slow = slow.passage_times(n)
    t_fast = fast.passage_times(n)
    return int(np.count_nonzero((t_slow <= t) & (t_fast > t)))


@dataclass(frozen=True)
class ContainmentSample:
    """One replica of the containment comparison at time ``t``."""

    violations: int
    reached: int
    max_level: int


def containment_sample(
    params: TreeParams,
    lam: float,
    t: float,
    seed: int,
    level_cap: int,
) -> ContainmentSample:
    """Grow the rate-1 cluster to time ``t`` and count its vertices that an
    independent rate-``lam`` cluster has not yet covered.

    Only the slow cluster is enumerated (pruned growth); the fast field is
    evaluated lazily along the same vertices, so the fast cluster's full
    (enormous) extent is never materialised.
    """
    if t < 0.0:
        raise ConfigError(f"time must be >= 0, got {t}")
    d = params.d
    h_slow = np.array([_root_hash(derive_seed(seed, _SLOW_TAG))], dtype=np.uint64)
    h_fast = np.array([_root_hash(derive_seed(seed, _FAST_TAG))], dtype=np.uint64)
    t_slow = np.zeros(1)
    t_fast = np.zeros(1)
    violations = 0
    reached = 1
    lev = 0
    while len(h_slow) > 0:
        width = d + 1 if lev == 0 else d
        branches = _branch_pattern(len(h_slow), width)
        child_hs = _child_hashes(np.repeat(h_slow, width), branches)
        child_ts = np.repeat(t_slow, width) + _weights(child_hs, 1.0)
        child_hf = _child_hashes(np.repeat(h_fast, width), branches)
        child_tf = np.repeat(t_fast, width) + _weights(child_hf, lam)
        mask = child_ts <= t
        if not mask.any():
            break
        lev += 1
        if lev > level_cap:
            raise HorizonError(
                f"containment at t={t} exceeded the level cap {level_cap}; "
                "increase the horizon"
            )
        h_slow, t_slow = child_hs[mask], child_ts[mask]
        h_fast, t_fast = child_hf[mask], child_tf[mask]
        reached += int(len(h_slow))
        violations += int(np.count_nonzero(t_fast > t))
    return ContainmentSample(violations=violations, reached=reached, max_level=lev)


# ---------------------------------------------------------------------------
# Offspring counts over depth-m blocks
# ---------------------------------------------------------------------------


def gw_offspring_sample(
    field: PassageTimeField, x: VertexId, m: int, threshold: float
) -> int:
    """Count forward descendants of ``x`` at depth ``m`` whose block passage
    time ``T(z) - T(x)`` is below ``threshold * m``.

    For a non-root ``x`` there are ``d**m`` candidates, each with an
    independent Erlang(``m``, rate) block sum, which makes the count the
    offspring variable of a Galton-Watson recursion with mean
    ``d**m * erlang_cdf(m, rate, threshold * m)``.
    """
    if m < 1:
        raise ConfigError(f"block depth must be >= 1, got {m}")
    if not (threshold > 0.0):
        raise ConfigError(f"threshold must be > 0, got {threshold}")
    validate_vertex(x, field.params)
    d = field.params.d
    target = len(x) + m
    times = field.passage_times(target)
    t_x = field.passage_time(x)
    if len(x) == 0:
        block = times  # all of level m (note: (d+1)*d**(m-1) candidates)
    else:
        idx = x[0]
        for step in x[1:]:
            idx = idx * d + step
        span = d**m
        block = times[idx * span : (idx + 1) * span]
    return int(np.count_nonzero(block - t_x < threshold * m))


def block_passage_counts(
    params: TreeParams,
    m: int,
    rate: float,
    threshold: float,
    samples: int,
    seed: int,
) -> np.ndarray:
    """Vectorised i.i.d. draws of the depth-``m`` offspring count.

    Each sample is an independent depth-``m`` subtree below a non-root
    vertex (``d`` branches per step, ``d**m`` leaves); returns an int
    array of length ``samples``.
    """
    counts_slow, _ = _paired_block_counts(
        params, m, rate, None, threshold * m, samples, seed
    )
    return counts_slow


def exclusive_block_counts(
    params: TreeParams,
    m: int,
    lam: float,
    horizon_time: float,
    samples: int,
    seed: int,
) -> np.ndarray:
    """Vectorised draws of the competitive offspring count: depth-``m``
    leaves whose rate-1 block sum is below ``horizon_time`` while an
    independent rate-``lam`` block sum is not."""
    _, counts_excl = _paired_block_counts(
        params, m, 1.0, lam, horizon_time, samples, seed
    )
    return counts_excl


def _paired_block_counts(
    params: TreeParams,
    m: int,
    rate: float,
    lam: float | None,
    limit: float,
    samples: int,
    seed: int,
) -> tuple[np.ndarray, np.ndarray]:
    if m < 1:
        raise ConfigError(f"block depth must be >= 1, got {m}")
    if samples < 1:
        raise ConfigError(f"sample count must be >= 1, got {samples}")
    d = params.d
    if samples * d**m > 50_000_000:
        raise ResourceError(
            f"{samples} samples at depth {m} need {samples * d ** m} leaves, "
            "over the 50M budget"
        )
    idx = np.arange(1, samples + 1, dtype=np.uint64)
    h_slow = mix64_array(np.uint64(derive_seed(seed, _SLOW_TAG)) ^ (idx * _U64_GOLDEN))
    t_slow = np.zeros(samples)
    if lam is not None:
        h_fast = mix64_array(np.uint64(derive_seed(seed, _FAST_TAG)) ^ (idx * _U64_GOLDEN))
        t_fast = np.zeros(samples)
    for _ in range(m):
        n = len(h_slow)
        branches = _branch_pattern(n, d)
        h_slow = _child_hashes(np.repeat(h_slow, d), branches)
        t_slow = np.repeat(t_slow, d) + _weights(h_slow, rate)
        if lam is not None:
            h_fast = _child_hashes(np.repeat(h_fast, d), branches)
            t_fast = np.repeat(t_fast, d) + _weights(h_fast, lam)
    span = d**m
    slow_in = (t_slow < limit).reshape(samples, span)
    counts_slow = slow_in.sum(axis=1).astype(np.int64)
    if lam is None:
        return counts_slow, counts_slow
    excl = (slow_in & (t_fast >= limit).reshape(samples, span)).sum(axis=1)
    return counts_slow, excl.astype(np.int64)


def passage_time_over_seeds(
    params: TreeParams, rate: float, v: VertexId, seeds: np.ndarray
) -> np.ndarray:
    """Passage time of the fixed vertex ``v`` under many field seeds at
    once (one independent field per seed)."""
    validate_vertex(v, params)
    h = mix64_array(seeds.astype(np.uint64) + _U64_GOLDEN)
    t = np.zeros(len(seeds))
    for branch in v:
        h = mix64_array(h ^ np.uint64(((branch + 1) * GOLDEN) & MASK64))
        t = t + _weights(h, rate)
    return t
