"""Monte Carlo experiment harness.

Every experiment follows the same discipline:

* replica seeds are derived from the master seed and the replica's
  coordinates (never from execution order or wall-clock), so reruns are
  reproducible and worker count never affects results;
* work is distributed with an order-preserving parallel map; aggregation
  happens in submission order, so it is insensitive to completion order;
* no point estimate is reported without its replica count and a Wilson
  95% interval (frequencies) or a standard error (means);
* output files are written atomically, as a CSV whose bytes depend only
  on the configuration plus a JSON metadata sidecar (the sidecar, not
  the CSV, carries wall-clock information).
"""

from __future__ import annotations

import csv
import json
import math
import os
import subprocess
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import richardson
from .analytic import (
    ModelParams,
    erlang_cdf,
    expected_exclusive,
    growth_profile,
    richardson_speeds,
)
from .errors import ConfigError
from .escape import Budget, EscapeSimulation, InitialConfig
from .escape import run as escape_run
from .rng import derive_seed
from .tree import TreeParams

WILSON_Z = 1.959963984540054  # two-sided 95%

DEFAULT_EVENT_GUARD = 20_000_000

_TAG_SURVIVAL = 1
_TAG_CRITICAL = 2
_TAG_PROFILE = 3
_TAG_CONTAINMENT = 4
_TAG_EXCLUSIVE = 5
_TAG_GW = 6


def wilson_interval(successes: int, trials: int, z: float = WILSON_Z) -> tuple[float, float]:
    """Wilson score 95% interval for a binomial proportion."""
    if trials <= 0:
        raise ConfigError(f"trials must be >= 1, got {trials}")
    if not 0 <= successes <= trials:
        raise ConfigError(f"successes must be in [0, {trials}], got {successes}")
    p = successes / trials
    z2 = z * z
    denom = 1.0 + z2 / trials
    centre = p + z2 / (2.0 * trials)
    spread = z * math.sqrt(p * (1.0 - p) / trials + z2 / (4.0 * trials * trials))
    low = min(max((centre - spread) / denom, 0.0), 1.0)
    high = min(max((centre + spread) / denom, low), 1.0)
    # At the boundary counts the matching endpoint is exactly the
    # observed proportion; rounding otherwise leaves ~1e-17 dust there.
    if successes == 0:
        low = 0.0
    if successes == trials:
        high = 1.0
    return low, high


# ---------------------------------------------------------------------------
# Parallel map
# ---------------------------------------------------------------------------


def resolve_workers(workers: int | None) -> int:
    """Worker count: ESCAPE_LAB_WORKERS env var, else the argument, else
    available parallelism."""
    env = os.environ.get("ESCAPE_LAB_WORKERS")
    if env is not None:
        try:
            count = int(env)
        except ValueError:
            raise ConfigError(
                f"ESCAPE_LAB_WORKERS must be an integer, got {env!r}"
            ) from None
    elif workers is not None:
        count = workers
    else:
        count = os.cpu_count() or 1
    if count < 1:
        raise ConfigError(f"worker count must be >= 1, got {count}")
    return count


def _map_tasks(fn, tasks: list, workers: int | None) -> list:
    count = min(resolve_workers(workers), len(tasks)) if tasks else 1
    if count <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=count) as pool:
        chunk = max(1, len(tasks) // (count * 8))
        return list(pool.map(fn, tasks, chunksize=chunk))


# ---------------------------------------------------------------------------
# Atomic output
# ---------------------------------------------------------------------------


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _atomic_write(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix="~")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def _git_describe() -> str | None:
    try:
        proc = subprocess.run(
            ["git", "describe", "--always", "--dirty"],
            capture_output=True,
            text=True,
            timeout=5,
            cwd=os.path.dirname(os.path.abspath(__file__)),
        )
    except (OSError, subprocess.SubprocessError):
        return None
    if proc.returncode != 0:
        return None
    return proc.stdout.strip() or None


def save_table(path: str, header: list[str], rows: list[tuple], metadata: dict) -> None:
    """Write ``path`` (CSV) and ``path + '.meta.json'`` (sidecar) atomically.

    Both files are pure functions of their inputs (plus the package
    version and build description), so rerunning an experiment with the
    same seed reproduces every artifact byte for byte.  Deliberately no
    timestamps.
    """
    import io

    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    _atomic_write(path, buffer.getvalue())
    from . import __version__

    sidecar = dict(metadata)
    sidecar.setdefault("package_version", __version__)
    sidecar.setdefault("build", _git_describe())
    _atomic_write(path + ".meta.json", json.dumps(sidecar, indent=2, sort_keys=True) + "\n")


# ---------------------------------------------------------------------------
# Survival scan
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SurvivalScanConfig:
    """Grid of takeover rates scanned with a shared protocol."""

    d: int
    lam_grid: tuple[float, ...]
    initial: InitialConfig
    replicas: int
    budget: Budget
    master_seed: int = 0
    engine: str | None = None
    workers: int | None = None

    def __post_init__(self):
        if not self.lam_grid:
            raise ConfigError("lam_grid must be nonempty")
        if self.replicas < 1:
            raise ConfigError(f"replicas must be >= 1, got {self.replicas}")


@dataclass(frozen=True)
class SurvivalRow:
    lam: float
    replicas: int
    extinct: int
    alive_at_budget: int
    survival_freq: float
    wilson_low: float
    wilson_high: float
    mean_extinction_time: float | None
    event_censored: int


@dataclass(frozen=True)
class SurvivalCurve:
    rows: tuple[SurvivalRow, ...]

    HEADER = [
        "lam",
        "replicas",
        "extinct",
        "alive_at_budget",
        "survival_freq",
        "wilson_low",
        "wilson_high",
        "mean_extinction_time",
        "event_censored",
    ]

    def csv_rows(self) -> list[tuple]:
        return [
            (
                r.lam,
                r.replicas,
                r.extinct,
                r.alive_at_budget,
                r.survival_freq,
                r.wilson_low,
                r.wilson_high,
                r.mean_extinction_time,
                r.event_censored,
            )
            for r in self.rows
        ]


def _survival_task(args) -> tuple[bool, float, str]:
    initial, params, budget, seed, engine = args
    out = escape_run(initial, params, budget, seed=seed, engine=engine)
    ext = out.extinction_time if out.extinction_time is not None else math.nan
    return out.status == "extinct", ext, out.stop_reason


def survival_scan(cfg: SurvivalScanConfig) -> SurvivalCurve:
    """Survival-proxy frequency (alive-at-budget rate) per takeover rate.

    Raw frequencies; no monotonicity smoothing.  Runs stopped by the
    event guard are reported in ``event_censored`` (they count as
    alive-at-budget, since extinction was not observed).
    """
    tasks = []
    for li, lam in enumerate(cfg.lam_grid):
        params = ModelParams(cfg.d, lam)
        for rep in range(cfg.replicas):
            seed = derive_seed(cfg.master_seed, _TAG_SURVIVAL, li, rep)
            tasks.append((cfg.initial, params, cfg.budget, seed, cfg.engine))
    results = _map_tasks(_survival_task, tasks, cfg.workers)
    rows = []
    for li, lam in enumerate(cfg.lam_grid):
        chunk = results[li * cfg.replicas : (li + 1) * cfg.replicas]
        extinct = sum(1 for e, _, _ in chunk if e)
        alive = cfg.replicas - extinct
        censored = sum(1 for _, _, reason in chunk if reason == "events")
        times = [t for e, t, _ in chunk if e and not math.isnan(t)]
        low, high = wilson_interval(alive, cfg.replicas)
        rows.append(
            SurvivalRow(
                lam=lam,
                replicas=cfg.replicas,
                extinct=extinct,
                alive_at_budget=alive,
                survival_freq=alive / cfg.replicas,
                wilson_low=low,
                wilson_high=high,
                mean_extinction_time=(sum(times) / len(times)) if times else None,
                event_censored=censored,
            )
        )
    return SurvivalCurve(rows=tuple(rows))


# ---------------------------------------------------------------------------
# Critical-value localisation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CriticalEvaluation:
    lam: float
    alive: int
    replicas: int
    freq: float


@dataclass(frozen=True)
class CriticalEstimate:
    """Bisection localisation of the survival/extinction crossover.

    The interval is a Monte Carlo localisation, not a hypothesis test;
    the finite level budget biases the proxy toward survival, so the
    crossover estimate inherits an upward bias (documented, not
    corrected).  ``flagged`` marks non-monotone frequency evaluations,
    in which case the interval was widened by one bisection step.
    """

    lam_low: float
    lam_high: float
    threshold: float
    evaluations: tuple[CriticalEvaluation, ...]
    flagged: bool

    HEADER = ["eval_index", "lam", "alive", "replicas", "freq"]

    def csv_rows(self) -> list[tuple]:
        return [
            (i, e.lam, e.alive, e.replicas, e.freq)
            for i, e in enumerate(self.evaluations)
        ]


def critical_estimate(
    d: int,
    bracket: tuple[float, float],
    replicas: int,
    budget: Budget,
    tol: float,
    initial: InitialConfig | None = None,
    master_seed: int = 0,
    engine: str | None = None,
    workers: int | None = None,
    max_evals: int = 40,
) -> CriticalEstimate:
    """Bisect on the takeover rate using the survival-proxy frequency.

    The crossing target is the midpoint of the bracket-end frequencies.
    The bracket must straddle the transition empirically: the low end
    must show a strictly higher survival frequency than the high end.
    """
    lo, hi = bracket
    if not (1.0 < lo < hi):
        raise ConfigError(f"bracket must satisfy 1 < low < high, got {bracket}")
    if replicas < 1:
        raise ConfigError(f"replicas must be >= 1, got {replicas}")
    if tol <= 0.0:
        raise ConfigError(f"tol must be > 0, got {tol}")
    if initial is None:
        initial = InitialConfig(a0=((),), b0=((0,),))

    evaluations: list[CriticalEvaluation] = []

    def freq(lam: float, eval_index: int) -> float:
        params = ModelParams(d, lam)
        tasks = [
            (
                initial,
                params,
                budget,
                derive_seed(master_seed, _TAG_CRITICAL, eval_index, rep),
                engine,
            )
            for rep in range(replicas)
        ]
        results = _map_tasks(_survival_task, tasks, workers)
        alive = sum(1 for e, _, _ in results if not e)
        evaluations.append(
            CriticalEvaluation(lam=lam, alive=alive, replicas=replicas, freq=alive / replicas)
        )
        return alive / replicas

    f_lo = freq(lo, 0)
    f_hi = freq(hi, 1)
    if not f_lo > f_hi:
        raise ConfigError(
            f"bracket does not straddle the transition: survival frequency "
            f"{f_lo} at lam={lo} is not above {f_hi} at lam={hi}"
        )
    threshold = 0.5 * (f_lo + f_hi)
    flagged = False
    eval_index = 2
    last_width = hi - lo
    while hi - lo > tol and eval_index < max_evals:
        mid = 0.5 * (lo + hi)
        f_mid = freq(mid, eval_index)
        eval_index += 1
        if f_mid > f_lo or f_mid < f_hi:
            flagged = True  # noisier than the bracket ends allow
        if f_mid >= threshold:
            lo = mid
        else:
            hi = mid
        last_width = hi - lo
    if flagged:
        lo = max(bracket[0], lo - last_width)
        hi = min(bracket[1], hi + last_width)
    return CriticalEstimate(
        lam_low=lo,
        lam_high=hi,
        threshold=threshold,
        evaluations=tuple(evaluations),
        flagged=flagged,
    )


# ---------------------------------------------------------------------------
# Growth-profile exponents
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ProfileConfig:
    """Level-count measurements M_n(n/c) on a (c, n) grid."""

    d: int
    lam: float
    initial: InitialConfig
    c_grid: tuple[float, ...]
    n_list: tuple[int, ...]
    replicas: int
    max_events: int = DEFAULT_EVENT_GUARD
    master_seed: int = 0
    engine: str | None = None
    workers: int | None = None

    def __post_init__(self):
        if not self.c_grid or not self.n_list:
            raise ConfigError("c_grid and n_list must be nonempty")
        if any(c <= 0 for c in self.c_grid):
            raise ConfigError("all speeds c must be > 0")
        if self.replicas < 1:
            raise ConfigError(f"replicas must be >= 1, got {self.replicas}")


@dataclass(frozen=True)
class ProfileRow:
    c: float
    n: int
    t: float
    replicas: int
    surviving: int
    censored: int
    mean_count_surviving: float | None
    mean_count_all: float
    empirical_exponent: float | None
    analytic_exponent: float
    insufficient_data: bool


@dataclass(frozen=True)
class ProfileTable:
    rows: tuple[ProfileRow, ...]

    HEADER = [
        "c",
        "n",
        "t",
        "replicas",
        "surviving",
        "censored",
        "mean_count_surviving",
        "mean_count_all",
        "empirical_exponent",
        "analytic_exponent",
        "insufficient_data",
    ]

    def csv_rows(self) -> list[tuple]:
        return [
            (
                r.c,
                r.n,
                r.t,
                r.replicas,
                r.surviving,
                r.censored,
                r.mean_count_surviving,
                r.mean_count_all,
                r.empirical_exponent,
                r.analytic_exponent,
                r.insufficient_data,
            )
            for r in self.rows
        ]


def _profile_task(args) -> tuple[int, bool, bool]:
    initial, params, t, n, max_events, seed, engine = args
    sim = EscapeSimulation(initial, params, seed=seed, engine=engine)
    reason = sim.run_until(max_time=t, max_events=max_events)
    count = sim.count_type1(n) if reason == "time" else 0
    return count, reason == "time" and sim.n_type1 > 0, reason == "events"


def profile_estimate(cfg: ProfileConfig) -> ProfileTable:
    """Empirical growth exponents (1/n)·log(mean M_n(n/c)) next to the
    analytic profile value.

    The exponent is computed over surviving replicas (alive at n/c);
    the unconditional mean over all non-censored replicas is reported
    alongside for bound checks.  A row with no surviving replicas is
    marked ``insufficient_data``.
    """
    params = ModelParams(cfg.d, cfg.lam)
    tasks = []
    coords = []
    for ci, c in enumerate(cfg.c_grid):
        for ni, n in enumerate(cfg.n_list):
            if n < 1:
                raise ConfigError(f"levels must be >= 1, got {n}")
            t = n / c
            for rep in range(cfg.replicas):
                seed = derive_seed(cfg.master_seed, _TAG_PROFILE, ci, ni, rep)
                tasks.append((cfg.initial, params, t, n, cfg.max_events, seed, cfg.engine))
            coords.append((c, n, t))
    results = _map_tasks(_profile_task, tasks, cfg.workers)
    rows = []
    for k, (c, n, t) in enumerate(coords):
        chunk = results[k * cfg.replicas : (k + 1) * cfg.replicas]
        censored = sum(1 for _, _, ev in chunk if ev)
        counts_all = [m for m, _, ev in chunk if not ev]
        counts_surv = [m for m, alive, ev in chunk if alive and not ev]
        mean_all = (sum(counts_all) / len(counts_all)) if counts_all else 0.0
        if counts_surv:
            mean_surv = sum(counts_surv) / len(counts_surv)
            emp = math.log(mean_surv) / n if mean_surv > 0 else None
        else:
            mean_surv = None
            emp = None
        rows.append(
            ProfileRow(
                c=c,
                n=n,
                t=t,
                replicas=cfg.replicas,
                surviving=len(counts_surv),
                censored=censored,
                mean_count_surviving=mean_surv,
                mean_count_all=mean_all,
                empirical_exponent=emp,
                analytic_exponent=-growth_profile(c, params),
                insufficient_data=not counts_surv,
            )
        )
    return ProfileTable(rows=tuple(rows))


# ---------------------------------------------------------------------------
# Two-field containment
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ContainmentRow:
    t: float
    replicas: int
    violating_replicas: int
    violation_freq: float
    wilson_low: float
    wilson_high: float
    mean_violating_vertices: float


@dataclass(frozen=True)
class ContainmentTable:
    rows: tuple[ContainmentRow, ...]

    HEADER = [
        "t",
        "replicas",
        "violating_replicas",
        "violation_freq",
        "wilson_low",
        "wilson_high",
        "mean_violating_vertices",
    ]

    def csv_rows(self) -> list[tuple]:
        return [
            (
                r.t,
                r.replicas,
                r.violating_replicas,
                r.violation_freq,
                r.wilson_low,
                r.wilson_high,
                r.mean_violating_vertices,
            )
            for r in self.rows
        ]


def _containment_task(args) -> int:
    d, lam, t, seed, cap = args
    sample = richardson.containment_sample(TreeParams(d), lam, t, seed, cap)
    return sample.violations


def containment_experiment(
    d: int,
    lam: float,
    t_list: tuple[float, ...],
    replicas: int,
    master_seed: int = 0,
    workers: int | None = None,
) -> ContainmentTable:
    """Frequency with which an independent rate-``lam`` cluster fails to
    cover the rate-1 cluster at each time.

    Each replica grows the rate-1 cluster exactly and evaluates the
    lazily-coupled independent fast field on those vertices only.
    """
    if not t_list:
        raise ConfigError("t_list must be nonempty")
    if replicas < 1:
        raise ConfigError(f"replicas must be >= 1, got {replicas}")
    speeds = richardson_speeds(d)
    tasks = []
    for ti, t in enumerate(t_list):
        cap = math.ceil(t * (speeds.b + 1.0)) + 10
        for rep in range(replicas):
            seed = derive_seed(master_seed, _TAG_CONTAINMENT, ti, rep)
            tasks.append((d, lam, t, seed, cap))
    results = _map_tasks(_containment_task, tasks, workers)
    rows = []
    for ti, t in enumerate(t_list):
        chunk = results[ti * replicas : (ti + 1) * replicas]
        violating = sum(1 for v in chunk if v > 0)
        low, high = wilson_interval(violating, replicas)
        rows.append(
            ContainmentRow(
                t=t,
                replicas=replicas,
                violating_replicas=violating,
                violation_freq=violating / replicas,
                wilson_low=low,
                wilson_high=high,
                mean_violating_vertices=sum(chunk) / replicas,
            )
        )
    return ContainmentTable(rows=tuple(rows))


# ---------------------------------------------------------------------------
# Exclusive counts
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ExclusiveCountResult:
    """Monte Carlo mean of the slow-not-fast count against its exact
    expectation, with the z-score of the discrepancy."""

    d: int
    lam: float
    n: int
    c: float
    t: float
    replicas: int
    mean_exclusive: float
    exact_expectation: float
    std_error: float
    z_score: float

    HEADER = [
        "d",
        "lam",
        "n",
        "c",
        "t",
        "replicas",
        "mean_exclusive",
        "exact_expectation",
        "std_error",
        "z_score",
    ]

    def csv_rows(self) -> list[tuple]:
        return [
            (
                self.d,
                self.lam,
                self.n,
                self.c,
                self.t,
                self.replicas,
                self.mean_exclusive,
                self.exact_expectation,
                self.std_error,
                self.z_score,
            )
        ]


def _exclusive_task(args) -> int:
    d, lam, n, t, seed = args
    return richardson.count_exclusive(TreeParams(d), lam, n, t, seed)


def exclusive_count_experiment(
    d: int,
    lam: float,
    n: int,
    c: float,
    replicas: int,
    master_seed: int = 0,
    workers: int | None = None,
) -> ExclusiveCountResult:
    """Compare the simulated exclusive count against the exact product
    expectation at time n/c."""
    if replicas < 2:
        raise ConfigError(f"replicas must be >= 2 for a standard error, got {replicas}")
    t = n / c
    tasks = [
        (d, lam, n, t, derive_seed(master_seed, _TAG_EXCLUSIVE, rep))
        for rep in range(replicas)
    ]
    results = np.array(_map_tasks(_exclusive_task, tasks, workers), dtype=np.float64)
    mean = float(results.mean())
    se = float(results.std(ddof=1) / math.sqrt(replicas))
    exact = expected_exclusive(n, c, ModelParams(d, lam))
    if se > 0:
        z = (mean - exact) / se
    else:
        z = 0.0 if mean == exact else math.copysign(math.inf, mean - exact)
    return ExclusiveCountResult(
        d=d,
        lam=lam,
        n=n,
        c=c,
        t=t,
        replicas=replicas,
        mean_exclusive=mean,
        exact_expectation=exact,
        std_error=se,
        z_score=z,
    )


# ---------------------------------------------------------------------------
# Offspring-count experiments
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GwOffspringResult:
    """Depth-m offspring mean against the exact Erlang oracle."""

    d: int
    m: int
    threshold: float
    samples: int
    mean_offspring: float
    oracle_mean: float
    std_error: float
    z_score: float

    HEADER = [
        "d",
        "m",
        "threshold",
        "samples",
        "mean_offspring",
        "oracle_mean",
        "std_error",
        "z_score",
    ]

    def csv_rows(self) -> list[tuple]:
        return [
            (
                self.d,
                self.m,
                self.threshold,
                self.samples,
                self.mean_offspring,
                self.oracle_mean,
                self.std_error,
                self.z_score,
            )
        ]


def gw_offspring_experiment(
    d: int,
    m: int,
    threshold: float,
    samples: int,
    master_seed: int = 0,
) -> GwOffspringResult:
    """Mean depth-``m`` block offspring count versus the exact value
    ``d**m * erlang_cdf(m, 1, threshold*m)`` (vectorised, single pass)."""
    if samples < 2:
        raise ConfigError(f"samples must be >= 2 for a standard error, got {samples}")
    counts = richardson.block_passage_counts(
        TreeParams(d), m, 1.0, threshold, samples, derive_seed(master_seed, _TAG_GW)
    )
    mean = float(counts.mean())
    se = float(counts.std(ddof=1) / math.sqrt(samples))
    oracle = d**m * erlang_cdf(m, 1.0, threshold * m)
    if se > 0:
        z = (mean - oracle) / se
    else:
        z = 0.0 if mean == oracle else math.copysign(math.inf, mean - oracle)
    return GwOffspringResult(
        d=d,
        m=m,
        threshold=threshold,
        samples=samples,
        mean_offspring=mean,
        oracle_mean=oracle,
        std_error=se,
        z_score=z,
    )


@dataclass(frozen=True)
class EscapeOffspringRow:
    m: int
    samples: int
    mean_offspring: float
    exponent: float | None
    target_exponent: float


@dataclass(frozen=True)
class EscapeOffspringTable:
    rows: tuple[EscapeOffspringRow, ...]

    HEADER = ["m", "samples", "mean_offspring", "exponent", "target_exponent"]

    def csv_rows(self) -> list[tuple]:
        return [
            (r.m, r.samples, r.mean_offspring, r.exponent, r.target_exponent)
            for r in self.rows
        ]


def escape_offspring_trend(
    d: int,
    lam: float,
    c: float,
    m_list: tuple[int, ...],
    samples: int,
    master_seed: int = 0,
) -> EscapeOffspringTable:
    """Competitive offspring means over a range of block depths.

    The counted leaves are those the slow field reaches within m/c while
    an independent fast field has not; the per-depth exponent
    (1/m)·log(mean) is reported next to the growth-profile target -g(c).
    There is no exact oracle for the trend itself, only for each depth's
    expectation, so the table reports the trend without asserting a rate.
    """
    if not m_list:
        raise ConfigError("m_list must be nonempty")
    params = ModelParams(d, lam)
    target = -growth_profile(c, params)
    rows = []
    for mi, m in enumerate(m_list):
        counts = richardson.exclusive_block_counts(
            TreeParams(d),
            m,
            lam,
            m / c,
            samples,
            derive_seed(master_seed, _TAG_GW, mi),
        )
        mean = float(counts.mean())
        exponent = math.log(mean) / m if mean > 0 else None
        rows.append(
            EscapeOffspringRow(
                m=m,
                samples=samples,
                mean_offspring=mean,
                exponent=exponent,
                target_exponent=target,
            )
        )
    return EscapeOffspringTable(rows=tuple(rows))
