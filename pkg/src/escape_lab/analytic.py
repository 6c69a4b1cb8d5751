"""Closed-form rate functions, critical values, and exact expectations.

For single-type growth at rate 1 on the tree with branching number ``d``,
the probability that a fixed level-``n`` vertex is reached by time ``n/c``
decays (or saturates) at exponential rate governed by

    ``f(c) = 1/c - log(1/c) - 1 - log d``.

``f`` is negative exactly on an interval ``(a, b)`` around ``c = 1``; the
two roots are the inner (occupation) and outer (invasion) speeds of the
growth front.

For the two-type competition at rate ratio ``lam`` the corresponding
exponent for "the slow type arrives by ``n/c`` but the fast type has
not" is the piecewise profile

    ``g(c) = (lam/c - log(lam/c) - 1)                      - log d``  for 0 < c <= 1
    ``g(c) = (lam/c - log(lam/c) - 1) + (1/c - log(1/c) - 1) - log d``  for 1 < c < lam
    ``g(c) = f(c)``                                                    for c >= lam

``g`` is continuous, strictly convex-shaped around its unique minimiser
``c0 = (lam + 1) / 2`` where ``g(c0) = log((lam + 1)^2 / (4 lam d))``.
The minimum is negative iff ``1 < lam < lambda_critical(d)`` with

    ``lambda_critical(d) = (2 d - 1) + sqrt((2 d - 1)^2 - 1)``,

in which case ``g`` has two roots ``r1 < c0 < r2`` bounding the annulus
of speeds at which the slow type can outrun the sweep.

Erlang tail probabilities are computed with scaled series in log space
(term-ratio recursions against the largest term), which stays accurate
for shape parameters up to at least 10**4 and for deep tails far beyond
double-precision underflow.  They give *exact* finite-``n`` expectations
for reached / unreached / exclusively-reached vertex counts with no
asymptotic approximation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ConfigError, IndeterminateBandError
from .tree import TreeParams, sphere_size

DEFAULT_TOL = 1e-10
DEFAULT_MAX_ITER = 200


@dataclass(frozen=True)
class ModelParams:
    """Branching number ``d`` and rate ratio ``lam`` of the fast type."""

    d: int
    lam: float

    def __post_init__(self):
        if not isinstance(self.d, int) or self.d < 2:
            raise ConfigError(f"model parameter d must be an integer >= 2, got {self.d!r}")
        if not (self.lam > 1.0) or not math.isfinite(self.lam):
            raise ConfigError(f"rate ratio lam must be finite and > 1, got {self.lam!r}")

    @property
    def tree(self) -> TreeParams:
        return TreeParams(self.d)


@dataclass(frozen=True)
class SpeedPair:
    """Roots of the rate function: inner and outer front speeds."""

    a: float
    b: float
    residual_a: float
    residual_b: float

    def __post_init__(self):
        if not (0.0 < self.a < 1.0 < self.b):
            raise ConfigError(f"speeds must satisfy 0 < a < 1 < b, got {self.a}, {self.b}")


@dataclass(frozen=True)
class SurvivalBand:
    """Roots of the growth profile: the annulus of escape speeds."""

    r1: float
    r2: float
    residual_r1: float
    residual_r2: float

    def __post_init__(self):
        if not (0.0 < self.r1 < self.r2):
            raise ConfigError(f"band must satisfy 0 < r1 < r2, got {self.r1}, {self.r2}")


def _check_speed(c: float) -> float:
    if not (c > 0.0) or not math.isfinite(c):
        raise ConfigError(f"speed argument must be finite and > 0, got {c!r}")
    return c


def rate_function(c: float, d: int) -> float:
    """``f(c) = 1/c - log(1/c) - 1 - log d`` for rate-1 growth."""
    _check_speed(c)
    TreeParams(d)
    return 1.0 / c + math.log(c) - 1.0 - math.log(d)


def _fast_part(c: float, lam: float) -> float:
    """``lam/c - log(lam/c) - 1``: cost of the fast type arriving late."""
    x = lam / c
    return x - math.log(x) - 1.0


def _slow_part(c: float) -> float:
    """``1/c - log(1/c) - 1``: cost of the slow type arriving early."""
    return 1.0 / c + math.log(c) - 1.0


def growth_profile_pieces(c: float, params: ModelParams) -> tuple[float, float, float]:
    """Evaluate all three branch formulas of ``g`` at ``c``.

    Exposed so continuity at the branch points can be checked directly
    against the formulas rather than via one-sided limits.
    """
    _check_speed(c)
    base = -math.log(params.d)
    low = _fast_part(c, params.lam) + base
    mid = _fast_part(c, params.lam) + _slow_part(c) + base
    high = _slow_part(c) + base
    return low, mid, high


def growth_profile(c: float, params: ModelParams) -> float:
    """The piecewise exponent ``g(c)`` described in the module docstring."""
    low, mid, high = growth_profile_pieces(c, params)
    if c <= 1.0:
        return low
    if c < params.lam:
        return mid
    return high


def lambda_critical(d: int) -> float:
    """Largest rate ratio at which the slow type can still survive."""
    TreeParams(d)
    m = 2.0 * d - 1.0
    return m + math.sqrt(m * m - 1.0)


def profile_minimizer(params: ModelParams) -> tuple[float, float]:
    """Return ``(c0, g(c0))`` in closed form."""
    lam, d = params.lam, params.d
    c0 = (lam + 1.0) / 2.0
    gmin = math.log((lam + 1.0) ** 2 / (4.0 * lam * d))
    return c0, gmin


def _bisect(func, lo: float, hi: float, tol: float, max_iter: int) -> float:
    """Bisection on a bracketing interval; stops when |func| <= tol."""
    flo, fhi = func(lo), func(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if (flo > 0.0) == (fhi > 0.0):
        raise ConfigError(f"bisection bracket [{lo}, {hi}] does not straddle a root")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        fm = func(mid)
        if abs(fm) <= tol or hi - lo < 4.0 * math.ulp(mid):
            return mid
        if (fm > 0.0) == (flo > 0.0):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def richardson_speeds(
    d: int, tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER
) -> SpeedPair:
    """Locate both roots of ``f`` by bracket expansion plus bisection."""
    func = lambda c: rate_function(c, d)
    lo = 0.5
    while func(lo) <= 0.0:
        lo *= 0.5
        if lo < 1e-300:
            raise ConfigError("failed to bracket the inner speed")
    a = _bisect(func, lo, 1.0, tol, max_iter)
    hi = 2.0
    while func(hi) <= 0.0:
        hi *= 2.0
        if hi > 1e300:
            raise ConfigError("failed to bracket the outer speed")
    b = _bisect(func, 1.0, hi, tol, max_iter)
    return SpeedPair(a=a, b=b, residual_a=func(a), residual_b=func(b))


def escape_band(
    params: ModelParams, tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER
) -> SurvivalBand | None:
    """Roots of ``g`` when the minimum is negative; ``None`` when it is
    positive (no band).  Raises :class:`IndeterminateBandError` when the
    minimum is within ``tol`` of zero, i.e. at the critical rate ratio.
    """
    c0, gmin = profile_minimizer(params)
    if abs(gmin) <= tol:
        raise IndeterminateBandError(
            f"profile minimum {gmin:.3e} is within tolerance of zero; "
            "the rate ratio is at the critical point"
        )
    if gmin > 0.0:
        return None
    func = lambda c: growth_profile(c, params)
    lo = 0.5 * c0
    while func(lo) <= 0.0:
        lo *= 0.5
        if lo < 1e-300:
            raise ConfigError("failed to bracket the lower band edge")
    r1 = _bisect(func, lo, c0, tol, max_iter)
    hi = 2.0 * c0
    while func(hi) <= 0.0:
        hi *= 2.0
        if hi > 1e300:
            raise ConfigError("failed to bracket the upper band edge")
    r2 = _bisect(func, c0, hi, tol, max_iter)
    return SurvivalBand(r1=r1, r2=r2, residual_r1=func(r1), residual_r2=func(r2))


# ---------------------------------------------------------------------------
# Erlang tails
# ---------------------------------------------------------------------------


def _check_erlang_args(n: int, rate: float) -> None:
    if not isinstance(n, int) or n < 1:
        raise ConfigError(f"Erlang shape must be an integer >= 1, got {n!r}")
    if not (rate > 0.0) or not math.isfinite(rate):
        raise ConfigError(f"Erlang rate must be finite and > 0, got {rate!r}")


_REL_EPS = 1e-18


def _log_poisson_tail(n: int, mu: float) -> float:
    """``log P(Poisson(mu) >= n)`` for ``n > mu`` via a scaled upper series."""
    acc = 1.0
    term = 1.0
    k = n
    while True:
        k += 1
        term *= mu / k
        acc += term
        if term < _REL_EPS * acc:
            break
    return -mu + n * math.log(mu) - math.lgamma(n + 1) + math.log(acc)


def _log_poisson_head(m: int, mu: float) -> float:
    """``log P(Poisson(mu) <= m)`` for ``m < mu`` via a scaled lower series."""
    acc = 1.0
    term = 1.0
    k = m
    while k > 0:
        term *= k / mu
        k -= 1
        acc += term
        if term < _REL_EPS * acc:
            break
    return -mu + m * math.log(mu) - math.lgamma(m + 1) + math.log(acc)


def erlang_log_cdf(n: int, rate: float, t: float) -> float:
    """``log P(sum of n rate-`rate` exponentials <= t)``, stable in deep tails.

    Uses the Poisson duality ``P(Erlang(n, rate) <= t) = P(Poisson(rate*t) >= n)``
    and sums the smaller of head and tail in scaled form.
    """
    _check_erlang_args(n, rate)
    if t <= 0.0:
        return -math.inf
    mu = rate * t
    if n > mu:
        return _log_poisson_tail(n, mu)
    # n <= mu: the cdf is the large side (>= ~1/2), so its complement is
    # safely summed by the head series and log1p loses nothing.
    return math.log1p(-math.exp(_log_poisson_head(n - 1, mu)))


def erlang_log_sf(n: int, rate: float, t: float) -> float:
    """``log P(sum of n rate-`rate` exponentials > t)``, stable in deep tails."""
    _check_erlang_args(n, rate)
    if t <= 0.0:
        return 0.0
    mu = rate * t
    if n - 1 < mu:
        return _log_poisson_head(n - 1, mu)
    # n - 1 >= mu implies n > mu, so the cdf side is the small one.
    return math.log1p(-math.exp(_log_poisson_tail(n, mu)))


def erlang_cdf(n: int, rate: float, t: float) -> float:
    """``P(sum of n rate-`rate` exponentials <= t)`` in [0, 1]."""
    _check_erlang_args(n, rate)
    if t <= 0.0:
        return 0.0
    mu = rate * t
    if n > mu:
        return math.exp(_log_poisson_tail(n, mu))
    return -math.expm1(_log_poisson_head(n - 1, mu))


def erlang_sf(n: int, rate: float, t: float) -> float:
    """``P(sum of n rate-`rate` exponentials > t)`` in [0, 1]."""
    _check_erlang_args(n, rate)
    if t <= 0.0:
        return 1.0
    mu = rate * t
    if n - 1 < mu:
        return math.exp(_log_poisson_head(n - 1, mu))
    return -math.expm1(_log_poisson_tail(n, mu))


# ---------------------------------------------------------------------------
# Exact finite-n expectations
# ---------------------------------------------------------------------------


def _log_sphere(n: int, d: int) -> float:
    if n == 0:
        return 0.0
    return math.log(d + 1.0) + (n - 1) * math.log(d)


def _safe_exp(x: float) -> float:
    if x > 709.0:
        return math.inf
    return math.exp(x)


def log_expected_occupied(n: int, c: float, params: TreeParams, rate: float = 1.0) -> float:
    """``log E[number of level-n vertices reached by time n/c]`` (exact)."""
    _check_speed(c)
    return _log_sphere(n, params.d) + erlang_log_cdf(n, rate, n / c)


def expected_occupied(n: int, c: float, params: TreeParams, rate: float = 1.0) -> float:
    """``E[number of level-n vertices reached by time n/c]``; exactly
    ``sphere_size(n) * erlang_cdf(n, rate, n/c)``, no asymptotics.
    Overflows to ``inf`` for very large ``n``; use the log variant there."""
    _check_speed(c)
    return sphere_size(n, params) * erlang_cdf(n, rate, n / c)


def log_expected_vacant(n: int, c: float, params: TreeParams, rate: float = 1.0) -> float:
    """``log E[number of level-n vertices not reached by time n/c]``."""
    _check_speed(c)
    return _log_sphere(n, params.d) + erlang_log_sf(n, rate, n / c)


def expected_vacant(n: int, c: float, params: TreeParams, rate: float = 1.0) -> float:
    """``E[number of level-n vertices not yet reached at time n/c]``."""
    _check_speed(c)
    return sphere_size(n, params) * erlang_sf(n, rate, n / c)


def exclusive_probability(n: int, c: float, params: ModelParams) -> float:
    """Probability that a fixed level-``n`` vertex is reached by the rate-1
    process but not by an independent rate-``lam`` process at time ``n/c``."""
    _check_speed(c)
    t = n / c
    return erlang_cdf(n, 1.0, t) * erlang_sf(n, params.lam, t)


def log_exclusive_probability(n: int, c: float, params: ModelParams) -> float:
    """Log-space version of :func:`exclusive_probability`."""
    _check_speed(c)
    t = n / c
    return erlang_log_cdf(n, 1.0, t) + erlang_log_sf(n, params.lam, t)


def expected_exclusive(n: int, c: float, params: ModelParams) -> float:
    """``E[number of level-n vertices reached only by the slow type]``,
    exactly ``sphere_size(n) * exclusive_probability(n, c, params)``."""
    return sphere_size(n, params.tree) * exclusive_probability(n, c, params)


def log_expected_exclusive(n: int, c: float, params: ModelParams) -> float:
    """Log-space version of :func:`expected_exclusive`."""
    return _log_sphere(n, params.d) + log_exclusive_probability(n, c, params)
