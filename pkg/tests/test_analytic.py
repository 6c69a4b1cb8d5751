"""Closed-form quantities: speeds, profiles, and Erlang evaluations.

Reference values were computed once with 40-digit arbitrary-precision
arithmetic (regularized incomplete gamma) and frozen here.
"""
from __future__ import annotations

import math

import numpy as np
import pytest

from escape_lab.analytic import (
    DEFAULT_TOL,
    ModelParams,
    erlang_cdf,
    erlang_log_cdf,
    erlang_log_sf,
    erlang_sf,
    escape_band,
    exclusive_probability,
    expected_exclusive,
    expected_occupied,
    expected_vacant,
    growth_profile,
    growth_profile_pieces,
    lambda_critical,
    log_expected_occupied,
    profile_minimizer,
    rate_function,
    richardson_speeds,
)
from escape_lab.errors import ConfigError, IndeterminateBandError
from escape_lab.tree import TreeParams, sphere_size

# (n, rate, t) -> P(Erlang(n, rate) <= t), high-precision references.
ERLANG_CDF_REFERENCE = {
    (1, 1.0, 1.0): 0.63212055882855768,
    (10, 1.0, 8.0): 0.2833757412729891,
    (12, 1.0, 8.0): 0.11192400101851853,
    (12, 1.0, 15.0): 0.81524820097606857,
    (6, 1.0, 5.4): 0.45386789564180081,
    (10, 2.0, 5.0): 0.54207028552814779,
    (100, 1.0, 80.0): 0.017108313035133114,
    (10000, 1.0, 9900.0): 0.15865119219356466,
}
DEEP_TAIL_LOG_CDF = -1936.3029753315976  # log P(Erlang(10000, 1) <= 5000)
LOG_SF_12_40 = -16.61498505031028  # log P(Erlang(12, 1) > 40)


def test_lambda_critical_values():
    assert lambda_critical(2) == pytest.approx(3.0 + 2.0 * math.sqrt(2.0), abs=1e-15)
    assert lambda_critical(2) == pytest.approx(5.8284271247, abs=1e-9)
    assert lambda_critical(3) == pytest.approx(9.8989794856, abs=1e-9)
    # The critical value solves x^2 - 2(2d-1)x + 1 = 0, so residual ~ 0
    # and the two quadratic roots multiply to 1.
    for d in range(2, 11):
        x = lambda_critical(d)
        m = 2.0 * d - 1.0
        assert x * x - 2.0 * m * x + 1.0 == pytest.approx(0.0, abs=1e-9)
        assert x > 1.0


def test_rate_function_basics():
    # f(1) = -log d < 0 and f blows up at both ends.
    assert rate_function(1.0, 2) == pytest.approx(-math.log(2.0), abs=1e-15)
    assert rate_function(1e-6, 2) > 0.0
    assert rate_function(1e6, 2) > 0.0
    with pytest.raises(ConfigError):
        rate_function(0.0, 2)
    with pytest.raises(ConfigError):
        rate_function(-1.0, 2)
    with pytest.raises(ConfigError):
        rate_function(1.0, 1)


def test_richardson_speeds_residuals():
    for d in (2, 3, 5):
        sp = richardson_speeds(d)
        assert 0.0 < sp.a < 1.0 < sp.b
        assert abs(sp.residual_a) <= 1e-10
        assert abs(sp.residual_b) <= 1e-10
        assert abs(rate_function(sp.a, d)) <= 1e-10
        assert abs(rate_function(sp.b, d)) <= 1e-10
    sp2 = richardson_speeds(2)
    assert sp2.a == pytest.approx(0.37336, abs=1e-5)
    assert sp2.b == pytest.approx(4.31107, abs=1e-5)


def test_growth_profile_continuity():
    # The piecewise formulas agree at both joins to full precision.
    for d in (2, 3):
        for lam in (1.5, 2.0, 3.0, 5.0):
            params = ModelParams(d=d, lam=lam)
            low, mid, high = growth_profile_pieces(1.0, params)
            assert low == pytest.approx(mid, abs=1e-12)
            low, mid, high = growth_profile_pieces(lam, params)
            assert mid == pytest.approx(high, abs=1e-12)


def test_profile_minimizer_closed_form():
    grid = [(d, lam) for d in (2, 3, 4, 5) for lam in (1.2, 2.0, 3.5, 6.0, 9.0)]
    assert len(grid) == 20
    for d, lam in grid:
        params = ModelParams(d=d, lam=lam)
        c0, gmin = profile_minimizer(params)
        assert c0 == pytest.approx((lam + 1.0) / 2.0, abs=1e-15)
        assert gmin == pytest.approx(
            math.log((lam + 1.0) ** 2 / (4.0 * lam * d)), abs=1e-12
        )
        assert growth_profile(c0, params) == pytest.approx(gmin, abs=1e-12)
        # Local minimality around c0.
        h = 1e-4
        assert growth_profile(c0 - h, params) >= gmin
        assert growth_profile(c0 + h, params) >= gmin


def test_growth_profile_values():
    p = ModelParams(d=2, lam=2.0)
    assert growth_profile(1.5, p) == pytest.approx(math.log(9.0 / 16.0), abs=1e-12)
    assert growth_profile(1.0, p) == pytest.approx(1.0 - 2.0 * math.log(2.0), abs=1e-12)
    assert profile_minimizer(ModelParams(d=2, lam=5.0))[1] == pytest.approx(
        math.log(0.9), abs=1e-12
    )
    assert profile_minimizer(ModelParams(d=2, lam=8.0))[1] == pytest.approx(
        math.log(81.0 / 64.0), abs=1e-12
    )


def test_escape_band():
    band = escape_band(ModelParams(d=2, lam=2.0))
    assert band is not None
    assert 0.0 < band.r1 < band.r2
    p = ModelParams(d=2, lam=2.0)
    assert abs(growth_profile(band.r1, p)) <= 1e-10
    assert abs(growth_profile(band.r2, p)) <= 1e-10
    assert band.r1 == pytest.approx(0.7467295, abs=1e-6)
    assert band.r2 == pytest.approx(4.3110705, abs=1e-6)
    # Above the critical rate ratio the minimum is positive: no band.
    assert escape_band(ModelParams(d=2, lam=8.0)) is None
    with pytest.raises(IndeterminateBandError):
        escape_band(ModelParams(d=2, lam=lambda_critical(2)))


def test_band_root_ordering_against_speeds():
    # The band lies strictly inside the growth annulus (a, b).
    sp = richardson_speeds(2)
    band = escape_band(ModelParams(d=2, lam=2.0))
    assert sp.a < band.r1 < 1.0
    assert 1.0 < band.r2 < sp.b + 1e-6


def test_erlang_reference_values():
    for (n, rate, t), want in ERLANG_CDF_REFERENCE.items():
        tol = 1e-9 if n >= 10000 else 1e-10
        assert erlang_cdf(n, rate, t) == pytest.approx(want, rel=tol)
        assert erlang_sf(n, rate, t) == pytest.approx(1.0 - want, rel=1e-9)
    assert erlang_log_cdf(10000, 1.0, 5000.0) == pytest.approx(
        DEEP_TAIL_LOG_CDF, rel=1e-12
    )
    assert erlang_log_sf(12, 1.0, 40.0) == pytest.approx(LOG_SF_12_40, rel=1e-12)


def test_erlang_identities():
    # cdf + sf = 1, log forms consistent, monotone in t, rate scaling.
    for n in (1, 3, 12, 40):
        for t in (0.5, 2.0, 10.0, 50.0):
            c = erlang_cdf(n, 1.0, t)
            s = erlang_sf(n, 1.0, t)
            assert c + s == pytest.approx(1.0, abs=1e-12)
            assert math.exp(erlang_log_cdf(n, 1.0, t)) == pytest.approx(c, rel=1e-12)
            assert math.exp(erlang_log_sf(n, 1.0, t)) == pytest.approx(s, rel=1e-12)
            assert erlang_cdf(n, 2.0, t) == pytest.approx(
                erlang_cdf(n, 1.0, 2.0 * t), rel=1e-12
            )
    ts = np.linspace(0.1, 30.0, 60)
    vals = [erlang_cdf(8, 1.0, t) for t in ts]
    assert all(b >= a for a, b in zip(vals, vals[1:]))


def test_erlang_edges():
    assert erlang_cdf(5, 1.0, 0.0) == 0.0
    assert erlang_sf(5, 1.0, 0.0) == 1.0
    assert erlang_log_cdf(5, 1.0, 0.0) == -math.inf
    assert erlang_log_sf(5, 1.0, 0.0) == 0.0
    # n = 1 reduces to the exponential distribution.
    for t in (0.3, 1.0, 4.0):
        assert erlang_cdf(1, 1.0, t) == pytest.approx(1.0 - math.exp(-t), rel=1e-14)
    # Times at or before zero are trivially unreached, not an error.
    assert erlang_cdf(3, 1.0, -0.5) == 0.0
    assert erlang_sf(3, 1.0, -0.5) == 1.0
    with pytest.raises(ConfigError):
        erlang_cdf(0, 1.0, 1.0)
    with pytest.raises(ConfigError):
        erlang_cdf(3, -1.0, 1.0)


def test_expected_counts():
    P2 = TreeParams(d=2)
    # Expected occupied = sphere size x Erlang cdf at t = n/c.
    for n, c in ((12, 1.5), (10, 0.8), (6, 3.0)):
        t = n / c
        want = sphere_size(n, P2) * erlang_cdf(n, 1.0, t)
        assert expected_occupied(n, c, P2) == pytest.approx(want, rel=1e-12)
        assert expected_vacant(n, c, P2) == pytest.approx(
            sphere_size(n, P2) - want, rel=1e-9
        )
    assert 6144 * erlang_cdf(12, 1.0, 8.0) == pytest.approx(687.66106, abs=1e-4)
    assert 6144 * erlang_sf(12, 1.0, 15.0) == pytest.approx(1135.1151, abs=1e-4)


def test_expected_occupied_exponent_error_decreases():
    # (1/n) log E N_n(n/c) approaches -f(c); the gap shrinks with n.
    P2 = TreeParams(d=2)
    for c in (1.5, 2.0, 3.0):
        errs = []
        for n in (100, 500, 2000):
            got = log_expected_occupied(n, c, P2) / n
            errs.append(abs(got + rate_function(c, 2)))
        assert errs[0] > errs[1] > errs[2]
        assert errs[2] <= 0.05


def test_exclusive_probability_product_form():
    p = ModelParams(d=2, lam=2.0)
    for n, c in ((10, 1.2), (8, 1.5), (5, 0.9)):
        t = n / c
        want = erlang_cdf(n, 1.0, t) * erlang_sf(n, p.lam, t)
        assert exclusive_probability(n, c, p) == pytest.approx(want, rel=1e-12)
        assert expected_exclusive(n, c, p) == pytest.approx(
            sphere_size(n, p.tree) * want, rel=1e-12
        )
    assert expected_exclusive(10, 1.2, p) == pytest.approx(15.5012007760912, rel=1e-12)
    assert expected_exclusive(8, 1.5, p) == pytest.approx(10.8666921359314, rel=1e-12)


def test_exclusive_superadditivity_small():
    # Full-range version lives in the acceptance suite; spot-check here.
    p = ModelParams(d=2, lam=2.0)
    for c in (0.5, 1.5, 5.0):
        for m in (1, 4, 9):
            for n in (2, 7, 13):
                lhs = exclusive_probability(m, c, p) * exclusive_probability(n, c, p)
                rhs = exclusive_probability(m + n, c, p)
                assert lhs <= rhs * (1.0 + 1e-12)


def test_model_params_validation():
    with pytest.raises(ConfigError):
        ModelParams(d=2, lam=0.0)
    with pytest.raises(ConfigError):
        ModelParams(d=2, lam=-3.0)
    with pytest.raises(ConfigError):
        ModelParams(d=1, lam=2.0)
    assert ModelParams(d=2, lam=2.0).tree == TreeParams(d=2)
    assert DEFAULT_TOL == 1e-10
