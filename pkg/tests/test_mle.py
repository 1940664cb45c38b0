import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.optimize import brentq

from relimon.failure_data import FailureSeries, GroupedSeries, group_by_order
from relimon.go_model import GoParams
from relimon.mle import (
    FitError,
    SolverConfig,
    a_given_b,
    fit,
    fit_oracle,
    log_likelihood,
    log_likelihood_gradient,
    profile_log_likelihood,
    profile_score,
    profile_score_derivative,
)
from relimon.simulate import SimConfig, horizon_for_expected, simulate_nhpp

from conftest import PUBLISHED_AB, central_difference

# MLEs on the Musa data, frozen from fit_oracle (grid + golden section on the
# profile likelihood, no score equation involved)
MLE = {
    1: (142.88091, 3.4203783e-05),
    4: (2.4154999, 9.0880954e-05),
    5: (1.9335005, 1.0301368e-04),
}


def test_log_likelihood_hand_value():
    g = GroupedSeries(1, (1.0,))
    assert log_likelihood(g, 1.0, 1.0) == pytest.approx(-1.632121, abs=1e-6)
    assert log_likelihood(g, 1.0, 1.0) == pytest.approx(-(1 - math.exp(-1)) - 1, rel=1e-15)


def test_log_likelihood_b_derivative(musa_r4):
    a, b, h = 2.4, 1e-4, 1e-9
    fd = central_difference(lambda x: log_likelihood(musa_r4, a, x), b, h)
    _, d_b = log_likelihood_gradient(musa_r4, a, b)
    assert d_b == pytest.approx(fd, rel=1e-5)


def test_log_likelihood_a_derivative(musa_r4):
    a, b = 2.4, 1e-4
    fd = central_difference(lambda x: log_likelihood(musa_r4, x, b), a, 1e-6)
    d_a, _ = log_likelihood_gradient(musa_r4, a, b)
    assert d_a == pytest.approx(fd, rel=1e-5)


def test_log_likelihood_rejects_bad_params(musa_r4):
    for a, b in [(0, 1e-4), (2, 0), (-1, 1e-4), (2, math.nan)]:
        with pytest.raises(ValueError):
            log_likelihood(musa_r4, a, b)


def test_log_likelihood_overflow_is_an_error(musa_r4):
    with pytest.raises(OverflowError):
        log_likelihood(musa_r4, 1e200, 1e-4)


def test_log_likelihood_log_space_branch():
    # r ln a > 650 but the product stays finite
    g = GroupedSeries(5, (1.0, 2.0))
    a, b = 1e140, 1e-90
    f_n = -math.expm1(-b * 2.0)
    expected = -((a * f_n) ** 5)
    assert math.isfinite(expected)
    got = log_likelihood(g, a, b)
    rest = sum(5 * math.log(a) + math.log(b) + math.log(5) - b * s + 4 * math.log(-math.expm1(-b * s)) for s in (1.0, 2.0))
    assert got == pytest.approx(expected + rest, rel=1e-12)


def test_optimum_dominates_grid(musa_r4):
    res = fit(musa_r4)
    best = res.log_lik
    a_grid = np.linspace(0.5 * res.a, 2 * res.a, 200)
    b_grid = np.linspace(0.5 * res.b, 2 * res.b, 200)
    worst_gap = min(best - log_likelihood(musa_r4, a, b) for a in a_grid for b in b_grid)
    assert worst_gap >= -1e-9


def test_published_point_is_not_the_maximum(musa_r4):
    # the published (a, b) scores below the likelihood maximum
    a, b = PUBLISHED_AB[4]
    assert log_likelihood(musa_r4, a, b) < fit(musa_r4).log_lik - 0.3


def test_a_given_b_examples(musa_r4, musa_r5):
    assert a_given_b(musa_r4, 0.000099) == pytest.approx(2.41513, abs=5e-4)
    assert a_given_b(musa_r5, 0.000114) == pytest.approx(1.933309, rel=5e-3)


@pytest.mark.parametrize("r", [1, 4, 5])
def test_a_given_b_large_b(musa, r):
    g = group_by_order(musa, r)
    b = 50 / g.s_n
    assert a_given_b(g, b) == pytest.approx(g.n_groups ** (1 / r), rel=1e-12)


def test_a_given_b_rejects_nonpositive(musa_r4):
    with pytest.raises(ValueError):
        a_given_b(musa_r4, 0.0)
    with pytest.raises(ValueError):
        profile_score(musa_r4, -1e-4)
    with pytest.raises(ValueError):
        profile_score_derivative(musa_r4, 0.0)


@pytest.mark.parametrize("r", [1, 4, 5])
@given(log_b=st.floats(min_value=math.log(1e-6), max_value=math.log(1e-2)))
def test_closed_form_a_is_stationary(musa, r, log_b):
    g = group_by_order(musa, r)
    b = math.exp(log_b)
    a = a_given_b(g, b)
    d_a, _ = log_likelihood_gradient(g, a, b)
    assert abs(d_a) <= 1e-8 * g.n_groups * r / a


@pytest.mark.parametrize("b", [1e-5, 1e-4, 1e-3])
def test_profile_score_is_profile_derivative(musa_r4, b):
    fd = central_difference(lambda x: profile_log_likelihood(musa_r4, x), b, 1e-9 * b)
    assert profile_score(musa_r4, b) == pytest.approx(fd, rel=1e-5)


@pytest.mark.parametrize("b", [5e-5, 1e-4, 2e-4])
def test_profile_score_derivative_fd(musa_r4, b):
    fd = central_difference(lambda x: profile_score(musa_r4, x), b, 1e-9 * b)
    assert profile_score_derivative(musa_r4, b) == pytest.approx(fd, rel=1e-5)


def test_profile_score_r1_is_classical_go_score(musa):
    g = group_by_order(musa, 1)
    s, n, s_n = g.s, g.n_groups, g.s_n
    for b in (1e-5, 3.4e-5, 1e-4):
        classical = n / b - s.sum() - n * s_n * math.exp(-b * s_n) / (1 - math.exp(-b * s_n))
        assert profile_score(g, b) == pytest.approx(classical, rel=1e-9)


def test_profile_score_derivative_hand_value():
    g = GroupedSeries(1, (1.0,))
    expected = -1 + math.exp(-1) / (1 - math.exp(-1)) ** 2
    assert profile_score_derivative(g, 1.0) == pytest.approx(expected, rel=1e-12)
    assert profile_score_derivative(g, 1.0) == pytest.approx(-0.0793264, abs=1e-7)


def test_profile_score_derivative_large_b(musa_r4):
    b = 1.0
    assert profile_score_derivative(musa_r4, b) == pytest.approx(-musa_r4.n_groups / b**2, rel=1e-12)


def test_score_small_at_root(musa_r4):
    b = MLE[4][1]
    assert abs(profile_score(musa_r4, b)) <= 1e-3 * musa_r4.n_groups / b


@pytest.mark.parametrize("r", [1, 4, 5])
def test_fit_musa(musa, r):
    res = fit(group_by_order(musa, r))
    a, b = MLE[r]
    assert res.converged
    assert res.n_roots == 1
    assert res.b == pytest.approx(b, rel=1e-6)
    assert res.a == pytest.approx(a, rel=1e-6)
    assert res.residual <= res.score_tol
    assert math.isfinite(res.log_lik)
    assert res.log_lik == pytest.approx(profile_log_likelihood(group_by_order(musa, r), res.b), rel=1e-14)


@pytest.mark.parametrize("r", [4, 5])
def test_fit_a_near_published(musa, r):
    assert fit(group_by_order(musa, r)).a == pytest.approx(PUBLISHED_AB[r][0], abs=0.01)


@pytest.mark.parametrize("r", [1, 4, 5])
def test_oracle_agrees(musa, r):
    g = group_by_order(musa, r)
    newton, oracle = fit(g), fit_oracle(g)
    assert abs(oracle.b - newton.b) / newton.b <= 1e-6
    assert newton.log_lik >= oracle.log_lik - 1e-8 * abs(oracle.log_lik)


def test_r1_matches_classical_go_mle(musa):
    # standard Goel-Okumoto time-domain MLE, solved independently
    t = np.cumsum(musa.deltas)
    n, t_n = len(t), t[-1]
    score = lambda b: n / b - t.sum() - n * t_n / math.expm1(b * t_n)
    b = brentq(score, 1e-7, 1e-3, xtol=1e-20, rtol=1e-14)
    a = n / -math.expm1(-b * t_n)
    res = fit(group_by_order(musa, 1))
    assert res.b == pytest.approx(b, rel=1e-7)
    assert res.a == pytest.approx(a, rel=1e-7)


@pytest.mark.parametrize("r", [1, 4, 5])
@pytest.mark.parametrize("c", [1e-3, 0.37, 60.0])
def test_scale_covariance(musa, r, c):
    base = fit(group_by_order(musa, r))
    scaled = fit(group_by_order(FailureSeries(tuple(c * x for x in musa.deltas)), r))
    assert scaled.b == pytest.approx(base.b / c, rel=1e-8)
    assert scaled.a == pytest.approx(base.a, rel=1e-8)


def test_no_root_raises():
    # failures arriving at an increasing rate: no finite-b maximum
    g = GroupedSeries(1, (10.0, 10.1, 10.2, 10.3))
    with pytest.raises(FitError, match="may not fit"):
        fit(g)
    with pytest.raises(FitError):
        fit_oracle(g)


def test_iteration_cap_reports_nonconvergence(musa_r4):
    res = fit(musa_r4, SolverConfig(max_iter=1, tol_score=1e-15, tol_step=1e-16))
    assert not res.converged
    assert res.iterations == 1
    assert math.isfinite(res.b)


def test_bracket_override(musa_r4):
    res = fit(musa_r4, SolverConfig(bracket_lo=5e-5, bracket_hi=2e-4, scan_points=16))
    assert res.bracket == (5e-5, 2e-4)
    assert res.b == pytest.approx(MLE[4][1], rel=1e-6)
    with pytest.raises(FitError):
        fit(musa_r4, SolverConfig(bracket_lo=2e-4, bracket_hi=1e-3))
    with pytest.raises(ValueError):
        fit(musa_r4, SolverConfig(bracket_lo=1e-3, bracket_hi=1e-4))


def test_fit_needs_two_groups():
    with pytest.raises(FitError):
        fit(GroupedSeries(1, (1.0,)))


def test_multiple_roots_pick_highest_likelihood(monkeypatch, musa_r4):
    import relimon.mle as mle

    b_hat = MLE[4][1]
    decoy = 3e-5
    real = mle._sign_changes(musa_r4, SolverConfig())
    monkeypatch.setattr(mle, "_sign_changes", lambda g, cfg: [(decoy, decoy)] + real)
    res = fit(musa_r4)
    assert res.n_roots == 2
    assert res.b == pytest.approx(b_hat, rel=1e-6)


def test_fit_result_dict(musa_r4):
    d = fit(musa_r4).to_dict()
    assert {"a", "b", "r", "n", "iterations", "converged", "residual", "log_lik", "bracket"} <= d.keys()
    assert d["r"] == 4 and d["n"] == 34


def _ordered_model_epochs(a, b, r, horizon, seed):
    # NHPP with mean [a(1-e^{-bt})]^r by inverting unit-rate arrivals
    rng = np.random.default_rng(seed)
    m_end = (a * -math.expm1(-b * horizon)) ** r
    tau = np.cumsum(rng.exponential(size=int(m_end + 10 * math.sqrt(m_end) + 20)))
    tau = tau[tau < m_end]
    return -np.log1p(-(tau ** (1 / r)) / a) / b


def test_recovers_b_when_data_follow_ordered_model():
    a, b, r = 3.0, 1e-4, 4
    errs = []
    for seed in range(20):
        s = _ordered_model_epochs(a, b, r, 5 / b, seed)
        errs.append(abs(fit(GroupedSeries(r, tuple(s))).b - b) / b)
    assert np.median(errs) <= 0.15


def test_r1_recovers_b_on_simulated_go_data():
    p = GoParams(400.0, 1e-4)
    T = horizon_for_expected(p, 300.0)
    errs = [abs(fit(group_by_order(simulate_nhpp(SimConfig(p, T, seed=s)), 1)).b - p.b) / p.b for s in range(20)]
    assert np.median(errs) <= 0.15
