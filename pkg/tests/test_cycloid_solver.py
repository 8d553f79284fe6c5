import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from brachistochrone.curves import make_mesh
from brachistochrone.cycloid_solver import (
    BrachProblem,
    Shape,
    alpha,
    alpha_prime,
    cycloid_point,
    exact_travel_time,
    invert_alpha,
    same_cycloid_partner,
    sample_solution,
    slope_angle,
    solve,
    theta_from_t,
)
from brachistochrone.errors import ArgumentError
from brachistochrone.variational import travel_time

from oracles import ALPHA_ONE, ALPHA_PRIME_ONE, K_UNIT, THETA_RATIO_ONE, TIME_UNIT

ratios = st.floats(1e-3, 1e3)


def test_alpha_at_pi():
    assert alpha(math.pi) == pytest.approx(2 / math.pi, rel=1e-15)


def test_alpha_limits():
    assert alpha(1e-6) > 1e5
    assert alpha(2 * math.pi - 1e-6) < 1e-5


@pytest.mark.parametrize("theta", [0.0, -0.1, 2 * math.pi, 7.0])
def test_alpha_rejects_outside_interval(theta):
    with pytest.raises(ArgumentError):
        alpha(theta)
    with pytest.raises(ArgumentError):
        alpha_prime(theta)


def test_alpha_against_mpmath():
    mp.mp.dps = 40
    for th in (1e-7, 5e-5, 1e-4, 2e-4, 0.01, 0.3, 1.0, 3.0, 6.0, 2 * math.pi - 1e-5):
        x = mp.mpf(th)
        ref = (1 - mp.cos(x)) / (x - mp.sin(x))
        assert alpha(th) == pytest.approx(float(ref), rel=1e-13), th
        dref = (x * mp.sin(x) - 2 + 2 * mp.cos(x)) / (x - mp.sin(x)) ** 2
        assert alpha_prime(th) == pytest.approx(float(dref), rel=1e-9), th


def test_alpha_frozen_values():
    assert alpha(1.0) == pytest.approx(ALPHA_ONE, rel=1e-15)
    assert alpha_prime(1.0) == pytest.approx(ALPHA_PRIME_ONE, rel=1e-13)
    assert alpha_prime(math.pi) == pytest.approx(-4 / math.pi**2, rel=1e-14)


def test_alpha_prime_matches_difference():
    h = 1e-6
    fd = (alpha(1 + h) - alpha(1 - h)) / (2 * h)
    assert alpha_prime(1.0) == pytest.approx(fd, rel=1e-6)


def test_alpha_prime_negative_and_alpha_decreasing():
    th = np.sort(np.random.default_rng(0).uniform(1e-6, 2 * math.pi - 1e-6, 1000))
    assert np.all(alpha_prime(th) < 0)
    assert np.all(np.diff(alpha(th)) < 0)


def test_invert_alpha_anchor():
    assert abs(invert_alpha(2 / math.pi) - math.pi) <= 1e-10
    assert invert_alpha(1.0) == pytest.approx(THETA_RATIO_ONE, abs=1e-12)


@pytest.mark.parametrize("ratio", [0.0, -1.0])
def test_invert_alpha_rejects_nonpositive(ratio):
    with pytest.raises(ArgumentError):
        invert_alpha(ratio)


@settings(max_examples=200, deadline=None)
@given(ratios)
def test_alpha_inverts(ratio):
    assert alpha(invert_alpha(ratio)) == pytest.approx(ratio, rel=1e-10)


@settings(max_examples=100, deadline=None)
@given(ratios, ratios)
def test_invert_alpha_monotone(r1, r2):
    if r1 < r2:
        assert invert_alpha(r1) > invert_alpha(r2)


def test_solve_unit_problem():
    s = solve(BrachProblem(1.0, 1.0))
    assert s.theta_tilde == pytest.approx(THETA_RATIO_ONE, abs=1e-12)
    assert s.k == pytest.approx(K_UNIT, rel=1e-12)
    assert s.beltrami_c == pytest.approx(1 / math.sqrt(K_UNIT), rel=1e-12)
    # theta_tilde = 2.412 < pi: the minimiser keeps descending
    assert s.shape is Shape.STRICTLY_INCREASING
    assert exact_travel_time(s) == pytest.approx(TIME_UNIT, rel=1e-13)


def test_solve_critical_ratio():
    s = solve(BrachProblem(math.pi, 2.0))
    assert s.theta_tilde == pytest.approx(math.pi, abs=1e-10)
    assert s.k == pytest.approx(2.0, rel=1e-10)
    assert s.shape is Shape.MAX_AT_ENDPOINT


def test_solve_classes():
    assert solve(BrachProblem(1.0, 10.0)).shape is Shape.STRICTLY_INCREASING
    assert solve(BrachProblem(1.0, 0.1)).shape is Shape.RISES_THEN_FALLS


@pytest.mark.parametrize("b,beta", [(0.0, 1.0), (1.0, -1.0), (math.inf, 1.0), (1.0, math.nan)])
def test_bad_problem(b, beta):
    with pytest.raises(ArgumentError):
        BrachProblem(b, beta)


@settings(max_examples=200, deadline=None)
@given(st.floats(1e-2, 1e2), ratios)
def test_solution_satisfies_end_conditions(b, ratio):
    beta = b * ratio
    s = solve(BrachProblem(b, beta))
    th = s.theta_tilde
    assert 0.5 * s.k * (th - math.sin(th)) == pytest.approx(b, rel=1e-9)
    assert s.k * math.sin(th / 2) ** 2 == pytest.approx(beta, rel=1e-9)
    assert s.shape is Shape.classify(th)


@settings(max_examples=50, deadline=None)
@given(st.floats(0.1, 10.0), st.floats(0.1, 10.0), st.floats(0.01, 100.0))
def test_scaling(b, beta, lam):
    s1 = solve(BrachProblem(b, beta))
    s2 = solve(BrachProblem(lam * b, lam * beta))
    assert s2.theta_tilde == pytest.approx(s1.theta_tilde, abs=1e-11)
    assert s2.k == pytest.approx(lam * s1.k, rel=1e-10)
    assert s2.time == pytest.approx(math.sqrt(lam) * s1.time, rel=1e-10)


def test_travel_time_closed_form_examples():
    class _S:
        k, theta_tilde = 1.0, math.pi

    assert exact_travel_time(_S) == math.pi


def test_solution_record():
    rec = solve(BrachProblem(1.0, 0.1)).to_record()
    assert list(rec) == ["b", "beta", "theta_tilde", "k", "beltrami_c", "class", "time"]
    assert rec["class"] == "RisesThenFalls"


def test_cycloid_points():
    p = cycloid_point(2.0, math.pi)
    assert (p.t, p.gamma, p.slope) == pytest.approx((math.pi, 2.0, 0.0), abs=1e-15)
    p = cycloid_point(3.0, 0.0)
    assert (p.t, p.gamma) == (0.0, 0.0)
    p = cycloid_point(2.0, math.pi / 2)
    assert p.t == pytest.approx(math.pi / 2 - 1, rel=1e-15)
    assert p.gamma == pytest.approx(1.0, rel=1e-15)
    assert p.slope == pytest.approx(1.0, rel=1e-15)


def test_theta_from_t_simple():
    assert theta_from_t(2.0, 0.0) == 0.0
    assert theta_from_t(2.0, math.pi) == pytest.approx(math.pi, abs=1e-14)
    with pytest.raises(ArgumentError):
        theta_from_t(2.0, -0.1)
    with pytest.raises(ArgumentError):
        theta_from_t(2.0, 2 * math.pi + 0.1)


def test_theta_from_t_round_trip():
    rng = np.random.default_rng(3)
    for _ in range(100):
        k = rng.uniform(0.1, 10)
        th = rng.uniform(0, 2 * math.pi)
        assert theta_from_t(k, cycloid_point(k, th).t) == pytest.approx(th, abs=1e-10)


def test_theta_from_t_near_cusp():
    k = 1.7
    th = np.array([1e-9, 1e-6, 1e-3])
    t = np.array([cycloid_point(k, x).t for x in th])
    assert np.allclose(theta_from_t(k, t), th, rtol=1e-10, atol=0)


def test_slope_angle_cases():
    assert slope_angle(1.0) == pytest.approx(math.pi / 2, rel=1e-15)
    assert slope_angle(0.0) == math.pi
    assert slope_angle(-1.0) == pytest.approx(3 * math.pi / 2, rel=1e-15)


@settings(max_examples=200, deadline=None)
@given(st.floats(-1e6, 1e6), st.floats(-1e6, 1e6))
def test_slope_angle_decreasing_and_inverse(s1, s2):
    a1, a2 = slope_angle(s1), slope_angle(s2)
    assert 0 < a1 < 2 * math.pi
    if s1 < s2:
        assert a1 >= a2
    if s1 != 0:
        assert 1 / math.tan(a1 / 2) == pytest.approx(s1, rel=1e-8, abs=1e-8)


def test_sample_solution_invariants():
    for beta in (0.1, 2 / math.pi, 1.0, 10.0):
        s = solve(BrachProblem(1.0, beta))
        c = sample_solution(s, make_mesh(256, 1.0))
        assert abs(c.values[-1] - beta) <= 1e-9
        k_i = c.values[1:] * (1 + c.slopes[1:] ** 2)
        assert np.max(np.abs(k_i - s.k)) <= 1e-10 * s.k
        assert np.all(np.diff(c.slopes[1:]) < 0)


def test_sample_solution_wrong_mesh():
    with pytest.raises(ArgumentError):
        sample_solution(solve(BrachProblem(1.0, 1.0)), make_mesh(16, 2.0))


def test_sample_solution_quadrature_time():
    s = solve(BrachProblem(1.0, 1.0))
    c = sample_solution(s, make_mesh(128, 1.0))
    assert travel_time(c).value == pytest.approx(s.time, rel=1e-5)


@pytest.mark.parametrize("beta", [0.1, 0.3, 2 / math.pi, 1.0, 5.0])
def test_sign_changes(beta):
    s = solve(BrachProblem(1.0, beta))
    c = sample_solution(s, make_mesh(512, 1.0))
    sign = np.sign(c.slopes[1:-1])
    changes = int(np.count_nonzero(np.diff(sign[sign != 0]) != 0))
    assert changes == (1 if s.shape is Shape.RISES_THEN_FALLS else 0)
    if s.shape is Shape.RISES_THEN_FALLS:
        assert np.max(c.values) > beta
        assert np.max(c.values) <= s.k * (1 + 1e-12)


def test_first_slope_unbounded():
    s = solve(BrachProblem(1.0, 1.0))
    first = [sample_solution(s, make_mesh(n, 1.0)).slopes[1] for n in (64, 512, 4096)]
    assert first[0] < first[1] < first[2]
    assert first[2] > 1e3


def test_distinct_depths_give_distinct_curves():
    m = make_mesh(64, 1.0)
    c1 = sample_solution(solve(BrachProblem(1.0, 1.0)), m)
    c2 = sample_solution(solve(BrachProblem(1.0, 1.01)), m)
    assert np.max(np.abs(c1.values - c2.values)) > 0


def test_partner_unit_problem():
    p = BrachProblem(1.0, 1.0)
    q = same_cycloid_partner(p)
    s, sq = solve(p), solve(q)
    assert q.beta == p.beta
    assert sq.theta_tilde == pytest.approx(2 * math.pi - s.theta_tilde, abs=1e-10)
    assert sq.k == pytest.approx(s.k, rel=1e-10)
    assert same_cycloid_partner(q).b == pytest.approx(1.0, rel=1e-9)


def test_partner_of_critical_problem_is_none():
    assert same_cycloid_partner(BrachProblem(math.pi, 2.0)) is None


@settings(max_examples=50, deadline=None)
@given(st.floats(0.05, 20.0))
def test_partner_is_involution(ratio):
    p = BrachProblem(1.0, ratio)
    q = same_cycloid_partner(p)
    if q is None:
        return
    assert solve(q).k == pytest.approx(solve(p).k, rel=1e-10)
    assert same_cycloid_partner(q).b == pytest.approx(1.0, rel=1e-9)
