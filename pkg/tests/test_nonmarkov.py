import math

import numpy as np
import pytest
from scipy.optimize import brentq

from lqfi_nonmarkov import channels as ch
from lqfi_nonmarkov.nonmarkov import (
    channel_report,
    correlation_grid,
    default_window,
    derivative,
    increasing_intervals,
    maximize_over_initial,
    measure_functions,
    non_markovianity,
    positive_derivative_integral,
    sample_trajectory,
)
from lqfi_nonmarkov.states import is_physical


def lambda_closed(t, s):
    return math.gamma(s - 1) * (1 - math.cos((s - 1) * math.atan(t)) / (1 + t * t) ** ((s - 1) / 2))


# -- generic machinery -------------------------------------------------------

def test_derivative_scalar_and_array():
    assert derivative(math.sin, 1.0) == pytest.approx(math.cos(1.0), abs=1e-10)
    assert derivative(math.exp, 0.0) == pytest.approx(1.0, abs=1e-8)  # one-sided at the boundary
    d = derivative(lambda t: np.array([t**2, t**3]), 2.0)
    np.testing.assert_allclose(d, [4.0, 12.0], atol=1e-9)


def test_sine_intervals():
    intervals, n = non_markovianity(math.sin, (0.0, 10.0))
    ends = [t for iv in intervals for t in (iv.t_start, iv.t_end)]
    assert ends == pytest.approx([0.0, math.pi / 2, 1.5 * math.pi, 2.5 * math.pi], abs=1e-6)
    assert n == pytest.approx(3.0, abs=1e-10)
    assert positive_derivative_integral(math.sin, (0.0, 10.0)) == pytest.approx(3.0, abs=1e-5)


def test_window_ending_mid_rise():
    intervals, n = non_markovianity(lambda t: -math.cos(t), (0.0, 4.0))
    assert intervals[0].t_start == 0.0 and intervals[0].t_end == pytest.approx(math.pi, abs=1e-6)
    assert len(intervals) == 1 and n == pytest.approx(2.0, abs=1e-10)
    _, n = non_markovianity(math.cos, (0.0, 4.0))
    assert n == pytest.approx(1.0 + math.cos(4.0), abs=1e-10)


def test_monotone_and_constant_functions_have_no_intervals():
    assert non_markovianity(lambda t: math.exp(-t), (0.0, 5.0)) == ([], 0.0)
    assert non_markovianity(lambda t: 0.25, (0.0, 5.0)) == ([], 0.0)


def test_roundoff_ripple_ignored():
    rng = np.random.default_rng(0)
    noise = dict()

    def f(t):
        return noise.setdefault(t, math.exp(-t) + 1e-15 * rng.standard_normal())

    assert non_markovianity(f, (0.0, 5.0))[1] == 0.0


def test_scan_validation():
    with pytest.raises(ValueError):
        increasing_intervals(math.sin, (0.0, 1.0), n_scan=50)
    with pytest.raises(ValueError):
        increasing_intervals(math.sin, (0.0, 1.0), n_scan=200, values=[0.0] * 10)


# -- dephasing ---------------------------------------------------------------

@pytest.mark.parametrize("s", [0.5, 1.0, 2.0])
def test_dephasing_low_ohmicity_is_markovian(s):
    rep = channel_report(ch.DephasingParams(s=s))
    assert rep.n_lqfi == 0.0 and rep.n_lqu == 0.0 and rep.intervals == []


def test_dephasing_s4_matches_closed_form():
    p = ch.DephasingParams(s=4.0)
    rep = channel_report(p)
    q = lambda t: math.exp(-4.0 * lambda_closed(t, 4.0))  # Q = P^2
    expected = q(30.0) - q(1.0)
    assert len(rep.intervals) == 1
    assert rep.intervals[0].t_start == pytest.approx(1.0, abs=1e-6)
    assert rep.intervals[0].t_end == 30.0
    assert rep.n_lqfi == pytest.approx(expected, rel=1e-8)
    assert rep.ratio == pytest.approx(2.0, abs=1e-3)


def test_dephasing_cutoff_shifts_window():
    p = ch.DephasingParams(s=4.0, omega_c=2.0)
    assert default_window(p) == (0.0, 15.0)
    assert channel_report(p).n_lqfi == pytest.approx(channel_report(ch.DephasingParams(s=4.0)).n_lqfi, rel=1e-8)


# -- amplitude damping -------------------------------------------------------

def test_amplitude_underdamped_matches_revival_sum():
    p = ch.AmplitudeDampingParams(lam=0.3)
    w = math.sqrt(2 * p.gamma0 * p.lam - p.lam**2)
    r = lambda t: ch.ad_amplitude(t, p).real
    t_end = default_window(p)[1]
    expected, k = 0.0, 1
    while 2 * k * math.pi / w <= t_end:
        expected += r(2 * k * math.pi / w) ** 2
        k += 1
    last_peak, next_peak = 2 * (k - 1) * math.pi / w, 2 * k * math.pi / w
    zero = brentq(r, last_peak, next_peak)
    if zero < t_end:
        expected += r(t_end) ** 2
    rep = channel_report(p)
    assert rep.n_lqfi == pytest.approx(expected, abs=1e-6)
    assert rep.n_lqfi > 1e-4


@pytest.mark.parametrize("lam", [2.0, 3.0, 5.0])
def test_amplitude_overdamped_is_markovian(lam):
    assert channel_report(ch.AmplitudeDampingParams(lam=lam)).n_lqfi == 0.0


# -- depolarizing ------------------------------------------------------------

@pytest.mark.parametrize("mu", [0.5j, 0.95j])
def test_depolarizing_overdamped_is_markovian(mu):
    rep = channel_report(ch.DepolarizingParams(mu=mu))
    assert rep.n_lqfi == 0.0 and rep.n_lqu == 0.0


def test_depolarizing_intervals_follow_memory_revivals():
    p = ch.DepolarizingParams(mu=3.0)
    rep = channel_report(p)
    assert rep.n_lqfi > 1e-4
    u2 = lambda nu: ch.depol_memory(nu, 3.0) ** 2
    for iv in rep.intervals:
        mid = 0.5 * (iv.t_start + iv.t_end)
        assert derivative(u2, mid) > 0


def test_closed_form_rate_matches_direct_derivative():
    # where the largest diagonal entry of S does not switch, dQ/dnu = -dS_kk/dnu
    p = ch.DepolarizingParams(mu=5.0)
    q = measure_functions(p).q
    for nu in np.linspace(0.05, 9.95, 40):
        diag = ch.depol_s_diagonal(nu, p)
        top = np.argsort(diag)
        if diag[top[-1]] - diag[top[-2]] < 1e-3:
            continue
        k = top[-1]
        rate = -derivative(lambda x: ch.depol_s_diagonal(x, p)[k], nu)
        assert derivative(q, nu) == pytest.approx(rate, abs=1e-7)


# -- trajectories and search -------------------------------------------------

def test_sample_trajectory_sandwich():
    traj = sample_trajectory(ch.AmplitudeDampingParams(lam=0.3), np.linspace(0, 25, 60))
    assert traj.q_values[0] == pytest.approx(1.0)
    assert np.all(traj.u_values <= traj.q_values + 1e-9)
    assert np.all(traj.q_values <= 2 * traj.u_values + 1e-9)
    with pytest.raises(ValueError):
        sample_trajectory(ch.DephasingParams(), [0.0, 2.0, 1.0])


def test_report_as_dict():
    rep = channel_report(ch.DephasingParams(s=4.0), n_scan=200)
    d = rep.as_dict()
    assert set(d) == {"n_lqfi", "n_lqu", "ratio", "intervals_lqfi", "intervals_lqu"}
    assert d["intervals_lqfi"][0][2] == rep.intervals[0].delta
    assert channel_report(ch.DephasingParams(s=1.0), n_scan=200).ratio is None


def test_correlation_grid():
    grid = correlation_grid(0.5)
    assert all(is_physical(r) and abs(r[0]) >= abs(r[1]) for r in grid)
    assert (0.0, 0.0, 0.0) in grid and (1.0, -1.0, 1.0) in grid
    assert (1.0, 1.0, 1.0) not in grid
    with pytest.raises(ValueError):
        correlation_grid(0.0)


def test_maximize_over_initial():
    triples = [(0.0, 0.0, 0.0), (0.6, -0.4, 0.2), (1.0, -1.0, 1.0), (0.5, 0.5, -0.5)]
    rep, best = maximize_over_initial(3.0, n_scan=300, triples=triples)
    scores = {r: channel_report(ch.DepolarizingParams(mu=3.0, r=r), (0.0, 10.0), 300).n_lqfi for r in triples}
    assert best == max(scores, key=scores.get)
    assert rep.n_lqfi == scores[best]


@pytest.mark.slow
def test_maximize_over_grid_dominates_members():
    coarse, r_coarse = maximize_over_initial(3.0, r_grid_step=0.5, n_scan=150)
    default = channel_report(ch.DepolarizingParams(mu=3.0), (0.0, 10.0), 150)
    assert coarse.n_lqfi >= default.n_lqfi - 1e-12
    assert r_coarse in correlation_grid(0.5)


def test_maximize_breaks_ties_lexicographically():
    rep, best = maximize_over_initial(0.5j, n_scan=200, triples=[(0.5, 0.0, 0.0), (0.0, 0.0, 0.0)])
    assert rep.n_lqfi == 0.0 and best == (0.0, 0.0, 0.0)


@pytest.mark.parametrize(
    "spec",
    [ch.DephasingParams(s=4.0), ch.AmplitudeDampingParams(lam=0.3), ch.DepolarizingParams(mu=3.0)],
    ids=["dephasing", "amplitude", "depolarizing"],
)
def test_interval_sum_matches_positive_rate_integral(spec):
    q = measure_functions(spec).q
    _, n = non_markovianity(q, default_window(spec))
    assert positive_derivative_integral(q, default_window(spec), n_points=4001) == pytest.approx(n, abs=1e-6)


@pytest.mark.parametrize("spec", [ch.AmplitudeDampingParams(lam=0.4), ch.DepolarizingParams(mu=5.0)])
def test_scan_resolution_does_not_change_n(spec):
    coarse, fine = channel_report(spec, n_scan=1000), channel_report(spec, n_scan=2000)
    assert fine.n_lqfi == pytest.approx(coarse.n_lqfi, abs=1e-10)
    assert fine.n_lqu == pytest.approx(coarse.n_lqu, abs=1e-10)


def test_bell_point_search_equals_bell_report():
    rep, best = maximize_over_initial(3.0, n_scan=300, triples=[(1.0, -1.0, 1.0)])
    direct = channel_report(ch.DepolarizingParams(mu=3.0, r=(1.0, -1.0, 1.0)), (0.0, 10.0), 300)
    assert best == (1.0, -1.0, 1.0) and rep == direct


def test_finer_grid_contains_coarser():
    assert set(correlation_grid(0.5)) <= set(correlation_grid(0.25))


def test_lqfi_and_lqu_intervals_coincide_for_depolarizing():
    rep = channel_report(ch.DepolarizingParams(mu=5.0))
    assert rep.n_lqfi > 0 and rep.n_lqu > 0
    scan_step = 10.0 / 999
    assert len(rep.intervals) == len(rep.intervals_lqu)
    for a, b in zip(rep.intervals, rep.intervals_lqu):
        assert abs(a.t_start - b.t_start) < scan_step and abs(a.t_end - b.t_end) < scan_step
