import numpy as np
import pytest

from scflab.analysis import mu, r_star
from scflab.errors import NoPeriodicOrbit
from scflab.model import ReactorState, lambdas
from scflab.orbit import (optimize_Q, orbit_profile, period_T, periodic_orbit,
                          q_limit_at_zero, throughput_Q)
from scflab.reference import instance_b
from scflab.simulate import simulate


@pytest.fixture(scope="module")
def opt_b():
    return optimize_Q(instance_b())


def test_periodic_orbit_fields(pb, q):
    o = periodic_orbit(0.4, pb, q)
    assert o.x_minus == pytest.approx(0.1, abs=0.0125)
    assert o.x_plus == (1 - o.r) * o.x_minus
    assert o.x_minus == o.mu / o.r > 0
    assert o.Q == pytest.approx(o.r / o.T)


def test_orbit_closure_by_simulation(pb, q):
    o = periodic_orbit(0.4, pb, q)
    traj = simulate(ReactorState(0.0, *o.post_point, o.x_plus), pb, max_impulses=1,
                    stop_when_cycling=False)
    e = traj.impulses[0]
    assert e.pre == pytest.approx((*o.pre_point, o.x_minus), rel=1e-6)
    assert e.t == pytest.approx(o.T, rel=1e-6)


def test_no_orbit_on_washout(pw, q):
    with pytest.raises(NoPeriodicOrbit):
        periodic_orbit(0.4, pw, q)


def test_profile_forms_agree(pa, pb, q):
    for p in (pa, pb):
        m = mu(p.r, p, q)
        for s1 in np.linspace(p.s1_bar, p.s1_bar_plus(), 11):
            a = orbit_profile(s1, p.r, p, q, "minus", m)
            b = orbit_profile(s1, p.r, p, q, "plus", m)
            assert abs(a - b) < 1e-9


def test_period_blows_up_at_both_ends(pb, q):
    rs = r_star(pb, q)
    assert rs > 0
    assert period_T(rs + 1e-3, pb, q) > 2 * period_T(rs + 0.1, pb, q)
    assert period_T(1 - 1e-3, pb, q) > period_T(0.9, pb, q)


def test_throughput_positive_and_decays(pb, q, opt_b):
    rs = r_star(pb, q)
    for r in np.linspace(rs + 0.01, 0.99, 12):
        assert throughput_Q(r, pb, q) > 0
    # Q -> 0 as r -> 1, but only like 1 / log(1 / (1 - r))
    tail = [throughput_Q(1 - 10.0 ** -k, pb, q) for k in range(1, 8)]
    assert all(b < a for a, b in zip(tail, tail[1:]))
    assert tail[-1] < 0.2 * opt_b.Q_opt
    inv = [1 / v for v in tail]
    steps = np.diff(inv)
    assert np.all(steps > 0) and steps.max() < 2 * steps.min()


def test_period_near_one_matches_simulation(q):
    p = instance_b(r=0.999)
    o = periodic_orbit(0.999, p, q)
    traj = simulate(ReactorState(0.0, *o.post_point, o.x_plus), p, max_impulses=1,
                    stop_when_cycling=False)
    assert traj.impulses[0].t == pytest.approx(o.T, rel=1e-6)


def test_throughput_limit_when_r_star_zero(q):
    p = instance_b(s1_bar=0.75)
    assert r_star(p, q) == 0.0
    lim = q_limit_at_zero(p)
    assert lim == pytest.approx(min(p.f1(p.s1_bar), p.f2(p.s2_hat)) - p.D)
    assert throughput_Q(1e-4, p, q) == pytest.approx(lim, rel=0.05)


def test_optimize_reference(opt_b):
    assert opt_b.r_opt == pytest.approx(0.6416, abs=0.01)
    assert np.all(opt_b.Q_opt >= np.nan_to_num(opt_b.grid_Q, nan=-np.inf) - 1e-15)


def test_optimize_grid_refinement_stable(pb, q, opt_b):
    fine = optimize_Q(pb, q, grid_n=128)
    assert abs(fine.r_opt - opt_b.r_opt) < 1e-3


def test_lambda_values(pb):
    assert lambdas(pb)[1] == pytest.approx(0.2, abs=1e-6)
