import math

import numpy as np
import pytest

from scflab.analysis import mu
from scflab.batchode import (QuadratureSpec, Terminal, biomass_change, biomass_profile,
                             integrate_batch, minimum_biomass, time_between)
from scflab.errors import DomainError, NumericalError
from scflab.model import ReactorState, V, pi_minus, pi_plus
from scflab.simulate import simulate


def test_quadrature_spec_validates():
    with pytest.raises(DomainError):
        QuadratureSpec(abs_tol=0.0)
    with pytest.raises(DomainError):
        QuadratureSpec(rel_tol=-1.0)


def test_cycle_from_post_impulse_point_closes(pb, q):
    m = mu(pb.r, pb, q)
    x_plus = (1 - pb.r) * m / pb.r
    seg = integrate_batch(ReactorState(0.0, pb.s1_bar_plus(), pb.s2_hat_plus(), x_plus), pb, 1e4)
    assert seg.terminal == Terminal.HIT_GAMMA_MINUS
    s1, s2, x = seg.event_point
    assert (s1, s2) == pytest.approx((pb.s1_bar, pb.s2_hat), abs=1e-8)
    assert x == pytest.approx(m / pb.r, rel=1e-7)


def test_batch_invariants_along_segment(pa):
    seg = integrate_batch(ReactorState(0.0, 0.9, 0.8, 0.2), pa, 1e4)
    v = V(seg.s1, seg.s2, pa)
    assert np.max(np.abs(v - v[0])) < 1e-9 * pa.v_scale
    assert np.all(np.diff(seg.s1) < 0) and np.all(np.diff(seg.s2) < 0)
    assert np.allclose(seg.s2 - seg.s2[0], pa.R21 * (seg.s1 - seg.s1[0]), atol=1e-9)
    assert seg.final.t == seg.t_end


def test_zero_biomass_freezes(pa):
    seg = integrate_batch(ReactorState(0.0, 0.9, 0.8, 0.0), pa, 50.0)
    assert seg.terminal == Terminal.HORIZON_REACHED
    assert seg.final.s1 == 0.9 and seg.final.s2 == 0.8 and seg.t_end == 50.0


def test_washout_goes_quiescent(pw):
    traj = simulate(ReactorState(0.0, 0.1, 0.7, 0.3), pw, max_impulses=500)
    last = traj.segments[-1]
    assert last.terminal == Terminal.QUIESCENT
    assert last.final.x < 1e-10


def test_dense_output_sampling(pa):
    seg = integrate_batch(ReactorState(0.0, 0.9, 0.8, 0.2), pa, 1e4)
    tm = 0.5 * (seg.t_start + seg.t_end)
    s = seg.sample(tm)[0]
    assert V(s[0], s[1], pa) == pytest.approx(V(0.9, 0.8, pa), abs=1e-9)


def test_biomass_change_matches_integration(pa, q):
    start = (0.9, 0.8)
    end = pi_minus(*start, pa)
    dx = biomass_change(end, start, pa, q)
    seg = integrate_batch(ReactorState(0.0, *start, 0.5), pa, 1e4)
    assert seg.event_point[2] - 0.5 == pytest.approx(dx, rel=1e-7)


def test_biomass_change_degenerate_and_reference_values(pa, pw, q):
    e = (pa.s1_bar, 0.3)
    assert biomass_change(e, e, pa, q) == 0.0
    st = pi_plus(pa.s1_bar, pa.s2_hat, pa)
    assert biomass_change((pa.s1_bar, pa.s2_hat), st, pa, q) == pytest.approx(0.03, abs=5e-3)
    st = pi_plus(pw.s1_bar, pw.s2_hat, pw)
    assert biomass_change((pw.s1_bar, pw.s2_hat), st, pw, q) == pytest.approx(-0.08, abs=1e-2)


def test_time_between(pb, q):
    e = (pb.s1_bar, pb.s2_hat)
    assert time_between(e, e, 0.1, pb, q) == 0.0
    m = mu(pb.r, pb, q)
    x_plus = (1 - pb.r) * m / pb.r
    start = pi_plus(*e, pb)
    T = time_between(e, start, x_plus, pb, q)
    seg = integrate_batch(ReactorState(0.0, *start, x_plus), pb, 1e4)
    assert seg.t_end == pytest.approx(T, rel=1e-6)
    assert time_between(e, start, 2 * x_plus, pb, q) < T


def test_biomass_profile_and_minimum(pa, q):
    start = (0.9, 0.8)
    end = pi_minus(*start, pa)
    prof = biomass_profile(end, start, 0.5, pa, q)
    seg = integrate_batch(ReactorState(0.0, *start, 0.5), pa, 1e4)
    i = len(seg.t) // 2
    assert prof(seg.s1[i]) == pytest.approx(seg.x[i], rel=1e-7)
    assert minimum_biomass(end, start, 0.5, pa, q) == pytest.approx(
        min(seg.x.min(), seg.event_point[2]), rel=1e-6)


def test_quadrature_failure_is_reported(pa):
    tight = QuadratureSpec(abs_tol=1e-30, rel_tol=1e-30, max_subdivisions=1)
    start = (0.9, 0.8)
    with pytest.raises(NumericalError):
        biomass_change(pi_minus(*start, pa), start, pa, tight)


def test_immediate_start_on_threshold(pa):
    seg = integrate_batch(ReactorState(0.0, 0.6, 0.3, 0.1), pa, 10.0)
    assert seg.terminal == Terminal.HIT_GAMMA_MINUS and seg.duration == 0.0
    assert math.isclose(seg.event_point[2], 0.1)
