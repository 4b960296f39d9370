import numpy as np
from hypothesis import given, settings, strategies as st

from scflab.analysis import I_net, mu, region_geometry
from scflab.batchode import Terminal, integrate_batch
from scflab.instance import instance_from_params, loads_instance
from scflab.model import ReactorState, V, classify_region, impulse_map, pi_minus, pi_plus
from scflab.reference import random_instance, random_start

seeds = st.integers(min_value=0, max_value=2**32 - 1)
unit = st.floats(min_value=0.0, max_value=1.0)


@settings(max_examples=60, deadline=None)
@given(seeds, unit, unit)
def test_impulse_contracts_V(seed, a, b):
    p = random_instance(np.random.default_rng(seed), require_input_omega1=False)
    s1, s2 = 2 * p.s1_in * a, 2 * p.s2_in * b
    c, d, _ = impulse_map(s1, s2, 1.0, p)
    assert abs(V(c, d, p) - (1 - p.r) * V(s1, s2, p)) <= 1e-12 * p.v_scale * 4


@settings(max_examples=60, deadline=None)
@given(seeds, unit)
def test_pi_minus_inverts_pi_plus(seed, a):
    p = random_instance(np.random.default_rng(seed))
    # walk the threshold locus: vertical leg for a < 0.5, horizontal leg otherwise
    pt = (p.s1_bar, 2 * a * p.s2_bar) if a < 0.5 else (2 * (a - 0.5) * p.s1_bar, p.s2_bar)
    back = pi_minus(*pi_plus(*pt, p), p)
    assert np.allclose(back, pt, atol=1e-12 * (1 + p.s1_in + p.s2_in))


@settings(max_examples=25, deadline=None)
@given(seeds)
def test_batch_ends_where_quadrature_says(seed):
    rng = np.random.default_rng(seed)
    p = random_instance(rng)
    s1, s2, x = random_start(p, rng)
    dx = I_net(s1, s2, p)
    x0 = x + max(0.0, -dx) + 0.05
    seg = integrate_batch(ReactorState(0.0, s1, s2, x0), p, 1e5)
    assert seg.terminal == Terminal.HIT_GAMMA_MINUS
    assert np.allclose(seg.event_point[:2], pi_minus(s1, s2, p), atol=1e-8)
    assert abs(seg.event_point[2] - (x0 + dx)) <= 1e-6 * seg.event_point[2]


@settings(max_examples=25, deadline=None)
@given(seeds)
def test_geometry_orderings_hold(seed):
    p = random_instance(np.random.default_rng(seed))
    g = region_geometry(p)
    assert g.s2_hat < g.s2_tilde < p.s2_bar
    if g.mu > 0:
        assert 0 <= g.s2_sharp < g.s2_hat
        assert g.V_minus < 0 < g.V_plus
        assert classify_region(p.s1_in, p.s2_in, p, g).in_omega1a


@settings(max_examples=25, deadline=None)
@given(seeds)
def test_mu_slope_at_zero(seed):
    p = random_instance(np.random.default_rng(seed))
    assert mu(0.0, p) == 0.0
    g = min(p.f1(p.s1_bar), p.f2(p.s2_hat))
    slope = p.Y1 * (p.s1_in - p.s1_bar) * (1.0 - p.D / g)
    r = 1e-7
    assert abs(mu(r, p) / r - slope) <= 1e-4 * abs(slope) + 1e-9


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_instance_round_trip(seed):
    rng = np.random.default_rng(seed)
    p = random_instance(rng)
    text = instance_from_params(p, random_start(p, rng)).dumps()
    inst = loads_instance(text)
    assert inst.dumps() == text
    assert inst.model_params() == p
