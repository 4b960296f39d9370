import math

import numpy as np
import pytest

from scflab.errors import DomainError, RegionError
from scflab.model import (CustomMonotone, ModelParams, Monod, ReactorState, RegionLabel, V,
                          break_even, classify_region, g_map, growth_rate, impulse_map, lambdas,
                          pi_minus, pi_plus, validate_response)
from scflab.analysis import region_geometry
from scflab.reference import INSTANCE_A, instance_a


def test_monod_values_and_derivative():
    f = Monod(2.0, 1.9)
    assert f(0.0) == 0.0
    assert f(0.6) == pytest.approx(0.48)
    h = 1e-6
    assert f.derivative(0.7) == pytest.approx((f(0.7 + h) - f(0.7 - h)) / (2 * h), rel=1e-8)
    validate_response(f)


def test_validate_response_rejects_bad_functions():
    with pytest.raises(DomainError):
        validate_response(CustomMonotone(lambda s: s + 1.0, lambda s: 1.0))
    with pytest.raises(DomainError):
        validate_response(CustomMonotone(lambda s: -s, lambda s: -1.0))
    with pytest.raises(DomainError):  # wrong derivative
        validate_response(CustomMonotone(lambda s: s * s, lambda s: s))


def test_growth_rate_is_liebig_minimum(pa):
    assert growth_rate(0.6, 0.5, pa) == pytest.approx(0.48)
    assert growth_rate(0.0, 0.7, pa) == 0.0
    assert growth_rate(0.7, 0.0, pa) == 0.0
    same = instance_a(f2=Monod(2.0, 1.9))
    assert growth_rate(0.4, 0.4, same) == pytest.approx(Monod(2.0, 1.9)(0.4))


def test_break_even():
    assert break_even(Monod(2.0, 0.6), 0.5) == pytest.approx(0.2, abs=1e-12)
    assert break_even(Monod(2.0, 1.4), 0.5) == pytest.approx(0.7 / 1.5, abs=1e-12)
    assert break_even(Monod(0.4, 1.0), 0.5) == math.inf
    tess = CustomMonotone(lambda s: 2 * (1 - math.exp(-s)), lambda s: 2 * math.exp(-s),
                          supremum=2.0)
    lam = break_even(tess, 0.5)
    assert tess(lam) == pytest.approx(0.5, abs=1e-10)


def test_V_values(pa):
    assert V(pa.s1_in, pa.s2_in, pa) == 0.0
    assert V(0.23, 0.6, pa) == pytest.approx(-2.32, abs=1e-12)


def test_constructor_validation():
    for bad in (dict(D=0.0), dict(r=1.0), dict(r=0.0), dict(Y1=-1.0), dict(s1_bar=1.2),
                dict(s2_bar=0.0)):
        with pytest.raises(DomainError):
            ModelParams(**{**INSTANCE_A, **bad})


def test_orientation_swap_is_transparent():
    # relabel resources of instance A so that V(s1_bar, s2_bar) > 0 in the user frame
    kw = dict(INSTANCE_A)
    user = dict(f1=kw["f2"], f2=kw["f1"], Y1=kw["Y2"], Y2=kw["Y1"], s1_bar=kw["s2_bar"],
                s2_bar=kw["s1_bar"], s1_in=kw["s2_in"], s2_in=kw["s1_in"], D=kw["D"], r=kw["r"])
    p = ModelParams(**user)
    assert p.swapped
    assert V(p.s1_bar, p.s2_bar, p) <= 0
    assert p.to_canonical(0.6, 0.23) == (0.23, 0.6)
    assert p.to_user(*p.to_canonical(0.1, 0.2)) == (0.1, 0.2)
    assert p.s1_bar == INSTANCE_A["s1_bar"] and p.Y1 == INSTANCE_A["Y1"]


def test_reactor_state_rejects_negative():
    with pytest.raises(DomainError):
        ReactorState(0.0, -0.1, 0.2, 0.3)


def test_impulse_map(pa):
    s1, s2, x = impulse_map(0.6, 0.5, 1.0, pa)
    assert (s1, s2, x) == pytest.approx((0.76, 0.7, 0.6), abs=1e-15)
    assert impulse_map(pa.s1_in, pa.s2_in, 0.0, pa) == (pa.s1_in, pa.s2_in, 0.0)
    rng = np.random.default_rng(1)
    for _ in range(20):
        a, b = rng.uniform(0, 2, 2)
        c, d, _ = impulse_map(a, b, 1.0, pa)
        assert V(c, d, pa) == pytest.approx((1 - pa.r) * V(a, b, pa), abs=1e-14)


def _line_gamma_oracle(s1, s2, p):
    # intersect the slope-R21 line with both legs of the threshold locus, keep the valid one
    cands = []
    y = s2 + p.R21 * (p.s1_bar - s1)
    if 0 <= y <= p.s2_bar:
        cands.append((p.s1_bar, y))
    xx = s1 + p.R12 * (p.s2_bar - s2)
    if 0 <= xx <= p.s1_bar:
        cands.append((xx, p.s2_bar))
    return cands


def test_pi_minus_against_line_intersection(pa):
    e = pi_minus(0.23, 0.6, pa)
    assert any(e == pytest.approx(c, abs=1e-12) for c in _line_gamma_oracle(0.23, 0.6, pa))
    assert e[1] == pytest.approx(pa.s2_bar)
    assert pi_minus(pa.s1_bar_plus(), pa.s2_hat_plus(), pa) == pytest.approx(
        (pa.s1_bar, pa.s2_hat), abs=1e-12)
    # a point on the corner's batch line maps to the corner
    t = 0.3
    assert pi_minus(pa.s1_bar + t, pa.s2_bar + pa.R21 * t, pa) == pytest.approx(
        (pa.s1_bar, pa.s2_bar), abs=1e-12)


def test_pi_minus_rejects_points_outside_omega1(pa):
    with pytest.raises(RegionError):
        pi_minus(0.1, 0.1, pa)  # below both thresholds, not on the locus


def test_pi_plus(pa):
    assert pi_plus(pa.s1_bar, pa.s2_hat, pa) == pytest.approx(
        (pa.s1_bar_plus(), pa.s2_hat_plus()), abs=1e-12)
    # pi_minus inverts pi_plus on the threshold locus
    for s2 in np.linspace(0.01, pa.s2_bar, 50):
        assert pi_minus(*pi_plus(pa.s1_bar, s2, pa), pa) == pytest.approx((pa.s1_bar, s2), abs=1e-12)
    for s1 in np.linspace(0.01, pa.s1_bar, 50):
        assert pi_minus(*pi_plus(s1, pa.s2_bar, pa), pa) == pytest.approx((s1, pa.s2_bar), abs=1e-12)
    a, b = pi_plus(pa.s1_bar, pa.s2_bar, pa)
    assert V(a, b, pa) == pytest.approx(V(pa.s1_bar, pa.s2_bar, pa), abs=1e-12)


def test_g_map_is_impulse_on_concentrations(pa):
    assert g_map(0.6, 0.5, pa) == pytest.approx((0.76, 0.7))


def test_classify_region(pa, pb, q):
    gb = region_geometry(pb, q)
    assert classify_region(0.6, 0.7, pb, gb).label == RegionLabel.OMEGA_LAMBDA
    ga = region_geometry(pa, q)
    reg = classify_region(pa.s1_in, pa.s2_in, pa, ga)
    assert reg.in_omega1 and reg.in_omega1a
    assert classify_region(pa.s1_bar / 2, pa.s2_bar / 2, pa, ga).label == RegionLabel.BELOW_THRESHOLD
    # far from the input along V < V(0, s2_bar): threshold unreachable
    assert classify_region(0.0, 3.0, pa, ga).label == RegionLabel.OMEGA0


def test_geometry_orderings(pa, pb, q):
    for p in (pa, pb):
        g = region_geometry(p, q)
        assert g.input_in_omega1 and g.mu > 0
        assert g.s2_hat < g.s2_tilde < p.s2_bar
        assert 0 < g.s2_sharp < g.s2_hat
        assert g.V_minus < 0 < g.V_plus


def test_lambdas(pb):
    l1, l2 = lambdas(pb)
    assert l1 == pytest.approx(0.4667, abs=1e-3)
    assert l2 == pytest.approx(0.2, abs=1e-12)
