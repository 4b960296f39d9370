"""Success/failure analysis of the impulsive system.

The central quantities are

* ``mu(r)``: net biomass change over one batch along the invariant line;
  a periodic orbit exists iff it is positive;
* ``r_star``: the drain fraction below which ``mu <= 0``;
* ``I(s)``: net biomass change from a start point to its first threshold hit;
* ``N0`` and ``X``: how many impulses a start point needs before it reaches
  the self-sustaining band, and the inoculum needed to survive them.

All points are in the canonical frame (see :mod:`scflab.model`) except in
:func:`predict_outcome`, which takes a user-frame :class:`ReactorState`.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.optimize import bisect, brentq

from .batchode import DEFAULT_QUAD, QuadratureSpec, net_growth_along_line
from .errors import NoViableFraction, RegionError
from .model import (ModelParams, ReactorState, RegionGeometry, RegionLabel, V,
                    classify_region, g_map, impulse_map, lambdas, pi_minus, project_down)


# ---------------------------------------------------------------------------
# net growth integrals
# ---------------------------------------------------------------------------


def _mu_raw(r: float, p: ModelParams, q: QuadratureSpec) -> float:
    if r == 0:
        return 0.0
    return net_growth_along_line(p, p.s1_bar, p.s2_hat, p.s1_bar_plus(r), q)


def input_in_omega1(p: ModelParams) -> bool:
    return V(p.s1_bar, 0.0, p) > 1e-12 * p.v_scale


def mu(r: float, p: ModelParams, q: QuadratureSpec = DEFAULT_QUAD) -> float:
    """Net biomass change over one cycle of the canonical orbit, for drain fraction ``r``."""
    if not 0 <= r <= 1:
        raise ValueError(f"r must lie in [0, 1], got {r}")
    if not input_in_omega1(p):
        raise RegionError("input concentrations lie in Omega0: no periodic operation possible")
    return _mu_raw(r, p, q)


def I_net(s1: float, s2: float, p: ModelParams, q: QuadratureSpec = DEFAULT_QUAD) -> float:
    """Net change of ``x`` from ``(s1, s2)`` to the first threshold hit."""
    e1, e2 = pi_minus(s1, s2, p)
    if s1 == e1 and s2 == e2:
        return 0.0
    return net_growth_along_line(p, e1, e2, s1, q)


def net_growth_from_vertical(s2: float, p: ModelParams, q: QuadratureSpec = DEFAULT_QUAD,
                             r: Optional[float] = None) -> float:
    """Net growth of a batch started on the post-impulse locus that ends at ``(s1_bar, s2)``."""
    return net_growth_along_line(p, p.s1_bar, s2, p.s1_bar_plus(r), q)


# ---------------------------------------------------------------------------
# geometry
# ---------------------------------------------------------------------------


def _s2_sharp(p: ModelParams, s2_tilde: float, q: QuadratureSpec) -> Optional[float]:
    if net_growth_from_vertical(s2_tilde, p, q) <= 0:
        return None
    lo = s2_tilde
    for _ in range(80):
        lo *= 0.5
        if net_growth_from_vertical(lo, p, q) <= 0:
            break
    else:
        return 0.0
    return bisect(lambda s: net_growth_from_vertical(s, p, q), lo, s2_tilde, xtol=1e-10)


def n0_from_V(v: float, V_minus: float, V_plus: float, r: float) -> tuple[int, bool]:
    """Impulses needed for the V-level ``v`` to enter ``(V_minus, V_plus)``.

    Returns ``(n, near_boundary)``; ``near_boundary`` flags a ceiling
    argument within 1e-9 of an integer, where rounding can shift ``n`` by one.
    """
    if V_minus < v < V_plus:
        return 1, False
    ref = V_minus if v <= V_minus else V_plus
    y = math.log(v / ref) / -math.log(1 - r)
    n = max(1, math.ceil(y))
    while not (V_minus < (1 - r) ** n * v < V_plus):
        n += 1
    return n, abs(y - round(y)) < 1e-9


def region_geometry(p: ModelParams, q: QuadratureSpec = DEFAULT_QUAD,
                    r: Optional[float] = None) -> RegionGeometry:
    """Compute every derived threshold and level value for ``p`` (and ``r``)."""
    if r is not None:
        p = p.with_r(r)
    r = p.r
    lam1, lam2 = lambdas(p)
    s1p, s2p = p.s1_bar_plus(), p.s2_bar_plus()
    V_corner_plus = V(s1p, s2p, p)
    s2_tilde = p.s2_in - (V_corner_plus + p.Y1 * (p.s1_in - p.s1_bar)) / p.Y2
    V_minus = V(p.s1_bar, s2_tilde, p)
    in1 = input_in_omega1(p)
    m = _mu_raw(r, p, q) if in1 else math.nan
    s2_sharp = _s2_sharp(p, s2_tilde, q) if in1 else None
    V_plus = V(p.s1_bar, s2_sharp, p) if s2_sharp is not None else None
    N_bar = None
    if in1 and m > 0 and V_plus is not None and V_minus < 0 < V_plus:
        N_bar = max(n0_from_V(V(0.0, p.s2_bar, p), V_minus, V_plus, r)[0],
                    n0_from_V(V(p.s1_bar, 0.0, p), V_minus, V_plus, r)[0])
    return RegionGeometry(
        r=r, R12=p.R12, R21=p.R21, lambda1=lam1, lambda2=lam2,
        s1_bar_plus=s1p, s2_bar_plus=s2p, s2_hat=p.s2_hat, s2_hat_plus=p.s2_hat_plus(),
        s2_tilde=s2_tilde, s2_sharp=s2_sharp,
        V_edge_low=V(0.0, p.s2_bar, p), V_edge_high=V(p.s1_bar, 0.0, p),
        V_corner=V(p.s1_bar, p.s2_bar, p), V_minus=V_minus, V_plus=V_plus, mu=m,
        input_in_omega1=in1, N_bar=N_bar, lambda_gap=lam2 > s2_tilde,
    )


# ---------------------------------------------------------------------------
# drain fraction threshold
# ---------------------------------------------------------------------------


def r_star(p: ModelParams, q: QuadratureSpec = DEFAULT_QUAD, grid_n: int = 200) -> float:
    """Largest ``r`` with ``mu <= 0`` on ``[0, r]``.

    Raises NoViableFraction when ``mu(1) <= 0``.  ``mu`` is not known to be
    unimodal, so the sign change is bracketed on a uniform grid before the
    bisection.
    """
    lam1, lam2 = lambdas(p)
    if input_in_omega1(p) and lam1 <= p.s1_bar and lam2 <= p.s2_hat:
        return 0.0
    if mu(1.0, p, q) <= 0:
        raise NoViableFraction("mu(1) <= 0: no drain fraction sustains the culture")
    grid = np.linspace(0.0, 1.0, grid_n + 2)[1:-1]
    lo = 0.0
    for r in grid:
        if _mu_raw(r, p, q) > 0:
            hi = r
            break
        lo = r
    else:
        hi = 1.0
    if lo == 0.0:
        tiny = hi * 1e-6
        if _mu_raw(tiny, p, q) > 0:
            return 0.0
        lo = tiny
    return brentq(lambda r: _mu_raw(r, p, q), lo, hi, xtol=1e-10)


# ---------------------------------------------------------------------------
# start-point analysis
# ---------------------------------------------------------------------------


def gpi(s1: float, s2: float, p: ModelParams, n: int = 1):
    """Apply ``n`` rounds of (project to threshold, then impulse)."""
    for _ in range(n):
        s1, s2 = g_map(*project_down(s1, s2, p), p)
    return s1, s2


def _require_positive_mu(g: RegionGeometry):
    if not (g.mu > 0 and g.V_plus is not None):
        raise RegionError("requires mu(r) > 0 and input concentrations in Omega1")


def N0(s1: float, s2: float, p: ModelParams, g: RegionGeometry) -> int:
    """Number of impulses a start point needs to land in the self-sustaining band."""
    _require_positive_mu(g)
    reg = classify_region(s1, s2, p, g)
    if not reg.in_omega1:
        raise RegionError(f"({s1}, {s2}) is not in Omega1 ({reg.label.value})")
    return n0_from_V(V(s1, s2, p), g.V_minus, g.V_plus, p.r)[0]


def scaled_net_growth(s1: float, s2: float, p: ModelParams, n: int,
                      q: QuadratureSpec = DEFAULT_QUAD) -> list[float]:
    """``(1-r)^-k I((g o pi-)^k (s1, s2))`` for ``k = 0 .. n-1``."""
    out = []
    for k in range(n):
        out.append((1 - p.r) ** (-k) * I_net(s1, s2, p, q))
        s1, s2 = gpi(s1, s2, p)
    return out


def X_threshold(s1: float, s2: float, p: ModelParams, q: QuadratureSpec = DEFAULT_QUAD,
                g: Optional[RegionGeometry] = None) -> float:
    """Least initial biomass above which the start point cycles forever."""
    g = region_geometry(p, q) if g is None else g
    n0 = N0(s1, s2, p, g)
    partial = np.cumsum(scaled_net_growth(s1, s2, p, n0, q))
    return -float(partial.min())


def N_bar(p: ModelParams, g: RegionGeometry) -> int:
    _require_positive_mu(g)
    return g.N_bar


# ---------------------------------------------------------------------------
# outcome prediction
# ---------------------------------------------------------------------------


class Verdict(enum.Enum):
    CONVERGES = "ConvergesToPeriodicOrbit"
    FAILS_FINITE = "FailsFiniteImpulses"
    FAILS_UNBOUNDED = "FailsUnboundedCycleTime"
    NO_IMPULSE = "NoImpulse"


class Reason(enum.Enum):
    ZERO_BIOMASS = "zero_biomass"
    START_IN_OMEGA0 = "start_in_omega0"
    START_ON_BOUNDARY = "start_on_boundary_line"
    INPUT_IN_OMEGA0 = "input_in_omega0"
    MU_NEGATIVE = "mu_negative"
    MU_ZERO = "mu_zero"
    BIOMASS_ABOVE_X = "biomass_above_threshold"
    BIOMASS_AT_OR_BELOW_X = "biomass_at_or_below_threshold"


@dataclass(frozen=True)
class OutcomePrediction:
    """Predicted long-run behaviour of one start state.

    ``max_impulses`` is the theoretical bound (``N0 - 1`` under positive
    ``mu``); ``predicted_impulses`` is the exact count from iterating the
    net-growth recursion, ``None`` when infinite or undetermined.
    """

    verdict: Verdict
    reason: Reason
    mu: float
    region: RegionLabel
    immediate_impulses: int = 0
    X_threshold: Optional[float] = None
    N0: Optional[int] = None
    max_impulses: Optional[int] = None
    predicted_impulses: Optional[int] = None
    marginal: bool = False


def apply_immediate_impulses(s1, s2, x, p: ModelParams, cap: int = 10_000):
    """Fire impulses at ``t = 0`` while the state is on or below the threshold locus."""
    n = 0
    while s1 <= p.s1_bar and s2 <= p.s2_bar:
        if n >= cap:
            raise RuntimeError("immediate impulses did not terminate")
        s1, s2, x = impulse_map(s1, s2, x, p)
        n += 1
    return s1, s2, x, n


def count_impulses(s1, s2, x, p: ModelParams, q: QuadratureSpec = DEFAULT_QUAD,
                   cap: int = 10_000) -> Optional[int]:
    """Impulses before failure, by iterating ``x- = x+ + I`` and the threshold map.

    Returns None when ``cap`` impulses happen without failure.
    """
    for n in range(cap):
        if not classify_region(s1, s2, p).label == RegionLabel.OMEGA1:
            return n
        x_minus = x + I_net(s1, s2, p, q)
        if x_minus <= 0:
            return n
        s1, s2 = gpi(s1, s2, p)
        x = (1 - p.r) * x_minus
    return None


def predict_outcome(state0: ReactorState, p: ModelParams, q: QuadratureSpec = DEFAULT_QUAD,
                    g: Optional[RegionGeometry] = None, marginal_band: float = 1e-6
                    ) -> OutcomePrediction:
    """Classify the long-run fate of ``state0`` (user frame)."""
    s1, s2 = p.to_canonical(state0.s1, state0.s2)
    x = state0.x
    s1, s2, x, n_imm = apply_immediate_impulses(s1, s2, x, p)
    reg = classify_region(s1, s2, p)
    g = region_geometry(p, q) if g is None else g
    m = g.mu
    base = dict(mu=m, region=reg.label, immediate_impulses=n_imm)
    if x <= 0:
        return OutcomePrediction(Verdict.NO_IMPULSE, Reason.ZERO_BIOMASS, **base)
    if reg.label == RegionLabel.OMEGA0:
        return OutcomePrediction(Verdict.NO_IMPULSE, Reason.START_IN_OMEGA0,
                                 max_impulses=0, predicted_impulses=0, **base)
    if reg.label == RegionLabel.BOUNDARY_LINE:
        return OutcomePrediction(Verdict.NO_IMPULSE, Reason.START_ON_BOUNDARY,
                                 max_impulses=0, predicted_impulses=0, **base)
    reg = classify_region(s1, s2, p, g)
    base["region"] = reg.label
    if not g.input_in_omega1:
        n = count_impulses(s1, s2, x, p, q)
        return OutcomePrediction(Verdict.FAILS_FINITE, Reason.INPUT_IN_OMEGA0, max_impulses=n,
                                 predicted_impulses=n, **base)
    if abs(m) <= 10 * q.abs_tol:
        return OutcomePrediction(Verdict.FAILS_UNBOUNDED, Reason.MU_ZERO, **base)
    if m < 0:
        n = count_impulses(s1, s2, x, p, q)
        return OutcomePrediction(Verdict.FAILS_FINITE, Reason.MU_NEGATIVE, max_impulses=n,
                                 predicted_impulses=n, **base)
    n0 = N0(s1, s2, p, g)
    X = X_threshold(s1, s2, p, q, g)
    marginal = abs(x - X) < marginal_band
    if x > X:
        return OutcomePrediction(Verdict.CONVERGES, Reason.BIOMASS_ABOVE_X, X_threshold=X,
                                 N0=n0, marginal=marginal, **base)
    n = count_impulses(s1, s2, x, p, q, cap=n0)
    return OutcomePrediction(Verdict.FAILS_FINITE, Reason.BIOMASS_AT_OR_BELOW_X, X_threshold=X, N0=n0,
                             max_impulses=n0 - 1, predicted_impulses=n, marginal=marginal,
                             **base)

