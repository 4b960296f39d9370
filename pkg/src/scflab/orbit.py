"""The periodic orbit and throughput optimization over the drain fraction."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import minimize_scalar

from .analysis import mu, r_star
from .batchode import (DEFAULT_QUAD, QuadratureSpec, integrate_pieces, line_breaks,
                       line_growth)
from .errors import NoPeriodicOrbit, NumericalError, SCFError
from .model import ModelParams


@dataclass(frozen=True)
class PeriodicOrbit:
    r: float
    x_minus: float
    x_plus: float
    pre_point: tuple[float, float]
    post_point: tuple[float, float]
    T: float
    Q: float
    mu: float


def _net_integrand(p: ModelParams):
    g = line_growth(p, p.s1_bar, p.s2_hat)
    D = p.D
    return lambda v: 1.0 - D / g(v)


def orbit_profile(s1: float, r: float, p: ModelParams, q: QuadratureSpec = DEFAULT_QUAD,
                  form: str = "minus", mu_r: Optional[float] = None) -> float:
    """Biomass on the periodic orbit as a function of ``s1``.

    ``form="minus"`` integrates up from the pre-impulse point,
    ``form="plus"`` down from the post-impulse point; both describe the
    same curve.
    """
    mu_r = mu(r, p, q) if mu_r is None else mu_r
    lo, hi = p.s1_bar, p.s1_bar_plus(r)
    h = _net_integrand(p)
    kinks = line_breaks(p, p.s1_bar, p.s2_hat, lo, hi)
    if form == "minus":
        return mu_r / r - p.Y1 * integrate_pieces(h, lo, s1, kinks, q)
    if form == "plus":
        return (1 - r) * mu_r / r + p.Y1 * integrate_pieces(h, s1, hi, kinks, q)
    raise ValueError(f"form must be 'minus' or 'plus', got {form!r}")


def period_T(r: float, p: ModelParams, q: QuadratureSpec = DEFAULT_QUAD,
             mu_r: Optional[float] = None) -> float:
    """Minimal period of the periodic orbit at drain fraction ``r``."""
    mu_r = mu(r, p, q) if mu_r is None else mu_r
    if not mu_r > 0:
        raise NoPeriodicOrbit(f"mu({r}) = {mu_r:.6g} <= 0: no periodic orbit")
    lo, hi = p.s1_bar, p.s1_bar_plus(r)
    h = _net_integrand(p)
    g = line_growth(p, p.s1_bar, p.s2_hat)
    kinks = line_breaks(p, p.s1_bar, p.s2_hat, lo, hi)
    x_minus, Y1 = mu_r / r, p.Y1
    # finer subdivision near the left end, where x_minus -> 0 as r -> r_star
    qq = QuadratureSpec(q.abs_tol, q.rel_tol, max(q.max_subdivisions, 1000))

    def X(v):
        return x_minus - Y1 * integrate_pieces(h, lo, v, kinks, q)

    def integrand(v):
        xv = X(v)
        if xv <= 0:
            raise NumericalError(f"orbit profile nonpositive at s1={v:.12g}")
        return 1.0 / (g(v) * xv)

    breaks = list(kinks)
    if lo < hi:
        breaks.append(lo + 1e-3 * (hi - lo))
    return Y1 * integrate_pieces(integrand, lo, hi, breaks, qq)


def throughput_Q(r: float, p: ModelParams, q: QuadratureSpec = DEFAULT_QUAD) -> float:
    """Long-run drained fraction per unit time, ``r / T(r)``."""
    return r / period_T(r, p, q)


def periodic_orbit(r: float, p: ModelParams, q: QuadratureSpec = DEFAULT_QUAD) -> PeriodicOrbit:
    mu_r = mu(r, p, q)
    if not mu_r > 0:
        raise NoPeriodicOrbit(f"mu({r}) = {mu_r:.6g} <= 0: no periodic orbit")
    T = period_T(r, p, q, mu_r=mu_r)
    x_minus = mu_r / r
    return PeriodicOrbit(
        r=r, x_minus=x_minus, x_plus=(1 - r) * x_minus,
        pre_point=(p.s1_bar, p.s2_hat), post_point=(p.s1_bar_plus(r), p.s2_hat_plus(r)),
        T=T, Q=r / T, mu=mu_r,
    )


def q_limit_at_zero(p: ModelParams) -> float:
    """Limit of ``Q(r)`` as ``r -> 0`` when the orbit persists down to ``r = 0``."""
    return min(p.f1(p.s1_bar), p.f2(p.s2_hat)) - p.D


def period_slope_at_zero(p: ModelParams) -> float:
    """``T'(0)`` from the limiting pre-impulse biomass; equals ``1 / q_limit_at_zero``."""
    gmin = min(p.f1(p.s1_bar), p.f2(p.s2_hat))
    x0 = p.Y1 * (p.s1_in - p.s1_bar) * (1 - p.D / gmin)
    return p.Y1 * (p.s1_in - p.s1_bar) / (gmin * x0)


@dataclass
class ThroughputOptimum:
    """Result of :func:`optimize_Q`.

    ``boundary`` is ``"left"`` or ``"right"`` when the best grid value sits
    at an end of the search interval; ``r_opt`` is then only the best
    evaluated point and the supremum may lie beyond it.
    """

    r_opt: float
    Q_opt: float
    r_star: float
    grid_r: np.ndarray = field(repr=False)
    grid_Q: np.ndarray = field(repr=False)
    boundary: Optional[str] = None


def optimize_Q(p: ModelParams, q: QuadratureSpec = DEFAULT_QUAD, grid_n: int = 64,
               delta: float = 1e-3, xtol: float = 1e-5) -> ThroughputOptimum:
    """Maximize ``Q`` over ``(r_star, 1)`` by grid search then golden section.

    ``Q`` is not known to be unimodal; the grid guards the refinement.
    """
    rs = r_star(p, q)
    grid = np.linspace(rs + delta, 1 - delta, grid_n)
    vals = np.full(grid_n, np.nan)
    for i, r in enumerate(grid):
        try:
            vals[i] = throughput_Q(r, p, q)
        except SCFError:
            pass
    if np.all(np.isnan(vals)):
        raise NumericalError("throughput could not be evaluated on any grid point")
    i = int(np.nanargmax(vals))
    if i == 0 or i == grid_n - 1:
        return ThroughputOptimum(float(grid[i]), float(vals[i]), rs, grid, vals,
                                 boundary="left" if i == 0 else "right")
    a, b, c = grid[i - 1], grid[i], grid[i + 1]
    res = minimize_scalar(lambda r: -throughput_Q(r, p, q), bracket=(a, b, c),
                          method="golden", options={"xtol": xtol / max(b, 1e-3)})
    r_opt, Q_opt = float(res.x), float(-res.fun)
    if not (a <= r_opt <= c) or Q_opt < vals[i]:
        r_opt, Q_opt = float(b), float(vals[i])
    return ThroughputOptimum(r_opt, Q_opt, rs, grid, vals)
