"""Batch phase between impulses.

Two independent routes to the same quantities:

* :func:`integrate_batch` integrates the ODE in time with an embedded
  Runge-Kutta 5(4) pair, stopping at the threshold locus.
* :func:`biomass_change` and :func:`time_between` use the fact that batch
  trajectories are straight lines of slope ``R21`` in the (s1, s2) plane and
  reduce everything to one-dimensional integrals over ``s1``.

The integration variable for biomass is ``log x``, which keeps ``x``
positive and lets the solver follow washout down to ``x_floor``.
"""
from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.integrate import IntegrationWarning, quad, solve_ivp
from scipy.optimize import brentq

from .errors import DomainError, InfeasiblePathError, NumericalError
from .model import ModelParams, ReactorState, V

X_FLOOR = 1e-12


@dataclass(frozen=True)
class QuadratureSpec:
    abs_tol: float = 1e-12
    rel_tol: float = 1e-10
    max_subdivisions: int = 200

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise DomainError("quadrature tolerances must be positive")
        if self.max_subdivisions < 1:
            raise DomainError("max_subdivisions must be at least 1")


DEFAULT_QUAD = QuadratureSpec()


class Terminal(enum.Enum):
    HIT_GAMMA_MINUS = "HitGammaMinus"
    QUIESCENT = "Quiescent"
    HORIZON_REACHED = "HorizonReached"


@dataclass
class BatchSegment:
    """One batch run.  Arrays hold the accepted solver steps."""

    t_start: float
    t_end: float
    t: np.ndarray
    s1: np.ndarray
    s2: np.ndarray
    x: np.ndarray
    terminal: Terminal
    event_point: Optional[tuple[float, float, float]] = None
    _dense: list = field(default_factory=list, repr=False)

    @property
    def duration(self) -> float:
        return self.t_end - self.t_start

    @property
    def final(self) -> ReactorState:
        if self.event_point is not None:
            s1, s2, x = self.event_point
        else:
            s1, s2, x = self.s1[-1], self.s2[-1], self.x[-1]
        return ReactorState(float(self.t_end), max(float(s1), 0.0), max(float(s2), 0.0),
                            max(float(x), 0.0))

    @property
    def states(self) -> np.ndarray:
        """``(n, 4)`` array of ``t, s1, s2, x``."""
        return np.column_stack([self.t, self.s1, self.s2, self.x])

    def sample(self, t) -> np.ndarray:
        """Dense-output evaluation, returns ``(len(t), 3)`` rows of ``s1, s2, x``."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        out = np.empty((t.size, 3))
        if not self._dense:
            out[:] = [self.s1[0], self.s2[0], self.x[0]]
            return out
        for i, ti in enumerate(t):
            if ti < self.t_start - 1e-12 or ti > self.t_end + 1e-12:
                raise DomainError(f"t={ti} outside segment [{self.t_start}, {self.t_end}]")
            for a, b, sol in self._dense:
                if ti <= b:
                    y = sol(min(max(ti, a), b))
                    break
            out[i] = (y[0], y[1], math.exp(y[2]))
        return out


def _rhs(p: ModelParams):
    f1, f2, Y1, Y2, D = p.f1, p.f2, p.Y1, p.Y2, p.D

    def rhs(t, y):
        x = math.exp(y[2])
        g = min(f1(max(y[0], 0.0)), f2(max(y[1], 0.0)))
        return [-g * x / Y1, -g * x / Y2, g - D]

    return rhs


def _snap_to_threshold(s1, s2, p: ModelParams):
    """Move an event point onto the threshold locus along its batch line."""
    if abs(s1 - p.s1_bar) <= abs(s2 - p.s2_bar):
        return p.s1_bar, float(s2 + p.R21 * (p.s1_bar - s1))
    return float(s1 + p.R12 * (p.s2_bar - s2)), p.s2_bar


def integrate_batch(state0: ReactorState, p: ModelParams, horizon: float, *,
                    rtol: float = 1e-10, atol: float = 1e-10, x_floor: float = X_FLOOR,
                    method: str = "RK45", max_pieces: int = 1000) -> BatchSegment:
    """Integrate the batch ODE from ``state0`` until the threshold locus is hit.

    The run also stops when ``x`` decays below ``x_floor`` (growth has fallen
    under the death rate and stays there) or when ``horizon`` time units
    have elapsed.  Steps never straddle the switching surface
    ``f1(s1) = f2(s2)``.
    """
    t0 = state0.t
    t_end = t0 + horizon
    if state0.x == 0.0:
        t = np.array([t0, t_end])
        return BatchSegment(t0, t_end, t, np.full(2, state0.s1), np.full(2, state0.s2),
                            np.zeros(2), Terminal.HORIZON_REACHED)
    if max(state0.s1 - p.s1_bar, state0.s2 - p.s2_bar) <= 0:
        pt = (state0.s1, state0.s2, state0.x)
        a = np.array([t0])
        return BatchSegment(t0, t0, a, a * 0 + pt[0], a * 0 + pt[1], a * 0 + pt[2],
                            Terminal.HIT_GAMMA_MINUS, pt)

    f1, f2 = p.f1, p.f2
    log_floor = math.log(x_floor)

    def ev_gamma(t, y):
        return max(y[0] - p.s1_bar, y[1] - p.s2_bar)

    def ev_floor(t, y):
        return y[2] - log_floor

    def ev_switch(t, y):
        return f1(max(y[0], 0.0)) - f2(max(y[1], 0.0))

    ev_gamma.terminal = ev_floor.terminal = ev_switch.terminal = True
    ev_gamma.direction = ev_floor.direction = -1
    ev_switch.direction = 0

    rhs = _rhs(p)
    y = np.array([state0.s1, state0.s2, math.log(state0.x)])
    ts, ys, dense = [np.array([t0])], [y[:, None]], []
    t = t0
    terminal, event_point = Terminal.HORIZON_REACHED, None
    for _ in range(max_pieces):
        k_start = ev_switch(t, y)
        sol = solve_ivp(rhs, (t, t_end), y, method=method, rtol=rtol, atol=atol,
                        dense_output=True, events=[ev_gamma, ev_floor, ev_switch])
        if sol.status < 0:
            raise NumericalError(f"batch integration failed: {sol.message}")
        ts.append(sol.t[1:])
        ys.append(sol.y[:, 1:])
        dense.append((t, sol.t[-1], sol.sol))
        t = sol.t[-1]
        y = sol.y[:, -1]
        if sol.status == 0:
            break
        if sol.t_events[0].size:
            terminal = Terminal.HIT_GAMMA_MINUS
            s1e, s2e = _snap_to_threshold(y[0], y[1], p)
            event_point = (s1e, s2e, math.exp(float(y[2])))
            break
        if sol.t_events[1].size:
            terminal = Terminal.QUIESCENT
            break
        # switching surface crossed: restart, and only watch for a crossing back
        ev_switch.direction = 1 if k_start > 0 else -1
    else:
        raise NumericalError("too many switching-surface crossings in one batch")

    t_all = np.concatenate(ts)
    y_all = np.concatenate(ys, axis=1)
    seg = BatchSegment(t0, t, t_all, y_all[0], y_all[1], np.exp(y_all[2]), terminal,
                       event_point, dense)
    return seg


# ---------------------------------------------------------------------------
# quadrature reductions
# ---------------------------------------------------------------------------


def line_growth(p: ModelParams, s1_end: float, s2_end: float):
    """Growth rate along the batch line through ``(s1_end, s2_end)``, as a function of s1."""
    f1, f2, R21 = p.f1, p.f2, p.R21

    def g(v):
        return min(f1(v), f2(max(s2_end + R21 * (v - s1_end), 0.0)))

    return g


def _net_integrand(p: ModelParams, s1_end: float, s2_end: float):
    g = line_growth(p, s1_end, s2_end)
    D = p.D

    def h(v):
        gv = g(v)
        return 1.0 - D / gv if gv > 0 else -math.inf

    return h


def kink_points(p: ModelParams, s1_end: float, s2_end: float, lo: float, hi: float,
                n: int = 65) -> list[float]:
    """Roots in ``(lo, hi)`` of ``f1(v) - f2(line(v))`` along a batch line."""
    if hi <= lo:
        return []
    R21 = p.R21

    def k(v):
        return p.f1(v) - p.f2(max(s2_end + R21 * (v - s1_end), 0.0))

    grid = np.linspace(lo, hi, n)
    vals = [k(v) for v in grid]
    roots = []
    for a, b, ka, kb in zip(grid[:-1], grid[1:], vals[:-1], vals[1:]):
        if ka == 0.0 and a > lo:
            roots.append(float(a))
        elif ka * kb < 0:
            roots.append(brentq(k, a, b, xtol=1e-14, rtol=1e-15))
    return roots


def _decade_breaks(lo: float, hi: float, d: float) -> list[float]:
    # geometric ladder lo + d * 10**k resolving a 1/(distance) integrand near lo
    out = []
    if 0 < d < 1e-3 * (hi - lo):
        b = lo + d
        while b < hi:
            out.append(b)
            d *= 10.0
            b = lo + d
    return out


def line_breaks(p: ModelParams, s1_end: float, s2_end: float, lo: float, hi: float
                ) -> list[float]:
    """Quadrature break points in ``s1`` for a batch line ending at ``(s1_end, s2_end)``.

    Liebig kinks plus a geometric ladder on the length scale over which the
    scarcer resource at the endpoint doubles; near a zero concentration the
    integrand ``1 - D / g`` behaves like ``1 / distance``.
    """
    out = kink_points(p, s1_end, s2_end, lo, hi)
    out += _decade_breaks(lo, hi, min(s1_end, s2_end / p.R21))
    return sorted(out)


def net_growth_along_line(p: ModelParams, e1: float, e2: float, s1_far: float,
                          q: QuadratureSpec = DEFAULT_QUAD) -> float:
    """``Y1 * integral of (1 - D/g) ds1`` from ``e1`` to ``s1_far`` on the batch line
    through ``(e1, e2)``.

    Integrates in whichever concentration is relatively scarcer at ``(e1, e2)``
    (``Y1 ds1 = Y2 ds2`` on the line), so a near-zero endpoint coordinate is
    never recovered from a difference of two O(1) numbers.
    """
    if s1_far == e1:
        return 0.0
    f1, f2, D, R12, R21 = p.f1, p.f2, p.D, p.R12, p.R21
    s2_far = e2 + R21 * (s1_far - e1)
    kinks = kink_points(p, e1, e2, min(e1, s1_far), max(e1, s1_far))
    if e2 * s1_far < e1 * s2_far:
        def h2(w):
            g = min(f1(e1 + R12 * (w - e2)), f2(w))
            return 1.0 - D / g if g > 0 else -math.inf

        lo, hi = sorted((e2, s2_far))
        breaks = [e2 + R21 * (k - e1) for k in kinks] + _decade_breaks(lo, hi, e2)
        return p.Y2 * integrate_pieces(h2, e2, s2_far, breaks, q)

    def h1(v):
        g = min(f1(v), f2(max(e2 + R21 * (v - e1), 0.0)))
        return 1.0 - D / g if g > 0 else -math.inf

    lo, hi = sorted((e1, s1_far))
    return p.Y1 * integrate_pieces(h1, e1, s1_far, kinks + _decade_breaks(lo, hi, e1), q)


def integrate_pieces(fn, lo: float, hi: float, breaks, q: QuadratureSpec) -> float:
    """Adaptive Gauss-Kronrod over ``[lo, hi]`` split at ``breaks``."""
    if hi == lo:
        return 0.0
    sign = 1.0
    if hi < lo:
        lo, hi, sign = hi, lo, -1.0
    edges = [lo] + sorted(b for b in breaks if lo < b < hi) + [hi]
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", IntegrationWarning)
            val, err, info = quad(fn, a, b, epsabs=q.abs_tol, epsrel=q.rel_tol,
                                  limit=q.max_subdivisions, full_output=1)[:3]
        if not np.isfinite(val) or err > max(1e3 * q.abs_tol, 1e3 * q.rel_tol * abs(val)):
            raise NumericalError(
                f"quadrature on [{a:.12g}, {b:.12g}] did not converge (error estimate {err:.3g})",
                estimate=sign * (total + val))
        total += val
    return sign * total


def _check_line(endpoint, start, p: ModelParams):
    v0, v1 = V(start[0], start[1], p), V(endpoint[0], endpoint[1], p)
    if abs(v0 - v1) > 1e-9 * p.v_scale:
        raise DomainError(f"{start} and {endpoint} are not on one batch line")
    if start[0] < endpoint[0] - 1e-14:
        raise DomainError("start must lie upstream of (to the right of) the endpoint")


def biomass_change(endpoint, start, p: ModelParams, q: QuadratureSpec = DEFAULT_QUAD) -> float:
    """Net change of ``x`` along the batch line from ``start`` to ``endpoint``.

    Independent of the biomass level.
    """
    _check_line(endpoint, start, p)
    return net_growth_along_line(p, endpoint[0], endpoint[1], start[0], q)


def biomass_profile(endpoint, start, x_start: float, p: ModelParams,
                    q: QuadratureSpec = DEFAULT_QUAD):
    """Return ``X(v)``: biomass when the trajectory passes ``s1 = v``."""
    e1, e2 = endpoint
    h = _net_integrand(p, e1, e2)
    kinks = line_breaks(p, e1, e2, e1, start[0])
    s1_start, Y1 = start[0], p.Y1

    def X(v):
        return x_start + Y1 * integrate_pieces(h, v, s1_start, kinks, q)

    X.kinks = kinks
    return X


def _break_even_on_line(p: ModelParams, e1, e2, lo, hi) -> Optional[float]:
    g = line_growth(p, e1, e2)
    a, b = g(lo) - p.D, g(hi) - p.D
    if a < 0 < b:
        return brentq(lambda v: g(v) - p.D, lo, hi, xtol=1e-14)
    return None


def minimum_biomass(endpoint, start, x_start: float, p: ModelParams,
                    q: QuadratureSpec = DEFAULT_QUAD) -> float:
    """Smallest ``x`` reached on the way from ``start`` to ``endpoint``.

    Growth increases with ``s1`` along a batch line, so ``x`` first rises
    (if growth exceeds ``D``) and then falls; the minimum is at one end.
    """
    X = biomass_profile(endpoint, start, x_start, p, q)
    return min(x_start, X(endpoint[0]))


def time_between(endpoint, start, x_start: float, p: ModelParams,
                 q: QuadratureSpec = DEFAULT_QUAD) -> float:
    """Batch duration from ``start`` to ``endpoint`` with initial biomass ``x_start``."""
    _check_line(endpoint, start, p)
    if start[0] == endpoint[0]:
        return 0.0
    X = biomass_profile(endpoint, start, x_start, p, q)
    if x_start <= 0 or X(endpoint[0]) <= 0:
        raise InfeasiblePathError(
            f"biomass reaches zero before the threshold (x at endpoint {X(endpoint[0]):.6g})")
    g = line_growth(p, *endpoint)

    def integrand(v):
        return 1.0 / (g(v) * X(v))

    breaks = list(X.kinks)
    be = _break_even_on_line(p, endpoint[0], endpoint[1], endpoint[0], start[0])
    if be is not None:
        breaks.append(be)
    return p.Y1 * integrate_pieces(integrand, endpoint[0], start[0], breaks, q)
