"""Invariant checks for a single instance (used by ``scf-lab verify``)."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .analysis import Verdict, mu, predict_outcome
from .batchode import DEFAULT_QUAD, QuadratureSpec, Terminal, biomass_change, integrate_batch
from .model import ModelParams, ReactorState, V, impulse_map, project_down
from .orbit import orbit_profile, period_T
from .reference import random_start
from .simulate import Outcome, simulate


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def check_impulse_contraction(p: ModelParams, rng, n: int = 100) -> CheckResult:
    worst = 0.0
    for _ in range(n):
        s1, s2 = rng.uniform(0, 2 * p.s1_in), rng.uniform(0, 2 * p.s2_in)
        a, b, _ = impulse_map(s1, s2, 1.0, p)
        scale = p.Y1 * (p.s1_in + s1) + p.Y2 * (p.s2_in + s2)
        worst = max(worst, abs(V(a, b, p) - (1 - p.r) * V(s1, s2, p)) / scale)
    return CheckResult("impulse_contraction", worst < 1e-12, f"max rel error {worst:.3g}")


def _random_batch(p, rng, q):
    s1, s2, x = random_start(p, rng)
    e = project_down(s1, s2, p)
    dx = biomass_change(e, (s1, s2), p, q)
    x0 = x + max(0.0, -dx) + 0.05
    seg = integrate_batch(ReactorState(0.0, s1, s2, x0), p, 1e5)
    return (s1, s2, x0), dx, seg


def check_batch_invariants(p: ModelParams, rng, q: QuadratureSpec = DEFAULT_QUAD,
                           n: int = 10) -> list[CheckResult]:
    v_drift = oracle = 0.0
    pos_ok = mono_ok = hit_ok = True
    for _ in range(n):
        (s1, s2, x0), dx, seg = _random_batch(p, rng, q)
        v0 = V(s1, s2, p)
        v_drift = max(v_drift, float(np.max(np.abs(V(seg.s1, seg.s2, p) - v0)))
                      / max(abs(v0), 1e-3 * p.v_scale))
        W = seg.x + 0.5 * p.Y1 * seg.s1 + 0.5 * p.Y2 * seg.s2
        mono_ok &= bool(np.all(np.diff(W) <= 1e-9 * max(1.0, W[0])))
        pos_ok &= bool(min(seg.s1.min(), seg.s2.min(), seg.x.min()) >= -1e-12)
        hit_ok &= seg.terminal == Terminal.HIT_GAMMA_MINUS
        if seg.terminal == Terminal.HIT_GAMMA_MINUS:
            x_end = seg.event_point[2]
            oracle = max(oracle, abs(x_end - (x0 + dx)) / abs(x_end))
    return [
        CheckResult("batch_V_conservation", v_drift < 1e-9, f"max rel drift {v_drift:.3g}"),
        CheckResult("batch_mass_dissipation", mono_ok, "x + Y1 s1/2 + Y2 s2/2 non-increasing"),
        CheckResult("batch_positivity", pos_ok, "no component below -1e-12"),
        CheckResult("batch_oracle_equivalence", hit_ok and oracle < 1e-6,
                    f"max rel diff {oracle:.3g}"),
    ]


def check_orbit(p: ModelParams, q: QuadratureSpec = DEFAULT_QUAD) -> list[CheckResult]:
    m = mu(p.r, p, q)
    if not m > 0:
        return [CheckResult("orbit", True, f"skipped: mu(r) = {m:.6g} <= 0")]
    r = p.r
    x_minus, x_plus = m / r, (1 - r) * m / r
    s1p, s2p = p.s1_bar_plus(), p.s2_hat_plus()
    post = p.to_user(s1p, s2p)
    traj = simulate(ReactorState(0.0, post[0], post[1], x_plus), p, max_impulses=2,
                    stop_when_cycling=False)
    T = period_T(r, p, q, mu_r=m)
    errs = []
    for e in traj.impulses:
        s1, s2 = p.to_canonical(e.pre[0], e.pre[1])
        errs += [abs(s1 - p.s1_bar) / p.s1_bar, abs(s2 - p.s2_hat) / p.s2_hat,
                 abs(e.pre[2] - x_minus) / x_minus]
    times = traj.impulse_times
    periods = np.diff(np.concatenate([[0.0], times]))
    closure = max(errs) if errs else math.inf
    one_per = len(times) == 2 and bool(np.all(np.abs(periods - T) <= 1e-6 * T))
    grid = np.linspace(p.s1_bar, s1p, 9)[1:-1]
    prof = max(abs(orbit_profile(s, r, p, q, "minus", m) - orbit_profile(s, r, p, q, "plus", m))
               for s in grid)
    return [
        CheckResult("orbit_closure", closure < 1e-6, f"max rel return error {closure:.3g}"),
        CheckResult("orbit_one_impulse_per_period", one_per,
                    f"periods {periods.tolist()} vs T = {T:.12g}"),
        CheckResult("orbit_profile_consistency", prof < 1e-9, f"max diff {prof:.3g}"),
    ]


def check_prediction(p: ModelParams, state0: ReactorState, q: QuadratureSpec = DEFAULT_QUAD,
                     max_impulses: int = 200) -> CheckResult:
    pred = predict_outcome(state0, p, q)
    traj = simulate(state0, p, max_impulses=max_impulses)
    ok = prediction_matches(pred, traj)
    return CheckResult("prediction_vs_simulation", ok,
                       f"predicted {pred.verdict.value} ({pred.predicted_impulses}), "
                       f"observed {traj.label}" + (" [marginal]" if pred.marginal else ""))


def prediction_matches(pred, traj) -> bool:
    if pred.verdict == Verdict.CONVERGES:
        return traj.outcome == Outcome.CYCLING
    if pred.verdict in (Verdict.FAILS_FINITE, Verdict.NO_IMPULSE):
        return (traj.outcome in (Outcome.FAILED, Outcome.NO_IMPULSE)
                and pred.predicted_impulses == traj.n_impulses)
    return traj.outcome != Outcome.CYCLING


def verify_instance(p: ModelParams, q: QuadratureSpec = DEFAULT_QUAD,
                    state0: Optional[ReactorState] = None,
                    rng: Optional[np.random.Generator] = None) -> list[CheckResult]:
    rng = np.random.default_rng(0) if rng is None else rng
    out = [check_impulse_contraction(p, rng)]
    if V(p.s1_bar, 0.0, p) > 0:
        out += check_batch_invariants(p, rng, q)
        out += check_orbit(p, q)
    if state0 is not None:
        out.append(check_prediction(p, state0, q))
    return out
