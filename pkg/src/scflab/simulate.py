"""Hybrid simulation: batch phases separated by drain/refill impulses."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .batchode import X_FLOOR, BatchSegment, Terminal, integrate_batch
from .model import ModelParams, ReactorState, impulse_map


class Outcome(enum.Enum):
    CYCLING = "cycling"
    FAILED = "failed"
    NO_IMPULSE = "no-impulse"
    UNDETERMINED = "undetermined"


@dataclass(frozen=True)
class ImpulseEvent:
    """One drain/refill, in the user frame.  ``k`` counts from 1; immediate
    impulses at ``t = 0`` have ``k = 0``."""

    k: int
    t: float
    pre: tuple[float, float, float]
    post: tuple[float, float, float]
    immediate: bool = False


@dataclass
class Trajectory:
    params: ModelParams
    segments: list[BatchSegment] = field(default_factory=list)
    impulses: list[ImpulseEvent] = field(default_factory=list)
    outcome: Outcome = Outcome.UNDETERMINED

    @property
    def n_impulses(self) -> int:
        """Impulses at ``t > 0``."""
        return sum(not e.immediate for e in self.impulses)

    @property
    def label(self) -> str:
        if self.outcome == Outcome.FAILED:
            return f"failed-after-{self.n_impulses}"
        return self.outcome.value

    @property
    def impulse_times(self) -> np.ndarray:
        return np.array([e.t for e in self.impulses if not e.immediate])

    @property
    def final(self) -> ReactorState:
        st = self.segments[-1].final
        s1, s2 = self.params.to_user(st.s1, st.s2)
        return ReactorState(st.t, s1, s2, st.x)

    def samples(self) -> np.ndarray:
        """Accepted solver steps of all batch phases as ``t, s1, s2, x`` (user frame)."""
        rows = np.vstack([seg.states for seg in self.segments])
        if self.params.swapped:
            rows[:, [1, 2]] = rows[:, [2, 1]]
        return rows


def _cycled(times: np.ndarray, n_cycles: int, tol: float) -> bool:
    if times.size < n_cycles + 1:
        return False
    d = np.diff(times[-(n_cycles + 1):])
    return float(d.max() - d.min()) <= tol * float(d.mean())


def simulate(state0: ReactorState, p: ModelParams, *, max_impulses: int = 200,
             horizon: float = 1e6, rtol: float = 1e-10, atol: float = 1e-10,
             x_floor: float = X_FLOOR, cycle_tol: float = 1e-6, cycle_window: int = 5,
             stop_when_cycling: bool = True, method: str = "RK45") -> Trajectory:
    """Run the impulsive system from ``state0`` (user frame).

    Stops when the culture washes out, when impulse intervals have settled
    to ``cycle_tol`` over ``cycle_window`` cycles, after ``max_impulses``
    impulses, or at ``horizon``.
    """
    traj = Trajectory(p)

    def record(k, t, pre, post, immediate=False):
        a = p.to_user(pre[0], pre[1]) + (pre[2],)
        b = p.to_user(post[0], post[1]) + (post[2],)
        traj.impulses.append(ImpulseEvent(k, t, a, b, immediate))

    s1, s2 = p.to_canonical(state0.s1, state0.s2)
    x, t = state0.x, state0.t
    while s1 <= p.s1_bar and s2 <= p.s2_bar:
        post = impulse_map(s1, s2, x, p)
        record(0, t, (s1, s2, x), post, immediate=True)
        s1, s2, x = post
    t_end = t + horizon
    state = ReactorState(t, s1, s2, x)
    k = 0
    while True:
        seg = integrate_batch(state, p, t_end - state.t, rtol=rtol, atol=atol,
                              x_floor=x_floor, method=method)
        traj.segments.append(seg)
        if seg.terminal == Terminal.QUIESCENT:
            traj.outcome = Outcome.FAILED if k else Outcome.NO_IMPULSE
            break
        if seg.terminal == Terminal.HORIZON_REACHED:
            traj.outcome = Outcome.UNDETERMINED
            break
        k += 1
        pre = seg.event_point
        post = impulse_map(*pre, p)
        record(k, seg.t_end, pre, post)
        state = ReactorState(seg.t_end, *post)
        if stop_when_cycling and _cycled(traj.impulse_times, cycle_window, cycle_tol):
            traj.outcome = Outcome.CYCLING
            break
        if k >= max_impulses:
            traj.outcome = (Outcome.CYCLING if _cycled(traj.impulse_times, cycle_window, cycle_tol)
                            else Outcome.UNDETERMINED)
            break
    return traj
