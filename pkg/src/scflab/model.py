"""Problem instances and the static geometry of the (s1, s2) plane.

A self-cycling fermentor with one population growing on two essential
resources.  Between impulses the batch dynamics are

    s1' = -g x / Y1,   s2' = -g x / Y2,   x' = (g - D) x,
    g = min(f1(s1), f2(s2)),

and when both resources reach their thresholds a fraction ``r`` of the
tank is drained and replaced with fresh medium at ``(s1_in, s2_in)``.

Every point-valued function in this module works in the *canonical*
orientation, where the threshold corner ``(s1_bar, s2_bar)`` lies on or
above the invariant line ``V = 0``.  :class:`ModelParams` relabels the two
resources at construction when needed and records this in ``swapped``;
use :meth:`ModelParams.to_canonical` / :meth:`ModelParams.to_user` to move
points between frames.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace
from typing import Callable, Optional, Union

import numpy as np
from scipy.optimize import brentq

from .errors import DomainError, NumericalError, RegionError

# ---------------------------------------------------------------------------
# response functions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Monod:
    """Monod uptake ``m s / (a + s)``."""

    m: float
    a: float

    def __post_init__(self):
        if not (self.m > 0 and self.a > 0):
            raise DomainError(f"Monod needs m > 0 and a > 0, got m={self.m}, a={self.a}")

    def __call__(self, s):
        return self.m * s / (self.a + s)

    def derivative(self, s):
        return self.m * self.a / (self.a + s) ** 2

    @property
    def supremum(self) -> float:
        return self.m


@dataclass(frozen=True)
class CustomMonotone:
    """A user supplied increasing response with its derivative.

    ``supremum`` is the limit of ``func`` at infinity if known; it lets
    :func:`break_even` decide unboundedness without searching.
    """

    func: Callable[[float], float]
    deriv: Callable[[float], float]
    name: str = "custom"
    supremum: Optional[float] = None

    def __call__(self, s):
        return self.func(s)

    def derivative(self, s):
        return self.deriv(s)


ResponseFunction = Union[Monod, CustomMonotone]


def validate_response(f: ResponseFunction, s_max: float = 10.0, n: int = 64,
                      fd_rtol: float = 1e-6) -> None:
    """Check ``f(0) = 0``, strict increase and derivative consistency.

    Raises DomainError on the first violated property.
    """
    if f(0.0) != 0.0:
        raise DomainError(f"response must vanish at 0, got f(0)={f(0.0)!r}")
    grid = np.geomspace(1e-6, s_max, n)
    for s in grid:
        for delta in (1e-3 * s, 0.1 * s, s):
            if not f(s + delta) > f(s):
                raise DomainError(f"response not strictly increasing near s={s:.6g}")
        # central difference, step scaled to s
        h = 1e-5 * s
        fd = (f(s + h) - f(s - h)) / (2 * h)
        d = f.derivative(s)
        if abs(fd - d) > fd_rtol * max(abs(d), 1e-300) + 1e-10:
            raise DomainError(
                f"reported derivative {d:.12g} disagrees with finite difference "
                f"{fd:.12g} at s={s:.6g}")


def break_even(f: ResponseFunction, D: float) -> float:
    """Concentration at which ``f`` equals the death rate ``D``.

    Returns ``math.inf`` when ``f`` stays below ``D``.
    """
    if not D > 0:
        raise DomainError(f"death rate must be positive, got {D}")
    if isinstance(f, Monod):
        if f.m <= D:
            return math.inf
        return f.a * D / (f.m - D)
    if f.supremum is not None and f.supremum <= D:
        return math.inf
    hi = 1.0
    while f(hi) < D:
        hi *= 2.0
        if hi > 1e15:
            return math.inf
    lam = brentq(lambda s: f(s) - D, 0.0, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps)
    if abs(f(lam) - D) > 1e-12:
        raise NumericalError("break-even root not resolved to 1e-12", estimate=lam)
    return lam


# ---------------------------------------------------------------------------
# parameters and states
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ModelParams:
    """One problem instance.

    Construction validates the positivity constraints and, if the threshold
    corner lies strictly below the invariant line, swaps the resource
    labels so that ``V(s1_bar, s2_bar) <= 0``.  ``swapped`` is managed by
    the constructor; pass it only when copying an already normalized
    instance (``dataclasses.replace`` does this for you).
    """

    f1: ResponseFunction
    f2: ResponseFunction
    Y1: float
    Y2: float
    D: float
    r: float
    s1_bar: float
    s2_bar: float
    s1_in: float
    s2_in: float
    swapped: bool = False

    def __post_init__(self):
        if not self.D > 0:
            raise DomainError(f"D must be positive, got {self.D}")
        if not 0 < self.r < 1:
            raise DomainError(f"r must lie in (0, 1), got {self.r}")
        for name in ("Y1", "Y2"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be positive, got {getattr(self, name)}")
        for i in (1, 2):
            sb, si = getattr(self, f"s{i}_bar"), getattr(self, f"s{i}_in")
            if not si > sb > 0:
                raise DomainError(f"need s{i}_in > s{i}_bar > 0, got s{i}_in={si}, s{i}_bar={sb}")
        if V(self.s1_bar, self.s2_bar, self) > 0:
            swap = {
                "f1": self.f2, "f2": self.f1, "Y1": self.Y2, "Y2": self.Y1,
                "s1_bar": self.s2_bar, "s2_bar": self.s1_bar,
                "s1_in": self.s2_in, "s2_in": self.s1_in,
                "swapped": not self.swapped,
            }
            for k, v in swap.items():
                object.__setattr__(self, k, v)

    # frame conversion -------------------------------------------------
    def to_canonical(self, s1, s2):
        return (s2, s1) if self.swapped else (s1, s2)

    def to_user(self, s1, s2):
        return (s2, s1) if self.swapped else (s1, s2)

    def with_r(self, r: float) -> "ModelParams":
        return replace(self, r=r)

    # derived constants --------------------------------------------------
    @property
    def R12(self) -> float:
        return self.Y2 / self.Y1

    @property
    def R21(self) -> float:
        return self.Y1 / self.Y2

    @property
    def s2_hat(self) -> float:
        """Where the invariant line ``V = 0`` meets the vertical part of the threshold locus."""
        return self.s2_in - self.R21 * (self.s1_in - self.s1_bar)

    def s1_bar_plus(self, r: Optional[float] = None) -> float:
        r = self.r if r is None else r
        return (1 - r) * self.s1_bar + r * self.s1_in

    def s2_bar_plus(self, r: Optional[float] = None) -> float:
        r = self.r if r is None else r
        return (1 - r) * self.s2_bar + r * self.s2_in

    def s2_hat_plus(self, r: Optional[float] = None) -> float:
        r = self.r if r is None else r
        return (1 - r) * self.s2_hat + r * self.s2_in

    @property
    def v_scale(self) -> float:
        return max(abs(self.Y1 * self.s1_in), abs(self.Y2 * self.s2_in), 1.0)


@dataclass(frozen=True)
class ReactorState:
    t: float
    s1: float
    s2: float
    x: float

    def __post_init__(self):
        if self.s1 < 0 or self.s2 < 0 or self.x < 0:
            raise DomainError(f"state components must be nonnegative: {self}")


# ---------------------------------------------------------------------------
# pointwise functions
# ---------------------------------------------------------------------------


def growth_rate(s1, s2, p: ModelParams):
    """Liebig growth rate ``min(f1(s1), f2(s2))``."""
    if np.any(np.asarray(s1) < 0) or np.any(np.asarray(s2) < 0):
        raise DomainError(f"negative concentration ({s1}, {s2})")
    return np.minimum(p.f1(s1), p.f2(s2))


def V(s1, s2, p: ModelParams):
    """Conserved-along-batch quantity; contracts by ``1 - r`` at impulses."""
    return p.Y2 * (p.s2_in - s2) - p.Y1 * (p.s1_in - s1)


def impulse_map(s1, s2, x, p: ModelParams, r: Optional[float] = None):
    r = p.r if r is None else r
    return ((1 - r) * s1 + r * p.s1_in, (1 - r) * s2 + r * p.s2_in, (1 - r) * x)


def lambdas(p: ModelParams) -> tuple[float, float]:
    return break_even(p.f1, p.D), break_even(p.f2, p.D)


def _tol(p: ModelParams) -> float:
    return 1e-12 * p.v_scale


def _on_gamma_minus(s1, s2, p: ModelParams, tol: float = 1e-12) -> bool:
    scale = max(p.s1_in, p.s2_in)
    t = tol * scale
    horiz = abs(s2 - p.s2_bar) <= t and -t <= s1 <= p.s1_bar + t
    vert = abs(s1 - p.s1_bar) <= t and -t <= s2 <= p.s2_bar + t
    return horiz or vert


def project_down(s1, s2, p: ModelParams):
    """Slope-``R21`` projection onto the threshold locus, without region checks."""
    if V(s1, s2, p) <= V(p.s1_bar, p.s2_bar, p):
        return (s1 + p.R12 * (p.s2_bar - s2), p.s2_bar)
    return (p.s1_bar, s2 + p.R21 * (p.s1_bar - s1))


def pi_minus(s1, s2, p: ModelParams):
    """Point where the batch line through ``(s1, s2)`` meets the threshold locus.

    Accepts points of the closure of Omega1 and of the threshold locus itself.
    """
    v = V(s1, s2, p)
    lo, hi = V(0.0, p.s2_bar, p), V(p.s1_bar, 0.0, p)
    t = _tol(p)
    if not (lo - t <= v <= hi + t):
        raise RegionError(f"({s1}, {s2}) lies in Omega0; no threshold point is reachable")
    if s1 < p.s1_bar and s2 < p.s2_bar and not _on_gamma_minus(s1, s2, p):
        raise RegionError(f"({s1}, {s2}) lies below both thresholds")
    return project_down(s1, s2, p)


def pi_plus(s1, s2, p: ModelParams, r: Optional[float] = None):
    """Point of the post-impulse locus whose batch line ends at ``(s1, s2)``."""
    if not _on_gamma_minus(s1, s2, p):
        raise DomainError(f"({s1}, {s2}) is not on the threshold locus")
    s1p, s2p = p.s1_bar_plus(r), p.s2_bar_plus(r)
    if V(s1, s2, p) >= V(s1p, s2p, p):
        return (s1p, s2 + p.R21 * (s1p - s1))
    return (s1 + p.R12 * (s2p - s2), s2p)


def g_map(s1, s2, p: ModelParams, r: Optional[float] = None):
    """Impulse map restricted to concentrations."""
    a, b, _ = impulse_map(s1, s2, 0.0, p, r)
    return a, b


# ---------------------------------------------------------------------------
# regions
# ---------------------------------------------------------------------------


class RegionLabel(enum.Enum):
    BELOW_THRESHOLD = "BelowThreshold"
    OMEGA0 = "Omega0"
    OMEGA1 = "Omega1"
    OMEGA1A = "Omega1A"
    OMEGA_LAMBDA = "OmegaLambda"
    BOUNDARY_LINE = "BoundaryLine"


@dataclass(frozen=True)
class RegionGeometry:
    """Derived thresholds and level values of V for one instance and ``r``.

    ``s2_sharp``, ``V_plus`` and ``N_bar`` are ``None`` when the
    successful part of the threshold locus is empty or undefined.
    """

    r: float
    R12: float
    R21: float
    lambda1: float
    lambda2: float
    s1_bar_plus: float
    s2_bar_plus: float
    s2_hat: float
    s2_hat_plus: float
    s2_tilde: float
    s2_sharp: Optional[float]
    V_edge_low: float
    V_edge_high: float
    V_corner: float
    V_minus: float
    V_plus: Optional[float]
    mu: float
    input_in_omega1: bool
    N_bar: Optional[int] = None
    lambda_gap: bool = False

    @property
    def omega_lambda_defined(self) -> bool:
        return self.lambda1 < math.inf and self.lambda2 < math.inf


@dataclass(frozen=True)
class Region:
    label: RegionLabel
    in_omega1: bool = False
    in_omega1a: bool = False
    in_omega_lambda: bool = False


def omega_lambda_bounds(p: ModelParams, g: RegionGeometry):
    """V-interval of the positive-growth region, or None if it does not exist."""
    if not (p.s1_bar > g.lambda1 and p.s2_bar > g.lambda2):
        return None
    return V(g.lambda1, p.s2_bar, p), V(p.s1_bar, g.lambda2, p)


def classify_region(s1, s2, p: ModelParams, g: Optional[RegionGeometry] = None) -> Region:
    """Locate a canonical-frame point.

    Without ``g`` only BelowThreshold / BoundaryLine / Omega0 / Omega1
    can be distinguished.
    """
    if s1 < 0 or s2 < 0:
        raise DomainError(f"negative concentration ({s1}, {s2})")
    if s1 <= p.s1_bar and s2 <= p.s2_bar:
        return Region(RegionLabel.BELOW_THRESHOLD)
    v = V(s1, s2, p)
    lo, hi = V(0.0, p.s2_bar, p), V(p.s1_bar, 0.0, p)
    t = _tol(p)
    if abs(v - lo) <= t or abs(v - hi) <= t:
        return Region(RegionLabel.BOUNDARY_LINE)
    if v < lo or v > hi:
        return Region(RegionLabel.OMEGA0)
    in_a = in_l = False
    if g is not None:
        if g.V_plus is not None:
            in_a = g.V_minus < v < g.V_plus
        bounds = omega_lambda_bounds(p, g)
        if bounds is not None:
            in_l = bounds[0] <= v <= bounds[1]
    if in_a:
        label = RegionLabel.OMEGA1A
    elif in_l:
        label = RegionLabel.OMEGA_LAMBDA
    else:
        label = RegionLabel.OMEGA1
    return Region(label, True, in_a, in_l)


def input_region(p: ModelParams) -> Region:
    return classify_region(p.s1_in, p.s2_in, p)
