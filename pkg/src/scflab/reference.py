"""Reference parameter sets and random instance generation."""
from __future__ import annotations

import numpy as np

from .model import ModelParams, Monod, V

# slow-uptake first resource; periodic orbit exists at r = 0.4
INSTANCE_A = dict(f1=Monod(2.0, 1.9), f2=Monod(2.0, 0.3), Y1=4.0, Y2=1.9, D=0.5, r=0.4,
                  s1_bar=0.6, s2_bar=0.5, s1_in=1.0, s2_in=1.0)
# both break-even levels below threshold; used for throughput optimization
INSTANCE_B = dict(f1=Monod(2.0, 1.4), f2=Monod(2.0, 0.6), Y1=2.0, Y2=0.7, D=0.5, r=0.4,
                  s1_bar=0.7, s2_bar=0.6, s1_in=1.0, s2_in=1.0)
# same as B but with slower second uptake: washout at r = 0.4
INSTANCE_WASHOUT = dict(f1=Monod(2.0, 1.4), f2=Monod(2.0, 1.2), Y1=2.0, Y2=0.7, D=0.5, r=0.4,
                        s1_bar=0.7, s2_bar=0.6, s1_in=1.0, s2_in=1.0)


def instance_a(**overrides) -> ModelParams:
    return ModelParams(**{**INSTANCE_A, **overrides})


def instance_b(**overrides) -> ModelParams:
    return ModelParams(**{**INSTANCE_B, **overrides})


def instance_washout(**overrides) -> ModelParams:
    return ModelParams(**{**INSTANCE_WASHOUT, **overrides})


def random_instance(rng: np.random.Generator, require_input_omega1: bool = True,
                    max_tries: int = 1000) -> ModelParams:
    """Draw a Monod instance with moderate, non-stiff parameters."""
    for _ in range(max_tries):
        s1_in, s2_in = (float(v) for v in rng.uniform(0.8, 2.0, 2))
        kw = dict(
            f1=Monod(rng.uniform(1.0, 3.0), rng.uniform(0.1, 2.0)),
            f2=Monod(rng.uniform(1.0, 3.0), rng.uniform(0.1, 2.0)),
            Y1=rng.uniform(0.5, 4.0), Y2=rng.uniform(0.5, 4.0), D=rng.uniform(0.1, 0.6),
            r=rng.uniform(0.2, 0.8),
            s1_bar=s1_in * float(rng.uniform(0.2, 0.8)),
            s2_bar=s2_in * float(rng.uniform(0.2, 0.8)),
            s1_in=s1_in, s2_in=s2_in,
        )
        p = ModelParams(**kw)
        if not require_input_omega1 or V(p.s1_bar, 0.0, p) > 1e-3 * p.v_scale:
            return p
    raise RuntimeError("could not draw an instance with input in Omega1")


def random_start(p: ModelParams, rng: np.random.Generator, x_range=(0.01, 1.0),
                 margin: float = 1e-3) -> tuple[float, float, float]:
    """A canonical-frame start strictly inside Omega1 with random biomass."""
    lo, hi = V(0.0, p.s2_bar, p), V(p.s1_bar, 0.0, p)
    span = hi - lo
    while True:
        s1 = rng.uniform(0.0, 1.5 * p.s1_in)
        s2 = rng.uniform(0.0, 1.5 * p.s2_in)
        v = V(s1, s2, p)
        if (s1 > p.s1_bar or s2 > p.s2_bar) and lo + margin * span < v < hi - margin * span:
            return s1, s2, float(rng.uniform(*x_range))
