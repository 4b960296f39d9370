"""Simulate the three fates predicted by the analysis.

* low inoculum: finitely many impulses, then washout
* high inoculum: convergence to the periodic orbit
* negative one-cycle growth: washout from any start

Trajectories are written to CSV (t, s1, s2, x) for plotting elsewhere.
"""
import sys
from pathlib import Path

from scflab import ReactorState, periodic_orbit, predict_outcome, simulate
from scflab.instance import dumps_csv
from scflab.reference import instance_a, instance_washout

out_dir = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("demo_output")
out_dir.mkdir(exist_ok=True)

runs = {
    "low_inoculum": (instance_a(), ReactorState(0.0, 0.23, 0.6, 0.50)),
    "high_inoculum": (instance_a(), ReactorState(0.0, 0.23, 0.6, 0.53)),
    "washout": (instance_washout(), ReactorState(0.0, 0.1, 0.7, 0.3)),
}

for name, (p, s0) in runs.items():
    pred = predict_outcome(s0, p)
    traj = simulate(s0, p)
    print(f"{name:14s} predicted {pred.verdict.value:25s} observed {traj.label}")
    for e in traj.impulses[:4]:
        tag = " (immediate)" if e.immediate else ""
        print(f"    t={e.t:9.4f}  x-={e.pre[2]:.5f}  x+={e.post[2]:.5f}{tag}")
    (out_dir / f"{name}.csv").write_text(dumps_csv(["t", "s1", "s2", "x"], traj.samples()))

# The converging run settles on the periodic orbit
p = instance_a()
o = periodic_orbit(p.r, p)
last = simulate(runs["high_inoculum"][1], p).impulses[-1]
print(f"\norbit x- = mu/r = {o.x_minus:.6f}, simulated last x- = {last.pre[2]:.6f}, "
      f"period T = {o.T:.4f}")
print(f"trajectories written to {out_dir}/")
