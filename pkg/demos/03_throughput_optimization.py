"""Throughput Q(r) = r / T(r) of the periodic orbit, and its maximizer.

Below the critical fraction r* the one-cycle growth mu(r) is negative and
there is no orbit; T(r) blows up as r approaches r* and, more slowly, as r
approaches 1.  The optimum sits in between.
"""
import time

from scflab import optimize_Q, period_T, r_star
from scflab.orbit import q_limit_at_zero, throughput_Q
from scflab.reference import instance_b

p = instance_b()
rs = r_star(p)
print(f"critical drain fraction r* = {rs:.5f}")

t0 = time.perf_counter()
opt = optimize_Q(p, grid_n=64)
print(f"optimum r = {opt.r_opt:.4f}, Q = {opt.Q_opt:.5f}  ({time.perf_counter() - t0:.2f} s)")

print("\n   r        T(r)      Q(r)")
for r in [rs + 0.01, 0.3, 0.5, opt.r_opt, 0.8, 0.9, 0.99]:
    print(f"{r:6.3f}  {period_T(r, p):9.4f}  {throughput_Q(r, p):.5f}")

# Q decays to zero as r -> 1, but only like 1 / log(1 / (1 - r))
print("\n  1-r       Q")
for k in range(1, 7):
    print(f"  1e-{k}   {throughput_Q(1 - 10.0 ** -k, p):.5f}")

# With a larger first threshold both break-even levels sit below the
# threshold and periodic operation survives arbitrarily small drains.
p2 = instance_b(s1_bar=0.75)
print(f"\ns1_bar = 0.75: r* = {r_star(p2)}, Q(1e-4) = {throughput_Q(1e-4, p2):.5f}, "
      f"limit min(f1, f2) - D = {q_limit_at_zero(p2):.5f}")
