"""Regions, the one-cycle net growth mu(r), and the inoculum threshold.

A culture with a slow-uptake first resource.  We compute the geometry of the
phase plane at drain fraction r = 0.4, then ask how much biomass a reactor
started at (s1, s2) = (0.23, 0.6) needs in order to cycle forever.
"""
from scflab import I_net, N0, X_threshold, classify_region, region_geometry
from scflab.analysis import gpi, scaled_net_growth
from scflab.reference import instance_a

p = instance_a()
g = region_geometry(p)

print("post-impulse corner   ", (p.s1_bar_plus(), p.s2_bar_plus()))
print("break-even levels     ", (round(g.lambda1, 4), round(g.lambda2, 4)))
print("s2_hat, s2_tilde      ", (round(g.s2_hat, 4), round(g.s2_tilde, 4)))
print("V_-, V_+              ", (round(g.V_minus, 4), round(g.V_plus, 4)))
print("mu(0.4)               ", round(g.mu, 5))

# The start lies in Omega1 but outside the self-sustaining band (V_-, V_+):
# every batch from it loses biomass until enough impulses have pulled V in.
s1, s2 = 0.23, 0.6
print("\nstart region          ", classify_region(s1, s2, p, g).label.value)
n = N0(s1, s2, p, g)
print("impulses to the band  ", n)

# Net biomass change of each batch, rescaled by the dilution it has survived.
pt = (s1, s2)
for k, val in enumerate(scaled_net_growth(s1, s2, p, n)):
    print(f"  batch {k}: start {tuple(round(c, 4) for c in pt)}  (1-r)^-k I = {val:+.4f}")
    pt = gpi(*pt, p)

X = X_threshold(s1, s2, p, g=g)
print(f"\nminimum inoculum X    {X:.4f}")
print("x(0) = 0.50 is below X and washes out; x(0) = 0.53 is above and cycles.")
print("single-batch check I(0.23, 0.6) =", round(I_net(s1, s2, p), 4))
