"""
When is the first step rate-limiting?
=====================================

G -> nu'_L -> nu'_R -> nu_R with rates k1, k2, k3.  If the later steps are
fast the intermediates stay small and the product appears at k1.  Slow them
down and the fitted rate drifts away from k1, and the steady-state check on
nu'_L starts to fail.
"""

from vscrate import kinetics

k1 = 1e-3   # fs^-1

print(f"{'k2=k3 / k1':>10} {'fit / k1':>10} {'steady state':>13}")
for ratio in (1.5, 3, 10, 100, 1000):
    s = kinetics.KineticScheme(k1, ratio * k1, ratio * k1)
    traj = kinetics.integrate_scheme(s, 30.0 / k1, 3001)
    fit = kinetics.effective_rate_fit(traj)
    ss = kinetics.steady_state_check(traj, s)
    print(f"{ratio:10g} {fit.rate / k1:10.6f} {str(ss.satisfied):>13}")

# the matrix exponential and an adaptive integrator agree to ~1e-10
s = kinetics.KineticScheme(k1, 0.02, 0.5)
a = kinetics.integrate_scheme(s, 2e4, 201, "expm")
b = kinetics.integrate_scheme(s, 2e4, 201, "adaptive")
print("max |expm - adaptive| =", abs(a.populations - b.populations).max())

# equal rates make the generator defective; expm does not care
s = kinetics.KineticScheme(k1, k1, k1)
traj = kinetics.integrate_scheme(s, 40.0 / k1, 4001)
print("k1=k2=k3: peak P_nuL =", traj["P_nuL"].max(), "(1/e expected)")
