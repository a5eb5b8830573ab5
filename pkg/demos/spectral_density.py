"""
Effective spectral density three ways
=====================================

The loss bath folded through the cavity mode gives J_eff(omega).  We compare
the closed form, the angle-resolved integral over in-plane wavevectors and a
brute-force normal-mode diagonalization of cavity + discretized bath.
"""

import numpy as np

from vscrate import spectral

cav = spectral.CavitySpec(omega_c=1190.0, tau_c=100.0)
print(f"omega_c = {cav.omega_c} cm^-1, Gamma_c = {cav.linewidth:.4f} cm^-1, Q = {cav.quality_factor:.1f}")

w = np.linspace(0.9, 1.1, 9) * cav.omega_c
closed = spectral.j_eff_closed(w, cav)
angular = spectral.j_eff_angular(w, cav)

# n_bath=8000 runs in seconds; the coarse bath leaves a few % ripple that 2e4 modes shrink
orc = spectral.j_eff_oracle(w, cav, n_bath=8000)
print("sum rule (should be 1):", orc.sum_rule)

print(f"{'omega':>9} {'closed':>12} {'angular/cl':>11} {'oracle/cl':>10}")
for x, c, a, o in zip(w, closed, angular, orc.values):
    print(f"{x:9.1f} {c:12.4e} {a / c:11.4f} {o / c:10.4f}")

# the angular integral converges slowly in the aperture theta_max
for deg in (80.0, 85.0, 89.0, 89.9, 89.99):
    c = spectral.CavitySpec(omega_c=1190.0, theta_max=np.radians(deg))
    r = spectral.j_eff_angular(1190.0, c) / spectral.j_eff_closed(1190.0, c)
    print(f"theta_max = {deg:6.2f} deg: angular/closed at resonance = {float(r):.5f}")
