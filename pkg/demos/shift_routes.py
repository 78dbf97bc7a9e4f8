"""Radiation-reaction position shift of a charge climbing down a potential step.

A charge comes in from the left on the plateau V0, is accelerated by the
smooth ramp between z = -Z1 and z = -Z2, and leaves with momentum p.  The
self-force makes it lag (or lead) the non-radiating reference particle by a
small distance.  Here that distance is computed by every route in the
package and the results are compared side by side.
"""

import numpy as np

from rrshift import (
    ParticleParams,
    StaticPotentialSpec,
    TimePotentialSpec,
    delta_z_class_tdep,
    delta_z_extra,
    delta_z_green,
    delta_z_LD_direct,
    delta_z_q1_closed,
    delta_z_q1_t,
    delta_z_q1_xi,
    delta_z_q2,
    emitted_energy_larmor,
    integrate_trajectory,
)

params = ParticleParams(m=1.0, alpha_c=1e-3)
step = StaticPotentialSpec(V0=0.3, Z1=2.0, Z2=1.0)
traj = integrate_trajectory(params, step, p_final=1.5)

print(f"v_in = {traj.v_in:.6f}  ->  v0 = {traj.v0:.6f}")
print(f"acceleration window t in [{traj.support[0]:.4f}, {traj.support[1]:.4f}]")
print(f"radiated energy (Larmor)   {emitted_energy_larmor(traj):.10e}\n")

# Classical side: work-energy route and Green's function (Jacobi field) route.
ld = delta_z_LD_direct(traj)
green = delta_z_green(traj)

# Quantum side, classical limit: the p-derivative of the emission amplitude.
q1_xi, diag = delta_z_q1_xi(traj)
q1_t = delta_z_q1_t(traj)
q1_closed = delta_z_q1_closed(traj)

rows = [
    ("classical, work-energy", ld),
    ("classical, Green's function", green),
    ("quantum, xi-integral", q1_xi),
    ("quantum, t-integral", q1_t),
    ("quantum, closed form", q1_closed),
]
for name, val in rows:
    print(f"{name:30s} {val:.12e}   rel. to work-energy {abs(val - ld) / abs(ld):.1e}")
print(f"\ncutoff cross-term in the xi route: {diag['cutoff_cross_term']:.2e}")

# Moving the reference particle to z0 at t = 0 adds a recoil-type term.
print("\n z0      classical extra      quantum recoil")
for z0 in (-0.5, 0.1, 1.0):
    print(f"{z0:5.1f}   {delta_z_extra(traj, z0):+.10e}   {delta_z_q2(traj, z0):+.10e}")

# A spatially uniform but time-dependent potential: no recoil term at all.
pulse = integrate_trajectory(params, TimePotentialSpec(0.3, -3.0, -1.0), 1.5)
print(f"\nV(t) switch-on: classical {delta_z_class_tdep(pulse):.10e}, "
      f"Jacobi {delta_z_green(pulse):.10e}, quantum {delta_z_q1_closed(pulse):.10e}")

# The shift is linear in the coupling.
for a in (1e-4, 1e-3, 1e-2):
    t = integrate_trajectory(ParticleParams(alpha_c=a), step, 1.5)
    print(f"alpha_c = {a:.0e}: shift / alpha_c = {delta_z_LD_direct(t) / a:.12f}")
