"""Photon spectrum of the accelerated charge and the energy it carries.

The amplitude needs a cutoff chi(xi) in the retarded time, and the ramps of
chi radiate on their own.  Their contribution falls like 1/W with the ramp
width W, so it can be removed either in closed form or by running at W and
2W.  Both are compared with the time-domain Larmor energy.
"""

import numpy as np

from rrshift import (
    CutoffFunction,
    ParticleParams,
    SmoothStepProfile,
    StaticPotentialSpec,
    emitted_energy_larmor,
    energy_extrapolated,
    energy_time_domain,
    integrate_trajectory,
    spectrum_grid,
)

traj = integrate_trajectory(ParticleParams(), StaticPotentialSpec(0.3, 2.0, 1.0), 1.5)
cut = CutoffFunction.covering(traj)
print(f"cutoff plateau [{cut.xi_a:.3f}, {cut.xi_b:.3f}], ramp width W = {cut.width:.3f}")

# dE/dk dcos(theta) on a coarse grid.  At small k the cutoff ramps dominate and
# their contribution is negative; the physical spectrum sits on top of it.
grid = spectrum_grid(traj, cut, np.array([0.5, 1.0, 2.0, 4.0, 8.0]), n_angles=5)
print("\ncos(theta) \\ k " + "".join(f"{k:>11.1f}" for k in grid.k))
for c, row in zip(grid.cos_theta, grid.density):
    print(f"{c:+14.3f} " + "".join(f"{v:11.3e}" for v in row))

E_L = emitted_energy_larmor(traj)
E_inf, at_W, at_2W = energy_extrapolated(traj, cut)
print(f"\nLarmor                     {E_L:.10e}")
print(f"time domain, retarded form {energy_time_domain(traj):.10e}")
for r in (at_W, at_2W):
    print(f"W = {r.width:6.2f}: raw {r.raw:+.6e}  ramp artifact {r.artifact:+.6e}  "
          f"subtracted {r.energy:.10e}")
print(f"W -> infinity              {E_inf:.10e}   (rel. to Larmor {abs(E_inf - E_L) / E_L:.1e})")

# A different ramp polynomial changes the artifact but not the physics.
other = energy_extrapolated(traj, CutoffFunction.covering(traj, profile=SmoothStepProfile(9)))[0]
print(f"degree-9 ramps, W -> inf   {other:.10e}")
