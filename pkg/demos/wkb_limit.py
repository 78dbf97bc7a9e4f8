"""From WKB mode functions to the classical emission amplitude.

At finite hbar the photon takes momentum out of the charge and the final
mode differs from the initial one.  Integrating the product of the two WKB
modes and letting hbar shrink should reproduce the classical amplitude, with
the difference falling off linearly in hbar.
"""

import numpy as np

from rrshift import (
    CutoffFunction,
    ParticleParams,
    StaticPotentialSpec,
    TimePotentialSpec,
    emission_amplitude,
    hbar_convergence,
    integrate_trajectory,
    wkb_validity,
)

params = ParticleParams()
static = StaticPotentialSpec(0.3, 2.0, 1.0)
print(f"max |d(1/kappa)/dz| = {wkb_validity(static, params, 1.5):.4f}  "
      "(WKB needs hbar times this << 1)\n")

hbars = (1e-2, 3e-3, 1e-3, 3e-4, 1e-4)
for label, spec in (("V(z)", static), ("V(t)", TimePotentialSpec(0.3, -3.0, -1.0))):
    traj = integrate_trajectory(params, spec, 1.5)
    cut = CutoffFunction.covering(traj)
    for k, theta in ((1.0, 0.4), (5.0, 2.5)):
        ref = np.array(emission_amplitude(traj, k, theta, cut))
        hc = hbar_convergence(traj, k, theta, ref, hbars=hbars, cutoff=cut)
        print(f"{label}  k = {k}, theta = {theta}:  |A_classical| = {np.linalg.norm(ref):.4e}")
        for h, amp in zip(hc.hbars, hc.amplitudes):
            dev = np.linalg.norm(np.array(amp) - ref) / np.linalg.norm(ref)
            print(f"    hbar = {h:.0e}   relative deviation {dev:.3e}")
        print(f"    fitted order {hc.order:.3f}, Richardson limit error {hc.rel_error:.1e}\n")
