"""Classical radiation-reaction position shift and radiated energy.

Three independent routes to the shift at ``t = 0``:

* ``delta_z_LD_direct`` -- nested time integral obtained from the
  work-energy balance (static potentials);
* ``delta_z_green`` -- Green's-function form built from Jacobi fields
  seeded at every quadrature node (any potential);
* ``delta_z_class_tdep`` -- nested integral from momentum balance
  (time-dependent potentials).
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .dynamics import _propagate, lorentz_dirac_force
from .errors import DomainError

__all__ = [
    "ShiftRoute",
    "ClassicalShiftResult",
    "delta_z_LD_direct",
    "delta_z_green",
    "delta_z_extra",
    "emitted_energy_larmor",
    "work_by_radiation_reaction",
    "delta_z_class_tdep",
    "compute_classical_shift",
]


class ShiftRoute(str, Enum):
    DIRECT_INTEGRAL = "direct_integral"
    GREEN_FUNCTION = "green_function"
    TIME_DEPENDENT = "time_dependent"


@dataclass(frozen=True)
class ClassicalShiftResult:
    delta_z_LD: float
    delta_z_extra: float
    E_em: float
    route: ShiftRoute

    @property
    def delta_z_class(self):
        return self.delta_z_LD + self.delta_z_extra


def _require_static(traj, what):
    if not traj.is_static:
        raise DomainError(f"{what} needs a static potential")


def delta_z_LD_direct(traj, t_ref=0.0):
    """Shift measured at ``t_ref`` from the work-energy route.

    ``-(v0/m) int [int_{t_ref}^t dt' / (gamma^3 zdot^2)] F_LD zdot dt``; the
    outer integrand vanishes off the acceleration window, so the outer
    integral runs over the window only.  ``t_ref = 0`` gives the usual shift.
    """
    _require_static(traj, "delta_z_LD_direct")
    outer = traj.support_rule()
    inner = traj.quad_rule(hi=max(0.0, t_ref))

    def g(t):
        s = traj.state(t)
        return 1.0 / (s.gamma**3 * s.zdot**2)

    t = outer.nodes
    G = inner.cumulative(g, t, origin=t_ref)
    integrand = G * lorentz_dirac_force(traj, t) * traj.state(t).zdot
    return -(traj.v0 / traj.params.m) * outer.integrate(integrand)


def delta_z_green(traj):
    """``int F_LD(t) Dz_t(0) dt`` with a fresh Jacobi field per node."""
    outer = traj.support_rule()
    t = outer.nodes.ravel()
    Dz = np.array([_propagate(traj, float(s), 0.0).final()[0] for s in t])
    return outer.integrate(lorentz_dirac_force(traj, outer.nodes) * Dz.reshape(outer.nodes.shape))


def emitted_energy_larmor(traj):
    """Relativistic Larmor energy ``(2 alpha_c / 3) int (gamma^3 zddot)^2 dt``."""
    rule = traj.support_rule(order=16)
    s = traj.state(rule.nodes)
    return (2.0 * traj.params.alpha_c / 3.0) * rule.integrate((s.gamma**3 * s.zddot) ** 2)


def work_by_radiation_reaction(traj):
    """``int F_LD zdot dt`` on the same quadrature as the Larmor energy."""
    rule = traj.support_rule(order=16)
    return rule.integrate(lorentz_dirac_force(traj, rule.nodes) * traj.state(rule.nodes).zdot)


def delta_z_extra(traj, z0, E_em=None):
    """Extra shift when the reference particle sits at ``z0`` at ``t = 0``.

    Zero for time-dependent potentials (translation invariance).
    """
    if not traj.is_static:
        return 0.0
    if not z0 > -traj.potential.Z2:
        raise DomainError(f"z0 = {z0} must lie right of -Z2 = {-traj.potential.Z2}")
    if E_em is None:
        E_em = emitted_energy_larmor(traj)
    m, v0 = traj.params.m, traj.v0
    return -z0 * E_em / (m * traj.gamma0**3 * v0**2)


def delta_z_class_tdep(traj):
    """``-int [int_0^t dt' / (m gamma^3)] F_LD dt`` for ``V = V(t)``."""
    if traj.is_static:
        raise DomainError("delta_z_class_tdep needs a time-dependent potential")
    outer = traj.support_rule()
    inner = traj.quad_rule()
    m = traj.params.m

    def g(t):
        return 1.0 / (m * traj.state(t).gamma ** 3)

    G = inner.cumulative(g, outer.nodes, origin=0.0)
    return -outer.integrate(G * lorentz_dirac_force(traj, outer.nodes))


def compute_classical_shift(traj, z0=0.0, route=None):
    """Bundle shift, extra shift and Larmor energy for one route."""
    if route is None:
        route = ShiftRoute.DIRECT_INTEGRAL if traj.is_static else ShiftRoute.TIME_DEPENDENT
    route = ShiftRoute(route)
    if route is ShiftRoute.DIRECT_INTEGRAL:
        dz = delta_z_LD_direct(traj)
    elif route is ShiftRoute.GREEN_FUNCTION:
        dz = delta_z_green(traj)
    else:
        dz = delta_z_class_tdep(traj)
    E = emitted_energy_larmor(traj)
    return ClassicalShiftResult(dz, delta_z_extra(traj, z0, E), E, route)
