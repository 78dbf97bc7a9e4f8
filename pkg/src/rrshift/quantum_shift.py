"""Quantum position shift in the classical limit.

``delta_z_q1`` comes from the p-derivative of the emission amplitude and is
computed three ways:

* ``delta_z_q1_xi`` -- solid-angle and retarded-time integral with the
  p-derivative taken at fixed ``xi`` from two neighbouring trajectories;
* ``delta_z_q1_t`` -- the same integral after switching to ``t``, with the
  two angular kernels integrated numerically;
* ``delta_z_q1_closed`` -- ``-int F_LD (dz/dp)_t dt``.

``delta_z_q2`` is the recoil term tied to the initial position ``z0``.
"""

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .classical_shift import emitted_energy_larmor
from .dynamics import dz_dp_closed_form, integrate_trajectory, jacobi_field, lorentz_dirac_force
from .emission import CutoffFunction, XiFrame
from .errors import DerivativeStepError
from .quadrature import PanelRule, solid_angle_rule

__all__ = [
    "Q1Route",
    "QuantumShiftResult",
    "angular_kernels",
    "delta_z_q1_xi",
    "delta_z_q1_t",
    "delta_z_q1_closed",
    "delta_z_q2",
    "dp_dP",
    "emission_probability_proxy",
    "compute_quantum_shift",
]


class Q1Route(str, Enum):
    XI_INTEGRAL = "xi_integral"
    T_INTEGRAL = "t_integral"
    CLOSED_FORM = "closed_form"


@dataclass(frozen=True)
class QuantumShiftResult:
    delta_z_q1: float
    delta_z_q2: float
    route_q1: Q1Route
    diagnostics: dict = field(default_factory=dict)

    @property
    def delta_z_q(self):
        return self.delta_z_q1 + self.delta_z_q2


def angular_kernels(zdot, n_angles=64, closed_form=False):
    """``int dOmega sin^2 / (1 - v c)^4`` and ``int dOmega sin^2 c / (1 - v c)^5``.

    With ``closed_form=True`` returns ``(8pi/3) gamma^4`` and
    ``(8pi/3) gamma^6 v`` instead of integrating.
    """
    v = np.asarray(zdot, dtype=float)
    if closed_form:
        g2 = 1.0 / (1.0 - v * v)
        return 8.0 * np.pi / 3.0 * g2**2, 8.0 * np.pi / 3.0 * g2**3 * v
    c, w = solid_angle_rule(n_angles)
    vv = v[..., None]
    D = 1.0 - vv * c
    s2 = 1.0 - c * c
    return np.sum(w * s2 / D**4, axis=-1), np.sum(w * s2 * c / D**5, axis=-1)


def _neighbours(traj, dp):
    p = traj.p_final
    return tuple(
        integrate_trajectory(traj.params, traj.potential, p + s * dp, traj.control)
        for s in (1.0, -1.0)
    )


def _xi_main_term(traj, pair, dp, cos_nodes, w_omega, rule):
    plus, minus = pair
    t = rule.nodes.ravel()
    w_t = rule.weights.ravel()
    s = traj.state(t)
    total = 0.0
    for c, w in zip(cos_nodes, w_omega):
        D = 1.0 - s.zdot * c
        d2z = s.zddot / D**3
        xi = t - s.z * c
        v = []
        for tr in (plus, minus):
            tt = XiFrame(tr, cos_theta=c).t_of_xi(xi)
            v.append(tr.state(tt).zdot)
        vp, vm = v
        d_t = (1.0 / (1.0 - vp * c) - 1.0 / (1.0 - vm * c)) / (2.0 * dp)
        d_z = (vp / (1.0 - vp * c) - vm / (1.0 - vm * c)) / (2.0 * dp)
        total += w * np.sum(w_t * D * (c * d2z * d_t - d2z * d_z))
    return -(traj.params.alpha_c / (4.0 * np.pi)) * total


def _xi_cross_term(traj, pair, dp, cutoff, cos_nodes, w_omega, n_panels=8):
    """Cutoff term ``-(alpha/16pi) int dOmega dxi d_p(dtau/dxi)^2 d(chi^2)/dxi``."""
    plus, minus = pair
    W = cutoff.width
    total = 0.0
    for a, b in ((cutoff.xi_a - W, cutoff.xi_a), (cutoff.xi_b, cutoff.xi_b + W)):
        rule = PanelRule(np.linspace(a, b, n_panels + 1), 16)
        xi = rule.nodes.ravel()
        dchi2 = 2.0 * cutoff(xi) * cutoff.derivative(xi)
        for c, w in zip(cos_nodes, w_omega):
            sq = []
            for tr in (plus, minus):
                s = tr.state(XiFrame(tr, cos_theta=c).t_of_xi(xi))
                sq.append(1.0 / (s.gamma * (1.0 - s.zdot * c)) ** 2)
            d_sq = (sq[0] - sq[1]) / (2.0 * dp)
            total += w * np.sum(rule.weights.ravel() * d_sq * dchi2)
    return -(traj.params.alpha_c / (16.0 * np.pi)) * total


def delta_z_q1_xi(traj, cutoff=None, dp_rel=1e-4, n_angles=64, step_tol=1e-6):
    """Fixed-xi route; returns ``(delta_z_q1, diagnostics)``.

    The p-derivative is a central difference over trajectories at
    ``p +/- dp`` with ``dp = dp_rel * p``; repeating it at ``2 dp`` gives a
    step-doubling estimate of the truncation error.  ``diagnostics`` holds
    that estimate and the cutoff cross-term, which must vanish.

    Raises
    ------
    DerivativeStepError
        If the step-doubling error estimate exceeds ``step_tol`` relative.
    """
    cutoff = cutoff or CutoffFunction.covering(traj)
    cos_nodes, w_omega = solid_angle_rule(n_angles)
    rule = traj.support_rule(order=16)
    dp = dp_rel * traj.p_final
    pair = _neighbours(traj, dp)
    main = _xi_main_term(traj, pair, dp, cos_nodes, w_omega, rule)
    wide = _xi_main_term(traj, _neighbours(traj, 2.0 * dp), 2.0 * dp, cos_nodes, w_omega, rule)
    step_err = abs(wide - main) / 3.0
    cross = _xi_cross_term(traj, pair, dp, cutoff, cos_nodes, w_omega)
    if step_err > step_tol * max(abs(main), np.finfo(float).tiny):
        raise DerivativeStepError(
            f"p-derivative step error {step_err:.3e} exceeds {step_tol:.1e} relative"
        )
    diag = {"step_error": step_err, "cutoff_cross_term": cross, "dp": dp}
    return main, diag


def delta_z_q1_t(traj, n_angles=64, closed_form_kernels=False):
    """``t``-route with numerically integrated angular kernels."""
    rule = traj.support_rule(order=16)
    t = rule.nodes
    s = traj.state(t)
    K4, K5 = angular_kernels(s.zdot, n_angles, closed_form_kernels)
    dzdp = dz_dp_closed_form(traj, t)
    integrand = dzdp * (s.zdddot * K4 + 3.0 * s.zddot**2 * K5)
    return -(traj.params.alpha_c / (4.0 * np.pi)) * rule.integrate(integrand)


def delta_z_q1_closed(traj, method="closed"):
    """``-int F_LD (dz/dp)_t dt``.

    ``method="closed"`` uses the quadrature formula for ``(dz/dp)_t``;
    ``method="jacobi"`` uses the Jacobi field seeded at ``t = 0``.
    """
    rule = traj.support_rule()
    t = rule.nodes
    if method == "closed":
        dzdp = dz_dp_closed_form(traj, t)
    elif method == "jacobi":
        dzdp = jacobi_field(traj, 0.0)(t)[0]
    else:
        raise ValueError(f"unknown method {method!r}")
    return -rule.integrate(lorentz_dirac_force(traj, t) * dzdp)


def dp_dP(params, p, hbar_k):
    """Linearized Jacobian ``dp/dP = 1 - m^2 hbar k / (p^2 p0)``."""
    m = params.m
    p0 = np.hypot(p, m)
    return 1.0 - m * m * hbar_k / (p * p * p0)


def delta_z_q2(traj, z0, E_em=None):
    """Recoil shift ``-m^2 z0 E_em / (p^2 p0)``; exactly zero for ``V(t)``."""
    if not traj.is_static:
        return 0.0
    if E_em is None:
        E_em = emitted_energy_larmor(traj)
    m, p = traj.params.m, traj.p_final
    return -m * m * z0 * E_em / (p * p * traj.p0)


def emission_probability_proxy(traj, hbar, E_em=None):
    """``E_em / (hbar omega)`` with ``omega`` the inverse acceleration time."""
    if E_em is None:
        E_em = emitted_energy_larmor(traj)
    t_lo, t_hi = traj.support
    return E_em * (t_hi - t_lo) / hbar


def compute_quantum_shift(traj, z0=0.0, route=None, cutoff=None):
    """Assemble ``delta_z_q1`` (chosen route) and ``delta_z_q2``."""
    if route is None:
        route = Q1Route.XI_INTEGRAL if traj.is_static else Q1Route.CLOSED_FORM
    route = Q1Route(route)
    diag = {}
    if route is Q1Route.XI_INTEGRAL:
        q1, diag = delta_z_q1_xi(traj, cutoff)
    elif route is Q1Route.T_INTEGRAL:
        q1 = delta_z_q1_t(traj)
    else:
        q1 = delta_z_q1_closed(traj)
    return QuantumShiftResult(q1, delta_z_q2(traj, z0), route, diag)
