"""Zeroth-order motion, the Lorentz-Dirac force and linearized (Jacobi) fields.

The worldline is anchored at ``z(0) = 0`` with final momentum ``p`` and is
integrated *backward* in time.  Only the acceleration window needs an ODE
solve; before and after it the motion is free and is written down exactly,
so every derivative of ``z`` beyond the first is exactly zero there.
"""

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.integrate import solve_ivp

from .errors import ToleranceError, TurningPointError
from .potentials import check_pair
from .quadrature import PanelRule, panel_edges

__all__ = [
    "ParticleParams",
    "GridControl",
    "TrajectoryState",
    "Trajectory",
    "JacobiField",
    "integrate_trajectory",
    "lorentz_dirac_force",
    "linearized_coefficients",
    "jacobi_field",
    "symplectic_product",
    "dz_dp_closed_form",
]


@dataclass(frozen=True)
class ParticleParams:
    """Mass and coupling in natural units (c = 1, alpha_c = e^2 / 4 pi)."""

    m: float = 1.0
    alpha_c: float = 1e-3

    def __post_init__(self):
        if not self.m > 0.0:
            raise ValueError("mass must be positive")
        if self.alpha_c < 0.0:
            raise ValueError("alpha_c must be non-negative")

    @property
    def charge(self):
        return float(np.sqrt(4.0 * np.pi * self.alpha_c))


@dataclass(frozen=True)
class GridControl:
    """Integrator and quadrature settings carried by every trajectory.

    ``padding`` is a length for static potentials and a time for
    time-dependent ones.  ``n_panels`` Gauss panels of ``gauss_order`` points
    cover the acceleration window in every downstream quadrature.
    """

    rtol: float = 1e-12
    atol: float = 1e-14
    padding: float = 1.0
    n_grid: int = 401
    n_panels: int = 24
    gauss_order: int = 8
    conservation_tol: float = 1e-10


class TrajectoryState(NamedTuple):
    t: np.ndarray
    z: np.ndarray
    zdot: np.ndarray
    zddot: np.ndarray
    zdddot: np.ndarray
    gamma: np.ndarray


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Densely evaluable zeroth-order worldline.

    ``support = (t_lo, t_hi)`` is the time window where the external force
    acts; ``z_support`` the positions at those times.  ``state`` accepts any
    real ``t`` and extends the motion freely outside ``[t_lo, t_hi]``.
    """

    params: ParticleParams
    potential: object
    p_final: float
    p0: float
    v0: float
    v_in: float
    t_min: float
    support: tuple
    z_support: tuple
    control: GridControl
    _sol: object = field(repr=False)
    _P_in: float = field(repr=False)
    _P_out: float = field(repr=False)

    @property
    def is_static(self):
        return self.potential.kind == "static"

    @property
    def gamma0(self):
        return 1.0 / np.sqrt(1.0 - self.v0**2)

    @property
    def grid(self):
        return grid_nodes(self)

    @property
    def samples(self):
        return self.state(self.grid)

    def momentum(self, t):
        """Kinetic momentum ``m dz/dtau`` and position at ``t``."""
        t = np.asarray(t, dtype=float)
        shape = t.shape
        t = t.ravel()
        t_lo, t_hi = self.support
        z_lo, z_hi = self.z_support
        z = np.where(t >= t_hi, z_hi + self.v0 * (t - t_hi), z_lo + self.v_in * (t - t_lo))
        P = np.where(t >= t_hi, self._P_out, self._P_in)
        mid = (t > t_lo) & (t < t_hi)
        if np.any(mid):
            y = self._sol(t[mid])
            z[mid] = y[0]
            P[mid] = y[1]
        return z.reshape(shape), P.reshape(shape)

    def state(self, t):
        t = np.asarray(t, dtype=float)
        m = self.params.m
        z, P = self.momentum(t)
        E = np.sqrt(P * P + m * m)
        zdot = P / E
        gamma = E / m
        g3 = gamma**3
        if self.is_static:
            f1 = self.potential.derivative(z, 1)
            f2 = self.potential.derivative(z, 2) * zdot
        else:
            f1 = self.potential.derivative(t, 1)
            f2 = self.potential.derivative(t, 2)
        zddot = -f1 / (m * g3)
        zdddot = -f2 / (m * g3) - 3.0 * gamma**2 * zdot * zddot**2
        return TrajectoryState(t, z, zdot, zddot, zdddot, gamma)

    def conservation_residual(self, t=None):
        """Relative residual of the conservation law at ``t`` (default grid)."""
        t = self.grid if t is None else np.asarray(t, dtype=float)
        s = self.state(t)
        m = self.params.m
        if self.is_static:
            res = m * s.gamma + self.potential.derivative(s.z, 0) - self.p0
            return np.abs(res) / self.p0
        res = m * s.gamma * s.zdot + self.potential.derivative(t, 0) - self.p_final
        return np.abs(res) / abs(self.p_final)

    def quad_rule(self, lo=None, hi=0.0, n_panels=None, order=None, free_panels=2):
        """Panel rule over ``[lo, hi]`` with breakpoints at the support edges."""
        lo = self.t_min if lo is None else lo
        n_panels = n_panels or self.control.n_panels
        order = order or self.control.gauss_order
        t_lo, t_hi = self.support
        bps = sorted({lo, hi, *[b for b in (t_lo, t_hi, 0.0) if lo < b < hi]})
        counts = []
        for a, b in zip(bps[:-1], bps[1:]):
            counts.append(n_panels if (a >= t_lo and b <= t_hi) else free_panels)
        return PanelRule(panel_edges(bps, counts), order)

    def support_rule(self, n_panels=None, order=None):
        n_panels = n_panels or self.control.n_panels
        order = order or self.control.gauss_order
        return PanelRule(np.linspace(*self.support, n_panels + 1), order)


def grid_nodes(traj):
    """Sample grid over ``[t_min, 0]`` that contains the support edges."""
    base = np.linspace(traj.t_min, 0.0, traj.control.n_grid)
    return np.unique(np.concatenate([base, traj.support]))


def integrate_trajectory(params, potential, p_final, grid_control=None):
    """Integrate the non-radiating worldline through ``z(0) = 0``.

    Static potentials: ``p_final`` is the momentum after the acceleration and
    the energy ``sqrt(p^2 + m^2)`` is conserved.  Time-dependent potentials:
    ``p_final`` is the conserved canonical momentum ``m dz/dtau + V(t)``.

    Raises
    ------
    TurningPointError
        If the particle would come to rest anywhere on its path.
    ToleranceError
        If the conservation-law residual exceeds ``conservation_tol``.
    """
    ctl = grid_control or GridControl()
    check_pair(potential, params)
    if potential.kind == "static":
        traj = _integrate_static(params, potential, float(p_final), ctl)
    else:
        traj = _integrate_time(params, potential, float(p_final), ctl)
    resid = float(np.max(traj.conservation_residual()))
    if resid > ctl.conservation_tol:
        raise ToleranceError(f"conservation residual {resid:.3e} exceeds {ctl.conservation_tol:.1e}")
    if np.min(traj.samples.zdot) <= 0.0:
        raise TurningPointError("velocity reaches zero on the grid")
    return traj


def _integrate_static(params, spec, p, ctl):
    m = params.m
    if p <= 0.0:
        raise TurningPointError("final momentum must be positive")
    p0 = np.hypot(p, m)
    e_in = p0 - spec.V0
    if e_in * e_in - m * m <= 0.0 or e_in <= 0.0:
        raise TurningPointError(
            f"no incoming branch: p0 - V0 = {e_in:.6g} does not exceed m = {m}"
        )
    P_in = np.sqrt(e_in * e_in - m * m)
    v0 = p / p0
    v_in = P_in / e_in
    Z1, Z2 = spec.Z1, spec.Z2
    t_hi = -Z2 / v0

    def rhs(t, y):
        return [y[1] / np.hypot(y[1], m), -spec.derivative(y[0], 1)]

    def hit(t, y):
        return y[0] + Z1

    hit.terminal = True
    span = 2.0 * (Z1 - Z2) / min(v0, v_in) + 1.0
    sol = solve_ivp(
        rhs, (t_hi, t_hi - span), [-Z2, p], method="DOP853",
        rtol=ctl.rtol, atol=ctl.atol, events=hit, dense_output=True,
    )
    if sol.status != 1:
        raise TurningPointError("trajectory never leaves the acceleration region")
    t_lo = float(sol.t_events[0][0])
    t_min = t_lo - ctl.padding / v_in
    return Trajectory(
        params, spec, p, p0, v0, v_in, t_min, (t_lo, t_hi), (-Z1, -Z2), ctl,
        _sol=sol.sol, _P_in=P_in, _P_out=p,
    )


def _integrate_time(params, spec, p, ctl):
    m = params.m
    lo_v, hi_v = spec.v_range
    if p - hi_v <= 0.0:
        raise TurningPointError(
            f"canonical momentum {p} must exceed the largest potential value {hi_v}"
        )
    P_out = p - spec.V_plateau
    v0 = P_out / np.hypot(P_out, m)
    p0 = np.hypot(P_out, m)
    t_lo, t_hi = spec.support
    z_hi = v0 * t_hi

    def rhs(t, y):
        return [y[1] / np.hypot(y[1], m), -spec.derivative(t, 1)]

    sol = solve_ivp(
        rhs, (t_hi, t_lo), [z_hi, P_out], method="DOP853",
        rtol=ctl.rtol, atol=ctl.atol, dense_output=True,
    )
    z_lo = float(sol.y[0, -1])
    P_in = p
    v_in = P_in / np.hypot(P_in, m)
    t_min = t_lo - ctl.padding
    return Trajectory(
        params, spec, p, p0, v0, v_in, t_min, (t_lo, t_hi), (z_lo, z_hi), ctl,
        _sol=sol.sol, _P_in=P_in, _P_out=P_out,
    )


def lorentz_dirac_force(traj, t):
    """``F_LD = (2 alpha_c / 3) gamma d/dt(gamma^3 zddot)`` along the worldline."""
    s = traj.state(t)
    g = s.gamma
    return (2.0 * traj.params.alpha_c / 3.0) * (
        g**4 * s.zdddot + 3.0 * g**6 * s.zdot * s.zddot**2
    )


def linearized_coefficients(traj, t):
    """Coefficients of the linearized equations: ``(A(t), B(t))``.

    ``A = (1 - zdot^2)^{3/2} / m`` and ``B = dF_ext/dz`` along the worldline.
    """
    s = traj.state(t)
    A = (1.0 - s.zdot**2) ** 1.5 / traj.params.m
    if traj.is_static:
        B = -traj.potential.derivative(s.z, 2)
    else:
        B = np.zeros_like(s.z)
    return A, B


@dataclass(frozen=True, eq=False)
class JacobiField:
    """Linearized solution with ``(Dz, DP) = (0, 1)`` at ``seed_time``."""

    seed_time: float
    t: np.ndarray
    Dz: np.ndarray
    DP: np.ndarray
    _forward: object = field(repr=False, default=None)
    _backward: object = field(repr=False, default=None)

    def __call__(self, t):
        """``(Dz(t), DP(t))`` from the dense solutions."""
        t = np.asarray(t, dtype=float)
        out = np.empty((2,) + t.shape)
        fw = t >= self.seed_time
        if np.any(fw):
            out[:, fw] = _dense(self._forward, self.seed_time, t[fw])
        if np.any(~fw):
            out[:, ~fw] = _dense(self._backward, self.seed_time, t[~fw])
        return out[0], out[1]


def _dense(sol, s, t):
    if sol is None:
        if np.all(t == s):
            return np.vstack([np.zeros_like(t), np.ones_like(t)])
        raise ValueError("Jacobi field not integrated in that direction")
    return sol(t)


def _jacobi_rhs(traj):
    # the worldline is re-integrated alongside the linearized pair, which is
    # far cheaper than evaluating the dense trajectory at every stage
    m2 = traj.params.m ** 2
    V = traj.potential
    if traj.is_static:
        def rhs(t, y):
            z, P, dz, dP = y
            E = (P * P + m2) ** 0.5
            return [P / E, -V.scalar_derivative(z, 1),
                    m2 / E**3 * dP, -V.scalar_derivative(z, 2) * dz]
    else:
        def rhs(t, y):
            z, P, dz, dP = y
            E = (P * P + m2) ** 0.5
            return [P / E, -V.scalar_derivative(t, 1), m2 / E**3 * dP, 0.0]
    return rhs


def _propagate(traj, s, t_end, rtol=None, atol=None):
    """Dense solution of the linearized equations from ``s`` to ``t_end``."""
    ctl = traj.control
    if t_end == s:
        return None
    t_lo, t_hi = traj.support
    # step across support edges explicitly so the solver never straddles a kink
    stops = [b for b in (t_lo, t_hi) if min(s, t_end) < b < max(s, t_end)]
    stops = sorted(stops, reverse=bool(t_end < s)) + [t_end]
    rhs = _jacobi_rhs(traj)
    z_s, P_s = traj.momentum(s)
    y = np.array([float(z_s), float(P_s), 0.0, 1.0])
    start = s
    pieces = []
    for stop in stops:
        sol = solve_ivp(rhs, (start, stop), y, method="DOP853",
                        rtol=rtol or ctl.rtol, atol=atol or ctl.atol, dense_output=True)
        if not sol.success:
            raise ToleranceError(f"Jacobi field integration failed: {sol.message}")
        pieces.append((start, stop, sol.sol))
        y = sol.y[:, -1]
        start = stop
    return _Piecewise(pieces)


class _Piecewise:
    def __init__(self, pieces):
        self.pieces = pieces

    def __call__(self, t):
        t = np.atleast_1d(np.asarray(t, dtype=float))
        out = np.empty((2, t.size))
        done = np.zeros(t.size, dtype=bool)
        for a, b, sol in self.pieces:
            lo, hi = min(a, b), max(a, b)
            sel = (~done) & (t >= lo - 1e-14) & (t <= hi + 1e-14)
            if np.any(sel):
                out[:, sel] = sol(np.clip(t[sel], lo, hi))[2:]
                done |= sel
        if not np.all(done):
            raise ValueError("time outside the integrated range of the Jacobi field")
        return out

    def final(self):
        a, b, sol = self.pieces[-1]
        return sol(b)[2:]


def jacobi_field(traj, s):
    """Jacobi field seeded at ``s`` and integrated over ``[t_min, 0]``."""
    s = float(s)
    lo, hi = min(traj.t_min, s), max(0.0, s)
    fw = _propagate(traj, s, hi)
    bw = _propagate(traj, s, lo)
    grid = traj.grid
    f = JacobiField(s, grid, None, None, fw, bw)
    Dz, DP = f(grid)
    return JacobiField(s, grid, Dz, DP, fw, bw)


def symplectic_product(f1, f2, t):
    """``Dz1 DP2 - DP1 Dz2`` at ``t`` (constant in ``t`` for exact fields)."""
    z1, P1 = f1(t)
    z2, P2 = f2(t)
    return z1 * P2 - P1 * z2


def dz_dp_closed_form(traj, t):
    """``(dz/dp)_t`` from the explicit momentum dependence of the worldline.

    Static: ``(v0/m) zdot(t) int_0^t dt' / (gamma^3 zdot^2)``.
    Time-dependent: ``int_0^t dt' / (m gamma^3)``.
    """
    t = np.asarray(t, dtype=float)
    m = traj.params.m
    rule = traj.quad_rule(lo=min(traj.t_min, float(np.min(t))), hi=max(0.0, float(np.max(t))))
    if traj.is_static:
        def g(tt):
            s = traj.state(tt)
            return 1.0 / (s.gamma**3 * s.zdot**2)
        return (traj.v0 / m) * traj.state(t).zdot * rule.cumulative(g, t, origin=0.0)

    def g(tt):
        return 1.0 / (m * traj.state(tt).gamma ** 3)
    return rule.cumulative(g, t, origin=0.0)
