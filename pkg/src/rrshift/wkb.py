"""WKB mode functions and finite-hbar emission amplitudes.

The direct amplitudes integrate products of exact-kinematics WKB modes
(final momentum shifted by the photon recoil) over the same cutoff window
as the classical amplitude, so that ``hbar -> 0`` can be checked as a
convergence experiment.  Phases are accumulated in an hbar-free form,

``(kappa_p - kappa_P) / hbar = k (p0 + P0 - 2V) / (kappa_p + kappa_P)``,

which keeps full precision for arbitrarily small ``hbar``.
"""

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .emission import CutoffFunction, XiFrame
from .errors import KinematicsError, TurningPointError
from .quadrature import PanelRule, panel_edges

__all__ = [
    "kappa",
    "kappa_slope",
    "sigma",
    "wkb_validity",
    "phase_integral",
    "WkbModeStatic",
    "WkbModeTime",
    "amplitude_direct_static",
    "amplitude_direct_time",
    "amplitude_direct",
    "HbarConvergence",
    "hbar_convergence",
]

_ORDER = 16


def _energy(params, p):
    return float(np.hypot(p, params.m))


def kappa(spec, params, p, z):
    """Local momentum ``sqrt((p0 - V(z))^2 - m^2)`` for final momentum ``p``."""
    return _kappa_from_energy(spec, params, _energy(params, p), z)


def _kappa_from_energy(spec, params, p0, z):
    e = p0 - spec.derivative(np.asarray(z, dtype=float), 0)
    rad = e * e - params.m**2
    if np.any(rad <= 0.0) or np.any(e <= 0.0):
        raise TurningPointError("local momentum vanishes: classical turning point")
    return np.sqrt(rad)


def kappa_slope(spec, params, p0, z):
    """``d kappa / dz = -(p0 - V) V' / kappa`` at energy ``p0``."""
    z = np.asarray(z, dtype=float)
    e = p0 - spec.derivative(z, 0)
    return -e * spec.derivative(z, 1) / _kappa_from_energy(spec, params, p0, z)


def sigma(spec, params, p, t):
    """Local energy ``sqrt((p - V(t))^2 + m^2)`` for canonical momentum ``p``."""
    return np.hypot(p - spec.derivative(np.asarray(t, dtype=float), 0), params.m)


def wkb_validity(spec, params, p):
    """``max_z |d(1/kappa)/dz|``; multiply by hbar for the WKB criterion."""
    p0 = _energy(params, p)
    lo, hi = spec.support

    def slope(z):
        k = _kappa_from_energy(spec, params, p0, z)
        return np.abs(kappa_slope(spec, params, p0, z) / k**2)

    z = np.linspace(lo, hi, 2001)
    vals = slope(z)
    i = int(np.argmax(vals))
    if vals[i] == 0.0:
        return 0.0
    a, b = z[max(i - 1, 0)], z[min(i + 1, len(z) - 1)]
    res = minimize_scalar(lambda x: -float(slope(x)), bounds=(a, b), method="bounded",
                          options={"xatol": 1e-13 * max(1.0, abs(hi - lo))})
    return float(max(vals[i], -res.fun))


def _z_rule(spec, a, b, n_panels=16, order=_ORDER):
    lo, hi = sorted((a, b))
    inner = [s for s in spec.support if lo < s < hi]
    bps = [lo, *inner, hi]
    return PanelRule(panel_edges(bps, n_panels), order)


def phase_integral(spec, params, p, z):
    """Signed ``int_0^z kappa_p`` (hbar-free phase factor)."""
    z = float(z)
    if z == 0.0:
        return 0.0
    rule = _z_rule(spec, 0.0, z)
    val = rule.integrate(lambda x: kappa(spec, params, p, x))
    return val if z > 0.0 else -val


@dataclass(frozen=True)
class WkbModeStatic:
    """``phi_p(z) = sqrt(p / kappa_p) exp(i int_0^z kappa_p / hbar)``."""

    spec: object
    params: object
    p: float
    hbar: float

    @property
    def p0(self):
        return _energy(self.params, self.p)

    def kappa(self, z):
        return kappa(self.spec, self.params, self.p, z)

    def phase(self, z):
        return np.vectorize(lambda x: phase_integral(self.spec, self.params, self.p, x))(z)

    def __call__(self, z):
        return np.sqrt(self.p / self.kappa(z)) * np.exp(1j * self.phase(z) / self.hbar)


@dataclass(frozen=True)
class WkbModeTime:
    """``phi_p(t) = sqrt(p0 / sigma_p) exp(-i int_0^t sigma_p / hbar)``."""

    spec: object
    params: object
    p: float
    hbar: float

    @property
    def p0(self):
        return float(sigma(self.spec, self.params, self.p, 0.0))

    def sigma(self, t):
        return sigma(self.spec, self.params, self.p, t)

    def phase(self, t):
        def one(x):
            if x == 0.0:
                return 0.0
            rule = _z_rule(self.spec, 0.0, x)
            v = rule.integrate(self.sigma)
            return v if x > 0.0 else -v

        return np.vectorize(one)(t)

    def __call__(self, t):
        return np.sqrt(self.p0 / self.sigma(t)) * np.exp(-1j * self.phase(t) / self.hbar)


def _window_rule(traj, frame, cutoff, k):
    """Panels in ``t`` over the cutoff window, breakpoints at every kink."""
    W = cutoff.width
    xi_marks = np.array([cutoff.xi_a - W, cutoff.xi_a, cutoff.xi_b, cutoff.xi_b + W])
    t_marks = frame.t_of_xi(xi_marks)
    bps = sorted({*t_marks.tolist(), *[s for s in traj.support if t_marks[0] < s < t_marks[-1]],
                  *([0.0] if t_marks[0] < 0.0 < t_marks[-1] else [])})
    counts = []
    for a, b in zip(bps[:-1], bps[1:]):
        span = float(frame.xi(b) - frame.xi(a))
        counts.append(max(8, int(np.ceil(abs(k) * span / 2.0))))
    return PanelRule(panel_edges(bps, counts), _ORDER)


def _check_recoil_static(traj, k, hbar):
    spec, m = traj.potential, traj.params.m
    P0 = traj.p0 - hbar * k
    if P0 - spec.v_range[1] <= m:
        raise KinematicsError(
            f"recoil leaves no propagating final mode: P0 - max V = {P0 - spec.v_range[1]:.6g} <= m"
        )
    return P0


def amplitude_direct_static(traj, k, theta, hbar, cutoff=None):
    """Finite-hbar ``(A_t, A_z)`` for ``V = V(z)`` with exact recoil kinematics.

    The integral runs over ``z`` along the classical trajectory (so
    ``dz = zdot dt``) and is windowed by ``chi(xi(t))``.

    Raises
    ------
    KinematicsError
        If ``P0 = p0 - hbar k`` is too small for a propagating final mode.
    """
    if not traj.is_static:
        raise ValueError("amplitude_direct_static needs a static trajectory")
    cutoff = cutoff or CutoffFunction.covering(traj)
    c = float(np.cos(theta))
    spec, params, m = traj.potential, traj.params, traj.params.m
    p, p0 = traj.p_final, traj.p0
    P0 = _check_recoil_static(traj, k, hbar)
    P = np.sqrt(P0 * P0 - m * m)
    frame = XiFrame(traj, cos_theta=c)
    rule = _window_rule(traj, frame, cutoff, k)

    def phase_rate(t):
        s = traj.state(t)
        V = spec.derivative(s.z, 0)
        kp = _kappa_from_energy(spec, params, p0, s.z)
        kP = _kappa_from_energy(spec, params, P0, s.z)
        return (p0 + P0 - 2.0 * V) / (kp + kP) * s.zdot

    t = rule.nodes.ravel()
    Phi = k * rule.cumulative(phase_rate, t, origin=0.0)
    s = traj.state(t)
    V = spec.derivative(s.z, 0)
    kp = _kappa_from_energy(spec, params, p0, s.z)
    kP = _kappa_from_energy(spec, params, P0, s.z)
    dkp = kappa_slope(spec, params, p0, s.z)
    dkP = kappa_slope(spec, params, P0, s.z)
    amp = np.sqrt(p * P / (kp * kP))
    carrier = amp * np.exp(1j * (Phi - k * c * s.z)) * cutoff(t - s.z * c) * s.zdot
    w = rule.weights.ravel()
    e = params.charge
    A_t = -e * np.sum(w * (p0 - V) / p * carrier)
    bracket = (kp + kP) + 0.5j * hbar * (dkp / kp - dkP / kP)
    A_z = e * np.sum(w * bracket / (2.0 * p) * carrier)
    return complex(A_t), complex(A_z)


def amplitude_direct_time(traj, k, theta, hbar, cutoff=None):
    """Finite-hbar ``(A_t, A_z)`` for ``V = V(t)``; recoil ``P = p - hbar k cos``."""
    if traj.is_static:
        raise ValueError("amplitude_direct_time needs a time-dependent trajectory")
    cutoff = cutoff or CutoffFunction.covering(traj)
    c = float(np.cos(theta))
    spec, params = traj.potential, traj.params
    p = traj.p_final
    P = p - hbar * k * c
    if P - spec.v_range[1] <= 0.0:
        raise KinematicsError(f"recoil reverses the final particle: P - max V = {P - spec.v_range[1]:.6g}")
    p0 = float(sigma(spec, params, p, 0.0))
    P0 = float(sigma(spec, params, P, 0.0))
    frame = XiFrame(traj, cos_theta=c)
    rule = _window_rule(traj, frame, cutoff, k)

    def phase_rate(t):
        V = spec.derivative(t, 0)
        return (p + P - 2.0 * V) / (sigma(spec, params, p, t) + sigma(spec, params, P, t))

    t = rule.nodes.ravel()
    Phi = -k * c * rule.cumulative(phase_rate, t, origin=0.0)
    V = spec.derivative(t, 0)
    dV = spec.derivative(t, 1)
    sp = sigma(spec, params, p, t)
    sP = sigma(spec, params, P, t)
    dsp = -(p - V) * dV / sp
    dsP = -(P - V) * dV / sP
    z = traj.state(t).z
    carrier = np.sqrt(P0 * p0 / (sP * sp)) * np.exp(1j * (Phi + k * t)) * cutoff(t - z * c)
    w = rule.weights.ravel()
    e = params.charge
    A_z = e * np.sum(w * (p - V) / p0 * carrier)
    bracket = -(sp + sP) + 0.5j * hbar * (dsp / sp - dsP / sP)
    A_t = e * np.sum(w * bracket / (2.0 * p0) * carrier)
    return complex(A_t), complex(A_z)


def amplitude_direct(traj, k, theta, hbar, cutoff=None):
    """Dispatch on the potential family."""
    if traj.is_static:
        return amplitude_direct_static(traj, k, theta, hbar, cutoff)
    return amplitude_direct_time(traj, k, theta, hbar, cutoff)


@dataclass(frozen=True)
class HbarConvergence:
    hbars: tuple
    amplitudes: tuple
    reference: tuple
    order: float
    extrapolated: tuple
    rel_error: float


def hbar_convergence(traj, k, theta, reference, hbars=(1e-2, 1e-3, 1e-4), cutoff=None):
    """Measure the rate at which the direct amplitude approaches ``reference``.

    ``order`` is the least-squares slope of ``log|A(hbar) - reference|``
    against ``log hbar``; ``extrapolated`` is the Richardson limit from the
    two smallest ``hbar`` assuming first order.
    """
    hbars = tuple(sorted(hbars, reverse=True))
    ref = np.asarray(reference, dtype=complex)
    amps = [np.asarray(amplitude_direct(traj, k, theta, h, cutoff)) for h in hbars]
    dev = [np.linalg.norm(a - ref) for a in amps]
    order = float(np.polyfit(np.log(hbars), np.log(dev), 1)[0])
    h1, h2 = hbars[-2], hbars[-1]
    r = h1 / h2
    extrap = (r * amps[-1] - amps[-2]) / (r - 1.0)
    rel = float(np.linalg.norm(extrap - ref) / np.linalg.norm(ref))
    return HbarConvergence(hbars, tuple(tuple(a) for a in amps), tuple(ref), order,
                           tuple(extrap), rel)
