"""Classical-limit emission amplitude, photon spectrum and radiated energy.

The amplitude is written in the retarded variable ``xi = t - z cos(theta)``
and regularized by a smooth cutoff ``chi(xi)`` that equals one while the
particle accelerates.  Two equivalent forms are provided: the *velocity*
form integrates ``dx/dxi chi exp(i k xi)`` directly, the *ibp* form moves
the derivative onto the acceleration and the cutoff ramps.

Amplitudes are returned with lower indices, ``(A_t, A_z)``, metric
``(+, -)``; ``A_t = A^t`` and ``A_z = -A^z``.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import NamedTuple

import numpy as np

from .errors import CutoffCoverageError, TailError
from .potentials import SmoothStepProfile
from .quadrature import PanelRule, filon_hermite, gauss_legendre, solid_angle_rule

__all__ = [
    "AmplitudeForm",
    "CutoffFunction",
    "XiFrame",
    "SpectrumGrid",
    "SpectralEnergy",
    "xi_derivatives",
    "ramp_transform",
    "emission_amplitude",
    "acceleration_transform",
    "spectral_density",
    "ramp_artifact",
    "energy_spectral",
    "energy_extrapolated",
    "energy_time_domain",
    "spectrum_grid",
]

_OSC_ORDER = 16


class AmplitudeForm(str, Enum):
    VELOCITY = "velocity"
    IBP = "ibp"


@dataclass(frozen=True)
class CutoffFunction:
    """Plateau ``[xi_a, xi_b]`` with smoothstep ramps of width ``width``.

    ``chi`` rises on ``[xi_a - width, xi_a]`` and falls on
    ``[xi_b, xi_b + width]``.
    """

    xi_a: float
    xi_b: float
    width: float
    profile: SmoothStepProfile = field(default_factory=SmoothStepProfile)

    def __post_init__(self):
        if not self.xi_b > self.xi_a:
            raise ValueError("cutoff plateau must have xi_b > xi_a")
        if not self.width > 0.0:
            raise ValueError("cutoff ramp width must be positive")
        if tuple(self.profile.domain) != (0.0, 1.0):
            raise ValueError("cutoff profile must live on [0, 1]")

    @classmethod
    def covering(cls, traj, width=None, margin=0.25, profile=None):
        """Smallest plateau containing the support's xi-image for every angle.

        For ``cos(theta)`` in [-1, 1] the image of a point is
        ``[t - |z|, t + |z|]``; ``margin`` is added on both sides.  The
        default ramp width is twice the plateau length.
        """
        t = _support_samples(traj)
        z = traj.state(t).z
        xi_a = float(np.min(t - np.abs(z))) - margin
        xi_b = float(np.max(t + np.abs(z))) + margin
        if width is None:
            width = 2.0 * (xi_b - xi_a)
        return cls(xi_a, xi_b, float(width), profile or SmoothStepProfile())

    @property
    def plateau_length(self):
        return self.xi_b - self.xi_a

    @property
    def window(self):
        return (self.xi_a - self.width, self.xi_b + self.width)

    def with_width(self, width):
        return CutoffFunction(self.xi_a, self.xi_b, float(width), self.profile)

    def __call__(self, xi):
        xi = np.asarray(xi, dtype=float)
        up = self.profile((xi - self.xi_a + self.width) / self.width)
        down = self.profile((xi - self.xi_b) / self.width)
        return up - down

    def derivative(self, xi):
        xi = np.asarray(xi, dtype=float)
        up = self.profile((xi - self.xi_a + self.width) / self.width, 1)
        down = self.profile((xi - self.xi_b) / self.width, 1)
        return (up - down) / self.width

    @property
    def ramp_slope_energy(self):
        """``int (chi')^2`` over a single ramp."""
        return self.profile.slope_energy / self.width

    @property
    def slope_energy(self):
        """``int (chi')^2`` over both ramps."""
        return 2.0 * self.ramp_slope_energy

    def check_covers(self, traj, cos_theta):
        """Raise CutoffCoverageError unless the plateau holds the support image."""
        frame = XiFrame(traj, cos_theta=cos_theta)
        xi = frame.xi(_support_samples(traj))
        if xi.min() < self.xi_a or xi.max() > self.xi_b:
            raise CutoffCoverageError(
                f"xi-image [{xi.min():.6g}, {xi.max():.6g}] of the acceleration "
                f"support leaves the plateau [{self.xi_a:.6g}, {self.xi_b:.6g}]"
            )


def _support_samples(traj, n=257):
    return np.linspace(*traj.support, n)


@dataclass(frozen=True)
class XiFrame:
    """Map ``t <-> xi = t - z(t) cos(theta)`` along a trajectory."""

    traj: object
    theta: float = None
    cos_theta: float = None

    def __post_init__(self):
        if (self.theta is None) == (self.cos_theta is None):
            raise ValueError("give exactly one of theta, cos_theta")
        if self.cos_theta is None:
            object.__setattr__(self, "cos_theta", float(np.cos(self.theta)))
        else:
            object.__setattr__(self, "theta", float(np.arccos(self.cos_theta)))

    def xi(self, t):
        return np.asarray(t, dtype=float) - self.traj.state(t).z * self.cos_theta

    def dxi_dt(self, t):
        return 1.0 - self.traj.state(t).zdot * self.cos_theta

    def t_of_xi(self, xi, tol=1e-15, maxiter=50):
        """Invert ``xi(t)``: exact on the free segments, Newton inside."""
        tr = self.traj
        c = self.cos_theta
        xi = np.asarray(xi, dtype=float)
        t_lo, t_hi = tr.support
        z_lo, z_hi = tr.z_support
        xi_lo = t_lo - z_lo * c
        xi_hi = t_hi - z_hi * c
        before = (xi + (z_lo - tr.v_in * t_lo) * c) / (1.0 - tr.v_in * c)
        after = (xi + (z_hi - tr.v0 * t_hi) * c) / (1.0 - tr.v0 * c)
        t = np.where(xi <= xi_lo, before, after)
        mid = (xi > xi_lo) & (xi < xi_hi)
        if np.any(mid):
            ts = np.linspace(t_lo, t_hi, 65)
            guess = np.interp(xi[mid], self.xi(ts), ts)
            target = xi[mid]
            for _ in range(maxiter):
                s = tr.state(guess)
                step = (guess - s.z * c - target) / (1.0 - s.zdot * c)
                guess = np.clip(guess - step, t_lo, t_hi)
                if np.max(np.abs(step)) <= tol * max(1.0, np.max(np.abs(guess))):
                    break
            t = np.where(mid, 0.0, t)
            t[mid] = guess
        return t


def xi_derivatives(traj, theta, t):
    """``(d2z/dxi2, d2t/dxi2, dtau/dxi)`` at times ``t``."""
    c = float(np.cos(theta))
    s = traj.state(t)
    D = 1.0 - s.zdot * c
    d2z = s.zddot / D**3
    return d2z, c * d2z, 1.0 / (s.gamma * D)


def _velocity_dxi(v, c):
    """Upper components ``(dt/dxi, dz/dxi)`` of a constant velocity ``v``."""
    D = 1.0 - v * c
    return 1.0 / D, v / D


def ramp_transform(profile, kappa):
    """``R(kappa) = int_0^1 S'(u) exp(i kappa u) du`` for the unit profile."""
    kappa = np.asarray(kappa, dtype=float)
    out = np.empty(kappa.shape, dtype=complex)
    small = np.abs(kappa) <= 20.0
    if np.any(small):
        u, w = gauss_legendre(_OSC_ORDER)
        edges = np.linspace(0.0, 1.0, 4)
        nodes = (edges[:-1, None] + np.diff(edges)[:, None] * u).ravel()
        weights = (np.diff(edges)[:, None] * w).ravel()
        ks = kappa[small][..., None]
        out[small] = np.sum(weights * profile(nodes, 1) * np.exp(1j * ks * nodes), axis=-1)
    big = ~small
    if np.any(big):
        kb = kappa[big]
        e1 = np.exp(1j * kb)
        acc = np.zeros(kb.shape, dtype=complex)
        ik = 1j * kb
        power = ik.copy()
        for j in range(profile.order):
            q = profile._polys[j + 1]
            acc += (-1) ** j * (q(1.0) * e1 - q(0.0)) / power
            power = power * ik
        out[big] = acc
    return out


class _AccelerationSamples:
    """Trajectory samples reused for every ``(k, theta)`` of a transform."""

    def __init__(self, traj, threshold=50.0, n_filon=256):
        self.threshold = threshold
        n_pan = max(traj.control.n_panels, int(np.ceil(threshold / 2.0)))
        rule = traj.support_rule(n_panels=n_pan, order=_OSC_ORDER)
        self.gauss = traj.state(rule.nodes.ravel())
        self.gauss_w = rule.weights.ravel()
        self.filon = traj.state(np.linspace(*traj.support, n_filon + 1))

    def transform(self, k, c):
        flat = np.asarray(k, dtype=float).ravel()
        out = np.zeros(flat.shape, dtype=complex)
        f = self.filon
        xi_f = f.t - f.z * c
        low = np.abs(flat) * (xi_f[-1] - xi_f[0]) <= self.threshold
        if np.any(low):
            s = self.gauss
            D = 1.0 - s.zdot * c
            g = self.gauss_w * s.zddot / D**2
            xi = s.t - s.z * c
            idx = np.flatnonzero(low)
            for i0 in range(0, idx.size, 512):
                sel = idx[i0:i0 + 512]
                out[sel] = np.exp(1j * flat[sel, None] * xi) @ g
        if not np.all(low):
            D = 1.0 - f.zdot * c
            val = f.zddot / D**3
            slope = (f.zdddot / D**3 + 3.0 * f.zddot**2 * c / D**4) / D
            idx = np.flatnonzero(~low)
            for i0 in range(0, idx.size, 128):
                sel = idx[i0:i0 + 128]
                out[sel] = filon_hermite(xi_f, val, slope, flat[sel])
        return out.reshape(np.shape(k))


def acceleration_transform(traj, k, cos_theta, threshold=50.0, n_filon=256):
    """``J(k) = int_support zddot / (1 - zdot c)^2 exp(i k xi(t)) dt``.

    Equal to ``int d2z/dxi2 exp(i k xi) dxi``.  Composite Gauss for
    ``|k| * L_xi <= threshold`` and a Filon-Hermite rule in ``xi`` beyond.
    """
    return _AccelerationSamples(traj, threshold, n_filon).transform(k, float(cos_theta))


def _ibp_bracket(traj, k, cos_theta, cutoff, samples=None, **kw):
    """Upper-index bracket ``(J^t, J^z)`` with ``A^mu = -(i e / k) J^mu``."""
    c = float(cos_theta)
    k = np.asarray(k, dtype=float)
    samples = samples or _AccelerationSamples(traj, **kw)
    J_acc = samples.transform(k, c)
    W = cutoff.width
    R = ramp_transform(cutoff.profile, k * W)
    tin, zin = _velocity_dxi(traj.v_in, c)
    tout, zout = _velocity_dxi(traj.v0, c)
    e_in = np.exp(1j * k * (cutoff.xi_a - W)) * R
    e_out = np.exp(1j * k * cutoff.xi_b) * R
    Jz = J_acc + zin * e_in - zout * e_out
    Jt = c * J_acc + tin * e_in - tout * e_out
    return Jt, Jz


def _osc_rule(a, b, kmax, order=_OSC_ORDER, min_panels=4):
    n = max(min_panels, int(np.ceil(kmax * (b - a) / 2.0)))
    return PanelRule(np.linspace(a, b, n + 1), order)


def _velocity_upper(traj, k, cos_theta, cutoff):
    c = float(cos_theta)
    k = np.atleast_1d(np.asarray(k, dtype=float))
    kmax = float(np.max(np.abs(k))) if k.size else 0.0
    frame = XiFrame(traj, cos_theta=c)
    W = cutoff.width
    out_t = np.zeros(k.shape, dtype=complex)
    out_z = np.zeros(k.shape, dtype=complex)
    kk = k[..., None]
    # ramps: constant velocity, integrate chi exp(i k xi) in xi
    for (a, b), v in (((cutoff.xi_a - W, cutoff.xi_a), traj.v_in), ((cutoff.xi_b, cutoff.xi_b + W), traj.v0)):
        rule = _osc_rule(a, b, kmax)
        x = rule.nodes.ravel()
        base = np.exp(1j * kk * x) @ (rule.weights.ravel() * cutoff(x))
        dt, dz = _velocity_dxi(v, c)
        out_t += dt * base
        out_z += dz * base
    # plateau: chi = 1, integrate (1, zdot) exp(i k xi(t)) dt
    t_a, t_b = (float(v) for v in frame.t_of_xi(np.array([cutoff.xi_a, cutoff.xi_b])))
    bps = [t_a, *[s for s in traj.support if t_a < s < t_b], t_b]
    for a, b in zip(bps[:-1], bps[1:]):
        span = float(frame.xi(b) - frame.xi(a))
        n = max(traj.control.n_panels if traj.support[0] <= a and b <= traj.support[1] else 4,
                int(np.ceil(kmax * span / 2.0)))
        rule = PanelRule(np.linspace(a, b, n + 1), _OSC_ORDER)
        t = rule.nodes.ravel()
        s = traj.state(t)
        ph = np.exp(1j * kk * (t - s.z * c))
        w = rule.weights.ravel()
        out_t += ph @ w
        out_z += ph @ (w * s.zdot)
    e = traj.params.charge
    return -e * out_t, -e * out_z


def emission_amplitude(traj, k, theta, cutoff, form=AmplitudeForm.IBP, **kw):
    """Lower-index amplitude pair ``(A_t, A_z)`` at wavenumber ``k``.

    Parameters
    ----------
    traj : Trajectory
    k : float or array_like
        Wavenumber(s); negative values give the complex conjugate.
    theta : float
        Emission angle measured from the +z axis.
    cutoff : CutoffFunction
    form : {"velocity", "ibp"}

    Raises
    ------
    CutoffCoverageError
        If the cutoff plateau does not hold the acceleration support.
    """
    form = AmplitudeForm(form)
    c = float(np.cos(theta))
    cutoff.check_covers(traj, c)
    k_arr = np.asarray(k, dtype=float)
    if form is AmplitudeForm.VELOCITY:
        At, Az = _velocity_upper(traj, k_arr, c, cutoff)
        At, Az = At.reshape(k_arr.shape), Az.reshape(k_arr.shape)
    else:
        if np.any(k_arr == 0.0):
            raise ValueError("the ibp form needs k != 0")
        Jt, Jz = _ibp_bracket(traj, k_arr, c, cutoff, **kw)
        pref = -1j * traj.params.charge / k_arr
        At, Az = pref * Jt, pref * Jz
    if np.ndim(k) == 0:
        At, Az = complex(At), complex(Az)
    return At, -Az


def spectral_density(traj, k, cutoff, n_angles=64, **kw):
    """``dE/dk`` after the angular integral, on the nodes ``k > 0``."""
    cos_nodes, w_omega = solid_angle_rule(n_angles)
    k = np.asarray(k, dtype=float)
    samples = _AccelerationSamples(traj, **kw)
    acc = np.zeros(k.shape)
    for c, w in zip(cos_nodes, w_omega):
        Jt, Jz = _ibp_bracket(traj, k, c, cutoff, samples)
        acc += w * (np.abs(Jz) ** 2 - np.abs(Jt) ** 2)
    e2 = traj.params.charge ** 2
    return e2 / (16.0 * np.pi**3) * acc


def ramp_artifact(traj, cutoff, n_angles=64):
    """Spurious ramp energy ``-(alpha/4pi) sum_ramps int dOmega (dtau/dxi)^2 int chi'^2``."""
    cos_nodes, w_omega = solid_angle_rule(n_angles)
    total = 0.0
    for v in (traj.v_in, traj.v0):
        dtau = np.sqrt(1.0 - v * v) / (1.0 - v * cos_nodes)
        total += np.sum(w_omega * dtau**2)
    return -(traj.params.alpha_c / (4.0 * np.pi)) * total * cutoff.ramp_slope_energy


class SpectralEnergy(NamedTuple):
    energy: float
    tail_estimate: float
    raw: float
    artifact: float
    k_max: float
    width: float


def _k_panels(traj, cutoff, k_max):
    """Panel edges on ``[0, k_max]``: fine where the ramps radiate, coarser beyond.

    Coarse edges sit on a fixed lattice so raising ``k_max`` only appends panels.
    """
    W = cutoff.width
    L_tot = cutoff.plateau_length + 2.0 * W
    t_lo, t_hi = traj.support
    z_lo, z_hi = traj.z_support
    L_acc = (t_hi - t_lo) + abs(z_hi - z_lo)
    k_ramp = 400.0 / W
    fine = np.linspace(0.0, k_ramp, max(2, int(np.ceil(k_ramp * L_tot / (2.0 * np.pi)))) + 1)
    if k_max <= k_ramp:
        return fine[fine < k_max].tolist() + [k_max]
    h = 2.0 * np.pi / L_acc
    n = int(np.ceil((k_max - k_ramp) / h))
    return np.concatenate([fine, k_ramp + h * np.arange(1, n + 1)])


def energy_spectral(traj, cutoff, k_max=None, n_angles=64, tail_tol=1e-7,
                    max_doublings=12, **kw):
    """Radiated energy from the photon spectrum, ramp artifact subtracted.

    Integrates ``(e^2 / 8 pi^2) int dcos int dk (|J^z|^2 - |J^t|^2)`` with
    ``A = -(i e / k) J``.  With ``k_max=None`` the cutoff wavenumber is doubled
    until the power-law tail estimate drops below ``tail_tol`` times the
    scale of the result.

    Returns
    -------
    SpectralEnergy
        ``energy`` is the subtracted result, ``raw`` the direct integral,
        ``artifact`` the closed-form ramp term.

    Raises
    ------
    TailError
        If the tail estimate stays above tolerance.
    """
    artifact = ramp_artifact(traj, cutoff, n_angles)
    auto = k_max is None
    if auto:
        t_lo, t_hi = traj.support
        k_max = max(2.0 * 400.0 / cutoff.width, 64.0 / (t_hi - t_lo))
    u, w = gauss_legendre(_OSC_ORDER)
    done = {}

    for _ in range(max_doublings + 1):
        edges = np.asarray(_k_panels(traj, cutoff, k_max))
        keys = list(zip(edges[:-1], edges[1:]))
        missing = [key for key in keys if key not in done]
        if missing:
            lo = np.array([a for a, _ in missing])
            h = np.array([b - a for a, b in missing])
            nodes = lo[:, None] + h[:, None] * u
            vals = spectral_density(traj, nodes, cutoff, n_angles, **kw)
            for key, v in zip(missing, np.sum(vals * (h[:, None] * w), axis=1)):
                done[key] = v
        parts = np.array([done[key] for key in keys])
        mids = 0.5 * (edges[:-1] + edges[1:])
        raw = float(np.sum(parts))
        last = float(np.sum(parts[mids > 0.5 * k_max]))
        prev = float(np.sum(parts[(mids > 0.25 * k_max) & (mids <= 0.5 * k_max)]))
        tail = last * last / (prev - last) if abs(prev) > abs(last) else np.inf
        scale = abs(raw) + abs(artifact)
        if abs(tail) <= tail_tol * scale:
            return SpectralEnergy(raw - artifact, abs(tail), raw, artifact, float(edges[-1]), cutoff.width)
        if not auto:
            break
        k_max *= 2.0
    raise TailError(
        f"spectral tail estimate {tail:.3e} above {tail_tol:.1e} x {scale:.3e} at k_max={k_max:.4g}"
    )


def energy_extrapolated(traj, cutoff, **kw):
    """Remove the ``1/W`` ramp artifact by extrapolating ``W -> infinity``.

    Returns ``(E_inf, E_W, E_2W)`` built from the unsubtracted energies.
    """
    a = energy_spectral(traj, cutoff, **kw)
    b = energy_spectral(traj, cutoff.with_width(2.0 * cutoff.width), **kw)
    return 2.0 * b.raw - a.raw, a, b


def energy_time_domain(traj, n_angles=64):
    """``-(alpha/4pi) int dxi int dOmega x''.x''`` evaluated in ``t``."""
    cos_nodes, w_omega = solid_angle_rule(n_angles)
    rule = traj.support_rule(order=_OSC_ORDER)
    t = rule.nodes.ravel()
    s = traj.state(t)
    w_t = rule.weights.ravel()
    total = 0.0
    for c, w in zip(cos_nodes, w_omega):
        D = 1.0 - s.zdot * c
        d2z = s.zddot / D**3
        contraction = (c * d2z) ** 2 - d2z**2
        total += w * np.sum(w_t * D * contraction)
    return -(traj.params.alpha_c / (4.0 * np.pi)) * total


@dataclass(frozen=True)
class SpectrumGrid:
    """Amplitudes on a ``(cos theta, k)`` grid; arrays have shape ``(n_theta, n_k)``."""

    k: np.ndarray
    cos_theta: np.ndarray
    A_t: np.ndarray
    A_z: np.ndarray

    @property
    def theta(self):
        return np.arccos(self.cos_theta)

    @property
    def density(self):
        """``dE / dk dcos(theta)``."""
        k2 = self.k[None, :] ** 2
        return k2 / (8.0 * np.pi**2) * (np.abs(self.A_z) ** 2 - np.abs(self.A_t) ** 2)

    def rows(self):
        dens = self.density
        for i, c in enumerate(self.cos_theta):
            for j, k in enumerate(self.k):
                at, az = self.A_t[i, j], self.A_z[i, j]
                yield (k, c, at.real, at.imag, az.real, az.imag, dens[i, j])

    def to_csv(self, path):
        header = "k,cos_theta,re_A_t,im_A_t,re_A_z,im_A_z,dE_dk_dcos"
        with open(path, "w") as fh:
            fh.write(header + "\n")
            for row in self.rows():
                fh.write(",".join(repr(float(x)) for x in row) + "\n")


def spectrum_grid(traj, cutoff, k, n_angles=16, form=AmplitudeForm.IBP):
    """Sample the amplitude on Gauss nodes in ``cos(theta)`` and given ``k > 0``."""
    k = np.asarray(k, dtype=float)
    if np.any(k <= 0.0) or np.any(np.diff(k) <= 0.0):
        raise ValueError("k nodes must be positive and increasing")
    cos_nodes, _ = solid_angle_rule(n_angles)
    At = np.empty((n_angles, k.size), dtype=complex)
    Az = np.empty_like(At)
    for i, c in enumerate(cos_nodes):
        At[i], Az[i] = emission_amplitude(traj, k, float(np.arccos(c)), cutoff, form)
    return SpectrumGrid(k, np.asarray(cos_nodes), At, Az)
