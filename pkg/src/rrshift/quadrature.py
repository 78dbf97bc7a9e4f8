"""Panel quadrature, cumulative antiderivatives and oscillatory rules.

Everything in the package integrates on *panels*: an increasing array of
edges, each interval carrying an ``order``-point Gauss-Legendre rule.  Panel
edges are always placed on the points where the integrands lose smoothness
(edges of the acceleration support, cutoff ramps), so composite Gauss rules
keep their full algebraic order.
"""

from functools import lru_cache

import numpy as np

__all__ = [
    "gauss_legendre",
    "PanelRule",
    "panel_edges",
    "filon_hermite",
    "solid_angle_rule",
    "convergence_order",
    "richardson",
]


@lru_cache(maxsize=None)
def gauss_legendre(n):
    """Nodes and weights of the ``n``-point Gauss-Legendre rule on [0, 1]."""
    x, w = np.polynomial.legendre.leggauss(n)
    x = 0.5 * (x + 1.0)
    w = 0.5 * w
    x.flags.writeable = False
    w.flags.writeable = False
    return x, w


def panel_edges(breakpoints, counts):
    """Uniformly subdivide consecutive breakpoint intervals.

    Parameters
    ----------
    breakpoints : sequence of float
        Increasing interval endpoints.  Degenerate intervals are dropped.
    counts : int or sequence of int
        Number of panels per interval.
    """
    bp = np.asarray(breakpoints, dtype=float)
    if np.isscalar(counts):
        counts = [counts] * (len(bp) - 1)
    pieces = []
    for a, b, n in zip(bp[:-1], bp[1:], counts):
        if b <= a:
            continue
        pieces.append(np.linspace(a, b, max(int(n), 1) + 1)[:-1])
    pieces.append(bp[-1:])
    # very short intervals can round to repeated edges
    return np.unique(np.concatenate(pieces))


class PanelRule:
    """Composite Gauss-Legendre rule on fixed panel edges.

    Attributes
    ----------
    edges : ndarray, shape (P+1,)
    nodes, weights : ndarray, shape (P, order)
    """

    def __init__(self, edges, order=8):
        edges = np.asarray(edges, dtype=float)
        if edges.ndim != 1 or len(edges) < 2 or np.any(np.diff(edges) <= 0):
            raise ValueError("panel edges must be strictly increasing")
        self.edges = edges
        self.order = int(order)
        u, w = gauss_legendre(self.order)
        h = np.diff(edges)
        self.nodes = edges[:-1, None] + h[:, None] * u[None, :]
        self.weights = h[:, None] * w[None, :]

    @property
    def a(self):
        return self.edges[0]

    @property
    def b(self):
        return self.edges[-1]

    def integrate(self, f):
        """Integral of ``f`` (callable or values sampled on ``nodes``)."""
        vals = f(self.nodes) if callable(f) else f
        return np.sum(vals * self.weights)

    def panel_integrals(self, f):
        vals = f(self.nodes) if callable(f) else f
        return np.sum(vals * self.weights, axis=-1)

    def cumulative(self, f, x, origin=None):
        """Antiderivative ``F(x) = int_origin^x f`` at arbitrary points.

        The whole panels left of ``x`` use the stored rule; the partial panel
        containing ``x`` gets its own mapped Gauss rule of the same order, so
        ``F`` carries the accuracy of the composite rule at every point.
        """
        x = np.asarray(x, dtype=float)
        if np.any(x < self.a - 1e-12 * max(1.0, abs(self.a))) or np.any(
            x > self.b + 1e-12 * max(1.0, abs(self.b))
        ):
            raise ValueError("evaluation point outside the panel range")
        at_edges = np.concatenate([[0.0], np.cumsum(self.panel_integrals(f))])
        F = self._partial(f, x, at_edges)
        if origin is not None:
            F = F - self._partial(f, np.asarray(float(origin)), at_edges)
        return F

    def _partial(self, f, x, at_edges):
        u, w = gauss_legendre(self.order)
        flat = np.atleast_1d(x).ravel()
        idx = np.clip(np.searchsorted(self.edges, flat, side="right") - 1, 0, len(self.edges) - 2)
        left = self.edges[idx]
        span = flat - left
        pts = left[:, None] + span[:, None] * u[None, :]
        vals = f(pts)
        out = at_edges[idx] + np.sum(vals * (span[:, None] * w[None, :]), axis=-1)
        return out.reshape(np.shape(x)) if np.ndim(x) else out[0]


@lru_cache(maxsize=None)
def _moment_series(n_terms=18):
    """Real Horner coefficients of the small-argument moment series.

    ``I_n = sum_j (i theta)^j / (j! (n + j + 1))`` split into even (real)
    and odd (imaginary) powers, each a polynomial in ``theta^2``.
    """
    fact = np.cumprod([1.0] + list(range(1, n_terms)))
    re, im = [], []
    for n in range(4):
        a = np.array([1.0 / (fact[j] * (n + j + 1)) for j in range(n_terms)])
        sign = (-1.0) ** (np.arange(n_terms) // 2)
        re.append((a * sign)[0::2][::-1])
        im.append((a * sign)[1::2][::-1])
    return re, im


def _unit_moments(theta):
    """I_n(theta) = int_0^1 s^n exp(i theta s) ds for n = 0..3."""
    theta = np.asarray(theta, dtype=float)
    out = np.empty((4,) + theta.shape, dtype=complex)
    small = np.abs(theta) < 1.0
    if np.any(small):
        ts = theta[small]
        t2 = ts * ts
        re_c, im_c = _moment_series()
        for n in range(4):
            r = np.full_like(ts, re_c[n][0])
            for c in re_c[n][1:]:
                r = r * t2 + c
            q = np.full_like(ts, im_c[n][0])
            for c in im_c[n][1:]:
                q = q * t2 + c
            out[n, small] = r + 1j * (q * ts)
    big = ~small
    if np.any(big):
        tb = theta[big]
        e = np.exp(1j * tb)
        inv = 1.0 / (1j * tb)
        i0 = (e - 1.0) * inv
        i1 = (e - i0) * inv
        i2 = (e - 2.0 * i1) * inv
        i3 = (e - 3.0 * i2) * inv
        out[0, big], out[1, big], out[2, big], out[3, big] = i0, i1, i2, i3
    return out


def filon_hermite(x, f, fp, k):
    """Filon-type rule for ``int f(x) exp(i k x) dx`` on nodes ``x``.

    ``f`` is replaced by its piecewise cubic Hermite interpolant built from
    the values ``f`` and slopes ``fp``; each panel is then integrated exactly
    against the exponential.  The error is O(h^4) uniformly in ``k`` and
    decays with ``k``, so the rule stays accurate for arbitrarily large
    frequencies.

    Returns an array with the shape of ``k``.
    """
    x = np.asarray(x, dtype=float)
    f = np.asarray(f)
    fp = np.asarray(fp)
    k = np.asarray(k, dtype=float)
    kk = k.reshape(-1, 1)
    a = x[:-1][None, :]
    h = np.diff(x)[None, :]
    I = _unit_moments(kk * h)
    H00 = 2 * I[3] - 3 * I[2] + I[0]
    H10 = I[3] - 2 * I[2] + I[1]
    H01 = -2 * I[3] + 3 * I[2]
    H11 = I[3] - I[2]
    panel = (
        f[:-1][None, :] * H00
        + h * fp[:-1][None, :] * H10
        + f[1:][None, :] * H01
        + h * fp[1:][None, :] * H11
    )
    res = np.sum(np.exp(1j * kk * a) * h * panel, axis=1)
    return res.reshape(k.shape)


@lru_cache(maxsize=None)
def solid_angle_rule(n=64):
    """Gauss-Legendre nodes in ``cos(theta)`` with weights for ``dOmega``.

    The azimuthal integral is done analytically (factor ``2 pi``), so
    ``sum(w * f(c))`` approximates ``int dOmega f(cos theta)``.
    """
    c, w = np.polynomial.legendre.leggauss(n)
    w = 2.0 * np.pi * w
    c.flags.writeable = False
    w.flags.writeable = False
    return c, w


def convergence_order(values, ratio=2.0):
    """Observed order from three results at steps h, h/r, h/r^2."""
    v0, v1, v2 = values[-3:]
    num = abs(v0 - v1)
    den = abs(v1 - v2)
    if den == 0.0:
        return np.inf
    return float(np.log(num / den) / np.log(ratio))


def richardson(coarse, fine, ratio, order):
    """Richardson extrapolation of two results with step ratio ``ratio``."""
    r = ratio**order
    return (r * fine - coarse) / (r - 1.0)
