"""External potential families with exactly compact acceleration support.

Two families are provided:

* :class:`StaticPotentialSpec` -- ``V(z)`` equal to ``V0`` for ``z <= -Z1``
  and to zero for ``z >= -Z2``;
* :class:`TimePotentialSpec` -- ``V(t)`` equal to zero before ``t_on`` and
  to a plateau value after ``t_off < 0``.

The transition is a polynomial smoothstep, so every derivative of the
potential is *exactly* zero outside the transition interval.
"""

from dataclasses import dataclass
from functools import cached_property
from math import comb

import numpy as np
from numpy.polynomial import Polynomial

from .errors import ConfigError, DomainError
from .quadrature import gauss_legendre

__all__ = [
    "SmoothStepProfile",
    "StaticPotentialSpec",
    "TimePotentialSpec",
    "eval_static",
    "eval_time",
    "check_pair",
]


@dataclass(frozen=True)
class SmoothStepProfile:
    """Odd-degree polynomial smoothstep rising from 0 to 1 on ``domain``.

    A profile of degree ``2N+1`` has its first ``N`` derivatives vanishing at
    both endpoints (class C^N once glued to constants).
    """

    order: int = 7
    domain: tuple = (0.0, 1.0)

    def __post_init__(self):
        if self.order < 5 or self.order % 2 == 0:
            raise ConfigError(f"smoothstep order must be odd and >= 5, got {self.order}")
        lo, hi = self.domain
        if not hi > lo:
            raise ConfigError("smoothstep domain must be increasing")

    @property
    def continuity(self):
        return (self.order - 1) // 2

    @cached_property
    def _polys(self):
        n = self.continuity
        coef = np.zeros(self.order + 1)
        for j in range(n + 1):
            coef[n + j + 1] = comb(n + j, j) * comb(2 * n + 1, n - j) * (-1) ** j
        p = Polynomial(coef)
        return tuple(p.deriv(nu) for nu in range(self.order + 2))

    def __call__(self, x, nu=0):
        """``nu``-th derivative of the profile with respect to ``x``."""
        lo, hi = self.domain
        width = hi - lo
        x = np.asarray(x, dtype=float)
        u = (x - lo) / width
        inside = (u > 0.0) & (u < 1.0)
        # the upper half is evaluated by reflection, S(u) = 1 - S(1 - u), which
        # avoids cancellation in the power basis near u = 1
        upper = u > 0.5
        w = np.where(inside, np.where(upper, 1.0 - u, u), 0.5)
        val = self._polys[nu](w)
        if nu == 0:
            val = np.where(upper, 1.0 - val, val)
        elif nu % 2 == 0:
            val = np.where(upper, -val, val)
        val = val / width**nu
        if nu == 0:
            return np.where(inside, val, np.where(u >= 1.0, 1.0, 0.0))
        return np.where(inside, val, 0.0)

    @cached_property
    def _coef_lists(self):
        return tuple(tuple(float(c) for c in q.coef[::-1]) for q in self._polys)

    def scalar(self, x, nu=0):
        """Fast path of ``__call__`` for a single float ``x``."""
        lo, hi = self.domain
        width = hi - lo
        u = (x - lo) / width
        if u <= 0.0:
            return 0.0
        if u >= 1.0:
            return 1.0 if nu == 0 else 0.0
        upper = u > 0.5
        if upper:
            u = 1.0 - u
        acc = 0.0
        for c in self._coef_lists[nu]:
            acc = acc * u + c
        if upper:
            if nu == 0:
                acc = 1.0 - acc
            elif nu % 2 == 0:
                acc = -acc
        return acc / width**nu

    @cached_property
    def slope_energy(self):
        """Exact ``int (dS/dx)^2 dx`` over the domain, times the domain width.

        For a profile stretched to width ``W`` the integral is
        ``slope_energy / W``.
        """
        u, w = gauss_legendre(self.order + 1)
        return float(np.sum(w * self._polys[1](u) ** 2))


@dataclass(frozen=True)
class StaticPotentialSpec:
    """``V(z)``: plateau ``V0`` left of ``-Z1``, zero right of ``-Z2``.

    ``smoothness_order`` is the continuity class of the transition; the
    smoothstep polynomial has degree ``2*smoothness_order + 1``.
    """

    V0: float
    Z1: float
    Z2: float
    smoothness_order: int = 3

    def __post_init__(self):
        if not (self.Z1 > self.Z2 > 0.0):
            raise ConfigError(f"need Z1 > Z2 > 0, got Z1={self.Z1}, Z2={self.Z2}")
        if self.smoothness_order < 2:
            raise ConfigError("smoothness_order must be >= 2")

    kind = "static"

    @cached_property
    def profile(self):
        return SmoothStepProfile(2 * self.smoothness_order + 1, (-self.Z1, -self.Z2))

    @property
    def support(self):
        """Interval of z outside which every derivative of V vanishes."""
        return (-self.Z1, -self.Z2)

    @property
    def plateau(self):
        return self.V0

    def derivative(self, z, nu=0):
        """``nu``-th z-derivative of V."""
        s = self.profile(z, nu)
        if nu == 0:
            return self.V0 * (1.0 - s)
        return -self.V0 * s

    def scalar_derivative(self, z, nu):
        s = self.profile.scalar(z, nu)
        return self.V0 * (1.0 - s) if nu == 0 else -self.V0 * s

    @property
    def v_range(self):
        return (min(0.0, self.V0), max(0.0, self.V0))


@dataclass(frozen=True)
class TimePotentialSpec:
    """``V(t)``: zero before ``t_on``, ``V_plateau`` after ``t_off`` (< 0)."""

    V_plateau: float
    t_on: float
    t_off: float
    smoothness_order: int = 3

    def __post_init__(self):
        if not (self.t_on < self.t_off < 0.0):
            raise ConfigError(f"need t_on < t_off < 0, got {self.t_on}, {self.t_off}")
        if self.smoothness_order < 2:
            raise ConfigError("smoothness_order must be >= 2")

    kind = "time"

    @cached_property
    def profile(self):
        return SmoothStepProfile(2 * self.smoothness_order + 1, (self.t_on, self.t_off))

    @property
    def support(self):
        return (self.t_on, self.t_off)

    @property
    def plateau(self):
        return self.V_plateau

    def derivative(self, t, nu=0):
        return self.V_plateau * self.profile(t, nu)

    def scalar_derivative(self, t, nu):
        return self.V_plateau * self.profile.scalar(t, nu)

    @property
    def v_range(self):
        return (min(0.0, self.V_plateau), max(0.0, self.V_plateau))


def eval_static(spec, z):
    """Return ``(V(z), V'(z))``."""
    return spec.derivative(z, 0), spec.derivative(z, 1)


def eval_time(spec, t):
    """Return ``(V(t), dV/dt)``."""
    return spec.derivative(t, 0), spec.derivative(t, 1)


def check_pair(spec, params):
    """Reject potentials able to create scalar pairs: need ``|V0| < 2m``."""
    if abs(spec.plateau) >= 2.0 * params.m:
        raise DomainError(
            f"|potential step| = {abs(spec.plateau)} must be below 2m = {2.0 * params.m}"
        )
