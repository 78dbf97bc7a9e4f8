"""Acceptance suite: every criterion at its stated tolerance.

Each test records a single PASS/FAIL line (collected in the terminal summary)
before asserting, so a failing criterion still reports its measured value.
"""

import time

import numpy as np
import pytest

from conftest import PARAMS, STATIC
from rrshift import (
    CutoffFunction,
    ParticleParams,
    StaticPotentialSpec,
    TimePotentialSpec,
    angular_kernels,
    delta_z_class_tdep,
    delta_z_extra,
    delta_z_green,
    delta_z_LD_direct,
    delta_z_q1_closed,
    delta_z_q1_t,
    delta_z_q1_xi,
    delta_z_q2,
    emission_amplitude,
    emitted_energy_larmor,
    energy_extrapolated,
    energy_time_domain,
    hbar_convergence,
    integrate_trajectory,
    jacobi_field,
    symplectic_product,
)
from rrshift.quadrature import convergence_order, solid_angle_rule
from rrshift.dynamics import GridControl

STATIC_SWEEP = list(zip(np.linspace(0.1, 0.5, 5), np.linspace(1.2, 3.0, 5)))
TIME_CONFIGS = [
    (TimePotentialSpec(0.3, -3.0, -1.0), 1.5),
    (TimePotentialSpec(0.5, -4.0, -1.5), 1.2),
    (TimePotentialSpec(-0.4, -2.5, -0.5), 2.0),
]
WKB_PAIRS = [(1.0, 0.4), (2.0, np.pi / 3), (5.0, 2.5)]


def _rel(a, b):
    return abs(a - b) / abs(b)


def test_central_equivalence_static(criterion):
    start = time.perf_counter()
    worst = 0.0
    for V0, p in STATIC_SWEEP:
        traj = integrate_trajectory(PARAMS, StaticPotentialSpec(V0, 2.0, 1.0), p)
        q1, _ = delta_z_q1_xi(traj)
        worst = max(worst, _rel(q1, delta_z_LD_direct(traj)))
    dt = time.perf_counter() - start
    ok = worst <= 1e-4 and dt <= 300
    criterion(1, "central equivalence, static (xi-route vs work-energy route)", ok,
              f"max rel diff {worst:.2e} over {len(STATIC_SWEEP)} configs (tol 1e-4)", dt)
    assert ok


def test_central_equivalence_time_dependent(criterion):
    start = time.perf_counter()
    worst = worst_green = 0.0
    for spec, p in TIME_CONFIGS:
        traj = integrate_trajectory(PARAMS, spec, p)
        q1 = delta_z_q1_closed(traj)
        worst = max(worst, _rel(q1, delta_z_class_tdep(traj)))
        worst_green = max(worst_green, _rel(q1, delta_z_green(traj)))
    dt = time.perf_counter() - start
    ok = worst <= 1e-4 and worst_green <= 1e-4 and dt <= 60
    criterion(2, "central equivalence, time-dependent (closed form vs classical)", ok,
              f"max rel diff {worst:.2e}, vs Jacobi route {worst_green:.2e} (tol 1e-4)", dt)
    assert ok


def test_recoil_shift_equals_extra(criterion, static_traj, time_traj):
    start = time.perf_counter()
    worst = max(_rel(delta_z_q2(static_traj, z0), delta_z_extra(static_traj, z0)) for z0 in (-0.5, 0.1, 1.0))
    zero = all(f(time_traj, z0) == 0.0 for f in (delta_z_q2, delta_z_extra) for z0 in (-0.5, 0.1, 1.0))
    dt = time.perf_counter() - start
    ok = worst <= 1e-6 and zero
    criterion(3, "recoil shift equals extra shift", ok,
              f"max rel diff {worst:.2e} (tol 1e-6); time-dependent both exactly 0: {zero}", dt)
    assert ok


def test_larmor_equality(criterion, static_traj):
    start = time.perf_counter()
    cut = CutoffFunction.covering(static_traj)
    E_inf, a, b = energy_extrapolated(static_traj, cut)
    E_t = energy_time_domain(static_traj)
    d_larmor = _rel(E_inf, E_t)
    d_sub = _rel(a.energy, E_inf)
    dt = time.perf_counter() - start
    ok = d_larmor <= 1e-3 and d_sub <= 1e-4 and dt <= 600
    criterion(4, "Larmor equality (spectral vs time domain)", ok,
              f"extrapolated vs Larmor {d_larmor:.2e} (tol 1e-3), subtracted vs extrapolated "
              f"{d_sub:.2e} (tol 1e-4)", dt)
    assert ok


def test_solid_angle_identities(criterion):
    start = time.perf_counter()
    c, w = solid_angle_rule(64)
    worst = 0.0
    for v in (0.0, 0.3, 0.5, 0.9, 0.95):
        dtau2 = (1 - v * v) / (1 - v * c) ** 2
        worst = max(worst, _rel(np.sum(w * dtau2), 4 * np.pi))
    v = np.array([0.0, 0.5, 0.9])
    K4, K5 = angular_kernels(v)
    g2 = 1 / (1 - v * v)
    worst_k = max(np.max(np.abs(K4 / (8 * np.pi / 3 * g2**2) - 1)),
                  abs(K5[0]), np.max(np.abs(K5[1:] / (8 * np.pi / 3 * g2[1:] ** 3 * v[1:]) - 1)))
    dt = time.perf_counter() - start
    ok = worst <= 1e-10 and worst_k <= 1e-10
    criterion(5, "solid-angle identities", ok,
              f"4 pi identity {worst:.2e}, kernels {worst_k:.2e} (tol 1e-10)", dt)
    assert ok


def test_symplectic_suite(criterion, static_traj):
    start = time.perf_counter()
    traj = static_traj
    seeds = np.linspace(traj.t_min, 0.0, 10)
    fields = [jacobi_field(traj, s) for s in seeds]
    drift = 0.0
    for f1, f2 in zip(fields[:-1], fields[1:]):
        omega = symplectic_product(f1, f2, traj.grid)
        drift = max(drift, np.max(np.abs(omega - omega[0])) / abs(omega[0]))
    recip = 0.0
    for i, s in enumerate(seeds):
        Dz_s = fields[i](seeds)[0]
        for j in range(len(seeds)):
            recip = max(recip, abs(Dz_s[j] + fields[j](s)[0]))
    dt = time.perf_counter() - start
    ok = drift <= 1e-8 and recip <= 1e-6 and dt <= 60
    criterion(6, "symplectic suite", ok,
              f"product drift {drift:.2e} (tol 1e-8), 10x10 reciprocity {recip:.2e} (tol 1e-6)", dt)
    assert ok


def test_wkb_classical_limit(criterion, static_traj, time_traj):
    start = time.perf_counter()
    orders, errs = [], []
    for traj in (static_traj, time_traj):
        cut = CutoffFunction.covering(traj)
        for k, th in WKB_PAIRS:
            ref = emission_amplitude(traj, k, th, cut)
            hc = hbar_convergence(traj, k, th, ref, cutoff=cut)
            orders.append(hc.order)
            errs.append(hc.rel_error)
    dt = time.perf_counter() - start
    ok = all(0.8 <= o <= 1.2 for o in orders) and max(errs) <= 1e-4 and dt <= 300
    criterion(7, "WKB hbar -> 0 limit", ok,
              f"orders {min(orders):.3f}..{max(orders):.3f} (band [0.8, 1.2]), "
              f"max extrapolation error {max(errs):.2e} (tol 1e-4)", dt)
    assert ok


def test_quadrature_hygiene(criterion, static_traj, time_traj):
    start = time.perf_counter()
    worst = 0.0
    for traj in (static_traj, time_traj):
        cut = CutoffFunction.covering(traj)
        for k in (0.1, 0.5, 1.0, 2.0, 3.5, 5.0):
            for th in np.linspace(0.0, np.pi, 7):
                a = np.array(emission_amplitude(traj, k, th, cut, "velocity"))
                b = np.array(emission_amplitude(traj, k, th, cut, "ibp"))
                worst = max(worst, np.linalg.norm(a - b) / np.linalg.norm(b))
    base = CutoffFunction.covering(static_traj)
    cross = 0.0
    for factor in (2, 4, 8):
        q1, diag = delta_z_q1_xi(static_traj, base.with_width(factor * base.plateau_length))
        cross = max(cross, abs(diag["cutoff_cross_term"]) / abs(q1))
    dt = time.perf_counter() - start
    ok = worst <= 1e-8 and cross <= 1e-8 and dt <= 120
    criterion(8, "quadrature hygiene", ok,
              f"velocity vs ibp {worst:.2e} (tol 1e-8), cutoff cross-term {cross:.2e} (tol 1e-8)", dt)
    assert ok


def test_scaling_laws(criterion):
    start = time.perf_counter()
    outputs = []
    for alpha in (1e-3, 2e-3):
        traj = integrate_trajectory(ParticleParams(alpha_c=alpha), STATIC, 1.5)
        tdep = integrate_trajectory(ParticleParams(alpha_c=alpha), TIME_CONFIGS[0][0], 1.5)
        outputs.append(np.array([
            delta_z_LD_direct(traj), delta_z_green(traj), delta_z_extra(traj, 0.1),
            delta_z_q1_xi(traj)[0], delta_z_q1_t(traj), delta_z_q1_closed(traj), delta_z_q2(traj, 0.1),
            emitted_energy_larmor(traj), energy_time_domain(traj),
            delta_z_class_tdep(tdep), delta_z_q1_closed(tdep), emitted_energy_larmor(tdep),
        ]))
    lin = float(np.max(np.abs(outputs[1] / (2 * outputs[0]) - 1)))
    values = []
    for n in (2, 4, 8):
        ctl = GridControl(n_panels=n, gauss_order=4)
        values.append(delta_z_LD_direct(integrate_trajectory(PARAMS, STATIC, 1.5, ctl)))
    order = convergence_order(values)
    dt = time.perf_counter() - start
    ok = lin <= 1e-12 and order >= 4 and dt <= 120
    criterion(9, "scaling laws", ok,
              f"alpha linearity {lin:.2e} (tol 1e-12), grid order {order:.2f} (min 4)", dt)
    assert ok
