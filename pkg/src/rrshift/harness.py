"""Experiment orchestration behind the command-line front end.

Each ``cmd_*`` function takes an :class:`ExperimentConfig` and an output
directory, writes its CSV/JSON files and returns the report dictionary.
Reports are deterministic: JSON is written with sorted keys and the only
run-dependent field is ``timestamp``.
"""

import csv
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from datetime import datetime, timezone

import numpy as np

from . import classical_shift as cs
from . import emission as em
from . import quantum_shift as qs
from .config import config_to_dict
from .dynamics import (
    integrate_trajectory,
    jacobi_field,
    lorentz_dirac_force,
    symplectic_product,
)
from .errors import RadiationReactionError
from .potentials import SmoothStepProfile
from .quadrature import convergence_order, solid_angle_rule
from .wkb import hbar_convergence

__all__ = [
    "IdentityRecord",
    "VerifyReport",
    "build_trajectory",
    "build_cutoff",
    "shift_report",
    "cmd_trajectory",
    "cmd_shift",
    "cmd_spectrum",
    "cmd_verify",
    "cmd_sweep",
    "write_json",
    "strip_timestamp",
]


def build_trajectory(cfg):
    return integrate_trajectory(cfg.particle, cfg.potential, cfg.p_final, cfg.grid)


def build_cutoff(cfg, traj):
    cc = cfg.cutoff
    cut = em.CutoffFunction.covering(traj, margin=cc.margin, profile=SmoothStepProfile(cc.profile_order))
    width = cc.width if cc.width is not None else cc.width_factor * cut.plateau_length
    return cut.with_width(width)


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else repr(v)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


def write_json(path, report):
    report = dict(report)
    report["timestamp"] = datetime.now(timezone.utc).isoformat()
    with open(path, "w") as fh:
        json.dump(_clean(report), fh, indent=2, sort_keys=True)
        fh.write("\n")


def strip_timestamp(report):
    return {k: v for k, v in report.items() if k != "timestamp"}


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([repr(float(x)) if isinstance(x, (float, np.floating)) else x for x in row])


def _rel(a, b):
    scale = max(abs(a), abs(b))
    return 0.0 if scale == 0.0 else abs(a - b) / scale


# -- trajectory ---------------------------------------------------------------

def cmd_trajectory(cfg, out_dir):
    traj = build_trajectory(cfg)
    s = traj.samples
    F = lorentz_dirac_force(traj, s.t)
    res = traj.conservation_residual()
    _write_csv(
        os.path.join(out_dir, "trajectory.csv"),
        ["t", "z", "zdot", "zddot", "gamma", "F_LD", "conservation_residual"],
        zip(s.t, s.z, s.zdot, s.zddot, s.gamma, F, res),
    )
    report = {
        "command": "trajectory",
        "v0": traj.v0,
        "v_in": traj.v_in,
        "p0": traj.p0,
        "support": list(traj.support),
        "t_min": traj.t_min,
        "E_em_larmor": cs.emitted_energy_larmor(traj),
        "conservation_residual_max": float(np.max(res)),
        "config": config_to_dict(cfg),
    }
    write_json(os.path.join(out_dir, "trajectory.json"), report)
    return report


# -- shift --------------------------------------------------------------------

def shift_report(cfg, traj=None):
    """All shift routes for one configuration, with pairwise discrepancies."""
    traj = traj or build_trajectory(cfg)
    E = cs.emitted_energy_larmor(traj)
    out = {"E_em": E, "delta_z_green": cs.delta_z_green(traj)}
    if traj.is_static:
        out["delta_z_LD"] = cs.delta_z_LD_direct(traj)
        q1_xi, diag = qs.delta_z_q1_xi(traj, build_cutoff(cfg, traj),
                                       step_tol=cfg.tolerances.dp_step)
        out["delta_z_q1_xi"] = q1_xi
        out["q1_xi_step_error"] = diag["step_error"]
        out["q1_xi_cutoff_cross_term"] = diag["cutoff_cross_term"]
    else:
        out["delta_z_LD"] = cs.delta_z_class_tdep(traj)
    out["delta_z_extra"] = cs.delta_z_extra(traj, cfg.z0, E)
    out["delta_z_q1_t"] = qs.delta_z_q1_t(traj)
    out["delta_z_q1_closed"] = qs.delta_z_q1_closed(traj)
    out["delta_z_q1_jacobi"] = qs.delta_z_q1_closed(traj, method="jacobi")
    out["delta_z_q2"] = qs.delta_z_q2(traj, cfg.z0, E)
    q1 = out.get("delta_z_q1_xi", out["delta_z_q1_closed"])
    out["delta_z_q1"] = q1
    out["delta_z_class"] = out["delta_z_LD"] + out["delta_z_extra"]
    out["delta_z_q"] = q1 + out["delta_z_q2"]
    names = [k for k in out if k.startswith("delta_z_LD") or k.startswith("delta_z_q1_")
             or k == "delta_z_green"]
    out["discrepancies"] = {
        f"{a}|{b}": _rel(out[a], out[b]) for i, a in enumerate(names) for b in names[i + 1:]
    }
    out["discrepancies"]["delta_z_q|delta_z_class"] = _rel(out["delta_z_q"], out["delta_z_class"])
    out["discrepancies"]["delta_z_q2|delta_z_extra"] = _rel(out["delta_z_q2"], out["delta_z_extra"])
    return out


def cmd_shift(cfg, out_dir):
    report = {"command": "shift", **shift_report(cfg), "config": config_to_dict(cfg)}
    write_json(os.path.join(out_dir, "shift.json"), report)
    return report


# -- spectrum -----------------------------------------------------------------

def _energy_kwargs(cfg):
    sp = cfg.spectrum
    return dict(k_max=sp.k_max, n_angles=sp.n_angles, tail_tol=sp.tail_tol,
                threshold=sp.filon_threshold, n_filon=sp.n_filon)


def energy_report(cfg, traj, cutoff):
    E_L = cs.emitted_energy_larmor(traj)
    E_inf, a, b = em.energy_extrapolated(traj, cutoff, **_energy_kwargs(cfg))
    return {
        "E_larmor": E_L,
        "E_time_domain": em.energy_time_domain(traj, cfg.spectrum.n_angles),
        "E_extrapolated": E_inf,
        "schedule": [
            {"width": r.width, "raw": r.raw, "artifact": r.artifact, "subtracted": r.energy,
             "tail_estimate": r.tail_estimate, "k_max": r.k_max}
            for r in (a, b)
        ],
        "rel_extrapolated_vs_larmor": _rel(E_inf, E_L),
        "rel_subtracted_vs_extrapolated": _rel(a.energy, E_inf),
        "rel_subtracted_vs_larmor": _rel(a.energy, E_L),
        "artifact_ratio": a.artifact / b.artifact if b.artifact else float("nan"),
    }


def cmd_spectrum(cfg, out_dir):
    traj = build_trajectory(cfg)
    cutoff = build_cutoff(cfg, traj)
    sp = cfg.spectrum
    k = np.linspace(sp.k_start, sp.k_stop, sp.n_k)
    grid = em.spectrum_grid(traj, cutoff, k, n_angles=sp.grid_angles)
    grid.to_csv(os.path.join(out_dir, "spectrum.csv"))
    report = {
        "command": "spectrum",
        "cutoff": {"xi_a": cutoff.xi_a, "xi_b": cutoff.xi_b, "width": cutoff.width},
        **energy_report(cfg, traj, cutoff),
        "config": config_to_dict(cfg),
    }
    write_json(os.path.join(out_dir, "spectrum.json"), report)
    return report


# -- verify -------------------------------------------------------------------

@dataclass(frozen=True)
class IdentityRecord:
    name: str
    lhs: float
    rhs: float
    abs_error: float
    rel_error: float
    tolerance: float
    passed: bool
    metric: str = "rel"
    note: str = ""


@dataclass
class VerifyReport:
    records: list = field(default_factory=list)
    environment: dict = field(default_factory=dict)

    @property
    def passed(self):
        return all(r.passed for r in self.records)

    @property
    def failures(self):
        return [r.name for r in self.records if not r.passed]

    def add(self, name, lhs, rhs, tol, metric="rel"):
        """Record ``lhs ~ rhs``.

        ``metric`` picks the quantity compared with ``tol``: ``rel`` (relative
        to ``|rhs|``, or absolute when ``rhs == 0``) or ``abs``.
        """
        lhs, rhs = float(lhs), float(rhs)
        err = abs(lhs - rhs)
        rel = err / abs(rhs) if rhs != 0.0 else err
        value = rel if metric == "rel" else err
        self.records.append(IdentityRecord(name, lhs, rhs, err, rel, tol, bool(value <= tol), metric))

    def to_dict(self):
        return {
            "passed": self.passed,
            "failures": self.failures,
            "records": [asdict(r) for r in self.records],
            "environment": self.environment,
        }


def _alpha_scaled(cfg, factor):
    return replace(cfg, particle=replace(cfg.particle, alpha_c=cfg.particle.alpha_c * factor))


def _verify_dynamics(cfg, traj, rep, tol):
    rep.add("conservation_residual", np.max(traj.conservation_residual()), 0.0, tol.conservation, "abs")
    t_lo, t_hi = traj.support
    seeds = np.linspace(t_lo - 0.2, 0.0, 4)
    f1, f2 = jacobi_field(traj, seeds[0]), jacobi_field(traj, seeds[2])
    omega = symplectic_product(f1, f2, traj.grid)
    rep.add("symplectic_product_drift", np.max(np.abs(omega - omega[0])) / abs(omega[0]), 0.0,
            tol.symplectic, "abs")
    fields_ = {s: jacobi_field(traj, s) for s in seeds}
    worst = 0.0
    for s in seeds:
        for t in seeds:
            a = float(fields_[s](t)[0])
            b = -float(fields_[t](s)[0])
            worst = max(worst, abs(a - b))
    rep.add("reciprocity", worst, 0.0, tol.reciprocity, "abs")


def _verify_shifts(cfg, traj, rep, tol):
    sh = shift_report(cfg, traj)
    rep.add("route_equality_green", sh["delta_z_green"], sh["delta_z_LD"], tol.route_equality)
    rep.add("work_energy_bookkeeping", -cs.work_by_radiation_reaction(traj), sh["E_em"], tol.work_energy)
    if traj.is_static:
        rep.add("central_equivalence_xi", sh["delta_z_q1_xi"], sh["delta_z_LD"], tol.central_equivalence)
        rep.add("cutoff_cross_term", abs(sh["q1_xi_cutoff_cross_term"]) / abs(sh["delta_z_q1_xi"]), 0.0,
                tol.cutoff_cross_term, "abs")
    else:
        rep.add("central_equivalence_closed", sh["delta_z_q1_closed"], sh["delta_z_LD"],
                tol.central_equivalence)
    rep.add("q1_t_vs_closed", sh["delta_z_q1_t"], sh["delta_z_q1_closed"], tol.q1_t_vs_closed)
    rep.add("q1_jacobi_vs_classical", sh["delta_z_q1_jacobi"], sh["delta_z_LD"], tol.route_equality)
    rep.add("recoil_shift_equals_extra", sh["delta_z_q2"], sh["delta_z_extra"], tol.recoil_identity)
    rep.add("shift_total", sh["delta_z_q"], sh["delta_z_class"], tol.central_equivalence)
    doubled = shift_report(_alpha_scaled(cfg, 2.0))
    worst = max(_rel(doubled[k], 2.0 * sh[k]) for k in sh
                if k.startswith("delta_z") or k == "E_em")
    rep.add("alpha_linearity", worst, 0.0, tol.alpha_linearity, "abs")


def _verify_angles(cfg, traj, rep, tol):
    c, w = solid_angle_rule(cfg.spectrum.n_angles)
    for v in (0.0, 0.5, 0.9, traj.v_in, traj.v0):
        dtau = np.sqrt(1.0 - v * v) / (1.0 - v * c)
        rep.add(f"solid_angle_dtau_dxi[v={v:.6g}]", np.sum(w * dtau**2), 4.0 * np.pi, tol.solid_angle)
    v = np.array([0.0, 0.5, 0.9])
    K4, K5 = qs.angular_kernels(v, cfg.spectrum.n_angles)
    C4, C5 = qs.angular_kernels(v, closed_form=True)
    for i, vi in enumerate(v):
        rep.add(f"kernel_gamma4[v={vi:g}]", K4[i], C4[i], tol.solid_angle)
        if vi == 0.0:
            rep.add(f"kernel_gamma6[v={vi:g}]", K5[i], 0.0, tol.solid_angle, "abs")
        else:
            rep.add(f"kernel_gamma6[v={vi:g}]", K5[i], C5[i], tol.solid_angle)


def _verify_emission(cfg, traj, rep, tol):
    cutoff = build_cutoff(cfg, traj)
    E_L = cs.emitted_energy_larmor(traj)
    rep.add("time_domain_energy", em.energy_time_domain(traj, cfg.spectrum.n_angles), E_L,
            tol.time_domain_energy)
    worst = 0.0
    worst_real = 0.0
    for k, th in cfg.wkb.pairs:
        a = np.array(em.emission_amplitude(traj, k, th, cutoff, "velocity"))
        b = np.array(em.emission_amplitude(traj, k, th, cutoff, "ibp"))
        worst = max(worst, np.linalg.norm(a - b) / np.linalg.norm(b))
        m = np.array(em.emission_amplitude(traj, -k, th, cutoff, "ibp"))
        worst_real = max(worst_real, np.linalg.norm(m - np.conj(b)) / np.linalg.norm(b))
    rep.add("amplitude_velocity_vs_ibp", worst, 0.0, tol.amplitude_forms, "abs")
    rep.add("amplitude_reality", worst_real, 0.0, tol.reality, "abs")


def _verify_wkb(cfg, traj, rep, tol):
    cutoff = build_cutoff(cfg, traj)
    for k, th in cfg.wkb.pairs:
        ref = em.emission_amplitude(traj, k, th, cutoff, "velocity")
        hc = hbar_convergence(traj, k, th, ref, cfg.wkb.hbars, cutoff)
        rep.add(f"hbar_order[k={k:g},theta={th:.4g}]", hc.order, 1.0, tol.hbar_order_band, "abs")
        rep.add(f"hbar_limit[k={k:g},theta={th:.4g}]", hc.rel_error, 0.0, tol.hbar_limit, "abs")


def _verify_spectral_energy(cfg, traj, rep, tol):
    cutoff = build_cutoff(cfg, traj)
    E_L = cs.emitted_energy_larmor(traj)
    er = energy_report(cfg, traj, cutoff)
    rep.add("larmor_spectral_extrapolated", er["E_extrapolated"], E_L, tol.larmor_spectral)
    rep.add("larmor_spectral_subtracted", er["schedule"][0]["subtracted"], er["E_extrapolated"],
            tol.artifact_consistency)
    rep.add("artifact_halves_with_width", er["artifact_ratio"], 2.0, tol.artifact_consistency)


_SUITES = {
    "dynamics": _verify_dynamics,
    "shifts": _verify_shifts,
    "angles": _verify_angles,
    "emission": _verify_emission,
    "spectral_energy": _verify_spectral_energy,
    "wkb": _verify_wkb,
}


def run_verify(cfg, tolerance_scale=1.0):
    tol = cfg.tolerances.scaled(tolerance_scale)
    traj = build_trajectory(cfg)
    rep = VerifyReport(environment={
        "tolerances": asdict(tol),
        "tolerance_scale": tolerance_scale,
        "grid": asdict(cfg.grid),
        "spectrum": asdict(cfg.spectrum),
        "hbars": list(cfg.wkb.hbars),
        "suites": [s for s in _SUITES if s not in cfg.verify_skip],
    })
    for name, fn in _SUITES.items():
        if name in cfg.verify_skip:
            continue
        try:
            fn(cfg, traj, rep, tol)
        except RadiationReactionError as exc:
            rep.records.append(IdentityRecord(f"{name}:{type(exc).__name__}", float("nan"), float("nan"),
                                              float("nan"), float("nan"), 0.0, False, "abs", str(exc)))
    return rep


def cmd_verify(cfg, out_dir, tolerance_scale=1.0):
    rep = run_verify(cfg, tolerance_scale)
    report = {"command": "verify", **rep.to_dict(), "config": config_to_dict(cfg)}
    write_json(os.path.join(out_dir, "verify.json"), report)
    return rep


# -- sweep --------------------------------------------------------------------

def _with_parameter(cfg, name, value):
    if name in ("V0", "V_plateau"):
        return replace(cfg, potential=replace(cfg.potential, **{name: float(value)}))
    if name == "alpha_c":
        return replace(cfg, particle=replace(cfg.particle, alpha_c=float(value)))
    if name == "width":
        return replace(cfg, cutoff=replace(cfg.cutoff, width=float(value)))
    if name == "n_panels":
        return replace(cfg, grid=replace(cfg.grid, n_panels=int(value)))
    return replace(cfg, **{name: float(value)})


_SWEEP_COLUMNS = [
    "delta_z_LD", "delta_z_green", "delta_z_extra", "delta_z_q1", "delta_z_q1_t",
    "delta_z_q1_closed", "delta_z_q2", "delta_z_class", "delta_z_q", "E_em",
]


def _sweep_row(args):
    cfg, name, value = args
    try:
        sub = _with_parameter(cfg, name, value).validate()
        sh = shift_report(sub)
        return {"value": value, "status": "ok", "error": "", **{c: sh[c] for c in _SWEEP_COLUMNS}}
    except RadiationReactionError as exc:
        return {"value": value, "status": type(exc).__name__, "error": str(exc),
                **{c: float("nan") for c in _SWEEP_COLUMNS}}


def cmd_sweep(cfg, out_dir, workers=None):
    name = cfg.sweep.parameter
    values = list(cfg.sweep.values)
    workers = workers or cfg.workers
    jobs = [(cfg, name, v) for v in values]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_sweep_row, jobs))
    else:
        rows = [_sweep_row(j) for j in jobs]
    header = ["parameter", "value", "status", *_SWEEP_COLUMNS, "error"]
    _write_csv(
        os.path.join(out_dir, "sweep.csv"), header,
        ([name, float(r["value"]), r["status"], *[float(r[c]) for c in _SWEEP_COLUMNS], r["error"]]
         for r in rows),
    )
    report = {"command": "sweep", "parameter": name, "rows": rows, "config": config_to_dict(cfg)}
    ok = [r for r in rows if r["status"] == "ok"]
    if name == "n_panels" and len(ok) >= 3:
        vals = [r["delta_z_LD"] for r in ok]
        report["convergence_order_delta_z_LD"] = convergence_order(vals, ok[1]["value"] / ok[0]["value"])
    write_json(os.path.join(out_dir, "sweep.json"), report)
    return report
