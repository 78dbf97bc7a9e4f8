"""Experiment configuration: one JSON document with a schema version.

Every tolerance and grid size used by the command-line front end lives here
with its default, so a config file fully determines a run.
"""

import json
from dataclasses import asdict, dataclass, field, fields, replace

import numpy as np

from .dynamics import GridControl, ParticleParams
from .errors import ConfigError, DomainError, TurningPointError
from .potentials import StaticPotentialSpec, TimePotentialSpec, check_pair

__all__ = [
    "SCHEMA_VERSION",
    "CutoffConfig",
    "SpectrumConfig",
    "WkbConfig",
    "Tolerances",
    "SweepConfig",
    "ExperimentConfig",
    "load_config",
    "config_from_dict",
    "config_to_dict",
    "default_config",
]

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class CutoffConfig:
    profile_order: int = 7
    margin: float = 0.25
    width: float = None
    width_factor: float = 2.0


@dataclass(frozen=True)
class SpectrumConfig:
    n_angles: int = 64
    k_max: float = None
    tail_tol: float = 1e-7
    filon_threshold: float = 50.0
    n_filon: int = 256
    k_start: float = 0.1
    k_stop: float = 20.0
    n_k: int = 40
    grid_angles: int = 8


@dataclass(frozen=True)
class WkbConfig:
    hbars: tuple = (1e-2, 1e-3, 1e-4)
    pairs: tuple = ((1.0, 0.4), (2.0, 1.0471975511965976), (5.0, 2.5))


@dataclass(frozen=True)
class Tolerances:
    conservation: float = 1e-10
    symplectic: float = 1e-8
    reciprocity: float = 1e-6
    route_equality: float = 1e-6
    work_energy: float = 1e-12
    central_equivalence: float = 1e-4
    q1_t_vs_closed: float = 1e-8
    recoil_identity: float = 1e-6
    solid_angle: float = 1e-10
    time_domain_energy: float = 1e-10
    larmor_spectral: float = 1e-3
    artifact_consistency: float = 1e-4
    amplitude_forms: float = 1e-8
    cutoff_cross_term: float = 1e-8
    hbar_order_band: float = 0.2
    hbar_limit: float = 1e-4
    alpha_linearity: float = 1e-12
    reality: float = 1e-12
    dp_step: float = 1e-6

    def scaled(self, factor):
        return Tolerances(**{f.name: getattr(self, f.name) * factor for f in fields(self)})


@dataclass(frozen=True)
class SweepConfig:
    parameter: str = "V0"
    values: tuple = ()


SWEEP_PARAMETERS = ("V0", "V_plateau", "p_final", "alpha_c", "width", "n_panels", "z0")


@dataclass(frozen=True)
class ExperimentConfig:
    particle: ParticleParams = field(default_factory=ParticleParams)
    potential: object = field(default_factory=lambda: StaticPotentialSpec(0.3, 2.0, 1.0))
    p_final: float = 1.5
    z0: float = 0.1
    cutoff: CutoffConfig = field(default_factory=CutoffConfig)
    grid: GridControl = field(default_factory=GridControl)
    spectrum: SpectrumConfig = field(default_factory=SpectrumConfig)
    wkb: WkbConfig = field(default_factory=WkbConfig)
    tolerances: Tolerances = field(default_factory=Tolerances)
    sweep: SweepConfig = field(default_factory=SweepConfig)
    verify_skip: tuple = ()
    workers: int = 1

    def validate(self):
        """Module-level checks that must pass before any computation."""
        check_pair(self.potential, self.particle)
        m = self.particle.m
        if self.p_final <= 0.0:
            raise TurningPointError("p_final must be positive")
        if self.potential.kind == "static":
            if np.hypot(self.p_final, m) - self.potential.V0 <= m:
                raise TurningPointError("static potential reflects the particle (turning point)")
            if not self.z0 > -self.potential.Z2:
                raise DomainError(f"z0 must exceed -Z2 = {-self.potential.Z2}")
        elif self.p_final - self.potential.v_range[1] <= 0.0:
            raise TurningPointError("time-dependent potential stops the particle (turning point)")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        if self.sweep.parameter not in SWEEP_PARAMETERS:
            raise ConfigError(f"unknown sweep parameter {self.sweep.parameter!r}")
        return self


def _build(cls, data, where):
    if data is None:
        return cls()
    if not isinstance(data, dict):
        raise ConfigError(f"{where}: expected an object")
    names = {f.name for f in fields(cls)}
    unknown = set(data) - names
    if unknown:
        raise ConfigError(f"{where}: unknown keys {sorted(unknown)}")
    kwargs = {}
    for f in fields(cls):
        if f.name in data:
            v = data[f.name]
            if isinstance(v, list):
                v = tuple(tuple(x) if isinstance(x, list) else x for x in v)
            kwargs[f.name] = v
    try:
        return cls(**kwargs)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: {exc}") from exc


def _build_potential(data):
    if not isinstance(data, dict) or "kind" not in data:
        raise ConfigError("potential: object with a 'kind' field required")
    data = dict(data)
    kind = data.pop("kind")
    if kind == "static":
        return _build(StaticPotentialSpec, data, "potential")
    if kind == "time":
        return _build(TimePotentialSpec, data, "potential")
    raise ConfigError(f"potential.kind must be 'static' or 'time', got {kind!r}")


_TOP_KEYS = {
    "schema_version", "particle", "potential", "p_final", "z0", "cutoff", "grid",
    "spectrum", "wkb", "tolerances", "sweep", "verify_skip", "workers",
}


def config_from_dict(data):
    """Build and validate an :class:`ExperimentConfig` from parsed JSON."""
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    version = data.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ConfigError(f"schema_version must be {SCHEMA_VERSION}, got {version!r}")
    unknown = set(data) - _TOP_KEYS
    if unknown:
        raise ConfigError(f"unknown top-level keys {sorted(unknown)}")
    base = ExperimentConfig()
    try:
        cfg = ExperimentConfig(
            particle=_build(ParticleParams, data.get("particle"), "particle"),
            potential=_build_potential(data["potential"]) if "potential" in data else base.potential,
            p_final=float(data.get("p_final", base.p_final)),
            z0=float(data.get("z0", base.z0)),
            cutoff=_build(CutoffConfig, data.get("cutoff"), "cutoff"),
            grid=_build(GridControl, data.get("grid"), "grid"),
            spectrum=_build(SpectrumConfig, data.get("spectrum"), "spectrum"),
            wkb=_build(WkbConfig, data.get("wkb"), "wkb"),
            tolerances=_build(Tolerances, data.get("tolerances"), "tolerances"),
            sweep=_build(SweepConfig, data.get("sweep"), "sweep"),
            verify_skip=tuple(data.get("verify_skip", ())),
            workers=int(data.get("workers", base.workers)),
        )
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from exc
    return cfg.validate()


def load_config(path):
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    return config_from_dict(data)


def config_to_dict(cfg):
    """Inverse of :func:`config_from_dict` (JSON-ready)."""
    pot = asdict(cfg.potential)
    pot["kind"] = cfg.potential.kind
    return {
        "schema_version": SCHEMA_VERSION,
        "particle": asdict(cfg.particle),
        "potential": pot,
        "p_final": cfg.p_final,
        "z0": cfg.z0,
        "cutoff": asdict(cfg.cutoff),
        "grid": asdict(cfg.grid),
        "spectrum": asdict(cfg.spectrum),
        "wkb": {"hbars": list(cfg.wkb.hbars), "pairs": [list(p) for p in cfg.wkb.pairs]},
        "tolerances": asdict(cfg.tolerances),
        "sweep": {"parameter": cfg.sweep.parameter, "values": list(cfg.sweep.values)},
        "verify_skip": list(cfg.verify_skip),
        "workers": cfg.workers,
    }


def default_config(**changes):
    return replace(ExperimentConfig(), **changes)
