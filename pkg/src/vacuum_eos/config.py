"""Experiment configuration: sectioned INI files, one per experiment.

Values are kept in the units written in the file (Hz, metres, kelvin) so that
``parse_config(dump_config(cfg)) == cfg`` holds exactly. Conversion to the
angular-frequency objects used by the physics happens in the ``build_*``
methods.

Layout::

    [experiment]      name, seed
    [crystal]         material, temperature_k, geometry and probe keys
    [material:NAME]   Lorentz block, any number of them
    [state]           kind = vacuum | blackbody | custom
    [grid] [delay] [spatial] [noise] [calibration] [photons] [output]
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field, fields
from pathlib import Path

import numpy as np

from .acquisition import NoiseModel
from .correlation import ThermalState, TransverseGrid
from .optics import TWO_PI, CrystalParams, DispersionModel


class ConfigError(ValueError):
    """Invalid or unresolvable configuration; ``key`` names the offending entry."""

    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key


@dataclass(frozen=True)
class MaterialSpec:
    eps_inf: float
    phonon_freq_to_hz: float
    oscillator_strength: float
    damping_10k_hz: float
    damping_300k_hz: float

    def model(self, name: str, temperature: float) -> DispersionModel:
        return DispersionModel(
            eps_inf=self.eps_inf,
            phonon_freq_to=TWO_PI * self.phonon_freq_to_hz,
            oscillator_strength=self.oscillator_strength,
            damping_10k=TWO_PI * self.damping_10k_hz,
            damping_300k=TWO_PI * self.damping_300k_hz,
            temperature=temperature,
            name=name,
        )


# ZnTe-like block fitted by scripts/fit_defaults.py; the damping is far above
# the literature phonon linewidth because it also absorbs the missing physics.
DEFAULT_MATERIAL = MaterialSpec(
    eps_inf=7.768,
    phonon_freq_to_hz=5.798e12,
    oscillator_strength=2.149,
    damping_10k_hz=0.6253e12,
    damping_300k_hz=0.8525e12,
)


@dataclass(frozen=True)
class CrystalSpec:
    material: str = "znte-default"
    temperature_k: float = 4.0
    length_m: float = 3e-3
    r41_m_per_v: float = 4.0e-12
    n_nir: float = 2.85
    ng_nir: float = 3.215
    probe_freq_hz: float = 375e12
    probe_intensity_w_per_m2: float = 1.0e13
    probe_fwhm_s: float = 80e-15
    probe_waist_m: float = 125e-6
    epsilon_r: float = 9.8
    include_exit_facet: bool = False
    include_envelope: bool = True

    def params(self) -> CrystalParams:
        return CrystalParams(
            length=self.length_m,
            eo_coefficient_r41=self.r41_m_per_v,
            refr_index_nir=self.n_nir,
            group_index_nir=self.ng_nir,
            probe_freq=TWO_PI * self.probe_freq_hz,
            probe_intensity=self.probe_intensity_w_per_m2,
            probe_duration=self.probe_fwhm_s,
            probe_waist=self.probe_waist_m,
            epsilon_r=self.epsilon_r,
            include_exit_facet=self.include_exit_facet,
            include_envelope=self.include_envelope,
        )


@dataclass(frozen=True)
class StateSpec:
    kind: str = "vacuum"
    temperature_k: float = 0.0
    n_mean: tuple = ()

    def state(self) -> ThermalState:
        if self.kind == "vacuum":
            return ThermalState.vacuum()
        if self.kind == "blackbody":
            return ThermalState.blackbody(self.temperature_k)
        return ThermalState.custom(np.array(self.n_mean, dtype=float))


@dataclass(frozen=True)
class GridSpec:
    f_max_hz: float = 5e12
    refine: int = 1
    cone_limited: bool = True


@dataclass(frozen=True)
class DelaySpec:
    tau_max_s: float = 5e-12
    tau_step_s: float = 10e-15


@dataclass(frozen=True)
class SpatialSpec:
    delta_x_m: tuple = tuple(25 * i / 1e6 for i in range(33))
    n_k: int = 401
    phase_matched: bool = True
    compare: str = ""

    def transverse(self) -> TransverseGrid:
        return TransverseGrid(n_k=self.n_k, phase_matched=self.phase_matched)


@dataclass(frozen=True)
class NoiseSpec:
    shot_sigma: float = 1.2e4
    drift_amplitude: float = 0.0
    drift_knee_hz: float = 1e3
    n_pulses: int = 200_000
    true_corr: float = 6.2e-2
    f_rep_hz: float = 80e6
    target_sigma: float = 1.8e-2

    def model(self, seed: int) -> NoiseModel:
        return NoiseModel(self.shot_sigma, self.drift_amplitude, self.drift_knee_hz, seed)


@dataclass(frozen=True)
class CalibrationSpec:
    k_cal: str = "auto"
    reference_temperature_k: float = 4.0
    target_peak_v2_per_m2: float = 6.2e-2


@dataclass(frozen=True)
class PhotonSpec:
    reference: str = ""
    floor_rel: float = 1e-3


@dataclass(frozen=True)
class OutputSpec:
    directory: str = "out"
    cutoff_hz: float = 3e12


@dataclass(frozen=True)
class ExperimentConfig:
    name: str = "experiment"
    seed: int = 0
    crystal: CrystalSpec = CrystalSpec()
    materials: dict = field(default_factory=lambda: {"znte-default": DEFAULT_MATERIAL})
    state: StateSpec = StateSpec()
    grid: GridSpec = GridSpec()
    delay: DelaySpec = DelaySpec()
    spatial: SpatialSpec = SpatialSpec()
    noise: NoiseSpec = NoiseSpec()
    calibration: CalibrationSpec = CalibrationSpec()
    photons: PhotonSpec = PhotonSpec()
    output: OutputSpec = OutputSpec()
    base_dir: str = field(default=".", compare=False)

    def material_model(self, temperature: float | None = None) -> DispersionModel:
        name = self.crystal.material
        if name not in self.materials:
            raise ConfigError("crystal.material", f"no [material:{name}] block")
        t = self.crystal.temperature_k if temperature is None else temperature
        return self.materials[name].model(name, t)

    def resolve(self, relpath: str) -> Path:
        p = Path(relpath)
        return p if p.is_absolute() else Path(self.base_dir) / p


_SECTIONS = {
    "crystal": CrystalSpec,
    "state": StateSpec,
    "grid": GridSpec,
    "delay": DelaySpec,
    "spatial": SpatialSpec,
    "noise": NoiseSpec,
    "calibration": CalibrationSpec,
    "photons": PhotonSpec,
    "output": OutputSpec,
}


def _convert(key: str, raw: str, default):
    raw = raw.strip()
    try:
        if isinstance(default, bool):
            low = raw.lower()
            if low in ("true", "yes", "1", "on"):
                return True
            if low in ("false", "no", "0", "off"):
                return False
            raise ValueError(f"not a boolean: {raw!r}")
        if isinstance(default, int):
            return int(raw.replace("_", ""))
        if isinstance(default, float):
            return float(raw)
        if isinstance(default, tuple):
            return tuple(float(x) for x in raw.split(",") if x.strip())
        return raw
    except ValueError as exc:
        raise ConfigError(key, str(exc)) from None


def _format(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, tuple):
        return ", ".join(repr(float(v)) for v in value)
    return str(value)


def _read_section(cp, section, cls, key_prefix):
    kwargs = {}
    known = {f.name: f for f in fields(cls)}
    if cp.has_section(section):
        for key, raw in cp.items(section):
            if key not in known:
                raise ConfigError(f"{key_prefix}.{key}", "unknown key")
            default = getattr(cls, key, None)
            if default is None:
                default = 0.0
            kwargs[key] = _convert(f"{key_prefix}.{key}", raw, default)
    try:
        return cls(**kwargs)
    except (TypeError, ValueError) as exc:
        raise ConfigError(key_prefix, str(exc)) from None


def parse_config(text: str, base_dir: str = ".") -> ExperimentConfig:
    cp = configparser.ConfigParser(interpolation=None)
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError("file", str(exc).splitlines()[0]) from None

    known = set(_SECTIONS) | {"experiment"}
    for sec in cp.sections():
        if sec not in known and not sec.startswith("material:"):
            raise ConfigError(sec, "unknown section")

    materials = {}
    for sec in cp.sections():
        if sec.startswith("material:"):
            name = sec.split(":", 1)[1].strip()
            spec = {}
            for f in fields(MaterialSpec):
                if not cp.has_option(sec, f.name):
                    raise ConfigError(f"{sec}.{f.name}", "missing")
                spec[f.name] = _convert(f"{sec}.{f.name}", cp.get(sec, f.name), 0.0)
            extra = set(cp.options(sec)) - {f.name for f in fields(MaterialSpec)}
            if extra:
                raise ConfigError(f"{sec}.{sorted(extra)[0]}", "unknown key")
            materials[name] = MaterialSpec(**spec)

    exp = cp["experiment"] if cp.has_section("experiment") else {}
    name = exp.get("name", "experiment").strip()
    seed = _convert("experiment.seed", exp.get("seed", "0"), 0)
    extra = set(exp) - {"name", "seed"}
    if extra:
        raise ConfigError(f"experiment.{sorted(extra)[0]}", "unknown key")

    parts = {sec: _read_section(cp, sec, cls, sec) for sec, cls in _SECTIONS.items()}
    cfg = ExperimentConfig(name=name, seed=seed, materials=materials, base_dir=str(base_dir), **parts)
    validate(cfg)
    return cfg


def validate(cfg: ExperimentConfig) -> None:
    if cfg.crystal.material not in cfg.materials:
        raise ConfigError("crystal.material", f"no [material:{cfg.crystal.material}] block")
    for name, spec in cfg.materials.items():
        try:
            spec.model(name, cfg.crystal.temperature_k)
        except ValueError as exc:
            raise ConfigError(f"material:{name}", str(exc)) from None
    try:
        cfg.crystal.params()
    except ValueError as exc:
        raise ConfigError("crystal", str(exc)) from None
    if cfg.state.kind not in ("vacuum", "blackbody", "custom"):
        raise ConfigError("state.kind", f"expected vacuum, blackbody or custom, got {cfg.state.kind!r}")
    if cfg.state.kind == "blackbody" and cfg.state.temperature_k < 0:
        raise ConfigError("state.temperature_k", "must be >= 0")
    if cfg.state.kind == "custom" and not cfg.state.n_mean:
        raise ConfigError("state.n_mean", "custom state needs occupations")
    if not cfg.grid.f_max_hz > 0:
        raise ConfigError("grid.f_max_hz", "must be > 0")
    if cfg.grid.refine < 1:
        raise ConfigError("grid.refine", "must be >= 1")
    if not (cfg.delay.tau_step_s > 0 and cfg.delay.tau_max_s >= cfg.delay.tau_step_s):
        raise ConfigError("delay", "need tau_max_s >= tau_step_s > 0")
    if cfg.grid.f_max_hz * 2 * cfg.delay.tau_step_s >= 1:
        raise ConfigError("grid.f_max_hz", "above the Nyquist frequency of the delay step")
    if not cfg.spatial.delta_x_m or any(x < 0 for x in cfg.spatial.delta_x_m):
        raise ConfigError("spatial.delta_x_m", "need a non-empty list of separations >= 0")
    if list(cfg.spatial.delta_x_m) != sorted(cfg.spatial.delta_x_m):
        raise ConfigError("spatial.delta_x_m", "separations must be increasing")
    if cfg.spatial.n_k < 16:
        raise ConfigError("spatial.n_k", "must be >= 16")
    n = cfg.noise
    if n.n_pulses < 2 or n.n_pulses % 2:
        raise ConfigError("noise.n_pulses", "must be even and >= 2")
    if n.shot_sigma < 0 or n.drift_amplitude < 0:
        raise ConfigError("noise.shot_sigma", "noise amplitudes must be >= 0")
    if n.drift_knee_hz <= 0 or n.f_rep_hz <= 0 or n.target_sigma <= 0:
        raise ConfigError("noise", "drift_knee_hz, f_rep_hz and target_sigma must be > 0")
    if not 0 <= cfg.seed < 2**64:
        raise ConfigError("experiment.seed", "must be an unsigned 64-bit integer")
    if cfg.calibration.k_cal != "auto":
        try:
            if float(cfg.calibration.k_cal) <= 0:
                raise ValueError
        except ValueError:
            raise ConfigError("calibration.k_cal", "expected 'auto' or a positive number") from None
    if not cfg.output.cutoff_hz > 0:
        raise ConfigError("output.cutoff_hz", "must be > 0")


def dump_config(cfg: ExperimentConfig) -> str:
    lines = ["[experiment]", f"name = {cfg.name}", f"seed = {cfg.seed}", ""]
    lines.append("[crystal]")
    lines += [f"{f.name} = {_format(getattr(cfg.crystal, f.name))}" for f in fields(CrystalSpec)]
    lines.append("")
    for name, spec in cfg.materials.items():
        lines.append(f"[material:{name}]")
        lines += [f"{f.name} = {_format(getattr(spec, f.name))}" for f in fields(MaterialSpec)]
        lines.append("")
    for sec, cls in _SECTIONS.items():
        if sec == "crystal":
            continue
        lines.append(f"[{sec}]")
        obj = getattr(cfg, sec)
        lines += [f"{f.name} = {_format(getattr(obj, f.name))}" for f in fields(cls)]
        lines.append("")
    return "\n".join(lines)


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError("--config", f"cannot read {path}: {exc.strerror}") from None
    return parse_config(text, base_dir=str(path.parent))


def packaged_config(name: str) -> ExperimentConfig:
    """One of the shipped scenario files, e.g. ``"vacuum_4k"``."""
    path = Path(__file__).parent / "configs" / f"{name}.ini"
    return load_config(path)
