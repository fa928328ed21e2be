"""Config-driven simulations shared by the CLI, the scripts and the tests."""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from . import correlation as corr
from .acquisition import (
    AllanCurve,
    allan_deviation,
    allan_slope,
    default_gate_times,
    demodulated_products,
    estimate_correlation,
    integration_time_for_sigma,
    synthesize_pulse_train,
)
from .config import ConfigError, ExperimentConfig, StateSpec, load_config
from .optics import TWO_PI, CrystalParams, DispersionModel, Responsivity, responsivity


@dataclass
class Setup:
    """Everything a correlation run needs, resolved from one config."""

    model: DispersionModel
    params: CrystalParams
    taus: np.ndarray
    grid: corr.FrequencyGrid
    resp: Responsivity
    state: corr.ThermalState
    k_cal: float


def _grid(cfg: ExperimentConfig, params: CrystalParams, taus) -> corr.FrequencyGrid:
    return corr.FrequencyGrid.for_taus(
        taus, cfg.grid.f_max_hz, params, refine=cfg.grid.refine, cone_limited=cfg.grid.cone_limited
    )


def resolve_k_cal(cfg: ExperimentConfig) -> float:
    """Numeric ``k_cal`` from the config, or the vacuum calibration at the reference temperature.

    The automatic value uses the same material, crystal, delay and frequency grid
    as the run itself, with the crystal at ``calibration.reference_temperature_k``.
    """
    if cfg.calibration.k_cal != "auto":
        return float(cfg.calibration.k_cal)
    params = cfg.crystal.params()
    taus = corr.delay_grid(cfg.delay.tau_max_s, cfg.delay.tau_step_s)
    grid = _grid(cfg, params, taus)
    ref_model = cfg.material_model(cfg.calibration.reference_temperature_k)
    resp = responsivity(ref_model, params, grid)
    return corr.calibrate_k_cal(grid, resp, cfg.calibration.target_peak_v2_per_m2)


def build_setup(cfg: ExperimentConfig) -> Setup:
    params = cfg.crystal.params()
    model = cfg.material_model()
    taus = corr.delay_grid(cfg.delay.tau_max_s, cfg.delay.tau_step_s)
    grid = _grid(cfg, params, taus)
    try:
        state = cfg.state.state()
        state.occupation(grid.omegas)
    except corr.GridMismatchError:
        raise
    except ValueError as exc:
        raise ConfigError("state", str(exc)) from None
    return Setup(
        model=model,
        params=params,
        taus=taus,
        grid=grid,
        resp=responsivity(model, params, grid),
        state=state,
        k_cal=resolve_k_cal(cfg),
    )


@dataclass
class G1Result:
    raw: corr.CorrelationTrace
    filtered: corr.CorrelationTrace
    spectrum: corr.Spectrum

    @property
    def peak_peak(self) -> float:
        return corr.peak_peak(self.filtered)


def run_g1(cfg: ExperimentConfig, setup: Setup | None = None) -> G1Result:
    s = setup or build_setup(cfg)
    raw = corr.g1_temporal(s.grid, s.state, s.resp, s.taus, s.k_cal)
    filt = corr.lowpass_filter(raw, TWO_PI * cfg.output.cutoff_hz)
    return G1Result(raw=raw, filtered=filt, spectrum=corr.power_spectrum(raw))


@dataclass
class SpatialResult:
    delta_xs: np.ndarray
    peak_peak: np.ndarray
    coherence_length: float
    label: str


def run_spatial(cfg: ExperimentConfig, setup: Setup | None = None) -> SpatialResult:
    s = setup or build_setup(cfg)
    dxs = np.asarray(cfg.spatial.delta_x_m, dtype=float)
    traces = corr.spatial_scan(
        s.grid, s.state, s.resp, s.params, dxs, s.taus, s.k_cal, cfg.spatial.transverse()
    )
    cutoff = TWO_PI * cfg.output.cutoff_hz
    pp = np.array([corr.peak_peak(corr.lowpass_filter(t, cutoff)) for t in traces])
    lc = corr.lateral_coherence_length(dxs, pp) if dxs[0] == 0 else float("nan")
    return SpatialResult(dxs, pp, lc, s.state.label)


def run_photons(hot: ExperimentConfig, cold: ExperimentConfig) -> corr.PhotonNumber:
    """Photon number from the spectra of two runs that must share one frequency grid."""
    sh, sc = build_setup(hot), build_setup(cold)
    spec_hot = run_g1(hot, sh).spectrum
    spec_cold = run_g1(cold, sc).spectrum
    if spec_hot.n_samples != spec_cold.n_samples:
        raise corr.GridMismatchError("hot and cold runs use different delay grids")
    return corr.extract_photon_number(spec_hot, spec_cold, cold.photons.floor_rel)


def reference_config(cfg: ExperimentConfig, key: str, relpath: str) -> ExperimentConfig:
    if not relpath:
        raise ConfigError(key, "no reference config given")
    try:
        return load_config(cfg.resolve(relpath))
    except ConfigError as exc:
        raise ConfigError(key, f"in {relpath}: {exc}") from None


@dataclass
class NoiseResult:
    estimate_mean: float
    estimate_stderr: float
    allan: AllanCurve
    slope: float
    integration_time_s: float
    n_pulses: int


def run_noise(cfg: ExperimentConfig, seed: int | None = None) -> NoiseResult:
    n = cfg.noise
    model = n.model(cfg.seed if seed is None else seed)
    rec = synthesize_pulse_train(n.true_corr, model, n.n_pulses, n.f_rep_hz)
    est = estimate_correlation(rec)
    products = demodulated_products(rec)
    f_pair = n.f_rep_hz / 2.0
    gates = default_gate_times(products.size, f_pair)
    curve = allan_deviation(products - n.true_corr, f_pair, gates)
    slope = allan_slope(curve)
    t_int = integration_time_for_sigma(n.shot_sigma, n.target_sigma, n.f_rep_hz) if n.shot_sigma > 0 else 0.0
    return NoiseResult(est.mean, est.stderr, curve, slope, t_int, rec.n_pulses)


# --------------------------------------------------------------------------
# headline metrics of the shipped scenarios
# --------------------------------------------------------------------------

def with_state(cfg: ExperimentConfig, state: StateSpec, crystal_temperature: float | None = None):
    crystal = cfg.crystal if crystal_temperature is None else replace(cfg.crystal, temperature_k=crystal_temperature)
    return replace(cfg, state=state, crystal=crystal)


def scenario_metrics(cfg: ExperimentConfig, spatial: bool = True) -> dict:
    """Peak-peak values, spectral maxima and coherence lengths for the four scenarios.

    ``cfg`` supplies material, crystal, grids and calibration; its state and
    crystal temperature are overridden.
    """
    vac = with_state(cfg, StateSpec("vacuum"), 4.0)
    hot = with_state(cfg, StateSpec("blackbody", 300.0), 300.0)
    rad45 = with_state(cfg, StateSpec("blackbody", 45.0), 4.0)
    out = {}
    setups = {}
    for key, c in (("vac", vac), ("t300", hot), ("rad45", rad45)):
        setups[key] = build_setup(c)
        g = run_g1(c, setups[key])
        out[f"pp_{key}"] = g.peak_peak
        out[f"peak_{key}"] = float(g.raw.values[g.raw.taus.size // 2])
        if key == "vac":
            out["maxima_thz"] = corr.spectral_peaks(g.spectrum) / TWO_PI / 1e12
    out["ratio"] = out["pp_t300"] / out["pp_vac"]
    if spatial:
        out["lc_t300"] = run_spatial(hot, setups["t300"]).coherence_length
        out["lc_vac"] = run_spatial(vac, setups["vac"]).coherence_length
    return out
