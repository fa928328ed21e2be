"""Electro-optic field correlation of vacuum and thermal THz fields.

The correlation is an expectation value only: every THz mode contributes
``weight * (1 + 2 n) * |R|^2 * cos(W tau)``, where the ``1`` is the
zero-point part that survives for the vacuum state. A single dimensionless
constant ``k_cal`` carries the absolute scale.

Spectra use the real part of a centred DFT, one-sided, normalised so that a
trace ``a*cos(W_k tau)`` on an exact bin yields ``psd[k] == a``. With a
frequency grid commensurate with the delay grid (see
:meth:`FrequencyGrid.for_taus`) the spectrum reproduces the mode sum bin by
bin.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.constants import c, epsilon_0, hbar, k as k_B
from scipy.signal import find_peaks
from scipy.special import j0

from .optics import TWO_PI, CrystalParams, Responsivity, phase_matching_factor

VACUUM_PEAK_V2_PER_M2 = 6.2e-2
DEFAULT_CUTOFF = TWO_PI * 3e12


class GridMismatchError(ValueError):
    """Two frequency or delay grids that must coincide do not."""


# --------------------------------------------------------------------------
# grids and states
# --------------------------------------------------------------------------

def transverse_coupling(omegas, waist: float):
    """Fraction of the Gaussian transverse weight carried by free-space modes.

    Only plane waves with |k_perp| <= W/c reach the crystal from outside, so the
    weight exp(-k^2 w0^2 / 2) is cut at that radius: 1 - exp(-(W w0 / c)^2 / 2).
    """
    omegas = np.asarray(omegas, dtype=float)
    return -np.expm1(-((omegas * waist / c) ** 2) / 2.0)


@dataclass(frozen=True)
class FrequencyGrid:
    """Discretised THz mode continuum.

    ``mode_weight`` (V^2/m^2 per cos-term) is hbar W / (2 eps0 eps_r) times the
    1-D mode density sqrt(eps_r) dW / (2 pi c) times the transverse density
    eta(W) / (2 pi w0^2). It scales linearly with the cell width.
    """

    omegas: np.ndarray
    mode_weight: np.ndarray = field(repr=False)
    cone_limited: bool = True

    def __post_init__(self):
        om = np.asarray(self.omegas, dtype=float)
        w = np.asarray(self.mode_weight, dtype=float)
        if om.ndim != 1 or om.size == 0:
            raise ValueError("frequency grid must be a non-empty 1-D array")
        if np.any(om <= 0) or np.any(np.diff(om) <= 0):
            raise ValueError("frequency grid must be positive and strictly increasing")
        if w.shape != om.shape or np.any(w < 0):
            raise ValueError("mode weights must match the grid and be >= 0")
        object.__setattr__(self, "omegas", om)
        object.__setattr__(self, "mode_weight", w)

    def __len__(self):
        return self.omegas.size

    @classmethod
    def from_omegas(cls, omegas, params: CrystalParams, cone_limited: bool = True):
        omegas = np.asarray(omegas, dtype=float)
        if omegas.size < 2:
            raise ValueError("need at least two grid points to define cell widths")
        cell = np.gradient(omegas)
        eta = transverse_coupling(omegas, params.probe_waist) if cone_limited else 1.0
        weight = (
            hbar * omegas / (2.0 * epsilon_0 * params.epsilon_r)
            * np.sqrt(params.epsilon_r) * cell / (TWO_PI * c)
            * eta / (TWO_PI * params.probe_waist**2)
        )
        return cls(omegas=omegas, mode_weight=weight, cone_limited=cone_limited)

    @classmethod
    def uniform(cls, f_max_hz: float, df_hz: float, params: CrystalParams, cone_limited: bool = True):
        n = int(np.floor(f_max_hz / df_hz + 1e-9))
        return cls.from_omegas(TWO_PI * df_hz * np.arange(1, n + 1), params, cone_limited)

    @classmethod
    def for_taus(cls, taus, f_max_hz: float, params: CrystalParams, refine: int = 1,
                 cone_limited: bool = True):
        """Grid on the DFT bins of ``taus`` (spacing 1/(N dtau)), optionally subdivided."""
        taus = np.asarray(taus, dtype=float)
        step = uniform_step(taus)
        df = 1.0 / (taus.size * step * refine)
        return cls.uniform(f_max_hz, df, params, cone_limited)


@dataclass(frozen=True)
class ThermalState:
    """Radiation state: ``vacuum``, ``blackbody`` at ``temperature`` or ``custom`` occupation."""

    kind: str = "vacuum"
    temperature: float = 0.0
    n_mean: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.kind not in ("vacuum", "blackbody", "custom"):
            raise ValueError(f"unknown state kind {self.kind!r}")
        if self.kind == "blackbody" and self.temperature < 0:
            raise ValueError("temperature must be >= 0")
        if self.kind == "custom":
            if self.n_mean is None:
                raise ValueError("custom state needs an occupation array")
            n = np.asarray(self.n_mean, dtype=float)
            if np.any(n < 0):
                raise ValueError("occupation must be >= 0")
            object.__setattr__(self, "n_mean", n)

    @classmethod
    def vacuum(cls):
        return cls("vacuum")

    @classmethod
    def blackbody(cls, temperature: float):
        return cls("blackbody", float(temperature))

    @classmethod
    def custom(cls, n_mean):
        return cls("custom", n_mean=np.asarray(n_mean, dtype=float))

    @property
    def label(self) -> str:
        if self.kind == "blackbody":
            return f"blackbody {self.temperature:g} K"
        return self.kind

    def occupation(self, omegas) -> np.ndarray:
        omegas = np.asarray(omegas, dtype=float)
        if self.kind == "vacuum":
            return np.zeros_like(omegas)
        if self.kind == "blackbody":
            return bose_einstein(omegas, self.temperature)
        if self.n_mean.shape != omegas.shape:
            raise GridMismatchError("custom occupation does not match the frequency grid")
        return self.n_mean


def bose_einstein(omega, temperature: float):
    """Mean thermal photon number 1/(exp(hbar W / k_B T) - 1); zero at T = 0."""
    omega = np.asarray(omega, dtype=float)
    if np.any(~(omega > 0)):
        raise ValueError("angular frequency must be > 0")
    if temperature < 0:
        raise ValueError("temperature must be >= 0")
    if temperature == 0:
        out = np.zeros_like(omega)
    else:
        with np.errstate(over="ignore"):
            out = 1.0 / np.expm1(hbar * omega / (k_B * temperature))
    return out[()] if out.ndim == 0 else out


# --------------------------------------------------------------------------
# traces
# --------------------------------------------------------------------------

@dataclass
class CorrelationTrace:
    taus: np.ndarray
    values: np.ndarray
    delta_x: float = 0.0
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.taus = np.asarray(self.taus, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.taus.shape != self.values.shape:
            raise ValueError("taus and values differ in length")


@dataclass
class Spectrum:
    omegas: np.ndarray
    psd: np.ndarray
    n_samples: int = 0

    def __post_init__(self):
        self.omegas = np.asarray(self.omegas, dtype=float)
        self.psd = np.asarray(self.psd, dtype=float)


def delay_grid(tau_max: float = 5e-12, step: float = 10e-15) -> np.ndarray:
    """Symmetric uniform delays, built from integers so that tau[-i-1] == -tau[i]."""
    m = int(round(tau_max / step))
    return np.arange(-m, m + 1) * step


def uniform_step(taus) -> float:
    taus = np.asarray(taus, dtype=float)
    if taus.ndim != 1 or taus.size < 2:
        raise ValueError("delay grid needs at least two points")
    d = np.diff(taus)
    step = d.mean()
    if step <= 0 or np.max(np.abs(d - step)) > 1e-6 * step:
        raise ValueError("delay grid must be uniform and increasing")
    return float(step)


def _check_symmetric(taus) -> float:
    step = uniform_step(taus)
    if taus.size % 2 == 0 or abs(taus[0] + taus[-1]) > 1e-6 * step:
        raise ValueError("delay grid must have an odd length and be symmetric around 0")
    return step


def _check_same_grid(grid: FrequencyGrid, resp: Responsivity):
    if resp.omegas.shape != grid.omegas.shape or not np.allclose(
        resp.omegas, grid.omegas, rtol=1e-12, atol=0
    ):
        raise GridMismatchError("responsivity is defined on a different frequency grid")


def mode_spectrum(grid: FrequencyGrid, state: ThermalState, resp: Responsivity, k_cal: float = 1.0):
    """Per-mode amplitude of the cosine sum, k_cal * weight * (1 + 2n) * |R|^2."""
    _check_same_grid(grid, resp)
    occ = state.occupation(grid.omegas)
    return k_cal * grid.mode_weight * (1.0 + 2.0 * occ) * resp.abs2


def _cosine_sum(amplitudes, omegas, taus):
    # evaluated on |tau| and mirrored so the result is even to the last bit
    taus = np.asarray(taus, dtype=float)
    abs_t = np.abs(taus)
    uniq, inverse = np.unique(abs_t, return_inverse=True)
    half = np.cos(np.outer(uniq, omegas)) @ amplitudes
    return half[inverse]


def g1_temporal(grid: FrequencyGrid, state: ThermalState, resp: Responsivity, taus,
                k_cal: float = 1.0) -> CorrelationTrace:
    """Correlation sum over modes at zero probe separation."""
    taus = np.asarray(taus, dtype=float)
    uniform_step(taus)
    amp = mode_spectrum(grid, state, resp, k_cal)
    return CorrelationTrace(
        taus=taus,
        values=_cosine_sum(amp, grid.omegas, taus),
        delta_x=0.0,
        metadata={"state": state.label, "k_cal": k_cal},
    )


def calibrate_k_cal(grid: FrequencyGrid, resp: Responsivity,
                    target: float = VACUUM_PEAK_V2_PER_M2) -> float:
    """Scale that sets the vacuum correlation at tau = 0 to ``target``."""
    raw = float(np.sum(mode_spectrum(grid, ThermalState.vacuum(), resp, 1.0)))
    if raw <= 0:
        raise ValueError("vacuum correlation vanishes, cannot calibrate")
    return target / raw


# --------------------------------------------------------------------------
# transverse extension
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class TransverseGrid:
    """Quadrature over the transverse wavevector for the spatial correlation.

    ``phase_matched`` adds the longitudinal mismatch -k^2 / (2 k_in) that an
    oblique wave picks up; without it the weight is the bare Gaussian overlap.
    """

    n_k: int = 401
    k_extent: float = 8.0
    phase_matched: bool = True


def transverse_kernel(grid: FrequencyGrid, resp: Responsivity, params: CrystalParams,
                      delta_xs, transverse: TransverseGrid = TransverseGrid()) -> np.ndarray:
    """F(W, dx) = int k W(k) J0(k dx) dk / int k W(k) dk, shape (len(dx), len(grid)).

    The 2-D transverse integral is done in polar form, which turns the
    cos(k_x dx) average into J0. F(W, 0) == 1.
    """
    _check_same_grid(grid, resp)
    delta_xs = np.atleast_1d(np.asarray(delta_xs, dtype=float))
    if np.any(delta_xs < 0):
        raise ValueError("probe separation must be >= 0")
    w0 = params.probe_waist
    kernel = np.ones((delta_xs.size, grid.omegas.size))
    if not np.any(delta_xs > 0):
        return kernel
    if resp.delta_k is None:
        raise ValueError("responsivity lacks the phase-matching data needed for k_perp")

    u = np.linspace(0.0, 1.0, transverse.n_k)
    for j, om in enumerate(grid.omegas):
        kmax = transverse.k_extent / w0
        if grid.cone_limited:
            kmax = min(kmax, om / c)
        k = u * kmax
        weight = k * np.exp(-(k * w0) ** 2 / 2.0)
        if transverse.phase_matched:
            k_in = resp.n_real[j] * om / c
            pm = phase_matching_factor(resp.delta_k[j] - k**2 / (2.0 * k_in), resp.alpha[j], resp.length)
            weight = weight * np.abs(pm) ** 2
        den = np.trapezoid(weight, k)
        if den <= 0:
            continue
        for i, dx in enumerate(delta_xs):
            if dx > 0:
                kernel[i, j] = np.trapezoid(weight * j0(k * dx), k) / den
    return kernel


def g1_spatial(grid: FrequencyGrid, state: ThermalState, resp: Responsivity, params: CrystalParams,
               delta_x: float, taus, k_cal: float = 1.0,
               transverse: TransverseGrid = TransverseGrid()) -> CorrelationTrace:
    """Correlation at probe separation ``delta_x``; equals :func:`g1_temporal` at 0."""
    return spatial_scan(grid, state, resp, params, [delta_x], taus, k_cal, transverse)[0]


def spatial_scan(grid, state, resp, params, delta_xs, taus, k_cal=1.0,
                 transverse: TransverseGrid = TransverseGrid()) -> list:
    taus = np.asarray(taus, dtype=float)
    uniform_step(taus)
    amp = mode_spectrum(grid, state, resp, k_cal)
    kern = transverse_kernel(grid, resp, params, delta_xs, transverse)
    traces = []
    for dx, f in zip(np.atleast_1d(delta_xs), kern):
        traces.append(CorrelationTrace(
            taus=taus,
            values=_cosine_sum(amp * f, grid.omegas, taus),
            delta_x=float(dx),
            metadata={"state": state.label, "k_cal": k_cal},
        ))
    return traces


def lateral_coherence_length(delta_xs, pp) -> float:
    """Separation where ``pp`` first falls to 1/e of its value at the first point.

    Linear interpolation between samples; ``nan`` if it never gets there.
    """
    delta_xs = np.asarray(delta_xs, dtype=float)
    r = np.asarray(pp, dtype=float) / pp[0]
    below = np.nonzero(r < np.exp(-1.0))[0]
    if below.size == 0:
        return float("nan")
    i = below[0]
    return float(np.interp(np.exp(-1.0), [r[i], r[i - 1]], [delta_xs[i], delta_xs[i - 1]]))


# --------------------------------------------------------------------------
# spectra and derived metrics
# --------------------------------------------------------------------------

def power_spectrum(trace: CorrelationTrace) -> Spectrum:
    """One-sided real part of the DFT of a trace centred on tau = 0."""
    step = _check_symmetric(trace.taus)
    n = trace.values.size
    x = np.fft.fft(np.fft.ifftshift(trace.values)).real
    m = n // 2
    psd = x[: m + 1] * (2.0 / n)
    psd[0] = x[0] / n
    omegas = TWO_PI * np.arange(m + 1) / (n * step)
    return Spectrum(omegas=omegas, psd=psd, n_samples=n)


def inverse_power_spectrum(spec: Spectrum, taus) -> CorrelationTrace:
    """Even trace whose :func:`power_spectrum` is ``spec``."""
    taus = np.asarray(taus, dtype=float)
    step = _check_symmetric(taus)
    n = taus.size
    if n != spec.n_samples or not np.allclose(spec.omegas[1:2], TWO_PI / (n * step)):
        raise GridMismatchError("spectrum was not taken on this delay grid")
    full = np.empty(n)
    full[0] = spec.psd[0] * n
    half = spec.psd[1:] * (n / 2.0)
    full[1 : half.size + 1] = half
    full[half.size + 1 :] = half[::-1]
    values = np.fft.fftshift(np.fft.ifft(full).real)
    return CorrelationTrace(taus=taus, values=values)


def lowpass_filter(trace: CorrelationTrace, cutoff: float = DEFAULT_CUTOFF) -> CorrelationTrace:
    """Zero every Fourier component above ``cutoff`` (rad/s)."""
    if not cutoff > 0:
        raise ValueError("cutoff must be > 0")
    step = uniform_step(trace.taus)
    x = np.fft.fft(trace.values)
    w = TWO_PI * np.fft.fftfreq(trace.values.size, step)
    x[np.abs(w) > cutoff] = 0.0
    return CorrelationTrace(
        taus=trace.taus.copy(),
        values=np.fft.ifft(x).real,
        delta_x=trace.delta_x,
        metadata={**trace.metadata, "lowpass_hz": cutoff / TWO_PI},
    )


def peak_peak(trace) -> float:
    values = np.asarray(getattr(trace, "values", trace), dtype=float)
    if values.size == 0:
        raise ValueError("empty trace")
    return float(values.max() - values.min())


def spectral_peaks(spec: Spectrum, rel_prominence: float = 1e-3) -> np.ndarray:
    """Angular frequencies of local maxima with prominence above a fraction of the max."""
    psd = spec.psd
    idx, _ = find_peaks(psd, prominence=rel_prominence * np.max(np.abs(psd)))
    return spec.omegas[idx]


@dataclass
class PhotonNumber:
    omegas: np.ndarray
    n_mean: np.ndarray
    valid: np.ndarray


def extract_photon_number(spec_hot: Spectrum, spec_cold: Spectrum,
                          floor_rel: float = 1e-3) -> PhotonNumber:
    """n(W) = (S_hot / S_cold - 1) / 2 wherever the cold spectrum is above the floor.

    Bins at or below ``floor_rel * max(S_cold)`` are flagged invalid and hold nan.
    """
    if spec_hot.omegas.shape != spec_cold.omegas.shape or not np.allclose(
        spec_hot.omegas, spec_cold.omegas, rtol=1e-12
    ):
        raise GridMismatchError("hot and cold spectra are on different frequency grids")
    floor = floor_rel * np.max(spec_cold.psd)
    valid = spec_cold.psd > floor
    n = np.full(spec_cold.psd.shape, np.nan)
    n[valid] = 0.5 * (spec_hot.psd[valid] / spec_cold.psd[valid] - 1.0)
    return PhotonNumber(omegas=spec_cold.omegas.copy(), n_mean=n, valid=valid)
