"""Linear THz response of the electro-optic detection crystal.

A single Lorentz oscillator (the TO phonon) gives the complex THz index.
From it follow the field transmission of the slab, the coherence length
against the optical probe's group velocity, and the complex responsivity
R(Omega) that weights each THz mode in the correlation sum.

All frequencies are angular (rad/s) unless a name ends in ``_hz``.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np
from scipy.constants import c

TWO_PI = 2.0 * np.pi

# Mismatch below which the coherence length is reported as unbounded.
DEFAULT_MISMATCH_EPS = 1e-9


@dataclass(frozen=True)
class DispersionModel:
    """Single-oscillator Lorentz permittivity with a temperature-dependent damping.

    eps(W) = eps_inf + S * w_TO**2 / (w_TO**2 - W**2 - i*gamma(T)*W)

    The damping is linearly interpolated between its 10 K and 300 K values
    and clamped outside that range.
    """

    eps_inf: float
    phonon_freq_to: float
    oscillator_strength: float
    damping_10k: float
    damping_300k: float
    temperature: float = 300.0
    name: str = "custom"

    def __post_init__(self):
        if self.eps_inf < 1.0:
            raise ValueError(f"eps_inf must be >= 1, got {self.eps_inf}")
        if self.phonon_freq_to <= 0:
            raise ValueError("phonon_freq_to must be positive")
        if self.oscillator_strength < 0:
            raise ValueError("oscillator_strength must be non-negative")
        if self.damping_10k < 0 or self.damping_300k < 0:
            raise ValueError("damping values must be non-negative")
        if self.temperature < 0:
            raise ValueError("temperature must be non-negative")

    @property
    def damping(self) -> float:
        t = min(max(self.temperature, 10.0), 300.0)
        return self.damping_10k + (self.damping_300k - self.damping_10k) * (t - 10.0) / 290.0

    def at_temperature(self, temperature: float) -> "DispersionModel":
        return replace(self, temperature=float(temperature))

    def permittivity(self, omega):
        omega = np.asarray(omega, dtype=float)
        wt2 = self.phonon_freq_to**2
        return self.eps_inf + self.oscillator_strength * wt2 / (
            wt2 - omega**2 - 1j * self.damping * omega
        )


@dataclass(frozen=True)
class CrystalParams:
    """Geometry and probe constants of the detection crystal (SI units)."""

    length: float = 3e-3
    eo_coefficient_r41: float = 4.0e-12
    refr_index_nir: float = 2.85
    group_index_nir: float = 3.215
    probe_freq: float = TWO_PI * 375e12
    probe_intensity: float = 1.0e13
    probe_duration: float = 80e-15
    probe_waist: float = 125e-6
    epsilon_r: float = 9.8
    include_exit_facet: bool = False
    include_envelope: bool = True
    mismatch_eps: float = DEFAULT_MISMATCH_EPS

    def __post_init__(self):
        for name in ("length", "probe_waist", "probe_duration"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        for name in ("refr_index_nir", "group_index_nir", "epsilon_r"):
            if getattr(self, name) < 1.0:
                raise ValueError(f"{name} must be >= 1")

    @property
    def probe_sigma_t(self) -> float:
        """RMS width (s) of the Gaussian probe intensity envelope."""
        return self.probe_duration / (2.0 * np.sqrt(2.0 * np.log(2.0)))


@dataclass(frozen=True)
class Responsivity:
    """R(W) on a grid, plus the phase-matching inputs the transverse model reuses."""

    omegas: np.ndarray
    values: np.ndarray = field(repr=False)
    delta_k: np.ndarray | None = field(default=None, repr=False)
    alpha: np.ndarray | None = field(default=None, repr=False)
    n_real: np.ndarray | None = field(default=None, repr=False)
    length: float = 0.0

    @property
    def abs2(self) -> np.ndarray:
        return np.abs(self.values) ** 2


def _positive(omega) -> np.ndarray:
    omega = np.asarray(omega, dtype=float)
    if np.any(~(omega > 0)):
        raise ValueError("angular frequency must be > 0")
    return omega


def thz_refractive_index(model: DispersionModel, omega):
    """Complex THz index sqrt(eps) on the branch with Re >= 0 and Im >= 0."""
    omega = _positive(omega)
    n = np.sqrt(model.permittivity(omega))
    # principal sqrt already has Re >= 0; a passive eps keeps Im >= 0 there
    n = np.where(n.imag < 0, -n, n)
    return n[()] if n.ndim == 0 else n


def absorption_coefficient(model: DispersionModel, omega):
    """Intensity absorption coefficient alpha = 2 W Im(n) / c in 1/m."""
    omega = _positive(omega)
    return 2.0 * omega * np.imag(thz_refractive_index(model, omega)) / c


def fresnel_entry(n):
    return 2.0 / (n + 1.0)


def fresnel_exit(n):
    return 2.0 * n / (n + 1.0)


def field_transmission(model: DispersionModel, params: CrystalParams, omega):
    """Single-pass field transmission of the uncoated slab, etalon ignored."""
    omega = _positive(omega)
    n = np.real(thz_refractive_index(model, omega))
    alpha = absorption_coefficient(model, omega)
    t = fresnel_entry(n) * fresnel_exit(n) * np.exp(-alpha * params.length / 2.0)
    return t


def index_mismatch(model: DispersionModel, params: CrystalParams, omega):
    return np.real(thz_refractive_index(model, omega)) - params.group_index_nir


def coherence_length(model: DispersionModel, params: CrystalParams, omega):
    """pi*c / (W*|Re n(W) - n_g|) in metres; ``inf`` where the mismatch vanishes."""
    omega = _positive(omega)
    dn = np.abs(index_mismatch(model, params, omega))
    with np.errstate(divide="ignore"):
        lc = np.where(dn < params.mismatch_eps, np.inf, np.pi * c / (omega * np.maximum(dn, 1e-300)))
    return lc[()] if lc.ndim == 0 else lc


def phase_matching_factor(delta_k, alpha, length):
    """Closed form of (1/l) * int_0^l exp(i*dk*z - alpha*z/2) dz."""
    a = (1j * np.asarray(delta_k, dtype=float) - np.asarray(alpha, dtype=float) / 2.0) * length
    a = np.asarray(a, dtype=complex)
    small = np.abs(a) < 1e-6
    safe = np.where(small, 1.0, a)
    out = np.where(small, 1.0 + a / 2.0 + a * a / 6.0, np.expm1(safe) / safe)
    return out[()] if out.ndim == 0 else out


def probe_envelope(params: CrystalParams, omega):
    """Gaussian probe filter exp(-W^2 sigma_t^2), sigma_t from the intensity FWHM."""
    omega = np.asarray(omega, dtype=float)
    return np.exp(-(omega**2) * params.probe_sigma_t**2)


def responsivity(model: DispersionModel, params: CrystalParams, omegas) -> Responsivity:
    """Complex responsivity R(W) = t_in * envelope * phase-matching factor.

    ``omegas`` must be strictly increasing and positive. The exit facet and the
    probe envelope are switched by ``params.include_exit_facet`` and
    ``params.include_envelope``.
    """
    omegas = np.asarray(getattr(omegas, "omegas", omegas), dtype=float)
    if omegas.ndim != 1 or omegas.size == 0:
        raise ValueError("responsivity needs a non-empty 1-D frequency grid")
    if np.any(np.diff(omegas) <= 0):
        raise ValueError("frequency grid must be strictly increasing")
    _positive(omegas)

    n = np.real(thz_refractive_index(model, omegas))
    alpha = absorption_coefficient(model, omegas)
    dk = omegas * (n - params.group_index_nir) / c
    r = fresnel_entry(n) * phase_matching_factor(dk, alpha, params.length)
    if params.include_exit_facet:
        r = r * fresnel_exit(n)
    if params.include_envelope:
        r = r * probe_envelope(params, omegas)
    return Responsivity(
        omegas=omegas,
        values=np.asarray(r, dtype=complex),
        delta_k=dk,
        alpha=alpha,
        n_real=n,
        length=params.length,
    )


def eo_prefactor(params: CrystalParams) -> float:
    """|sqrt(C)| = r41 n^3 l w_p I_p / c, the scale converting field to EO signal."""
    return (
        params.eo_coefficient_r41
        * params.refr_index_nir**3
        * params.length
        * params.probe_freq
        * params.probe_intensity
        / c
    )


def optics_table(model: DispersionModel, params: CrystalParams, omegas) -> dict:
    """All per-frequency optical quantities, keyed by the export column names."""
    omegas = _positive(omegas)
    n = thz_refractive_index(model, omegas)
    r = responsivity(model, params, omegas).values
    return {
        "omega_hz": omegas / TWO_PI,
        "n_real": np.real(n),
        "n_imag": np.imag(n),
        "alpha_per_m": absorption_coefficient(model, omegas),
        "t_field": field_transmission(model, params, omegas),
        "l_coh_m": coherence_length(model, params, omegas),
        "r_abs": np.abs(r),
        "r_arg": np.angle(r),
    }
