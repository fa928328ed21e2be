from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.constants import hbar, k as k_B
from scipy.special import j0

from vacuum_eos import correlation as corr
from vacuum_eos.correlation import (
    CorrelationTrace,
    FrequencyGrid,
    GridMismatchError,
    Spectrum,
    ThermalState,
    TransverseGrid,
    bose_einstein,
    calibrate_k_cal,
    delay_grid,
    extract_photon_number,
    g1_spatial,
    g1_temporal,
    inverse_power_spectrum,
    lateral_coherence_length,
    lowpass_filter,
    peak_peak,
    power_spectrum,
    spatial_scan,
    spectral_peaks,
    transverse_kernel,
)
from vacuum_eos.optics import TWO_PI, responsivity
from vacuum_eos.simulate import build_setup


@pytest.fixture(scope="module")
def vac(cfg4):
    return build_setup(cfg4)


@pytest.fixture(scope="module")
def hot(cfg300):
    return build_setup(cfg300)


# --- occupation -------------------------------------------------------------

def test_bose_einstein_values():
    w = TWO_PI * 1e12
    assert bose_einstein(w, 300.0) == pytest.approx(5.7643, abs=1e-4)
    assert bose_einstein(w, 4.0) == pytest.approx(6.2e-6, rel=0.05)
    assert bose_einstein(w, 0.0) == 0.0
    x = hbar * w / (k_B * 45.0)
    assert bose_einstein(w, 45.0) == pytest.approx(1 / (np.exp(x) - 1), rel=1e-14)


def test_bose_einstein_rejects_bad_input():
    with pytest.raises(ValueError):
        bose_einstein(0.0, 300.0)
    with pytest.raises(ValueError):
        bose_einstein(1e12, -1.0)


@given(f1=st.floats(0.01e12, 10e12), f2=st.floats(0.01e12, 10e12), t=st.floats(1.0, 1000.0))
def test_bose_einstein_decreases_in_frequency(f1, f2, t):
    lo, hi = sorted((f1, f2))
    if hi > lo * (1 + 1e-9):
        assert bose_einstein(TWO_PI * lo, t) > bose_einstein(TWO_PI * hi, t)


@given(t1=st.floats(1.0, 1000.0), t2=st.floats(1.0, 1000.0), f=st.floats(0.05e12, 5e12))
def test_bose_einstein_increases_in_temperature(t1, t2, f):
    lo, hi = sorted((t1, t2))
    if hi > lo * (1 + 1e-9):
        assert bose_einstein(TWO_PI * f, lo) < bose_einstein(TWO_PI * f, hi)


def test_vacuum_state_is_empty(vac):
    assert np.all(ThermalState.vacuum().occupation(vac.grid.omegas) == 0)


def test_custom_state_length_checked(vac):
    with pytest.raises(GridMismatchError):
        ThermalState.custom(np.ones(3)).occupation(vac.grid.omegas)


# --- grid ---------------------------------------------------------------------

def test_grid_is_commensurate_with_delays(vac):
    step = vac.taus[1] - vac.taus[0]
    df = vac.grid.omegas[0] / TWO_PI
    assert df == pytest.approx(1 / (vac.taus.size * step), rel=1e-12)
    assert np.allclose(np.diff(vac.grid.omegas), TWO_PI * df, rtol=1e-9)


def test_mode_weight_scales_with_cell(params):
    g1 = FrequencyGrid.uniform(4e12, 0.1e12, params)
    g2 = FrequencyGrid.uniform(4e12, 0.05e12, params)
    # the same frequency carries half the weight on a twice denser grid
    assert g2.mode_weight[1] == pytest.approx(g1.mode_weight[0] / 2, rel=1e-12)


def test_grid_rejects_bad_input(params):
    with pytest.raises(ValueError):
        FrequencyGrid(np.array([2.0, 1.0]), np.array([1.0, 1.0]))
    with pytest.raises(ValueError):
        FrequencyGrid(np.array([1.0, 2.0]), np.array([1.0, -1.0]))


def test_delay_grid_symmetric():
    t = delay_grid()
    assert t.size == 1001
    assert np.array_equal(t, -t[::-1])


# --- temporal correlation -------------------------------------------------------

def test_vacuum_peak_is_calibrated(vac):
    tr = g1_temporal(vac.grid, vac.state, vac.resp, vac.taus, vac.k_cal)
    peak = tr.values[vac.taus.size // 2]
    assert peak == pytest.approx(6.2e-2, rel=1e-12)
    assert np.sqrt(peak) == pytest.approx(0.25, rel=5e-3)


@pytest.mark.parametrize("state", [ThermalState.vacuum(), ThermalState.blackbody(45.0), ThermalState.blackbody(300.0)])
def test_traces_are_exactly_even(vac, state):
    tr = g1_temporal(vac.grid, state, vac.resp, vac.taus, vac.k_cal)
    assert np.array_equal(tr.values, tr.values[::-1])


def test_linearity_in_occupation(vac):
    rng = np.random.default_rng(3)
    n1 = rng.uniform(0, 5, len(vac.grid))
    n2 = rng.uniform(0, 5, len(vac.grid))
    g = lambda st_: g1_temporal(vac.grid, st_, vac.resp, vac.taus, vac.k_cal).values
    lhs = g(ThermalState.custom(n1)) + g(ThermalState.custom(n2)) - g(ThermalState.vacuum())
    rhs = g(ThermalState.custom(n1 + n2))
    assert np.max(np.abs(lhs - rhs)) <= 1e-12 * np.max(np.abs(rhs))


def test_mismatched_responsivity_rejected(vac, params):
    other = responsivity(vac.model, params, vac.grid.omegas[:-1])
    with pytest.raises(GridMismatchError):
        g1_temporal(vac.grid, vac.state, other, vac.taus)


def test_direct_cosine_sum_oracle(vac):
    # independent evaluation of the mode sum at a few delays
    amp = vac.k_cal * vac.grid.mode_weight * vac.resp.abs2
    taus = vac.taus[::97]
    ref = np.array([np.sum(amp * np.cos(vac.grid.omegas * t)) for t in taus])
    got = g1_temporal(vac.grid, vac.state, vac.resp, taus, vac.k_cal).values
    assert np.allclose(got, ref, rtol=0, atol=1e-14)


def test_grid_refinement_converges(cfg4):
    coarse = build_setup(cfg4)
    fine = build_setup(replace(cfg4, grid=replace(cfg4.grid, refine=2)))
    a = g1_temporal(coarse.grid, coarse.state, coarse.resp, coarse.taus, coarse.k_cal).values
    b = g1_temporal(fine.grid, fine.state, fine.resp, fine.taus, coarse.k_cal).values
    # the tau range of interest: where the trace carries signal, within +-3 ps
    roi = np.abs(coarse.taus) <= 3e-12
    assert np.max(np.abs(a - b)[roi]) / np.max(np.abs(a)) < 1e-3


def test_calibration_rejects_empty_response(vac):
    zero = replace(vac.resp, values=np.zeros_like(vac.resp.values))
    with pytest.raises(ValueError):
        calibrate_k_cal(vac.grid, zero)


# --- spectra -------------------------------------------------------------------

def test_spectrum_of_pure_tone():
    taus = delay_grid()
    n, step = taus.size, taus[1] - taus[0]
    k0 = 37
    spec = power_spectrum(CorrelationTrace(taus, 0.7 * np.cos(TWO_PI * k0 / (n * step) * taus)))
    assert spec.psd[k0] == pytest.approx(0.7, rel=1e-12)
    others = np.delete(spec.psd, k0)
    assert np.max(np.abs(others)) < 1e-10


def test_spectrum_reproduces_mode_sum(vac):
    tr = g1_temporal(vac.grid, vac.state, vac.resp, vac.taus, vac.k_cal)
    spec = power_spectrum(tr)
    amp = vac.k_cal * vac.grid.mode_weight * vac.resp.abs2
    assert np.allclose(spec.psd[1 : amp.size + 1], amp, rtol=0, atol=1e-12 * amp.max())


def test_fft_round_trip(hot):
    tr = g1_temporal(hot.grid, hot.state, hot.resp, hot.taus, hot.k_cal)
    back = inverse_power_spectrum(power_spectrum(tr), tr.taus)
    assert np.max(np.abs(back.values - tr.values)) / np.max(np.abs(tr.values)) < 1e-9


def test_spectrum_nonnegative_and_vacuum_bound(vac):
    s_vac = power_spectrum(g1_temporal(vac.grid, vac.state, vac.resp, vac.taus, vac.k_cal))
    s_hot = power_spectrum(g1_temporal(vac.grid, ThermalState.blackbody(45.0), vac.resp, vac.taus, vac.k_cal))
    tol = 1e-10 * s_vac.psd.max()
    assert np.all(s_vac.psd >= -tol)
    assert np.all(s_hot.psd >= s_vac.psd - tol)


def test_vacuum_spectrum_bands(vac):
    spec = power_spectrum(g1_temporal(vac.grid, vac.state, vac.resp, vac.taus, vac.k_cal))
    peaks = spectral_peaks(spec) / TWO_PI / 1e12
    assert any(abs(p - 0.75) <= 0.25 for p in peaks)
    assert any(abs(p - 2.0) <= 0.25 for p in peaks)


def test_power_spectrum_rejects_nonuniform():
    with pytest.raises(ValueError):
        power_spectrum(CorrelationTrace(np.array([-1.0, 0.0, 2.0]), np.zeros(3)))


def test_inverse_spectrum_grid_checked(vac):
    spec = Spectrum(np.arange(5.0), np.ones(5), n_samples=9)
    with pytest.raises(GridMismatchError):
        inverse_power_spectrum(spec, vac.taus)


# --- filter and peak-peak -------------------------------------------------------

def test_lowpass_passband_identity(vac):
    tr = g1_temporal(vac.grid, vac.state, vac.resp, vac.taus, vac.k_cal)
    out = lowpass_filter(tr, TWO_PI * 6e12)
    assert np.max(np.abs(out.values - tr.values)) <= 1e-9 * np.max(np.abs(tr.values))


def test_lowpass_stopband_tone():
    taus = delay_grid()
    n, step = taus.size, taus[1] - taus[0]
    tone = np.cos(TWO_PI * 400 / (n * step) * taus)
    out = lowpass_filter(CorrelationTrace(taus, tone), TWO_PI * 3e12)
    assert np.max(np.abs(out.values)) < 1e-10


def test_lowpass_white_noise_variance():
    taus = delay_grid()
    n, step = taus.size, taus[1] - taus[0]
    freqs = np.abs(np.fft.fftfreq(n, step))
    kept = np.count_nonzero(freqs <= 3e12) / n
    ratios = []
    for seed in range(100):
        x = np.random.default_rng(seed).standard_normal(n)
        y = lowpass_filter(CorrelationTrace(taus, x)).values
        ratios.append(y.var() / x.var())
    assert np.mean(ratios) == pytest.approx(kept, rel=0.05)


def test_lowpass_rejects_bad_cutoff():
    with pytest.raises(ValueError):
        lowpass_filter(CorrelationTrace(delay_grid(), np.zeros(1001)), 0.0)


def test_peak_peak_trivial():
    t = delay_grid()
    assert peak_peak(np.full(5, 3.0)) == 0.0
    assert peak_peak(CorrelationTrace(t, 0.3 * np.cos(TWO_PI * 1e12 * t))) == pytest.approx(0.6)
    with pytest.raises(ValueError):
        peak_peak(np.array([]))


# --- photon number ---------------------------------------------------------------

def test_photon_number_trivial_cases():
    w = np.arange(4.0)
    cold = Spectrum(w, np.array([1.0, 2.0, 1e-9, 4.0]))
    same = extract_photon_number(cold, cold)
    assert np.all(same.n_mean[same.valid] == 0)
    assert not same.valid[2] and np.isnan(same.n_mean[2])
    triple = extract_photon_number(Spectrum(w, 3 * cold.psd), cold)
    assert triple.n_mean[1] == pytest.approx(1.0)


def test_photon_number_grid_mismatch():
    with pytest.raises(GridMismatchError):
        extract_photon_number(Spectrum(np.arange(4.0), np.ones(4)), Spectrum(np.arange(5.0), np.ones(5)))


def test_photon_number_round_trip(vac):
    s_cold = power_spectrum(g1_temporal(vac.grid, vac.state, vac.resp, vac.taus, vac.k_cal))
    s_hot = power_spectrum(g1_temporal(vac.grid, ThermalState.blackbody(45.0), vac.resp, vac.taus, vac.k_cal))
    pn = extract_photon_number(s_hot, s_cold)
    w = pn.omegas[pn.valid]
    assert np.allclose(pn.n_mean[pn.valid], bose_einstein(w, 45.0), rtol=1e-2)
    k = np.argmin(np.abs(pn.omegas - TWO_PI * 1e12))
    assert pn.n_mean[k] == pytest.approx(0.52, rel=0.1)


# --- spatial -----------------------------------------------------------------------

def test_zero_separation_matches_temporal(hot):
    a = g1_temporal(hot.grid, hot.state, hot.resp, hot.taus, hot.k_cal)
    b = g1_spatial(hot.grid, hot.state, hot.resp, hot.params, 0.0, hot.taus, hot.k_cal)
    assert np.array_equal(a.values, b.values)


def test_bare_gaussian_kernel_against_closed_form(hot):
    # without the cone and phase matching the kernel is the 2-D transform of a Gaussian
    grid = replace(hot.grid, cone_limited=False)
    dxs = np.array([0.0, 50e-6, 150e-6, 300e-6])
    kern = transverse_kernel(grid, hot.resp, hot.params, dxs, TransverseGrid(n_k=2001, phase_matched=False))
    w0 = hot.params.probe_waist
    expected = np.exp(-(dxs**2) / (2 * w0**2))
    assert np.allclose(kern, expected[:, None], atol=1e-6)


def test_bare_gaussian_kernel_decays_monotonically(hot):
    grid = replace(hot.grid, cone_limited=False)
    dxs = np.linspace(0, 1.5e-3, 61)
    kern = transverse_kernel(grid, hot.resp, hot.params, dxs, TransverseGrid(phase_matched=False))
    assert np.all(np.diff(kern, axis=0) <= 1e-12)
    assert np.all(kern[-1] < 1e-3)


def test_kernel_quadrature_against_direct_integral(hot):
    j = 12
    om = hot.grid.omegas[j]
    w0 = hot.params.probe_waist
    dx = 200e-6
    kern = transverse_kernel(hot.grid, hot.resp, hot.params, [dx], TransverseGrid(n_k=4001))[0, j]
    from scipy.integrate import quad
    from scipy.constants import c
    kmax = min(8 / w0, om / c)
    k_in = hot.resp.n_real[j] * om / c

    def wt(k):
        pm = corr.phase_matching_factor(hot.resp.delta_k[j] - k * k / (2 * k_in), hot.resp.alpha[j], hot.params.length)
        return k * np.exp(-(k * w0) ** 2 / 2) * abs(pm) ** 2

    num = quad(lambda k: wt(k) * j0(k * dx), 0, kmax, limit=200)[0]
    den = quad(wt, 0, kmax, limit=200)[0]
    assert kern == pytest.approx(num / den, rel=1e-5)


def test_spatial_scan_rejects_negative_separation(hot):
    with pytest.raises(ValueError):
        spatial_scan(hot.grid, hot.state, hot.resp, hot.params, [-1e-6], hot.taus)


def test_lateral_coherence_length_interpolates():
    x = np.array([0.0, 1.0, 2.0, 3.0])
    pp = np.exp(-x / 2.0)
    expected = 1.0 + (np.exp(-1) - pp[1]) / (pp[2] - pp[1])
    assert lateral_coherence_length(x, pp) == pytest.approx(expected)
    assert np.isnan(lateral_coherence_length(x, np.ones(4)))


@settings(max_examples=25, deadline=None)
@given(scale=st.floats(1e-3, 1e3))
def test_coherence_length_is_scale_free(scale):
    x = np.linspace(0, 1e-3, 21)
    pp = np.exp(-((x / 4e-4) ** 2))
    assert lateral_coherence_length(x, scale * pp) == pytest.approx(lateral_coherence_length(x, pp), rel=1e-9)


def test_spectral_peaks_ignores_roundoff_ripple():
    om = TWO_PI * np.linspace(0, 5e12, 501)
    psd = np.exp(-((om / TWO_PI - 1e12) / 0.4e12) ** 2)
    ripple = 1e-12 * np.random.default_rng(3).standard_normal(om.size)
    peaks = spectral_peaks(Spectrum(om, psd + ripple)) / TWO_PI
    assert peaks.size == 1 and peaks[0] == pytest.approx(1e12, abs=1e10)
