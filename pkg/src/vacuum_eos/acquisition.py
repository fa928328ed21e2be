"""Stochastic acquisition chain: pulse trains, half-rate demodulation, Allan analysis.

Units follow the correlation: ``shot_sigma`` is the standard deviation of a
single pulse-pair product in V^2/m^2, so each channel carries Gaussian field
noise of standard deviation ``sqrt(shot_sigma)`` V/m per pulse. The same
convention holds for ``drift_amplitude``.

Demodulation subtracts adjacent pulses and divides by sqrt(2), which keeps the
variance of white noise unchanged. For signals that are uncorrelated from one
pulse to the next, the mean of the demodulated products is then an unbiased
estimate of the same-pulse cross-correlation; the cross terms between a pulse
and its neighbour average to zero.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.signal import lfilter, lfilter_zi

F_REP = 80e6


@dataclass(frozen=True)
class NoiseModel:
    shot_sigma: float = 0.0
    drift_amplitude: float = 0.0
    drift_knee_hz: float = 1e3
    seed: int = 0

    def __post_init__(self):
        if self.shot_sigma < 0 or self.drift_amplitude < 0:
            raise ValueError("noise amplitudes must be >= 0")
        if self.drift_knee_hz <= 0:
            raise ValueError("drift_knee_hz must be > 0")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must fit in an unsigned 64-bit integer")


@dataclass
class PulseTrainRecord:
    ch1: np.ndarray
    ch2: np.ndarray
    f_rep: float = F_REP
    noise: NoiseModel | None = None

    def __post_init__(self):
        self.ch1 = np.asarray(self.ch1, dtype=float)
        self.ch2 = np.asarray(self.ch2, dtype=float)
        if self.ch1.shape != self.ch2.shape or self.ch1.ndim != 1:
            raise ValueError("channels must be 1-D arrays of equal length")

    @property
    def n_pulses(self) -> int:
        return self.ch1.size

    @property
    def timestamps(self) -> np.ndarray:
        return np.arange(self.n_pulses) / self.f_rep


@dataclass(frozen=True)
class CorrelationEstimate:
    mean: float
    stderr: float
    n: int


@dataclass
class AllanCurve:
    gate_times: np.ndarray
    deviations: np.ndarray


def _streams(seed: int, stream: int):
    ss = np.random.SeedSequence([int(seed), int(stream)])
    return [np.random.default_rng(s) for s in ss.spawn(3)]


def _correlated_pair(rng, m, var, corr):
    # random-sign carrier of fixed size: products of the shared part are exactly corr
    shared = abs(corr)
    carrier = rng.choice(np.array([-1.0, 1.0]), size=m) * np.sqrt(shared)
    rest = np.sqrt(var - shared)
    a = carrier + rest * rng.standard_normal(m)
    b = np.copysign(1.0, corr) * carrier + rest * rng.standard_normal(m)
    return a, b


def _interleave(even, odd):
    out = np.empty(even.size * 2)
    out[0::2] = even
    out[1::2] = odd
    return out


def drift_series(rng, n: int, amplitude: float, knee_hz: float, f_rep: float) -> np.ndarray:
    """Random walk through a one-pole low-pass at ``knee_hz``, zero mean, rms sqrt(amplitude)."""
    if amplitude == 0:
        return np.zeros(n)
    walk = np.cumsum(rng.standard_normal(n))
    a = -np.expm1(-2.0 * np.pi * knee_hz / f_rep)
    b_coef, a_coef = [a], [1.0, a - 1.0]
    smooth, _ = lfilter(b_coef, a_coef, walk, zi=lfilter_zi(b_coef, a_coef) * walk[0])
    smooth = smooth - smooth.mean()
    rms = smooth.std()
    if rms == 0:
        return np.zeros(n)
    return smooth * (np.sqrt(amplitude) / rms)


def synthesize_pulse_train(true_corr: float, noise: NoiseModel, n_pulses: int,
                           f_rep: float = F_REP, signal_var: float | None = None,
                           stream: int = 0) -> PulseTrainRecord:
    """Two-channel pulse train whose same-pulse cross-covariance is ``true_corr``.

    The signal is built per pulse pair from a difference part and a common
    part with equal second moments, so adjacent pulses are uncorrelated.
    Independent shot noise goes on each channel and one slow drift is shared
    by both. ``stream`` selects an independent random stream for the same seed.
    """
    if n_pulses < 2 or n_pulses % 2:
        raise ValueError("n_pulses must be even and >= 2")
    var = abs(true_corr) if signal_var is None else float(signal_var)
    if var < abs(true_corr):
        raise ValueError("signal variance cannot be smaller than |true_corr|")
    m = n_pulses // 2
    rng_sig, rng_shot, rng_drift = _streams(noise.seed, stream)

    u1, u2 = _correlated_pair(rng_sig, m, var, true_corr)
    c1, c2 = _correlated_pair(rng_sig, m, var, true_corr)
    ch1 = _interleave((c1 + u1) / np.sqrt(2.0), (c1 - u1) / np.sqrt(2.0))
    ch2 = _interleave((c2 + u2) / np.sqrt(2.0), (c2 - u2) / np.sqrt(2.0))

    if noise.shot_sigma > 0:
        s = np.sqrt(noise.shot_sigma)
        ch1 = ch1 + s * rng_shot.standard_normal(n_pulses)
        ch2 = ch2 + s * rng_shot.standard_normal(n_pulses)
    d = drift_series(rng_drift, n_pulses, noise.drift_amplitude, noise.drift_knee_hz, f_rep)
    return PulseTrainRecord(ch1=ch1 + d, ch2=ch2 + d, f_rep=f_rep, noise=noise)


def demodulate_half_rep(record: PulseTrainRecord):
    """Adjacent-pulse differences (ch[2k] - ch[2k+1]) / sqrt(2) for both channels."""
    if record.n_pulses % 2:
        raise ValueError("demodulation needs an even number of pulses")
    r2 = np.sqrt(2.0)
    return (
        (record.ch1[0::2] - record.ch1[1::2]) / r2,
        (record.ch2[0::2] - record.ch2[1::2]) / r2,
    )


def _mean_and_stderr(products) -> CorrelationEstimate:
    n = products.size
    stderr = products.std(ddof=1) / np.sqrt(n) if n > 1 else 0.0
    return CorrelationEstimate(float(products.mean()), float(stderr), n)


def estimate_correlation(record: PulseTrainRecord) -> CorrelationEstimate:
    d1, d2 = demodulate_half_rep(record)
    return _mean_and_stderr(d1 * d2)


def estimate_correlation_direct(record: PulseTrainRecord) -> CorrelationEstimate:
    """Same-pulse products without demodulation; drift passes straight through."""
    return _mean_and_stderr(record.ch1 * record.ch2)


def cross_terms(record: PulseTrainRecord):
    """Neighbour-pulse products ch1[2k]*ch2[2k+1] and ch1[2k+1]*ch2[2k]."""
    if record.n_pulses % 2:
        raise ValueError("need an even number of pulses")
    return (
        _mean_and_stderr(record.ch1[0::2] * record.ch2[1::2]),
        _mean_and_stderr(record.ch1[1::2] * record.ch2[0::2]),
    )


def demodulated_products(record: PulseTrainRecord) -> np.ndarray:
    d1, d2 = demodulate_half_rep(record)
    return d1 * d2


def allan_deviation(series, f_sample: float, gate_times) -> AllanCurve:
    """Non-overlapping two-sample deviation of ``series`` at each gate time (>= 2 samples)."""
    series = np.asarray(series, dtype=float)
    gate_times = np.asarray(gate_times, dtype=float)
    if np.any(np.diff(gate_times) <= 0):
        raise ValueError("gate times must be strictly increasing")
    devs = []
    for gate in gate_times:
        m_float = gate * f_sample
        m = int(round(m_float))
        if abs(m_float - m) > 1e-6 * max(m, 1):
            raise ValueError(f"gate {gate!r} s is not a whole number of samples")
        if m < 2:
            raise ValueError(f"gate {gate!r} s is shorter than two samples")
        if 2 * m > series.size:
            raise ValueError(f"gate {gate!r} s exceeds half the series length")
        k = series.size // m
        bins = series[: k * m].reshape(k, m).mean(axis=1)
        devs.append(np.sqrt(0.5 * np.mean(np.diff(bins) ** 2)))
    return AllanCurve(gate_times=gate_times, deviations=np.asarray(devs))


def default_gate_times(n_samples: int, f_sample: float, min_bins: int = 8) -> np.ndarray:
    """Powers of two from 2 samples up, keeping at least ``min_bins`` bins at the longest gate."""
    m = 2 ** np.arange(1, int(np.log2(max(n_samples // min_bins, 2))) + 1)
    return m / f_sample


def allan_slope(curve: AllanCurve) -> float:
    """Least-squares slope of log(adev) against log(gate)."""
    ok = curve.deviations > 0
    if ok.sum() < 2:
        return float("nan")
    return float(np.polyfit(np.log(curve.gate_times[ok]), np.log(curve.deviations[ok]), 1)[0])


def integration_time_for_sigma(shot_sigma: float, target_sigma: float, f_rep: float = F_REP) -> float:
    """Seconds of demodulated averaging that bring ``shot_sigma`` down to ``target_sigma``.

    Pairs arrive at f_rep / 2; the answer never drops below one pair, 2 / f_rep.
    """
    if shot_sigma <= 0 or target_sigma <= 0 or f_rep <= 0:
        raise ValueError("inputs must be positive")
    if target_sigma >= shot_sigma:
        return 2.0 / f_rep
    return (shot_sigma / target_sigma) ** 2 / (f_rep / 2.0)


def measure_delays(true_values, noise: NoiseModel, n_pulses: int, f_rep: float = F_REP,
                   workers: int = 1):
    """One record per delay, each on stream (seed, delay index); returns (means, stderrs).

    Results do not depend on ``workers``.
    """
    true_values = np.asarray(true_values, dtype=float)

    def one(i):
        rec = synthesize_pulse_train(true_values[i], noise, n_pulses, f_rep, stream=i)
        return estimate_correlation(rec)

    idx = range(true_values.size)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            est = list(pool.map(one, idx))
    else:
        est = [one(i) for i in idx]
    return np.array([e.mean for e in est]), np.array([e.stderr for e in est])
