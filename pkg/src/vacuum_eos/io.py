"""CSV export and import for the objects the commands write.

Floats are written with ``repr`` so every file reads back to the identical
value; an unbounded coherence length is written as ``inf`` and an invalid
photon-number bin as an empty field.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .acquisition import AllanCurve, PulseTrainRecord
from .correlation import TWO_PI, CorrelationTrace, PhotonNumber, Spectrum

OPTICS_COLUMNS = ("omega_hz", "n_real", "n_imag", "alpha_per_m", "t_field", "l_coh_m", "r_abs", "r_arg")


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    v = float(v)
    if np.isnan(v):
        return ""
    if np.isinf(v):
        return "inf" if v > 0 else "-inf"
    return repr(v)


def write_csv(path, header, columns) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    rows = zip(*columns)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])
    return path


def read_csv(path) -> dict:
    """Columns of a CSV as float arrays; empty fields become nan."""
    with Path(path).open(newline="", encoding="utf-8") as fh:
        r = csv.reader(fh)
        header = next(r)
        rows = list(r)
    cols = {}
    for i, name in enumerate(header):
        cols[name] = np.array([float(row[i]) if row[i] else np.nan for row in rows])
    return cols


def write_optics(path, table: dict) -> Path:
    return write_csv(path, OPTICS_COLUMNS, [table[k] for k in OPTICS_COLUMNS])


def write_trace(path, trace: CorrelationTrace) -> Path:
    dx = np.full(trace.taus.shape, trace.delta_x)
    return write_csv(path, ("tau_s", "delta_x_m", "g1_v2_per_m2"), [trace.taus, dx, trace.values])


def read_trace(path) -> CorrelationTrace:
    c = read_csv(path)
    dx = float(c["delta_x_m"][0]) if c["delta_x_m"].size else 0.0
    return CorrelationTrace(taus=c["tau_s"], values=c["g1_v2_per_m2"], delta_x=dx)


def write_spectrum(path, spec: Spectrum) -> Path:
    return write_csv(path, ("omega_hz", "psd"), [spec.omegas / TWO_PI, spec.psd])


def read_spectrum(path, n_samples: int = 0) -> Spectrum:
    c = read_csv(path)
    return Spectrum(omegas=c["omega_hz"] * TWO_PI, psd=c["psd"], n_samples=n_samples)


def write_photons(path, pn: PhotonNumber) -> Path:
    return write_csv(path, ("omega_hz", "n_mean", "valid"), [pn.omegas / TWO_PI, pn.n_mean, pn.valid])


def read_photons(path) -> PhotonNumber:
    c = read_csv(path)
    return PhotonNumber(omegas=c["omega_hz"] * TWO_PI, n_mean=c["n_mean"], valid=c["valid"].astype(bool))


def write_pulses(path, rec: PulseTrainRecord) -> Path:
    return write_csv(path, ("pulse_index", "ch1", "ch2"), [np.arange(rec.n_pulses), rec.ch1, rec.ch2])


def read_pulses(path, f_rep: float) -> PulseTrainRecord:
    c = read_csv(path)
    return PulseTrainRecord(ch1=c["ch1"], ch2=c["ch2"], f_rep=f_rep)


def write_allan(path, curve: AllanCurve) -> Path:
    return write_csv(path, ("gate_s", "adev"), [curve.gate_times, curve.deviations])


def read_allan(path) -> AllanCurve:
    c = read_csv(path)
    return AllanCurve(gate_times=c["gate_s"], deviations=c["adev"])


def write_spatial(path, delta_xs, pp) -> Path:
    return write_csv(path, ("delta_x_m", "g1_pp"), [delta_xs, pp])
