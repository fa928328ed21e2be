"""Fit the default ZnTe-like Lorentz block and probe group index to the headline observables.

Free parameters: eps_inf, oscillator strength, TO frequency, NIR group index and
the two damping anchors (log10 of Hz / 1e12). The objective keeps each headline
observable inside a window shrunk 40 % toward its target, the spectral maxima
near 0.75 and 2 THz, the 2 THz band clearly resolved, and Re n(1 THz) in
[3.12, 3.28].

    python3 scripts/fit_defaults.py --seed 1 --maxiter 40
"""

import argparse
from dataclasses import replace

import numpy as np
from scipy.optimize import differential_evolution
from scipy.signal import find_peaks

from vacuum_eos.config import MaterialSpec, StateSpec, packaged_config
from vacuum_eos.optics import TWO_PI, thz_refractive_index
from vacuum_eos.simulate import build_setup, run_g1, scenario_metrics, with_state

TARGETS = {
    "ratio": (11.7, 0.30),
    "pp_rad45": (0.14, 0.30),
    "lc_t300": (410e-6, 0.25),
    "lc_vac": (375e-6, 0.25),
}
BANDS_THZ = (0.75, 2.0)
BOUNDS = [(6.0, 9.0), (1.5, 4.0), (5.0, 6.5), (3.0, 3.4), (-1.0, 0.3), (-1.0, 0.5)]


def make_config(base, x):
    eps_inf, s, f_to, ng, lg10, lg300 = x
    mat = MaterialSpec(float(eps_inf), float(f_to) * 1e12, float(s),
                       10.0 ** float(lg10) * 1e12, 10.0 ** float(lg300) * 1e12)
    return replace(base, materials={base.crystal.material: mat},
                   crystal=replace(base.crystal, ng_nir=float(ng)))


def band_prominence(cfg):
    """Prominence of the vacuum spectral maximum nearest 2 THz relative to the global max."""
    vac = with_state(cfg, StateSpec("vacuum"), 4.0)
    spec = run_g1(vac, build_setup(vac)).spectrum
    idx, props = find_peaks(spec.psd, prominence=0)
    f = spec.omegas[idx] / TWO_PI / 1e12
    if f.size == 0:
        return 0.0
    j = np.argmin(np.abs(f - BANDS_THZ[1]))
    if abs(f[j] - BANDS_THZ[1]) > 0.25:
        return 0.0
    return float(props["prominences"][j] / spec.psd.max())


def objective(x, base):
    try:
        cfg = make_config(base, x)
        m = scenario_metrics(cfg)
    except (ValueError, ZeroDivisionError):
        return 1e3
    score = 0.0
    maxima = list(m["maxima_thz"]) + [99.0]
    for band in BANDS_THZ:
        d = min(abs(f - band) for f in maxima)
        score += 10.0 * max(0.0, d - 0.12) ** 2 * 100
    for key, (target, tol) in TARGETS.items():
        v = m[key]
        if not np.isfinite(v) or v <= 0:
            score += 10.0
            continue
        lo, hi = target * (1 - 0.6 * tol), target * (1 + 0.6 * tol)
        score += 10.0 * (max(0.0, np.log(lo / v)) ** 2 + max(0.0, np.log(v / hi)) ** 2)
        score += 0.1 * np.log(v / target) ** 2
    n1 = float(np.real(thz_refractive_index(cfg.material_model(300.0), TWO_PI * 1e12)))
    score += 100.0 * (max(0.0, 3.12 - n1) ** 2 + max(0.0, n1 - 3.28) ** 2)
    prom = band_prominence(cfg)
    score += 10.0 * max(0.0, 0.01 - prom) ** 2 * 1e4
    return score


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--maxiter", type=int, default=40)
    ap.add_argument("--popsize", type=int, default=12)
    ap.add_argument("--base", default="thermal_300k", help="packaged config supplying the fixed settings")
    args = ap.parse_args(argv)

    base = packaged_config(args.base)
    res = differential_evolution(objective, BOUNDS, args=(base,), seed=args.seed,
                                 maxiter=args.maxiter, popsize=args.popsize, tol=1e-8, polish=True)
    cfg = make_config(base, res.x)
    m = scenario_metrics(cfg)
    mat = cfg.materials[cfg.crystal.material]
    print(f"objective {res.fun:.4g}")
    print(f"eps_inf = {mat.eps_inf!r}\nphonon_freq_to_hz = {mat.phonon_freq_to_hz!r}\n"
          f"oscillator_strength = {mat.oscillator_strength!r}\n"
          f"damping_10k_hz = {mat.damping_10k_hz!r}\ndamping_300k_hz = {mat.damping_300k_hz!r}\n"
          f"ng_nir = {cfg.crystal.ng_nir!r}")
    for k, v in m.items():
        print(f"{k}: {v}")
    print("band prominence", band_prominence(cfg))
    print("Re n(1 THz, 300 K)", np.real(thz_refractive_index(cfg.material_model(300.0), TWO_PI * 1e12)))


if __name__ == "__main__":
    main()
