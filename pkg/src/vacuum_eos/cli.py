"""``vacuum-eos`` command line: optics, g1, spatial, photons and noise runs from INI configs.

Exit codes: 0 on success, 2 for configuration errors, 3 for numerical
failures such as mismatched grids. Set ``VACUUM_EOS_LOG`` (DEBUG, INFO,
WARNING) for log verbosity on stderr.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import io, svg
from .config import ConfigError, load_config
from .correlation import GridMismatchError, bose_einstein
from .optics import TWO_PI, optics_table
from .simulate import (
    build_setup,
    reference_config,
    run_g1,
    run_noise,
    run_photons,
    run_spatial,
)

log = logging.getLogger("vacuum_eos")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3
THZ = 1e12


def _outdir(args, cfg) -> Path:
    out = Path(args.out) if args.out else Path(cfg.output.directory)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ConfigError("output.directory", f"cannot create {out}: {exc.strerror}") from None
    if not os.access(out, os.W_OK):
        raise ConfigError("output.directory", f"{out} is not writable")
    return out


def cmd_optics(cfg, out: Path, args) -> None:
    s = build_setup(cfg)
    table = optics_table(s.model, s.params, s.grid.omegas)
    io.write_optics(out / "optics.csv", table)
    f = table["omega_hz"] / THZ
    lc = np.where(np.isfinite(table["l_coh_m"]), table["l_coh_m"] * 1e3, np.nan)
    svg.save(out / "optics.svg", [
        svg.Panel("frequency (THz)", "refractive index").add(f, table["n_real"], "Re n")
                                                       .add(f, table["n_imag"], "Im n", dashed=True),
        svg.Panel("frequency (THz)", "coherence length (mm)").add(f, lc, "l_c"),
        svg.Panel("frequency (THz)", "field transmission").add(f, table["t_field"], "t"),
    ])
    print(f"optics: {f.size} frequencies, crystal at {cfg.crystal.temperature_k:g} K -> {out}")


def cmd_g1(cfg, out: Path, args) -> None:
    res = run_g1(cfg)
    io.write_trace(out / "trace.csv", res.raw)
    io.write_trace(out / "trace_filtered.csv", res.filtered)
    io.write_spectrum(out / "spectrum.csv", res.spectrum)
    t_ps = res.raw.taus * 1e12
    band = res.spectrum.omegas / TWO_PI <= cfg.grid.f_max_hz
    svg.save(out / "g1.svg", [
        svg.Panel("delay (ps)", "G1 (V^2/m^2)", title=cfg.state.state().label)
           .add(t_ps, res.raw.values, "raw", dashed=True)
           .add(t_ps, res.filtered.values, f"filtered {cfg.output.cutoff_hz / THZ:g} THz"),
        svg.Panel("frequency (THz)", "spectrum (V^2/m^2)")
           .add(res.spectrum.omegas[band] / TWO_PI / THZ, res.spectrum.psd[band], "Re FFT"),
    ])
    print(f"g1: peak {res.raw.values[res.raw.taus.size // 2]:.6g} V^2/m^2, "
          f"peak-peak {res.peak_peak:.6g} V^2/m^2 -> {out}")


def cmd_spatial(cfg, out: Path, args) -> None:
    results = [run_spatial(cfg)]
    if cfg.spatial.compare:
        other = reference_config(cfg, "spatial.compare", cfg.spatial.compare)
        other = replace(other, spatial=cfg.spatial)
        results.append(run_spatial(other))
    io.write_spatial(out / "spatial.csv", results[0].delta_xs, results[0].peak_peak)
    for r in results[1:]:
        io.write_spatial(out / f"spatial_{r.label.replace(' ', '_')}.csv", r.delta_xs, r.peak_peak)
    panel = svg.Panel("probe separation (um)", "G1 peak-peak (V^2/m^2)")
    for r in results:
        panel.add(r.delta_xs * 1e6, r.peak_peak, r.label)
    svg.save(out / "spatial.svg", [panel])
    for r in results:
        print(f"spatial [{r.label}]: 1/e length {r.coherence_length * 1e6:.1f} um")


def cmd_photons(cfg, out: Path, args) -> None:
    if args.reference:
        cold = load_config(args.reference)
    else:
        cold = reference_config(cfg, "photons.reference", cfg.photons.reference)
    pn = run_photons(cfg, cold)
    io.write_photons(out / "photons.csv", pn)
    f = pn.omegas[pn.valid] / TWO_PI / THZ
    panel = svg.Panel("frequency (THz)", "mean photon number", logy=True).add(f, pn.n_mean[pn.valid], "extracted")
    if cfg.state.kind == "blackbody" and f.size:
        panel.add(f, bose_einstein(pn.omegas[pn.valid], cfg.state.temperature_k),
                  f"Bose-Einstein {cfg.state.temperature_k:g} K", dashed=True)
    svg.save(out / "photons.svg", [panel])
    print(f"photons: {int(pn.valid.sum())} valid of {pn.valid.size} bins -> {out}")


def cmd_noise(cfg, out: Path, args) -> None:
    seed = cfg.seed if args.seed is None else args.seed
    res = run_noise(cfg, seed)
    io.write_allan(out / "allan.csv", res.allan)
    svg.save(out / "allan.svg", [
        svg.Panel("gate time (s)", "Allan deviation (V^2/m^2)", logx=True, logy=True)
           .add(res.allan.gate_times, res.allan.deviations, "demodulated products"),
    ])
    n = cfg.noise
    lines = [
        f"pulses: {res.n_pulses} at {n.f_rep_hz:g} Hz, seed {seed}",
        f"true correlation: {n.true_corr:.6g} V^2/m^2",
        f"estimate: {res.estimate_mean:.6g} +- {res.estimate_stderr:.3g} V^2/m^2",
        f"allan slope: {res.slope:.4f}",
        f"integration time for sigma {n.target_sigma:g} V^2/m^2 at shot sigma {n.shot_sigma:g}: "
        f"{res.integration_time_s:.4g} s",
    ]
    (out / "noise_report.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")
    print("\n".join(lines))


COMMANDS = {
    "optics": (cmd_optics, "refractive index, transmission and coherence length"),
    "g1": (cmd_g1, "field correlation trace, filtered trace and spectrum"),
    "spatial": (cmd_spatial, "peak-peak correlation against probe separation"),
    "photons": (cmd_photons, "photon number from a hot and a cold run"),
    "noise": (cmd_noise, "simulated acquisition, Allan deviation and integration time"),
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="vacuum-eos", description="Electro-optic vacuum field correlation toolkit")
    sub = ap.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="experiment INI file")
        p.add_argument("--out", help="output directory (overrides output.directory)")
        p.add_argument("--seed", type=int, help="unsigned 64-bit seed (overrides experiment.seed)")
        if name == "photons":
            p.add_argument("--reference", help="cold config (overrides photons.reference)")
    return ap


def main(argv=None) -> int:
    level = os.environ.get("VACUUM_EOS_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    func = COMMANDS[args.command][0]
    try:
        if args.seed is not None and not 0 <= args.seed < 2**64:
            raise ConfigError("--seed", "must be an unsigned 64-bit integer")
        cfg = load_config(args.config)
        if args.seed is not None:
            cfg = replace(cfg, seed=args.seed)
        log.info("running %s on %s", args.command, args.config)
        func(cfg, _outdir(args, cfg), args)
    except ConfigError as exc:
        print(f"vacuum-eos {args.command}: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (GridMismatchError, FloatingPointError, ValueError) as exc:
        print(f"vacuum-eos {args.command}: numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
