"""Run every shipped scenario through the CLI and print the headline numbers.

    python3 scripts/reproduce_figures.py --out figures
"""

import argparse
from pathlib import Path

from vacuum_eos.cli import main as cli
from vacuum_eos.config import packaged_config
from vacuum_eos.simulate import scenario_metrics

CONFIGS = Path(__file__).resolve().parents[1] / "src" / "vacuum_eos" / "configs"

RUNS = [
    ("optics", "thermal_300k", "optics_300k"),
    ("optics", "vacuum_4k", "optics_4k"),
    ("g1", "thermal_300k", "g1_300k"),
    ("g1", "vacuum_4k", "g1_4k"),
    ("g1", "radiation_45k", "g1_45k"),
    ("spatial", "spatial_scan", "spatial"),
    ("photons", "radiation_45k", "photons"),
    ("noise", "noise", "noise"),
]


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="figures")
    args = ap.parse_args(argv)
    out = Path(args.out)
    for cmd, cfg, sub in RUNS:
        code = cli([cmd, "--config", str(CONFIGS / f"{cfg}.ini"), "--out", str(out / sub)])
        if code:
            raise SystemExit(code)

    m = scenario_metrics(packaged_config("thermal_300k"))
    print()
    print(f"vacuum peak          {m['peak_vac']:.4g} V^2/m^2")
    print(f"peak-peak 4 K        {m['pp_vac']:.4g} V^2/m^2")
    print(f"peak-peak 300 K      {m['pp_t300']:.4g} V^2/m^2")
    print(f"peak-peak 45 K       {m['pp_rad45']:.4g} V^2/m^2")
    print(f"ratio 300 K / 4 K    {m['ratio']:.3g}")
    print(f"spectral maxima      {', '.join(f'{f:.2f}' for f in m['maxima_thz'])} THz")
    print(f"coherence length     300 K {m['lc_t300'] * 1e6:.0f} um, 4 K {m['lc_vac'] * 1e6:.0f} um")


if __name__ == "__main__":
    main()
