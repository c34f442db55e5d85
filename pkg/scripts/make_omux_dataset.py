"""Regenerate the shipped wideband OMUX characteristic.

The measured DVB-S2x OMUX is not public, so the package ships a synthetic
stand-in: the lowpass-equivalent response of a 6th-order Chebyshev-I filter
(0.1 dB ripple, 260 MHz band edge) sampled every 2.5 MHz over +-750 MHz.
Gain and group delay are referenced to their values at the band center.

    python3 scripts/make_omux_dataset.py [--out PATH]
"""
import argparse
from pathlib import Path

from carrier_forge.omux import DEFAULT_DATASET, chebyshev_characteristic, fit_slopes, write_characteristic

ORDER, RIPPLE_DB, EDGE_MHZ = 6, 0.1, 260.0


def main():
    default = Path(__file__).resolve().parents[1] / "src" / "carrier_forge" / "data" / DEFAULT_DATASET
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=default)
    args = ap.parse_args()
    char = chebyshev_characteristic(ORDER, RIPPLE_DB, EDGE_MHZ, span_mhz=750.0, step_mhz=2.5)
    write_characteristic(char, args.out)
    s = fit_slopes(char, -150.0, 200.0)
    print(f"wrote {args.out} ({char.freq_mhz.size} points)")
    print(f"slopes at -150 MHz / 200 MHz: g = {s.g:.9g} dB/MHz, d = {s.d:.9g} ns/MHz")


if __name__ == "__main__":
    main()
