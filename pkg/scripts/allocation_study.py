"""Max-min allocation of a scenario in theory and simulation, with per-carrier accuracy.

    python3 scripts/allocation_study.py [--scenario FILE] [--p-db -15]

Without --scenario the shipped three-carrier scenario is used.
"""
import argparse
from dataclasses import replace
from importlib import resources

from carrier_forge import load_scenario, solve_maxmin
from carrier_forge.cir import accuracy_pct


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--scenario", default=None)
    ap.add_argument("--p-db", type=float, default=None)
    ap.add_argument("--seeds", type=int, nargs="+", default=None)
    args = ap.parse_args()

    path = args.scenario or resources.files("carrier_forge") / "data" / "scenarios" / "table1.toml"
    sc = load_scenario(path)
    if args.p_db is not None:
        sc = replace(sc, p_db=args.p_db)
    if args.seeds:
        sc = replace(sc, seeds=tuple(args.seeds))

    th, sim = solve_maxmin(sc, "TH2"), solve_maxmin(sc, "SIM")
    labels = [c.label for c in sc.carriers]
    print(f"P = {sc.p_db:g} dB, {sc.n_symbols} symbols x {len(sc.seeds)} seed(s)")
    print(f"{'combination':<13}" + "".join(f"{lab:>16}" for lab in labels) + f"{'min th':>9}{'min sim':>9}")
    accs = []
    for a, b in zip(th.per_combination, sim.per_combination):
        cells = ""
        for x, y in zip(a.breakdowns, b.breakdowns):
            accs.append(accuracy_pct(x.cir_total_db, y.cir_total_db))
            cells += f"{x.cir_total_db:8.2f}/{y.cir_total_db:<7.2f}"
        print(f"{a.label:<13}{cells}{a.min_cir_db:9.2f}{b.min_cir_db:9.2f}")
    print(f"best  {th.best.label} {th.best.min_cir_db:.2f} dB (sim {sim.best.label} {sim.best.min_cir_db:.2f} dB)")
    print(f"worst {th.worst.label} {th.worst.min_cir_db:.2f} dB (sim {sim.worst.label} {sim.worst.min_cir_db:.2f} dB)")
    print(f"gain  {th.gain_db:.2f} dB theory, {sim.gain_db:.2f} dB sim")
    print(f"accuracy min/mean/max {min(accs):.2f} / {sum(accs) / len(accs):.2f} / {max(accs):.2f} %")


if __name__ == "__main__":
    main()
