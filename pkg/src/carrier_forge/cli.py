"""carrier-forge command line.

    carrier-forge cir-sweep --xg 1 --yd 0 --rolloff 0.2 --pmin -30 --pmax 0 --pstep 3
    carrier-forge fit --f0 -150 --bandwidth 200
    carrier-forge allocate --scenario table1.toml --mode TH2
    carrier-forge validate --scenario table1.toml
    carrier-forge bench --scenario table1.toml --reps 10

Exit status: 0 on success, 2 for usage or configuration errors, 3 when a
computation produces non-physical numbers.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .allocator import MODES, bench_runtimes, solve_maxmin
from .cir import NumericalError, accuracy_pct, db, single_carrier_cir
from .hpa import SalehParams, taylor_coeffs
from .kernels import KernelCache
from .moments import ConstellationMoments, apsk16_points
from .omux import SlopePair, carrier_slopes, default_characteristic, read_characteristic
from .carriers import CarrierSpec
from .scenario import ScenarioError, load_scenario
from .simchain import SimConfig, simulate_cir

SCHEMA_VERSION = 1
EXIT_USAGE = 2
EXIT_NUMERICAL = 3


class UsageError(Exception):
    pass


def sig(x: float) -> float:
    """Round to the nine significant digits used for every printed number."""
    x = float(x)
    return float(f"{x:.9g}") if math.isfinite(x) else x


def fmt(x: float) -> str:
    return f"{float(x):.9g}"


def _emit_json(obj, out):
    out.write(json.dumps(obj, indent=2) + "\n")


def _cache(args):
    return KernelCache(args.cache_dir) if args.cache_dir else KernelCache()


# ---------------------------------------------------------------- cir-sweep
def _power_grid(pmin: float, pmax: float, pstep: float) -> list[float]:
    if not pstep > 0:
        raise UsageError("--pstep must be positive")
    if pmax < pmin:
        raise UsageError("--pmax must not be below --pmin")
    n = int(math.floor((pmax - pmin) / pstep + 1e-9)) + 1
    if n > 10_000:
        raise UsageError("power grid has more than 10000 points")
    return [sig(pmin + i * pstep) for i in range(n)]


def cmd_cir_sweep(args, out) -> int:
    if not 0.05 <= args.rolloff <= 1:
        raise UsageError("--rolloff must lie in [0.05, 1]")
    powers = _power_grid(args.pmin, args.pmax, args.pstep)
    slopes = SlopePair.normalized(args.xg, args.yd)
    moments = (ConstellationMoments() if args.constellation == "QPSK"
               else ConstellationMoments.from_points(apsk16_points(args.ring_ratio)))
    coeffs = taylor_coeffs(SalehParams(), 0.0)
    cache = _cache(args)
    w = csv.writer(out, lineterminator="\n")
    out.write(f"# schema_version: {SCHEMA_VERSION}\n")
    sim = args.mode == "SIM"
    w.writerow(["p_db", "cir_db", "mode"] + (["stderr_db"] if sim else []))
    for p_db in powers:
        P = 10 ** (p_db / 10)
        if sim:
            cfg = SimConfig(n_symbols=args.n_symbols, seed=args.seed, constellation=args.constellation,
                            ring_ratio=args.ring_ratio)
            est = simulate_cir([CarrierSpec(1.0, args.rolloff, slopes=slopes)], P, cfg)[0]
            w.writerow([fmt(p_db), fmt(est.cir_db), "SIM", fmt(est.stderr_db)])
        else:
            ratio, _ = single_carrier_cir(P, args.rolloff, slopes, coeffs, moments, args.L, args.K, args.osf, cache)
            w.writerow([fmt(p_db), fmt(db(ratio)), "TH"])
    return 0


# ---------------------------------------------------------------- fit
def cmd_fit(args, out) -> int:
    char = read_characteristic(args.omux) if args.omux else default_characteristic()
    rs = args.rs if args.rs is not None else args.bandwidth / (1 + args.rolloff)
    s = carrier_slopes(char, args.f0, args.bandwidth, rs)
    _emit_json({
        "schema_version": SCHEMA_VERSION,
        "command": "fit",
        "omux": str(args.omux) if args.omux else "default",
        "f0_mhz": sig(args.f0),
        "bandwidth_mhz": sig(args.bandwidth),
        "symbol_rate_mbaud": sig(rs),
        "g_db_per_mhz": sig(s.g),
        "d_ns_per_mhz": sig(s.d),
        "x_g": sig(s.x_g),
        "y_d": sig(s.y_d),
    }, out)
    return 0


# ---------------------------------------------------------------- allocate
def _allocation_json(sc, res) -> dict:
    rows = []
    for row in res.per_combination:
        carriers = {}
        for c, b in zip(row.placement.carriers, row.breakdowns):
            entry = {"center_mhz": sig(c.center_mhz), "x_g": sig(c.slopes.x_g), "y_d": sig(c.slopes.y_d),
                     "cir_db": sig(b.cir_total_db)}
            if res.mode == "SIM":
                entry.update(c_hat=sig(b.c_isi), i_hat=sig(b.i_lisi), stderr_db=sig(b.extra["stderr_db"]))
            else:
                entry.update(c_isi=sig(b.c_isi), i_lisi=sig(b.i_lisi), i_nlisi=sig(b.i_nlisi), i_aci=sig(b.i_aci))
            carriers[c.label] = entry
        rows.append({"combination": row.label, "min_cir_db": sig(row.min_cir_db), "carriers": carriers})
    return {
        "schema_version": SCHEMA_VERSION,
        "command": "allocate",
        "mode": res.mode,
        "p_db": sig(sc.p_db),
        "combinations": rows,
        "best": {"combination": res.best.label, "min_cir_db": sig(res.best.min_cir_db)},
        "worst": {"combination": res.worst.label, "min_cir_db": sig(res.worst.min_cir_db)},
        "gain_db": sig(res.gain_db),
    }


def _allocation_table(sc, res) -> str:
    labels = [c.label for c in sc.carriers]
    head = f"{'combination':<14}" + "".join(f"{lab:>10}" for lab in labels) + f"{'min':>10}"
    lines = [f"mode {res.mode}, P = {sc.p_db:g} dB (CIR in dB)", head]
    for row in res.per_combination:
        cells = "".join(f"{b.cir_total_db:10.2f}" for b in row.breakdowns)
        mark = "  best" if row is res.best else ("  worst" if row is res.worst else "")
        lines.append(f"{row.label:<14}{cells}{row.min_cir_db:10.2f}{mark}")
    lines.append(f"allocation gain {res.gain_db:.2f} dB")
    return "\n".join(lines) + "\n"


def cmd_allocate(args, out) -> int:
    sc = load_scenario(args.scenario)
    res = solve_maxmin(sc, args.mode, _cache(args))
    _emit_json(_allocation_json(sc, res), out)
    if not args.quiet:
        sys.stderr.write(_allocation_table(sc, res))
    return 0


# ---------------------------------------------------------------- validate
def cmd_validate(args, out) -> int:
    sc = load_scenario(args.scenario)
    th = solve_maxmin(sc, "TH2", _cache(args))
    sim = solve_maxmin(sc, "SIM")
    rows, accs = [], []
    for a, b in zip(th.per_combination, sim.per_combination):
        for c, bt, bs in zip(a.placement.carriers, a.breakdowns, b.breakdowns):
            acc = accuracy_pct(bt.cir_total_db, bs.cir_total_db)
            accs.append(acc)
            rows.append({"combination": a.label, "carrier": c.label, "theory_db": sig(bt.cir_total_db),
                         "sim_db": sig(bs.cir_total_db), "stderr_db": sig(bs.extra["stderr_db"]),
                         "accuracy_pct": sig(acc)})
    report = {
        "schema_version": SCHEMA_VERSION,
        "command": "validate",
        "p_db": sig(sc.p_db),
        "n_symbols": sc.n_symbols,
        "seeds": list(sc.seeds),
        "rows": rows,
        "accuracy_pct": {"min": sig(min(accs)), "mean": sig(float(np.mean(accs))), "max": sig(max(accs))},
        "theory_best": th.best.label,
        "sim_best": sim.best.label,
        "argmax_agrees": th.best.label == sim.best.label,
    }
    _emit_json(report, out)
    if not args.quiet:
        lines = [f"{'combination':<14}{'carrier':<9}{'theory':>9}{'sim':>9}{'+-':>7}{'acc %':>9}"]
        for r in rows:
            lines.append(f"{r['combination']:<14}{r['carrier']:<9}{r['theory_db']:9.2f}{r['sim_db']:9.2f}"
                         f"{r['stderr_db']:7.2f}{r['accuracy_pct']:9.2f}")
        q = report["accuracy_pct"]
        lines.append(f"accuracy min/mean/max {q['min']:.2f} / {q['mean']:.2f} / {q['max']:.2f} %; "
                     f"best {th.best.label} (theory) vs {sim.best.label} (sim)")
        sys.stderr.write("\n".join(lines) + "\n")
    return 0


# ---------------------------------------------------------------- bench
def cmd_bench(args, out) -> int:
    if args.reps < 1:
        raise UsageError("--reps must be at least 1")
    sc = load_scenario(args.scenario)
    modes = args.modes or list(MODES)
    rows = bench_runtimes(sc, args.reps, modes)
    ref = rows["SIM"].per_cir_s if "SIM" in rows else None
    w = csv.writer(out, lineterminator="\n")
    out.write(f"# schema_version: {SCHEMA_VERSION}\n")
    w.writerow(["mode", "repetitions", "calls", "total_s", "per_cir_s", "sim_over_mode"])
    for mode in modes:
        r = rows[mode]
        w.writerow([mode, r.repetitions, r.calls, fmt(r.total_s), fmt(r.per_cir_s),
                    fmt(ref / r.per_cir_s) if ref else ""])
    return 0


# ---------------------------------------------------------------- parser
def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="carrier-forge", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    ap.add_argument("--cache-dir", type=Path, default=None,
                    help="kernel cache directory (default: $CARRIER_FORGE_CACHE_DIR, else memory only)")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("cir-sweep", help="single-carrier CIR against input power")
    p.add_argument("--xg", type=float, default=0.0, help="normalized gain slope x_g")
    p.add_argument("--yd", type=float, default=0.0, help="normalized group-delay slope y_d")
    p.add_argument("--rolloff", type=float, default=0.2)
    p.add_argument("--pmin", type=float, default=-30.0)
    p.add_argument("--pmax", type=float, default=0.0)
    p.add_argument("--pstep", type=float, default=3.0)
    p.add_argument("--mode", choices=("TH", "SIM"), default="TH")
    p.add_argument("--constellation", choices=("QPSK", "16APSK"), default="QPSK")
    p.add_argument("--ring-ratio", type=float, default=2.7)
    p.add_argument("--L", type=int, default=10)
    p.add_argument("--K", type=int, default=32)
    p.add_argument("--osf", type=int, default=16)
    p.add_argument("--n-symbols", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=1)
    p.set_defaults(func=cmd_cir_sweep)

    p = sub.add_parser("fit", help="gain and group-delay slopes of an OMUX band")
    p.add_argument("--omux", type=Path, default=None, help="characteristic CSV (default: shipped dataset)")
    p.add_argument("--f0", type=float, required=True, help="band center, MHz")
    p.add_argument("--bandwidth", type=float, required=True, help="band width, MHz")
    p.add_argument("--rs", type=float, default=None, help="symbol rate for x_g, y_d (Mbaud)")
    p.add_argument("--rolloff", type=float, default=0.2, help="used for the symbol rate when --rs is absent")
    p.set_defaults(func=cmd_fit)

    for name, func, text in (("allocate", cmd_allocate, "exhaustive max-min carrier allocation"),
                             ("validate", cmd_validate, "theory against Monte Carlo on a scenario")):
        p = sub.add_parser(name, help=text)
        p.add_argument("--scenario", type=Path, required=True)
        p.add_argument("--quiet", action="store_true", help="no human-readable table on stderr")
        if name == "allocate":
            p.add_argument("--mode", choices=MODES, default="TH2")
        p.set_defaults(func=func)

    p = sub.add_parser("bench", help="wall time per CIR for SIM, TH1 and TH2")
    p.add_argument("--scenario", type=Path, required=True)
    p.add_argument("--reps", type=int, default=10)
    p.add_argument("--modes", nargs="+", choices=MODES, default=None)
    p.set_defaults(func=cmd_bench)
    return ap


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse: 2 on bad usage, 0 for --help
        return int(exc.code or 0)
    try:
        return args.func(args, out)
    except (UsageError, ScenarioError, FileNotFoundError, ValueError) as exc:
        sys.stderr.write(f"carrier-forge {args.command}: error: {exc}\n")
        return EXIT_USAGE
    except (NumericalError, FloatingPointError, np.linalg.LinAlgError) as exc:
        sys.stderr.write(f"carrier-forge {args.command}: numerical failure: {exc}\n")
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
