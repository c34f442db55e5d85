"""One test per acceptance criterion; the terminal summary lists a PASS/FAIL line for each."""
import time
from dataclasses import replace

import numpy as np
import pytest

from carrier_forge import (
    CarrierSpec,
    KernelCache,
    PulseSpec,
    SimConfig,
    bench_runtimes,
    build_kernel_table,
    kappa_set,
    simulate_cir,
    single_carrier_cir,
    solve_maxmin,
)
from carrier_forge.allocator import Evaluator, enumerate_allocations
from carrier_forge.cir import accuracy_pct, db
from carrier_forge.omux import SlopePair

FIG4_POWERS = list(range(-30, 1, 3))
FIG4_ROLLOFFS = (0.05, 0.2, 0.35)
FIG4_CASES = {"flat": SlopePair(0.0, 0.0), "xg1": SlopePair.normalized(1.0, 0.0), "xg5": SlopePair.normalized(5.0, 0.0)}
TILT = SlopePair.normalized(1.0, 0.0)


def crossing_db(slopes=TILT, rolloff=0.2, step=0.01):
    """First power (dB) where the nonlinear share of the ISI denominator exceeds the linear one."""
    for p_db in np.arange(-30.0, 0.0 + step / 2, step):
        _, bd = single_carrier_cir(10 ** (p_db / 10), rolloff, slopes)
        if bd.i_nlisi > bd.i_lisi:
            return float(p_db)
    return float("nan")


def test_criterion_1_zero_distortion_identities(verdict):
    t0 = time.perf_counter()
    k = kappa_set(build_kernel_table(PulseSpec(rolloff=0.2), SlopePair(0.0, 0.0), 10))
    dt = time.perf_counter() - t0
    worst = max(abs(k.ku11 - 1), abs(k.ki11), abs(k.ki13), abs(k.ki31))
    ok = verdict(1, worst < 1e-6 and dt < 10, f"max identity residue {worst:.2e}, {dt:.2f} s")
    assert ok


def test_criterion_2_linear_limit(verdict):
    t0 = time.perf_counter()
    r, _ = single_carrier_cir(1e-4, 0.2, TILT)
    k = kappa_set(build_kernel_table(PulseSpec(rolloff=0.2), TILT, 10))
    gap = abs(db(r) - db(k.ku11 / k.ki11))
    dt = time.perf_counter() - t0
    ok = verdict(2, gap < 0.2 and dt < 30, f"|CIR(-40 dB) - ku11/ki11| = {gap:.4f} dB ({db(r):.3f} dB)")
    assert ok


@pytest.fixture(scope="module")
def fig4_grid():
    """(case, rolloff, p_db) -> (theory dB, sim dB) with 1e5 QPSK symbols, truncated HPA."""
    out = {}
    for name, slopes in FIG4_CASES.items():
        for a in FIG4_ROLLOFFS:
            for p_db in FIG4_POWERS:
                P = 10 ** (p_db / 10)
                th = db(single_carrier_cir(P, a, slopes)[0])
                sim = simulate_cir([CarrierSpec(1.0, a, 1.0, 0.0, slopes)], P, SimConfig(n_symbols=100_000))[0]
                out[name, a, p_db] = (th, sim.cir_db)
    return out


@pytest.mark.slow
def test_criterion_3_theory_versus_chain(fig4_grid, verdict):
    gaps = {key: abs(th - sim) for key, (th, sim) in fig4_grid.items() if sim <= 40}
    worst = max(gaps, key=gaps.get)
    ok = verdict(3, gaps[worst] <= 0.5,
                 f"worst |theory - sim| {gaps[worst]:.3f} dB at {worst} over {len(gaps)} points with sim <= 40 dB")
    assert ok


def test_criterion_4_rolloff_ordering(verdict):
    bad = []
    for p_db in (-20, -10, -5):
        c = [single_carrier_cir(10 ** (p_db / 10), a)[0] for a in (0.05, 0.2, 0.35)]
        if not c[0] < c[1] < c[2]:
            bad.append(p_db)
    ok = verdict(4, not bad, "CIR(0.05) < CIR(0.2) < CIR(0.35) at -20, -10, -5 dB" if not bad else f"violated at {bad}")
    assert ok


def test_criterion_5_transition_region(verdict):
    p = crossing_db()
    ok = verdict(5, -12 <= p <= -6, f"nonlinear share overtakes linear at {p:.2f} dB (window [-12, -6])")
    assert ok


@pytest.fixture(scope="module")
def table1_runs(table1):
    return solve_maxmin(table1, "TH2"), solve_maxmin(table1, "SIM")


@pytest.mark.slow
def test_criterion_6_scenario_validation(table1_runs, verdict):
    th, sim = table1_runs
    acc = [accuracy_pct(a.cir_total_db, b.cir_total_db)
           for ra, rb in zip(th.per_combination, sim.per_combination)
           for a, b in zip(ra.breakdowns, rb.breakdowns)]
    ok = min(acc) >= 95 and th.best.label == sim.best.label and th.gain_db > 1
    verdict(6, ok, f"accuracy min/mean/max {min(acc):.2f}/{np.mean(acc):.2f}/{max(acc):.2f} %, "
                   f"best {th.best.label} (theory) vs {sim.best.label} (sim), gain {th.gain_db:.2f} dB")
    assert ok


@pytest.mark.slow
def test_criterion_7_runtime_ordering(table1, verdict):
    rows = bench_runtimes(table1, repetitions=1)
    calls = min(r.calls for r in rows.values())
    sim_th1 = rows["SIM"].per_cir_s / rows["TH1"].per_cir_s
    th1_th2 = rows["TH1"].per_cir_s / rows["TH2"].per_cir_s
    ok = verdict(7, sim_th1 >= 100 and th1_th2 >= 10 and calls >= 10,
                 f"SIM/TH1 = {sim_th1:.1f} (need >= 100), TH1/TH2 = {th1_th2:.1f} (need >= 10), {calls} calls per mode")
    assert ok


def test_criterion_8_symmetry_suite(tmp_path, verdict):
    notes = []
    cases = [SlopePair.normalized(x, y) for x, y in ((1.0, 0.0), (0.0, 300.0), (2.0, -150.0))]
    gain_rel = delay_rel = 0.0
    for s in cases:
        for p_db in (-20, -10, -3):
            P = 10 ** (p_db / 10)
            ref = single_carrier_cir(P, 0.2, s)[0]
            gain_rel = max(gain_rel, abs(single_carrier_cir(P, 0.2, s.flipped(gain=True))[0] / ref - 1))
            delay_rel = max(delay_rel, abs(single_carrier_cir(P, 0.2, s.flipped(delay=True))[0] / ref - 1))
    notes.append(f"x_g flip {gain_rel:.1e}, y_d flip {delay_rel:.1e}")
    t = build_kernel_table(PulseSpec(rolloff=0.2), SlopePair.normalized(2.0, 250.0), 10)
    swap = np.array_equal(t.third_order, t.third_order.transpose(1, 0, 2))
    notes.append(f"k1<->k2 exact {swap}")
    first = KernelCache(tmp_path).get(PulseSpec(rolloff=0.2), TILT, 10)
    again = KernelCache(tmp_path).get(PulseSpec(rolloff=0.2), TILT, 10)
    fresh = build_kernel_table(PulseSpec(rolloff=0.2), TILT, 10)
    same = all(a.tobytes() == b.tobytes() for a, b in (
        (first.third_order, again.third_order), (first.third_order, fresh.third_order),
        (first.first_order, again.first_order)))
    notes.append(f"cache byte-exact {same}")
    ok = verdict(8, gain_rel <= 1e-6 and delay_rel <= 1e-6 and swap and same, "; ".join(notes))
    assert ok


@pytest.mark.slow
def test_criterion_9_grid_convergence(fig4_grid, table1_runs, table1, verdict):
    worst = {}

    def check(label, base_db, fine_db):
        worst[label] = max(worst.get(label, 0.0), abs(fine_db - base_db))

    for p_db in (-40.0,):
        check("2", db(single_carrier_cir(10 ** (p_db / 10), 0.2, TILT)[0]),
              db(single_carrier_cir(10 ** (p_db / 10), 0.2, TILT, truncation_span=64, oversampling=32)[0]))
    for (name, a, p_db), (th, _) in fig4_grid.items():
        fine = single_carrier_cir(10 ** (p_db / 10), a, FIG4_CASES[name], truncation_span=64, oversampling=32)[0]
        check("3", th, db(fine))
    for p_db in (-20, -10, -5):
        for a in (0.05, 0.2, 0.35):
            P = 10 ** (p_db / 10)
            check("4", db(single_carrier_cir(P, a)[0]), db(single_carrier_cir(P, a, truncation_span=64, oversampling=32)[0]))
    p5 = crossing_db(step=0.01)
    for p_db in (p5 - 0.01, p5):
        P = 10 ** (p_db / 10)
        check("5", db(single_carrier_cir(P, 0.2, TILT)[0]),
              db(single_carrier_cir(P, 0.2, TILT, truncation_span=64, oversampling=32)[0]))
    fine_sc = replace(table1, truncation_span=64, oversampling=32)
    ev = Evaluator(fine_sc, "TH2")
    for row, placement in zip(table1_runs[0].per_combination, enumerate_allocations(fine_sc)):
        for a, b in zip(row.breakdowns, ev(placement)):
            check("6", a.cir_total_db, b.cir_total_db)
    total = max(worst.values())
    ok = verdict(9, total < 0.05, "max change " + ", ".join(f"{k}: {v:.2e} dB" for k, v in worst.items()))
    assert ok
