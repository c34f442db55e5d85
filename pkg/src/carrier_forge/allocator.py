"""Carrier placement enumeration and the exhaustive max-min CIR search."""
from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from itertools import permutations

import numpy as np

from .aci import AciEngine
from .carriers import CarrierSpec
from .cir import CirBreakdown, CirInputs, cir_single, db
from .hpa import SalehParams, TaylorCoeffs, taylor_coeffs
from .kernels import KernelCache, build_kernel_table, post_hpa_ir
from .moments import ConstellationMoments, apsk16_points, kappa_set
from .omux import FilterCharacteristic, carrier_slopes
from .pulse import PulseSpec
from .simchain import SimConfig, merge_estimates, simulate_cir

MODES = ("TH1", "TH2", "SIM")
MAX_CARRIERS = 8


@dataclass(frozen=True)
class Scenario:
    carriers: tuple[CarrierSpec, ...]
    p_db: float
    omux: FilterCharacteristic
    omux_bandwidth_mhz: float = 500.0
    guard_mhz: float = 0.0
    saleh: SalehParams = SalehParams()
    expansion_point: float = 0.0
    constellation: str = "QPSK"
    ring_ratio: float = 2.7
    L: int = 10
    truncation_span: int = 32
    oversampling: int = 16
    n_symbols: int = 100_000
    seeds: tuple[int, ...] = (1,)

    def __post_init__(self):
        if not self.carriers:
            raise ValueError("scenario needs at least one carrier")
        total = sum(c.power_fraction for c in self.carriers)
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"power fractions sum to {total}, not 1")
        if self.guard_mhz < 0:
            raise ValueError("guard_mhz must be non-negative")
        if not self.seeds:
            raise ValueError("need at least one seed")
        labels = [c.label for c in self.carriers]
        if len(set(labels)) != len(labels):
            raise ValueError("carrier labels must be unique")

    @property
    def P(self) -> float:
        return 10.0 ** (self.p_db / 10.0)

    @property
    def coeffs(self) -> TaylorCoeffs:
        return taylor_coeffs(self.saleh, self.expansion_point)

    @property
    def moments(self) -> ConstellationMoments:
        if self.constellation == "QPSK":
            return ConstellationMoments()
        return ConstellationMoments.from_points(apsk16_points(self.ring_ratio))

    def sim_config(self, **overrides) -> SimConfig:
        base = SimConfig(n_symbols=self.n_symbols, seed=self.seeds[0], constellation=self.constellation,
                         ring_ratio=self.ring_ratio, saleh=self.saleh, expansion_point=self.expansion_point,
                         guard_symbols=self.truncation_span)
        return replace(base, **overrides)


@dataclass(frozen=True)
class Placement:
    order: tuple[int, ...]  # carrier indices, left to right in frequency
    carriers: tuple[CarrierSpec, ...]  # in scenario order, centered and with fitted slopes

    def label(self, scenario: Scenario) -> str:
        return "".join(scenario.carriers[i].label for i in self.order)


@dataclass(frozen=True)
class CombinationResult:
    placement: Placement
    label: str
    breakdowns: tuple[CirBreakdown, ...]  # scenario carrier order
    min_cir_db: float


@dataclass
class AllocationResult:
    mode: str
    per_combination: list[CombinationResult]
    best: CombinationResult
    worst: CombinationResult
    estimates: dict = field(default_factory=dict)  # SIM mode: label -> list of CirEstimate

    @property
    def gain_db(self) -> float:
        return self.best.min_cir_db - self.worst.min_cir_db


def slot_centers(widths, guard: float = 0.0) -> list[float]:
    widths = list(widths)
    total = sum(widths) + guard * (len(widths) - 1)
    x = -total / 2
    centers = []
    for w in widths:
        centers.append(x + w / 2)
        x += w + guard
    return centers


def enumerate_allocations(scenario: Scenario) -> list[Placement]:
    """Every left-to-right ordering of the carriers as contiguous slots centered on the OMUX."""
    n = len(scenario.carriers)
    if n > MAX_CARRIERS:
        raise ValueError(f"{n} carriers exceed the exhaustive-search limit of {MAX_CARRIERS}")
    total = sum(c.bandwidth for c in scenario.carriers) + scenario.guard_mhz * (n - 1)
    if total > scenario.omux_bandwidth_mhz + 1e-9:
        raise ValueError(f"carriers occupy {total:.6g} MHz, OMUX usable band is {scenario.omux_bandwidth_mhz:.6g} MHz")
    # lexicographic on labels so that ties resolve deterministically
    by_label = sorted(range(n), key=lambda i: scenario.carriers[i].label)
    out = []
    for order in permutations(by_label):
        centers = slot_centers([scenario.carriers[i].bandwidth for i in order], scenario.guard_mhz)
        placed = list(scenario.carriers)
        for i, f0 in zip(order, centers):
            c = scenario.carriers[i]
            placed[i] = c.placed(f0, carrier_slopes(scenario.omux, f0, c.bandwidth, c.symbol_rate))
        out.append(Placement(tuple(order), tuple(placed)))
    return out


class Evaluator:
    """CIR of every carrier of a placement in one of the three modes."""

    def __init__(self, scenario: Scenario, mode: str, cache: KernelCache | None = None,
                 engine: AciEngine | None = None):
        if mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        self.scenario = scenario
        self.mode = mode
        if mode == "TH2":
            self.cache = cache if cache is not None else KernelCache()
            self.engine = engine or AciEngine(scenario.moments, True, scenario.truncation_span, scenario.oversampling)
        self.last_estimates = None

    def _pulse(self, c: CarrierSpec) -> PulseSpec:
        return PulseSpec(1.0, c.rolloff, self.scenario.truncation_span, self.scenario.oversampling)

    def theory(self, placement: Placement) -> tuple[CirBreakdown, ...]:
        sc = self.scenario
        coeffs, moments, P = sc.coeffs, sc.moments, sc.P
        carriers = list(placement.carriers)
        if self.mode == "TH2":
            engine = self.engine
            tables = [self.cache.get(self._pulse(c), c.slopes, sc.L) for c in carriers]
        else:
            # no state survives between calls: every kernel is recomputed
            engine = AciEngine(moments, False, sc.truncation_span, sc.oversampling)
            tables = []
            for c in carriers:
                resp = post_hpa_ir(self._pulse(c), c.slopes)
                engine.responses[c] = resp
                tables.append(build_kernel_table(self._pulse(c), c.slopes, sc.L, resp))
        out = []
        for v, c in enumerate(carriers):
            kappas = kappa_set(tables[v], moments)
            _, bd = cir_single(CirInputs(P, coeffs, kappas, c.power_fraction))
            i_aci, parts = engine.aci_power(v, carriers, coeffs, P)
            out.append(bd.with_aci(i_aci, **parts))
        return tuple(out)

    def simulate(self, placement: Placement) -> tuple[CirBreakdown, ...]:
        sc = self.scenario
        runs = [simulate_cir(list(placement.carriers), sc.P, sc.sim_config(seed=seed)) for seed in sc.seeds]
        ests = [merge_estimates(list(per_victim)) for per_victim in zip(*runs)]
        self.last_estimates = ests
        return tuple(CirBreakdown(e.c_hat, e.i_hat, 0.0, 0.0, {"stderr_db": e.stderr_db}) for e in ests)

    def __call__(self, placement: Placement) -> tuple[CirBreakdown, ...]:
        return self.simulate(placement) if self.mode == "SIM" else self.theory(placement)


def _reduce(scenario, mode, placements, breakdowns, estimates) -> AllocationResult:
    rows = []
    for p, bds in zip(placements, breakdowns):
        rows.append(CombinationResult(p, p.label(scenario), tuple(bds), min(b.cir_total_db for b in bds)))
    # first maximum / minimum in enumeration order is the lexicographic tie-break
    best = max(rows, key=lambda r: r.min_cir_db)
    worst = min(rows, key=lambda r: r.min_cir_db)
    return AllocationResult(mode, rows, best, worst, estimates)


def solve_maxmin(scenario: Scenario, mode: str = "TH2", cache: KernelCache | None = None,
                 workers: int = 1) -> AllocationResult:
    placements = enumerate_allocations(scenario)
    evaluator = Evaluator(scenario, mode, cache)
    estimates = {}
    if mode == "SIM" or workers <= 1:
        breakdowns = []
        for p in placements:
            breakdowns.append(evaluator(p))
            if mode == "SIM":
                estimates[p.label(scenario)] = evaluator.last_estimates
    else:
        with ThreadPoolExecutor(workers) as pool:
            breakdowns = list(pool.map(evaluator, placements))
    return _reduce(scenario, mode, placements, breakdowns, estimates)


@dataclass(frozen=True)
class BenchRow:
    mode: str
    repetitions: int
    calls: int
    total_s: float

    @property
    def per_cir_s(self) -> float:
        return self.total_s / self.calls


def bench_runtimes(scenario: Scenario, repetitions: int = 10, modes=MODES) -> dict[str, BenchRow]:
    """Wall time per CIR computation for each mode over the scenario's placements.

    One CIR is one carrier of one placement. TH2 gets one untimed warm-up
    pass so that its cache is filled before measuring.
    """
    if repetitions < 1:
        raise ValueError("repetitions must be >= 1")
    placements = enumerate_allocations(scenario)
    n_cir = len(placements) * len(scenario.carriers)
    rows = {}
    for mode in modes:
        evaluator = Evaluator(scenario, mode)
        if mode == "TH2":
            for p in placements:
                evaluator(p)
        t0 = time.perf_counter()
        for _ in range(repetitions):
            for p in placements:
                evaluator(p)
        rows[mode] = BenchRow(mode, repetitions, repetitions * n_cir, time.perf_counter() - t0)
    return rows


def n_allocations(n_carriers: int) -> int:
    return math.factorial(n_carriers)
