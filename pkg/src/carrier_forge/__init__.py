"""Closed-form ISI/ACI analysis of a nonlinear satellite transponder and max-min carrier allocation."""
from .aci import AciEngine
from .allocator import AllocationResult, Scenario, bench_runtimes, enumerate_allocations, solve_maxmin
from .carriers import CarrierSpec
from .cir import CirBreakdown, CirConfig, CirInputs, aci_power, cir_single, cir_total, single_carrier_cir
from .hpa import SalehParams, TaylorCoeffs, taylor_coeffs
from .kernels import KernelCache, build_kernel_table, post_hpa_ir
from .moments import ConstellationMoments, KappaSet, kappa_set
from .omux import FilterCharacteristic, SlopePair, default_characteristic, fit_slopes, normalize_slopes
from .pulse import PulseSpec, sample_pulse
from .scenario import load_scenario
from .simchain import SimConfig, estimate_aci, estimate_cir, simulate_cir, simulate_waveform

__version__ = "0.1.0"

__all__ = [
    "AciEngine", "AllocationResult", "CarrierSpec", "CirBreakdown", "CirConfig", "CirInputs",
    "ConstellationMoments", "FilterCharacteristic", "KappaSet", "KernelCache", "PulseSpec",
    "SalehParams", "Scenario", "SimConfig", "SlopePair", "TaylorCoeffs", "aci_power",
    "bench_runtimes", "build_kernel_table", "cir_single", "cir_total", "default_characteristic",
    "enumerate_allocations", "estimate_aci", "estimate_cir", "fit_slopes", "kappa_set",
    "load_scenario", "normalize_slopes", "post_hpa_ir", "sample_pulse", "simulate_cir",
    "simulate_waveform", "single_carrier_cir", "solve_maxmin", "taylor_coeffs",
]
