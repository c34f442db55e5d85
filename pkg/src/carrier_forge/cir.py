"""Carrier-to-interference ratio from kernel powers, single carrier and in a multiplex."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .hpa import TaylorCoeffs
from .moments import KappaSet


class NumericalError(ArithmeticError):
    """A computed power came out non-physical (negative or non-finite)."""


def db(x):
    return 10.0 * np.log10(x)


def undb(x):
    return 10.0 ** (np.asarray(x, dtype=float) / 10.0)


@dataclass(frozen=True)
class CirInputs:
    P: float  # total HPA input power (linear, saturation-normalized)
    coeffs: TaylorCoeffs
    kappas: KappaSet
    power_fraction: float = 1.0

    def __post_init__(self):
        if self.P <= 0:
            raise ValueError("P must be positive")
        if not 0 < self.power_fraction <= 1:
            raise ValueError("power_fraction must lie in (0, 1]")

    @property
    def carrier_power(self) -> float:
        return self.power_fraction * self.P

    @property
    def gamma1_eff(self) -> complex:
        """Linear gain seen by the carrier, compressed by the other carriers' mean power."""
        c = self.coeffs
        return c.gamma1 + 2.0 * c.gamma3 * (1.0 - self.power_fraction) * self.P


@dataclass(frozen=True)
class CirBreakdown:
    c_isi: float
    i_lisi: float
    i_nlisi: float
    i_aci: float = 0.0
    extra: dict = field(default_factory=dict, compare=False)

    @property
    def i_isi(self) -> float:
        return self.i_lisi + self.i_nlisi

    @property
    def cir_total(self) -> float:
        return self.c_isi / (self.i_isi + self.i_aci)

    @property
    def cir_total_db(self) -> float:
        return float(db(self.cir_total))

    @property
    def cir_isi_db(self) -> float:
        return float(db(self.c_isi / self.i_isi))

    def with_aci(self, i_aci: float, **extra) -> "CirBreakdown":
        return CirBreakdown(self.c_isi, self.i_lisi, self.i_nlisi, i_aci, {**self.extra, **extra})


def cir_polynomials(inputs: CirInputs) -> tuple[tuple[float, float, float], tuple[float, float, float]]:
    """(c1, c2, c3), (i1, i2, i3) of the ratio of cubic polynomials in the carrier power."""
    g1 = inputs.gamma1_eff
    g3 = inputs.coeffs.gamma3
    k = inputs.kappas
    c1 = abs(g1) ** 2 * k.ku11
    c2 = g1 * np.conj(g3) * k.ku13 + np.conj(g1) * g3 * k.ku31
    c3 = abs(g3) ** 2 * k.ku33
    i1 = abs(g1) ** 2 * k.ki11
    i2 = g1 * np.conj(g3) * k.ki13 + np.conj(g1) * g3 * k.ki31
    i3 = abs(g3) ** 2 * k.ki33
    return (c1, float(np.real(c2)), c3), (i1, float(np.real(i2)), i3)


def cir_single(inputs: CirInputs) -> tuple[float, CirBreakdown]:
    (c1, c2, c3), (i1, i2, i3) = cir_polynomials(inputs)
    p = inputs.carrier_power
    num = p * c1 + p**2 * c2 + p**3 * c3
    den = p * i1 + p**2 * i2 + p**3 * i3
    if not (np.isfinite(num) and np.isfinite(den)) or den <= 0:
        raise NumericalError(f"non-physical powers: carrier {num!r}, interference {den!r}")
    i_lisi = p * i1
    return num / den, CirBreakdown(c_isi=num, i_lisi=i_lisi, i_nlisi=den - i_lisi)


def effective_gain_power(inputs: CirInputs, u1: complex, u3: complex) -> float:
    """Useful power in its coherent-gain form, P |g1 U1 + g3 P U3|^2."""
    p = inputs.carrier_power
    return p * abs(inputs.gamma1_eff * u1 + inputs.coeffs.gamma3 * p * u3) ** 2


def accuracy_pct(theory_db: float, sim_db: float) -> float:
    """100 (1 - |theory - sim| / |sim|) with both CIRs in dB."""
    return 100.0 * (1.0 - abs(theory_db - sim_db) / abs(sim_db))


def single_carrier_cir(
    P: float,
    rolloff: float,
    slopes=None,
    coeffs: TaylorCoeffs | None = None,
    moments=None,
    L: int = 10,
    truncation_span: int = 32,
    oversampling: int = 16,
    cache=None,
) -> tuple[float, CirBreakdown]:
    """CIR of one carrier alone in the transponder (rho = 1), in linear units."""
    from .hpa import taylor_coeffs
    from .kernels import build_kernel_table
    from .moments import QPSK, kappa_set
    from .omux import SlopePair
    from .pulse import PulseSpec

    pulse = PulseSpec(1.0, rolloff, truncation_span, oversampling)
    slopes = slopes if slopes is not None else SlopePair(0.0, 0.0)
    table = cache.get(pulse, slopes, L) if cache is not None else build_kernel_table(pulse, slopes, L)
    kappas = kappa_set(table, moments or QPSK)
    return cir_single(CirInputs(P, coeffs or taylor_coeffs(), kappas))


@dataclass(frozen=True)
class CirConfig:
    """Model settings shared by every carrier of a combination."""

    saleh: object = None  # SalehParams; None means the default TWTA
    expansion_point: float = 0.0
    moments: object = None  # ConstellationMoments; None means QPSK
    L: int = 10
    truncation_span: int = 32
    oversampling: int = 16

    @property
    def coeffs(self) -> TaylorCoeffs:
        from .hpa import SalehParams, taylor_coeffs

        return taylor_coeffs(self.saleh or SalehParams(), self.expansion_point)


def aci_power(victim, combination, coeffs: TaylorCoeffs, P: float, moments=None, engine=None) -> float:
    """I_ACI of ``victim`` (a carrier of ``combination`` or its index) at total input power P."""
    from .aci import AciEngine
    from .moments import QPSK

    combination = list(combination)
    index = victim if isinstance(victim, int) else combination.index(victim)
    engine = engine or AciEngine(moments or QPSK)
    return engine.aci_power(index, combination, coeffs, P)[0]


def cir_total(victim_index: int, combination, P: float, config: CirConfig = CirConfig(),
              cache=None, engine=None) -> CirBreakdown:
    """Total CIR of one carrier of a placed combination: own ISI plus ACI from the others.

    Carriers must already carry the slopes fitted at their assigned centers.
    """
    from .aci import AciEngine
    from .kernels import build_kernel_table
    from .moments import QPSK, kappa_set
    from .pulse import PulseSpec

    combination = list(combination)
    total = sum(c.power_fraction for c in combination)
    if abs(total - 1.0) > 1e-9:
        raise ValueError(f"power fractions sum to {total}, not 1")
    c = combination[victim_index]
    moments = config.moments or QPSK
    pulse = PulseSpec(1.0, c.rolloff, config.truncation_span, config.oversampling)
    table = cache.get(pulse, c.slopes, config.L) if cache is not None else build_kernel_table(pulse, c.slopes, config.L)
    coeffs = config.coeffs
    _, bd = cir_single(CirInputs(P, coeffs, kappa_set(table, moments), c.power_fraction))
    engine = engine or AciEngine(moments, True, config.truncation_span, config.oversampling)
    i_aci, parts = engine.aci_power(victim_index, combination, coeffs, P)
    return bd.with_aci(i_aci, **parts)
