"""Square-root raised-cosine pulses on a uniform symbol-normalized grid.

Time is measured in symbol periods (T_s = 1) and frequency in multiples of
the symbol rate throughout the package.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np


@dataclass(frozen=True)
class PulseSpec:
    symbol_rate: float = 1.0  # Mbauds
    rolloff: float = 0.2
    truncation_span: int = 32  # symbols per side
    oversampling: int = 16  # samples per symbol

    def __post_init__(self):
        if not 0.05 <= self.rolloff <= 1.0:
            raise ValueError(f"rolloff must lie in [0.05, 1], got {self.rolloff}")
        if self.symbol_rate <= 0:
            raise ValueError("symbol_rate must be positive")
        if self.truncation_span < 16:
            raise ValueError("truncation_span must be >= 16 symbols")
        if self.oversampling < 8 or self.oversampling % 2:
            raise ValueError("oversampling must be even and >= 8")

    @property
    def bandwidth(self) -> float:
        """Occupied bandwidth R_s (1 + alpha), same unit as symbol_rate."""
        return self.symbol_rate * (1.0 + self.rolloff)

    @property
    def step(self) -> float:
        return 1.0 / self.oversampling

    @property
    def n_samples(self) -> int:
        return 2 * self.truncation_span * self.oversampling + 1


@dataclass(frozen=True, eq=False)
class SampledPulse:
    samples: np.ndarray
    step: float
    center_index: int
    scale: float  # renormalization applied after truncation

    @property
    def grid(self) -> np.ndarray:
        return (np.arange(self.samples.size) - self.center_index) * self.step

    def energy(self) -> float:
        return float(np.sum(np.abs(self.samples) ** 2) * self.step)


def srrc(t, rolloff: float):
    """Unit-energy SRRC impulse response for T_s = 1 (vectorized)."""
    a = rolloff
    t = np.asarray(t, dtype=float)
    out = np.empty_like(t)
    at_zero = np.abs(t) < 1e-12
    at_sing = np.abs(np.abs(t) - 1.0 / (4.0 * a)) < 1e-12
    regular = ~(at_zero | at_sing)
    tr = t[regular]
    num = np.sin(np.pi * tr * (1 - a)) + 4 * a * tr * np.cos(np.pi * tr * (1 + a))
    den = np.pi * tr * (1 - (4 * a * tr) ** 2)
    out[regular] = num / den
    out[at_zero] = 1 - a + 4 * a / np.pi
    out[at_sing] = a / np.sqrt(2) * (
        (1 + 2 / np.pi) * np.sin(np.pi / (4 * a)) + (1 - 2 / np.pi) * np.cos(np.pi / (4 * a))
    )
    return out


def srrc_value(t: float, spec: PulseSpec) -> float:
    return float(srrc(np.array([t]), spec.rolloff)[0])


def rc_spectrum(nu, rolloff: float):
    """Raised-cosine spectrum H_RCF(nu) with unit integral (nu in symbol rates)."""
    a = rolloff
    f = np.abs(np.asarray(nu, dtype=float))
    lo, hi = (1 - a) / 2, (1 + a) / 2
    out = np.where(f <= lo, 1.0, 0.0)
    band = (f > lo) & (f < hi)
    out = np.where(band, 0.5 * (1 + np.cos(np.pi / a * (f - lo))), out)
    return out


def srrc_spectrum(nu, rolloff: float):
    """sqrt(H_RCF), written without a square root so it stays smooth in the roll-off."""
    a = rolloff
    f = np.abs(np.asarray(nu, dtype=float))
    lo, hi = (1 - a) / 2, (1 + a) / 2
    out = np.where(f <= lo, 1.0, 0.0)
    band = (f > lo) & (f < hi)
    return np.where(band, np.cos(np.pi / (2 * a) * (f - lo)), out)


@lru_cache(maxsize=64)
def sample_pulse(spec: PulseSpec) -> SampledPulse:
    n = spec.truncation_span * spec.oversampling
    t = np.arange(-n, n + 1) * spec.step
    h = srrc(t, spec.rolloff)
    scale = 1.0 / np.sqrt(np.sum(h * h) * spec.step)
    h = h * scale
    h.setflags(write=False)
    return SampledPulse(samples=h, step=spec.step, center_index=n, scale=float(scale))


def shifted(pulse: SampledPulse, k: int, oversampling: int) -> np.ndarray:
    """Samples of h(u + k) on the same grid, zero outside the truncated support."""
    h = pulse.samples
    s = k * oversampling
    out = np.zeros_like(h)
    if s >= 0:
        out[: h.size - s] = h[s:]
    else:
        out[-s:] = h[: h.size + s]
    return out
