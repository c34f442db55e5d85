from __future__ import annotations

from dataclasses import dataclass, replace

from .omux import SlopePair
from .pulse import PulseSpec


@dataclass(frozen=True)
class CarrierSpec:
    symbol_rate: float  # Mbauds
    rolloff: float
    power_fraction: float = 1.0
    center_mhz: float = 0.0
    slopes: SlopePair = SlopePair(0.0, 0.0)
    label: str = ""

    @property
    def bandwidth(self) -> float:
        return self.symbol_rate * (1.0 + self.rolloff)

    def pulse(self, truncation_span: int = 32, oversampling: int = 16) -> PulseSpec:
        return PulseSpec(self.symbol_rate, self.rolloff, truncation_span, oversampling)

    def placed(self, center_mhz: float, slopes: SlopePair | None = None) -> "CarrierSpec":
        return replace(self, center_mhz=center_mhz, slopes=slopes if slopes is not None else self.slopes)
