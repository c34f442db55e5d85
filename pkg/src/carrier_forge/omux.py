"""OMUX gain / group-delay characteristic and per-band slope extraction."""
from __future__ import annotations

import csv
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

FIT_POINTS = 64
DEFAULT_DATASET = "omux_wideband_v1.csv"


@dataclass(frozen=True, eq=False)
class FilterCharacteristic:
    freq_mhz: np.ndarray
    gain_db: np.ndarray
    group_delay_ns: np.ndarray

    def __post_init__(self):
        f = np.asarray(self.freq_mhz, dtype=float)
        if f.ndim != 1 or f.size < 8:
            raise ValueError("characteristic needs at least 8 points")
        if np.any(np.diff(f) <= 0):
            raise ValueError("frequencies must be strictly increasing")
        if not (len(self.gain_db) == len(self.group_delay_ns) == f.size):
            raise ValueError("column lengths differ")
        object.__setattr__(self, "freq_mhz", f)
        object.__setattr__(self, "gain_db", np.asarray(self.gain_db, dtype=float))
        object.__setattr__(self, "group_delay_ns", np.asarray(self.group_delay_ns, dtype=float))

    @property
    def support(self) -> tuple[float, float]:
        return float(self.freq_mhz[0]), float(self.freq_mhz[-1])

    def gain_at(self, f):
        return np.interp(f, self.freq_mhz, self.gain_db)

    def delay_at(self, f):
        return np.interp(f, self.freq_mhz, self.group_delay_ns)


@dataclass(frozen=True)
class SlopePair:
    g: float  # dB/MHz
    d: float  # ns/MHz
    x_g: float = 0.0  # (dB/MHz)(Mbauds)
    y_d: float = 0.0  # (ns/MHz)(Mbauds)^2
    fit_band: tuple[float, float] | None = None

    @classmethod
    def normalized(cls, x_g: float, y_d: float) -> "SlopePair":
        """Slopes given directly in normalized form (unit symbol rate)."""
        return cls(g=x_g, d=y_d, x_g=x_g, y_d=y_d)

    def flipped(self, gain: bool = False, delay: bool = False) -> "SlopePair":
        sg = -1.0 if gain else 1.0
        sd = -1.0 if delay else 1.0
        return SlopePair(sg * self.g, sd * self.d, sg * self.x_g, sd * self.y_d, self.fit_band)


def read_characteristic(path) -> FilterCharacteristic:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != ["freq_mhz", "gain_db", "group_delay_ns"]:
            raise ValueError(f"{path}: expected header freq_mhz,gain_db,group_delay_ns")
        rows = [(float(r["freq_mhz"]), float(r["gain_db"]), float(r["group_delay_ns"])) for r in reader]
    if not rows:
        raise ValueError(f"{path}: no data rows")
    f, g, d = map(np.array, zip(*rows))
    return FilterCharacteristic(f, g, d)


def write_characteristic(char: FilterCharacteristic, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["freq_mhz", "gain_db", "group_delay_ns"])
        for row in zip(char.freq_mhz, char.gain_db, char.group_delay_ns):
            w.writerow([f"{v:.9g}" for v in row])


def default_characteristic() -> FilterCharacteristic:
    """The shipped re-scaled wideband OMUX (synthetic, see scripts/make_omux_dataset.py)."""
    ref = resources.files("carrier_forge") / "data" / DEFAULT_DATASET
    with resources.as_file(ref) as p:
        return read_characteristic(Path(p))


def _ls_slope(x: np.ndarray, y: np.ndarray) -> float:
    xc = x - x.mean()
    return float(np.dot(xc, y - y.mean()) / np.dot(xc, xc))


def fit_slopes(char: FilterCharacteristic, f0: float, bandwidth: float) -> SlopePair:
    """Least-squares gain and group-delay slopes over [f0 - B/2, f0 + B/2].

    The characteristic is linearly resampled onto FIT_POINTS uniform in-band
    points first; intercepts are dropped.
    """
    if bandwidth <= 0:
        raise ValueError("bandwidth must be positive")
    lo, hi = f0 - bandwidth / 2, f0 + bandwidth / 2
    s_lo, s_hi = char.support
    if lo < s_lo - 1e-9 or hi > s_hi + 1e-9:
        raise ValueError(f"band [{lo:g}, {hi:g}] MHz outside characteristic support [{s_lo:g}, {s_hi:g}]")
    native = np.count_nonzero((char.freq_mhz >= lo) & (char.freq_mhz <= hi))
    if native < 8:
        raise ValueError(f"only {native} characteristic points inside the band, need >= 8")
    f = np.linspace(lo, hi, FIT_POINTS)
    g = _ls_slope(f, char.gain_at(f))
    d = _ls_slope(f, char.delay_at(f))
    return SlopePair(g=g, d=d, fit_band=(lo, hi))


def normalize_slopes(g: float, d: float, symbol_rate: float) -> tuple[float, float]:
    if symbol_rate <= 0:
        raise ValueError("symbol_rate must be positive")
    return g * symbol_rate, d * symbol_rate**2


def carrier_slopes(char: FilterCharacteristic, f0: float, bandwidth: float, symbol_rate: float) -> SlopePair:
    s = fit_slopes(char, f0, bandwidth)
    x_g, y_d = normalize_slopes(s.g, s.d, symbol_rate)
    return SlopePair(s.g, s.d, x_g, y_d, s.fit_band)


def chebyshev_characteristic(
    order: int = 6,
    ripple_db: float = 0.1,
    edge_mhz: float = 280.0,
    span_mhz: float = 750.0,
    step_mhz: float = 2.5,
) -> FilterCharacteristic:
    """Gain and group delay of a Chebyshev-I lowpass equivalent of the bandpass OMUX."""
    from scipy import signal

    b, a = signal.cheby1(order, ripple_db, 2 * np.pi * edge_mhz * 1e6, analog=True)
    f = np.arange(-span_mhz, span_mhz + step_mhz / 2, step_mhz)
    w = 2 * np.pi * f * 1e6
    _, h = signal.freqs(b, a, worN=w)
    gain = 20 * np.log10(np.abs(h))
    gain -= np.interp(0.0, f, gain)
    phase = np.unwrap(np.angle(h))
    delay = -np.gradient(phase, w) * 1e9
    delay -= np.interp(0.0, f, delay)
    return FilterCharacteristic(f, gain, delay)
