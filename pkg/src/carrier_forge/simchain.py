"""Monte Carlo transmission chain used as the reference for the CIR formula.

Chain: i.i.d. symbols -> SRRC shaping -> frequency multiplex -> HPA ->
OMUX (slope model or measured characteristic) -> matched filter -> symbol
sampling -> data-aided CIR estimate.

Every linear stage works on the exact DFT of a periodic symbol stream, so
pulses are never truncated and border effects do not arise; guard symbols
are dropped anyway before estimation.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import fft as sfft

from .carriers import CarrierSpec
from .cir import db
from .hpa import SalehParams, TaylorCoeffs, apply_polynomial, apply_saleh, taylor_coeffs
from .kernels import DELAY_UNIT, XI
from .moments import apsk16_points, qpsk_points
from .omux import FilterCharacteristic, fit_slopes
from .pulse import srrc_spectrum

HPA_MODES = ("truncated-N1", "exact-saleh")
LINEAR_MODES = ("slope-based", "characteristic")


@dataclass(frozen=True)
class SimConfig:
    n_symbols: int = 100_000
    seed: int = 1
    hpa_mode: str = "truncated-N1"
    linear_mode: str = "slope-based"
    constellation: str = "QPSK"
    ring_ratio: float = 2.7
    oversampling: int = 8  # samples per symbol of the slowest carrier (minimum)
    guard_symbols: int = 32
    n_boot: int = 200
    n_blocks: int = 32
    saleh: SalehParams = SalehParams()
    expansion_point: float = 0.0

    def __post_init__(self):
        if self.hpa_mode not in HPA_MODES:
            raise ValueError(f"hpa_mode must be one of {HPA_MODES}")
        if self.linear_mode not in LINEAR_MODES:
            raise ValueError(f"linear_mode must be one of {LINEAR_MODES}")
        if self.constellation not in ("QPSK", "16APSK"):
            raise ValueError("constellation must be QPSK or 16APSK")
        if self.guard_symbols < 0 or self.n_symbols <= 2 * self.guard_symbols:
            raise ValueError("n_symbols must exceed twice the guard")

    @property
    def coeffs(self) -> TaylorCoeffs:
        return taylor_coeffs(self.saleh, self.expansion_point)

    def points(self) -> np.ndarray:
        return qpsk_points() if self.constellation == "QPSK" else apsk16_points(self.ring_ratio)


@dataclass(frozen=True)
class CirEstimate:
    c_hat: float
    i_hat: float
    cir_db: float
    stderr_db: float
    effective_gain: complex
    n_samples: int


@dataclass(eq=False)
class Waveform:
    x: np.ndarray
    components: list  # per-carrier scaled complex baseband, already at their centers
    symbols: list
    carriers: list
    fs: float
    duration: float
    center_bins: list
    n_per_carrier: list
    P: float
    delays: list = field(default_factory=list)  # per-carrier timing offset, in microseconds
    extra: dict = field(default_factory=dict)

    @property
    def rates(self) -> list[float]:
        return [n / self.duration for n in self.n_per_carrier]


def _grid(carriers: list[CarrierSpec], config: SimConfig) -> tuple[float, float, int]:
    r_min = min(c.symbol_rate for c in carriers)
    duration = config.n_symbols / r_min
    # third-order products span 3x the occupied band; their aliases must clear it
    half_band = max(abs(c.center_mhz) + c.bandwidth / 2 for c in carriers)
    fs = max(config.oversampling * r_min, 4.0 * half_band * 1.05)
    m = sfft.next_fast_len(int(np.ceil(fs * duration)))
    return m / duration, duration, m


def simulate_waveform(carriers: list[CarrierSpec], P: float, config: SimConfig) -> Waveform:
    if P <= 0:
        raise ValueError("P must be positive")
    fractions = np.array([c.power_fraction for c in carriers])
    if abs(fractions.sum() - 1.0) > 1e-9:
        raise ValueError("power fractions must sum to 1")
    fs, duration, m = _grid(carriers, config)
    half = max(abs(c.center_mhz) + c.bandwidth / 2 for c in carriers)
    if 4.0 * half > fs:
        raise ValueError("sample rate insufficient for the multiplex bandwidth")
    rng = np.random.default_rng(config.seed)
    pts = config.points()
    freqs = sfft.fftfreq(m, d=1.0 / fs)
    x = np.zeros(m, dtype=complex)
    components, symbols, bins, counts, delays = [], [], [], [], []
    for i, c in enumerate(carriers):
        n = int(round(duration * c.symbol_rate))
        rate = n / duration
        s = pts[rng.integers(0, pts.size, n)]
        # independent modulators: the first carrier is the timing reference
        tau = 0.0 if i == 0 else float(rng.uniform(0.0, 1.0 / rate))
        k0 = int(round(c.center_mhz * duration))
        spec = np.zeros(m, dtype=complex)
        rel = freqs - k0 / duration
        band = np.abs(rel) < (1 + c.rolloff) * rate / 2
        idx = np.nonzero(band)[0]
        sym_spec = sfft.fft(s)
        offset = np.rint(rel[idx] * duration).astype(np.int64)  # signed bin offset from the carrier
        spec[idx] = ((fs / rate) * srrc_spectrum(rel[idx] / rate, c.rolloff) * sym_spec[offset % n]
                     * np.exp(-2j * np.pi * rel[idx] * tau))
        comp = sfft.ifft(spec)
        comp *= np.sqrt(c.power_fraction * P / np.mean(np.abs(comp) ** 2))
        x += comp
        components.append(comp)
        symbols.append(s)
        bins.append(k0)
        counts.append(n)
        delays.append(tau)
    scale = np.sqrt(P / np.mean(np.abs(x) ** 2))
    x *= scale
    components = [comp * scale for comp in components]
    return Waveform(x, components, symbols, list(carriers), fs, duration, bins, counts, P, delays)


def apply_hpa(x: np.ndarray, config: SimConfig, coeffs: TaylorCoeffs | None = None) -> np.ndarray:
    if config.hpa_mode == "exact-saleh":
        return apply_saleh(x, config.saleh)
    return apply_polynomial(x, coeffs or config.coeffs)


def _victim_response(wf: Waveform, victim: int, freqs: np.ndarray, config: SimConfig,
                     omux: FilterCharacteristic | None) -> np.ndarray:
    c = wf.carriers[victim]
    rate = wf.rates[victim]
    nu = freqs / rate
    mf = srrc_spectrum(nu, c.rolloff)
    if config.linear_mode == "slope-based":
        s = c.slopes
        return mf * np.exp(XI * s.x_g * nu - 1j * np.pi * DELAY_UNIT * s.y_d * nu**2)
    if omux is None:
        raise ValueError("characteristic mode needs an OMUX characteristic")
    f_abs = freqs + c.center_mhz
    # receiver-side intercepts: constant gain and delay over the victim band do not distort
    fit = fit_slopes(omux, c.center_mhz, c.bandwidth)
    lo, hi = fit.fit_band
    fb = np.linspace(lo, hi, 64)
    g0 = np.mean(omux.gain_at(fb)) - fit.g * np.mean(fb - c.center_mhz)
    tau0 = np.mean(omux.delay_at(fb)) - fit.d * np.mean(fb - c.center_mhz)
    order = np.argsort(f_abs)
    fa = f_abs[order]
    tau = omux.delay_at(fa) - tau0
    phase_cycles = np.concatenate([[0.0], np.cumsum(0.5 * (tau[1:] + tau[:-1]) * np.diff(fa))]) * DELAY_UNIT
    phase_cycles -= np.interp(c.center_mhz, fa, phase_cycles)
    h = np.empty_like(freqs, dtype=complex)
    h[order] = 10 ** ((omux.gain_at(fa) - g0) / 20) * np.exp(-2j * np.pi * phase_cycles)
    return mf * h


def receive(wf: Waveform, y: np.ndarray, victim: int, config: SimConfig,
            omux: FilterCharacteristic | None = None, y_spectrum: np.ndarray | None = None) -> np.ndarray:
    """Matched-filter output of one carrier sampled at its symbol instants."""
    m = y.size
    n = wf.n_per_carrier[victim]
    rate = wf.rates[victim]
    c = wf.carriers[victim]
    Y = sfft.fft(y) if y_spectrum is None else y_spectrum
    Y = np.roll(Y, -wf.center_bins[victim])
    freqs = sfft.fftfreq(m, d=1.0 / wf.fs)
    idx = np.nonzero(np.abs(freqs) < (1 + c.rolloff) * rate / 2)[0]
    Z = Y[idx] * _victim_response(wf, victim, freqs[idx], config, omux)
    if wf.delays:
        Z = Z * np.exp(2j * np.pi * freqs[idx] * wf.delays[victim])
    folded = np.zeros(n, dtype=complex)
    np.add.at(folded, np.rint(freqs[idx] * wf.duration).astype(np.int64) % n, Z)
    return sfft.ifft(folded) * (n / m)


def _trim(a: np.ndarray, guard: int) -> np.ndarray:
    return a[guard: a.size - guard] if guard else a


def estimate_cir(z: np.ndarray, s: np.ndarray, config: SimConfig = SimConfig()) -> CirEstimate:
    z = _trim(np.asarray(z), config.guard_symbols)
    s = _trim(np.asarray(s), config.guard_symbols)
    if z.size < 10_000:
        raise ValueError("need at least 1e4 decision samples")
    ss = np.abs(s) ** 2
    if np.var(s) <= 0 or ss.sum() == 0:
        raise ValueError("degenerate symbol record")
    blocks = np.array_split(np.arange(z.size), config.n_blocks)
    zs = np.array([np.sum(z[b] * np.conj(s[b])) for b in blocks])
    sp = np.array([np.sum(ss[b]) for b in blocks])
    zz = np.array([np.sum(np.abs(z[b]) ** 2) for b in blocks])

    def ratio(zs_, sp_, zz_):
        c = abs(zs_) ** 2 / sp_
        return c, zz_ - c

    c_tot, i_tot = ratio(zs.sum(), sp.sum(), zz.sum())
    # an ideal channel leaves only rounding residue, which can even come out negative
    i_tot = max(i_tot, 1e-16 * c_tot)
    n = z.size
    rng = np.random.default_rng([config.seed, 0xB007])
    picks = rng.integers(0, config.n_blocks, size=(config.n_boot, config.n_blocks))
    cb, ib = ratio(zs[picks].sum(1), sp[picks].sum(1), zz[picks].sum(1))
    stderr = float(np.std(db(cb / np.maximum(ib, 1e-300)), ddof=1))
    gain = zs.sum() / sp.sum()
    return CirEstimate(
        c_hat=float(c_tot / n),
        i_hat=float(i_tot / n),
        cir_db=float(db(c_tot / i_tot)),
        stderr_db=stderr,
        effective_gain=complex(gain),
        n_samples=n,
    )


def simulate_cir(carriers: list[CarrierSpec], P: float, config: SimConfig = SimConfig(),
                 omux: FilterCharacteristic | None = None, victims=None) -> list[CirEstimate]:
    """Run the chain once and estimate the CIR of every (or the listed) carrier."""
    wf = simulate_waveform(carriers, P, config)
    y = apply_hpa(wf.x, config)
    Y = sfft.fft(y)
    victims = range(len(carriers)) if victims is None else victims
    return [estimate_cir(receive(wf, y, v, config, omux, Y), wf.symbols[v], config) for v in victims]


def estimate_aci(wf: Waveform, y: np.ndarray, victim: int, config: SimConfig,
                 omux: FilterCharacteristic | None = None) -> float:
    """Interference power injected into the victim by the other carriers.

    The victim's own component is re-run alone through the polynomial HPA with
    its linear gain compressed by the other carriers' mean power; the
    difference of the two decision-sample streams carries every
    other-carrier contribution (leakage, cross modulation, intermodulation).
    Any residual part coherent with the victim symbols is removed.
    """
    if config.hpa_mode != "truncated-N1":
        raise ValueError("the ACI oracle is defined for the truncated-N1 HPA only")
    coeffs = config.coeffs
    rho = wf.carriers[victim].power_fraction
    ref_coeffs = TaylorCoeffs(coeffs.gamma1 + 2 * coeffs.gamma3 * (1 - rho) * wf.P, coeffs.gamma3)
    y_ref = apply_polynomial(wf.components[victim], ref_coeffs)
    d = receive(wf, y, victim, config, omux) - receive(wf, y_ref, victim, config, omux)
    s = _trim(wf.symbols[victim], config.guard_symbols)
    d = _trim(d, config.guard_symbols)
    coherent = abs(np.vdot(s, d)) ** 2 / np.vdot(s, s).real
    return float((np.vdot(d, d).real - coherent) / d.size)


def merge_estimates(estimates: list[CirEstimate]) -> CirEstimate:
    """Pool independent realizations of the same victim by power-weighted averaging."""
    if not estimates:
        raise ValueError("nothing to merge")
    if len(estimates) == 1:
        return estimates[0]
    n = np.array([e.n_samples for e in estimates], dtype=float)
    w = n / n.sum()
    c = float(np.dot(w, [e.c_hat for e in estimates]))
    i = float(np.dot(w, [e.i_hat for e in estimates]))
    gain = complex(np.dot(w, [e.effective_gain for e in estimates]))
    stderr = float(np.sqrt(np.dot(w**2, [e.stderr_db**2 for e in estimates])))
    return CirEstimate(c, i, float(db(c / i)), stderr, gain, int(n.sum()))
