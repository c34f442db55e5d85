"""Adjacent-channel interference power from the moment structure of the multiplex.

The third-order HPA output is split by carrier content into intermodulation
patterns x_a x_b x_c*. Patterns with different carrier content are
uncorrelated, so their powers add. The autocorrelation of a pattern is a
product of per-carrier autocorrelations (pairings of symbols) plus the
fourth- and sixth-cumulant terms of symbol coincidences, weighted by c4 and
c6. Its power at the victim decision sampler is the pattern's spectrum
weighted by the victim's response, evaluated here by Parseval as a single
lag-domain sum against the inverse transform of that weighting.

Patterns containing the victim's own symbols exactly once are sampled
synchronously with the victim, and for those the weighting is the exact
cyclostationary one, sum_k |F_k(f)|^2 with F_k(u) = h'(u) h_s(u + k). All
other patterns are treated as wide-sense stationary (random relative timing).
The mean of |x_j|^2 in cross-modulation products is not interference: it is
gain compression, folded into the effective linear gain of each carrier.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations_with_replacement

import numpy as np
from scipy import fft as sfft

from .carriers import CarrierSpec
from .hpa import TaylorCoeffs
from .kernels import XI, post_hpa_ir
from .moments import QPSK, ConstellationMoments
from .pulse import PulseSpec, rc_spectrum, shifted, srrc

W_SHIFTS = 16  # victim symbols either side entering the synchronous weighting
PARTS = ("first_order", "cross_mod", "intermod")


@dataclass(frozen=True)
class LagGrid:
    """Paired grids: lags tau_n = n dt and frequencies f_k = k df, with M dt df = 1."""

    df: float
    size: int

    @property
    def dt(self) -> float:
        return 1.0 / (self.size * self.df)

    @property
    def tau(self) -> np.ndarray:
        return sfft.fftfreq(self.size, d=self.df)  # = n dt, n in FFT order

    @property
    def f(self) -> np.ndarray:
        return sfft.fftfreq(self.size, d=self.dt)


def lag_grid(carriers: list[CarrierSpec]) -> LagGrid:
    """A grid fine enough for every pattern of this carrier set.

    It depends on the carriers' placement only through a bound on the
    outermost band edge, which is the same for every contiguous placement of
    the same carriers, so caches keyed on the grid survive permutations.
    """
    df = min(c.rolloff * c.symbol_rate for c in carriers) / 16
    edge = max(sum(c.bandwidth for c in carriers) / 2,
               max(abs(c.center_mhz) + c.bandwidth / 2 for c in carriers))
    edge = float(np.ceil(edge))
    b_max = max(c.bandwidth for c in carriers)
    # aliases of a shifted pattern spectrum (offset up to 4 edges, half-width up
    # to 1.5 b_max) must clear the victim weighting (half-width up to b_max)
    fs = 1.05 * (4.0 * edge + 2.5 * b_max)
    return LagGrid(df, sfft.next_fast_len(int(np.ceil(fs / df))))


class _CarrierLags:
    """Unit-power autocorrelation pieces of one SRRC carrier on a lag grid."""

    def __init__(self, grid: LagGrid, rate: float, rolloff: float):
        tau = grid.tau
        p = srrc(rate * tau, rolloff)  # symbol pulse, energy 1/rate
        self.r1 = rate * _corr(p, p, grid.dt)
        p2, p3 = p * p, p * p * p
        self.r22 = rate * _corr(p2, p2, grid.dt)
        self.r31 = rate * _corr(p3, p, grid.dt)
        self.r33 = rate * _corr(p3, p3, grid.dt)


def _reach(carriers, factors, v, synchronous: bool) -> float:
    """Largest offset at which a pattern spectrum can still meet the victim weighting."""
    rest = list(factors)
    if synchronous:
        rest.remove(v)
    half = sum(carriers[i].bandwidth / 2 for i in rest)
    # the synchronous weighting is the spectrum of a product of two pulses
    return half + carriers[v].bandwidth * (1.0 if synchronous else 0.5)


def _corr(a, b, dt):
    """Circular int a(t) b(t + tau) dt for real even sequences in FFT order."""
    return sfft.irfft(np.conj(sfft.rfft(a)) * sfft.rfft(b), n=a.size) * dt


class AciEngine:
    """Evaluates I_ACI for a victim inside a placed multiplex.

    With ``cache=True`` all placement-independent pieces (carrier
    autocorrelations, pattern autocorrelations, victim weightings) persist
    between calls; without it every call starts from scratch.
    """

    def __init__(self, moments: ConstellationMoments = QPSK, cache: bool = True,
                 truncation_span: int = 32, oversampling: int = 16):
        self.moments = moments
        self.cache = cache
        self.truncation_span = truncation_span
        self.oversampling = oversampling
        self._store: dict = {}
        # post-HPA responses already synthesized by the caller, keyed by carrier
        self.responses: dict = {}

    def _memo(self, key, fn):
        hit = self._store.get(key)
        if hit is None:
            hit = self._store[key] = fn()
        return hit

    def reset(self):
        self._store = {}

    def lags(self, grid: LagGrid, c: CarrierSpec) -> _CarrierLags:
        return self._memo(("lags", grid, c.symbol_rate, c.rolloff),
                          lambda: _CarrierLags(grid, c.symbol_rate, c.rolloff))

    # autocorrelations of the building blocks, unit carrier power
    def _square(self, grid, c):  # x^2
        q = self.lags(grid, c)
        return 2 * q.r1**2 + self.moments.c4 * q.r22

    def _power_fluct(self, grid, c):  # |x|^2 - E|x|^2
        q = self.lags(grid, c)
        return q.r1**2 + self.moments.c4 * q.r22

    def _cube(self, grid, c):  # x |x|^2
        q = self.lags(grid, c)
        c4, c6 = self.moments.c4, self.moments.c6
        return 2 * q.r1**3 + 5 * c4 * q.r22 * q.r1 + 4 * q.r1 + 4 * c4 * q.r31 + c6 * q.r33

    def pattern_lags(self, grid: LagGrid, carriers, a: int, b: int, c: int, drop: int | None = None):
        """Autocorrelation of x_a x_b x_c* with one factor ``drop`` removed (if given)."""
        ident = tuple((x.symbol_rate, x.rolloff) for x in (carriers[a], carriers[b], carriers[c]))
        where = lambda i: None if i is None else [a, b, c].index(i)  # noqa: E731
        key = ("pat", grid, ident, a == b, a == c, b == c, where(drop), drop == c)
        return self._memo(key, lambda: self._pattern_lags(grid, carriers, a, b, c, drop))

    def _pattern_lags(self, grid, carriers, a, b, c, drop):
        ca, cb, cc = carriers[a], carriers[b], carriers[c]
        r1 = lambda x: self.lags(grid, x).r1  # noqa: E731
        if drop is not None:
            rest = [a, b, c]
            rest.remove(drop)
            o, w = rest
            if o == w:
                # x_o x_o (drop was the conjugate) or x_o x_o* (drop was unconjugated)
                return self._square(grid, carriers[o]) if drop == c else self._power_fluct(grid, carriers[o])
            return r1(carriers[o]) * r1(carriers[w])
        if a == b == c:
            return self._cube(grid, ca)
        if a == b:
            return self._square(grid, ca) * r1(cc)
        if c in (a, b):
            o = cb if c == a else ca
            return r1(o) * self._power_fluct(grid, cc)
        return r1(ca) * r1(cb) * r1(cc)

    def victim_weighting(self, grid: LagGrid, c: CarrierSpec) -> tuple[np.ndarray, np.ndarray]:
        """Inverse transforms (times dt) of the stationary and synchronous victim weightings."""
        key = ("w", grid, c.symbol_rate, c.rolloff, c.slopes.x_g, c.slopes.y_d)
        return self._memo(key, lambda: self._weighting(grid, c))

    def _weighting(self, grid: LagGrid, c: CarrierSpec):
        rate = c.symbol_rate
        f = grid.f
        nu = f / rate
        g2 = np.exp(2 * XI * c.slopes.x_g * nu) * rc_spectrum(nu, c.rolloff)
        w_nu, w = self._sync_response(c)
        sync = np.interp(nu, w_nu, w, left=0.0, right=0.0)
        # int W(f) exp(-j 2 pi f tau) df, then times dt for the lag sum
        scale = grid.df * grid.dt
        return sfft.fft(g2) * scale, sfft.fft(sync) * scale

    def _sync_response(self, c: CarrierSpec):
        def compute():
            pulse = PulseSpec(1.0, c.rolloff, self.truncation_span, self.oversampling)
            resp = self.responses.get(c) or post_hpa_ir(pulse, c.slopes)
            sp = resp.sampled_pulse
            ks = range(-W_SHIFTS, W_SHIFTS + 1)
            fk = resp.samples * np.stack([shifted(sp, k, pulse.oversampling) for k in ks])
            npad = 4 * sp.samples.size
            spec = sfft.fft(fk, npad, axis=1)
            return np.fft.fftshift(sfft.fftfreq(npad, d=sp.step)), np.fft.fftshift(
                np.sum(np.abs(spec) ** 2, axis=0)) * sp.step**2

        return self._memo(("sync", c.rolloff, c.slopes.x_g, c.slopes.y_d), compute)

    def aci_power(self, victim: int, carriers: list[CarrierSpec], coeffs: TaylorCoeffs, P: float,
                  grid: LagGrid | None = None, detail: dict | None = None) -> tuple[float, dict]:
        """Total ACI power at the victim's decision samples and its split by kind."""
        parts = dict.fromkeys(PARTS, 0.0)
        if len(carriers) == 1:
            return 0.0, parts
        if not self.cache:
            self.reset()
        grid = grid or lag_grid(carriers)
        tau = grid.tau
        v = victim
        cv = carriers[v]
        w_stat, w_sync = self.victim_weighting(grid, cv)
        g3sq = abs(coeffs.gamma3) ** 2
        rho = [c.power_fraction for c in carriers]
        n = len(carriers)

        # exp(j 2 pi (f_a + f_b - f_c - f_v) tau) assembled from per-carrier phasors
        phasor = [np.exp(2j * np.pi * (c.center_mhz - cv.center_mhz / 2) * tau) for c in carriers]
        phasor_conj = [np.exp(-2j * np.pi * c.center_mhz * tau) for c in carriers]
        w_stat_lin = w_stat * np.exp(-2j * np.pi * cv.center_mhz * tau)

        def weigh(r, w, *factors):
            acc = r * w
            for f in factors:
                acc = acc * f
            return float(np.real(np.sum(acc)))

        for j, cj in enumerate(carriers):
            if j == v:
                continue
            g1j = coeffs.gamma1 + 2 * coeffs.gamma3 * (1 - rho[j]) * P
            val = weigh(self.lags(grid, cj).r1, w_stat_lin, np.exp(2j * np.pi * cj.center_mhz * tau))
            parts["first_order"] += abs(g1j) ** 2 * rho[j] * P * val

        for a, b in combinations_with_replacement(range(n), 2):
            for c in range(n):
                if a == b == c == v:
                    continue
                mult = 1 if a == b else 2
                weight = g3sq * mult**2 * rho[a] * rho[b] * rho[c] * P**3
                phase = (phasor[a], phasor[b], phasor_conj[c])
                count_v = (a == v) + (b == v) + (c == v)
                off = carriers[a].center_mhz + carriers[b].center_mhz - carriers[c].center_mhz - cv.center_mhz
                if abs(off) >= _reach(carriers, (a, b, c), v, count_v == 1):
                    continue  # band-limited spectra that cannot overlap: exactly zero
                if count_v == 1:
                    val = weigh(self.pattern_lags(grid, carriers, a, b, c, drop=v), w_sync, *phase)
                else:
                    # x_o |x_v|^2 keeps only the fluctuation: its mean is leakage of o, counted above
                    val = weigh(self.pattern_lags(grid, carriers, a, b, c), w_stat, *phase)
                kind = "cross_mod" if (c in (a, b) and a != b) else "intermod"
                parts[kind] += weight * val
                if detail is not None:
                    detail[(a, b, c)] = weight * val
        return sum(parts.values()), parts
