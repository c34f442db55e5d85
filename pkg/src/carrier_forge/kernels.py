"""Post-HPA impulse response and first/third-order Volterra kernel tables.

Kernel index k refers to the pulse h_s(u + k) in the integrand; the
corresponding symbol sits k symbols away from the decision instant.
"""
from __future__ import annotations

import hashlib
import os
import threading
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

import numpy as np

from .omux import SlopePair
from .pulse import PulseSpec, SampledPulse, sample_pulse, shifted, srrc, srrc_spectrum

XI = np.log(10.0) / 20.0
# (ns/MHz)(Mbauds)^2 * nu^2 is in ns*MHz; 1 ns*MHz = 1e-3 cycles.
DELAY_UNIT = 1e-3
GL_NODES = 256
CACHE_ENV = "CARRIER_FORGE_CACHE_DIR"
CACHE_VERSION = 1


def ld_transfer(nu, x_g: float, y_d: float):
    """Slope-based linear-distortion transfer function in normalized frequency."""
    nu = np.asarray(nu, dtype=float)
    return np.exp(XI * x_g * nu - 1j * np.pi * DELAY_UNIT * y_d * nu**2)


@lru_cache(maxsize=64)
def spectral_nodes(rolloff: float, n: int = GL_NODES) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes/weights over the RCF support, one panel per smooth piece."""
    x, w = np.polynomial.legendre.leggauss(n)
    lo, hi = (1 - rolloff) / 2, (1 + rolloff) / 2
    edges = [(-hi, -lo), (-lo, lo), (lo, hi)]
    nodes = np.concatenate([(b - a) / 2 * x + (a + b) / 2 for a, b in edges])
    weights = np.concatenate([(b - a) / 2 * w for a, b in edges])
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


@lru_cache(maxsize=64)
def _fourier_rows(rolloff: float, L: int) -> np.ndarray:
    nodes, weights = spectral_nodes(rolloff)
    ks = np.arange(-L, L + 1)
    return np.exp(-2j * np.pi * np.outer(ks, nodes)) * weights


@lru_cache(maxsize=16)
def _synthesis_basis(spec: PulseSpec) -> np.ndarray:
    nodes, weights = spectral_nodes(spec.rolloff)
    u = sample_pulse(spec).grid
    return np.exp(2j * np.pi * np.outer(u, nodes)) * weights


@dataclass(frozen=True, eq=False)
class PostHpaResponse:
    samples: np.ndarray
    slope_pair: SlopePair
    pulse: PulseSpec

    @property
    def sampled_pulse(self) -> SampledPulse:
        return sample_pulse(self.pulse)

    def spectrum(self, nu):
        """Frequency response H_LD(nu) sqrt(H_RCF(nu)) of the OMUX + matched filter."""
        return ld_transfer(nu, self.slope_pair.x_g, self.slope_pair.y_d) * srrc_spectrum(nu, self.pulse.rolloff)


def post_hpa_ir(pulse: PulseSpec, slopes: SlopePair) -> PostHpaResponse:
    if not (np.isfinite(slopes.x_g) and np.isfinite(slopes.y_d)):
        raise ValueError("slopes must be finite")
    nodes, _ = spectral_nodes(pulse.rolloff)
    spec = ld_transfer(nodes, slopes.x_g, slopes.y_d) * srrc_spectrum(nodes, pulse.rolloff)
    h = _synthesis_basis(pulse) @ spec
    # same post-truncation scale as the sampled SRRC, so H_LD = 1 reproduces it
    h *= sample_pulse(pulse).scale
    h.setflags(write=False)
    return PostHpaResponse(h, slopes, pulse)


def kernel_first(resp: PostHpaResponse, k: int) -> complex:
    """int h'(u) h_s(u + k) du, evaluated in the frequency domain (no truncation)."""
    nodes, weights = spectral_nodes(resp.pulse.rolloff)
    a = resp.pulse.rolloff
    integrand = ld_transfer(nodes, resp.slope_pair.x_g, resp.slope_pair.y_d) * srrc_spectrum(nodes, a) ** 2
    return complex(np.sum(weights * integrand * np.exp(-2j * np.pi * nodes * k)))


def _first_order_row(resp: PostHpaResponse, L: int) -> np.ndarray:
    nodes, _ = spectral_nodes(resp.pulse.rolloff)
    a = resp.pulse.rolloff
    integrand = ld_transfer(nodes, resp.slope_pair.x_g, resp.slope_pair.y_d) * srrc_spectrum(nodes, a) ** 2
    return _fourier_rows(a, L) @ integrand


def _shift_matrix(resp: PostHpaResponse, L: int) -> np.ndarray:
    p = resp.sampled_pulse
    return np.stack([shifted(p, k, resp.pulse.oversampling) for k in range(-L, L + 1)])


def kernel_third(resp: PostHpaResponse, k1: int, k2: int, k3: int) -> complex:
    p = resp.sampled_pulse
    osf = resp.pulse.oversampling
    k1, k2 = sorted((k1, k2))  # same rounding for both orders of the symmetric pair
    prod = resp.samples * shifted(p, k1, osf) * shifted(p, k2, osf) * shifted(p, k3, osf)
    return complex(np.sum(prod) * p.step)


def kernel_offset(
    resp: PostHpaResponse,
    shifts,
    delta_f: float,
    pulses,
) -> complex:
    """int h'(u) p_a(u + t1) p_b(u + t2) p_c(u + t3) exp(j 2 pi df u) du.

    Times and ``delta_f`` are normalized to the victim symbol period / rate.
    Each entry of ``pulses`` is a PulseSpec; its symbol rate relative to the
    victim's sets its time scale and it is evaluated by the closed form on the
    victim grid. Fewer than three pulses gives the lower-order kernel.
    """
    u = resp.sampled_pulse.grid
    step = resp.sampled_pulse.step
    half = resp.pulse.truncation_span
    prod = resp.samples * np.exp(2j * np.pi * delta_f * u)
    for tau, spec in zip(shifts, pulses):
        r = spec.symbol_rate / resp.pulse.symbol_rate
        t = r * (u + tau)
        factor = np.sqrt(r) * sample_pulse(spec).scale * srrc(t, spec.rolloff)
        factor[np.abs(t) > spec.truncation_span] = 0.0
        prod = prod * factor
    if np.all(np.abs(np.asarray(shifts, dtype=float)) > 2 * half):
        return 0j
    return complex(np.sum(prod) * step)


@dataclass(frozen=True, eq=False)
class KernelTable:
    L: int
    first_order: np.ndarray  # A1[k + L]
    third_order: np.ndarray  # A3[k1 + L, k2 + L, k3 + L]
    key: tuple

    def a1(self, k: int) -> complex:
        return complex(self.first_order[k + self.L])

    def a3(self, k1: int, k2: int, k3: int) -> complex:
        return complex(self.third_order[k1 + self.L, k2 + self.L, k3 + self.L])


class _Counter:
    def __init__(self):
        self.integrals = 0
        self._lock = threading.Lock()

    def add(self, n: int):
        with self._lock:
            self.integrals += n


integral_counter = _Counter()


def table_key(pulse: PulseSpec, slopes: SlopePair, L: int) -> tuple:
    return (
        float(pulse.symbol_rate),
        float(pulse.rolloff),
        float(slopes.x_g),
        float(slopes.y_d),
        int(L),
        int(pulse.truncation_span),
        int(pulse.oversampling),
    )


def build_kernel_table(pulse: PulseSpec, slopes: SlopePair, L: int = 10,
                       resp: PostHpaResponse | None = None) -> KernelTable:
    """All first-order and third-order kernels with indices in [-L, L].

    ``resp`` may pass in an already synthesized post-HPA response for the
    same pulse and slopes.
    """
    if L < 0:
        raise ValueError("L must be non-negative")
    if resp is None:
        resp = post_hpa_ir(pulse, slopes)
    a1 = _first_order_row(resp, L)
    S = _shift_matrix(resp, L)
    n = 2 * L + 1
    i, j = np.triu_indices(n)
    pair = S[i] * S[j]
    h = resp.samples
    step = resp.sampled_pulse.step
    third_u = ((pair * h.real) @ S.T + 1j * ((pair * h.imag) @ S.T)) * step
    a3 = np.empty((n, n, n), dtype=complex)
    a3[i, j] = third_u
    a3[j, i] = third_u
    integral_counter.add(a1.size + third_u.size)
    a1.setflags(write=False)
    a3.setflags(write=False)
    return KernelTable(L, a1, a3, table_key(pulse, slopes, L))


class KernelCache:
    """Get-or-compute store for kernel tables, optionally persisted on disk.

    Disk files are npz blobs named by a hash of the key; they are not meant to
    be portable across package versions.
    """

    def __init__(self, directory: str | os.PathLike | None = None):
        if directory is None:
            directory = os.environ.get(CACHE_ENV) or None
        self.directory = Path(directory) if directory else None
        self._tables: dict[tuple, KernelTable] = {}
        self._lock = threading.Lock()
        self._key_locks: dict[tuple, threading.Lock] = {}
        self.misses = 0

    def _path(self, key: tuple) -> Path:
        digest = hashlib.sha256(repr((CACHE_VERSION, key)).encode()).hexdigest()[:32]
        return self.directory / f"kt_{digest}.npz"

    def lookup(self, key: tuple) -> KernelTable | None:
        return self._tables.get(key)

    def get(self, pulse: PulseSpec, slopes: SlopePair, L: int = 10) -> KernelTable:
        key = table_key(pulse, slopes, L)
        table = self._tables.get(key)
        if table is not None:
            return table
        with self._lock:
            key_lock = self._key_locks.setdefault(key, threading.Lock())
        with key_lock:
            table = self._tables.get(key)
            if table is None:
                table = self._load(key) or self._compute(pulse, slopes, L)
                self._tables[key] = table
        return table

    def _compute(self, pulse, slopes, L) -> KernelTable:
        self.misses += 1
        table = build_kernel_table(pulse, slopes, L)
        if self.directory is not None:
            self.directory.mkdir(parents=True, exist_ok=True)
            path = self._path(table.key)
            tmp = path.with_suffix(".tmp.npz")
            np.savez(tmp, first=table.first_order, third=table.third_order)
            os.replace(tmp, path)
        return table

    def _load(self, key) -> KernelTable | None:
        if self.directory is None:
            return None
        path = self._path(key)
        if not path.exists():
            return None
        with np.load(path) as data:
            first, third = data["first"], data["third"]
        first.setflags(write=False)
        third.setflags(write=False)
        return KernelTable(key[4], first, third, key)

    def clear(self):
        with self._lock:
            self._tables.clear()
