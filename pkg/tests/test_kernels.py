import threading

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate

from carrier_forge import kernels as kmod
from carrier_forge.kernels import (
    XI,
    KernelCache,
    build_kernel_table,
    kernel_first,
    kernel_offset,
    kernel_third,
    ld_transfer,
    post_hpa_ir,
)
from carrier_forge.moments import kappa_set
from carrier_forge.omux import SlopePair
from carrier_forge.pulse import PulseSpec, rc_spectrum, sample_pulse, srrc, srrc_spectrum

PS = PulseSpec(rolloff=0.2)
FLAT = SlopePair(0.0, 0.0)
TILT = SlopePair.normalized(1.0, 0.0)


def dense_oracle(x_g, y_d, a, n=2**20, osf=64):
    """h' by brute-force inverse FFT of the distorted SRRC spectrum, every 4th sample."""
    nu = np.fft.fftfreq(n, 1 / osf)
    h = np.fft.ifft(ld_transfer(nu, x_g, y_d) * srrc_spectrum(nu, a)) * osf
    return h[(np.arange(-512, 513) * (osf // 16)) % n]


def test_flat_response_is_the_pulse():
    r = post_hpa_ir(PS, FLAT)
    assert np.max(np.abs(r.samples - sample_pulse(PS).samples)) < 1e-9


def test_against_dense_fft():
    r = post_hpa_ir(PS, TILT)
    oracle = dense_oracle(1.0, 0.0, 0.2)
    assert np.max(np.abs(r.samples / sample_pulse(PS).scale - oracle)) < 1e-6


@pytest.mark.parametrize("x_g", [0.5, 1.0, 2.0])
def test_parseval(x_g):
    r = post_hpa_ir(PS, SlopePair.normalized(x_g, 120.0))
    grid = np.sum(np.abs(r.samples) ** 2) * PS.step
    ref = integrate.quad(lambda v: np.exp(2 * XI * x_g * v) * rc_spectrum(v, 0.2), -0.6, 0.6,
                         points=[-0.4, 0.4], limit=200)[0]
    assert abs(grid / ref - 1) < 1e-7


def test_first_order_zero_distortion():
    r = post_hpa_ir(PS, FLAT)
    assert abs(kernel_first(r, 0) - 1) < 1e-6
    assert abs(kernel_first(r, 3)) < 1e-6
    t = build_kernel_table(PS, FLAT, 10)
    impulse = np.zeros(21)
    impulse[10] = 1
    assert np.max(np.abs(t.first_order - impulse)) < 1e-6


def test_first_order_against_oracle():
    # both pulses untruncated on a 16384-symbol periodic grid
    n, osf = 2**20, 64
    nu = np.fft.fftfreq(n, 1 / osf)
    h = np.fft.ifft(ld_transfer(nu, 1.0, 0.0) * srrc_spectrum(nu, 0.2)) * osf
    s = np.fft.ifft(srrc_spectrum(nu, 0.2) * np.exp(2j * np.pi * nu)) * osf
    oracle = np.sum(h * s.real) / osf
    assert abs(kernel_first(post_hpa_ir(PS, TILT), 1) - oracle) < 1e-6


def test_third_order_symmetry_and_reality():
    r = post_hpa_ir(PS, SlopePair.normalized(2.0, 250.0))
    assert kernel_third(r, 2, -1, 0) == kernel_third(r, -1, 2, 0)
    flat = build_kernel_table(PS, FLAT, 4)
    assert np.max(np.abs(flat.third_order.imag)) < 1e-9
    q = integrate.quad(lambda u: srrc(np.array([u]), 0.2)[0] ** 4, -32, 32, points=[0], limit=500)[0]
    assert abs(flat.a3(0, 0, 0) - q * sample_pulse(PS).scale ** 4) < 1e-7


def test_table_matches_single_integrals():
    t = build_kernel_table(PS, TILT, 3)
    r = post_hpa_ir(PS, TILT)
    for k in [(0, 0, 0), (1, -2, 3), (-3, -3, 2)]:
        assert abs(t.a3(*k) - kernel_third(r, *k)) < 1e-12
    assert abs(t.a1(2) - kernel_first(r, 2)) < 1e-12


def test_table_layout():
    t = build_kernel_table(PS, TILT, 10)
    assert t.first_order.shape == (21,)
    assert t.third_order.size == 9261
    assert np.array_equal(t.third_order, t.third_order.transpose(1, 0, 2))
    i, j = np.triu_indices(21)
    assert len(set(zip(i, j))) * 21 == 4851


def test_offset_reduction():
    r = post_hpa_ir(PS, TILT)
    assert abs(kernel_offset(r, (1, -2, 0), 0.0, (PS, PS, PS)) - kernel_third(r, 1, -2, 0)) < 1e-9
    assert abs(kernel_offset(r, (1, -2, 0), 5.0, (PS, PS, PS))) < 1e-6
    assert abs(kernel_offset(r, (3,), 0.0, (PS,)) - kernel_first(r, 3)) < 1e-5


@given(st.floats(-4, 4), st.floats(-800, 800))
def test_sign_flip_mapping(x_g, y_d):
    t = build_kernel_table(PS, SlopePair.normalized(x_g, y_d), 3)
    td = build_kernel_table(PS, SlopePair.normalized(x_g, -y_d), 3)
    tg = build_kernel_table(PS, SlopePair.normalized(-x_g, y_d), 3)
    assert np.allclose(td.first_order, np.conj(t.first_order[::-1]), atol=1e-12)
    assert np.allclose(td.third_order, np.conj(t.third_order[::-1, ::-1, ::-1]), atol=1e-12)
    assert np.allclose(tg.first_order, t.first_order[::-1], atol=1e-12)
    k, kd, kg = kappa_set(t), kappa_set(td), kappa_set(tg)
    for name in ("ku11", "ki11", "ku33", "ki33", "ku13", "ki13"):
        ref = abs(getattr(k, name))
        for other in (kd, kg):
            assert abs(abs(getattr(other, name)) - ref) <= 1e-6 * max(ref, 1e-12)


def test_oversampling_convergence():
    base = build_kernel_table(PS, SlopePair.normalized(2.0, 300.0), 10)
    fine = build_kernel_table(PulseSpec(rolloff=0.2, oversampling=32), SlopePair.normalized(2.0, 300.0), 10)
    scale = np.abs(base.third_order).max()
    assert np.max(np.abs(fine.third_order - base.third_order)) < 1e-6 * scale
    assert np.max(np.abs(fine.first_order - base.first_order)) < 1e-12


@pytest.mark.xfail(strict=True, reason="energy renormalization shifts A3 by ~4x the 8e-7 truncation scale")
def test_span_convergence():
    base = build_kernel_table(PS, SlopePair.normalized(2.0, 300.0), 10)
    wide = build_kernel_table(PulseSpec(rolloff=0.2, truncation_span=64), SlopePair.normalized(2.0, 300.0), 10)
    assert np.max(np.abs(wide.third_order - base.third_order)) < 1e-6 * np.abs(base.third_order).max()


def test_span_convergence_loose():
    base = build_kernel_table(PS, SlopePair.normalized(2.0, 300.0), 10)
    wide = build_kernel_table(PulseSpec(rolloff=0.2, truncation_span=64), SlopePair.normalized(2.0, 300.0), 10)
    assert np.max(np.abs(wide.third_order - base.third_order)) < 1e-5 * np.abs(base.third_order).max()


def test_cache_hit_does_no_work():
    cache = KernelCache(directory="")
    t1 = cache.get(PS, TILT, 6)
    before = kmod.integral_counter.integrals
    t2 = cache.get(PS, TILT, 6)
    assert kmod.integral_counter.integrals - before == 0
    assert t1 is t2
    assert cache.misses == 1


def test_cache_disk_roundtrip(tmp_path):
    a = KernelCache(tmp_path).get(PS, TILT, 5)
    fresh = KernelCache(tmp_path)
    before = kmod.integral_counter.integrals
    b = fresh.get(PS, TILT, 5)
    assert kmod.integral_counter.integrals == before and fresh.misses == 0
    assert a.first_order.tobytes() == b.first_order.tobytes()
    assert a.third_order.tobytes() == b.third_order.tobytes()


def test_cache_env_directory(tmp_path, monkeypatch):
    monkeypatch.setenv(kmod.CACHE_ENV, str(tmp_path))
    KernelCache().get(PS, FLAT, 2)
    assert list(tmp_path.glob("kt_*.npz"))


def test_recompute_is_byte_identical():
    a = build_kernel_table(PS, TILT, 6)
    b = build_kernel_table(PS, TILT, 6)
    assert a.third_order.tobytes() == b.third_order.tobytes()


def test_concurrent_get_or_compute():
    cache = KernelCache(directory="")
    out = []
    threads = [threading.Thread(target=lambda: out.append(cache.get(PS, TILT, 8))) for _ in range(6)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert cache.misses == 1
    assert all(t is out[0] for t in out)


def test_rejects_bad_input():
    with pytest.raises(ValueError):
        build_kernel_table(PS, FLAT, -1)
    with pytest.raises(ValueError):
        post_hpa_ir(PS, SlopePair.normalized(float("nan"), 0.0))
